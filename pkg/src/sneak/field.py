"""Prime-field arithmetic, Vandermonde solving and Berlekamp-Welch decoding.

Two layers live here.  ``FieldElement`` is a small checked value type for
callers that want operator syntax and mixed-field protection.  ``PrimeField``
works on raw residues and is what the protocol code uses internally; every
method accepts either Python ints or numpy integer arrays, so the oracle can
push a whole batch of randomness assignments through the same code path.
Inverses are only ever taken of public quantities (node ids and their
differences), which keeps ``inv`` scalar.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class FieldError(ValueError):
    """Invalid field construction or operand."""


class DecodeError(ValueError):
    """No codeword lies within the allowed error distance."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def smallest_prime_above(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    p = max(n + 1, 2)
    while not is_prime(p):
        p += 1
    return p


class PrimeField:
    """Arithmetic in F_q on canonical residues (ints or integer arrays)."""

    __slots__ = ("q",)

    def __init__(self, q: int):
        if not isinstance(q, int) or not is_prime(q):
            raise FieldError(f"field modulus must be prime, got {q!r}")
        self.q = q

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.q, self)

    # -- raw residue arithmetic --------------------------------------------

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def inv(self, a: int) -> int:
        a = int(a) % self.q
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.q - 2, self.q)

    def pow(self, a: int, e: int) -> int:
        a = int(a) % self.q
        if e < 0:
            return pow(self.inv(a), -e, self.q)
        return pow(a, e, self.q)

    def dot(self, u: Sequence, v: Sequence):
        if len(u) != len(v):
            raise FieldError("length mismatch in dot product")
        acc = 0
        for a, b in zip(u, v):
            acc = (acc + a * b) % self.q
        return acc

    def evaluate(self, coeffs: Sequence, x: int):
        """Horner evaluation of sum coeffs[j] x^j."""
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % self.q
        return acc

    # -- encoding vectors and interpolation ---------------------------------

    def encoding_vector(self, node_id: int, d: int) -> tuple[int, ...]:
        if not 1 <= node_id < self.q:
            raise FieldError(f"node id {node_id} outside [1, {self.q})")
        if d < 1:
            raise FieldError("dimension must be positive")
        out = [1]
        for _ in range(d - 1):
            out.append(out[-1] * node_id % self.q)
        return tuple(out)

    def lagrange_basis(self, ids: Sequence[int]) -> list[list[int]]:
        """Coefficient vectors of the Lagrange basis polynomials for ``ids``.

        Built from the master polynomial prod (x - x_m) by synthetic
        division, so the whole basis costs O(d^2).
        """
        q = self.q
        xs = [int(x) % q for x in ids]
        if len(set(xs)) != len(xs):
            raise FieldError(f"duplicate evaluation points in {list(ids)}")
        d = len(xs)
        master = [1]  # low-to-high coefficients
        for x in xs:
            nxt = [0] * (len(master) + 1)
            for i, c in enumerate(master):
                nxt[i] = (nxt[i] - x * c) % q
                nxt[i + 1] = (nxt[i + 1] + c) % q
            master = nxt
        basis = []
        for j, xj in enumerate(xs):
            # master / (x - xj), high to low
            quot = [0] * d
            carry = 0
            for i in range(d, 0, -1):
                carry = (master[i] + carry * xj) % q if i < d else master[i]
                quot[i - 1] = carry
            denom = 1
            for m, xm in enumerate(xs):
                if m != j:
                    denom = denom * (xj - xm) % q
            scale = self.inv(denom)
            basis.append([c * scale % q for c in quot])
        return basis

    def solve_vandermonde(self, ids: Sequence[int], values: Sequence) -> list:
        """Return v with <psi_{ids[j]}, v> = values[j] for every j."""
        if len(ids) != len(values):
            raise FieldError("ids and values differ in length")
        if not ids:
            raise FieldError("need at least one point")
        for x in ids:
            if not 0 <= int(x) < self.q:
                raise FieldError(f"id {x} outside [0, {self.q})")
        basis = self.lagrange_basis(ids)
        d = len(ids)
        out = []
        for i in range(d):
            acc = 0
            for j in range(d):
                if basis[j][i]:
                    acc = (acc + values[j] * basis[j][i]) % self.q
            out.append(acc)
        return out

    def decode_with_errors(self, ids: Sequence[int], values: Sequence[int],
                           d: int, t: int) -> list[int]:
        """Berlekamp-Welch: the degree < d polynomial within distance t.

        Scalar values only.  Raises ``DecodeError`` when no codeword lies
        within distance ``t`` of the received word.
        """
        q = self.q
        ids = [int(x) for x in ids]
        values = [int(v) % q for v in values]
        if len(ids) != len(values):
            raise FieldError("ids and values differ in length")
        if len(set(ids)) != len(ids):
            raise FieldError("duplicate ids")
        if len(ids) < d + 2 * t:
            raise FieldError(f"need {d + 2 * t} points, got {len(ids)}")
        if t == 0:
            coeffs = self.solve_vandermonde(ids[:d], values[:d])
            if any(self.evaluate(coeffs, x) != y for x, y in zip(ids, values)):
                raise DecodeError("points are not on a single codeword")
            return coeffs
        for e in range(t, -1, -1):
            # unknowns: Q_0..Q_{d+e-1}, E_0..E_{e-1}; E monic of degree e
            rows, rhs = [], []
            for x, y in zip(ids, values):
                row = [pow(x, j, q) for j in range(d + e)]
                row += [(-y * pow(x, j, q)) % q for j in range(e)]
                rows.append(row)
                rhs.append(y * pow(x, e, q) % q)
            sol = _solve_linear(rows, rhs, q)
            if sol is None:
                continue
            qpoly = sol[: d + e]
            epoly = sol[d + e:] + [1]
            coeffs, rem = _poly_divmod(qpoly, epoly, q)
            if any(rem):
                continue
            coeffs = (coeffs + [0] * d)[:d]
            errors = sum(self.evaluate(coeffs, x) != y for x, y in zip(ids, values))
            if errors <= t:
                return coeffs
        raise DecodeError(f"no codeword within distance {t}")


def _solve_linear(rows: list[list[int]], rhs: list[int], q: int):
    """One solution of rows . x = rhs over F_q, or None if inconsistent."""
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if aug[i][c] % q), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        s = pow(aug[r][c], q - 2, q)
        aug[r] = [v * s % q for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(a - f * b) % q for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(aug[i][ncols] % q for i in range(r, m)):
        return None
    x = [0] * ncols
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncols]
    return x


def _poly_divmod(num: list[int], den: list[int], q: int):
    """Divide low-to-high coefficient lists; den must have a nonzero top."""
    num = list(num)
    while len(den) > 1 and den[-1] % q == 0:
        den = den[:-1]
    inv_lead = pow(den[-1], q - 2, q)
    if len(num) < len(den):
        return [0], num
    quot = [0] * (len(num) - len(den) + 1)
    for i in range(len(quot) - 1, -1, -1):
        c = num[i + len(den) - 1] * inv_lead % q
        quot[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] = (num[i + j] - c * dj) % q
    return quot, num[: len(den) - 1]


# -- checked element type -----------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise FieldError(f"{self.value} is not a canonical residue mod {self.field.q}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"mixed fields: F_{self.field.q} and F_{other.field.q}")
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(v % self.field.q, self.field)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.value)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.value * self.field.inv(o))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.q})"


def _check_same(a: FieldElement, b: FieldElement) -> None:
    if a.field != b.field:
        raise FieldError(f"mixed fields: F_{a.field.q} and F_{b.field.q}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def power(a: FieldElement, e: int) -> FieldElement:
    return a ** e


def encoding_vector(node_id: int, d: int, field: PrimeField) -> tuple[FieldElement, ...]:
    return tuple(field(v) for v in field.encoding_vector(node_id, d))


def solve_vandermonde(ids: Sequence[int], values: Sequence[FieldElement]) -> list[FieldElement]:
    field = _common_field(values)
    raw = field.solve_vandermonde(ids, [v.value for v in values])
    return [field(v) for v in raw]


def decode_with_errors(ids: Sequence[int], values: Sequence[FieldElement],
                       d: int, t: int) -> list[FieldElement]:
    field = _common_field(values)
    raw = field.decode_with_errors(ids, [v.value for v in values], d, t)
    return [field(v) for v in raw]


def _common_field(values: Sequence[FieldElement]) -> PrimeField:
    if not values:
        raise FieldError("no values")
    field = values[0].field
    for v in values[1:]:
        if v.field != field:
            raise FieldError("mixed fields in value list")
    return field
