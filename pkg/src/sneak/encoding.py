"""Master matrix construction, node data, shares and secret recovery.

The d x d symmetric master matrix has three column blocks of widths
``a = k - ell``, ``b = ell`` and ``c = d - k``::

    [ S_A   R_a^T  S_B^T ]
    [ R_a   R_b    R_c^T ]
    [ S_B   R_c    0     ]

With the default ``ell = k - 1`` the secret-bearing ``S_A`` is a scalar.
A node's data is its row projection ``psi^T M``; its share is the part of
that vector lying in the first and last column blocks.

Field values are canonical residues.  They may equally be numpy integer
arrays, in which case every operation runs elementwise over a batch of
instances (the privacy oracle relies on this).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .field import PrimeField, smallest_prime_above


class EncodingError(ValueError):
    """Inconsistent parameters or share material."""


@dataclass(frozen=True)
class SharingParams:
    n: int
    k: int
    d: int
    field: PrimeField
    ell: int | None = None
    t_adv: int = 0
    degree_cap: bool = False
    max_participants: int | None = None

    def __post_init__(self):
        if self.ell is None:
            object.__setattr__(self, "ell", self.k - 1)
        if self.max_participants is None:
            object.__setattr__(self, "max_participants", self.n)
        n, k, d, ell = self.n, self.k, self.d, self.ell
        if not n >= k > ell >= 0:
            raise EncodingError(f"need n >= k > ell >= 0, got n={n} k={k} ell={ell}")
        if d < k:
            raise EncodingError(f"need d >= k, got d={d} k={k}")
        if self.t_adv < 0:
            raise EncodingError("adversary budget must be non-negative")
        if self.max_participants < n:
            raise EncodingError("max_participants below n")
        if self.field.q <= self.max_participants:
            raise EncodingError(f"need q > {self.max_participants}, got q={self.field.q}")
        if self.degree_cap and (ell != k - 1 or d == k):
            raise EncodingError("degree cap needs ell = k-1 and d > k")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def blocks(self) -> tuple[int, int, int]:
        return self.k - self.ell, self.ell, self.d - self.k

    @property
    def secret_length(self) -> int:
        a, _, c = self.blocks
        if self.degree_cap:
            return c
        return a * (a + 1) // 2 + a * c

    @property
    def randomness_count(self) -> int:
        a, b, c = self.blocks
        return b * a + b * (b + 1) // 2 + b * c + (1 if self.degree_cap else 0)

    @property
    def share_positions(self) -> tuple[int, ...]:
        a, _, _ = self.blocks
        head = () if self.degree_cap else tuple(range(a))
        return head + tuple(range(self.k, self.d))

    @property
    def quota(self) -> int:
        """Relay values a non-neighbour of the dealer waits for."""
        return self.d + 2 * self.t_adv

    def as_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "d": self.d, "q": self.q, "ell": self.ell,
                "t_adv": self.t_adv, "degree_cap": self.degree_cap,
                "max_participants": self.max_participants}

    def replace(self, **kw) -> "SharingParams":
        cur = dict(n=self.n, k=self.k, d=self.d, field=self.field, ell=self.ell,
                   t_adv=self.t_adv, degree_cap=self.degree_cap,
                   max_participants=self.max_participants)
        cur.update(kw)
        return SharingParams(**cur)


def make_params(n: int, k: int, d: int, q: int | None = None, ell: int | None = None,
                t_adv: int = 0, degree_cap: bool = False,
                max_participants: int | None = None) -> SharingParams:
    """Parameters with the default field: smallest prime above max_participants."""
    mp = n if max_participants is None else max_participants
    if q is None:
        q = smallest_prime_above(mp)
    return SharingParams(n, k, d, PrimeField(q), ell, t_adv, degree_cap, mp)


@dataclass(frozen=True)
class MasterMatrix:
    rows: tuple  # d tuples of d residues
    randomness_count: int = 0

    @property
    def d(self) -> int:
        return len(self.rows)

    def is_symmetric(self) -> bool:
        d = self.d
        return all(_same(self.rows[i][j], self.rows[j][i]) for i in range(d) for j in range(d))


@dataclass(frozen=True)
class NodeData:
    node_id: int
    vector: tuple


@dataclass(frozen=True)
class Share:
    node_id: int
    vector: tuple


def _same(x, y) -> bool:
    if isinstance(x, int) and isinstance(y, int):
        return x == y
    return bool(np.all(np.asarray(x) == np.asarray(y)))


def same_vector(u: Sequence, v: Sequence) -> bool:
    """Equality of residue vectors; entries may be ints or arrays."""
    return len(u) == len(v) and all(_same(x, y) for x, y in zip(u, v))


def random_secret(params: SharingParams, rng) -> tuple[int, ...]:
    return tuple(rng.randrange(params.q) for _ in range(params.secret_length))


def build_two_threshold_matrix(secret: Sequence, params: SharingParams, rng) -> MasterMatrix:
    """Build M for any ``0 <= ell < k``.

    Secret layout: ``S_B`` row-major, then the upper triangle of ``S_A``
    row-major (with ``ell = k - 1`` this is ``s_1..s_{d-k}`` then ``s_A``).
    Random draws: ``R_a`` row-major, ``R_b`` upper triangle row-major,
    ``R_c`` row-major, then the replacement ``s_A`` under the degree cap.
    """
    if len(secret) != params.secret_length:
        raise EncodingError(f"secret length {len(secret)} != {params.secret_length}")
    q = params.q
    a, b, c = params.blocks
    d = params.d
    m = [[0] * d for _ in range(d)]
    it = iter(secret)
    for i in range(c):
        for j in range(a):
            m[a + b + i][j] = m[j][a + b + i] = next(it) % q
    if not params.degree_cap:
        for i in range(a):
            for j in range(i, a):
                m[i][j] = m[j][i] = next(it) % q
    draws = 0
    for i in range(b):
        for j in range(a):
            m[a + i][j] = m[j][a + i] = rng.randrange(q)
            draws += 1
    for i in range(b):
        for j in range(i, b):
            m[a + i][a + j] = m[a + j][a + i] = rng.randrange(q)
            draws += 1
    for i in range(c):
        for j in range(b):
            m[a + b + i][a + j] = m[a + j][a + b + i] = rng.randrange(q)
            draws += 1
    if params.degree_cap:
        m[0][0] = rng.randrange(q)
        draws += 1
    assert draws == params.randomness_count
    return MasterMatrix(tuple(tuple(r) for r in m), draws)


def build_master_matrix(secret: Sequence, params: SharingParams, rng) -> MasterMatrix:
    if params.ell != params.k - 1:
        raise EncodingError("standard matrix needs ell = k-1; use build_two_threshold_matrix")
    return build_two_threshold_matrix(secret, params, rng)


def node_data(M: MasterMatrix, node_id: int, field: PrimeField) -> NodeData:
    psi = field.encoding_vector(node_id, M.d)
    q = field.q
    vec = []
    for j in range(M.d):
        acc = 0
        for r in range(M.d):
            acc = (acc + psi[r] * M.rows[r][j]) % q
        vec.append(acc)
    return NodeData(node_id, tuple(vec))


def relay_value(data: NodeData, dest_id: int, field: PrimeField):
    return field.dot(data.vector, field.encoding_vector(dest_id, len(data.vector)))


def recover_node_data(received: Sequence[tuple[int, object]], params: SharingParams,
                      node_id: int = 0) -> NodeData:
    """Solve for psi_node^T M from d relay values ``(sender_id, value)``."""
    if len(received) != params.d:
        raise EncodingError(f"need exactly {params.d} relay values, got {len(received)}")
    senders = [s for s, _ in received]
    if len(set(senders)) != len(senders):
        raise EncodingError("duplicate senders")
    vec = params.field.solve_vandermonde(senders, [v for _, v in received])
    return NodeData(node_id, tuple(vec))


def recover_node_data_with_errors(received: Sequence[tuple[int, int]], params: SharingParams,
                                  node_id: int = 0) -> NodeData:
    """Reed-Solomon decode from d + 2t relay values, at most t of them wrong."""
    t = params.t_adv
    if len(received) < params.d + 2 * t:
        raise EncodingError(f"need {params.d + 2 * t} relay values, got {len(received)}")
    senders = [s for s, _ in received]
    if len(set(senders)) != len(senders):
        raise EncodingError("duplicate senders")
    vec = params.field.decode_with_errors(senders, [v for _, v in received], params.d, t)
    return NodeData(node_id, tuple(vec))


def extract_share(data: NodeData, params: SharingParams) -> Share:
    if len(data.vector) != params.d:
        raise EncodingError("node data length differs from d")
    return Share(data.node_id, tuple(data.vector[p] for p in params.share_positions))


def recover_secret(shares: Sequence[Share], params: SharingParams) -> tuple:
    """Two-stage decode from exactly k shares: first S_B, then S_A."""
    field = params.field
    q = params.q
    k = params.k
    a, _, c = params.blocks
    if len(shares) != k:
        raise EncodingError(f"need exactly {k} shares, got {len(shares)}")
    ids = [s.node_id for s in shares]
    if len(set(ids)) != k:
        raise EncodingError("duplicate share ids")
    head = 0 if params.degree_cap else a
    for s in shares:
        if len(s.vector) != head + c:
            raise EncodingError("share length mismatch")

    def solve(values):
        return field.solve_vandermonde(ids, values)

    # stage 1: last column block gives [S_B^T; R_c^T] column by column
    s_b = [[0] * a for _ in range(c)]
    for j in range(c):
        col = solve([s.vector[head + j] for s in shares])
        for i in range(a):
            s_b[j][i] = col[i]
    out = [s_b[j][i] for j in range(c) for i in range(a)]
    if params.degree_cap:
        return tuple(out)
    # stage 2: strip the S_B contribution from the first block, solve for S_A
    psis = [field.encoding_vector(x, params.d) for x in ids]
    s_a = [[0] * a for _ in range(a)]
    for j in range(a):
        vals = []
        for s, psi in zip(shares, psis):
            v = s.vector[j]
            for r in range(c):
                v = (v - psi[k + r] * s_b[r][j]) % q
            vals.append(v)
        col = solve(vals)
        for i in range(a):
            s_a[i][j] = col[i]
    out += [s_a[i][j] for i in range(a) for j in range(i, a)]
    return tuple(out)


def pairwise_claims(datas: Sequence[NodeData], field: PrimeField) -> dict:
    """Each node's claim of psi_i^T M psi_j for every other node j."""
    return {(x.node_id, y.node_id): relay_value(x, y.node_id, field)
            for x in datas for y in datas if x.node_id != y.node_id}


def audit_consistency(claims: Mapping[tuple[int, int], object]) -> list[tuple[int, int]]:
    """Pairs (i, j), i < j, whose claimed common values disagree."""
    bad = []
    for (i, j), v in sorted(claims.items()):
        if i < j and (j, i) in claims and not _same(v, claims[(j, i)]):
            bad.append((i, j))
    return bad
