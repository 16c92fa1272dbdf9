"""Exhaustive small-field checks of secrecy and recovery.

Rather than re-implementing the protocols, the oracle runs the real
simulator with every random draw replaced by a numpy column that lists all
``q^R`` assignments of the R draws at once.  One run per secret value then
yields, for each colluding subset, the full table of views.  Secrecy holds
iff the multiset of views is the same for every secret: each row of the
(view x secret) count matrix is constant.  Counting is exact throughout.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .baseline import run_sota
from .encoding import SharingParams, Share, recover_secret
from .graph import Network
from .protocol import run_sneak, run_with_fallback

DEFAULT_MAX_ENUM = 2_000_000


class EnumerationBudgetExceeded(ValueError):
    """q^(secret length + draws) is larger than the configured budget."""


class _CountingRNG:
    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)
        self.count = 0

    def randrange(self, q):
        self.count += 1
        return self.rng.randrange(q)


class _BatchRNG:
    """Hands out enumeration columns in draw order."""

    def __init__(self, columns):
        self.columns = columns
        self.used = 0

    def randrange(self, q):
        col = self.columns[self.used]
        self.used += 1
        return col


@dataclass
class Verdict:
    ok: bool
    check: str
    instances: int
    subsets_checked: int = 0
    counterexample: dict | None = None
    digest: str = ""
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def to_dict(self) -> dict:
        out = {"check": self.check, "verdict": self.verdict, "instances": self.instances,
               "subsets_checked": self.subsets_checked, "view_histogram_digest": self.digest,
               "counterexample": self.counterexample}
        out.update(self.details)
        return out


def make_runner(algorithm: str = "sneak", fallback: str | None = None) -> Callable:
    """Protocol entry point with the uniform (net, params, secret, rng) signature."""
    if algorithm == "sota":
        return run_sota
    if algorithm != "sneak":
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if fallback in (None, "none"):
        return run_sneak
    return lambda net, params, secret, rng: run_with_fallback(net, params, secret, rng, fallback)


def _instances(net: Network, params: SharingParams, runner, secret_len: int, max_enum: int):
    """Yield (secret, report, batch size) for every secret value."""
    q = params.q
    probe = _CountingRNG()
    runner(net, params, (0,) * secret_len, probe)
    draws = probe.count
    total = q ** (secret_len + draws)
    if total > max_enum:
        raise EnumerationBudgetExceeded(
            f"q^(secret+draws) = {q}^{secret_len + draws} = {total} exceeds {max_enum}")
    size = q ** draws
    idx = np.arange(size, dtype=np.int64)
    columns = [(idx // q ** j) % q for j in range(draws)]
    for secret in itertools.product(range(q), repeat=secret_len):
        rng = _BatchRNG(columns)
        rep = runner(net, params, secret, rng)
        if rng.used != draws:
            raise RuntimeError("draw count depends on the secret")
        yield secret, rep, size


def _node_views(rep, participants, size: int, q: int) -> dict:
    """Every value each node receives, sends, draws or computes, as a matrix."""
    rows = {v: [] for v in participants}
    for m in rep.transcript:
        for x in m.payload:
            if m.dst in rows:
                rows[m.dst].append(x)
            if m.src in rows:
                rows[m.src].append(x)
    for owner, vals in rep.draws_by_owner.items():
        if owner in rows:
            rows[owner].extend(vals)
    for v, nd in rep.node_data.items():
        rows[v].extend(nd.vector)
    for v, s in rep.shares.items():
        rows[v].extend(s)
    dtype = np.uint8 if q < 256 else np.uint32
    out = {}
    for v, r in rows.items():
        if r:
            out[v] = np.stack([np.broadcast_to(np.asarray(x, dtype=np.int64), (size,))
                               for x in r]).astype(dtype)
        else:
            out[v] = np.zeros((0, size), dtype=dtype)
    return out


def _histogram(mat: np.ndarray):
    """Exact multiset of the columns of ``mat``: (sorted keys, counts)."""
    cols = np.ascontiguousarray(mat.T)
    if cols.shape[1] == 0:
        return np.zeros(1, dtype="V1"), np.array([cols.shape[0]])
    keys = cols.view(np.dtype((np.void, cols.dtype.itemsize * cols.shape[1]))).ravel()
    return np.unique(keys, return_counts=True)


def _tv_distance(h0, h1, size: int) -> Fraction:
    k0, c0 = h0
    k1, c1 = h1
    a = dict(zip(k0.tolist(), c0.tolist()))
    b = dict(zip(k1.tolist(), c1.tolist()))
    diff = sum(abs(a.get(x, 0) - b.get(x, 0)) for x in set(a) | set(b))
    return Fraction(diff, 2 * size)


def _digest(h) -> str:
    keys, counts = h
    m = hashlib.sha256()
    m.update(keys.tobytes())
    m.update(counts.astype(np.int64).tobytes())
    return m.hexdigest()[:16]


def verify_collusion_resistance(net: Network, params: SharingParams, colluder_budget: int,
                                algorithm: str = "sneak", fallback: str | None = None,
                                secret_length: int | None = None,
                                max_enum: int = DEFAULT_MAX_ENUM) -> Verdict:
    """PASS iff every colluding set of ``colluder_budget`` nodes sees a view
    distribution independent of the secret.

    Only sets of exactly ``min(budget, n)`` nodes are enumerated: a smaller
    set's view is a marginal of a larger one's, so uniformity carries down.
    The worst counterexample maximises the total-variation distance
    between the view distributions of two secrets.
    """
    runner = make_runner(algorithm, fallback)
    L = secret_length or (params.secret_length if algorithm == "sneak" else 1)
    size_s = min(colluder_budget, net.n)
    subsets = list(itertools.combinations(net.participants, size_s)) if size_s > 0 else []
    reference = {}
    worst = None
    count = 0
    for secret, rep, size in _instances(net, params, runner, L, max_enum):
        count += 1
        views = _node_views(rep, net.participants, size, params.q)
        for S in subsets:
            h = _histogram(np.concatenate([views[v] for v in S]))
            if S not in reference:
                reference[S] = (secret, h)
                continue
            s0, h0 = reference[S]
            if len(h[0]) == len(h0[0]) and np.array_equal(h[0], h0[0]) \
                    and np.array_equal(h[1], h0[1]):
                continue
            tv = _tv_distance(h0, h, size)
            if worst is None or tv > worst[0]:
                worst = (tv, S, s0, secret, _digest(h))
    summary = hashlib.sha256()
    for S in subsets:
        summary.update(repr(S).encode())
        summary.update(_digest(reference[S][1]).encode())
    cex = None
    if worst is not None:
        tv, S, s0, s1, dig = worst
        cex = {"subset": list(S), "secrets": [list(s0), list(s1)],
               "total_variation": str(tv), "view_histogram_digest": dig}
    return Verdict(ok=worst is None, check="collusion_resistance", instances=count,
                   subsets_checked=len(subsets), counterexample=cex,
                   digest=summary.hexdigest()[:16],
                   details={"budget": colluder_budget, "algorithm": algorithm,
                            "fallback": fallback or "none"})


def verify_baseline_path_secrecy(net: Network, params: SharingParams,
                                 colluder_budget: int | None = None,
                                 max_enum: int = DEFAULT_MAX_ENUM) -> Verdict:
    budget = params.k - 1 if colluder_budget is None else colluder_budget
    v = verify_collusion_resistance(net, params, budget, algorithm="sota", max_enum=max_enum)
    v.check = "baseline_path_secrecy"
    return v


def _recover(algorithm: str, params: SharingParams, ids, shares):
    if algorithm == "sneak":
        return recover_secret([Share(i, shares[i]) for i in ids], params)
    f = params.field
    width = len(shares[ids[0]])
    return tuple(f.solve_vandermonde(list(ids), [shares[i][j] for i in ids])[0]
                 for j in range(width))


def verify_recovery(net: Network, params: SharingParams, algorithm: str = "sneak",
                    fallback: str | None = None, secret_length: int | None = None,
                    max_enum: int = DEFAULT_MAX_ENUM, samples: int = 50,
                    seed: int = 0) -> Verdict:
    """Every k-subset of delivered shares reconstructs the secret.

    Exhaustive over all (secret, randomness) pairs when they fit within
    ``max_enum``; otherwise ``samples`` seeded random instances.
    """
    runner = make_runner(algorithm, fallback)
    L = secret_length or (params.secret_length if algorithm == "sneak" else 1)
    k = params.k
    bad = None
    count = subsets = 0
    exhaustive = True
    delivered_sizes = set()
    try:
        stream = list(_instances(net, params, runner, L, max_enum))
    except EnumerationBudgetExceeded:
        exhaustive = False
        rng = random.Random(seed)
        stream = []
        for _ in range(samples):
            secret = tuple(rng.randrange(params.q) for _ in range(L))
            stream.append((secret, runner(net, params, secret, rng), 1))
    for secret, rep, size in stream:
        count += 1
        delivered = sorted(rep.delivered)
        delivered_sizes.add(len(delivered))
        for ids in itertools.combinations(delivered, k):
            subsets += 1
            got = _recover(algorithm, params, ids, rep.shares)
            ok = all(np.all(np.asarray(g) == s) for g, s in zip(got, secret))
            if not ok and bad is None:
                bad = {"subset": list(ids), "secret": list(secret)}
    return Verdict(ok=bad is None and subsets > 0, check="recovery", instances=count,
                   subsets_checked=subsets, counterexample=bad,
                   details={"exhaustive": exhaustive, "algorithm": algorithm,
                            "delivered_counts": sorted(delivered_sizes)})

