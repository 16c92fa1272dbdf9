"""Reference scheme: Shamir shares pushed over vertex-disjoint paths.

Dealer neighbours receive their share directly.  Every other participant i
gets its share through ``w`` internally disjoint paths: the share is cut
into blocks of ``w - k + 1`` symbols, each block is ramp-encoded into ``w``
chunks (any ``k - 1`` chunks are uniform, all ``w`` recover the block), and
chunk j travels down path j.  The planner picks the ``w`` minimising
``w / (w - k + 1)`` times the average path length.

The same secure-transmission primitive is reused by the fallback
strategies of the protocol module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

from .encoding import SharingParams, same_vector
from .field import PrimeField
from .graph import DEALER, DisjointPathSet, Network, disjoint_path_profile
from .numeric import INF
from .report import Message, RunReport, download_counts


class InfeasibleTarget(ValueError):
    """Fewer than k vertex-disjoint paths reach the target."""


@dataclass(frozen=True)
class SecureRelayPlan:
    target: int
    k: int
    w: int | None
    paths: DisjointPathSet | None
    cost_units: object  # Fraction or INF

    @property
    def feasible(self) -> bool:
        return self.cost_units is not INF

    @property
    def block(self) -> int:
        """Symbols per ramp block, w - k + 1."""
        return self.w - self.k + 1

    @property
    def chunk_size_units(self):
        return Fraction(1, self.block) if self.feasible else INF


def plan_secure_relay(net: Network, params: SharingParams, target: int,
                      source: int = DEALER) -> SecureRelayPlan:
    """Cheapest w >= k for a secure transmission to ``target`` (ties: smaller w)."""
    if source == DEALER and net.is_dealer_neighbor(target):
        raise ValueError(f"node {target} is a dealer neighbour; it is served directly")
    k = params.k
    best = None
    for ps in disjoint_path_profile(net, target, source=source):
        if ps.w < k:
            continue
        cost = Fraction(ps.total_length, ps.w - k + 1)
        if best is None or cost < best.cost_units:
            best = SecureRelayPlan(target, k, ps.w, ps, cost)
    if best is None:
        return SecureRelayPlan(target, k, None, None, INF)
    return best


# -- ramp encoding ---------------------------------------------------------------

def ramp_encode(block: Sequence, w: int, k: int, field: PrimeField,
                draw: Callable[[], object]) -> list:
    """Chunks f(1..w) of f(x) = sum block[i] x^i + sum r_j x^(len(block)+j).

    ``k - 1`` random coefficients sit above the data, so any ``k - 1``
    evaluations at nonzero points are uniformly distributed.
    """
    if len(block) != w - k + 1:
        raise ValueError("block length must be w - k + 1")
    coeffs = list(block) + [draw() for _ in range(k - 1)]
    return [field.evaluate(coeffs, j) for j in range(1, w + 1)]


def ramp_decode(chunks: Sequence, w: int, k: int, field: PrimeField) -> list:
    coeffs = field.solve_vandermonde(list(range(1, w + 1)), list(chunks))
    return coeffs[: w - k + 1]


@dataclass
class Transmission:
    messages: list
    payload: tuple  # what the target reconstructs
    draws: int
    arrival_tick: int


def secure_transmit(plan: SecureRelayPlan, payload: Sequence, params: SharingParams,
                    draw: Callable[[], object], tick: int = 0,
                    kind: str = "fallback_chunk") -> Transmission:
    """Send ``payload`` to ``plan.target`` over the plan's disjoint paths.

    The payload is zero-padded to a multiple of the block size.  Chunk j of
    every block rides path j; each hop is one message carrying one symbol
    per block.
    """
    if not plan.feasible:
        raise InfeasibleTarget(f"no {params.k} disjoint paths to node {plan.target}")
    field, k, w, a = params.field, params.k, plan.w, plan.block
    padded = list(payload) + [0] * (-len(payload) % a)
    nblocks = len(padded) // a
    per_path = [[] for _ in range(w)]
    draws = 0
    for b in range(nblocks):
        chunks = ramp_encode(padded[b * a:(b + 1) * a], w, k, field, draw)
        draws += k - 1
        for j in range(w):
            per_path[j].append(chunks[j])
    messages = []
    arrival = tick
    for path, load in zip(plan.paths.paths, per_path):
        for h in range(len(path) - 1):
            messages.append(Message(tick + h, path[h], path[h + 1], tuple(load), kind))
        arrival = max(arrival, tick + len(path) - 1)
    out = []
    for b in range(nblocks):
        out += ramp_decode([per_path[j][b] for j in range(w)], w, k, field)
    return Transmission(messages, tuple(out[: len(payload)]), draws, arrival)


# -- full baseline run -------------------------------------------------------------

def sota_block_length(net: Network, params: SharingParams) -> int:
    """Secret length making every planned block integral (lcm of w - k + 1)."""
    out = 1
    for v in net.participants:
        if not net.is_dealer_neighbor(v):
            plan = plan_secure_relay(net, params, v)
            if plan.feasible:
                out = lcm(out, plan.block)
    return out


def shamir_shares(secret: Sequence, ids: Sequence[int], k: int, field: PrimeField,
                  draw: Callable[[], object]) -> dict:
    """Per-symbol Shamir sharing; node i's share has one entry per symbol."""
    polys = [[s] + [draw() for _ in range(k - 1)] for s in secret]
    return {i: tuple(field.evaluate(p, i) for p in polys) for i in ids}


def run_sota(net: Network, params: SharingParams, secret: Sequence, rng) -> RunReport:
    if not secret:
        raise ValueError("empty secret")
    field, k = params.field, params.k
    draws_by_owner = {DEALER: []}

    def draw():
        x = rng.randrange(field.q)
        draws_by_owner[DEALER].append(x)
        return x

    shares = shamir_shares(secret, list(net.participants), k, field, draw)
    messages = []
    plans = {}
    for v in sorted(net.dealer_neighbors()):
        messages.append(Message(0, DEALER, v, shares[v], "dealer_data"))
    received = {v: shares[v] for v in net.dealer_neighbors()}
    log = []
    for v in net.participants:
        if net.is_dealer_neighbor(v):
            continue
        plan = plan_secure_relay(net, params, v)
        if not plan.feasible:
            raise InfeasibleTarget(
                f"node {v} has fewer than {k} vertex-disjoint paths from the dealer")
        plans[v] = plan
        tx = secure_transmit(plan, shares[v], params, draw, tick=0)
        messages += tx.messages
        received[v] = tx.payload
        log.append({"target": v, "w": plan.w, "total_length": plan.paths.total_length,
                    "elements": sum(m.size for m in tx.messages)})
    delivered = frozenset(v for v in net.participants
                          if v in received and same_vector(received[v], shares[v]))
    ideal = len(net.dealer_neighbors()) + sum((p.cost_units for p in plans.values()), Fraction(0))
    return RunReport(
        algorithm="sota",
        params=params.as_dict(),
        secret_length=len(secret),
        total_field_elements=sum(m.size for m in messages),
        per_node_elements=download_counts(messages, net.participants),
        randomness_draws=len(draws_by_owner[DEALER]),
        delivered=delivered,
        stalled=frozenset(net.participants) - delivered,
        extras={"ideal_units": ideal, "plans": log},
        transcript=messages,
        shares=received,
        draws_by_owner=draws_by_owner,
    )

