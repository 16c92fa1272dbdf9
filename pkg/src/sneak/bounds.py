"""Closed-form communication and randomness bounds, in exact units.

One unit is the size of the secret.  Every quantity is a ``Fraction`` or
the ``INF`` sentinel; there is no floating point anywhere in this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .baseline import plan_secure_relay
from .encoding import SharingParams
from .graph import DEALER, Network, max_disjoint_paths
from .numeric import INF, to_json


def node_download_lower(net: Network, params: SharingParams, node: int):
    """Least download for ``node``: 1 next to the dealer, deg/(deg-k+1) otherwise."""
    if net.is_dealer_neighbor(node):
        return Fraction(1)
    deg = net.in_degree(node)
    if deg < params.k:
        return INF
    return Fraction(deg, deg - params.k + 1)


def graph_communication_lower(net: Network, params: SharingParams):
    """(summed per-node bound, the trivial bound n)."""
    total = Fraction(0)
    for v in net.participants:
        total = total + node_download_lower(net, params, v)
    return total, Fraction(net.n)


def directed_regular_lower(params: SharingParams) -> Fraction:
    """Bound for directed graphs whose non-neighbours all have in-degree d."""
    n, k, d = params.n, params.k, params.d
    return Fraction(n * d, d - k + 1) - Fraction((k - 1) * d, d - k + 1)


def sota_closed_form(net: Network, params: SharingParams):
    """|N(D)| plus, per non-neighbour, min over w >= k of w/(w-k+1) times l_w."""
    total = Fraction(len(net.dealer_neighbors()))
    for v in net.participants:
        if not net.is_dealer_neighbor(v):
            total = total + plan_secure_relay(net, params, v).cost_units
    return total


def sota_quadratic_lower(n: int, d: int) -> Fraction:
    """n(n+1)/(4d), the baseline's floor on sliding-window graphs."""
    return Fraction(n * (n + 1), 4 * d)


def _ilog(n: int, b: int) -> int:
    m, p = 0, 1
    while p * b <= n:
        p *= b
        m += 1
    return m


def sota_superlinear_lower(n: int, b_max: int) -> Fraction:
    """n (log n / log b - 2) / b^2, floored at 0.

    The logarithm ratio is replaced by floor(log_b n), which is exact and
    coincides with the ratio whenever n is a power of b; otherwise the
    result is a slightly weaker, still valid, bound.
    """
    if b_max < 2:
        raise ValueError("maximum out-degree must be at least 2")
    val = Fraction(n * (_ilog(n, b_max) - 2), b_max * b_max)
    return max(val, Fraction(0))


def max_out_degree(net: Network) -> int:
    return max(len(net.neighbors(v)) for v in range(net.n + 1))


@dataclass(frozen=True)
class RandomnessBounds:
    any_lower: Fraction
    sneak_value: Fraction          # closed-form expression
    sneak_draw_units: Fraction     # draws / secret length, as measured
    sota_lower: object
    sota_degree_lower: object

    @property
    def sneak_mismatch(self) -> bool:
        return self.sneak_value != self.sneak_draw_units


def randomness_bounds(net: Network, params: SharingParams) -> RandomnessBounds:
    k, d = params.k, params.d
    km1 = k - 1
    sota = Fraction(km1)
    for v in net.participants:
        if net.is_dealer_neighbor(v):
            continue
        w = max_disjoint_paths(net, v)
        sota = sota + (INF if w < k else Fraction(km1, w - k + 1))
    nd = len(net.dealer_neighbors())
    outside = net.n - nd
    if outside == 0:
        degree = Fraction(0)
    elif nd <= km1:
        degree = INF
    else:
        degree = Fraction(outside * km1, nd - km1)
    return RandomnessBounds(
        any_lower=Fraction(km1),
        sneak_value=Fraction(km1 * (2 * d - k), 2 * (d - k + 1)),
        sneak_draw_units=Fraction(params.randomness_count, params.secret_length),
        sota_lower=sota,
        sota_degree_lower=degree,
    )


@dataclass
class BoundsReport:
    per_node_lower: dict
    graph_lower_sum: object
    graph_lower_n: Fraction
    directed_regular_lower: Fraction
    sota_closed_form: object
    sota_quadratic_lower: Fraction
    sota_superlinear_lower: Fraction
    randomness: RandomnessBounds
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        r = self.randomness
        return {
            "per_node_lower": {str(v): to_json(u) for v, u in sorted(self.per_node_lower.items())},
            "graph_lower_sum": to_json(self.graph_lower_sum),
            "graph_lower_n": to_json(self.graph_lower_n),
            "directed_regular_lower": to_json(self.directed_regular_lower),
            "sota_closed_form": to_json(self.sota_closed_form),
            "sota_quadratic_lower": to_json(self.sota_quadratic_lower),
            "sota_superlinear_lower": to_json(self.sota_superlinear_lower),
            "randomness_lower_any": to_json(r.any_lower),
            "randomness_sneak": to_json(r.sneak_value),
            "randomness_sneak_draw_units": to_json(r.sneak_draw_units),
            "randomness_sneak_mismatch": r.sneak_mismatch,
            "randomness_sota_lower": to_json(r.sota_lower),
            "randomness_sota_degree_lower": to_json(r.sota_degree_lower),
            "extras": {k: to_json(v) for k, v in sorted(self.extras.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def bounds_report(net: Network, params: SharingParams) -> BoundsReport:
    per_node = {v: node_download_lower(net, params, v) for v in net.participants}
    lower_sum, lower_n = graph_communication_lower(net, params)
    b = max_out_degree(net)
    return BoundsReport(
        per_node_lower=per_node,
        graph_lower_sum=lower_sum,
        graph_lower_n=lower_n,
        directed_regular_lower=directed_regular_lower(params),
        sota_closed_form=sota_closed_form(net, params),
        sota_quadratic_lower=sota_quadratic_lower(net.n, params.d),
        sota_superlinear_lower=sota_superlinear_lower(net.n, max(b, 2)),
        randomness=randomness_bounds(net, params),
        extras={"dealer_degree": len(net.neighbors(DEALER)), "max_out_degree": b,
                "sneak_closed_form_units": Fraction(net.n * params.d, params.d - params.k + 1)},
    )
