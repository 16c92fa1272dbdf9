"""Graph families and figure fixtures.

Every generator is deterministic given its arguments (and seed), and
records the ordering it was built along as ``Network.witness``.
"""

from __future__ import annotations

import random
from typing import Sequence

from .graph import DEALER, GraphError, Network, check_connected_dealer, check_propagating_dealer

TOY_EDGES = [(DEALER, 1), (DEALER, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5),
             (4, 5), (4, 6), (5, 6)]

FIG9_EDGES = [(DEALER, 1), (DEALER, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (3, 6),
              (4, 5), (4, 6), (5, 7), (5, 8), (6, 7), (7, 9), (7, 10), (8, 9), (8, 10)]


def fixtures() -> dict[str, Network]:
    """The six-node toy network and the ten-node bottleneck network."""
    return {
        "toy": Network.from_edges(6, TOY_EDGES, witness=range(1, 7), label="toy"),
        "fig9": Network.from_edges(10, FIG9_EDGES, label="fig9"),
    }


def gen_star(n: int) -> Network:
    return Network.from_edges(n, [(DEALER, i) for i in range(1, n + 1)],
                              witness=range(1, n + 1), label="star")


def gen_cycle(n: int) -> Network:
    """Dealer on a ring: two disjoint paths to everyone, yet no 2-propagation."""
    if n < 3:
        raise GraphError("cycle needs at least 3 participants")
    edges = [(DEALER, 1), (DEALER, n)] + [(i, i + 1) for i in range(1, n)]
    return Network.from_edges(n, edges, label="cycle")


def gen_layered(layers: Sequence[int], m: int) -> Network:
    """Consecutive layers fully joined; the dealer feeds the first layer."""
    if not layers:
        raise GraphError("need at least one layer")
    if any(size < m for size in layers):
        raise GraphError(f"every layer needs at least m = {m} nodes")
    ids, start = [], 1
    for size in layers:
        ids.append(list(range(start, start + size)))
        start += size
    edges = [(DEALER, v) for v in ids[0]]
    for lo, hi in zip(ids, ids[1:]):
        edges += [(u, v) for u in lo for v in hi]
    return Network.from_edges(start - 1, edges, witness=range(1, start), label="layered")


def gen_backbone(backbone: Network, outer: int, m: int, seed: int = 0) -> Network:
    """Attach ``outer`` new nodes, each to m random backbone nodes."""
    if backbone.n < m:
        raise GraphError("backbone smaller than m")
    rng = random.Random(seed)
    nb = backbone.n
    edges = backbone.edges()
    for i in range(nb + 1, nb + outer + 1):
        for u in sorted(rng.sample(range(1, nb + 1), m)):
            edges.append((u, i))
    ok, order = check_propagating_dealer(backbone, m)
    base = list(backbone.witness) or (order if ok else [])
    witness = base + list(range(nb + 1, nb + outer + 1)) if base else ()
    return Network.from_edges(nb + outer, edges, backbone.directed, witness, "backbone")


def gen_geometric_1d(positions: Sequence[float], radius: float, m: int | None = None,
                     dealer_position: float = 0.0) -> Network:
    """Nodes on a line, joined when strictly closer than ``radius``.

    Participant i sits at ``positions[i - 1]``.  The witness lists nodes by
    ascending distance from the dealer.  When ``m`` is given the generator
    asserts that m-connectivity to the dealer implies m-propagation.
    """
    pts = [dealer_position] + list(positions)
    n = len(positions)
    edges = [(u, v) for u in range(n + 1) for v in range(u + 1, n + 1)
             if abs(pts[u] - pts[v]) < radius]
    witness = sorted(range(1, n + 1), key=lambda i: (abs(pts[i] - dealer_position), i))
    net = Network.from_edges(n, edges, witness=witness, label="geometric_1d")
    if m is not None and check_connected_dealer(net, m) and not check_propagating_dealer(net, m)[0]:
        raise AssertionError("1-D geometric network is m-connected but not m-propagating")
    return net


def _predecessor_graph(n: int, d: int, seed: int, directed: bool, window: int | None,
                       label: str) -> Network:
    if n < 1 or d < 1:
        raise GraphError("need n >= 1 and d >= 1")
    rng = random.Random(seed)
    edges = [(DEALER, i) for i in range(1, min(d, n) + 1)]
    for i in range(d + 1, n + 1):
        lo = 1 if window is None else max(i - window, 1)
        for u in sorted(rng.sample(range(lo, i), d)):
            edges.append((u, i))
    return Network.from_edges(n, edges, directed, range(1, n + 1), label)


def gen_random_propagating(n: int, d: int, seed: int = 0, directed: bool = True) -> Network:
    """Dealer feeds 1..d; node i > d hears from a random d-subset of 1..i-1."""
    return _predecessor_graph(n, d, seed, directed, None, "random_propagating")


def gen_window(n: int, d: int, a: int, seed: int = 0, directed: bool = True) -> Network:
    """Like ``gen_random_propagating`` with predecessors from the last d + a ids.

    The dealer never belongs to the window; it feeds exactly 1..d.
    """
    if a < 0:
        raise GraphError("window slack a must be non-negative")
    return _predecessor_graph(n, d, seed, directed, d + a, "window")


def gen_regular_fringe(n: int, d: int, hub: int, seed: int = 0) -> Network:
    """Undirected: dealer feeds 1..hub, every other node joins d hub nodes.

    Every non-neighbour of the dealer then has degree exactly d.
    """
    if hub < d:
        raise GraphError("hub must have at least d nodes")
    if n < hub:
        raise GraphError("hub larger than n")
    rng = random.Random(seed)
    edges = [(DEALER, i) for i in range(1, hub + 1)]
    for i in range(hub + 1, n + 1):
        for u in sorted(rng.sample(range(1, hub + 1), d)):
            edges.append((u, i))
    return Network.from_edges(n, edges, witness=range(1, n + 1), label="regular_fringe")


FAMILIES = ("toy", "fig9", "star", "cycle", "layered", "random", "window", "fringe",
            "backbone", "geometric")
