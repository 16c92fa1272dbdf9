"""Network topology, dealer-connectivity conditions and disjoint-path flows.

The dealer is vertex ``0`` (``DEALER``); participants are ``1..n``.  Undirected
networks are stored as two arcs per edge, so every query below is written
against out- and in-neighbourhoods only.

Disjoint paths use the usual node-split transform: every participant other
than the endpoints becomes an ``in -> out`` arc of capacity 1, and a
successive-shortest-path min-cost flow (Dijkstra with potentials, unit arc
costs) yields, for every w at once, a set of w internally disjoint paths of
minimum total length.
"""

from __future__ import annotations

import hashlib
import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .numeric import INF

DEALER = 0


class GraphError(ValueError):
    """Malformed network or graph file."""


def node_name(v: int) -> str:
    return "D" if v == DEALER else str(v)


@dataclass(frozen=True)
class Network:
    n: int
    directed: bool
    arcs: frozenset
    witness: tuple = field(default=(), compare=False)
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("network needs at least one participant")
        out = {v: set() for v in range(self.n + 1)}
        inc = {v: set() for v in range(self.n + 1)}
        for u, v in self.arcs:
            if u == v:
                raise GraphError(f"self-loop at {node_name(u)}")
            for x in (u, v):
                if not 0 <= x <= self.n:
                    raise GraphError(f"node id {x} out of range 1..{self.n}")
            out[u].add(v)
            inc[v].add(u)
        if not self.directed:
            for u, v in self.arcs:
                if (v, u) not in self.arcs:
                    raise GraphError("undirected network missing reverse arc")
        object.__setattr__(self, "_out", {v: frozenset(s) for v, s in out.items()})
        object.__setattr__(self, "_in", {v: frozenset(s) for v, s in inc.items()})

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], directed: bool = False,
                   witness: Iterable[int] = (), label: str = "") -> "Network":
        arcs = set()
        for u, v in edges:
            if (u, v) in arcs:
                raise GraphError(f"duplicate edge {node_name(u)}-{node_name(v)}")
            if not directed and (v, u) in arcs:
                raise GraphError(f"duplicate edge {node_name(u)}-{node_name(v)}")
            arcs.add((u, v))
            if not directed:
                arcs.add((v, u))
        return cls(n, directed, frozenset(arcs), tuple(witness), label)

    @property
    def participants(self) -> range:
        return range(1, self.n + 1)

    def _check(self, node: int) -> None:
        if not 0 <= node <= self.n:
            raise GraphError(f"unknown node {node}")

    def neighbors(self, node: int) -> frozenset:
        self._check(node)
        return self._out[node]

    def in_neighbors(self, node: int) -> frozenset:
        self._check(node)
        return self._in[node]

    def in_degree(self, node: int) -> int:
        """Number of participant in-neighbours (the dealer is not counted)."""
        return len(self._in[node] - {DEALER})

    def dealer_neighbors(self) -> frozenset:
        return self._out[DEALER]

    def is_dealer_neighbor(self, node: int) -> bool:
        return node in self._out[DEALER]

    def edges(self) -> list[tuple[int, int]]:
        """Sorted edge list; one entry per undirected edge."""
        if self.directed:
            return sorted(self.arcs)
        return sorted((u, v) for u, v in self.arcs if u < v)

    def digest(self) -> str:
        return hashlib.sha256(format_graph(self).encode()).hexdigest()[:16]


def neighbors(net: Network, node: int) -> frozenset:
    return net.neighbors(node)


# -- graph file format ----------------------------------------------------------

def parse_graph(text: str) -> tuple[Network, int]:
    """Parse ``n k_hint directed|undirected`` followed by ``u v`` lines.

    Returns the network and the k hint.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise GraphError("empty graph file")
    head = lines[0].split()
    if len(head) != 3 or head[2] not in ("directed", "undirected"):
        raise GraphError(f"bad header line: {lines[0]!r}")
    try:
        n, k_hint = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphError(f"bad header line: {lines[0]!r}") from exc
    directed = head[2] == "directed"

    def tok(s: str) -> int:
        if s == "D":
            return DEALER
        try:
            v = int(s)
        except ValueError as exc:
            raise GraphError(f"bad node token {s!r}") from exc
        if not 1 <= v <= n:
            raise GraphError(f"node id {v} out of range 1..{n}")
        return v

    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line: {line!r}")
        edges.append((tok(parts[0]), tok(parts[1])))
    return Network.from_edges(n, edges, directed), k_hint


def format_graph(net: Network, k_hint: int = 0) -> str:
    kind = "directed" if net.directed else "undirected"
    out = [f"{net.n} {k_hint} {kind}"]
    out += [f"{node_name(u)} {node_name(v)}" for u, v in net.edges()]
    return "\n".join(out) + "\n"


def read_graph(path) -> tuple[Network, int]:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(net: Network, path, k_hint: int = 0) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(net, k_hint))


# -- flows ----------------------------------------------------------------------

@dataclass(frozen=True)
class DisjointPathSet:
    target: int
    w: int
    paths: tuple  # tuple of vertex tuples, each from source to target
    total_length: object  # int, or INF when fewer than w paths exist

    @property
    def feasible(self) -> bool:
        return self.total_length is not INF

    @property
    def avg_length(self):
        from fractions import Fraction
        if not self.feasible:
            return INF
        return Fraction(self.total_length, self.w)


class _FlowGraph:
    """Residual graph for unit-capacity min-cost flow."""

    def __init__(self, size: int):
        self.adj = [[] for _ in range(size)]
        self.to, self.cap, self.cost = [], [], []

    def add(self, u: int, v: int, cap: int, cost: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v); self.cap.append(cap); self.cost.append(cost)
        self.adj[v].append(len(self.to))
        self.to.append(u); self.cap.append(0); self.cost.append(-cost)


def _relevant(net: Network, source: int, target: int, forbidden: frozenset) -> set:
    """Vertices on some source -> target walk avoiding ``forbidden``."""
    def reach(start, step):
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            if u != start and u in (source, target):
                continue
            for v in step(u):
                if v not in seen and v not in forbidden:
                    seen.add(v)
                    queue.append(v)
        return seen

    return reach(source, net.neighbors) & reach(target, net.in_neighbors)


def _split_graph(net: Network, source: int, target: int, forbidden: frozenset):
    # vertex v -> in = 2v, out = 2v + 1; source and target are unsplit
    keep = _relevant(net, source, target, forbidden)
    g = _FlowGraph(2 * (net.n + 1))
    for v in sorted(keep):
        cap = net.n + 1 if v in (source, target) else 1
        g.add(2 * v, 2 * v + 1, cap, 0)
    for u in sorted(keep):
        if u == target:
            continue
        for v in sorted(net.neighbors(u) & keep):
            if v != source:
                g.add(2 * u + 1, 2 * v, 1, 1)
    return g


def disjoint_path_profile(net: Network, target: int, max_w: int | None = None,
                          source: int = DEALER, forbidden: Iterable[int] = ()) -> list[DisjointPathSet]:
    """Min-total-length disjoint path sets for w = 1, 2, ... up to the maximum.

    Entry ``w - 1`` of the result is the optimal set of ``w`` internally
    vertex-disjoint ``source -> target`` paths.  Vertices in ``forbidden``
    may not be used.  Successive shortest augmenting paths give an optimal
    flow for every intermediate value, so a single run covers all w.
    """
    net._check(source)
    net._check(target)
    if source == target:
        raise GraphError("source equals target")
    forbidden = frozenset(forbidden) - {source, target}
    return list(_profile(net, target, max_w, source, forbidden))


@lru_cache(maxsize=8192)
def _profile(net: Network, target: int, max_w, source: int, forbidden: frozenset) -> tuple:
    g = _split_graph(net, source, target, forbidden)
    adj, to, cap, cost = g.adj, g.to, g.cap, g.cost
    s, t = 2 * source + 1, 2 * target
    size = len(adj)
    pot = [0] * size
    limit = net.n + 1 if max_w is None else max_w
    out = []
    total = 0
    unreached = float("inf")
    while len(out) < limit:
        dist = [unreached] * size
        prev = [-1] * size
        dist[s] = 0
        heap = [(0, s)]
        while heap:
            du, u = heapq.heappop(heap)
            if du > dist[u]:
                continue
            base = du + pot[u]
            for e in adj[u]:
                if cap[e] > 0:
                    v = to[e]
                    nd = base + cost[e] - pot[v]
                    if nd < dist[v]:
                        dist[v] = nd
                        prev[v] = e
                        heapq.heappush(heap, (nd, v))
        if dist[t] == unreached:
            break
        for v in range(size):
            if dist[v] != unreached:
                pot[v] += dist[v]
        v = t
        while v != s:
            e = prev[v]
            cap[e] -= 1
            cap[e ^ 1] += 1
            total += cost[e]
            v = to[e ^ 1]
        out.append(DisjointPathSet(target, len(out) + 1, _decompose(g, net, source, target), total))
    return tuple(out)


def _decompose(g: _FlowGraph, net: Network, source: int, target: int) -> tuple:
    # walk vertex-level successors carrying flow; network arcs run out (odd) -> in (even)
    succ: dict[int, list[int]] = {}
    for e in range(0, len(g.to), 2):
        a, b = g.to[e ^ 1], g.to[e]
        if a % 2 == 1 and b % 2 == 0 and g.cap[e ^ 1] > 0:
            succ.setdefault(a // 2, []).append(b // 2)
    paths = []
    for first in sorted(succ.get(source, [])):
        path = [source, first]
        while path[-1] != target:
            nxt = sorted(succ[path[-1]])
            path.append(nxt[0])
        paths.append(tuple(path))
    return tuple(sorted(paths, key=lambda p: (len(p), p)))


def max_disjoint_paths(net: Network, target: int, source: int = DEALER) -> int:
    """Maximum number of internally vertex-disjoint source -> target paths.

    A direct arc counts as one path (with no intermediate vertex).
    """
    return len(disjoint_path_profile(net, target, source=source))


def shortest_disjoint_paths(net: Network, target: int, w: int,
                            source: int = DEALER) -> DisjointPathSet:
    if w < 1:
        raise GraphError("w must be at least 1")
    prof = disjoint_path_profile(net, target, max_w=w, source=source)
    if len(prof) < w:
        return DisjointPathSet(target, w, (), INF)
    return prof[w - 1]


def bfs_distance(net: Network, source: int, target: int):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in sorted(net.neighbors(u)):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist.get(target, INF)


# -- dealer conditions ----------------------------------------------------------

def check_connected_dealer(net: Network, m: int) -> bool:
    if m < 1:
        raise GraphError("m must be at least 1")
    nd = net.dealer_neighbors()
    return all(v in nd or len(disjoint_path_profile(net, v, max_w=m)) >= m
               for v in net.participants)


def propagation_order(net: Network, m: int) -> tuple[list[int], frozenset]:
    """Flood from the dealer: returns (reach order, stalled set)."""
    if m < 1:
        raise GraphError("m must be at least 1")
    order = sorted(net.dealer_neighbors())
    reached = set(order)
    count = {v: 0 for v in net.participants}
    queue = deque(order)
    while queue:
        u = queue.popleft()
        for v in sorted(net.neighbors(u)):
            if v == DEALER or v in reached:
                continue
            count[v] += 1
            if count[v] >= m:
                reached.add(v)
                order.append(v)
                queue.append(v)
    stalled = frozenset(v for v in net.participants if v not in reached)
    return order, stalled


def check_propagating_dealer(net: Network, m: int):
    """(True, witness ordering) or (False, stalled node set)."""
    order, stalled = propagation_order(net, m)
    if stalled:
        return False, stalled
    return True, order
