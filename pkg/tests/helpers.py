"""Small shared test utilities."""

from sneak.graph import DEALER


class FixedRNG:
    """Returns a scripted sequence of draws, then fails loudly."""

    def __init__(self, values):
        self.values = list(values)
        self.used = 0

    def randrange(self, q):
        v = self.values[self.used]
        self.used += 1
        assert 0 <= v < q
        return v


class CountingRNG:
    def __init__(self, rng):
        self.rng = rng
        self.count = 0

    def randrange(self, q):
        self.count += 1
        return self.rng.randrange(q)


def simple_paths(net, src, dst):
    out = []

    def walk(path):
        u = path[-1]
        if u == dst:
            out.append(tuple(path))
            return
        for v in sorted(net.neighbors(u)):
            if v not in path:
                walk(path + [v])

    walk([src])
    return out


def brute_disjoint(net, target):
    """{w: minimum total length over w internally disjoint paths}."""
    paths = simple_paths(net, DEALER, target)
    best = {}

    def grow(chosen, used, start, length):
        w = len(chosen)
        if w:
            best[w] = min(best.get(w, length), length)
        for i in range(start, len(paths)):
            inner = set(paths[i][1:-1])
            if inner & used:
                continue
            chosen.append(i)
            grow(chosen, used | inner, i + 1, length + len(paths[i]) - 1)
            chosen.pop()

    grow([], set(), 0, 0)
    return best
