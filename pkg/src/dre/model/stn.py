"""Distance-graph reasoning for simple temporal networks.

A constraint ``t_i - t_j <= w`` is the edge ``j -> i`` with weight ``w``.  The
network is consistent iff the graph has no negative cycle; shortest paths from
the origin give latest times and shortest paths into the origin give earliest
times.
"""
from __future__ import annotations

import math
from collections import deque
from fractions import Fraction


class NegativeCycle(Exception):
    pass


class DistanceGraph:
    def __init__(self, nodes=()):
        self.nodes: list = []
        self._index: dict = {}
        self.out: dict = {}
        self.inc: dict = {}
        for n in nodes:
            self.add_node(n)

    def add_node(self, n) -> None:
        if n not in self._index:
            self._index[n] = len(self.nodes)
            self.nodes.append(n)
            self.out[n] = {}
            self.inc[n] = {}

    def add(self, ti, tj, w) -> None:
        """Record ``t_i - t_j <= w``; parallel constraints keep the tightest."""
        self.add_node(ti)
        self.add_node(tj)
        old = self.out[tj].get(ti)
        if old is None or w < old:
            self.out[tj][ti] = w
            self.inc[ti][tj] = w

    def pin(self, t, origin, value) -> None:
        self.add(t, origin, value)
        self.add(origin, t, -value)

    def copy(self) -> "DistanceGraph":
        g = DistanceGraph()
        g.nodes = list(self.nodes)
        g._index = dict(self._index)
        g.out = {k: dict(v) for k, v in self.out.items()}
        g.inc = {k: dict(v) for k, v in self.inc.items()}
        return g

    def _spfa(self, src, adj) -> dict:
        dist = {src: Fraction(0)}
        count = {src: 0}
        queue = deque([src])
        queued = {src}
        limit = len(self.nodes)
        while queue:
            u = queue.popleft()
            queued.discard(u)
            du = dist[u]
            for v, w in adj[u].items():
                nd = du + w
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    count[v] = count[u] + 1
                    if count[v] >= limit:
                        raise NegativeCycle()
                    if v not in queued:
                        queued.add(v)
                        queue.append(v)
        return dist

    def distances_from(self, src) -> dict:
        """``d(src -> n)``: upper bound on ``t_n - t_src``.  Missing keys are unbounded."""
        return self._spfa(src, self.out)

    def distances_to(self, dst) -> dict:
        """``d(n -> dst)``: upper bound on ``t_dst - t_n``."""
        return self._spfa(dst, self.inc)

    def consistent(self) -> bool:
        # a virtual source reaching every node detects any negative cycle
        src = ("__source__",)
        g = self.copy()
        for n in self.nodes:
            g.add(n, src, Fraction(0))
        try:
            g.distances_from(src)
        except NegativeCycle:
            return False
        return True

    def window(self, node, origin):
        """Tightest ``[lo, hi]`` for ``t_node - t_origin``; ``hi`` may be ``math.inf``."""
        up = self.distances_from(origin)
        down = self.distances_to(origin)
        hi = up.get(node, math.inf)
        lo = -down[node] if node in down else -math.inf
        return lo, hi

    def earliest(self, origin) -> dict:
        """Earliest consistent time of every node relative to ``origin``."""
        down = self.distances_to(origin)
        up = self.distances_from(origin)
        out = {}
        for n in self.nodes:
            if n in down:
                out[n] = -down[n]
            elif n in up:
                # no lower bound beyond the origin itself is forced
                out[n] = min(Fraction(0), up[n])
            else:
                out[n] = Fraction(0)
        return out
