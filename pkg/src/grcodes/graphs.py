"""Storage-network graphs: named families, JSON input, BFS utilities."""

from __future__ import annotations

import json
from collections import deque

import numpy as np

from .errors import ParameterError


class StorageGraph:
    """Simple undirected graph on vertices 0..n-1."""

    def __init__(self, n: int, edges):
        self.n = n
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ParameterError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u},{v}) out of range")
            es.add((min(u, v), max(u, v)))
        self.edges = sorted(es)
        self.adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            self.adj[u].append(v)
            self.adj[v].append(u)
        for nb in self.adj:
            nb.sort()

    def __repr__(self):
        return f"StorageGraph(n={self.n}, m={len(self.edges)})"

    def bfs(self, source: int, allowed=None):
        """Distances and index-ordered BFS parents from ``source``.

        ``allowed`` restricts the search to an induced vertex subset.
        Unreachable vertices get distance -1.
        """
        ok = [True] * self.n if allowed is None else [False] * self.n
        if allowed is not None:
            for v in allowed:
                ok[v] = True
            ok[source] = True
        dist = [-1] * self.n
        parent = [-1] * self.n
        dist[source] = 0
        dq = deque([source])
        while dq:
            u = dq.popleft()
            for v in self.adj[u]:
                if ok[v] and dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    dq.append(v)
        return dist, parent

    def layers_from(self, f: int):
        """Spheres around f in the whole graph, nearest first."""
        dist, _ = self.bfs(f)
        t = max(dist)
        return [[v for v in range(self.n) if dist[v] == i] for i in range(1, t + 1)]

    def is_connected(self) -> bool:
        dist, _ = self.bfs(0)
        return all(d >= 0 for d in dist)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]})

    @classmethod
    def from_json(cls, doc: str | dict) -> "StorageGraph":
        data = json.loads(doc) if isinstance(doc, str) else doc
        return cls(int(data["n"]), data["edges"])


def complete_graph(n: int) -> StorageGraph:
    return StorageGraph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> StorageGraph:
    return StorageGraph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> StorageGraph:
    return StorageGraph(n, [(i, i + 1) for i in range(n - 1)])


def petersen_graph() -> StorageGraph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return StorageGraph(10, edges)


def regular_tree_ball(t: int, height: int) -> StorageGraph:
    """Ball of a t-regular tree: root with t children, then t-1 onward."""
    if t < 2 or height < 1:
        raise ParameterError("need t >= 2 and height >= 1")
    edges = []
    prev = [0]
    nxt = 1
    for level in range(1, height + 1):
        cur = []
        for p in prev:
            kids = t if level == 1 else t - 1
            for _ in range(kids):
                edges.append((p, nxt))
                cur.append(nxt)
                nxt += 1
        prev = cur
    return StorageGraph(nxt, edges)


def erdos_renyi(n: int, p: float, seed) -> StorageGraph:
    """G(n, p) sample, deterministic given the seed material."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if mask[u, v]]
    return StorageGraph(n, edges)


def fig3_graph() -> StorageGraph:
    """7-node repair tree: root 0 with children 1, 2, 6; node 1 with 3, 4, 5."""
    return StorageGraph(7, [(0, 1), (0, 2), (0, 6), (1, 3), (1, 4), (1, 5)])


def fig4_graph() -> StorageGraph:
    """7-node binary repair tree rooted at 0."""
    return StorageGraph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])


def fig5_graph() -> StorageGraph:
    """10-node adversarial-repair example: 0 is the failed node."""
    return StorageGraph(
        10,
        [(0, 1), (0, 8), (0, 9), (1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)],
    )


NAMED_GRAPHS = {
    "petersen": petersen_graph,
    "fig3": fig3_graph,
    "fig4": fig4_graph,
    "fig5": fig5_graph,
}


def graph_from_spec(spec: str) -> StorageGraph:
    """Parse 'petersen', 'complete:10', 'er:n=100,p=0.1,seed=7', a JSON path, etc."""
    spec = spec.strip()
    if spec in NAMED_GRAPHS:
        return NAMED_GRAPHS[spec]()
    if ":" in spec:
        name, _, rest = spec.partition(":")
        if name == "complete":
            return complete_graph(int(rest))
        if name == "cycle":
            return cycle_graph(int(rest))
        if name == "path":
            return path_graph(int(rest))
        if name in ("er", "tree"):
            kv = {}
            for item in rest.split(","):
                key, _, val = item.partition("=")
                kv[key.strip()] = val.strip()
            if name == "er":
                return erdos_renyi(int(kv["n"]), float(kv["p"]), int(kv.get("seed", 0)))
            return regular_tree_ball(int(kv["t"]), int(kv.get("h", kv.get("height", 1))))
    if spec.endswith(".json"):
        with open(spec) as fh:
            return StorageGraph.from_json(fh.read())
    raise ParameterError(f"unrecognized graph spec {spec!r}")
