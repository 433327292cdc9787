"""Graph containers, instance I/O, generators, and coloring checks.

Nodes are 0..n-1.  Graphs are simple and undirected; adjacency is kept
as sorted tuples so every traversal order in the package is
deterministic.  A list-coloring instance carries a palette size C and
per-node color lists, each sorted ascending; validity of an instance
always means |L(v)| >= deg(v) + 1 and L(v) a subset of {0..C-1}.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property


class ValidationError(ValueError):
    pass


class Graph:
    __slots__ = ("n", "adj", "edge_list", "__dict__")

    def __init__(self, n: int, adj: tuple, edge_list: tuple):
        self.n = n
        self.adj = adj
        self.edge_list = edge_list

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        if n < 0:
            raise ValidationError("node count must be nonnegative")
        seen = set()
        adj = [[] for _ in range(n)]
        norm = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValidationError(f"self-loop at node {u}")
            a, b = (u, v) if u < v else (v, u)
            if (a, b) in seen:
                raise ValidationError(f"parallel edge ({a},{b})")
            seen.add((a, b))
            norm.append((a, b))
            adj[a].append(b)
            adj[b].append(a)
        return cls(n, tuple(tuple(sorted(x)) for x in adj), tuple(sorted(norm)))

    def deg(self, v: int) -> int:
        return len(self.adj[v])

    @cached_property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def _bfs_depths(self, src: int) -> dict:
        dist = {src: 0}
        q = deque([src])
        while q:
            u = q.popleft()
            for w in self.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    @cached_property
    def diameter(self) -> int:
        """Largest eccentricity within any connected component."""
        return max(
            (max(self._bfs_depths(v).values()) for v in range(self.n)), default=0
        )

    @cached_property
    def components(self) -> tuple:
        """Connected components as sorted node tuples, ordered by min node."""
        out = []
        seen = set()
        for v in range(self.n):
            if v in seen:
                continue
            comp = sorted(self._bfs_depths(v))
            seen.update(comp)
            out.append(tuple(comp))
        return tuple(out)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edge_list == other.edge_list
        )

    def __hash__(self):
        return hash((self.n, self.edge_list))


@dataclass(frozen=True)
class ListColoringInstance:
    graph: Graph
    C: int
    lists: tuple
    psi: tuple | None = None

    def __post_init__(self):
        g = self.graph
        if self.C < 1:
            raise ValidationError("palette size C must be positive")
        if len(self.lists) != g.n:
            raise ValidationError("need one color list per node")
        for v, lst in enumerate(self.lists):
            if len(lst) < g.deg(v) + 1:
                raise ValidationError(
                    f"node {v}: list size {len(lst)} < deg+1 = {g.deg(v) + 1}"
                )
            if any(lst[i] >= lst[i + 1] for i in range(len(lst) - 1)):
                raise ValidationError(f"node {v}: list not strictly ascending")
            if lst[0] < 0 or lst[-1] >= self.C:
                raise ValidationError(f"node {v}: colors outside 0..{self.C - 1}")
        if self.psi is not None:
            if len(self.psi) != g.n:
                raise ValidationError("psi must assign a value to every node")
            for u, w in g.edge_list:
                if self.psi[u] == self.psi[w]:
                    raise ValidationError(f"psi not proper on edge ({u},{w})")
            if any(x < 0 for x in self.psi):
                raise ValidationError("psi values must be nonnegative")

    @property
    def psi_range(self) -> int | None:
        return None if self.psi is None else max(self.psi) + 1


@dataclass
class PartialColoring:
    """Per-node colors; None marks a node not yet colored."""

    colors: list = field(default_factory=list)

    def colored(self):
        return [v for v, c in enumerate(self.colors) if c is not None]

    @property
    def total(self) -> bool:
        return all(c is not None for c in self.colors)


@dataclass
class ColoringReport:
    monochromatic: list
    out_of_list: list
    uncolored: list

    @property
    def ok(self) -> bool:
        return not (self.monochromatic or self.out_of_list or self.uncolored)


def attach_default_lists(graph: Graph) -> ListColoringInstance:
    """Give node v the list {0..deg(v)} with palette C = max_degree + 1."""
    return ListColoringInstance(
        graph=graph,
        C=graph.max_degree + 1,
        lists=tuple(tuple(range(graph.deg(v) + 1)) for v in range(graph.n)),
    )


def load_instance(path) -> ListColoringInstance:
    with open(path) as fh:
        payload = json.load(fh)
    graph = Graph.from_edges(int(payload["n"]), [tuple(e) for e in payload["edges"]])
    psi = None
    if "psi" in payload:
        raw = payload["psi"]
        psi = tuple(int(raw[str(v)]) for v in range(graph.n))
    if "lists" not in payload:
        base = attach_default_lists(graph)
        C = int(payload.get("C", base.C))
        if C < base.C:
            raise ValidationError(f"C={C} too small for default lists (need {base.C})")
        return ListColoringInstance(graph=graph, C=C, lists=base.lists, psi=psi)
    raw = payload["lists"]
    lists = []
    for v in range(graph.n):
        if str(v) not in raw:
            raise ValidationError(f"node {v}: missing color list")
        lists.append(tuple(sorted(set(int(c) for c in raw[str(v)]))))
    C = int(payload.get("C", max((l[-1] for l in lists if l), default=-1) + 1))
    return ListColoringInstance(graph=graph, C=C, lists=tuple(lists), psi=psi)


def save_coloring(path, coloring: PartialColoring) -> None:
    payload = {
        "n": len(coloring.colors),
        "colors": {str(v): c for v, c in enumerate(coloring.colors)},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_coloring(path) -> PartialColoring:
    with open(path) as fh:
        payload = json.load(fh)
    raw = payload["colors"]
    colors = [raw.get(str(v)) for v in range(int(payload["n"]))]
    return PartialColoring([None if c is None else int(c) for c in colors])


def generate_graph(kind: str, params: dict, rng_seed: int | None = None) -> Graph:
    n = int(params["n"])
    if kind == "path":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "cycle":
        if n < 3:
            raise ValidationError("cycle needs n >= 3")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "star":
        return Graph.from_edges(n, [(0, i) for i in range(1, n)])
    if kind == "clique":
        return Graph.from_edges(
            n, [(i, j) for i in range(n) for j in range(i + 1, n)]
        )
    if kind == "gnp":
        p = float(params["p"])
        rng = random.Random(rng_seed)
        edges = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < p
        ]
        return Graph.from_edges(n, edges)
    if kind == "regular":
        return _random_regular(n, int(params["d"]), random.Random(rng_seed))
    raise ValidationError(f"unknown graph kind {kind!r}")


def _random_regular(n: int, d: int, rng: random.Random) -> Graph:
    """Stub matching with local edge swaps to clear loops and duplicates."""
    if d < 0 or d >= n or (n * d) % 2:
        raise ValidationError(f"no {d}-regular simple graph on {n} nodes")
    stubs = [v for v in range(n) for _ in range(d)]
    for _ in range(64):
        rng.shuffle(stubs)
        edges = [
            tuple(sorted(stubs[i : i + 2])) for i in range(0, len(stubs), 2)
        ]
        if _repair_matching(edges, rng):
            return Graph.from_edges(n, edges)
    raise ValidationError(f"failed to sample a {d}-regular graph on {n} nodes")


def _repair_matching(edges: list, rng: random.Random) -> bool:
    def bad_indices():
        count = {}
        for e in edges:
            count[e] = count.get(e, 0) + 1
        return [
            i for i, (u, v) in enumerate(edges) if u == v or count[(u, v)] > 1
        ]

    for _ in range(40 * len(edges) + 40):
        bad = bad_indices()
        if not bad:
            return True
        i = bad[rng.randrange(len(bad))]
        j = rng.randrange(len(edges))
        if i == j:
            continue
        (a, b), (c, e) = edges[i], edges[j]
        # cross the two edges; keep the swap only if both halves are clean
        new1, new2 = tuple(sorted((a, c))), tuple(sorted((b, e)))
        if a == c or b == e:
            continue
        current = set(edges) - {edges[i], edges[j]}
        if new1 in current or new2 in current or new1 == new2:
            continue
        edges[i], edges[j] = new1, new2
    return not bad_indices()


def verify_coloring(
    instance: ListColoringInstance,
    coloring: PartialColoring,
    require_total: bool = True,
) -> ColoringReport:
    colors = coloring.colors
    if len(colors) != instance.graph.n:
        raise ValidationError("coloring length does not match node count")
    mono = [
        (u, v)
        for u, v in instance.graph.edge_list
        if colors[u] is not None and colors[u] == colors[v]
    ]
    out = [
        v
        for v, c in enumerate(colors)
        if c is not None and c not in set(instance.lists[v])
    ]
    uncolored = (
        [v for v, c in enumerate(colors) if c is None] if require_total else []
    )
    return ColoringReport(monochromatic=mono, out_of_list=out, uncolored=uncolored)


def residual_instance(
    instance: ListColoringInstance, partial: PartialColoring
) -> ListColoringInstance:
    """Restrict to uncolored nodes, deleting colors used by colored neighbors.

    Surviving nodes are renumbered densely in ascending id order, so the
    caller can merge results back via the sorted uncolored-node list.
    Slack is preserved: every deleted list entry is matched by a deleted
    incident edge.
    """
    report = verify_coloring(instance, partial, require_total=False)
    if not report.ok:
        raise ValidationError("partial coloring is not valid on its colored part")
    g = instance.graph
    colors = partial.colors
    kept = [v for v in range(g.n) if colors[v] is None]
    index = {v: i for i, v in enumerate(kept)}
    edges = [
        (index[u], index[v])
        for u, v in g.edge_list
        if colors[u] is None and colors[v] is None
    ]
    lists = []
    for v in kept:
        banned = {colors[u] for u in g.adj[v] if colors[u] is not None}
        lists.append(tuple(c for c in instance.lists[v] if c not in banned))
    return ListColoringInstance(
        graph=Graph.from_edges(len(kept), edges),
        C=instance.C,
        lists=tuple(lists),
    )
