"""Cluster decompositions: validate, generate offline, compose a coloring.

A decomposition partitions the nodes into clusters, each carrying a
low-diameter tree and a color in 1..alpha such that adjacent clusters
differ in color and no edge serves more than kappa same-color trees.
Color classes then run the phase machinery independently: clusters of
one class are pairwise non-adjacent, so they cannot interfere, and the
class costs kappa times its slowest cluster (shared tree edges serve
their trees in fixed id order).

The generator is centralized plumbing, not a distributed algorithm: it
peels BFS balls, carving each once its boundary layer falls under half
the ball.  Balls at least 3/2-fold per hop, so radii stay logarithmic,
and each iteration defers under half of its nodes, so the color count
does too.  The result has strong clusters (trees stay inside their own
nodes) and kappa = 1, while the validator and the composer accept the
general weak-diameter format as well.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass

from .graphs import (
    Graph,
    ListColoringInstance,
    PartialColoring,
    ValidationError,
    verify_coloring,
)
from .pipeline import _pin, list_color_full


@dataclass(frozen=True)
class Cluster:
    id: int
    color: int
    nodes: tuple
    tree_edges: tuple


@dataclass(frozen=True)
class NetworkDecomposition:
    clusters: tuple
    alpha: int
    beta: int
    kappa: int


def _tree_nodes(cluster: Cluster) -> set:
    if cluster.tree_edges:
        return {v for e in cluster.tree_edges for v in e}
    # an edgeless tree is the one-node tree when the cluster is a singleton
    return set(cluster.nodes) if len(cluster.nodes) == 1 else set()


def _adjacency(edges) -> dict:
    adj = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    return adj


def _farthest(adj, start):
    dist = {start: 0}
    q = deque([start])
    far = start
    while q:
        v = q.popleft()
        for u in adj.get(v, ()):
            if u not in dist:
                dist[u] = dist[v] + 1
                if dist[u] > dist[far]:
                    far = u
                q.append(u)
    return far, dist


def _tree_diameter(nodes: set, edges) -> int:
    if not edges:
        return 0
    adj = _adjacency(edges)
    a, _ = _farthest(adj, min(nodes))
    b, dist = _farthest(adj, a)
    return dist[b]


def _is_tree(nodes: set, edges) -> bool:
    if len(edges) != len(nodes) - 1:
        return False
    if not nodes:
        return True
    _, dist = _farthest(_adjacency(edges), min(nodes))
    return len(dist) == len(nodes)


def validate_decomposition(graph, decomp: NetworkDecomposition) -> list:
    """All deviations from the decomposition contract, as readable strings."""
    errs = []
    owner = {}
    for cl in decomp.clusters:
        for v in cl.nodes:
            if not 0 <= v < graph.n:
                errs.append(f"partition: cluster {cl.id} node {v} outside the graph")
            elif v in owner:
                errs.append(
                    f"partition: node {v} in clusters {owner[v]} and {cl.id}"
                )
            else:
                owner[v] = cl.id
    for v in range(graph.n):
        if v not in owner:
            errs.append(f"partition: node {v} in no cluster")

    eset = {(min(u, v), max(u, v)) for u, v in graph.edge_list}
    for cl in decomp.clusters:
        if not 1 <= cl.color <= decomp.alpha:
            errs.append(
                f"color-range: cluster {cl.id} color {cl.color} "
                f"outside 1..{decomp.alpha}"
            )
        shape_ok = True
        for u, v in cl.tree_edges:
            if (min(u, v), max(u, v)) not in eset:
                errs.append(
                    f"tree: cluster {cl.id} edge ({u}, {v}) is not a graph edge"
                )
                shape_ok = False
        tn = _tree_nodes(cl)
        if tn and not _is_tree(tn, cl.tree_edges):
            errs.append(f"tree: cluster {cl.id} edges do not form a tree")
            shape_ok = False
        missing = [v for v in cl.nodes if v not in tn]
        if missing:
            errs.append(
                f"coverage: cluster {cl.id} tree misses node {missing[0]}"
            )
        if shape_ok and tn:
            d = _tree_diameter(tn, cl.tree_edges)
            if d > decomp.beta:
                errs.append(
                    f"diameter: cluster {cl.id} tree diameter {d} "
                    f"> beta {decomp.beta}"
                )

    color_of = {cl.id: cl.color for cl in decomp.clusters}
    flagged = set()
    for u, v in graph.edge_list:
        cu, cv = owner.get(u), owner.get(v)
        if cu is None or cv is None or cu == cv:
            continue
        pair = (min(cu, cv), max(cu, cv))
        if color_of[cu] == color_of[cv] and pair not in flagged:
            flagged.add(pair)
            errs.append(
                f"adjacency: clusters {pair[0]} and {pair[1]} touch "
                f"and share color {color_of[cu]}"
            )

    load = Counter()
    for cl in decomp.clusters:
        for u, v in cl.tree_edges:
            load[(cl.color, min(u, v), max(u, v))] += 1
    for (c, u, v), k in sorted(load.items()):
        if k > decomp.kappa:
            errs.append(
                f"congestion: edge ({u}, {v}) lies in {k} color-{c} trees "
                f"> kappa {decomp.kappa}"
            )
    return errs


def _bfs_tree(graph, root: int, members: set) -> tuple:
    seen = {root}
    edges = []
    q = deque([root])
    while q:
        v = q.popleft()
        for u in sorted(graph.adj[v]):
            if u in members and u not in seen:
                seen.add(u)
                edges.append((v, u))
                q.append(u)
    assert seen == members, "carved ball must be connected"
    return tuple(edges)


def generate_decomposition(graph) -> NetworkDecomposition:
    """Iterated ball carving; one color per iteration, strong clusters."""
    remaining = set(range(graph.n))
    clusters = []
    color = 0
    while remaining:
        color += 1
        working = set(remaining)
        deferred = set()
        while working:
            center = min(working)
            ball = {center}
            frontier = {center}
            while True:
                layer = {
                    u
                    for v in frontier
                    for u in graph.adj[v]
                    if u in working and u not in ball
                }
                if 2 * len(layer) < len(ball):
                    break
                ball |= layer
                frontier = layer
            clusters.append(
                Cluster(
                    id=len(clusters),
                    color=color,
                    nodes=tuple(sorted(ball)),
                    tree_edges=_bfs_tree(graph, center, ball),
                )
            )
            working -= ball
            working -= layer  # boundary waits for the next color
            deferred |= layer
        remaining = deferred
    beta = max(
        (_tree_diameter(_tree_nodes(cl), cl.tree_edges) for cl in clusters),
        default=0,
    )
    return NetworkDecomposition(
        clusters=tuple(clusters), alpha=max(color, 1), beta=beta, kappa=1
    )


def save_decomposition(path, decomp: NetworkDecomposition) -> None:
    payload = {
        "alpha": decomp.alpha,
        "clusters": [
            {
                "id": cl.id,
                "color": cl.color,
                "nodes": list(cl.nodes),
                "tree_edges": [list(e) for e in cl.tree_edges],
            }
            for cl in decomp.clusters
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_decomposition(path) -> NetworkDecomposition:
    """Read the JSON format; beta and kappa are measured, not stored."""
    with open(path) as fh:
        payload = json.load(fh)
    clusters = tuple(
        Cluster(
            id=int(c["id"]),
            color=int(c["color"]),
            nodes=tuple(int(v) for v in c["nodes"]),
            tree_edges=tuple((int(u), int(v)) for u, v in c["tree_edges"]),
        )
        for c in payload["clusters"]
    )
    beta = max(
        (_tree_diameter(_tree_nodes(cl), cl.tree_edges) for cl in clusters),
        default=0,
    )
    load = Counter()
    for cl in clusters:
        for u, v in cl.tree_edges:
            load[(cl.color, min(u, v), max(u, v))] += 1
    return NetworkDecomposition(
        clusters=clusters,
        alpha=int(payload["alpha"]),
        beta=beta,
        kappa=max(load.values(), default=1),
    )


@dataclass(frozen=True)
class ClassRecord:
    color: int
    clusters: tuple
    slowest: int  # rounds of the slowest cluster in the class
    kappa: int  # measured same-color tree load
    rounds: int  # kappa * slowest, the charged cost
    reports: tuple  # per cluster, its tuple of phase reports


@dataclass(frozen=True)
class CompositionReport:
    classes: tuple
    rounds: int
    kappa: int


def color_with_decomposition(
    instance: ListColoringInstance,
    decomp: NetworkDecomposition,
    mode: str = "mis",
    *,
    kmode: str = "linial",
    strategy: str = "conditional",
    policy=None,
    round_cap=None,
    trace=None,
    seed_cap=None,
):
    """Color class by class; same-color clusters run as parallel phases.

    Each cluster restricts the instance to its own nodes, minus colors
    already taken by neighbors in earlier classes.  Slack survives the
    restriction: a node loses one list color per colored neighbor and
    the incident edge with it, so deg+1 lists stay deg+1.
    """
    errs = validate_decomposition(instance.graph, decomp)
    if errs:
        raise ValidationError(f"invalid decomposition: {errs[0]}")
    g = instance.graph
    colors = [None] * g.n
    owner = {v: cl.id for cl in decomp.clusters for v in cl.nodes}
    pinned = _pin(policy, g.n)
    records = []
    used = 0
    for color in range(1, decomp.alpha + 1):
        active = sorted(
            (cl for cl in decomp.clusters if cl.color == color),
            key=lambda cl: cl.id,
        )
        act_ids = {cl.id for cl in active}
        assert not any(
            owner.get(u) != owner.get(v)
            and owner.get(u) in act_ids
            and owner.get(v) in act_ids
            for u, v in g.edge_list
        ), "same-color clusters must not touch"
        snapshot = list(colors)  # concurrent clusters see earlier classes only
        slowest = 0
        cluster_reports = []
        for cl in active:
            kept = sorted(cl.nodes)
            idx = {v: i for i, v in enumerate(kept)}
            sub_edges = [
                (idx[u], idx[v])
                for u, v in g.edge_list
                if u in idx and v in idx
            ]
            sub = Graph.from_edges(len(kept), sub_edges)
            lists = []
            for v in kept:
                banned = {
                    snapshot[u] for u in g.adj[v] if snapshot[u] is not None
                }
                lst = tuple(c for c in instance.lists[v] if c not in banned)
                assert len(lst) >= sub.deg(idx[v]) + 1, (
                    f"cluster {cl.id}: node {v} list too small after hand-off"
                )
                lists.append(lst)
            sub_inst = ListColoringInstance(
                graph=sub, C=instance.C, lists=tuple(lists)
            )
            rem = None if round_cap is None else round_cap - used
            out, reps = list_color_full(
                sub_inst,
                mode,
                kmode,
                strategy=strategy,
                policy=pinned,
                round_cap=rem,
                trace=trace,
                seed_cap=seed_cap,
            )
            for i, v in enumerate(kept):
                colors[v] = out.colors[i]
            cluster_reports.append(tuple(reps))
            slowest = max(slowest, sum(r.rounds for r in reps))
        kmeas = Counter()
        for cl in active:
            for u, v in cl.tree_edges:
                kmeas[(min(u, v), max(u, v))] += 1
        kappa = max(kmeas.values(), default=1)
        charged = kappa * slowest
        used += charged
        records.append(
            ClassRecord(
                color=color,
                clusters=tuple(cl.id for cl in active),
                slowest=slowest,
                kappa=kappa,
                rounds=charged,
                reports=tuple(cluster_reports),
            )
        )
        if trace is not None:
            trace(
                {
                    "class": color,
                    "clusters": [cl.id for cl in active],
                    "rounds": charged,
                    "kappa": kappa,
                }
            )
    out = PartialColoring(colors)
    assert verify_coloring(instance, out).ok, "composed coloring failed checks"
    return out, CompositionReport(
        classes=tuple(records),
        rounds=used,
        kappa=max((r.kappa for r in records), default=1),
    )
