"""Full list coloring: derandomized phases plus a one-shot finish.

A phase fixes candidate colors bit by bit (one fix_level call per bit
of the palette width), keeping the conflict potential from growing by
more than n/levels per level.  What remains is a low-degree conflict
graph.  In mis mode the nodes with final conflict degree below four
induce a degree-3 graph covering half the phase; a maximal independent
set of it keeps its candidates, coloring at least an eighth.  The
avoid variant instead trims lists to deg+1 and sharpens the coin
resolution by a Delta+1 factor, driving the final potential strictly
below n; then most nodes see at most one rival and a single id
comparison per matched pair settles everything, coloring a quarter.

Uncolored nodes carry pruned lists into the next phase.  List sizes
stay one above the degree because every color a node loses comes with
an incident edge it also loses.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .coins import make_family
from .derand import build_level_context, fix_level
from .graphs import (
    Graph,
    ListColoringInstance,
    PartialColoring,
    ValidationError,
    residual_instance,
    verify_coloring,
)
from .linial import linial_reduce, mis_by_colors
from .prefixes import chosen_colors, init_state, phi_sum
from .sim import (
    CommPlan,
    Message,
    NodeProgram,
    RunStats,
    build_bfs_forest,
    run_protocol,
)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _fr(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _accuracy_bits(delta: int, levels: int, mode: str) -> int:
    """Coin resolution: per-level drift 10*delta*n/2^b must fit n/levels."""
    target = 10 * delta * levels
    if mode == "avoid-mis":
        target *= delta + 1
    return max(1, (max(target, 1) - 1).bit_length())


class _FixedSizePolicy:
    """Sub-protocols on an induced subgraph keep the host network's cap."""

    def __init__(self, inner, n: int):
        self.inner = inner
        self.n = n

    def limit_bits(self, _n: int):
        return self.inner.limit_bits(self.n)


def _pin(policy, n: int):
    return None if policy is None else _FixedSizePolicy(policy, n)


@dataclass(frozen=True)
class PhaseReport:
    mode: str
    nodes_at_start: int
    nodes_colored: int
    phi_trace: tuple  # sum of Phi before level 1, then after each level
    v_low: tuple  # final Phi under the mode's cutoff (4 resp. 2)
    mis_size: int | None
    k_classes: int
    seed_bits: int
    depth: int
    levels: tuple
    candidates: tuple
    conflict_edges: tuple
    stats: RunStats

    def __post_init__(self):
        need = _ceil_div(self.nodes_at_start, 8 if self.mode == "mis" else 4)
        assert self.nodes_colored >= need, (
            f"phase colored {self.nodes_colored} < {need} of "
            f"{self.nodes_at_start} nodes"
        )

    @property
    def rounds(self) -> int:
        return self.stats.rounds

    @property
    def phi_final(self) -> Fraction:
        return self.phi_trace[-1]


def trim_lists(inst: ListColoringInstance) -> ListColoringInstance:
    """Cut every list to its deg+1 smallest colors."""
    g = inst.graph
    lists = tuple(inst.lists[v][: g.deg(v) + 1] for v in range(g.n))
    return replace(inst, lists=lists)


class _FlagLow(NodeProgram):
    """One-bit membership announcement along conflict edges."""

    def __init__(self, low: bool, conflict: tuple):
        self.low = low
        self.conflict = conflict
        self.low_nbrs = ()

    def setup(self, ctx):
        if not (self.low and self.conflict):
            ctx.halt()
            return
        for u in self.conflict:
            ctx.send(u, Message(1, 1))
        ctx.wake_at(1)

    def absorb(self, ctx):
        self.low_nbrs = tuple(sorted(ctx.inbox))
        ctx.halt()


def _flag_low(graph, members, conflict_edges, *, policy, round_cap, trace):
    nbrs = {v: [] for v in range(graph.n)}
    for u, v in conflict_edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    progs = [_FlagLow(v in members, tuple(nbrs[v])) for v in range(graph.n)]
    stats = run_protocol(
        graph, progs, policy=policy, round_cap=round_cap, trace=trace
    )
    return progs, stats


def color_fraction(
    inst: ListColoringInstance,
    mode: str,
    *,
    strategy: str = "conditional",
    policy=None,
    round_cap=None,
    trace=None,
    seed_cap=None,
    carry_stats: RunStats | None = None,
):
    """Run one phase; returns (PartialColoring, PhaseReport).

    The instance must carry a proper start coloring psi.  In avoid-mis
    mode lists are trimmed to deg+1 first (phase-local; the caller's
    instance keeps its full lists).
    """
    if mode not in ("mis", "avoid-mis"):
        raise ValueError(f"unknown mode {mode!r}")
    if inst.psi is None:
        raise ValidationError("phase needs a proper start coloring psi")
    g = inst.graph
    n = g.n
    total = RunStats()
    if carry_stats is not None:
        total.add(carry_stats)
    if n == 0:
        return PartialColoring([]), PhaseReport(
            mode, 0, 0, (Fraction(0),), (), 0 if mode == "mis" else None,
            0, 0, 0, (), (), (), total,
        )
    if mode == "avoid-mis":
        inst = trim_lists(inst)
    state = init_state(inst)
    W = state.W
    delta = g.max_degree
    fam = make_family(inst.psi_range, _accuracy_bits(delta, max(W, 1), mode))

    def remaining():
        return None if round_cap is None else round_cap - total.rounds

    forest, bfs_stats = build_bfs_forest(
        g, policy=policy, round_cap=remaining(), trace=trace
    )
    total.add(bfs_stats)
    comm = CommPlan(g, forest, policy=policy, round_cap=remaining(), trace=trace)
    levels = []
    phi_trace = [phi_sum(state)]
    for _ in range(W):
        ctx = build_level_context(fam, state, inst.psi)
        state, rep = fix_level(
            ctx, state, comm, strategy=strategy, seed_cap=seed_cap
        )
        levels.append(rep)
        phi_trace.append(rep.phi_after)
        assert rep.phi_after <= phi_trace[-2] + Fraction(n, W), (
            f"level {rep.level}: potential drifted past n/levels"
        )
    total.add(comm.stats)
    candidates = tuple(chosen_colors(state))
    conflict = state.alive_edges  # same final candidate on both ends

    if mode == "mis":
        assert phi_trace[-1] <= 2 * n
        low = tuple(v for v in range(n) if state.deg[v] < 4)
    else:
        # true drift is under 6*delta*n/2^b per level, so the +1 budget
        # of _accuracy_bits lands strictly below n even on regular graphs
        assert phi_trace[-1] < n
        low = tuple(v for v in range(n) if state.deg[v] <= 1)
    assert len(low) >= _ceil_div(n, 2)
    lowset = set(low)
    progs, ann = _flag_low(
        g, lowset, conflict, policy=policy, round_cap=remaining(), trace=trace
    )
    total.add(ann)

    sub_policy = _pin(policy, n)
    if mode == "mis":
        idx = {v: i for i, v in enumerate(low)}
        pairs = {
            (min(u, v), max(u, v)) for v in low for u in progs[v].low_nbrs
        }
        sub = Graph.from_edges(
            len(low), sorted((idx[u], idx[v]) for u, v in pairs)
        )
        assert sub.max_degree <= 3
        start = [inst.psi[v] for v in low]
        reduced, st = linial_reduce(
            sub, start, policy=sub_policy, round_cap=remaining(), trace=trace
        )
        total.add(st)
        mis, st = mis_by_colors(
            sub, reduced, policy=sub_policy, round_cap=remaining(), trace=trace
        )
        total.add(st)
        winners = [low[i] for i in mis]
        mis_size = len(winners)
    else:
        winners = []
        for v in low:
            mates = progs[v].low_nbrs
            assert len(mates) <= 1, "low set must induce a matching"
            if not mates or v > mates[0]:
                winners.append(v)
        mis_size = None

    colors = [None] * n
    for v in winners:
        colors[v] = candidates[v]
    partial = PartialColoring(colors)
    assert verify_coloring(inst, partial, require_total=False).ok
    report = PhaseReport(
        mode=mode,
        nodes_at_start=n,
        nodes_colored=len(winners),
        phi_trace=tuple(phi_trace),
        v_low=low,
        mis_size=mis_size,
        k_classes=inst.psi_range,
        seed_bits=fam.m + fam.b,
        depth=comm.depth,
        levels=tuple(levels),
        candidates=candidates,
        conflict_edges=conflict,
        stats=total,
    )
    return partial, report


def _phase_cap(n: int, mode: str) -> int:
    """ceil(log_{8/7} n) + 1, resp. base 4/3, with exact integers."""
    num, den = (8, 7) if mode == "mis" else (4, 3)
    t, hi, lo = 0, 1, 1
    while hi < n * lo:
        t += 1
        hi *= num
        lo *= den
    return t + 1


def _phase_psi(inst, kmode, first, *, policy, round_cap, trace):
    g = inst.graph
    if kmode == "ids":
        return list(range(g.n)), RunStats()
    start = list(inst.psi) if first and inst.psi is not None else None
    return linial_reduce(
        g, start, policy=policy, round_cap=round_cap, trace=trace
    )


def list_color_full(
    instance: ListColoringInstance,
    mode: str = "mis",
    kmode: str = "linial",
    *,
    strategy: str = "conditional",
    policy=None,
    round_cap=None,
    trace=None,
    seed_cap=None,
):
    """Color every node from its list; returns (PartialColoring, reports).

    kmode picks the start coloring fed to each phase: "linial" reduces
    from ids (or the instance's psi, first phase) until the class bound
    stops shrinking, "ids" uses identifiers outright.  Each phase
    colors a fixed fraction, so the loop ends within O(log n) phases.
    """
    if kmode not in ("linial", "ids"):
        raise ValueError(f"unknown kmode {kmode!r}")
    if mode not in ("mis", "avoid-mis"):
        raise ValueError(f"unknown mode {mode!r}")
    n0 = instance.graph.n
    pinned = _pin(policy, n0)
    colors = [None] * n0
    ids = list(range(n0))  # residual node -> original id
    reports = []
    cur = instance
    used = 0
    while cur.graph.n:
        rem = None if round_cap is None else round_cap - used
        psi, pre = _phase_psi(
            cur, kmode, not reports, policy=pinned, round_cap=rem, trace=trace
        )
        partial, rep = color_fraction(
            replace(cur, psi=tuple(psi)),
            mode,
            strategy=strategy,
            policy=pinned,
            round_cap=rem,
            trace=trace,
            seed_cap=seed_cap,
            carry_stats=pre,
        )
        for v, c in enumerate(partial.colors):
            if c is not None:
                colors[ids[v]] = c
        if trace is not None:
            trace(
                {
                    "phase": len(reports),
                    "colored": rep.nodes_colored,
                    "remaining": cur.graph.n - rep.nodes_colored,
                    "phi_final": _fr(rep.phi_final),
                    "rounds": rep.rounds,
                }
            )
        reports.append(rep)
        used += rep.stats.rounds
        ids = [ids[v] for v in range(cur.graph.n) if partial.colors[v] is None]
        cur = residual_instance(cur, partial)
    assert len(reports) <= _phase_cap(n0, mode), "phase count exceeded"
    out = PartialColoring(colors)
    assert verify_coloring(instance, out).ok, "final coloring failed checks"
    return out, reports
