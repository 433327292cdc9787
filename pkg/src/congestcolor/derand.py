"""Seed selection by conditional expectations over the coin family.

One refinement level: every node v flips a biased coin c_v with
P(c_v = 1) close to k1(v)/k(v) and keeps the matching half of its
candidate slice.  An edge stays alive only when both endpoints flip the
same way, so the expected next potential

    E[phi'] = sum_e  P(c_u=1, c_v=1) (1/k1(u) + 1/k1(v))
                   + P(c_u=0, c_v=0) (1/k0(u) + 1/k0(v))

equals the current potential up to threshold rounding.  All coins are
driven by one 2m-bit seed, so some seed lands at or below that
expectation, and fixing seed bits one at a time by comparing the two
conditional expectations finds one.  Everything here is exact rational
arithmetic; nothing is sampled.

The conditionals have two regimes.  While s1 is partially fixed, the
free low bits of s2 keep each hash output uniform and only the XOR
offset delta = low_b(s1 * (x_u ^ x_v)) between two endpoints matters;
averaging the box count |{y < t_u : y ^ delta < t_v}| over the affine
set of reachable deltas collapses to rank computations against an
echelon basis (xor_branch_pairs turns the count into membership tests).
Once s1 is fixed, a coin condition (a_v ^ s2) < t_v is a disjoint union
of subcubes of the s2 hypercube and joint probabilities are cube
intersections.

fix_level runs the selection as a protocol: one exchange of
(k0, k1, psi) along alive edges, then per seed bit one aggregation of
the two candidate sums up a spanning tree and a one-bit broadcast back
down.  Components cannot share a seed, so each root fixes its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from . import gf2
from .coins import (
    FamilySpec,
    Seed,
    hash_eval,
    seed_bit_string,
    seed_from_int,
    seed_to_int,
    threshold,
)
from .prefixes import PrefixState, apply_bits, phi, phi_sum, split_counts
from .sim import pack_fields


class SeedCapError(RuntimeError):
    """Exhaustive search over more seeds than the cap allows."""


@dataclass(frozen=True)
class SeedPrefix:
    """The first len(bits) seed bits, lowest index first."""

    bits: tuple = ()

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("seed bits must be 0 or 1")

    def __len__(self):
        return len(self.bits)

    def extend(self, bit: int) -> "SeedPrefix":
        return SeedPrefix(self.bits + (bit,))


@dataclass
class LevelContext:
    """Per-level facts every endpoint of an alive edge has exchanged."""

    fam: FamilySpec
    x: tuple
    k0: tuple
    k1: tuple
    t: tuple
    edges: tuple
    incident: tuple
    _eset: frozenset = field(repr=False, default_factory=frozenset)
    _pairs: dict = field(repr=False, default_factory=dict)
    _bases: dict = field(repr=False, default_factory=dict)


def build_level_context(fam: FamilySpec, state: PrefixState, psi) -> LevelContext:
    n = state.inst.graph.n
    if state.level >= state.W:
        raise ValueError("all levels of this instance are already fixed")
    if len(psi) != n:
        raise ValueError(f"psi must color all {n} nodes")
    for v, c in enumerate(psi):
        if not 0 <= c < fam.K:
            raise ValueError(f"node {v}: psi color {c} outside [0, {fam.K})")
    for u, v in state.alive_edges:
        if psi[u] == psi[v]:
            raise ValueError(f"edge ({u}, {v}): psi must separate alive endpoints")
    k0, k1, t = [], [], []
    for v in range(n):
        a0, a1 = split_counts(state, v)
        k0.append(a0)
        k1.append(a1)
        t.append(threshold(Fraction(a1, a0 + a1), fam.b))
    incident = [[] for _ in range(n)]
    for i, (u, v) in enumerate(state.alive_edges):
        incident[u].append(i)
        incident[v].append(i)
    return LevelContext(
        fam=fam,
        x=tuple(psi),
        k0=tuple(k0),
        k1=tuple(k1),
        t=tuple(t),
        edges=tuple(state.alive_edges),
        incident=tuple(tuple(ix) for ix in incident),
        _eset=frozenset(state.alive_edges),
    )


# ---------------------------------------------------------------------------
# counting lattice points of {y < t_u} x {y ^ delta < t_v}

def _blocks(t: int, b: int):
    """Disjoint dyadic blocks covering [0, t): pairs (i, required y >> i)."""
    return [(i, (t >> i) - 1) for i in range(b + 1) if (t >> i) & 1]


def xor_box_count(t_u: int, t_v: int, delta: int, b: int) -> int:
    """|{y in [0, 2^b): y < t_u and y ^ delta < t_v}|."""
    if not 0 <= delta < (1 << b):
        raise ValueError(f"delta needs at most {b} bits, got {delta}")
    for t in (t_u, t_v):
        if not 0 <= t <= (1 << b):
            raise ValueError(f"threshold {t} outside [0, 2^{b}]")
    total = 0
    for i, top_u in _blocks(t_u, b):
        for i2, top_v in _blocks(t_v, b):
            top_v ^= delta >> i2
            if i >= i2:
                if top_v >> (i - i2) == top_u:
                    total += 1 << i2
            elif top_u >> (i2 - i) == top_v:
                total += 1 << i
    return total


def xor_branch_pairs(t_u: int, t_v: int, b: int) -> tuple:
    """The box count as sum of w * [(delta ^ val) >> p == 0] over pairs.

    Each block pair pins delta's bits from position min(i, i2) upward to
    one pattern, which is what lets an average over an affine family of
    deltas reduce to rank arithmetic instead of enumeration.
    """
    pairs = []
    for i, top_u in _blocks(t_u, b):
        for i2, top_v in _blocks(t_v, b):
            p = max(i, i2)
            if i >= i2:
                c = (top_v >> (i - i2)) ^ top_u
            else:
                c = (top_u >> (i2 - i)) ^ top_v
            pairs.append((p, c << p, 1 << min(i, i2)))
    return tuple(pairs)


def _echelon(rows):
    """Rows with distinct MSB pivots spanning the input, pivot descending."""
    basis = {}
    for r in rows:
        while r:
            piv = r.bit_length() - 1
            if piv not in basis:
                basis[piv] = r
                break
            r ^= basis[piv]
    return tuple(sorted(basis.items(), reverse=True))


def _gens(ctx: LevelContext, dx: int) -> tuple:
    """Per-bit delta generators g_k = low_b(2^k * dx)."""
    got = ctx._bases.get(("g", dx))
    if got is None:
        maskb = (1 << ctx.fam.b) - 1
        got = tuple(
            gf2.mul(ctx.fam.fld, 1 << k, dx) & maskb for k in range(ctx.fam.m)
        )
        ctx._bases[("g", dx)] = got
    return got


def _basis_from(ctx: LevelContext, dx: int, lo: int) -> tuple:
    """Echelon basis of span{g_k : k >= lo}."""
    got = ctx._bases.get((dx, lo))
    if got is None:
        got = _echelon(_gens(ctx, dx)[lo:])
        ctx._bases[(dx, lo)] = got
    return got


def _pairs_for(ctx: LevelContext, t_u: int, t_v: int) -> tuple:
    got = ctx._pairs.get((t_u, t_v))
    if got is None:
        got = xor_branch_pairs(t_u, t_v, ctx.fam.b)
        ctx._pairs[(t_u, t_v)] = got
    return got


# ---------------------------------------------------------------------------
# exact joint outcome probabilities under a seed prefix

def _joint_s1(ctx, u, v, bits):
    # s2's low window is untouched, so each hash output is uniform and only
    # the offset delta = low_b(s1 * dx) couples the two coins
    fam = ctx.fam
    m, b = fam.m, fam.b
    j = len(bits)
    s1 = 0
    for k, bit in enumerate(bits):
        s1 |= bit << k
    dx = ctx.x[u] ^ ctx.x[v]
    delta0 = gf2.mul(fam.fld, s1, dx) & ((1 << b) - 1)
    basis = _basis_from(ctx, dx, j)
    free = m - j
    num11 = 0
    for p, val, w in _pairs_for(ctx, ctx.t[u], ctx.t[v]):
        tau = delta0 ^ val
        for piv, row in basis:
            if (tau >> piv) & 1:
                tau ^= row
        if tau >> p == 0:
            rank = sum(1 for piv, _ in basis if piv >= p)
            num11 += w << (free - rank)
    p11 = Fraction(num11, 1 << (free + b))
    p00 = Fraction((1 << b) - ctx.t[u] - ctx.t[v], 1 << b) + p11
    return p11, p00


def _coin_cubes(a: int, t: int, b: int) -> list:
    """Disjoint subcubes (fixed-bit mask, value) covering {y: (a ^ y) < t}."""
    out = []
    for i, top in _blocks(t, b):
        if i == b:
            out.append((0, 0))
        else:
            mask = ((1 << b) - 1) ^ ((1 << i) - 1)
            out.append((mask, (top ^ (a >> i)) << i))
    return out


def _cube_count(cubes, lock_mask, lock_val, b):
    total = 0
    for mask, val in cubes:
        if (val ^ lock_val) & mask & lock_mask:
            continue
        total += 1 << (b - (mask | lock_mask).bit_count())
    return total


def _joint_s2(ctx, u, v, bits):
    fam = ctx.fam
    m, b = fam.m, fam.b
    maskb = (1 << b) - 1
    s1 = 0
    for k in range(m):
        s1 |= bits[k] << k
    a_u = gf2.mul(fam.fld, s1, ctx.x[u]) & maskb
    a_v = gf2.mul(fam.fld, s1, ctx.x[v]) & maskb
    w_bits = bits[m:]
    fixed = min(len(w_bits), b)  # s2 coefficients >= b never reach the window
    w_val = 0
    for k in range(fixed):
        w_val |= w_bits[k] << k
    if fixed == b:
        cu = (a_u ^ w_val) < ctx.t[u]
        cv = (a_v ^ w_val) < ctx.t[v]
        return Fraction(int(cu and cv)), Fraction(int(not cu and not cv))
    lock_mask = (1 << fixed) - 1
    cubes_u = _coin_cubes(a_u, ctx.t[u], b)
    cubes_v = _coin_cubes(a_v, ctx.t[v], b)
    c11 = 0
    for m1, v1 in cubes_u:
        for m2, v2 in cubes_v:
            if (v1 ^ v2) & m1 & m2:
                continue
            mm = m1 | m2
            vv = v1 | (v2 & ~m1)
            if (vv ^ w_val) & mm & lock_mask:
                continue
            c11 += 1 << (b - (mm | lock_mask).bit_count())
    space = 1 << (b - fixed)
    c1u = _cube_count(cubes_u, lock_mask, w_val, b)
    c1v = _cube_count(cubes_v, lock_mask, w_val, b)
    return Fraction(c11, space), Fraction(space - c1u - c1v + c11, space)


def joint_outcome_prob(ctx: LevelContext, edge, prefix: SeedPrefix) -> tuple:
    """(P[c_u=1, c_v=1], P[c_u=0, c_v=0]) given the seed prefix, exact."""
    u, v = edge
    if u > v:
        u, v = v, u
    if (u, v) not in ctx._eset:
        raise ValueError(f"edge ({u}, {v}) is not alive at this level")
    bits = tuple(prefix.bits)
    if len(bits) > ctx.fam.seed_bits:
        raise ValueError(f"prefix longer than the {ctx.fam.seed_bits}-bit seed")
    if len(bits) <= ctx.fam.m:
        return _joint_s1(ctx, u, v, bits)
    return _joint_s2(ctx, u, v, bits)


def node_conditional(ctx: LevelContext, v: int, prefix: SeedPrefix) -> Fraction:
    """E[deg'(v) / k'(v) | seed prefix]; zero-candidate sides never fire."""
    total = Fraction(0)
    k0, k1 = ctx.k0[v], ctx.k1[v]
    for i in ctx.incident[v]:
        p11, p00 = joint_outcome_prob(ctx, ctx.edges[i], prefix)
        if k1:
            total += p11 / k1
        if k0:
            total += p00 / k0
    return total


def choose_seed_bit(s0: Fraction, s1: Fraction) -> int:
    """Greedy argmin; ties go to 0 so runs are reproducible."""
    return 0 if s0 <= s1 else 1


# ---------------------------------------------------------------------------
# batched candidate sums (exact, int64 with a certified bit budget)

class _Estimator:
    """Candidate sums for every node, one decision at a time.

    Vectorizes over alive edges in integer units: s1-phase counts are
    multiples of 2^-(free+b), s2-phase counts of 2^-free, and per-node
    weights den/k0, den/k1 fold the candidate counts in.  Falls back to
    the scalar closed forms when the unit bound cannot be certified to
    fit in 63 bits.
    """

    def __init__(self, ctx: LevelContext, comp_of: dict):
        self.ctx = ctx
        self.n = len(ctx.x)
        self.comp_of = comp_of
        self.prefix = {r: [] for r in set(comp_of.values())}
        self.den = [max(a, 1) * max(b, 1) for a, b in zip(ctx.k0, ctx.k1)]
        self.w0 = [d // k if k else 0 for d, k in zip(self.den, ctx.k0)]
        self.w1 = [d // k if k else 0 for d, k in zip(self.den, ctx.k1)]
        fam = ctx.fam
        deg = max((len(ix) for ix in ctx.incident), default=0)
        budget = (
            fam.m
            + fam.b
            + max(self.w0 + self.w1 + [1]).bit_length()
            + (deg + 1).bit_length()
            + 3
        )
        self.vectorized = bool(ctx.edges) and budget < 63
        if not self.vectorized:
            return
        edges = ctx.edges
        E = len(edges)
        self.E = E
        self.eu = np.fromiter((e[0] for e in edges), np.int64, E)
        self.ev = np.fromiter((e[1] for e in edges), np.int64, E)
        self.edge_root = [comp_of[e[0]] for e in edges]
        self.dx = [ctx.x[u] ^ ctx.x[v] for u, v in edges]
        self.w0n = np.array(self.w0, dtype=np.int64)
        self.w1n = np.array(self.w1, dtype=np.int64)
        self.gmat = np.array([_gens(ctx, dx) for dx in self.dx], dtype=np.int64)
        self.delta = np.zeros(E, dtype=np.int64)
        pe, pp, pv, pw = [], [], [], []
        for i, (u, v) in enumerate(edges):
            for p, val, w in _pairs_for(ctx, ctx.t[u], ctx.t[v]):
                pe.append(i)
                pp.append(p)
                pv.append(val)
                pw.append(w)
        self.pair_edge = np.array(pe, dtype=np.int64)
        self.pair_p = np.array(pp, dtype=np.int64)
        self.pair_val = np.array(pv, dtype=np.int64)
        self.pair_w = np.array(pw, dtype=np.int64)
        tn = np.array(ctx.t, dtype=np.int64)
        self.margin = (1 << fam.b) - tn[self.eu] - tn[self.ev]
        self._ba_cache = {}
        self.s2cur = None

    # -- decision evaluation ------------------------------------------------

    def decision_values(self, j: int):
        if not self.ctx.edges:
            zero = {v: Fraction(0) for v in range(self.n)}
            return zero, dict(zero)
        if not self.vectorized:
            return self._decide_scalar(j)
        if j < self.ctx.fam.m:
            return self._decide_s1(j)
        return self._decide_s2(j)

    def _decide_scalar(self, j):
        out = ({}, {})
        for v in range(self.n):
            pref = tuple(self.prefix[self.comp_of[v]])
            for r in (0, 1):
                out[r][v] = node_conditional(self.ctx, v, SeedPrefix(pref + (r,)))
        return out

    def _bases_arrays(self, lo):
        got = self._ba_cache.get(lo)
        if got is not None:
            return got
        per_dx = {dx: _basis_from(self.ctx, dx, lo) for dx in set(self.dx)}
        width = max((len(v) for v in per_dx.values()), default=0)
        rows = np.zeros((self.E, width), dtype=np.int64)
        piv = np.zeros((self.E, width), dtype=np.int64)
        pval = np.full((self.E, width), -1, dtype=np.int64)
        for i, dx in enumerate(self.dx):
            for s, (pv_, row) in enumerate(per_dx[dx]):
                rows[i, s] = row
                piv[i, s] = pv_
                pval[i, s] = pv_
        got = (rows, piv, pval)
        self._ba_cache = {lo: got}
        return got

    def _decide_s1(self, j):
        fam = self.ctx.fam
        free = fam.m - j - 1
        rows, piv, pval = self._bases_arrays(j + 1)
        prow = rows[self.pair_edge]
        ppiv = piv[self.pair_edge]
        rank = (pval[self.pair_edge] >= self.pair_p[:, None]).sum(axis=1)
        shift = self.pair_w << (free - rank)
        gj = self.gmat[:, j]
        out = []
        for r in (0, 1):
            delta = self.delta ^ gj if r else self.delta
            tau = delta[self.pair_edge] ^ self.pair_val
            for s in range(prow.shape[1]):
                tau ^= prow[:, s] * ((tau >> ppiv[:, s]) & 1)
            num11p = np.where((tau >> self.pair_p) == 0, shift, 0)
            num11 = np.zeros(self.E, dtype=np.int64)
            np.add.at(num11, self.pair_edge, num11p)
            num00 = (self.margin << free) + num11
            out.append(self._node_sums(num11, num00, free + fam.b))
        return out[0], out[1]

    def _decide_s2(self, j):
        fam = self.ctx.fam
        b = fam.b
        i = j - fam.m
        free = b - i - 1
        lockmask = (1 << (i + 1)) - 1
        base = np.fromiter(
            (self.s2cur[self.comp_of[v]] for v in range(self.n)), np.int64, self.n
        )
        nwidth = (
            b - np.bitwise_count(self.ncube_mask | lockmask).astype(np.int64)
        )
        ewidth = (
            b - np.bitwise_count(self.ecube_mask | lockmask).astype(np.int64)
        )
        out = []
        for r in (0, 1):
            lv = base | (r << i)
            ok = ((self.ncube_val ^ lv[self.ncube_node]) & self.ncube_mask & lockmask) == 0
            c1 = np.zeros(self.n, dtype=np.int64)
            np.add.at(c1, self.ncube_node, np.where(ok, np.int64(1) << nwidth, 0))
            le = lv[self.eu]
            okc = ((self.ecube_val ^ le[self.ecube_edge]) & self.ecube_mask & lockmask) == 0
            c11 = np.zeros(self.E, dtype=np.int64)
            np.add.at(c11, self.ecube_edge, np.where(okc, np.int64(1) << ewidth, 0))
            c00 = (np.int64(1) << free) - c1[self.eu] - c1[self.ev] + c11
            out.append(self._node_sums(c11, c00, free))
        return out[0], out[1]

    def _node_sums(self, like1, like0, shift):
        acc = np.zeros(self.n, dtype=np.int64)
        np.add.at(acc, self.eu, like1 * self.w1n[self.eu] + like0 * self.w0n[self.eu])
        np.add.at(acc, self.ev, like1 * self.w1n[self.ev] + like0 * self.w0n[self.ev])
        return {
            v: Fraction(int(acc[v]), self.den[v] << shift) for v in range(self.n)
        }

    # -- committing a decided bit -------------------------------------------

    def lock(self, j: int, bits_by_root: dict):
        for root, bit in bits_by_root.items():
            self.prefix[root].append(bit)
        if not self.vectorized:
            return
        m = self.ctx.fam.m
        if j < m:
            eb = np.fromiter(
                (bits_by_root[r] for r in self.edge_root), np.int64, self.E
            )
            self.delta ^= self.gmat[:, j] * eb
            if j == m - 1:
                self._enter_s2()
        else:
            for root, bit in bits_by_root.items():
                self.s2cur[root] |= bit << (j - m)

    def _enter_s2(self):
        ctx = self.ctx
        fam = ctx.fam
        maskb = (1 << fam.b) - 1
        s1 = {}
        for root, bits in self.prefix.items():
            word = 0
            for k in range(fam.m):
                word |= bits[k] << k
            s1[root] = word
        cubes = {}
        for v in range(self.n):
            if not ctx.incident[v]:
                continue
            a_v = gf2.mul(fam.fld, s1[self.comp_of[v]], ctx.x[v]) & maskb
            cubes[v] = _coin_cubes(a_v, ctx.t[v], fam.b)
        nn, nm, nv = [], [], []
        for v, cs in cubes.items():
            for mask, val in cs:
                nn.append(v)
                nm.append(mask)
                nv.append(val)
        self.ncube_node = np.array(nn, dtype=np.int64)
        self.ncube_mask = np.array(nm, dtype=np.int64)
        self.ncube_val = np.array(nv, dtype=np.int64)
        ee, em, evv = [], [], []
        for i, (u, v) in enumerate(ctx.edges):
            for m1, v1 in cubes[u]:
                for m2, v2 in cubes[v]:
                    if (v1 ^ v2) & m1 & m2:
                        continue
                    ee.append(i)
                    em.append(m1 | m2)
                    evv.append(v1 | (v2 & ~m1))
        self.ecube_edge = np.array(ee, dtype=np.int64)
        self.ecube_mask = np.array(em, dtype=np.int64)
        self.ecube_val = np.array(evv, dtype=np.int64)
        self.s2cur = {root: 0 for root in self.prefix}


# ---------------------------------------------------------------------------
# one full level

@dataclass
class RootRecord:
    root: int
    nodes: tuple
    seed: Seed
    expect_start: Fraction
    chain: tuple
    phi_before: Fraction
    phi_after: Fraction


@dataclass
class LevelReport:
    level: int
    phi_before: Fraction
    phi_after: Fraction
    bound: Fraction
    rounds: int
    roots: dict


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def fix_level(ctx: LevelContext, state: PrefixState, comm, *, strategy="conditional",
              seed_cap=None):
    """Pick one seed per component and refine every prefix by one bit.

    Returns (next state, LevelReport).  The conditional strategy walks
    the m+b seed bits that can matter, aggregating both candidate sums
    to each root and broadcasting the winning bit; the exhaustive one
    has each root pick the best seed outright and costs the same
    protocol shape with the seed shipped bit by bit.
    """
    if strategy not in ("conditional", "exhaustive"):
        raise ValueError(f"unknown strategy {strategy!r}")
    fam = ctx.fam
    n = state.inst.graph.n
    m, b = fam.m, fam.b
    phi_before = phi_sum(state)
    start_rounds = comm.stats.rounds

    comp_nodes = {t.root: t.nodes for t in comm.forest}
    comp_of = {}
    for root, nodes in comp_nodes.items():
        for v in nodes:
            comp_of[v] = root
    if len(comp_of) != n:
        raise ValueError("forest must span every node")
    roots = sorted(comp_nodes)
    comp_phi = {
        r: sum((phi(state, v) for v in nodes), Fraction(0))
        for r, nodes in comp_nodes.items()
    }
    slack = {
        r: Fraction(10 * max((state.deg[v] for v in nodes), default=0) * len(nodes),
                    1 << b)
        for r, nodes in comp_nodes.items()
    }

    # round 1: alive neighbors swap split counts and psi colors, after which
    # every node can price its neighbors' coins locally
    cw = max(1, state.inst.C.bit_length())
    outgoing = {v: {} for v in range(n)}
    for u, v in ctx.edges:
        outgoing[u][v] = pack_fields((ctx.k0[u], cw), (ctx.k1[u], cw), (ctx.x[u], fam.a))
        outgoing[v][u] = pack_fields((ctx.k0[v], cw), (ctx.k1[v], cw), (ctx.x[v], fam.a))
    comm.exchange(outgoing)

    if strategy == "exhaustive":
        capkw = {} if seed_cap is None else {"cap": seed_cap}
        picked = {
            r: exhaustive_seed(ctx, state, nodes=comp_nodes[r], **capkw)
            for r in roots
        }
        comm.aggregate({})  # stands in for shipping component facts rootward
        for i in range(m + b):
            comm.broadcast(
                {r: ((seed_to_int(fam, picked[r][0]) >> i) & 1, 1) for r in roots}
            )
        seeds = {r: picked[r][0] for r in roots}
        chains = {r: () for r in roots}
        expect_start = {r: picked[r][1] for r in roots}
        last = {r: picked[r][1] for r in roots}
    else:
        est = _Estimator(ctx, comp_of)
        chains = {r: [] for r in roots}
        expect_start, last = {}, {}
        for j in range(m + b):
            x0, x1 = est.decision_values(j)
            totals = comm.aggregate({v: (x0[v], x1[v]) for v in range(n)})
            bits = {}
            for r in roots:
                s0, s1 = totals[r]
                if j == 0:
                    expect_start[r] = (s0 + s1) / 2
                    assert expect_start[r] <= comp_phi[r] + slack[r], (
                        "threshold rounding drifted past its slack"
                    )
                else:
                    assert (s0 + s1) / 2 == last[r], "conditional chain broke"
                bits[r] = choose_seed_bit(s0, s1)
                last[r] = min(s0, s1)
                chains[r].append((s0, s1, bits[r]))
            comm.broadcast({r: (bits[r], 1) for r in roots})
            est.lock(j, bits)
        seeds = {}
        for r in roots:
            word = 0
            for i, (_, _, bit) in enumerate(chains[r]):
                word |= bit << i
            seeds[r] = seed_from_int(fam, word)

    coin_bits = [
        1 if hash_eval(fam, seeds[comp_of[v]], ctx.x[v]) < ctx.t[v] else 0
        for v in range(n)
    ]
    new_state = apply_bits(state, coin_bits)
    phi_after = phi_sum(new_state)

    records = {}
    for r in roots:
        realized = sum((phi(new_state, v) for v in comp_nodes[r]), Fraction(0))
        assert realized == last[r], (
            "realized potential must equal the fully conditioned expectation"
        )
        records[r] = RootRecord(
            root=r,
            nodes=comp_nodes[r],
            seed=seeds[r],
            expect_start=expect_start[r],
            chain=tuple(chains[r]),
            phi_before=comp_phi[r],
            phi_after=realized,
        )
        if comm.trace is not None:
            comm.trace(
                {
                    "level": new_state.level,
                    "root": r,
                    "seed": seed_bit_string(fam, seeds[r]),
                    "phi_before": _frac_str(comp_phi[r]),
                    "phi_after": _frac_str(realized),
                    "bound": _frac_str(comp_phi[r] + slack[r]),
                }
            )
    bound = phi_before + sum(slack.values(), Fraction(0))
    assert phi_after <= bound, "level potential exceeded the rounding slack"
    report = LevelReport(
        level=new_state.level,
        phi_before=phi_before,
        phi_after=phi_after,
        bound=bound,
        rounds=comm.stats.rounds - start_rounds,
        roots=records,
    )
    return new_state, report


# ---------------------------------------------------------------------------
# exhaustive reference search

def exhaustive_seed(ctx: LevelContext, state: PrefixState, *, nodes=None,
                    cap: int = 1 << 24):
    """Smallest (potential, seed) over the whole seed space.

    Enumerates the 2^(m+b) seeds that can differ on the low hash window;
    s2 coefficients at b and above never reach it and stay zero.  The
    cap is checked against the nominal 2^(2m) space.
    """
    fam = ctx.fam
    if (1 << fam.seed_bits) > cap:
        raise SeedCapError(
            f"2^{fam.seed_bits} seeds exceed the cap of {cap}"
        )
    if nodes is None:
        nodes = tuple(range(state.inst.graph.n))
    nodeset = set(nodes)
    edges = [e for e in ctx.edges if e[0] in nodeset and e[1] in nodeset]
    m, b = fam.m, fam.b
    if not edges:
        return seed_from_int(fam, 0), Fraction(0)
    den = 1
    for v in nodeset:
        for k in (ctx.k0[v], ctx.k1[v]):
            if k:
                den = lcm(den, k)
    if den.bit_length() + (2 * len(edges)).bit_length() + 2 >= 63:
        return _exhaustive_scalar(ctx, edges)

    w11 = np.zeros(len(edges), dtype=np.int64)
    w00 = np.zeros(len(edges), dtype=np.int64)
    for i, (u, v) in enumerate(edges):
        if ctx.k1[u] and ctx.k1[v]:
            w11[i] = den // ctx.k1[u] + den // ctx.k1[v]
        if ctx.k0[u] and ctx.k0[v]:
            w00[i] = den // ctx.k0[u] + den // ctx.k0[v]
    maskb = (1 << b) - 1
    used = sorted({w for e in edges for w in e})
    amap = {
        x: np.fromiter(
            (gf2.mul(fam.fld, s1, x) & maskb for s1 in range(1 << m)),
            np.int64,
            1 << m,
        )
        for x in {ctx.x[v] for v in used}
    }
    s2v = np.arange(1 << b, dtype=np.int64)
    best_val = best_word = None
    for s1 in range(1 << m):
        coin = {v: (amap[ctx.x[v]][s1] ^ s2v) < ctx.t[v] for v in used}
        acc = np.zeros(1 << b, dtype=np.int64)
        for i, (u, v) in enumerate(edges):
            bu, bv = coin[u], coin[v]
            acc += np.where(bu & bv, w11[i], 0)
            acc += np.where(~bu & ~bv, w00[i], 0)
        pos = int(np.argmin(acc))  # first hit = smallest s2
        val = int(acc[pos])
        word = (pos << m) | s1
        if best_val is None or (val, word) < (best_val, best_word):
            best_val, best_word = val, word
    return seed_from_int(fam, best_word), Fraction(best_val, den)


def _exhaustive_scalar(ctx, edges):
    fam = ctx.fam
    best = None
    for word in range(1 << (fam.m + fam.b)):
        seed = seed_from_int(fam, word)
        val = Fraction(0)
        for u, v in edges:
            cu = hash_eval(fam, seed, ctx.x[u]) < ctx.t[u]
            cv = hash_eval(fam, seed, ctx.x[v]) < ctx.t[v]
            if cu and cv:
                val += Fraction(1, ctx.k1[u]) + Fraction(1, ctx.k1[v])
            elif not cu and not cv:
                val += Fraction(1, ctx.k0[u]) + Fraction(1, ctx.k0[v])
        if best is None or (val, word) < best:
            best = (val, word)
    return seed_from_int(fam, best[1]), best[0]
