"""Synchronous message-passing engine with bit-level bandwidth accounting.

Execution model: every node runs `setup` once, then the engine proceeds
in rounds.  A message queued in round r (setup is round 0) is delivered
at the start of round r+1, and delivery wakes the receiver.  Nodes can
also schedule timed wakeups.  The engine executes a round only when a
delivery or wakeup is pending, so the round count equals the number of
rounds in which anything happens; a protocol where every node halts in
setup costs zero rounds.

Per round and per directed edge a node may send one message.  Messages
carry an explicit bit length.  Category "algorithm" is subject to the
strict bandwidth policy (at most beta * ceil(log2 n) bits); category
"aggregation" (exact rational partial sums) is measured but exempt.

Every node must eventually halt.  If no event is pending while some
node is still live, the run aborts with StallError.  Messages sent to a
node that already halted are counted but dropped.

Sequential composition is the intended usage: helpers like
build_bfs_forest or aggregate_pairs each run one protocol and return
stats, and a caller adds the stats up.  That matches synchronous
composition where every node knows a common round bound for each stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

ALGORITHM = "algorithm"
AGGREGATION = "aggregation"
_CATEGORIES = (ALGORITHM, AGGREGATION)

_LEN_FIELD = 16  # bit width of the length prefix inside rational encodings


class ProtocolError(RuntimeError):
    pass


class StallError(RuntimeError):
    pass


class RoundCapError(RuntimeError):
    pass


class BandwidthError(RuntimeError):
    def __init__(self, round_no: int, edge: tuple, bits: int, limit: int):
        self.round = round_no
        self.edge = edge
        self.bits = bits
        self.limit = limit
        super().__init__(
            f"algorithm message of {bits} bits exceeds strict cap of "
            f"{limit} bits at round {round_no} on edge {edge}"
        )


@dataclass(frozen=True)
class Message:
    payload: int
    bit_len: int
    category: str = ALGORITHM

    def __post_init__(self):
        if self.category not in _CATEGORIES:
            raise ValueError(f"unknown message category {self.category!r}")
        if self.bit_len < 1:
            raise ValueError("messages carry at least one bit")
        if not 0 <= self.payload < (1 << self.bit_len):
            raise ValueError(
                f"payload {self.payload} does not fit in {self.bit_len} bits"
            )


def pack_fields(*fields, category: str = ALGORITHM) -> Message:
    """Pack (value, width) pairs MSB-first into one message."""
    payload, total = 0, 0
    for value, width in fields:
        if width < 1 or not 0 <= value < (1 << width):
            raise ValueError(f"value {value} does not fit in {width} bits")
        payload = (payload << width) | value
        total += width
    return Message(payload, total, category)


def unpack_fields(msg: Message, widths) -> tuple:
    widths = tuple(widths)
    if sum(widths) != msg.bit_len:
        raise ValueError("field widths do not add up to the message length")
    out, rest = [], msg.payload
    for width in reversed(widths):
        out.append(rest & ((1 << width) - 1))
        rest >>= width
    return tuple(reversed(out))


def _append_int(payload: int, bits: int, z: int) -> tuple:
    mag = abs(z)
    length = mag.bit_length()
    if length >= (1 << _LEN_FIELD):
        raise ValueError("integer too large for the rational wire format")
    payload = (payload << 1) | (1 if z < 0 else 0)
    payload = (payload << _LEN_FIELD) | length
    payload = (payload << length) | mag
    return payload, bits + 1 + _LEN_FIELD + length


def _read_int(payload: int, cursor: int) -> tuple:
    sign = (payload >> (cursor - 1)) & 1
    cursor -= 1
    length = (payload >> (cursor - _LEN_FIELD)) & ((1 << _LEN_FIELD) - 1)
    cursor -= _LEN_FIELD
    mag = (payload >> (cursor - length)) & ((1 << length) - 1) if length else 0
    cursor -= length
    return (-mag if sign else mag), cursor


def pack_fraction_pair(a: Fraction, b: Fraction) -> Message:
    """Encode two exact rationals; used by aggregation convergecasts."""
    payload, bits = 0, 0
    for z in (a.numerator, a.denominator, b.numerator, b.denominator):
        payload, bits = _append_int(payload, bits, z)
    return Message(payload, bits, AGGREGATION)


def unpack_fraction_pair(msg: Message) -> tuple:
    cursor = msg.bit_len
    parts = []
    for _ in range(4):
        z, cursor = _read_int(msg.payload, cursor)
        parts.append(z)
    if cursor != 0:
        raise ValueError("trailing bits in rational message")
    return Fraction(parts[0], parts[1]), Fraction(parts[2], parts[3])


@dataclass(frozen=True)
class BandwidthPolicy:
    """beta=None just measures; beta=k enforces k * ceil(log2 n) bits."""

    beta: int | None = None

    def limit_bits(self, n: int) -> int | None:
        if self.beta is None:
            return None
        return self.beta * max(1, (n - 1).bit_length())

    @classmethod
    def parse(cls, text: str) -> "BandwidthPolicy":
        if text == "measure":
            return cls()
        if text.startswith("strict:"):
            return cls(beta=int(text.split(":", 1)[1]))
        raise ValueError(f"bad bandwidth policy {text!r}")


def _per_category(value=0):
    return {c: value for c in _CATEGORIES}


@dataclass
class RunStats:
    rounds: int = 0
    messages: int = 0
    bits_by_category: dict = field(default_factory=_per_category)
    messages_by_category: dict = field(default_factory=_per_category)
    max_bits_by_category: dict = field(default_factory=_per_category)

    def add(self, other: "RunStats") -> None:
        self.rounds += other.rounds
        self.messages += other.messages
        for c in _CATEGORIES:
            self.bits_by_category[c] += other.bits_by_category[c]
            self.messages_by_category[c] += other.messages_by_category[c]
            self.max_bits_by_category[c] = max(
                self.max_bits_by_category[c], other.max_bits_by_category[c]
            )


class NodeProgram:
    def setup(self, ctx) -> None:
        pass

    def absorb(self, ctx) -> None:
        pass


class Ctx:
    __slots__ = ("_engine", "node", "neighbors", "inbox")

    def __init__(self, engine, node):
        self._engine = engine
        self.node = node
        self.neighbors = engine.graph.adj[node]
        self.inbox = {}

    @property
    def n(self) -> int:
        return self._engine.graph.n

    @property
    def round(self) -> int:
        return self._engine.round

    def send(self, to: int, msg: Message) -> None:
        self._engine.queue(self.node, to, msg)

    def halt(self) -> None:
        self._engine.alive.discard(self.node)

    def wake_at(self, round_no: int) -> None:
        self._engine.wake(self.node, round_no)


class _Engine:
    def __init__(self, graph, programs, policy, round_cap, trace):
        if len(programs) != graph.n:
            raise ProtocolError("need one program per node")
        self.graph = graph
        self.programs = programs
        self.policy = policy or BandwidthPolicy()
        self.limit = self.policy.limit_bits(graph.n)
        self.round_cap = round_cap
        self.trace = trace
        self.round = 0
        self.alive = set(range(graph.n))
        self.outbox = {}  # (src, dst) -> Message, delivered next round
        self.wakes = {}  # round -> set of nodes
        self.stats = RunStats()

    def queue(self, src: int, dst: int, msg: Message) -> None:
        if not isinstance(msg, Message):
            raise ProtocolError(f"node {src} sent a non-Message object")
        if dst not in self.graph.adj[src]:
            raise ProtocolError(f"node {src} has no edge to {dst}")
        if (src, dst) in self.outbox:
            raise ProtocolError(
                f"node {src} sent twice to {dst} in round {self.round + 1}"
            )
        if (
            self.limit is not None
            and msg.category == ALGORITHM
            and msg.bit_len > self.limit
        ):
            raise BandwidthError(self.round + 1, (src, dst), msg.bit_len, self.limit)
        self.outbox[(src, dst)] = msg

    def wake(self, node: int, round_no: int) -> None:
        if round_no <= self.round:
            raise ProtocolError(f"node {node} scheduled a wake in the past")
        self.wakes.setdefault(round_no, set()).add(node)

    def _pending(self) -> bool:
        for r in sorted(self.wakes):
            self.wakes[r] &= self.alive
            if not self.wakes[r]:
                del self.wakes[r]
        return bool(self.outbox) or bool(self.wakes)

    def run(self) -> RunStats:
        ctxs = [Ctx(self, v) for v in range(self.graph.n)]
        for v in range(self.graph.n):
            self.programs[v].setup(ctxs[v])
        while self._pending():
            self.round += 1
            if self.round_cap is not None and self.round > self.round_cap:
                raise RoundCapError(
                    f"round cap {self.round_cap} exceeded with work pending"
                )
            sent, self.outbox = self.outbox, {}
            deliveries = {}
            bits = _per_category()
            for (src, dst), msg in sent.items():
                deliveries.setdefault(dst, {})[src] = msg
                bits[msg.category] += msg.bit_len
                self.stats.messages += 1
                self.stats.messages_by_category[msg.category] += 1
                self.stats.bits_by_category[msg.category] += msg.bit_len
                self.stats.max_bits_by_category[msg.category] = max(
                    self.stats.max_bits_by_category[msg.category], msg.bit_len
                )
            scheduled = (set(deliveries) | self.wakes.pop(self.round, set()))
            for v in sorted(scheduled & self.alive):
                ctxs[v].inbox = deliveries.get(v, {})
                self.programs[v].absorb(ctxs[v])
                ctxs[v].inbox = {}
            self.stats.rounds += 1
            if self.trace is not None:
                self.trace(
                    {
                        "round": self.round,
                        "messages": len(sent),
                        "category_bits": bits,
                    }
                )
        if self.alive:
            v = min(self.alive)
            raise StallError(
                f"protocol stalled: node {v} and {len(self.alive) - 1} others "
                "are live with no pending deliveries or wakeups"
            )
        return self.stats


def run_protocol(
    graph, programs, *, policy=None, round_cap=None, trace=None
) -> RunStats:
    return _Engine(graph, list(programs), policy, round_cap, trace).run()


# ---------------------------------------------------------------------------
# BFS spanning forest


@dataclass
class BFSTree:
    root: int
    nodes: tuple
    parent: dict
    children: dict
    depth: dict
    height: int


class _BFSBuild(NodeProgram):
    def __init__(self, is_root: bool, width: int):
        self.is_root = is_root
        self.width = width
        self.dist = None
        self.parent = None
        self.kids = set()

    def _announce(self, ctx):
        # the root names itself in the parent slot; no neighbor matches it
        parent = ctx.node if self.parent is None else self.parent
        msg = pack_fields((self.dist, self.width), (parent, self.width))
        for u in ctx.neighbors:
            ctx.send(u, msg)

    def setup(self, ctx):
        if not self.is_root:
            return
        self.dist = 0
        if not ctx.neighbors:
            ctx.halt()
            return
        self._announce(ctx)
        ctx.wake_at(2)

    def absorb(self, ctx):
        if self.dist is None:
            senders = {}
            for u, msg in ctx.inbox.items():
                senders[u] = unpack_fields(msg, (self.width, self.width))
            assert all(d == ctx.round - 1 for d, _ in senders.values())
            self.dist = ctx.round
            self.parent = min(senders)
            self._announce(ctx)
            ctx.wake_at(ctx.round + 2)
        for u, msg in ctx.inbox.items():
            d, p = unpack_fields(msg, (self.width, self.width))
            if p == ctx.node and d == self.dist + 1:
                self.kids.add(u)
        if ctx.round == self.dist + 2:
            ctx.halt()


def build_bfs_forest(graph, *, roots=None, policy=None, round_cap=None, trace=None):
    """Grow one BFS tree per component; parents tie-break to the min id.

    Completes within eccentricity(root) + 2 rounds per component: one
    extra round for child announcements and one for the final wakeup.
    """
    comps = graph.components
    if roots is None:
        roots = [c[0] for c in comps]
    by_comp = {}
    for r in roots:
        for i, c in enumerate(comps):
            if r in c:
                if i in by_comp:
                    raise ValueError("two roots in one component")
                by_comp[i] = r
    if len(by_comp) != len(comps):
        raise ValueError("every component needs a root")
    width = max(1, (graph.n - 1).bit_length())
    root_set = set(roots)
    progs = [_BFSBuild(v in root_set, width) for v in range(graph.n)]
    stats = run_protocol(
        graph, progs, policy=policy, round_cap=round_cap, trace=trace
    )
    forest = []
    for i, comp in enumerate(comps):
        root = by_comp[i]
        depth = {v: progs[v].dist for v in comp}
        forest.append(
            BFSTree(
                root=root,
                nodes=comp,
                parent={v: progs[v].parent for v in comp},
                children={v: tuple(sorted(progs[v].kids)) for v in comp},
                depth=depth,
                height=max(depth.values()),
            )
        )
    forest.sort(key=lambda t: t.root)
    return tuple(forest), stats


# ---------------------------------------------------------------------------
# Tree convergecast / broadcast


class _SumPairs(NodeProgram):
    def __init__(self, parent, children, value):
        self.parent = parent
        self.children = set(children)
        self.acc = value
        self.total = None

    def _flush(self, ctx):
        if self.parent is None:
            self.total = self.acc
        else:
            ctx.send(self.parent, pack_fraction_pair(*self.acc))
        ctx.halt()

    def setup(self, ctx):
        if not self.children:
            self._flush(ctx)

    def absorb(self, ctx):
        for u, msg in ctx.inbox.items():
            a, b = unpack_fraction_pair(msg)
            self.acc = (self.acc[0] + a, self.acc[1] + b)
            self.children.discard(u)
        if not self.children:
            self._flush(ctx)


def aggregate_pairs(graph, forest, values, *, policy=None, round_cap=None, trace=None):
    """Sum (Fraction, Fraction) node values toward each tree root.

    Nodes missing from `values` contribute zero; finishes within the
    tree height because a node reports as soon as all children did.
    """
    zero = (Fraction(0), Fraction(0))
    progs = {}
    for tree in forest:
        for v in tree.nodes:
            val = values.get(v, zero)
            progs[v] = _SumPairs(tree.parent[v], tree.children[v], tuple(val))
    stats = run_protocol(
        graph,
        [progs[v] for v in sorted(progs)],
        policy=policy,
        round_cap=round_cap,
        trace=trace,
    )
    return {t.root: progs[t.root].total for t in forest}, stats


class _Relay(NodeProgram):
    def __init__(self, children, width, value=None):
        self.children = children
        self.width = width
        self.value = value

    def _forward(self, ctx):
        for u in self.children:
            ctx.send(u, Message(self.value, self.width))
        ctx.halt()

    def setup(self, ctx):
        if self.value is not None:
            self._forward(ctx)

    def absorb(self, ctx):
        (msg,) = ctx.inbox.values()
        self.value = msg.payload
        self._forward(ctx)


def broadcast_values(graph, forest, values, *, policy=None, round_cap=None, trace=None):
    """Push one (value, width) per root down its tree; rounds <= height."""
    progs = {}
    for tree in forest:
        value, width = values[tree.root]
        for v in tree.nodes:
            progs[v] = _Relay(
                tree.children[v], width, value if v == tree.root else None
            )
    stats = run_protocol(
        graph,
        [progs[v] for v in sorted(progs)],
        policy=policy,
        round_cap=round_cap,
        trace=trace,
    )
    return {v: p.value for v, p in progs.items()}, stats


class CommPlan:
    """Graph + spanning forest + policy bundle for a protocol sequence.

    Wraps the one-shot helpers so consecutive runs accumulate into one
    RunStats and share a cumulative round cap.
    """

    def __init__(self, graph, forest, *, policy=None, round_cap=None, trace=None):
        self.graph = graph
        self.forest = forest
        self.policy = policy
        self.round_cap = round_cap
        self.trace = trace
        self.stats = RunStats()

    @property
    def depth(self) -> int:
        return max((t.height for t in self.forest), default=0)

    def _kwargs(self):
        remaining = None
        if self.round_cap is not None:
            remaining = self.round_cap - self.stats.rounds
        return {"policy": self.policy, "round_cap": remaining, "trace": self.trace}

    def exchange(self, outgoing):
        inbox, stats = exchange(self.graph, outgoing, **self._kwargs())
        self.stats.add(stats)
        return inbox

    def aggregate(self, values):
        totals, stats = aggregate_pairs(self.graph, self.forest, values, **self._kwargs())
        self.stats.add(stats)
        return totals

    def broadcast(self, values):
        got, stats = broadcast_values(self.graph, self.forest, values, **self._kwargs())
        self.stats.add(stats)
        return got


class _OneShot(NodeProgram):
    def __init__(self, outgoing):
        self.outgoing = outgoing
        self.heard = {}

    def setup(self, ctx):
        for u, msg in self.outgoing.items():
            ctx.send(u, msg)
        ctx.wake_at(1)

    def absorb(self, ctx):
        self.heard = dict(ctx.inbox)
        ctx.halt()


def exchange(graph, outgoing, *, policy=None, round_cap=None, trace=None):
    """One round in which node v sends outgoing[v][u] to each u."""
    if not any(outgoing.get(v) for v in range(graph.n)):
        return {v: {} for v in range(graph.n)}, RunStats()
    progs = [_OneShot(outgoing.get(v, {})) for v in range(graph.n)]
    stats = run_protocol(
        graph, progs, policy=policy, round_cap=round_cap, trace=trace
    )
    return {v: progs[v].heard for v in range(graph.n)}, stats
