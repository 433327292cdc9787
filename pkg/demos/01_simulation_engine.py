"""
Running a hand-written protocol on the synchronous engine
=========================================================

Every node relays the smallest id it has seen.  Nodes know an upper
bound on the diameter (a standard synchronous assumption), flood for
that many rounds, and halt; the engine counts rounds, messages and
bits for us.
"""

from congestcolor.graphs import generate_graph
from congestcolor.sim import BandwidthPolicy, Message, NodeProgram, run_protocol


class MinFlood(NodeProgram):
    def __init__(self, horizon):
        self.horizon = horizon

    def setup(self, ctx):
        self.best = ctx.node
        self.width = max(1, (ctx.n - 1).bit_length())
        if self.horizon == 0 or not ctx.neighbors:
            ctx.halt()
            return
        for u in ctx.neighbors:
            ctx.send(u, Message(self.best, self.width))

    def absorb(self, ctx):
        self.best = min(self.best, min(m.payload for m in ctx.inbox.values()))
        if ctx.round >= self.horizon:
            ctx.halt()
            return
        for u in ctx.neighbors:
            ctx.send(u, Message(self.best, self.width))


g = generate_graph("gnp", {"n": 40, "p": 0.12}, rng_seed=3)
progs = [MinFlood(g.diameter) for _ in range(g.n)]
stats = run_protocol(g, progs)

print("graph: n =", g.n, " max degree =", g.max_degree, " diameter =", g.diameter)
print("every node agrees on", {p.best for p in progs})
print("rounds =", stats.rounds, " messages =", stats.messages)
print("bits by category:", dict(stats.bits_by_category))

# the same protocol under a strict bandwidth cap: each algorithm message
# may carry at most beta * ceil(log2 n) bits
policy = BandwidthPolicy.parse("strict:8")
print("strict:8 cap for n=40 is", policy.limit_bits(g.n), "bits per message")
stats = run_protocol(g, [MinFlood(g.diameter) for _ in range(g.n)], policy=policy)
print("ran clean under the cap; max message =",
      stats.max_bits_by_category["algorithm"], "bits")
