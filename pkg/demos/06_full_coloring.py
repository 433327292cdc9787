"""
Degree+1 list coloring, start to finish
=======================================

Phases peel off a constant fraction of the nodes until none remain.
Everything below runs under the strict bandwidth policy, so no
algorithm message ever exceeds 8*ceil(log2 n) bits.
"""

from congestcolor.graphs import (
    attach_default_lists,
    generate_graph,
    verify_coloring,
)
from congestcolor.pipeline import list_color_full
from congestcolor.sim import ALGORITHM, BandwidthPolicy

g = generate_graph("gnp", {"n": 120, "p": 0.07}, rng_seed=4)
inst = attach_default_lists(g)
policy = BandwidthPolicy.parse("strict:8")

for mode in ("mis", "avoid-mis"):
    coloring, reports = list_color_full(inst, mode, policy=policy)
    assert verify_coloring(inst, coloring).ok
    print("--", mode)
    left = g.n
    for i, rep in enumerate(reports):
        left -= rep.nodes_colored
        print("   phase %d: colored %3d of %3d, %4d rounds, %d start classes"
              % (i, rep.nodes_colored, rep.nodes_at_start, rep.rounds,
                 rep.k_classes))
    total = sum(rep.rounds for rep in reports)
    peak = max(rep.stats.max_bits_by_category[ALGORITHM] for rep in reports)
    print("   done: %d phases, %d rounds, max message %d bits (cap %d)"
          % (len(reports), total, peak, policy.limit_bits(g.n)))
