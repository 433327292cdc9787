"""
Anatomy of one coloring phase
=============================

A phase fixes candidate colors bit by bit, then looks at who ended up
in little conflict.  In mis mode, nodes of conflict degree < 4 form a
bounded-degree graph and an independent set of them keeps its
candidate; at least 1/8 of the nodes get colored.  avoid-mis drives the
potential below n so low nodes form a matching and no MIS is needed.
"""

from dataclasses import replace

from congestcolor.graphs import attach_default_lists, generate_graph
from congestcolor.pipeline import color_fraction

g = generate_graph("regular", {"n": 48, "d": 4}, rng_seed=1)
inst = replace(attach_default_lists(g), psi=tuple(range(g.n)))

for mode in ("mis", "avoid-mis"):
    partial, rep = color_fraction(inst, mode)
    print("--", mode)
    print("   potential per level:", " -> ".join(str(f) for f in rep.phi_trace))
    print("   low nodes: %d of %d" % (len(rep.v_low), g.n))
    if rep.mis_size is not None:
        print("   independent set among them:", rep.mis_size)
    print("   colored %d nodes (needed %d) in %d rounds"
          % (rep.nodes_colored, -(-g.n // (8 if mode == "mis" else 4)),
             rep.rounds))
