"""
Clustered coloring through a network decomposition
==================================================

Ball carving yields O(log n) cluster colors with O(log n) diameter
trees.  Same-color clusters never touch, so they color in parallel;
classes run one after the other, each cluster's lists pruned by what
its neighbors already locked in.
"""

from congestcolor.decomposition import (
    color_with_decomposition,
    generate_decomposition,
    validate_decomposition,
)
from congestcolor.graphs import (
    attach_default_lists,
    generate_graph,
    verify_coloring,
)

g = generate_graph("gnp", {"n": 150, "p": 0.04}, rng_seed=6)
decomp = generate_decomposition(g)
print("alpha = %d colors, beta = %d diameter, kappa = %d  (4*ceil(log2 n) = %d)"
      % (decomp.alpha, decomp.beta, decomp.kappa,
         4 * max(1, (g.n - 1).bit_length())))
print("validator:", validate_decomposition(g, decomp) or "clean")

sizes = sorted((len(c.nodes) for c in decomp.clusters), reverse=True)
print("%d clusters, largest %d nodes" % (len(sizes), sizes[0]))

inst = attach_default_lists(g)
coloring, report = color_with_decomposition(inst, decomp)
assert verify_coloring(inst, coloring).ok
for rec in report.classes:
    print("class %d: %2d clusters, slowest %4d rounds, charged %4d"
          % (rec.color, len(rec.clusters), rec.slowest, rec.rounds))
print("total %d rounds, measured kappa %d" % (report.rounds, report.kappa))
