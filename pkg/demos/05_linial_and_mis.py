"""
Color reduction and the color-class MIS sweep
=============================================

linial_reduce trades n id-classes for O(Delta^2 log^2 Delta) classes
in log* time; mis_by_colors then sweeps the classes, one round each,
to extract a maximal independent set.
"""

from congestcolor.graphs import generate_graph
from congestcolor.linial import (
    linial_fixpoint,
    linial_reduce,
    log_star,
    mis_by_colors,
)

g = generate_graph("regular", {"n": 300, "d": 3}, rng_seed=2)
print("n = %d, max degree %d, id classes = %d" % (g.n, g.max_degree, g.n))
print("fixpoint bound for (K=%d, Delta=%d): %d classes, log*2(%d)+4 = %d steps"
      % (g.n, g.max_degree, linial_fixpoint(g.n, g.max_degree), g.n,
         log_star(g.n) + 4))

colors, stats = linial_reduce(g)
classes = max(colors) + 1
print("reduced to %d classes in %d rounds" % (classes, stats.rounds))
assert all(colors[u] != colors[v] for u, v in g.edge_list)

mis, stats = mis_by_colors(g, colors)
print("MIS of size %d (n/4 = %.0f) in %d more rounds"
      % (len(mis), g.n / 4, stats.rounds))

covered = set(mis)
for v in mis:
    covered.update(g.adj[v])
print("dominates all %d nodes:" % g.n, len(covered) == g.n)
