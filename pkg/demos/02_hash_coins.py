"""
Pairwise independent coins from a two-word hash seed
====================================================

A seed is two elements of GF(2^m); color x hashes to the low b bits of
s1*x + s2.  Enumerating every seed shows the two properties the
derandomization leans on: exact marginals ceil(p*2^b)/2^b, and joint
factorization for any two distinct colors.
"""

from fractions import Fraction

from congestcolor.coins import (
    hash_eval,
    make_family,
    seed_from_int,
    threshold,
)

fam = make_family(K=8, b=3)
print("field GF(2^%d), seed space 2^%d" % (fam.m, fam.seed_bits))

seeds = [seed_from_int(fam, w) for w in range(1 << fam.seed_bits)]

p = Fraction(3, 7)
t = threshold(p, fam.b)
print("bias p = %s rounds to threshold %d/8" % (p, t))

for x in (1, 5):
    ones = sum(hash_eval(fam, s, x) < t for s in seeds)
    print("color %d: coin fires for %d of %d seeds = %s"
          % (x, ones, len(seeds), Fraction(ones, len(seeds))))

# joint law for two distinct colors: count seeds where both coins fire
x, y = 1, 5
both = sum(
    (hash_eval(fam, s, x) < t) and (hash_eval(fam, s, y) < t) for s in seeds
)
print("both fire for %d seeds = %s  (product of marginals is %s)"
      % (both, Fraction(both, len(seeds)), Fraction(t, 8) ** 2))

# the marginal is exact for every threshold because each hash value is
# hit by the same number of seeds
counts = [0] * (1 << fam.b)
for s in seeds:
    counts[hash_eval(fam, s, x)] += 1
print("hash value histogram for color %d:" % x, counts)
