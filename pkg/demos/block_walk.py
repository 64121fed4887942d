"""
From blocks to a random walk
============================

Cut a sequence into blocks of length d.  Every block moves a walk in
2^d dimensions, and the restricted normality measure is the largest
projection of that walk onto the pattern weight vectors.
"""

import numpy as np

from normwalk import restricted, walk
from normwalk.measures import normality_measure
from normwalk.sequence import SeedSpec, random_sequence

d = 3
table = walk.build_weight_table(d)
print("weight table for d=3:", table.n_rows, "patterns x", table.n_blocks, "blocks")
print("row sums:", table.weights.sum(axis=1)[:6], "...")

E = random_sequence(3 * 512, SeedSpec(7, 0))
path = walk.walk_path(E, d)              # integer positions, scaled by 2^d
print("walk after 512 steps (scaled):", path[-1])

value = restricted.restricted_normality_measure(E, d).value
peak = walk.walk_exit_profile(E, d).max() / 2**d
print("restricted measure:", value, " largest walk projection:", peak)

# the two agree for every threshold t
for t in (0.25, 0.5, 1.0):
    exited, step = walk.walk_exits(E, d, t)
    print(f"t={t}: exits={exited} (first step {step}), measure > t sqrt(N): {float(value) > t * np.sqrt(len(E))}")

# the restricted measure brackets the full one
b = restricted.sandwich_bounds(E, d)
print(f"{float(b.lower):.2f} <= N(E) = {float(normality_measure(E).value):.2f} <= {float(b.upper):.2f}")
