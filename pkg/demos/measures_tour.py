"""
Measures of a short sequence
============================

Normality, well-distribution and correlation of a few hand-picked and
random +-1 sequences, with the witness at which each maximum is attained.
"""

import numpy as np

from normwalk import measures
from normwalk.sequence import SeedSpec, parse_sequence, random_sequence

# the all-ones word of length 4 is as far from normal as 4 symbols get
E = parse_sequence("1111")
r = measures.normality_measure(E)
print("normality of 1111:", r.value, "attained at", r.witness)

# the same word along arithmetic progressions and lagged products
print("well-distribution:", measures.well_distribution_measure(E).value)
print("correlation, k=2 :", measures.correlation_measure(E, 2).value)

# for random sequences the normality measure grows like sqrt(N)
for N in (64, 256, 1024, 4096, 16384):
    vals = [float(measures.normality_measure(random_sequence(N, SeedSpec(1, i))).value) for i in range(50)]
    print(f"N={N:6d}  mean N(E)/sqrt(N) = {np.mean(vals) / np.sqrt(N):.3f}")

# while the best possible sequence of each length stays close to normal
for N in (4, 8, 12, 16):
    value, witness = measures.min_normality_exhaustive(N)
    print(f"N={N:2d}  smallest normality measure {value}  e.g. {''.join('1' if v > 0 else '0' for v in witness)}")
