"""
Exit probabilities: lattice walk against Brownian motion
========================================================

The normalised block walk converges to a Gaussian process with the same
covariance.  Estimate the probability of leaving the polytope both ways.
"""

import numpy as np

from normwalk import walk

d, samples = 2, 2000
lattice = walk.lattice_walk_maxima(d, 1 << 12, samples, seed=1)
gauss = walk.gaussian_path_maxima(d, 512, samples, seed=2, monitor=(128,))

for t in (0.5, 0.75, 1.0, 1.5):
    p_l = np.mean(lattice > t)
    p_g = np.mean(gauss[512] > t)
    p_c = np.mean(gauss[128] > t)
    print(f"t={t:4}: lattice {p_l:.3f}   gaussian R=512 {p_g:.3f}   R=128 {p_c:.3f}")

# a coarser grid looks at the same paths less often and so sees fewer exits
model = walk.covariance_model(d)
print("increment covariance:\n", model.sigma)
