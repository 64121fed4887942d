"""
The limit distribution of N(E)/sqrt(N)
======================================

Sample the normalised normality measure at growing N, look at quantiles,
and compare the empirical distributions with the KS distance.
"""

from normwalk.montecarlo import ks_critical_value, ks_distance, sample_distribution

S = 500
ecdfs = {N: sample_distribution("normality", N, S, seed=N) for N in (256, 1024, 4096)}
for N, e in ecdfs.items():
    q = e.quantile([0.05, 0.5, 0.95])
    print(f"N={N:5d}  5%={q[0]:.3f}  median={q[1]:.3f}  95%={q[2]:.3f}")

print("KS(256, 4096)  =", round(ks_distance(ecdfs[256], ecdfs[4096]), 4))
print("KS(1024, 4096) =", round(ks_distance(ecdfs[1024], ecdfs[4096]), 4))
print("99% critical value for two samples of", S, "=", round(ks_critical_value(S, S), 4))

# the restricted measure at d=8 sits within the sandwich gap of the full one, visibly shifted at this N
r = sample_distribution("restricted", 4096, S, seed=4096, d=8)
print("KS(full, restricted d=8) at N=4096 =", round(ks_distance(ecdfs[4096], r), 4))
