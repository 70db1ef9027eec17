"""Karhunen-Loeve paths and the mean-norm probe.

Each sample j draws its coefficients from its own Philox stream keyed by
(seed, j), so runs are reproducible bit for bit.
"""
import numpy as np

from pathrkhs import decompose, gauss_legendre, kl_sample, make_matern, make_wiener, norm_stats

d = decompose(make_wiener(), gauss_legendre(1024))
paths = kl_sample(d, N=256, seed=0, count=2000)

# covariance check: E X_s X_t = min(s, t)
X = np.stack([p.node_values() for p in paths])
x = d.rule.nodes[:, 0]
for i, j in [(100, 700), (300, 900), (512, 512)]:
    print(f"E X({x[i]:.3f}) X({x[j]:.3f}) ~ {np.mean(X[:, i] * X[:, j]):.4f}   min = {min(x[i], x[j]):.4f}")

# squared H^beta norms: their mean is sum_{i<=N} mu_i^(1 - beta)
for name, dec in [("Wiener", d), ("Matern-3/2", decompose(make_matern(1.5), gauss_legendre(1024)))]:
    s = norm_stats(kl_sample(dec, N=256, seed=1, count=500), dec, 0.5)
    growth = [round(v, 4) for _, v in s.mean_growth]
    print(f"{name}: mean {s.mean:.3f} vs theory {s.theoretical_mean:.3f}; theory by dyadic N {growth}")
# Wiener grows by about (1/pi) ln 2 per doubling without bound; Matern-3/2 levels off

print(paths[0].to_csv().splitlines()[:3])
