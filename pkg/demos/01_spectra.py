"""Spectra of the Wiener and Brownian-bridge covariance operators.

Both have closed-form eigenvalues, which makes them good yardsticks for the
Nystrom discretization.
"""
import numpy as np

from pathrkhs import decompose, estimate_decay, gauss_legendre, make_brownian_bridge, make_wiener

rule = gauss_legendre(1024)

# Wiener: mu_i = (2 / ((2i - 1) pi))^2
wiener = make_wiener()
d = decompose(wiener, rule)
exact = wiener.known_spectrum(32)
rel = np.abs(d.eigenvalues[:32] / exact - 1)
print("Wiener, GL n=1024")
for i in (1, 2, 4, 8, 16, 32):
    print(f"  i={i:2d}  nystrom {d.eigenvalues[i - 1]:.10f}  exact {exact[i - 1]:.10f}  rel {rel[i - 1]:.1e}")

# the relative error grows like ((2i - 1) / n)^2, the quadrature error of a kinked kernel
print("  rel err / ((2i-1)/n)^2 at i=8, 16, 32:",
      np.round(rel[[7, 15, 31]] / ((2 * np.array([8, 16, 32]) - 1) / 1024) ** 2, 3))

# power-law fit over the trusted window
est = estimate_decay(d)
print(f"  fitted decay rho = {est.rho:.4f} +- {est.rho_ci:.4f} over i in {est.window}")

# Brownian bridge: mu_i = 1 / (pi i)^2 with eigenfunctions sqrt(2) sin(pi i t)
bridge = make_brownian_bridge()
b = decompose(bridge, rule)
print("Brownian bridge, first five:", np.round(b.eigenvalues[:5] * np.pi**2, 6), "x pi^-2")

# eigenfunctions extend off the grid by the Nystrom formula
t = np.linspace(0, 1, 5)
print("Wiener e_1 at", t, "->", np.round(d.eigenfunctions(t, 1)[:, 0], 4))
print("analytic      ", np.round(np.sqrt(2) * np.sin(np.pi * t / 2), 4))

# spectrum CSV, ready to plot
print(d.to_csv().splitlines()[:3])
