"""Which classical processes admit an RKHS of bounded functions holding their paths?

The answer hinges on sum_i sqrt(mu_i): finite means yes (given bounded
eigenfunctions), infinite means no. Decay mu_i ~ i^-rho puts the boundary at rho = 2.
"""
from pathrkhs import (make_brownian_bridge, make_circle_kernel, make_fbm, make_matern, make_ou,
                      make_wiener, rkhs_path_verdict)

cases = [
    ("Wiener", make_wiener()),
    ("Brownian bridge", make_brownian_bridge()),
    ("Ornstein-Uhlenbeck", make_ou(1)),
    ("OU started at 0", make_ou(2)),
    ("fBm, Hurst 0.25", make_fbm(0.25)),
    ("fBm, Hurst 0.75", make_fbm(0.75)),
    ("Matern 0.25", make_matern(0.25)),
    ("Matern 1.5", make_matern(1.5)),
    ("circle, c_n = n^-1.5", make_circle_kernel(decay=1.5)),
    ("circle, c_n = n^-4", make_circle_kernel(decay=4.0)),
]

print(f"{'process':<22} {'rho':>6}  {'decision':<11} beta window")
for name, kernel in cases:
    v = rkhs_path_verdict(kernel)
    window = "" if v.beta_window is None else f"[{v.beta_window[0]:.2f}, {v.beta_window[1]:.3f}]"
    print(f"{name:<22} {v.rho_evidence.rho:6.3f}  {v.decision:<11} {window}")

# Wiener sits exactly on the boundary (rho = 2), so the exponent test alone cannot
# decide it; the closed-form spectrum settles it through its partial sums
v = rkhs_path_verdict(make_wiener())
for note in v.notes:
    print(" -", note)
print("partial sums of sqrt(mu):", [(N, round(s, 4)) for N, s in v.partial_sums])

# the fBm family switches at Hurst index 1/2
for alpha in (0.35, 0.45, 0.55, 0.65):
    print(f"fBm({alpha}):", rkhs_path_verdict(make_fbm(alpha)).decision)
