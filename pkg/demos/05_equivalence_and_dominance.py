"""Finite-rank kernel differences and nuclear dominance.

Kernels differing by a finite-rank term have essentially equal RKHSs, and their
Gram differences have a fixed numerical rank as the grid is refined. Nuclear
dominance of H2 over H1 shows up as a bounded trace tr(K1 K2^-1).
"""
import math

from pathrkhs import (dominance_trace, finite_rank_difference, gauss_legendre, make_brownian_bridge,
                      make_circle_kernel, make_matern, make_ou, make_wiener)

grid = gauss_legendre(64)
for a, b in [(make_wiener(), make_brownian_bridge()), (make_ou(1), make_ou(2)),
             (make_wiener(), make_matern(0.5))]:
    rep = finite_rank_difference(a, b, grid)
    print(f"{a.name} - {b.name}: {rep.to_json()}")

smooth = make_circle_kernel(decay=4.0, c0=1.0)
rough = make_circle_kernel(decay=2.0, c0=1.0)
rep = dominance_trace(smooth, rough)
print("traces", [round(t, 4) for t in rep.traces], "bounded", rep.bounded)
print(f"exact {rep.exact_trace:.6f} = 1 + pi^2/3 = {1 + math.pi**2 / 3:.6f}")

rep = dominance_trace(make_circle_kernel(decay=3.0, c0=1.0), make_circle_kernel(decay=2.5, c0=1.0))
print("n^-3 over n^-2.5:", [round(t, 2) for t in rep.traces], "bounded", rep.bounded)
