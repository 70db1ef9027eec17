"""Power kernels k^beta = sum mu_i^beta e_i (x) e_i.

For beta < 1 the RKHS of k^beta is larger than that of k. It carries the paths
when sum mu_i^(1 - beta) is finite and k^beta stays finite on the domain.
"""
import numpy as np

from pathrkhs import decompose, gauss_legendre, make_matern, make_wiener, power_kernel
from pathrkhs.spectral import power_eval

rule = gauss_legendre(1024)

# Wiener at t = 1: sum_i sqrt(mu_i) e_i(1)^2 = (4/pi) sum 1/(2i-1), a harmonic series
w = decompose(make_wiener(), rule)
for N in (32, 64, 128, 256):
    pk = power_kernel(w, 0.5, N=N, grid=[1.0])
    print(f"Wiener k^1/2(1,1), N={N:3d}: {power_eval(pk, 1.0, 1.0):.4f}")
print("monitor:", power_kernel(w, 0.5, grid=[1.0]).monitor.summary())

# Matern-3/2: mu_i ~ i^-4, so beta = 1/2 is comfortably summable
m = decompose(make_matern(1.5), rule)
pk = power_kernel(m, 0.5)
print("Matern-3/2 monitor converged:", pk.monitor.converged)
print("k^1/2(t,t) on a few grid points:", np.round(pk.monitor.diagonal[::16], 4))

# beta = 1 with every trusted eigenpair rebuilds the kernel on the nodes
full = power_kernel(m, 1.0, N=m.floor_index, grid=[0.5])
err = np.abs(full.gram(rule.nodes) - m.kernel.gram(rule.nodes)).max()
print(f"Mercer reconstruction error on nodes: {err:.1e}")
