"""Exact spectra: stationary kernels on the circle and tensor products.

On the circle the characters diagonalize every stationary kernel, so the FFT of
one Gram row yields the spectrum. For products the spectrum is all products
of factor eigenvalues, and sum sqrt(mu) factorizes.
"""
import numpy as np

from pathrkhs import (circle_uniform, decompose, fft_spectrum, gauss_legendre, make_circle_kernel,
                      make_matern, nystrom_decompose, tensor_verdict)

k = make_circle_kernel(decay=4.0, n_terms=127)
f = fft_spectrum(k, 256)
n = nystrom_decompose(k, circle_uniform(256))
print("FFT eigenvalues:", np.round(f.eigenvalues[:5], 8))
print("closed form    :", np.round(k.known_spectrum(5), 8))
print(f"FFT vs dense eigensolver: {np.max(np.abs(f.eigenvalues - n.eigenvalues)):.1e}")
print(f"sum sqrt(mu) = {np.sum(np.sqrt(k.known_spectrum(10**6))):.5f}, pi^2/3 = {np.pi**2 / 3:.5f}")

factor = decompose(make_matern(1.5), gauss_legendre(1024))
for d in (2, 5):
    v = tensor_verdict(factor, d, budget=8)
    print(f"Matern-3/2 tensor, d={d}: {v.decision}, leading products {np.round(v.extras['tensor_spectrum'][:4], 5)}")
