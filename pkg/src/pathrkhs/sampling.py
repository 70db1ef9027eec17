"""Karhunen-Loeve path sampling and Monte-Carlo norm probes.

Random numbers
--------------
Sample ``j`` drawn with seed ``s`` uses its own Philox-4x64 counter-based
stream keyed by ``(s, j)``, so samples can be generated in any order or in
parallel and still come out identical. Each 64-bit output ``b`` becomes the
uniform ``u = ((b >> 11) + 0.5) * 2^-53`` in ``(0, 1)`` and the Gaussian
variate is ``Phi^-1(u)`` (``scipy.special.ndtri``). The coefficients of a
sample are the first ``N`` variates of its stream.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ParameterError, UsageError
from .kernels import as_points

PRNG = "philox4x64(key=(seed, sample_index)); gaussian = ndtri(((bits >> 11) + 0.5) * 2**-53)"


def _stream(seed, index):
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    key = np.array([seed, int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normals(seed, index, count):
    bits = _stream(seed, index).integers(0, 2**64, size=count, dtype=np.uint64, endpoint=False)
    u = ((bits >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53
    return special.ndtri(u)


@dataclass(frozen=True, eq=False)
class PathSample:
    """One truncated Karhunen-Loeve path ``t -> sum_{i<N} sqrt(mu_i) xi_i e_i(t)``."""

    coefficients: np.ndarray
    truncation: int
    seed: int
    index: int
    source: object

    def __call__(self, t):
        E = self.source.eigenfunctions(t, self.truncation)
        scale = np.sqrt(self.source.eigenvalues[:self.truncation])
        out = E @ (scale * self.coefficients)
        return float(out[0]) if np.ndim(t) == 0 else out

    def node_values(self):
        """Path values at the quadrature nodes, straight from the stored eigenvectors."""
        src = self.source
        N = self.truncation
        return src.coeffs[:, :N] @ (np.sqrt(src.eigenvalues[:N]) * self.coefficients)

    def to_csv(self, t=None):
        """``t,value`` lines at the quadrature nodes (default, 1-d only) or at ``t``."""
        if t is None:
            pts = self.source.rule.nodes
            values = self.node_values()
        else:
            pts = as_points(t, self.source.rule.dimension).reshape(-1, self.source.rule.dimension)
            values = self(pts)
        if pts.shape[1] != 1:
            raise UsageError("path CSV export is one-dimensional", module="sampling")
        lines = ["t,value"] + [f"{x:.17g},{v:.17g}" for x, v in zip(pts[:, 0], values)]
        return "\n".join(lines) + "\n"


def kl_sample(decomp, N=None, seed=0, count=1):
    """Draw ``count`` truncated Karhunen-Loeve paths from a spectral decomposition."""
    N = decomp.trust_index if N is None else int(N)
    if not 1 <= N <= decomp.floor_index:
        raise ParameterError(f"truncation {N} outside [1, floor_index={decomp.floor_index}]",
                             module="sampling", operation="kl_sample")
    if int(count) != count or count < 1:
        raise ParameterError("count must be a positive integer", module="sampling",
                             operation="kl_sample")
    samples = []
    for j in range(int(count)):
        xi = standard_normals(seed, j, N)
        xi.setflags(write=False)
        samples.append(PathSample(xi, N, int(seed), j, decomp))
    return samples


@dataclass(frozen=True)
class NormStats:
    """Truncated squared norms ``sum_{i<N} mu_i^(1-beta) xi_i^2`` in the power RKHS."""

    beta: float
    truncation: int
    norms: np.ndarray
    mean: float
    variance: float
    theoretical_mean: float
    band: float
    mean_growth: list
    heuristic: bool = True

    @property
    def within_band(self):
        return abs(self.mean - self.theoretical_mean) <= self.band

    def to_json(self):
        return {
            "beta": self.beta,
            "truncation": self.truncation,
            "count": int(self.norms.size),
            "norms": self.norms.tolist(),
            "mean": self.mean,
            "variance": self.variance,
            "theoretical_mean": self.theoretical_mean,
            "band": self.band,
            "within_band": bool(self.within_band),
            "mean_growth": [[int(N), float(v)] for N, v in self.mean_growth],
            "heuristic": self.heuristic,
            "prng": PRNG,
        }


def norm_stats(samples, decomp, beta):
    """Monte-Carlo squared ``H^beta`` norms of truncated paths.

    The expected value is ``sum_{i<N} mu_i^(1-beta)``; its growth across dyadic
    ``N`` (``mean_growth``) probes whether the untruncated norm can be finite.
    The probe only sees truncated paths and is a heuristic.
    """
    if not samples:
        raise UsageError("no samples", module="sampling", operation="norm_stats")
    N = samples[0].truncation
    if any(s.truncation != N for s in samples):
        raise UsageError("samples have different truncations", module="sampling",
                         operation="norm_stats")
    beta = float(beta)
    if not 0 < beta <= 1:
        raise ParameterError(f"beta must lie in (0, 1], got {beta}", module="sampling",
                             operation="norm_stats")
    weights = decomp.eigenvalues[:N] ** (1.0 - beta)
    xi = np.stack([s.coefficients for s in samples])
    norms = (xi**2) @ weights
    m = norms.size
    theo = float(weights.sum())
    band = 4.0 * np.sqrt(2.0 * np.sum(weights**2) / m)
    csum = np.cumsum(decomp.eigenvalues[:decomp.floor_index] ** (1.0 - beta))
    growth = []
    n = 16
    while n <= N:
        growth.append((n, float(csum[n - 1])))
        n *= 2
    return NormStats(beta, N, norms, float(norms.mean()),
                     float(norms.var(ddof=1)) if m > 1 else 0.0, theo, float(band), growth)
