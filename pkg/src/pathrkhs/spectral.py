"""Spectra of kernel integral operators.

``T f = int k(., t) f(t) dnu(t)`` is discretized by the Nystrom method: with
nodes ``x_j`` and weights ``w_j`` the symmetric matrix ``W^1/2 K W^1/2`` has the
same eigenvalues as the discrete operator, and its eigenvectors ``v_i`` give
eigenfunction values ``e_i(x_j) = v_ij / sqrt(w_j)`` that are orthonormal in
``L2(nu)``. Off the nodes the eigenfunctions are extended by

    e_i(t) = mu_i^-1 sum_j w_j k(t, x_j) e_i(x_j).

Stationary kernels on the circle are diagonalized exactly by the FFT instead.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .domain import CIRCLE
from .errors import (DefinitenessError, DegenerateEigenvalueError, ParameterError,
                     UsageError)
from .kernels import EPS_PSD, as_points
from .quadrature import CIRCLE_UNIFORM, circle_uniform

EPS_FLOOR = 1e-12
DECAY_FACTOR = 1.1


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of the discretized integral operator.

    ``eigenvalues`` are nonincreasing with small negative round-off clamped to
    zero (``n_clamped`` of them). Column ``i`` of ``coeffs`` holds the values of
    the ``i``-th eigenfunction at the quadrature nodes. Indices are 0-based.
    ``floor_index`` counts the eigenvalues above ``EPS_FLOOR * mu_1``; only
    those are used for fits, extensions and truncations.
    """

    rule: object
    eigenvalues: np.ndarray
    coeffs: np.ndarray
    kernel: object
    floor_index: int
    n_clamped: int = 0
    method: str = "nystrom"

    @property
    def size(self):
        return self.eigenvalues.shape[0]

    @property
    def trust_index(self):
        """Default truncation: the Nystrom trust zone ``min(floor_index, n // 4)``."""
        return min(self.floor_index, self.size // 4)

    @property
    def sqrt_eigenvalues(self):
        """Singular numbers of the embedding of the RKHS into ``L2(nu)``."""
        return np.sqrt(self.eigenvalues)

    def eigenfunctions(self, t, count=None):
        """Nystrom-extended values ``e_i(t)``, shape ``(len(t), count)``."""
        count = self.floor_index if count is None else int(count)
        if count > self.floor_index:
            raise DegenerateEigenvalueError(
                f"eigenfunction {count - 1} lies beyond the eigenvalue floor "
                f"(floor_index={self.floor_index})", module="spectral", operation="nystrom_extend")
        d = self.rule.dimension
        pts = as_points(t, d).reshape(-1, d)
        K = self.kernel.gram(pts, self.rule.nodes)
        return (K * self.rule.weights) @ self.coeffs[:, :count] / self.eigenvalues[:count]

    def to_csv(self, path=None):
        """Spectrum export ``i,mu,sqrt_mu`` with 1-based indices, kept eigenvalues only."""
        lines = ["i,mu,sqrt_mu"]
        for i, mu in enumerate(self.eigenvalues[:self.floor_index], start=1):
            lines.append(f"{i},{mu:.17g},{np.sqrt(mu):.17g}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _finalize(kernel, rule, mu, coeffs, method):
    top = mu[0]
    if not top > 0:
        raise DefinitenessError(f"{kernel.name} has no positive eigenvalue on {_label(rule)}",
                                module="spectral", operation=method)
    if mu[-1] < -EPS_PSD * top:
        raise DefinitenessError(
            f"{kernel.name} is not positive semidefinite on {_label(rule)}: "
            f"eigenvalue {mu[-1]:.3e} below -{EPS_PSD:g} * {top:.3e}",
            module="spectral", operation=method)
    negative = mu < 0
    mu = np.where(negative, 0.0, mu)
    # sign convention: the largest-magnitude node value of each eigenfunction is positive
    peak = coeffs[np.argmax(np.abs(coeffs), axis=0), np.arange(coeffs.shape[1])]
    coeffs = coeffs * np.where(peak < 0, -1.0, 1.0)
    floor = int(np.count_nonzero(mu > EPS_FLOOR * top))
    mu.setflags(write=False)
    coeffs.setflags(write=False)
    return SpectralDecomposition(rule, mu, coeffs, kernel, floor, int(negative.sum()), method)


def _label(rule):
    return f"{rule.scheme} grid with {rule.size} nodes"


def nystrom_decompose(kernel, rule):
    """Full Nystrom eigendecomposition of ``kernel`` under the measure ``rule``."""
    if rule.dimension != kernel.dimension:
        raise UsageError("rule and kernel dimensions differ", module="spectral",
                         operation="nystrom_decompose")
    if not np.all(kernel.domain.contains(rule.nodes)):
        raise UsageError(f"quadrature nodes outside the domain of {kernel.name}",
                         module="spectral", operation="nystrom_decompose")
    K = kernel.gram(rule.nodes)
    K = 0.5 * (K + K.T)
    sw = np.sqrt(rule.weights)
    A = sw[:, None] * K * sw[None, :]
    try:
        mu, V = linalg.eigh(A)
    except linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigensolver failed: {exc}") from exc
    mu = mu[::-1].copy()
    coeffs = V[:, ::-1] / sw[:, None]
    return _finalize(kernel, rule, mu, coeffs, "nystrom_decompose")


def nystrom_extend(decomp, i, t):
    """Value of the ``i``-th (0-based) eigenfunction at ``t``."""
    if not 0 <= i < decomp.floor_index:
        raise DegenerateEigenvalueError(
            f"index {i} is at or beyond floor_index {decomp.floor_index}",
            module="spectral", operation="nystrom_extend")
    scalar = np.ndim(t) == 0 or (decomp.rule.dimension > 1 and np.ndim(t) == 1)
    values = decomp.eigenfunctions(t, i + 1)[:, i]
    return float(values[0]) if scalar else values


def fft_spectrum(kernel, n):
    """Exact diagonalization of a stationary circle kernel on ``n`` equispaced nodes.

    The Gram matrix is circulant, so the eigenvalues of ``K / n`` are the DFT of
    its first row divided by ``n`` and the eigenvectors are sampled characters,
    returned as real pairs ``sqrt(2) cos``, ``sqrt(2) sin``.
    """
    if kernel.domain.kind != CIRCLE or not kernel.stationary:
        raise UsageError("fft_spectrum needs a stationary kernel on the circle",
                         module="spectral", operation="fft_spectrum")
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ParameterError(f"n must be a power of two, got {n}", module="spectral",
                             operation="fft_spectrum")
    rule = circle_uniform(n)
    x = rule.nodes[:, 0]
    row = kernel(x, 0.0)
    lam = np.fft.rfft(row).real / n
    values, vectors = [lam[0]], [np.ones(n)]
    for m in range(1, n // 2):
        phase = 2.0 * np.pi * m * x
        values += [lam[m], lam[m]]
        vectors += [np.sqrt(2.0) * np.cos(phase), np.sqrt(2.0) * np.sin(phase)]
    values.append(lam[n // 2])
    vectors.append(np.cos(np.pi * np.arange(n)))
    values = np.asarray(values)
    order = np.argsort(-values, kind="stable")
    mu = values[order]
    coeffs = np.stack(vectors, axis=1)[:, order]
    return _finalize(kernel, rule, mu, coeffs, "fft_spectrum")


def decompose(kernel, rule):
    """FFT path for stationary circle kernels on equispaced power-of-two grids, Nystrom otherwise."""
    n = rule.size
    if (kernel.domain.kind == CIRCLE and kernel.stationary and rule.scheme == CIRCLE_UNIFORM
            and n >= 2 and not n & (n - 1)):
        return fft_spectrum(kernel, n)
    return nystrom_decompose(kernel, rule)


# ---------------------------------------------------------------- power kernels

@dataclass(frozen=True, eq=False)
class ConvergenceMonitor:
    """Dyadic tail increments of ``sum_i mu_i^beta e_i(t)^2`` on a reference grid.

    ``increments[p, b]`` is the block sum over ``block_edges[b] <= i < block_edges[b+1]``
    at grid point ``p``. A sequence of increments counts as converging when it
    shrinks by at least ``DECAY_FACTOR`` per doubling over the last two blocks;
    increments that are negligible against the diagonal are converged outright.
    The grid-level verdict uses the sup over the grid of each block increment.
    """

    grid: np.ndarray
    block_edges: tuple
    increments: np.ndarray
    point_factors: np.ndarray
    point_converged: np.ndarray
    sup_increments: np.ndarray
    decay_factor: float
    converged: bool
    diagonal: np.ndarray

    def summary(self):
        return {
            "block_edges": list(self.block_edges),
            "sup_increments": self.sup_increments.tolist(),
            "decay_factor": self.decay_factor,
            "converged": bool(self.converged),
            "points_flagged_divergent": int(np.count_nonzero(~self.point_converged)),
            "n_points": int(self.grid.shape[0]),
        }


def _decay(first, last, scale):
    """Per-doubling shrink factor of two increments two doublings apart."""
    tiny = 1e-13 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.sqrt(first / last)
    negligible = last <= tiny
    factor = np.where(negligible, np.inf, factor)
    return factor, negligible | (factor >= DECAY_FACTOR)


def monitor_from_values(mu, egrid, beta, N, grid, exhausted=False):
    """Build a :class:`ConvergenceMonitor` from eigenvalues and grid eigenfunction values."""
    terms = (mu[:N] ** beta)[None, :] * egrid[:, :N] ** 2
    diagonal = terms.sum(axis=1)
    if N < 8:
        edges = (0, N)
        inc = diagonal[:, None]
        factors = np.full(grid.shape[0], np.inf if exhausted else np.nan)
        ok = np.full(grid.shape[0], bool(exhausted))
        sup = inc.max(axis=0)
        return ConvergenceMonitor(grid, edges, inc, factors, ok, sup,
                                  float(np.inf if exhausted else np.nan), bool(exhausted), diagonal)
    edges = (N // 8, N // 4, N // 2, N)
    inc = np.stack([terms[:, a:b].sum(axis=1) for a, b in zip(edges[:-1], edges[1:])], axis=1)
    scale = max(float(diagonal.max()), np.finfo(float).tiny)
    factors, ok = _decay(inc[:, 0], inc[:, -1], scale)
    sup = inc.max(axis=0)
    factor, sup_ok = _decay(sup[0], sup[-1], scale)
    return ConvergenceMonitor(grid, edges, inc, factors, ok, sup, float(factor),
                              bool(sup_ok or exhausted), diagonal)


@dataclass(frozen=True, eq=False)
class PowerKernel:
    """Truncated power kernel ``k^beta(s, t) = sum_{i < N} mu_i^beta e_i(s) e_i(t)``."""

    source: SpectralDecomposition
    beta: float
    truncation: int
    monitor: ConvergenceMonitor

    def features(self, t):
        """``mu_i^(beta/2) e_i(t)``: an orthonormal basis of the power RKHS evaluated at ``t``."""
        E = self.source.eigenfunctions(t, self.truncation)
        return E * self.source.eigenvalues[:self.truncation] ** (0.5 * self.beta)

    def gram(self, X, Y=None):
        FX = self.features(X)
        FY = FX if Y is None else self.features(Y)
        return FX @ FY.T

    def as_kernel(self):
        from .kernels import Kernel

        src = self.source

        def func(S, T):
            S, T = np.broadcast_arrays(S, T)
            shape = S.shape[:-1]
            d = S.shape[-1]
            out = np.sum(self.features(S.reshape(-1, d)) * self.features(T.reshape(-1, d)), axis=1)
            return out.reshape(shape)

        return Kernel(func=func, domain=src.kernel.domain,
                      name=f"{src.kernel.name}^{self.beta:g}",
                      spec={"kind": "power", "source": src.kernel.spec, "beta": self.beta,
                            "N": self.truncation})


def power_kernel(decomp, beta, N=None, grid=None):
    """Truncated power kernel together with its convergence monitor."""
    beta = float(beta)
    if not 0 < beta <= 1:
        raise ParameterError(f"beta must lie in (0, 1], got {beta}", module="spectral",
                             operation="power_kernel")
    N = decomp.trust_index if N is None else int(N)
    if not 1 <= N <= decomp.floor_index:
        raise ParameterError(f"truncation {N} outside [1, floor_index={decomp.floor_index}]",
                             module="spectral", operation="power_kernel")
    grid = decomp.kernel.domain.reference_grid() if grid is None else \
        as_points(grid, decomp.rule.dimension).reshape(-1, decomp.rule.dimension)
    egrid = decomp.eigenfunctions(grid, N)
    exhausted = N == decomp.floor_index and decomp.floor_index < decomp.size
    monitor = monitor_from_values(decomp.eigenvalues, egrid, beta, N, grid, exhausted)
    return PowerKernel(decomp, beta, N, monitor)


def power_eval(pk, s, t):
    """``k^beta(s, t)`` truncated at ``pk.truncation``; broadcasts like :class:`Kernel`."""
    d = pk.source.rule.dimension
    S, T = np.broadcast_arrays(as_points(s, d), as_points(t, d))
    shape = S.shape[:-1]
    out = np.sum(pk.features(S.reshape(-1, d)) * pk.features(T.reshape(-1, d)), axis=1)
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out
