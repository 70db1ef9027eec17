"""Decay fits, summability tests and the path-RKHS verdict.

A centered Gaussian process with covariance ``k`` has its paths in some RKHS of
bounded functions exactly when the embedding of its own RKHS into ``L2(nu)`` is
nuclear, i.e. when ``sum_i sqrt(mu_i) < inf`` for the eigenvalues of the
integral operator. With eigenvalues decaying like ``i^-rho`` that is the
condition ``rho > 2``. When it holds (and the eigenfunctions are uniformly
bounded) the power kernel ``k^beta`` for any ``beta`` in
``(1/rho, 1 - 1/rho)`` has an RKHS that dominates ``H_k`` nuclearly and contains
the paths of a version of the process.
"""

import heapq
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, stats

from .domain import CIRCLE
from .errors import ConditioningError, ParameterError, UsageError, WindowError
from .kernels import product_spectrum
from .quadrature import circle_uniform, default_rule, uniform_midpoint
from .spectral import (DECAY_FACTOR, EPS_FLOOR, SpectralDecomposition, decompose,
                       monitor_from_values)

EXISTS = "EXISTS"
NOT_EXISTS = "NOT_EXISTS"
INCONCLUSIVE = "INCONCLUSIVE"

SUMMABLE = "SUMMABLE"
DIVERGENT = "DIVERGENT"

MIN_MARGIN = 0.05
BETA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
EXACT_MAX_LOG2 = 16
SUP_GROWTH_LIMIT = 1.25


# ------------------------------------------------------------------ decay fits

@dataclass(frozen=True)
class DecayEstimate:
    """Least-squares fit ``log mu_i = log c - rho log i`` over ``window`` (1-based, inclusive)."""

    rho: float
    rho_ci: float
    window: tuple
    c: float
    r2: float

    def to_json(self):
        return {"rho": self.rho, "rho_ci": self.rho_ci, "window": list(self.window),
                "c": self.c, "r2": self.r2}


def _eigenvalues(decomp):
    if isinstance(decomp, SpectralDecomposition):
        return decomp.eigenvalues, decomp.size, decomp.floor_index
    mu = np.sort(np.asarray(decomp, dtype=float))[::-1]
    floor = int(np.count_nonzero(mu > EPS_FLOOR * mu[0])) if mu.size else 0
    return mu, mu.size, floor


def estimate_decay(decomp, window=None):
    """Fit the power-law decay exponent of a spectrum.

    ``decomp`` is a :class:`SpectralDecomposition` or a plain eigenvalue array.
    The default window is ``[max(2, n // 64), n // 4]`` clipped to the floor.
    """
    mu, n, floor = _eigenvalues(decomp)
    hi_limit = min(n // 4, floor)
    if window is None:
        lo, hi = max(2, n // 64), hi_limit
    else:
        lo, hi = (int(w) for w in window)
        if lo < 2 or hi > hi_limit:
            raise WindowError(f"window [{lo}, {hi}] leaves the trust zone [2, {hi_limit}]",
                              module="analysis", operation="estimate_decay")
    if hi - lo + 1 < 8:
        raise WindowError(f"only {max(hi - lo + 1, 0)} trusted eigenvalues in the fit window "
                          f"(n={n}, floor_index={floor})",
                          module="analysis", operation="estimate_decay")
    idx = np.arange(lo, hi + 1)
    fit = stats.linregress(np.log(idx), np.log(mu[lo - 1:hi]))
    dof = idx.size - 2
    ci = float(stats.t.ppf(0.975, dof) * fit.stderr)
    r2 = float(min(max(fit.rvalue**2, 0.0), 1.0))
    return DecayEstimate(float(-fit.slope), ci, (int(lo), int(hi)), float(np.exp(fit.intercept)), r2)


def dyadic_partial_sums(values, start=16, stop=None):
    """``[(N, sum_{i<=N} values_i)]`` for ``N = start, 2 start, ...`` up to ``stop``."""
    values = np.asarray(values, dtype=float)
    stop = values.size if stop is None else min(stop, values.size)
    csum = np.cumsum(values)
    out = []
    N = start
    while N <= stop:
        out.append((N, float(csum[N - 1])))
        N *= 2
    if stop >= 1 and (not out or out[-1][0] != stop):
        out.append((stop, float(csum[stop - 1])))
    return out


def increments_converge(sums):
    """Dyadic rule: increments must shrink by ``DECAY_FACTOR`` per doubling over the last two."""
    vals = [v for _, v in sums]
    if len(vals) < 4:
        return None
    inc = np.diff(vals)
    first, last = inc[-3], inc[-1]
    if last <= 1e-13 * abs(vals[-1]):
        return True
    return bool(np.sqrt(first / last) >= DECAY_FACTOR) if first > 0 else False


# -------------------------------------------------------------- summability

@dataclass
class SummabilityResult:
    outcome: str
    p: float
    rho: float
    margin: float
    exponent_outcome: str
    exact_partial_sums: list = None
    notes: list = field(default_factory=list)

    @property
    def product(self):
        return self.p * self.rho


def _exact_source(kernel):
    """Closed-form spectrum deciding summability for ``kernel``, with a note on provenance."""
    if kernel is None:
        return None, None
    if kernel.known_spectrum is not None and not kernel.tensor_factors:
        return kernel.known_spectrum, "closed-form spectrum"
    if kernel.base is not None and kernel.base.known_spectrum is not None:
        rank = len(kernel.perturbations)
        return (kernel.base.known_spectrum,
                f"closed-form spectrum of the base kernel; a rank-{rank} perturbation shifts "
                f"eigenvalue indices by at most {rank} (interlacing), so summability is shared")
    return None, None


def _exact_summability(spectrum, p):
    mu = np.asarray(spectrum(2**EXACT_MAX_LOG2), dtype=float)
    sums = dyadic_partial_sums(mu**p, start=16)
    if mu.size < 2**EXACT_MAX_LOG2:
        return SUMMABLE, sums
    return (SUMMABLE if increments_converge(sums) else DIVERGENT), sums


def summability_test(decomp, p, estimate=None):
    """Decide whether ``sum_i mu_i^p`` is finite.

    The exponent test says SUMMABLE when ``p rho > 1 + margin`` and DIVERGENT when
    ``p rho < 1 - margin`` with ``margin = max(2 p rho_ci, 0.05)``. Inside the
    margin a closed-form spectrum, when the kernel (or the base of a finite-rank
    perturbation, or every tensor factor) has one, decides through its dyadic
    partial sums.
    """
    p = float(p)
    if not p > 0:
        raise ParameterError("p must be positive", module="analysis", operation="summability_test")
    est = estimate_decay(decomp) if estimate is None else estimate
    margin = max(2.0 * est.rho_ci * p, MIN_MARGIN)
    prod = p * est.rho
    if prod > 1 + margin:
        outcome = SUMMABLE
    elif prod < 1 - margin:
        outcome = DIVERGENT
    else:
        outcome = INCONCLUSIVE
    result = SummabilityResult(outcome, p, est.rho, margin, outcome)
    if outcome != INCONCLUSIVE:
        return result
    kernel = decomp.kernel if isinstance(decomp, SpectralDecomposition) else None
    result.notes.append(f"exponent test inconclusive: p*rho = {prod:.4f} within {margin:.3f} of 1")
    if kernel is not None and kernel.tensor_factors:
        outcomes = []
        for f in kernel.tensor_factors:
            spectrum, _ = _exact_source(f)
            if spectrum is None:
                return result
            outcomes.append(_exact_summability(spectrum, p)[0])
        result.outcome = DIVERGENT if DIVERGENT in outcomes else SUMMABLE
        result.notes.append("decided by closed-form spectra of the tensor factors")
        return result
    spectrum, source = _exact_source(kernel)
    if spectrum is None:
        return result
    result.outcome, result.exact_partial_sums = _exact_summability(spectrum, p)
    result.notes.append(f"decided by dyadic partial sums of the {source}")
    return result


# ------------------------------------------------------------------- verdicts

@dataclass
class Verdict:
    decision: str
    rho_evidence: DecayEstimate
    partial_sums: list
    beta_window: tuple = None
    notes: list = field(default_factory=list)
    kernel_spec: dict = None
    n_nodes: int = 0
    summability: SummabilityResult = None
    extras: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "kernel": self.kernel_spec,
            "n_nodes": int(self.n_nodes),
            "rho": self.rho_evidence.rho,
            "rho_ci": self.rho_evidence.rho_ci,
            "sum_sqrt_partial": [[int(N), float(v)] for N, v in self.partial_sums],
            "decision": self.decision,
            "beta_window": None if self.beta_window is None else [float(b) for b in self.beta_window],
            "notes": list(self.notes),
        }


def eigenfunction_sups(egrid, N):
    """Sup norms on the grid over dyadic index blocks ``[0, N/8), [N/8, N/4), [N/4, N/2), [N/2, N)``."""
    edges = [0, N // 8, N // 4, N // 2, N] if N >= 8 else [0, N]
    return [float(np.abs(egrid[:, a:b]).max()) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def verdict_from_decomposition(decomp, estimate=None):
    """Verdict for the process whose covariance was decomposed in ``decomp``."""
    kernel = decomp.kernel
    notes = []
    est = estimate_decay(decomp) if estimate is None else estimate
    summ = summability_test(decomp, 0.5, est)
    notes.extend(summ.notes)
    N = decomp.trust_index
    partial = dyadic_partial_sums(decomp.sqrt_eigenvalues, start=16, stop=N)
    nodes_diag = kernel.diag(decomp.rule.nodes)
    if not np.all(np.isfinite(nodes_diag)):
        raise ArithmeticError("kernel diagonal is not finite on the quadrature grid")
    notes.append(f"kernel diagonal bounded on the grid: max k(x,x) = {nodes_diag.max():.6g}")
    verdict = Verdict(INCONCLUSIVE, est, partial, None, notes, kernel.spec, decomp.size, summ)
    verdict.extras["sum_sqrt_trend_converges"] = increments_converge(partial)
    if summ.outcome == DIVERGENT:
        verdict.decision = NOT_EXISTS
        notes.append("sum of sqrt(mu_i) diverges: the RKHS embedding into L2 is not nuclear, "
                     "so no RKHS of bounded functions carries the paths")
        return verdict
    if summ.outcome == INCONCLUSIVE:
        notes.append("no closed-form spectrum available to resolve the boundary case")
        return verdict
    grid = kernel.domain.reference_grid()
    egrid = decomp.eigenfunctions(grid, N)
    sups = eigenfunction_sups(egrid, N)
    bounded = sups[-1] <= SUP_GROWTH_LIMIT * max(sups[:-1]) if len(sups) > 1 else True
    verdict.extras["eigenfunction_sups"] = sups
    notes.append("sup-norm boundedness of the eigenfunctions was checked only on the "
                 f"{grid.shape[0]}-point monitor grid for the first {N} eigenfunctions")
    beta_hi = min(1.0 - 1.0 / est.rho - summ.margin, 1.0)
    exhausted = N == decomp.floor_index and decomp.floor_index < decomp.size
    monitors = {}
    beta_lo = None
    for beta in BETA_GRID:
        mon = monitor_from_values(decomp.eigenvalues, egrid, beta, N, grid, exhausted)
        monitors[beta] = mon.summary()
        if beta_lo is None and mon.converged:
            beta_lo = beta
    verdict.extras["monitors"] = monitors
    if not bounded:
        notes.append(f"eigenfunction sup norms grow across index blocks: {sups}")
        return verdict
    if beta_lo is None or beta_lo > beta_hi:
        notes.append(f"empty beta window: lowest converging beta {beta_lo}, "
                     f"upper limit {beta_hi:.4f}")
        return verdict
    verdict.decision = EXISTS
    verdict.beta_window = (beta_lo, beta_hi)
    notes.append("sum of sqrt(mu_i) converges and the power kernel k^beta converges on the "
                 "grid for beta in the window; its RKHS contains the paths of a version "
                 "of the process (not necessarily the original version)")
    return verdict


def rkhs_path_verdict(kernel, rule=None):
    """Decide whether some RKHS of bounded functions can carry the paths of the process."""
    if kernel.tensor_factors:
        return _tensor_kernel_verdict(kernel, rule)
    rule = default_rule(kernel.domain) if rule is None else rule
    return verdict_from_decomposition(decompose(kernel, rule))


def tensor_verdict(factor_decomp, d, budget=64):
    """Verdict for the ``d``-fold product of the kernel behind ``factor_decomp``.

    ``sum sqrt(mu)`` over the product spectrum equals the ``d``-th power of the
    factor sum, so the decision is the factor's. Up to ``budget`` leading product
    eigenvalues are listed under ``extras["tensor_spectrum"]``.
    """
    if int(d) != d or d < 2:
        raise ParameterError("tensor_verdict needs d >= 2", module="analysis",
                             operation="tensor_verdict")
    d = int(d)
    factor = verdict_from_decomposition(factor_decomp)
    trusted = factor_decomp.eigenvalues[:factor_decomp.floor_index]
    products = top_products([trusted] * d, budget)
    spec = {"kind": "tensor", "factor": factor_decomp.kernel.spec, "d": d}
    notes = [f"decision of the 1-d factor ({factor.decision}) carries over: "
             f"sum over the product spectrum of sqrt(mu) is the {d}-th power of the factor sum"]
    notes.extend(factor.notes)
    out = Verdict(factor.decision, factor.rho_evidence,
                  [(N, v**d) for N, v in factor.partial_sums], factor.beta_window, notes, spec,
                  factor_decomp.size, factor.summability)
    out.extras["tensor_spectrum"] = products.tolist()
    out.extras["factor_verdict"] = factor
    return out


def top_products(sequences, budget):
    """The ``budget`` largest products ``a_i * b_j * ...`` of nonincreasing sequences."""
    budget = int(budget)
    current = np.sort(np.asarray(sequences[0], dtype=float))[::-1][:budget]
    for seq in sequences[1:]:
        seq = np.sort(np.asarray(seq, dtype=float))[::-1][:budget]
        if current.size * seq.size <= 4 * budget * budget and current.size * seq.size <= 10**6:
            current = product_spectrum([current, seq], budget)
            continue
        heap = [(-current[0] * seq[0], 0, 0)]
        seen = {(0, 0)}
        out = []
        while heap and len(out) < budget:
            v, i, j = heapq.heappop(heap)
            out.append(-v)
            for a, b in ((i + 1, j), (i, j + 1)):
                if a < current.size and b < seq.size and (a, b) not in seen:
                    seen.add((a, b))
                    heapq.heappush(heap, (-current[a] * seq[b], a, b))
        current = np.asarray(out)
    return current


def _tensor_kernel_verdict(kernel, rule):
    factors = kernel.tensor_factors
    d = len(factors)
    if rule is not None and rule.factors:
        factor_rules = list(rule.factors)
    else:
        factor_rules = [default_rule(f.domain) for f in factors]
    if all(f.spec == factors[0].spec for f in factors):
        out = tensor_verdict(decompose(factors[0], factor_rules[0]), d)
        out.kernel_spec = kernel.spec
        return out
    verdicts = [verdict_from_decomposition(decompose(f, r)) for f, r in zip(factors, factor_rules)]
    decisions = [v.decision for v in verdicts]
    if NOT_EXISTS in decisions:
        decision = NOT_EXISTS
    elif all(dec == EXISTS for dec in decisions):
        decision = EXISTS
    else:
        decision = INCONCLUSIVE
    window = None
    if decision == EXISTS:
        lo = max(v.beta_window[0] for v in verdicts)
        hi = min(v.beta_window[1] for v in verdicts)
        if lo <= hi:
            window = (lo, hi)
        else:
            decision = INCONCLUSIVE
    slowest = min(verdicts, key=lambda v: v.rho_evidence.rho)
    partial = [(N, float(np.prod([dict(v.partial_sums).get(N, np.nan) for v in verdicts])))
               for N, _ in slowest.partial_sums]
    notes = ["product spectrum: sum of sqrt(mu) is the product of the factor sums; "
             f"factor decisions {decisions}"]
    out = Verdict(decision, slowest.rho_evidence, partial, window, notes, kernel.spec,
                  slowest.n_nodes, slowest.summability)
    out.extras["factor_verdicts"] = verdicts
    return out


# ------------------------------------------------------ finite-rank difference

@dataclass(frozen=True)
class RankReport:
    """Numerical rank of ``K1 - K2``; ``rank`` is ``None`` when it grows under refinement."""

    rank: object
    ranks: tuple
    tol: float

    @property
    def finite(self):
        return self.rank is not None

    def to_json(self):
        return {"rank": "NOT_FINITE_RANK" if self.rank is None else int(self.rank),
                "ranks": [[int(n), int(r)] for n, r in self.ranks], "tol": self.tol}


def _difference_rank(k1, k2, nodes, tol):
    K1 = k1.gram(nodes)
    K2 = k2.gram(nodes)
    D = K1 - K2
    D = 0.5 * (D + D.T)
    sv = np.abs(linalg.eigvalsh(D))
    dnorm = float(sv.max())
    scale = max(float(np.abs(linalg.eigvalsh(K1)).max()), float(np.abs(linalg.eigvalsh(K2)).max()))
    if dnorm <= tol * scale:
        return 0
    return int(np.count_nonzero(sv > tol * dnorm))


def finite_rank_difference(k1, k2, grid, tol=1e-8):
    """Numerical rank of the Gram difference on ``grid`` and on its refinement."""
    if k1.domain != k2.domain:
        raise UsageError("kernels live on different domains", module="analysis",
                         operation="finite_rank_difference")
    if grid.domain != k1.domain:
        raise UsageError("grid domain differs from the kernel domain", module="analysis",
                         operation="finite_rank_difference")
    if grid.size < 32:
        raise ParameterError("finite_rank_difference needs at least 32 nodes",
                             module="analysis", operation="finite_rank_difference")
    fine = grid.refine()
    r1 = _difference_rank(k1, k2, grid.nodes, tol)
    r2 = _difference_rank(k1, k2, fine.nodes, tol)
    ranks = ((grid.size, r1), (fine.size, r2))
    return RankReport(None if r2 > r1 else r1, ranks, float(tol))


# ------------------------------------------------------------ nuclear dominance

@dataclass
class DominanceReport:
    """Discrete Hilbert-Schmidt traces ``tr(K1 (K2 + ridge)^-1)`` along growing grids."""

    grid_sizes: list
    traces: list
    conditions: list
    bounded: bool
    exact_trace: float = None
    exact_partial_sums: list = None
    exact_bounded: bool = None

    def to_json(self):
        return {"grid_sizes": [int(n) for n in self.grid_sizes],
                "hs_trace": [float(t) for t in self.traces],
                "condition": [float(c) for c in self.conditions],
                "bounded": bool(self.bounded),
                "exact_trace": self.exact_trace,
                "exact_partial_sums": None if self.exact_partial_sums is None else
                [[int(N), float(v)] for N, v in self.exact_partial_sums],
                "exact_bounded": self.exact_bounded}


def _grid_for(domain, n):
    if domain.kind == CIRCLE:
        return circle_uniform(n)
    return uniform_midpoint(n, domain)


def dominance_trace(k1, k2, grid_sizes=(64, 128, 256, 512), ridge=1e-10):
    """Hilbert-Schmidt norm of the embedding ``H1 -> H2`` seen through Gram matrices.

    On nodes ``X`` the squared HS norm of the embedding restricted to
    ``span k1(., x)`` is ``tr(K1 K2^-1)``; it stays bounded under refinement
    exactly when ``H2`` dominates ``H1`` nuclearly. ``K2`` is regularized by
    ``ridge * tr(K2) / n``. For circle kernels with Fourier coefficients the
    exact ``sum_n c1(n) / c2(n)`` is reported as well.
    """
    if k1.domain != k2.domain:
        raise UsageError("kernels live on different domains", module="analysis",
                         operation="dominance_trace")
    sizes = [int(n) for n in grid_sizes]
    traces, conds = [], []
    for n in sizes:
        nodes = _grid_for(k1.domain, n).nodes
        K1 = k1.gram(nodes)
        K2 = k2.gram(nodes)
        m = K2.shape[0]
        lam = ridge * np.trace(K2) / m
        M = 0.5 * (K2 + K2.T) + lam * np.eye(m)
        ev = linalg.eigvalsh(M)
        cond = float(ev[-1] / ev[0]) if ev[0] > 0 else float("inf")
        if not cond <= 1e12:
            raise ConditioningError(f"regularized Gram matrix of {k2.name} on {m} nodes has "
                                    f"condition number {cond:.3g} > 1e12",
                                    module="analysis", operation="dominance_trace")
        factor = linalg.cho_factor(M)
        traces.append(float(np.trace(linalg.cho_solve(factor, K1))))
        conds.append(cond)
    bounded = False
    if len(traces) >= 3:
        inc = np.diff(traces)
        if abs(inc[-1]) <= 1e-9 * abs(traces[-1]):
            bounded = True
        else:
            bounded = bool(inc[-2] > 0 and inc[-1] > 0 and inc[-2] / inc[-1] >= DECAY_FACTOR)
    report = DominanceReport(sizes, traces, conds, bounded)
    if k1.fourier_coeff is not None and k2.fourier_coeff is not None:
        n = np.arange(0, 2**20 + 1)
        c1 = k1.fourier_coeff(n)
        c2 = k2.fourier_coeff(n)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(c1 > 0, c1 / c2, 0.0)
        mult = np.where(n == 0, 1.0, 2.0)
        terms = mult * ratio
        sums = dyadic_partial_sums(terms[1:], start=16)
        sums = [(N, v + terms[0]) for N, v in sums]
        report.exact_partial_sums = sums
        report.exact_trace = float(np.sum(terms))
        report.exact_bounded = bool(np.isfinite(report.exact_trace) and increments_converge(sums))
    return report
