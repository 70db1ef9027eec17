"""Covariance kernels of the Gaussian processes studied in this package.

All kernels share one calling convention: the evaluator receives two arrays of
points of shape ``(..., d)`` that broadcast against each other and returns the
kernel values of shape ``(...)``. :class:`Kernel` wraps the evaluator together
with the domain and whatever spectral facts are known in closed form.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, special

from .domain import CIRCLE, INTERVAL, Domain
from .errors import EvaluationError, ParameterError, UsageError

EPS_PSD = 1e-8


def as_points(x, d):
    """Coerce scalars / coordinate arrays / point arrays to shape ``(..., d)``."""
    x = np.asarray(x, dtype=float)
    if d == 1:
        if x.ndim >= 2 and x.shape[-1] == 1:
            return x
        return x[..., None]
    if x.ndim == 0 or x.shape[-1] != d:
        raise UsageError(f"expected points with last axis {d}, got shape {x.shape}",
                         module="kernels")
    return x


@dataclass(frozen=True, eq=False)
class Kernel:
    """A symmetric positive-definite kernel on a :class:`Domain`.

    Parameters
    ----------
    func
        Vectorized evaluator ``func(S, T)`` on point arrays of shape ``(..., d)``.
    domain
        Where the kernel lives.
    name
        Short human-readable label.
    spec
        JSON-serializable description (see :mod:`pathrkhs.specs`).
    stationary
        ``k(s, t)`` depends on ``s - t`` only.
    known_spectrum
        ``known_spectrum(count)`` returns the leading eigenvalues of the integral
        operator for Lebesgue measure on the domain, nonincreasing. May return
        fewer than ``count`` values when the spectrum is finite.
    tensor_factors
        One-dimensional factors of a product kernel.
    fourier_coeff
        For circle kernels, ``c(n)`` for integer arrays ``n >= 0``.
    base, perturbations
        For finite-rank perturbations ``k = base + sum_j sign_j f_j (x) f_j``.
    expensive
        Evaluations are costly; Gram matrices exploit symmetry.
    """

    func: object
    domain: Domain
    name: str
    spec: dict = field(default_factory=dict)
    stationary: bool = False
    known_spectrum: object = None
    tensor_factors: tuple = ()
    fourier_coeff: object = None
    base: "Kernel" = None
    perturbations: tuple = ()
    expensive: bool = False
    truncation_error: float = 0.0

    symmetric = True

    @property
    def dimension(self):
        return self.domain.dimension

    def __call__(self, s, t):
        d = self.dimension
        S = as_points(s, d)
        T = as_points(t, d)
        out = np.asarray(self.func(S, T), dtype=float)
        if out.ndim == 0:
            return float(out)
        return out

    def gram(self, X, Y=None):
        """Kernel matrix ``K[i, j] = k(X[i], Y[j])``; ``Y=None`` means ``Y = X``."""
        d = self.dimension
        X = as_points(X, d).reshape(-1, d)
        if Y is None and self.expensive:
            n = X.shape[0]
            iu, ju = np.triu_indices(n)
            vals = np.asarray(self.func(X[iu], X[ju]), dtype=float)
            K = np.empty((n, n))
            K[iu, ju] = vals
            K[ju, iu] = vals
        else:
            Y = X if Y is None else as_points(Y, d).reshape(-1, d)
            K = np.asarray(self.func(X[:, None, :], Y[None, :, :]), dtype=float)
        if not np.all(np.isfinite(K)):
            raise EvaluationError(f"non-finite value in {self.name} Gram matrix",
                                  module="kernels", operation="gram")
        return K

    def diag(self, X):
        X = as_points(X, self.dimension).reshape(-1, self.dimension)
        return np.asarray(self.func(X, X), dtype=float)

    def scaled(self, c):
        """The kernel ``c * k``; every spectral fact is rescaled accordingly."""
        c = float(c)
        if not c > 0:
            raise ParameterError("scale must be positive", module="kernels")
        func = self.func
        known = self.known_spectrum
        fourier = self.fourier_coeff
        spec = dict(self.spec)
        spec["scale"] = spec.get("scale", 1.0) * c
        factors = self.tensor_factors
        if factors:
            factors = (factors[0].scaled(c),) + tuple(factors[1:])
        base = self.base.scaled(c) if self.base is not None else None
        root = math.sqrt(c)
        perturbations = tuple((_scaled_function(f, root), sign) for f, sign in self.perturbations)
        return replace(
            self,
            func=lambda S, T: c * func(S, T),
            spec=spec,
            known_spectrum=None if known is None else (lambda count: c * known(count)),
            fourier_coeff=None if fourier is None else (lambda n: c * fourier(n)),
            tensor_factors=factors,
            base=base,
            perturbations=perturbations,
            truncation_error=c * self.truncation_error,
        )


def _scaled_function(f, c):
    return lambda x: c * f(x)


# ---------------------------------------------------------------- closed forms

def wiener_spectrum(count):
    i = np.arange(1, count + 1, dtype=float)
    return (2.0 / ((2.0 * i - 1.0) * np.pi)) ** 2


def bridge_spectrum(count):
    i = np.arange(1, count + 1, dtype=float)
    return 1.0 / (np.pi * i) ** 2


def ou_frequencies(count, sigma):
    """Positive roots of ``(w^2 - sigma^2) sin w - 2 sigma w cos w``, one per ``((i-1) pi, i pi)``."""
    k = np.arange(1, count + 1, dtype=float)
    lo = (k - 1.0) * np.pi
    lo[0] = 1e-12
    hi = k * np.pi

    def g(w):
        return (w * w - sigma * sigma) * np.sin(w) - 2.0 * sigma * w * np.cos(w)

    glo = g(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        left = np.sign(gm) == np.sign(glo)
        lo = np.where(left, mid, lo)
        glo = np.where(left, gm, glo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(hi, 1.0)):
            break
    return 0.5 * (lo + hi)


def ou_spectrum(count, a=1.0, sigma=1.0, length=1.0):
    """Eigenvalues of ``a exp(-sigma |s - t|)`` on an interval of the given length.

    On ``[0, 1]`` the eigenfunctions solve ``f'' = -w^2 f`` with Robin boundary
    conditions ``f'(0) = sigma f(0)``, ``f'(1) = -sigma f(1)``, which gives
    ``mu = 2 a sigma / (w^2 + sigma^2)``. Other lengths follow by rescaling.
    """
    s = sigma * length
    w = ou_frequencies(count, s)
    return length * 2.0 * a * s / (w * w + s * s)


# ------------------------------------------------------------------- factories

def make_wiener():
    """Brownian motion covariance ``min(s, t)`` on ``[0, 1]``."""
    return Kernel(
        func=lambda S, T: np.minimum(S[..., 0], T[..., 0]),
        domain=Domain.interval(),
        name="wiener",
        spec={"kind": "wiener"},
        known_spectrum=wiener_spectrum,
    )


def make_brownian_bridge():
    """Brownian bridge covariance ``min(s, t) - s t`` on ``[0, 1]``."""

    def func(S, T):
        s, t = S[..., 0], T[..., 0]
        return np.minimum(s, t) - s * t

    return Kernel(func=func, domain=Domain.interval(), name="bridge",
                  spec={"kind": "bridge"}, known_spectrum=bridge_spectrum)


def make_ou(variant, a=1.0, sigma=1.0):
    """Ornstein-Uhlenbeck covariances on ``[0, 1]``.

    Variant 1 is the stationary ``a exp(-sigma |s - t|)``; variant 2 subtracts
    the rank-one kernel ``a exp(-sigma (s + t))`` (the process started at 0).
    """
    if variant not in (1, 2):
        raise ParameterError(f"OU variant must be 1 or 2, got {variant}", module="kernels")
    if not (a > 0 and sigma > 0):
        raise ParameterError("OU parameters a and sigma must be positive", module="kernels")
    a = float(a)
    sigma = float(sigma)
    k1 = Kernel(
        func=lambda S, T: a * np.exp(-sigma * np.abs(S[..., 0] - T[..., 0])),
        domain=Domain.interval(),
        name="ou1",
        spec={"kind": "ou", "variant": 1, "a": a, "sigma": sigma},
        stationary=True,
        known_spectrum=lambda count: ou_spectrum(count, a, sigma),
    )
    if variant == 1:
        return k1
    root = math.sqrt(a)
    k2 = add_finite_rank(k1, [lambda t: root * np.exp(-sigma * t)], [-1])
    return replace(k2, name="ou2", spec={"kind": "ou", "variant": 2, "a": a, "sigma": sigma})


def make_fbm(alpha):
    """Fractional Brownian motion with Hurst index ``alpha`` on ``[0, 1]``."""
    if not 0 < alpha < 1:
        raise ParameterError(f"Hurst index must lie in (0, 1), got {alpha}", module="kernels")
    h2 = 2.0 * float(alpha)

    def func(S, T):
        s, t = S[..., 0], T[..., 0]
        return 0.5 * (np.abs(s) ** h2 + np.abs(t) ** h2 - np.abs(t - s) ** h2)

    known = wiener_spectrum if alpha == 0.5 else None
    return Kernel(func=func, domain=Domain.interval(), name=f"fbm({alpha:g})",
                  spec={"kind": "fbm", "alpha": float(alpha)}, known_spectrum=known)


def make_riemann_liouville(alpha, quad_tol=1e-10):
    """Riemann-Liouville process covariance on ``[0, 1]``.

    By the Ito isometry

        k(s, t) = Gamma(alpha + 1/2)^-2  int_0^min(s,t) ((t - u)(s - u))^(alpha - 1/2) du.

    The factor ``(min(s,t) - u)^(alpha - 1/2)`` is integrable but unbounded for
    ``alpha < 1/2``; it is handed to QUADPACK's algebraic-weight routine (QAWS)
    so the adaptive scheme never samples the singular endpoint. The diagonal is
    closed form, ``t^(2 alpha) / (2 alpha)``.
    """
    if not 0 < alpha < 1:
        raise ParameterError(f"RL index must lie in (0, 1), got {alpha}", module="kernels")
    if not quad_tol >= 50 * np.finfo(float).eps:
        raise ParameterError("quad_tol must be at least 50 machine epsilons", module="kernels")
    alpha = float(alpha)
    g = alpha - 0.5
    norm = special.gamma(alpha + 0.5) ** -2

    def pair(s, t):
        m, M = (s, t) if s <= t else (t, s)
        if m <= 0.0:
            return 0.0
        if M == m:
            return norm * m ** (2 * alpha) / (2 * alpha)
        res = integrate.quad(lambda u: (M - u) ** g, 0.0, m, weight="alg", wvar=(0.0, g),
                             epsabs=0.0, epsrel=quad_tol, limit=200, full_output=1)
        value, abserr = res[0], res[1]
        if len(res) > 3 or not np.isfinite(value):
            achieved = abserr / abs(value) if value else float("inf")
            raise EvaluationError(
                f"RL quadrature did not converge at ({s}, {t}); achieved relative "
                f"tolerance {achieved:.3g} > {quad_tol:.3g}",
                module="kernels", operation="make_riemann_liouville")
        return norm * value

    def func(S, T):
        s, t = np.broadcast_arrays(S[..., 0], T[..., 0])
        out = np.empty(s.shape)
        flat_s, flat_t, flat_o = s.ravel(), t.ravel(), out.reshape(-1)
        for j in range(flat_o.size):
            flat_o[j] = pair(float(flat_s[j]), float(flat_t[j]))
        return out

    known = wiener_spectrum if alpha == 0.5 else None
    return Kernel(func=func, domain=Domain.interval(), name=f"rl({alpha:g})",
                  spec={"kind": "rl", "alpha": alpha, "quad_tol": float(quad_tol)},
                  known_spectrum=known, expensive=True)


def _half_integer_order(alpha):
    p = alpha - 0.5
    if p >= 0 and abs(p - round(p)) < 1e-12 and round(p) <= 20:
        return int(round(p))
    return None


def matern_profile(alpha, r, normalized=True):
    """``r^alpha K_alpha(r)``, optionally divided by its value ``2^(alpha-1) Gamma(alpha)`` at 0."""
    r = np.asarray(r, dtype=float)
    limit = 2.0 ** (alpha - 1.0) * special.gamma(alpha)
    p = _half_integer_order(alpha)
    if p is not None:
        # K_{p+1/2}(r) = sqrt(pi / 2r) e^-r sum_k (p+k)! / (k! (p-k)!) (2r)^-k
        poly = np.zeros_like(r)
        for k in range(p + 1):
            c = math.factorial(p + k) / (math.factorial(k) * math.factorial(p - k)) / 2.0**k
            poly = poly + c * r ** (p - k)
        out = math.sqrt(math.pi / 2.0) * np.exp(-r) * poly
    else:
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            pos = r > 0
            out = np.full(r.shape, limit)
            rp = r[pos]
            out[pos] = rp**alpha * special.kve(alpha, rp) * np.exp(-rp)
        if not np.all(np.isfinite(out)):
            raise EvaluationError(f"Bessel K_{alpha} overflow for r in "
                                  f"[{r.min():.3g}, {r.max():.3g}]",
                                  module="kernels", operation="make_matern")
    return out / limit if normalized else out


def make_matern(alpha, sigma=1.0, domain=None, normalized=True):
    """Matern kernel ``(sigma r)^alpha K_alpha(sigma r)`` with ``r = |t1 - t2|``.

    Its RKHS is the Sobolev space of order ``alpha + d/2``, so the eigenvalues
    decay like ``i^(-(2 alpha + d)/d)``.
    """
    if not (alpha > 0 and sigma > 0):
        raise ParameterError("Matern alpha and sigma must be positive", module="kernels")
    domain = Domain.interval() if domain is None else domain
    if domain.kind == CIRCLE:
        raise ParameterError("Matern kernels live on intervals or boxes", module="kernels")
    alpha = float(alpha)
    sigma = float(sigma)

    def func(S, T):
        r = np.sqrt(np.sum((S - T) ** 2, axis=-1))
        return matern_profile(alpha, sigma * r, normalized)

    known = None
    if domain.kind == INTERVAL and abs(alpha - 0.5) < 1e-15:
        a0, b0 = domain.bounds[0]
        amp = 1.0 if normalized else math.sqrt(math.pi / 2.0)
        known = lambda count: ou_spectrum(count, amp, sigma, b0 - a0)  # noqa: E731
    spec = {"kind": "matern", "alpha": alpha, "sigma": sigma, "dim": domain.dimension,
            "bounds": [list(b) for b in domain.bounds], "normalized": bool(normalized)}
    return Kernel(func=func, domain=domain, name=f"matern({alpha:g},d={domain.dimension})",
                  spec=spec, stationary=True, known_spectrum=known)


def make_circle_kernel(fourier_coeffs=None, *, decay=None, c0=0.0, scale=1.0, n_terms=511):
    """Stationary kernel ``c_0 + 2 sum_n c_n cos(2 pi n (s - t))`` on the circle.

    Either pass the finite coefficient list ``c_0, c_1, ...`` or a power law
    ``c_n = scale * n^-decay`` (``n >= 1``) with constant term ``c0``. Power laws
    are evaluated through their first ``n_terms`` harmonics; the dropped tail
    is bounded by ``truncation_error`` in sup norm. The spectrum of the
    integral operator is ``{c_0}`` together with every ``c_n`` twice.
    """
    if (fourier_coeffs is None) == (decay is None):
        raise ParameterError("give either fourier_coeffs or decay", module="kernels")
    if fourier_coeffs is not None:
        coeffs = np.asarray(fourier_coeffs, dtype=float).ravel()
        if coeffs.size == 0:
            raise ParameterError("need at least one Fourier coefficient", module="kernels")
        if np.any(coeffs < 0) or not np.all(np.isfinite(coeffs)):
            raise ParameterError("Fourier coefficients must be finite and nonnegative",
                                 module="kernels")
        coeffs.setflags(write=False)

        def fourier(n):
            n = np.asarray(n)
            return np.where(n < coeffs.size, coeffs[np.minimum(n, coeffs.size - 1)], 0.0)

        def known(count):
            values = np.concatenate([coeffs[:1], np.repeat(coeffs[1:], 2)])
            return np.sort(values)[::-1][:count]

        trunc = 0.0
        spec = {"kind": "circle", "coeffs": coeffs.tolist()}
    else:
        if not decay > 0 or not scale > 0 or c0 < 0:
            raise ParameterError("need decay > 0, scale > 0, c0 >= 0", module="kernels")
        if int(n_terms) != n_terms or n_terms < 1:
            raise ParameterError("n_terms must be a positive integer", module="kernels")
        decay, scale, c0, n_terms = float(decay), float(scale), float(c0), int(n_terms)

        def fourier(n):
            n = np.asarray(n, dtype=float)
            with np.errstate(divide="ignore"):
                return np.where(n == 0, c0, scale * np.where(n > 0, n, 1.0) ** -decay)

        def known(count):
            m = np.arange(1, count + 1)
            values = np.concatenate([[c0], np.repeat(fourier(m), 2)])
            return np.sort(values)[::-1][:count]

        coeffs = fourier(np.arange(n_terms + 1))
        coeffs.setflags(write=False)
        # tail sum 2 * sum_{n > n_terms} scale n^-decay, bounded by the integral test
        trunc = (2 * scale * n_terms ** (1 - decay) / (decay - 1)) if decay > 1 else float("inf")
        spec = {"kind": "circle", "decay": decay, "c0": c0, "scale": scale, "n_terms": n_terms}

    harmonics = np.arange(1, coeffs.size)

    def profile(r):
        out = np.empty(r.shape)
        step = max(1, 2**22 // max(harmonics.size, 1))
        for i in range(0, r.size, step):
            phase = 2.0 * np.pi * np.multiply.outer(r[i:i + step], harmonics)
            out[i:i + step] = coeffs[0] + 2.0 * np.cos(phase) @ coeffs[1:]
        return out

    def func(S, T):
        r = np.mod(S[..., 0] - T[..., 0], 1.0)
        # only the distinct lags are expanded; on lattices that is O(n) values
        lags, inverse = np.unique(np.round(r, 15), return_inverse=True)
        return profile(lags)[inverse].reshape(r.shape)

    return Kernel(func=func, domain=Domain.circle(), name="circle", spec=spec,
                  stationary=True, known_spectrum=known, fourier_coeff=fourier,
                  truncation_error=trunc)


def tensor(factors):
    """Product kernel ``k(t, t') = prod_i k_i(t_i, t'_i)`` on the box of the factor intervals."""
    factors = tuple(factors)
    if len(factors) < 2:
        raise ParameterError("tensor needs at least two factors", module="kernels")
    kinds = {f.domain.kind for f in factors}
    if CIRCLE in kinds and len(kinds) > 1:
        raise ParameterError("cannot mix circle and interval factors", module="kernels")
    for f in factors:
        if f.domain.kind != INTERVAL:
            raise ParameterError("tensor factors must be one-dimensional interval kernels",
                                 module="kernels")
    d = len(factors)

    def func(S, T):
        out = factors[0].func(S[..., 0:1], T[..., 0:1])
        for i in range(1, d):
            out = out * factors[i].func(S[..., i:i + 1], T[..., i:i + 1])
        return out

    known = None
    if all(f.known_spectrum is not None for f in factors):
        def known(count):
            return product_spectrum([f.known_spectrum(count) for f in factors], count)

    domain = Domain.box([f.domain.bounds[0] for f in factors])
    return Kernel(func=func, domain=domain, name="tensor(" + ",".join(f.name for f in factors) + ")",
                  spec={"kind": "tensor", "factors": [f.spec for f in factors]},
                  stationary=all(f.stationary for f in factors), known_spectrum=known,
                  tensor_factors=factors, expensive=any(f.expensive for f in factors))


def product_spectrum(spectra, budget):
    """Largest ``budget`` products ``mu_i1 * mu_i2 * ...`` taken over the given sequences."""
    current = np.sort(np.asarray(spectra[0], dtype=float))[::-1][:budget]
    for seq in spectra[1:]:
        seq = np.sort(np.asarray(seq, dtype=float))[::-1][:budget]
        current = np.sort(np.multiply.outer(current, seq).ravel())[::-1][:budget]
    return current


def add_finite_rank(base, functions, signs):
    """``k'(s, t) = k(s, t) + sum_j sign_j f_j(s) f_j(t)``.

    On one-dimensional domains each ``f_j`` receives coordinate arrays; on boxes
    it receives point arrays of shape ``(..., d)``. A function listed with both
    signs cancels exactly. Negative signs can break positive definiteness; that
    is detected when a spectral decomposition assembles the Gram matrix.
    """
    functions = list(functions)
    signs = [int(s) for s in signs]
    if len(functions) != len(signs):
        raise ParameterError("one sign per function", module="kernels")
    if any(s not in (1, -1) for s in signs):
        raise ParameterError("signs must be +1 or -1", module="kernels")
    terms = list(zip(functions, signs))
    netted = []
    for f, s in terms:
        match = next((i for i, (g, r) in enumerate(netted) if g is f and r == -s), None)
        if match is None:
            netted.append((f, s))
        else:
            del netted[match]
    if not netted:
        return base
    d = base.dimension
    unwrap = (lambda X: X[..., 0]) if d == 1 else (lambda X: X)
    terms = tuple(netted)
    base_func = base.func

    def func(S, T):
        xs, xt = unwrap(S), unwrap(T)
        extra = 0.0
        for f, s in terms:
            extra = extra + s * np.asarray(f(xs)) * np.asarray(f(xt))
        return base_func(S, T) + extra

    rank = len(terms)
    return Kernel(func=func, domain=base.domain, name=f"{base.name}+rank{rank}",
                  spec={"kind": "perturbed", "base": base.spec, "rank": rank},
                  base=base, perturbations=terms, expensive=base.expensive)


def check_definiteness(kernel, nodes, label="grid"):
    """Raise :class:`DefinitenessError` if the Gram matrix on ``nodes`` is too indefinite."""
    from .errors import DefinitenessError

    ev = np.linalg.eigvalsh(kernel.gram(nodes))
    top = max(ev[-1], 0.0)
    if ev[0] < -EPS_PSD * top:
        raise DefinitenessError(
            f"{kernel.name} is not positive semidefinite on {label}: "
            f"min eigenvalue {ev[0]:.3e} vs max {top:.3e}",
            module="kernels", operation="add_finite_rank")
    return ev
