import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from pathrkhs.domain import Domain
from pathrkhs.errors import DefinitenessError, EvaluationError, ParameterError
from pathrkhs.kernels import (add_finite_rank, check_definiteness, make_brownian_bridge,
                              make_circle_kernel, make_fbm, make_matern, make_ou,
                              make_riemann_liouville, make_wiener, matern_profile,
                              ou_frequencies, ou_spectrum, product_spectrum, tensor)
from pathrkhs.quadrature import gauss_legendre
from pathrkhs.spectral import nystrom_decompose

ZOO = {
    "wiener": make_wiener,
    "bridge": make_brownian_bridge,
    "ou1": lambda: make_ou(1, 2.0, 3.0),
    "ou2": lambda: make_ou(2, 2.0, 3.0),
    "fbm(0.3)": lambda: make_fbm(0.3),
    "fbm(0.8)": lambda: make_fbm(0.8),
    "rl(0.3)": lambda: make_riemann_liouville(0.3),
    "rl(0.75)": lambda: make_riemann_liouville(0.75),
    "matern(0.5)": lambda: make_matern(0.5),
    "matern(1.5)": lambda: make_matern(1.5, 2.0),
    "matern(0.7)": lambda: make_matern(0.7),
    "matern(1.5,d=2)": lambda: make_matern(1.5, domain=Domain.unit_box(2)),
    "circle(n^-3)": lambda: make_circle_kernel(decay=3.0, c0=1.0),
    "circle(coeffs)": lambda: make_circle_kernel([0.5, 1.0, 0.25]),
    "tensor(wiener,matern)": lambda: tensor([make_wiener(), make_matern(1.5)]),
    "wiener+t^2": lambda: add_finite_rank(make_wiener(), [lambda t: t**2], [1]),
}


def _points(kernel, rng, m):
    d = kernel.dimension
    return rng.uniform(0.0, 1.0, size=(m, d))


class TestInvariants:
    @pytest.mark.parametrize("name", sorted(ZOO))
    def test_symmetry(self, name, rng):
        k = ZOO[name]()
        S, T = _points(k, rng, 100), _points(k, rng, 100)
        a, b = k(S, T), k(T, S)
        assert np.all(np.abs(a - b) <= 1e-12 * (1 + np.abs(a)))

    @pytest.mark.parametrize("name", sorted(ZOO))
    def test_gram_psd(self, name, rng):
        """Min eigenvalue of a 64-node Gram matrix is >= -1e-8 times the max."""
        k = ZOO[name]()
        X = _points(k, rng, 64)
        ev = np.linalg.eigvalsh(k.gram(X))
        assert ev[0] >= -1e-8 * ev[-1]

    def test_fbm_half_is_wiener(self, rng):
        S, T = rng.uniform(size=(2, 200, 1))
        np.testing.assert_allclose(make_fbm(0.5)(S, T), make_wiener()(S, T), atol=1e-14)

    def test_rl_half_is_wiener(self, rng):
        S, T = rng.uniform(size=(2, 50, 1))
        np.testing.assert_allclose(make_riemann_liouville(0.5)(S, T), make_wiener()(S, T),
                                   rtol=1e-10, atol=1e-14)

    def test_cancelling_pair_returns_base(self):
        base = make_wiener()
        f = lambda t: t  # noqa: E731
        assert add_finite_rank(base, [f, f], [1, -1]) is base

    def test_tensor_diagonal_is_product(self, rng):
        f1, f2, f3 = make_wiener(), make_matern(0.7), make_fbm(0.3)
        k = tensor([f1, f2, f3])
        X = rng.uniform(size=(40, 3))
        expected = f1.diag(X[:, :1]) * f2.diag(X[:, 1:2]) * f3.diag(X[:, 2:])
        assert np.array_equal(k.diag(X), expected)


class TestClosedForms:
    def test_wiener(self):
        k = make_wiener()
        assert k(0.3, 0.7) == 0.3
        assert k(1.0, 1.0) == 1.0
        assert abs(k.known_spectrum(1)[0] - 0.4052847) < 1e-7

    def test_bridge(self):
        k = make_brownian_bridge()
        assert k(0.5, 0.5) == 0.25
        assert np.all(k(0.0, np.linspace(0, 1, 11)) == 0.0)
        assert abs(k.known_spectrum(1)[0] - 0.1013212) < 1e-7

    def test_ou(self):
        assert make_ou(1)(0.4, 0.4) == 1.0
        assert make_ou(2)(0.0, 0.0) == 0.0
        assert abs(make_ou(1, 2.0, 3.0)(0.0, 1.0) - 2 * math.exp(-3)) < 1e-15

    def test_ou_parameters(self):
        for args in [(3, 1, 1), (1, 0, 1), (2, 1, -1)]:
            with pytest.raises(ParameterError):
                make_ou(*args)

    def test_fbm(self):
        assert make_fbm(0.5)(0.3, 0.7) == pytest.approx(0.3, abs=1e-15)
        for a in (0.1, 0.75, 0.95):
            assert make_fbm(a)(0.0, 0.6) == 0.0
        expected = 0.5 * (0.25**1.5 + 1 - 0.75**1.5)
        assert make_fbm(0.75)(0.25, 1.0) == pytest.approx(expected, rel=1e-14)
        assert abs(expected - 0.23775) < 1e-5

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2])
    def test_fbm_range(self, alpha):
        with pytest.raises(ParameterError):
            make_fbm(alpha)

    def test_rl_diagonal(self):
        """k(1,1) = (2/3) / Gamma(1.25)^2 = 0.811459..."""
        value = make_riemann_liouville(0.75)(1.0, 1.0)
        assert value == pytest.approx((2.0 / 3.0) / special.gamma(1.25) ** 2, rel=1e-12)
        assert abs(value - 0.811459) < 1e-6

    def test_rl_zero(self):
        assert make_riemann_liouville(0.3)(0.0, 0.8) == 0.0

    @pytest.mark.parametrize("alpha", [0.2, 0.3, 0.75, 0.9])
    def test_rl_off_diagonal_hypergeometric(self, alpha, rng):
        """Against int_0^s v^g (t - s + v)^g dv written through 2F1, away from the diagonal."""
        g = alpha - 0.5
        k = make_riemann_liouville(alpha)
        for _ in range(10):
            s, t = np.sort(rng.uniform(0.05, 1.0, 2))
            if t - s < 0.2:
                continue
            h = t - s
            ref = h**g * s ** (g + 1) / (g + 1) * special.hyp2f1(-g, g + 1, g + 2, -s / h)
            ref /= special.gamma(alpha + 0.5) ** 2
            assert k(s, t) == pytest.approx(ref, rel=1e-8)

    def test_rl_reports_failure(self):
        k = make_riemann_liouville(0.2, quad_tol=1.2e-14)
        with pytest.raises(EvaluationError, match="achieved relative tolerance"):
            k(0.5, 0.50001)

    def test_rl_tolerance_floor(self):
        with pytest.raises(ParameterError):
            make_riemann_liouville(0.3, quad_tol=1e-300)

    def test_matern_half(self):
        assert make_matern(0.5)(0.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)

    def test_matern_three_halves(self):
        k = make_matern(1.5, domain=Domain.interval(0, 3))
        assert k(0.0, 2.0) == pytest.approx(3 * math.exp(-2), rel=1e-14)
        assert abs(3 * math.exp(-2) - 0.4060058) < 1e-7

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.7, 1.5, 2.5])
    def test_matern_normalized_diagonal(self, alpha, rng):
        k = make_matern(alpha, 1.7)
        X = rng.uniform(size=(20, 1))
        np.testing.assert_allclose(k.diag(X), 1.0, rtol=1e-14)

    @pytest.mark.parametrize("alpha", [0.5, 1.5, 2.5])
    def test_half_integer_matches_bessel(self, alpha):
        r = np.linspace(0.01, 30, 200)
        direct = r**alpha * special.kv(alpha, r)
        np.testing.assert_allclose(matern_profile(alpha, r, normalized=False), direct, rtol=1e-12)

    def test_matern_raw_limit(self):
        k = make_matern(0.7, normalized=False)
        assert k(0.3, 0.3) == pytest.approx(2**-0.3 * special.gamma(0.7), rel=1e-14)

    def test_circle_single_harmonic(self):
        k = make_circle_kernel([0.0, 1.0])
        s, t = 0.1, 0.35
        assert k(s, t) == pytest.approx(2 * math.cos(2 * math.pi * (s - t)), abs=1e-15)
        np.testing.assert_allclose(k.known_spectrum(3), [1.0, 1.0, 0.0])

    def test_circle_constant(self):
        k = make_circle_kernel([1.0])
        assert k(0.2, 0.9) == 1.0
        np.testing.assert_allclose(k.known_spectrum(5), [1.0])

    def test_circle_zeta(self):
        mu = make_circle_kernel(decay=4.0).known_spectrum(2 * 10**6)
        assert np.sum(np.sqrt(mu)) == pytest.approx(math.pi**2 / 3, rel=1e-6)
        assert abs(math.pi**2 / 3 - 3.2899) < 1e-4

    def test_circle_truncation_bound(self, rng):
        k = make_circle_kernel(decay=2.5, n_terms=64)
        full = make_circle_kernel(decay=2.5, n_terms=4096)
        r = rng.uniform(size=50)
        assert np.max(np.abs(k(r, 0.0) - full(r, 0.0))) <= k.truncation_error

    def test_circle_negative_coefficient(self):
        with pytest.raises(ParameterError):
            make_circle_kernel([1.0, -0.1])

    def test_tensor_of_wieners(self):
        k = tensor([make_wiener(), make_wiener()])
        assert k([0.3, 0.5], [0.7, 0.2]) == pytest.approx(0.06, abs=1e-16)

    def test_tensor_spectrum(self):
        np.testing.assert_allclose(product_spectrum([[1, 0.25], [1, 0.25]], 4),
                                   [1, 0.25, 0.25, 0.0625])

    def test_tensor_rejects_circle(self):
        with pytest.raises(ParameterError):
            tensor([make_circle_kernel([1.0, 1.0]), make_wiener()])


class TestFiniteRank:
    def test_wiener_minus_t_is_bridge(self, rng):
        k = add_finite_rank(make_wiener(), [lambda t: t], [-1])
        assert k(0.5, 0.5) == 0.25
        S, T = rng.uniform(size=(2, 100, 1))
        np.testing.assert_allclose(k(S, T), make_brownian_bridge()(S, T), atol=1e-15)

    def test_ou2_from_ou1(self):
        a, s = 1.0, 1.0
        k = add_finite_rank(make_ou(1, a, s), [lambda t: math.sqrt(a) * np.exp(-s * t)], [-1])
        assert k(0.0, 0.0) == 0.0
        X = np.linspace(0, 1, 17)
        np.testing.assert_allclose(k.gram(X), make_ou(2, a, s).gram(X), atol=1e-15)

    def test_empty_is_identity(self):
        base = make_wiener()
        assert add_finite_rank(base, [], []) is base

    def test_indefinite_detected(self):
        k = add_finite_rank(make_wiener(), [lambda t: 2 * t], [-1])
        nodes = gauss_legendre(64).nodes
        with pytest.raises(DefinitenessError, match="grid64"):
            check_definiteness(k, nodes, "grid64")
        with pytest.raises(DefinitenessError):
            nystrom_decompose(k, gauss_legendre(64))

    def test_bad_signs(self):
        with pytest.raises(ParameterError):
            add_finite_rank(make_wiener(), [lambda t: t], [2])
        with pytest.raises(ParameterError):
            add_finite_rank(make_wiener(), [lambda t: t], [1, 1])


class TestOUSpectrum:
    def test_frequencies_solve_characteristic_equation(self):
        sigma = 1.3
        w = ou_frequencies(50, sigma)
        resid = (w**2 - sigma**2) * np.sin(w) - 2 * sigma * w * np.cos(w)
        assert np.max(np.abs(resid) / (w**2 + sigma**2)) < 1e-12
        assert np.all((w > np.arange(50) * np.pi) & (w < np.arange(1, 51) * np.pi))

    def test_against_nystrom(self):
        d = nystrom_decompose(make_ou(1, 2.0, 3.0), gauss_legendre(512))
        np.testing.assert_allclose(d.eigenvalues[:10], ou_spectrum(10, 2.0, 3.0), rtol=1e-3)


class TestScaling:
    @given(st.floats(0.01, 100.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_scaled_evaluates_multiple(self, c, s, t):
        k = make_fbm(0.3)
        assert k.scaled(c)(s, t) == pytest.approx(c * k(s, t), rel=1e-14, abs=1e-300)

    def test_scaled_spectrum(self):
        k = make_wiener().scaled(3.0)
        np.testing.assert_allclose(k.known_spectrum(4), 3.0 * make_wiener().known_spectrum(4))
        assert k.spec["scale"] == 3.0

    def test_nonpositive_scale(self):
        with pytest.raises(ParameterError):
            make_wiener().scaled(0.0)
