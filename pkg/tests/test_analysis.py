import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pathrkhs.analysis import (DIVERGENT, EXISTS, INCONCLUSIVE, NOT_EXISTS, SUMMABLE,
                               dominance_trace, dyadic_partial_sums, estimate_decay,
                               finite_rank_difference, increments_converge,
                               rkhs_path_verdict, summability_test, tensor_verdict,
                               top_products)
from pathrkhs.domain import Domain
from pathrkhs.errors import ConditioningError, ParameterError, UsageError, WindowError
from pathrkhs.kernels import (make_brownian_bridge, make_circle_kernel, make_fbm, make_matern,
                              make_ou, make_wiener, tensor)
from pathrkhs.quadrature import circle_uniform, gauss_legendre, uniform_midpoint
from pathrkhs.spectral import decompose


def power_law(rho, c=1.0, n=1024):
    return c * np.arange(1, n + 1, dtype=float) ** -rho


class TestDecay:
    @pytest.mark.parametrize("rho", [1.5, 2.0, 3.0, 4.0])
    def test_exact_power_law(self, rho):
        est = estimate_decay(power_law(rho, 0.37))
        assert abs(est.rho - rho) <= 1e-6
        assert est.c == pytest.approx(0.37, rel=1e-9)
        assert est.r2 == pytest.approx(1.0)

    @given(st.floats(0.5, 6.0), st.floats(1e-3, 1e3))
    @settings(max_examples=40, deadline=None)
    def test_recovery_property(self, rho, c):
        assert abs(estimate_decay(power_law(rho, c)).rho - rho) <= 1e-6

    def test_default_window(self):
        est = estimate_decay(power_law(2.0))
        assert est.window == (16, 256)

    def test_window_bounds(self):
        with pytest.raises(WindowError):
            estimate_decay(power_law(2.0), window=(1, 100))
        with pytest.raises(WindowError):
            estimate_decay(power_law(2.0), window=(10, 300))

    def test_too_few_eigenvalues(self):
        with pytest.raises(WindowError):
            estimate_decay(power_law(2.0, n=30))

    def test_wiener(self, wiener_1024):
        assert abs(estimate_decay(wiener_1024).rho - 2.0) <= 0.05

    def test_matern_three_halves(self, matern32_1024):
        assert abs(estimate_decay(matern32_1024).rho - 4.0) <= 0.3

    def test_matern_half(self):
        d = decompose(make_matern(0.5), gauss_legendre(1024))
        assert abs(estimate_decay(d).rho - 2.0) <= 0.1

    def test_invariants(self, matern32_1024):
        est = estimate_decay(matern32_1024)
        lo, hi = est.window
        assert lo >= 2 and hi <= matern32_1024.floor_index and hi <= matern32_1024.size // 4
        assert 0 <= est.r2 <= 1


class TestSummability:
    def test_wiener_divergent_through_exact_spectrum(self, wiener_1024):
        res = summability_test(wiener_1024, 0.5)
        assert res.exponent_outcome == INCONCLUSIVE
        assert res.outcome == DIVERGENT
        incs = np.diff([v for _, v in res.exact_partial_sums])
        np.testing.assert_allclose(incs[-4:], math.log(2) / math.pi, rtol=1e-3)

    def test_cubic_summable(self):
        assert summability_test(power_law(3.0), 0.5).outcome == SUMMABLE

    def test_matern_three_quarters(self):
        d = decompose(make_matern(0.75), gauss_legendre(1024))
        assert summability_test(d, 0.5).outcome == SUMMABLE

    def test_margin(self):
        res = summability_test(power_law(2.04), 0.5)
        assert res.margin == 0.05
        assert res.outcome == INCONCLUSIVE

    def test_divergent_exponent(self):
        assert summability_test(power_law(1.5), 0.5).outcome == DIVERGENT

    def test_power_kernel_summability(self):
        """p = 1 - beta: sum mu^(1-beta) for mu ~ i^-4 is finite iff beta < 3/4."""
        mu = power_law(4.0)
        assert summability_test(mu, 1 - 0.5).outcome == SUMMABLE
        assert summability_test(mu, 1 - 0.9).outcome == DIVERGENT

    def test_dyadic_helpers(self):
        sums = dyadic_partial_sums(np.ones(100), start=16)
        assert [N for N, _ in sums] == [16, 32, 64, 100]
        assert increments_converge([(16, 1.0), (32, 1.5), (64, 1.75), (128, 1.875)]) is True
        assert increments_converge([(16, 1.0), (32, 2.0), (64, 3.0), (128, 4.0)]) is False
        assert increments_converge([(16, 1.0), (32, 2.0)]) is None

    def test_rejects_nonpositive_p(self):
        with pytest.raises(ParameterError):
            summability_test(power_law(3.0), 0.0)


class TestVerdict:
    def test_wiener(self):
        v = rkhs_path_verdict(make_wiener())
        assert v.decision == NOT_EXISTS
        assert v.beta_window is None

    def test_fbm_three_quarters(self):
        v = rkhs_path_verdict(make_fbm(0.75))
        assert v.decision == EXISTS
        lo, hi = v.beta_window
        assert 0 < lo <= hi < 1
        assert hi == pytest.approx(min(1 - 1 / v.rho_evidence.rho - v.summability.margin, 1))
        assert v.extras["monitors"][lo]["converged"]

    def test_matern_quarter(self):
        v = rkhs_path_verdict(make_matern(0.25))
        assert v.decision == NOT_EXISTS
        assert v.summability.outcome == DIVERGENT
        assert v.rho_evidence.rho + v.summability.margin < 2

    def test_fbm_monotone(self):
        expected = {0.2: NOT_EXISTS, 0.35: NOT_EXISTS, 0.65: EXISTS, 0.8: EXISTS}
        for alpha, want in expected.items():
            assert rkhs_path_verdict(make_fbm(alpha)).decision == want, alpha
        for alpha in (0.45, 0.55):
            got = rkhs_path_verdict(make_fbm(alpha)).decision
            opposite = EXISTS if alpha < 0.5 else NOT_EXISTS
            assert got != opposite, alpha

    def test_json_schema(self):
        v = rkhs_path_verdict(make_circle_kernel(decay=4.0))
        out = v.to_json()
        assert set(out) == {"kernel", "n_nodes", "rho", "rho_ci", "sum_sqrt_partial",
                            "decision", "beta_window", "notes"}
        assert out["decision"] == EXISTS
        assert any("monitor grid" in n for n in out["notes"])

    def test_perturbed_uses_base_spectrum(self):
        v = rkhs_path_verdict(make_ou(2))
        assert v.decision == NOT_EXISTS
        assert any("interlacing" in n for n in v.notes)

    def test_circle_exact(self):
        assert rkhs_path_verdict(make_circle_kernel(decay=1.5)).decision == NOT_EXISTS

    @given(st.floats(1e-3, 1e3))
    @settings(max_examples=6, deadline=None)
    def test_scale_invariance(self, c):
        for k in (make_circle_kernel(decay=1.5), make_circle_kernel(decay=4.0)):
            assert rkhs_path_verdict(k.scaled(c)).decision == rkhs_path_verdict(k).decision

    def test_scale_invariance_interval(self):
        for k in (make_wiener(), make_fbm(0.75)):
            assert rkhs_path_verdict(k.scaled(42.0)).decision == rkhs_path_verdict(k).decision


class TestTensor:
    def test_matern_five(self, matern32_1024):
        v = tensor_verdict(matern32_1024, 5)
        assert v.decision == EXISTS
        assert len(v.extras["tensor_spectrum"]) == 64

    def test_wiener_two(self, wiener_1024):
        assert tensor_verdict(wiener_1024, 2).decision == NOT_EXISTS

    def test_products(self):
        np.testing.assert_allclose(top_products([[1, 0.25], [1, 0.25]], 4),
                                   [1, 0.25, 0.25, 0.0625])

    @given(st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=30),
           st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=30),
           st.integers(1, 50))
    @settings(max_examples=60, deadline=None)
    def test_products_brute_force(self, a, b, budget):
        brute = np.sort(np.multiply.outer(a, b).ravel())[::-1][:budget]
        np.testing.assert_allclose(top_products([a, b], budget), brute)

    def test_heap_path(self):
        a = 1.0 / np.arange(1, 3001) ** 2
        got = top_products([a, a, a], 40)
        brute = np.sort(np.multiply.outer(np.multiply.outer(a[:40], a[:40]), a[:40]).ravel())[::-1][:40]
        np.testing.assert_allclose(got, brute)

    def test_tensor_kernel_verdict(self):
        k = tensor([make_matern(1.5), make_matern(1.5)])
        assert rkhs_path_verdict(k).decision == EXISTS

    def test_needs_two_factors(self, wiener_1024):
        with pytest.raises(ParameterError):
            tensor_verdict(wiener_1024, 1)


class TestFiniteRank:
    grid = gauss_legendre(64)

    def test_wiener_bridge(self):
        rep = finite_rank_difference(make_wiener(), make_brownian_bridge(), self.grid)
        assert rep.rank == 1 and [r for _, r in rep.ranks] == [1, 1]

    def test_ou(self):
        assert finite_rank_difference(make_ou(1), make_ou(2), self.grid).rank == 1

    def test_self(self):
        assert finite_rank_difference(make_wiener(), make_wiener(), self.grid).rank == 0

    def test_symmetric(self):
        pairs = [(make_wiener(), make_brownian_bridge()), (make_ou(1, 2, 3), make_ou(2, 2, 3)),
                 (make_wiener(), make_matern(0.5))]
        for a, b in pairs:
            assert (finite_rank_difference(a, b, self.grid).to_json()
                    == finite_rank_difference(b, a, self.grid).to_json())

    def test_infinite_rank(self):
        rep = finite_rank_difference(make_wiener(), make_matern(0.5), self.grid)
        assert rep.rank is None
        assert rep.to_json()["rank"] == "NOT_FINITE_RANK"

    @given(st.floats(1e-3, 1e3))
    @settings(max_examples=10, deadline=None)
    def test_scale_invariance(self, c):
        """Thresholds are relative, so rescaling both kernels leaves the rank alone."""
        a, b = make_wiener(), make_brownian_bridge()
        assert finite_rank_difference(a.scaled(c), b.scaled(c), self.grid).rank == 1

    def test_domain_mismatch(self):
        with pytest.raises(UsageError):
            finite_rank_difference(make_wiener(), make_circle_kernel([1.0]), self.grid)

    def test_small_grid(self):
        with pytest.raises(ParameterError):
            finite_rank_difference(make_wiener(), make_wiener(), gauss_legendre(16))


class TestDominance:
    def test_summable_pair(self):
        rep = dominance_trace(make_circle_kernel(decay=4.0, c0=1.0),
                              make_circle_kernel(decay=2.0, c0=1.0))
        assert rep.exact_trace == pytest.approx(1 + math.pi**2 / 3, rel=1e-6)
        assert rep.bounded and rep.exact_bounded
        assert rep.traces[-1] == pytest.approx(rep.exact_trace, rel=0.05)
        assert all(t >= 0 for t in rep.traces)

    def test_non_summable_pair(self):
        rep = dominance_trace(make_circle_kernel(decay=3.0, c0=1.0),
                              make_circle_kernel(decay=2.5, c0=1.0))
        assert not rep.bounded and not rep.exact_bounded

    def test_identity_not_hs(self):
        k = make_ou(1)
        rep = dominance_trace(k, k)
        assert not rep.bounded
        for n, t in zip(rep.grid_sizes, rep.traces):
            assert n * (1 - 1e-5) <= t <= n

    def test_conditioning(self):
        k = make_circle_kernel(decay=8.0, c0=1.0)
        with pytest.raises(ConditioningError):
            dominance_trace(k, k, grid_sizes=(256,), ridge=1e-14)

    def test_domain_mismatch(self):
        with pytest.raises(UsageError):
            dominance_trace(make_wiener(), make_circle_kernel([1.0]))
