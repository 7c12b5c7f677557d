import numpy as np
import pytest

from hardy_rellich.constants import hardy_constant, nu_constant
from hardy_rellich.weights import WeightParams, WeightProfile


def profile(dim, delta, delta_prime):
    return WeightProfile(WeightParams(dim, delta, delta_prime))


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            WeightParams(0, 0.0, 0.0)
        with pytest.raises(ValueError):
            WeightParams(3, -0.5, 0.0)
        with pytest.raises(ValueError):
            WeightParams(3, 0.0, float("nan"))

    def test_min_max(self):
        p = WeightParams(3, 2.0, 0.5)
        assert p.delta_min == 0.5
        assert p.delta_max == 2.0


class TestWeightValue:
    def test_flat_weight_is_one(self):
        assert profile(3, 0, 0).c(7.3) == 1.0

    def test_equal_exponents_pure_power(self):
        # delta == delta' takes the exact s**delta branch
        assert profile(3, 2, 2).c(3.0) == 9.0

    def test_mixed_exponents(self):
        # s^1 (1+s)^2 at s=2 -> 2 * 9 = 18, high-precision oracle
        assert profile(3, 1, 3).c(2.0) == pytest.approx(18.0, rel=1e-14)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            profile(3, 1, 1).c(0.0)
        with pytest.raises(ValueError):
            profile(3, 1, 1).c(-2.0)

    def test_overflow_error(self):
        with pytest.raises(OverflowError):
            profile(3, 300.0, 300.0).c(1e300)

    def test_boundary_asymptotics(self):
        # c(s) s^-delta -> 1 at zero and c(s) s^-delta' -> 1 at infinity
        for delta, dp in [(0.0, 0.0), (1.0, 3.0), (2.5, 0.5), (4.0, 4.0)]:
            p = profile(3, delta, dp)
            near0 = p.c(1e-8) * 1e-8 ** (-delta)
            atinf = p.c(1e8) * 1e8 ** (-dp)
            assert near0 == pytest.approx(1.0, rel=1e-6)
            assert atinf == pytest.approx(1.0, rel=1e-6)

    def test_wide_range_stays_finite(self):
        p = profile(3, 4.0, 4.0)
        s = np.logspace(-8, 8, 101)
        assert np.all(np.isfinite(p.c(s)))


class TestLogDerivativeRatio:
    def test_closed_form_value(self):
        assert profile(3, 1, 3).log_derivative_ratio(1.0) == 2.0

    def test_matches_finite_difference_of_log(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            delta, dp = rng.uniform(0, 4, size=2)
            s = 10.0 ** rng.uniform(-5, 5)
            p = profile(3, delta, dp)
            h = s * 1e-5
            fd = s * (p.log_c(s + h) - p.log_c(s - h)) / (2 * h)
            assert p.log_derivative_ratio(s) == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_constant_when_exponents_equal(self):
        p = profile(5, 1.7, 1.7)
        for s in (1e-6, 1.0, 1e6):
            assert p.log_derivative_ratio(s) == pytest.approx(1.7, rel=1e-15)

    def test_boundary_limit_is_delta(self):
        assert profile(3, 0, 4).log_derivative_ratio(1e-12) == pytest.approx(0.0, abs=1e-11)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            profile(3, 1, 1).log_derivative_ratio(-1.0)

    def test_bounded_by_exponents(self):
        rng = np.random.default_rng(0)
        pairs = rng.uniform(0, 4, size=(10_000, 2))
        s = 10.0 ** rng.uniform(-6, 6, size=10_000)
        for (delta, dp), sv in zip(pairs, s):
            rho = profile(3, delta, dp).log_derivative_ratio(sv)
            lo, hi = min(delta, dp), max(delta, dp)
            slack = 1e-13 * max(1.0, hi)
            assert lo - slack <= rho <= hi + slack


class TestGammaEta:
    def test_vanishes_when_ratio_is_two(self):
        p = profile(3, 2, 2)
        for r in (1e-3, 1.0, 1e3):
            assert p.gamma_eta(1.0, r) == 0.0

    def test_flat_weight_unit_value(self):
        assert profile(3, 0, 0).gamma_eta(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_mixed_case_zero_at_unit_radius(self):
        # the log-derivative ratio equals 2 exactly at s=1 for (1, 3)
        assert profile(3, 1, 3).gamma_eta(1.0, 1.0) == pytest.approx(0.0, abs=1e-30)

    def test_matches_gradient_finite_difference(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            delta, dp = rng.uniform(0, 4, size=2)
            r = 10.0 ** rng.uniform(-3, 3)
            a1 = 10.0 ** rng.uniform(-1, 1)
            p = profile(3, delta, dp)
            h = r * 1e-6
            eta_fd = (p.eta(a1, r + h) - p.eta(a1, r - h)) / (2 * h)
            expected = p.c(r) * eta_fd**2
            assert p.gamma_eta(a1, r) == pytest.approx(expected, rel=1e-6, abs=1e-12)

    def test_commutator_bound_pointwise(self):
        # gamma_eta <= (nu / a1) * eta^4 across the admissible family
        rng = np.random.default_rng(9)
        for _ in range(200):
            delta, dp = rng.uniform(0, 4, size=2)
            params = WeightParams(4, delta, dp)
            a1 = hardy_constant(params)
            if a1 is None:
                continue
            a1 = float(a1)
            nu = float(nu_constant(params))
            p = WeightProfile(params)
            r = 10.0 ** rng.uniform(-6, 6, size=32)
            lhs = p.gamma_eta(a1, r)
            rhs = (nu / a1) * p.eta(a1, r) ** 4
            assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-300)

    def test_domain_errors(self):
        p = profile(3, 1, 1)
        with pytest.raises(ValueError):
            p.gamma_eta(1.0, 0.0)
        with pytest.raises(ValueError):
            p.gamma_eta(-1.0, 1.0)

    def test_eta_gradient_consistency(self):
        p = profile(3, 1, 3)
        r = np.logspace(-2, 2, 11)
        rho = p.log_derivative_ratio(r)
        expected = -p.eta(2.0, r) / r * (1 - rho / 2)
        assert np.allclose(p.eta_gradient(2.0, r), expected, rtol=1e-14)
