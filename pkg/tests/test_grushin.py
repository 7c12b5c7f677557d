import numpy as np
import pytest
from scipy.integrate import quad

from hardy_rellich.constants import grushin_constants, rellich_constant
from hardy_rellich.errors import UnsupportedConfigurationError
from hardy_rellich.grushin import (
    GrushinConfig,
    cross_validate_product_norm,
    grushin_first_factor_schedule,
    grushin_hardy_estimate,
    grushin_rellich_norm,
    laplacian_apply,
    product_quotient,
    radial_factor,
    second_factor,
    second_factor_bump,
    strong_apply,
)
from hardy_rellich.radial_spectral import (
    GridSpec,
    RadialGrid,
    assemble,
    rellich_quotient_min,
)
from hardy_rellich.weights import WeightParams, WeightProfile

FAST_SCHEDULE = [GridSpec(1024, 1e-6, 1e2), GridSpec(2048, 1e-10, 1e2)]


@pytest.fixture(scope="module")
def config():
    return GrushinConfig(params=WeightParams(3, 0.0, 0.0), dim2=2)


@pytest.fixture(scope="module")
def separated(config):
    report, _ = grushin_hardy_estimate(config, schedule=FAST_SCHEDULE)
    psi = radial_factor(config, report.final_forms, report.final.vector)
    chi = second_factor_bump(config.second_grid)
    return report, psi, chi


class TestSecondFactor:
    def test_bump_norms_positive(self, config):
        chi = second_factor_bump(config.second_grid)
        assert chi.norm_sq > 0 and chi.grad_sq > 0 and chi.lap_sq > 0

    def test_gradient_is_laplacian_pairing(self, config):
        # (chi, -lap chi) equals the summed squared increments exactly
        chi = second_factor_bump(config.second_grid)
        h = config.second_grid.h
        lap = laplacian_apply(chi.values, h)
        pairing = -(chi.values[1:-1] * lap).sum() * h
        assert pairing == pytest.approx(chi.grad_sq, rel=1e-12)

    def test_rescaled_bump_preserves_l2_norm(self):
        # continuum oracle: integral of (lam^(1/2) chi(lam x))^2 dx is
        # lam-independent; adaptive quadrature on the smooth formula
        def bump(x):
            return np.cos(np.pi / 2 * x) ** 2 if abs(x) < 1 else 0.0

        base, _ = quad(lambda x: bump(x) ** 2, -1, 1)
        for lam in (0.5, 2.0, 7.0):
            val, _ = quad(lambda x: lam * bump(lam * x) ** 2, -1 / lam, 1 / lam)
            assert val == pytest.approx(base, rel=1e-10)

    def test_rejects_nonvanishing_ends(self, config):
        with pytest.raises(ValueError):
            second_factor(config.second_grid, np.ones(config.second_grid.n))


class TestProductQuotient:
    def test_small_lambda_recovers_first_factor(self, separated, config):
        report, psi, chi = separated
        first = psi.energy / psi.hardy_norm_sq
        value = product_quotient(config, psi, chi, 1e-8)
        assert value == pytest.approx(first, rel=1e-10)
        assert value >= first

    def test_dominates_first_factor_for_every_lambda(self, separated, config):
        report, psi, chi = separated
        first = psi.energy / psi.hardy_norm_sq
        for lam in (1.0, 0.1, 1e-2, 1e-3):
            assert product_quotient(config, psi, chi, lam) >= first

    def test_affine_in_lambda_squared(self, separated, config):
        # two-point slope oracle from the separation identity
        _, psi, chi = separated
        q1 = product_quotient(config, psi, chi, 0.5)
        q2 = product_quotient(config, psi, chi, 0.25)
        slope = (q1 - q2) / (0.5**2 - 0.25**2)
        expected = psi.b_mass * chi.grad_sq / (psi.hardy_norm_sq * chi.norm_sq)
        assert slope == pytest.approx(expected, rel=1e-9)

    def test_first_factor_eigenvalue_consistency(self, separated):
        # the assembled quadratic forms reproduce the solver's eigenvalue
        report, psi, _ = separated
        assert psi.energy / psi.hardy_norm_sq == pytest.approx(
            report.final.value, rel=1e-12
        )

    def test_constant_b_rescaling_keeps_limit(self, config, separated):
        report, psi, chi = separated
        scaled = GrushinConfig(params=config.params, dim2=config.dim2, b=5.0)
        psi5 = radial_factor(scaled, psi.forms, psi.values)
        q0 = product_quotient(config, psi, chi, 1e-7)
        q5 = product_quotient(scaled, psi5, chi, 1e-7)
        assert q5 == pytest.approx(q0, rel=1e-10)

    def test_radial_b_profile_accepted_on_hardy_path(self, config, separated):
        report, psi, chi = separated
        profiled = GrushinConfig(
            params=config.params, dim2=1, b=lambda r: 1.0 + 0.5 / (1.0 + r)
        )
        psi_b = radial_factor(profiled, psi.forms, psi.values)
        value = product_quotient(profiled, psi_b, chi, 0.1)
        first = psi_b.energy / psi_b.hardy_norm_sq
        assert value >= first

    def test_rejects_degenerate_inputs(self, separated, config):
        _, psi, chi = separated
        with pytest.raises(ValueError):
            product_quotient(config, psi, chi, 0.0)


class TestHardyEstimate:
    def test_schedule_is_one_sided(self):
        sched = grushin_first_factor_schedule(WeightParams(3, 0.0, 0.0))
        assert all(spec.r_max == sched[0].r_max for spec in sched)
        assert sched[-1].r_min < sched[0].r_min
        outward = grushin_first_factor_schedule(WeightParams(3, 3.0, 1.0))
        assert all(spec.r_min == outward[0].r_min for spec in outward)

    def test_gap_shrinks_with_lambda(self, config):
        report, quotients = grushin_hardy_estimate(
            config, schedule=FAST_SCHEDULE, lambdas=(1.0, 1e-2, 1e-4)
        )
        gaps = [q - report.target for q in quotients]
        assert gaps[0] > gaps[1] > gaps[2] > 0

    def test_invalid_first_factor_rejected(self):
        bad = GrushinConfig(params=WeightParams(1, 0.0, 0.0))
        with pytest.raises(UnsupportedConfigurationError):
            grushin_hardy_estimate(bad, schedule=FAST_SCHEDULE)


class TestRellichNorm:
    def test_three_terms_scale_as_powers_of_lambda(self, config):
        # fit N(lam) = A + B lam^2 + C lam^4 through three evaluations and
        # compare against the constituent terms; the smooth test function
        # keeps the three terms commensurate so the fit resolves them
        forms = assemble(
            WeightProfile(config.params), RadialGrid.log_spaced(1e-2, 1e2, 129)
        )
        r = forms.interior_nodes
        psi = radial_factor(config, forms, np.exp(-np.log(r) ** 2))
        chi = second_factor_bump(config.second_grid)
        lams = np.array([1.0, 0.5, 0.25])
        vals = np.array([grushin_rellich_norm(config, psi, chi, l) for l in lams])
        vander = np.vander(lams**2, 3, increasing=True)
        a_fit, b_fit, c_fit = np.linalg.solve(vander, vals)
        h1 = strong_apply(psi.forms, psi.values)
        d_mass = psi.forms.lumped_mass
        assert a_fit == pytest.approx(float((h1**2 * d_mass).sum()) * chi.norm_sq, rel=1e-9)
        assert b_fit == pytest.approx(
            2.0 * float((psi.values * h1 * d_mass).sum()) * chi.grad_sq, rel=1e-8
        )
        assert c_fit == pytest.approx(
            float((psi.values**2 * d_mass).sum()) * chi.lap_sq, rel=1e-8
        )

    def test_small_lambda_recovers_first_factor_rellich(self):
        # at lam -> 0 the separated strong-operator quotient reduces to the
        # radial one; use the radial minimizer as the test function
        params = WeightParams(5, 0.0, 0.0)
        cfg = GrushinConfig(params=params, dim2=1)
        forms = assemble(WeightProfile(params), RadialGrid.log_spaced(1e-3, 1e3, 513))
        est = rellich_quotient_min(forms)
        psi = radial_factor(cfg, forms, est.vector)
        chi = second_factor_bump(cfg.second_grid)
        w2 = forms.rellich_weight
        den_first = est.vector @ w2.matvec(est.vector)
        quot = grushin_rellich_norm(cfg, psi, chi, 1e-7) / (den_first * chi.norm_sq)
        assert quot == pytest.approx(est.value, rel=1e-6)
        assert float(rellich_constant(params).a2) <= quot * (1 + 1e-6)

    def test_positive_terms(self, separated, config):
        _, psi, chi = separated
        h1 = strong_apply(psi.forms, psi.values)
        cross = float((psi.values * h1 * psi.forms.lumped_mass).sum())
        if cross >= 0:
            assert grushin_rellich_norm(config, psi, chi, 1.0) > 0

    def test_requires_constant_b(self, separated):
        _, psi, chi = separated
        profiled = GrushinConfig(
            params=WeightParams(3, 0.0, 0.0), b=lambda r: 1.0 + 0.1 * r
        )
        with pytest.raises(UnsupportedConfigurationError):
            grushin_rellich_norm(profiled, psi, chi)
        with pytest.raises(UnsupportedConfigurationError):
            cross_validate_product_norm(profiled)


class TestCrossValidation:
    def test_tensor_grid_agreement(self, config):
        assert cross_validate_product_norm(config, n1=64, n2=64) <= 1e-8

    def test_with_scaled_constant_b(self):
        cfg = GrushinConfig(params=WeightParams(4, 1.0, 1.0), b=3.0)
        assert cross_validate_product_norm(cfg, n1=48, n2=48) <= 1e-8


class TestLedgers:
    def test_grushin_matches_punctured_space(self):
        for d1 in (2, 3, 5):
            prod = grushin_constants(WeightParams(d1, 1.0, 0.5))
            base = rellich_constant(WeightParams(d1, 1.0, 0.5))
            assert (prod.a1, prod.nu, prod.a2) == (base.a1, base.nu, base.a2)
