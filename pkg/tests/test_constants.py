from fractions import Fraction

import numpy as np
import pytest

from hardy_rellich.constants import (
    Regime,
    grushin_constants,
    hardy_constant,
    nu_constant,
    regime_formula_a2,
    regime_gap,
    rellich_constant,
)
from hardy_rellich.weights import WeightParams

HALF = Fraction(1, 2)


class TestHardyConstant:
    def test_classical_three_dimensional(self):
        assert hardy_constant(WeightParams(3, 0, 0)) == Fraction(1, 4)

    def test_invalid_at_critical_dimension(self):
        assert hardy_constant(WeightParams(2, 0, 0)) is None

    def test_weighted_case(self):
        assert hardy_constant(WeightParams(3, 1, 1)) == 1

    def test_monotone_in_dimension_and_exponent(self):
        for delta in (0, HALF, 1, 2):
            values = [hardy_constant(WeightParams(d, float(delta), float(delta))) for d in range(3, 9)]
            assert all(a < b for a, b in zip(values, values[1:]))
        for d in (3, 5, 8):
            values = [
                hardy_constant(WeightParams(d, float(t), float(t)))
                for t in (0, HALF, 1, 2, 3, 4)
            ]
            assert all(a <= b for a, b in zip(values, values[1:]))


class TestNuConstant:
    def test_flat_weight(self):
        assert nu_constant(WeightParams(3, 0, 0)) == 1

    def test_vanishes_at_two(self):
        assert nu_constant(WeightParams(3, 2, 2)) == 0

    def test_endpoint_maximum(self):
        assert nu_constant(WeightParams(3, 1, 5)) == Fraction(9, 4)

    def test_matches_dense_sampling(self):
        # the sampled supremum over an inclusive grid sits at an endpoint
        rng = np.random.default_rng(1)
        for _ in range(25):
            delta, dp = np.round(rng.uniform(0, 4, size=2), 3)
            nu = float(nu_constant(WeightParams(3, float(delta), float(dp))))
            ts = np.linspace(min(delta, dp), max(delta, dp), 100_001)
            sampled = np.max((1 - ts / 2) ** 2)
            assert abs(nu - sampled) <= 1e-9


class TestRellichLedger:
    def test_classical_five_dimensional(self):
        led = rellich_constant(WeightParams(5, 0, 0))
        assert led.a1 == Fraction(9, 4)
        assert led.nu == 1
        assert led.gamma == Fraction(4, 9)
        assert led.a2 == Fraction(25, 16)
        assert led.regime is Regime.SUM_AT_MOST_4
        assert led.hardy_valid and led.rellich_valid
        # closed form d^2 (d-4)^2 / 16 at the flat weight
        assert led.a2 == Fraction(5**2 * 1**2, 16)

    def test_criterion_fails_in_three_dimensions(self):
        led = rellich_constant(WeightParams(3, 0, 0))
        assert led.hardy_valid
        assert not led.rellich_valid
        assert led.a2 is None
        assert led.nu > led.a1

    def test_boundary_case_is_invalid(self):
        # nu == a1 exactly: the strict inequality fails
        led = rellich_constant(WeightParams(4, 0, 0))
        assert led.a1 == 1 and led.nu == 1
        assert not led.rellich_valid

    def test_regime_boundary_agreement(self):
        led = rellich_constant(WeightParams(3, 2, 2))
        assert led.a1 == Fraction(9, 4)
        assert led.nu == 0
        assert led.a2 == Fraction(81, 16)
        d = Fraction(3)
        sum_formula = d * d * (d + 4 - 4) ** 2 / 16
        diff_formula = (d - 0) ** 2 * (d + 4 - 4) ** 2 / 16
        assert led.a2 == sum_formula == diff_formula

    def test_upper_regime_formula(self):
        led = rellich_constant(WeightParams(5, 1, 5))
        assert led.regime is Regime.SUM_AT_LEAST_4
        assert led.a2 == Fraction((5 - 4) ** 2 * (5 + 6 - 4) ** 2, 16)

    def test_sigma_identity(self):
        # (1 - gamma)^2 == a2 / a1^2 whenever the criterion holds
        for d in range(1, 9):
            for delta in (0, HALF, 1, 2, 3, 4):
                for dp in (0, HALF, 1, 2, 3, 4):
                    led = rellich_constant(WeightParams(d, float(delta), float(dp)))
                    if led.rellich_valid:
                        assert led.sigma == led.a2 / led.a1**2

    def test_exactness_over_parameter_grid(self):
        for d in range(1, 9):
            for delta in (0, HALF, 1, 2, 3, 4):
                for dp in (0, HALF, 1, 2, 3, 4):
                    params = WeightParams(d, float(delta), float(dp))
                    led = rellich_constant(params)
                    if led.rellich_valid:
                        assert led.a2 == regime_formula_a2(params)
                        assert led.a2 == (led.a1 - led.nu) ** 2
                    assert regime_gap(params) == 0


class TestRegimeGap:
    @pytest.mark.parametrize(
        "d,delta,dp",
        [(5, 1.0, 5.0), (7, 0.0, 0.0), (4, 3.0, 3.5), (2, 0.5, 4.0), (8, 2.25, 1.75)],
    )
    def test_identity_is_exact(self, d, delta, dp):
        assert regime_gap(WeightParams(d, delta, dp)) == 0


class TestGrushin:
    def test_five_dimensional_first_factor(self):
        led = grushin_constants(WeightParams(5, 0, 0))
        assert led.grushin
        assert led.a1 == Fraction(9, 4)
        assert led.a2 == Fraction(25, 16)

    def test_two_dimensional_weighted(self):
        led = grushin_constants(WeightParams(2, 2, 2))
        assert led.a1 == 1
        assert led.nu == 0
        assert led.a2 == 1

    def test_low_dimension_invalid(self):
        led = grushin_constants(WeightParams(1, 0, 0))
        assert not led.hardy_valid

    def test_matches_base_ledger(self):
        for d in (2, 3, 5):
            base = rellich_constant(WeightParams(d, 1.0, 2.0))
            prod = grushin_constants(WeightParams(d, 1.0, 2.0))
            assert (base.a1, base.nu, base.a2) == (prod.a1, prod.nu, prod.a2)
            assert prod.grushin and not base.grushin
