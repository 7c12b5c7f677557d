import numpy as np
import pytest

from hardy_rellich.agmon import (
    AgmonMetric,
    build_cutoffs,
    completeness_probe,
    d2_distance,
    eikonal_max,
    energy_decay,
    graph_norm_gap,
    tapered_power_values,
)
from hardy_rellich.form_calculus import DiscreteForm, DiscreteFunction, energy, l2_inner
from hardy_rellich.radial_spectral import RadialGrid
from hardy_rellich.weights import WeightParams, WeightProfile


@pytest.fixture(scope="module")
def grid():
    return RadialGrid.log_spaced(1e-4, 1e4, 1025)


@pytest.fixture(scope="module")
def metric(grid):
    return AgmonMetric(grid)


class TestDistance:
    def test_coincident_points(self):
        assert d2_distance(1.0, 1.0) == 0.0

    def test_log_ratio(self):
        assert d2_distance(np.e, np.e**3) == pytest.approx(2.0, abs=1e-12)

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(4)
        r = 10.0 ** rng.uniform(-6, 6, size=(50, 3))
        for a, b, c in r:
            assert d2_distance(a, b) == d2_distance(b, a)
            assert d2_distance(a, c) <= d2_distance(a, b) + d2_distance(b, c) + 1e-12

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            d2_distance(0.0, 1.0)
        with pytest.raises(ValueError):
            d2_distance(1.0, -1.0)


class TestCompletenessProbe:
    def test_decade_shells(self):
        shells = [10.0**-k for k in range(1, 7)]
        probe = completeness_probe(1.0, shells)
        expected = np.log(10.0) * np.arange(1, 7)
        assert np.max(np.abs(probe - expected)) <= 1e-12
        assert np.all(np.diff(probe) > 0)

    def test_exceeds_any_threshold(self):
        m = 5.0
        shells = [10.0**-k for k in range(1, 7)]
        probe = completeness_probe(1.0, shells)
        first = int(np.argmax(probe > m))
        assert probe[first] > m
        assert shells[first] < np.exp(-m)

    def test_rejects_bad_shells(self):
        with pytest.raises(ValueError):
            completeness_probe(1.0, [0.1, 0.2])
        with pytest.raises(ValueError):
            completeness_probe(-1.0, [0.1, 0.01])


class TestCutoffs:
    def test_values_clipped_and_supported(self, grid, metric):
        cutoffs = build_cutoffs(metric, 1.0, 5)
        for (inner, outer), values in zip(cutoffs.shells, cutoffs.values):
            assert np.all((0.0 <= values) & (values <= 1.0))
            outside = (grid.nodes <= inner) | (grid.nodes >= outer)
            assert np.all(values[outside] == 0.0)
            plateau = metric.distance_to_complement(grid.nodes, inner, outer) > 1.0
            assert np.all(values[plateau] == 1.0)

    def test_nodewise_formula(self, grid, metric):
        cutoffs = build_cutoffs(metric, 0.7, 3)
        inner, outer = cutoffs.shells[1]
        dist = np.minimum(np.log(grid.nodes / inner), np.log(outer / grid.nodes))
        expected = np.clip(dist / 0.7, 0.0, 1.0)
        expected[(grid.nodes <= inner) | (grid.nodes >= outer)] = 0.0
        assert np.allclose(cutoffs.values[1], expected, rtol=0, atol=1e-15)

    def test_pointwise_convergence_to_one(self, grid, metric):
        cutoffs = build_cutoffs(metric, 1.0, 8)
        idx = grid.n // 3
        seq = [values[idx] for values in cutoffs.values]
        assert all(b >= a for a, b in zip(seq, seq[1:]))
        assert seq[-1] == 1.0

    def test_gradient_support_inside_metric_collar(self, grid, metric):
        m = 1.0
        cutoffs = build_cutoffs(metric, m, 5)
        em = np.exp(m)
        for (inner, outer), values in zip(cutoffs.shells, cutoffs.values):
            quotients = np.diff(values)
            active = np.nonzero(quotients != 0.0)[0]
            for e in active:
                lo, hi = grid.nodes[e], grid.nodes[e + 1]
                in_inner_collar = hi > inner and lo < inner * em
                in_outer_collar = hi > outer / em and lo < outer
                assert in_inner_collar or in_outer_collar

    def test_huge_plateau_scale_never_reaches_one(self, grid, metric):
        # one-decade shell, metric width 50: the ramp cannot finish
        cutoffs = build_cutoffs(metric, 50.0, 1)
        assert np.max(cutoffs.values[0]) < 1.0

    def test_rejects_bad_arguments(self, metric):
        with pytest.raises(ValueError):
            build_cutoffs(metric, 0.0, 3)
        with pytest.raises(ValueError):
            build_cutoffs(metric, 1.0, 0)


class TestEikonalBound:
    @pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
    def test_per_element_difference_quotients(self, grid, metric, m):
        cutoffs = build_cutoffs(metric, m, 6)
        cap = m**-2
        for values in cutoffs.values:
            assert eikonal_max(grid, values) <= cap + 1e-10

    def test_doubling_m_quarters_the_cap(self, grid, metric):
        for m in (0.5, 1.0, 3.0):
            assert (2 * m) ** -2 == pytest.approx(m**-2 / 4, rel=1e-15)
            cutoffs = build_cutoffs(metric, 2 * m, 4)
            for values in cutoffs.values:
                assert eikonal_max(grid, values) <= (2 * m) ** -2 + 1e-10

    def test_lipschitz_in_metric(self, grid, metric):
        cutoffs = build_cutoffs(metric, 1.3, 4)
        rng = np.random.default_rng(0)
        ii = rng.integers(0, grid.n, 500)
        jj = rng.integers(0, grid.n, 500)
        for values in cutoffs.values:
            lhs = np.abs(values[ii] - values[jj])
            rhs = np.abs(np.log(grid.nodes[ii] / grid.nodes[jj])) / 1.3
            assert np.all(lhs <= rhs + 1e-12)


@pytest.fixture(scope="module")
def setup(grid, metric):
    profile = WeightProfile(WeightParams(3, 0, 0))
    form = DiscreteForm.build(profile, grid)
    cutoffs = build_cutoffs(metric, 1.0, 7)
    alpha = (3 + 0 - 2 - 0.1) / 2
    phi = DiscreteFunction(tapered_power_values(grid, alpha, (1e-3, 1e2)))
    return form, cutoffs, phi


class TestEnergyDecay:
    def test_ramp_bound_and_final_decay(self, setup):
        form, cutoffs, phi = setup
        values, bounds = energy_decay(form, cutoffs, phi)
        for v, b in zip(values, bounds):
            assert v <= b * (1 + 1e-12) + 1e-300
        e_phi = float(energy(form, phi.field(form)))
        assert values[-1] <= 1e-6 * e_phi
        assert min(values) == values[-1]

    def test_zero_once_ramps_leave_support(self, setup):
        form, cutoffs, phi = setup
        values, _ = energy_decay(form, cutoffs, phi)
        # the support (1e-3, 1e2) sits inside shell 4 = [1e-4, 1e4] with
        # its ramps in regions where phi vanishes
        assert values[3] == 0.0
        assert all(v == 0.0 for v in values[3:])

    def test_graph_norm_gap_decreases_to_zero(self, setup):
        form, cutoffs, phi = setup
        gaps = graph_norm_gap(form, cutoffs, phi)
        phi_f = phi.field(form)
        scale = float(l2_inner(form, phi_f) + energy(form, phi_f))
        assert gaps[-1] <= 1e-6 * scale
        assert all(b <= a * (1 + 1e-12) + 1e-300 for a, b in zip(gaps, gaps[1:]))


class TestTaperedTrial:
    def test_support_and_interior_values(self, grid):
        values = tapered_power_values(grid, 0.45, (1e-3, 1e2))
        r = grid.nodes
        assert np.all(values[(r < 1e-3) | (r > 1e2)] == 0.0)
        inside = (r > 1e-2) & (r < 1e1)
        assert np.allclose(values[inside], r[inside] ** -0.45, rtol=1e-12)

    def test_rejects_support_outside_grid(self, grid):
        with pytest.raises(ValueError):
            tapered_power_values(grid, 0.45, (1e-6, 1e2))
