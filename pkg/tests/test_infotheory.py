"""Tests for entropy, mutual-information and key-rate estimators.

Correlated Gaussians and the double-Gaussian surrogate provide exact
closed forms for every estimator in the module; the discrete estimators
are additionally exercised with property-based checks.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    double_gaussian_amplitude,
    double_gaussian_conditional_variance,
    double_gaussian_mi_bits,
)
from spatialqkd.errors import NormalizationError
from spatialqkd.infotheory import (
    WITNESS_BOUND,
    WitnessReport,
    conditional_entropy,
    conditional_variance,
    cross_basis_mutual_information,
    differential_entropy,
    discrete_entropy,
    discrete_mutual_information,
    gaussian_pair_distribution,
    keyrate_lower_bound,
    keyrate_lower_bound_source,
    mutual_information,
    pure_state_witness,
)
from spatialqkd.pdc_model import Grid1D, to_distribution, to_position_basis

LOG2_2PIE = float(np.log2(2.0 * np.pi * np.e))


class TestDifferentialEntropy:
    def test_unit_gaussian(self):
        grid = np.linspace(-8.0, 8.0, 4096)
        step = grid[1] - grid[0]
        dens = np.exp(-0.5 * grid ** 2) / np.sqrt(2.0 * np.pi)
        assert differential_entropy(dens, step) == pytest.approx(0.5 * LOG2_2PIE,
                                                                 abs=1e-6)

    def test_uniform_density(self):
        dens = np.full(200, 0.5)
        assert differential_entropy(dens, 0.01) == pytest.approx(1.0, abs=1e-12)

    def test_normalization_guard(self):
        with pytest.raises(NormalizationError):
            differential_entropy(np.full(100, 1.0), 0.5)

    def test_two_dimensional_additivity(self):
        grid = np.linspace(-8.0, 8.0, 512)
        step = grid[1] - grid[0]
        g1 = np.exp(-0.5 * grid ** 2) / np.sqrt(2.0 * np.pi)
        g2 = np.exp(-0.5 * (grid / 0.5) ** 2) / (0.5 * np.sqrt(2.0 * np.pi))
        h2d = differential_entropy(g1[:, None] * g2[None, :], step)
        h1 = differential_entropy(g1, step)
        h2 = differential_entropy(g2, step)
        assert h2d == pytest.approx(h1 + h2, abs=1e-9)


class TestGaussianPair:
    @pytest.mark.parametrize("rho", [0.0, 0.5, 0.9])
    def test_mutual_information_closed_form(self, rho):
        dist = gaussian_pair_distribution(rho)
        expected = -0.5 * np.log2(1.0 - rho * rho)
        assert mutual_information(dist) == pytest.approx(expected, abs=1e-3)

    def test_mutual_information_strong_correlation(self):
        # the rho = 0.99 ridge needs a finer grid to resolve
        dist = gaussian_pair_distribution(0.99, grid=Grid1D(-8.0, 8.0, 2048))
        expected = -0.5 * np.log2(1.0 - 0.99 ** 2)
        assert mutual_information(dist) == pytest.approx(expected, abs=1e-3)

    @pytest.mark.parametrize("rho", [0.0, 0.5, 0.9, 0.99])
    def test_conditional_variance_closed_form(self, rho):
        grid = Grid1D(-8.0, 8.0, 2048) if rho > 0.95 else None
        dist = gaussian_pair_distribution(rho, grid=grid)
        assert conditional_variance(dist) == pytest.approx(1.0 - rho * rho, rel=1e-6)

    def test_sign_symmetry(self):
        plus = mutual_information(gaussian_pair_distribution(0.7))
        minus = mutual_information(gaussian_pair_distribution(-0.7))
        assert plus == pytest.approx(minus, abs=1e-10)

    def test_rejects_degenerate_correlation(self):
        with pytest.raises(ValueError):
            gaussian_pair_distribution(1.0)

    def test_conditional_variance_given_argument(self):
        dist = gaussian_pair_distribution(0.5)
        both = (conditional_variance(dist, given="idler"),
                conditional_variance(dist, given="signal"))
        assert both[0] == pytest.approx(both[1], rel=1e-12)
        with pytest.raises(ValueError):
            conditional_variance(dist, given="eve")


class TestDoubleGaussianClosedForms:
    SIGMA_SUM, SIGMA_DIFF = 1.6, 0.45

    @pytest.fixture
    def dist(self):
        return to_distribution(double_gaussian_amplitude(self.SIGMA_SUM,
                                                         self.SIGMA_DIFF, num=512))

    def test_mutual_information(self, dist):
        expected = double_gaussian_mi_bits(self.SIGMA_SUM, self.SIGMA_DIFF)
        assert mutual_information(dist) == pytest.approx(expected, abs=1e-4)

    def test_conditional_variance(self, dist):
        expected = double_gaussian_conditional_variance(self.SIGMA_SUM,
                                                        self.SIGMA_DIFF)
        assert conditional_variance(dist) == pytest.approx(expected, rel=1e-6)

    def test_conditional_entropy_is_gaussian(self, dist):
        # jointly Gaussian: H(A|B) saturates the variance bound exactly
        var = conditional_variance(dist)
        assert conditional_entropy(dist) == pytest.approx(
            0.5 * np.log2(2.0 * np.pi * np.e * var), abs=1e-4)


class TestEntropyVarianceBound:
    """H(A|B) can never exceed the Gaussian entropy at the same variance."""

    def constructed_distributions(self):
        yield gaussian_pair_distribution(0.0)
        yield gaussian_pair_distribution(0.9)
        amp = double_gaussian_amplitude(1.6, 0.45, num=512)
        yield to_distribution(amp)
        yield to_distribution(to_position_basis(amp))

    def test_bound_holds_everywhere(self):
        for dist in self.constructed_distributions():
            h = conditional_entropy(dist)
            var = conditional_variance(dist)
            assert h <= 0.5 * np.log2(2.0 * np.pi * np.e * var) + 1e-9


class TestDiscreteEstimators:
    def test_uniform_entropy(self):
        assert discrete_entropy(np.full(8, 0.125)) == pytest.approx(3.0, abs=1e-12)

    def test_point_mass_entropy(self):
        p = np.zeros(5)
        p[2] = 1.0
        assert discrete_entropy(p) == 0.0

    def test_entropy_normalization_guard(self):
        with pytest.raises(NormalizationError):
            discrete_entropy(np.array([0.5, 0.6]))

    def test_diagonal_joint_reaches_log_n(self):
        joint = np.eye(16) / 16.0
        assert discrete_mutual_information(joint) == pytest.approx(4.0, abs=1e-12)

    def test_product_joint_carries_nothing(self):
        pa = np.array([0.1, 0.4, 0.5])
        pb = np.array([0.3, 0.7])
        assert discrete_mutual_information(np.outer(pa, pb)) == pytest.approx(
            0.0, abs=1e-12)

    def test_coarsening_cannot_increase_information(self):
        rng = np.random.default_rng(42)
        joint = rng.random((8, 8))
        joint /= joint.sum()
        coarse = joint.reshape(4, 2, 4, 2).sum(axis=(1, 3))
        assert (discrete_mutual_information(coarse)
                <= discrete_mutual_information(joint) + 1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(1e-3, 1.0), min_size=12, max_size=12))
    def test_information_bounds(self, cells):
        joint = np.array(cells).reshape(3, 4)
        joint /= joint.sum()
        mi = discrete_mutual_information(joint)
        assert mi >= -1e-12
        assert mi <= min(discrete_entropy(joint.sum(axis=1)),
                         discrete_entropy(joint.sum(axis=0))) + 1e-12
        assert mi == pytest.approx(discrete_mutual_information(joint.T), abs=1e-12)


class TestKeyRate:
    def test_bounds_coincide_for_gaussian_inputs(self):
        report = keyrate_lower_bound(gaussian_pair_distribution(0.9, basis="position"),
                                     gaussian_pair_distribution(0.9))
        assert report.entropic_bound == pytest.approx(report.variance_bound, abs=1e-4)
        assert report.i_ae == pytest.approx(report.i_ab - report.entropic_bound,
                                            rel=1e-12)

    def test_delta_i_closed_form(self):
        rho = 0.9
        report = keyrate_lower_bound(gaussian_pair_distribution(rho, basis="position"),
                                     gaussian_pair_distribution(rho))
        # two Gaussian conditionals of variance 1 - rho^2
        expected = (np.log2(np.pi * np.e)
                    - np.log2(2.0 * np.pi * np.e * (1.0 - rho * rho)))
        assert report.delta_i == pytest.approx(expected, abs=1e-3)

    def test_source_route_matches_grid_route(self, scaled_params, scaled_amplitude):
        grid_report = keyrate_lower_bound(
            to_distribution(to_position_basis(scaled_amplitude)),
            to_distribution(scaled_amplitude))
        source_report = keyrate_lower_bound_source(scaled_params)
        assert source_report.i_ab == pytest.approx(grid_report.i_ab, abs=3e-3)
        assert source_report.entropic_bound == pytest.approx(
            grid_report.entropic_bound, abs=2e-2)
        assert source_report.variance_bound == pytest.approx(
            grid_report.variance_bound, abs=2e-2)

    def test_witness_property_passthrough(self):
        report = keyrate_lower_bound(gaussian_pair_distribution(0.9, basis="position"),
                                     gaussian_pair_distribution(0.9))
        assert report.witness.product == pytest.approx(
            report.variance_position * report.variance_momentum, rel=1e-12)


class TestWitness:
    def test_bound_constant(self):
        assert WITNESS_BOUND == 0.25

    def test_satisfied_at_and_above_bound(self):
        assert WitnessReport(variance_position=0.5, variance_momentum=0.5).satisfied
        assert not WitnessReport(variance_position=0.6, variance_momentum=0.5).satisfied

    def test_default_source_is_certified(self, default_params):
        report = pure_state_witness(default_params)
        assert report.product < WITNESS_BOUND
        assert report.satisfied


class TestCrossBasis:
    def test_product_amplitude_has_no_cross_information(self):
        amp = double_gaussian_amplitude(0.8, 0.8, num=256)
        assert cross_basis_mutual_information(amp) == pytest.approx(0.0, abs=1e-9)

    def test_entangled_amplitude_stays_small(self, scaled_amplitude):
        mi_cross = cross_basis_mutual_information(scaled_amplitude)
        mi_same = mutual_information(to_distribution(scaled_amplitude))
        assert 0.0 <= mi_cross < 0.05 * mi_same
