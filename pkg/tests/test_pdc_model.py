"""Tests for the gridded two-photon state model.

The double-Gaussian surrogate from conftest supplies closed forms for
the Fourier transform, the marginal width and the Schmidt spectrum; the
physical amplitude is checked for symmetry, normalization and
resolution guards.
"""

import numpy as np
import pytest

from conftest import (
    double_gaussian_amplitude,
    double_gaussian_schmidt_weights,
)
from spatialqkd.errors import GridResolutionError, NormalizationError
from spatialqkd.infotheory import mutual_information
from spatialqkd.pdc_model import (
    Grid1D,
    JointAmplitude,
    SourceParams,
    auto_grid,
    build_amplitude,
    degenerate_wavenumber,
    marginal,
    schmidt_decompose,
    schmidt_decompose_separable,
    to_distribution,
    to_momentum_basis,
    to_position_basis,
    transverse_entropies,
    waist_from_fwhm,
)


class TestHelpers:
    def test_waist_from_fwhm(self):
        assert waist_from_fwhm(2.0) == pytest.approx(2.0 / np.sqrt(2.0 * np.log(2.0)),
                                                     rel=1e-15)

    def test_degenerate_wavenumber(self):
        # daughters at 800 nm inside n = 1.66 material
        expected = 2.0 * np.pi * 1.66 / (2.0 * 400.0 * 1e-6)
        assert degenerate_wavenumber(400.0, 1.66) == pytest.approx(expected, rel=1e-14)

    def test_defaults_are_consistent(self, default_params):
        assert default_params.waist_w0 == pytest.approx(waist_from_fwhm(2.0), rel=1e-15)
        assert default_params.wavenumber_K == pytest.approx(
            degenerate_wavenumber(400.0), rel=1e-14)
        assert default_params.sum_width_momentum == pytest.approx(
            1.0 / default_params.waist_w0, rel=1e-15)


class TestValidation:
    def test_source_params_rejects_nonpositive_lengths(self):
        with pytest.raises(ValueError):
            SourceParams(waist_w0=-1.0, crystal_length=2.0, wavenumber_K=50.0)
        with pytest.raises(ValueError):
            SourceParams(waist_w0=1.0, crystal_length=0.0, wavenumber_K=50.0)

    def test_source_params_rejects_bad_pair_probability(self):
        with pytest.raises(ValueError):
            SourceParams(waist_w0=1.0, crystal_length=2.0, wavenumber_K=50.0,
                         pair_probability=1.5)

    def test_grid_requires_power_of_two(self):
        with pytest.raises(ValueError):
            Grid1D(-1.0, 1.0, 100)

    def test_grid_requires_ordered_bounds(self):
        with pytest.raises(ValueError):
            Grid1D(1.0, -1.0, 64)

    def test_grid_properties(self):
        grid = Grid1D(-2.0, 2.0, 128)
        assert grid.step == pytest.approx(4.0 / 127.0, rel=1e-15)
        assert grid.half_extent == 2.0
        assert grid.points[0] == -2.0 and grid.points[-1] == 2.0

    def test_amplitude_norm_guard(self):
        grid = Grid1D(-1.0, 1.0, 64)
        with pytest.raises(NormalizationError):
            JointAmplitude(basis="momentum", signal_grid=grid, idler_grid=grid,
                           values=np.ones((64, 64)))

    def test_auto_grid_minimum_size(self, scaled_params):
        with pytest.raises(ValueError):
            auto_grid(scaled_params, num=32)

    def test_auto_grid_extent(self, scaled_params):
        grid = auto_grid(scaled_params, num=256, coverage_factor=5.0)
        widest = max(scaled_params.sum_width_momentum,
                     scaled_params.difference_scale_momentum)
        assert grid.half_extent == pytest.approx(5.0 * widest, rel=1e-12)

    def test_transform_checks_basis_tag(self, scaled_amplitude):
        with pytest.raises(ValueError):
            to_momentum_basis(scaled_amplitude)
        pos = to_position_basis(scaled_amplitude)
        with pytest.raises(ValueError):
            to_position_basis(pos)

    def test_marginal_photon_argument(self, scaled_amplitude):
        dist = to_distribution(scaled_amplitude)
        with pytest.raises(ValueError):
            marginal(dist, photon="herald")

    def test_transverse_entropies_dims(self, scaled_params):
        with pytest.raises(ValueError):
            transverse_entropies(scaled_params, dims=3)


class TestBuildAmplitude:
    def test_default_regime_rejects_affordable_grid(self, default_params):
        # the narrow pump feature would be unresolved on any 1024-point
        # grid spanning the wide phase-matching structure
        with pytest.raises(GridResolutionError, match="points per axis"):
            build_amplitude(default_params, auto_grid(default_params, num=1024))

    def test_amplitude_is_normalized(self, scaled_amplitude):
        assert scaled_amplitude.norm_squared == pytest.approx(1.0, abs=1e-12)
        assert scaled_amplitude.basis == "momentum"

    def test_amplitude_is_exchange_symmetric(self, scaled_amplitude):
        v = scaled_amplitude.values
        np.testing.assert_allclose(v, v.T, atol=1e-12 * np.abs(v).max())

    def test_distribution_mass_is_one(self, scaled_amplitude):
        dist = to_distribution(scaled_amplitude)
        assert dist.total_mass == pytest.approx(1.0, abs=1e-12)


class TestFourierTransforms:
    def test_round_trip_reproduces_the_amplitude(self, scaled_params, scaled_amplitude):
        # the doubly reciprocal grid sits half a step off the original
        # (an even-length symmetric grid has no zero point), so the round
        # trip is compared against the amplitude rebuilt on that grid
        back = to_momentum_basis(to_position_basis(scaled_amplitude))
        rebuilt = build_amplitude(scaled_params, back.signal_grid, back.idler_grid)
        # the algebraic phase-matching tail wraps around the periodic DFT
        # boundary, so the comparison excludes a margin near the edges
        m = 256
        np.testing.assert_allclose(back.values[m:-m, m:-m],
                                   rebuilt.values[m:-m, m:-m], rtol=0.0,
                                   atol=1e-8 * np.abs(rebuilt.values).max())
        assert back.norm_squared == pytest.approx(1.0, abs=1e-12)

    def test_parseval(self, scaled_amplitude):
        pos = to_position_basis(scaled_amplitude)
        assert pos.norm_squared == pytest.approx(1.0, abs=1e-12)
        assert pos.basis == "position"

    def test_reciprocal_grid(self, scaled_amplitude):
        pos = to_position_basis(scaled_amplitude)
        n = scaled_amplitude.signal_grid.num
        dk = scaled_amplitude.signal_grid.step
        assert pos.signal_grid.step == pytest.approx(2.0 * np.pi / (n * dk), rel=1e-12)

    def test_double_gaussian_transforms_to_reciprocal_widths(self):
        sigma_sum, sigma_diff = 1.3, 0.4
        amp = double_gaussian_amplitude(sigma_sum, sigma_diff, num=512,
                                        span_sigmas=10.0)
        pos = to_position_basis(amp)
        xs = pos.signal_grid.points[:, None]
        xi = pos.idler_grid.points[None, :]
        # reciprocal widths: 1/sigma in each rotated coordinate
        expected = np.exp(-(xs + xi) ** 2 * sigma_sum ** 2 / 4.0
                          - (xs - xi) ** 2 * sigma_diff ** 2 / 4.0)
        expected /= np.sqrt(np.sum(expected ** 2)
                            * pos.signal_grid.step * pos.idler_grid.step)
        np.testing.assert_allclose(np.abs(pos.values), expected, rtol=0.0,
                                   atol=1e-8 * expected.max())


class TestDoubleGaussianSchmidt:
    SIGMA_SUM, SIGMA_DIFF = 2.0, 0.5

    @pytest.fixture
    def amp(self):
        return double_gaussian_amplitude(self.SIGMA_SUM, self.SIGMA_DIFF, num=512)

    def test_spectrum_is_geometric(self, amp):
        sd = schmidt_decompose(amp, n_modes=24)
        expected = double_gaussian_schmidt_weights(self.SIGMA_SUM, self.SIGMA_DIFF, 24)
        np.testing.assert_allclose(sd.coefficients ** 2, expected, atol=1e-4)

    def test_schmidt_number_closed_form(self, amp):
        sd = schmidt_decompose(amp)
        z = (self.SIGMA_SUM - self.SIGMA_DIFF) / (self.SIGMA_SUM + self.SIGMA_DIFF)
        mu = z * z
        assert sd.schmidt_number == pytest.approx((1.0 + mu) / (1.0 - mu), rel=1e-6)
        assert sd.captured_weight == pytest.approx(1.0, abs=1e-9)

    def test_modes_are_orthonormal(self, amp):
        sd = schmidt_decompose(amp, n_modes=12)
        step = amp.signal_grid.step
        gram = sd.signal_modes.conj().T @ sd.signal_modes * step
        np.testing.assert_allclose(gram, np.eye(12), atol=1e-10)

    def test_truncation_warns(self, amp):
        with pytest.warns(RuntimeWarning, match="truncation"):
            schmidt_decompose(amp, n_modes=4)

    def test_coefficients_descend(self, amp):
        sd = schmidt_decompose(amp, n_modes=16)
        assert np.all(np.diff(sd.coefficients) <= 0.0)

    def test_product_state_has_single_mode(self):
        amp = double_gaussian_amplitude(0.8, 0.8, num=256)
        sd = schmidt_decompose(amp)
        assert sd.coefficients[0] == pytest.approx(1.0, abs=1e-10)
        assert sd.schmidt_number == pytest.approx(1.0, abs=1e-9)
        assert sd.entropy == pytest.approx(0.0, abs=1e-8)

    def test_product_state_carries_no_information(self):
        amp = double_gaussian_amplitude(0.8, 0.8, num=256)
        assert mutual_information(to_distribution(amp)) == pytest.approx(0.0, abs=1e-9)

    def test_marginal_width(self, amp):
        dist = to_distribution(amp)
        dens = marginal(dist, photon="signal")
        a = dist.signal_grid.points
        var = np.sum(a ** 2 * dens) * dist.signal_grid.step
        expected = (self.SIGMA_SUM ** 2 + self.SIGMA_DIFF ** 2) / 4.0
        assert var == pytest.approx(expected, rel=1e-6)


class TestSeparableDecomposition:
    def test_matches_grid_svd(self, scaled_params, scaled_amplitude):
        sep = schmidt_decompose_separable(scaled_params, n_modes=6, n_grid=800)
        with pytest.warns(RuntimeWarning):
            grid = schmidt_decompose(scaled_amplitude, n_modes=6)
        np.testing.assert_allclose(sep.coefficients, grid.coefficients, rtol=2e-4)
        assert sep.captured_weight == pytest.approx(
            float(np.sum(sep.coefficients ** 2)), rel=1e-12)

    def test_two_dimensional_information_exceeds_one_dimensional(self, default_params):
        one = transverse_entropies(default_params, dims=1)
        two = transverse_entropies(default_params, dims=2)
        assert two.mi >= one.mi
        assert one.mi > 0.0
