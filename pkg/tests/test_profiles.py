"""Tests for the separable sum/difference profile machinery.

Where a quantity is available through both the dense-grid route and the
profile route, the two are compared against each other; closed forms are
used wherever one exists.
"""

import numpy as np
import pytest

import spatialqkd.profiles as prof
from spatialqkd.infotheory import conditional_variance, mutual_information
from spatialqkd.pdc_model import (
    SourceParams,
    schmidt_decompose,
    to_distribution,
    to_position_basis,
)


class TestPhaseMatching:
    def test_value_at_zero_argument_is_one(self):
        out = prof.phase_matching_function(np.array([0.0]), 2.0, 50.0, 0.0)
        assert out[0] == pytest.approx(1.0 + 0.0j, abs=1e-15)

    def test_series_branch_is_continuous_with_direct_branch(self):
        # evaluate just below and just above the small-argument cutoff
        lo = prof.phase_matching_function(np.array([0.0]), 2.0, 50.0, 0.99e-8 / 2.0)
        hi = prof.phase_matching_function(np.array([0.0]), 2.0, 50.0, 1.01e-8 / 2.0)
        assert abs(lo[0] - hi[0]) < 1e-7

    def test_intensity_equals_squared_modulus(self):
        q = np.linspace(0.1, 40.0, 97)
        amp = prof.phase_matching_function(q, 2.0, 50.0, 0.0)
        intensity = prof.phase_matching_intensity(q, 2.0, 50.0, 0.0)
        np.testing.assert_allclose(intensity, np.abs(amp) ** 2, rtol=1e-12)

    def test_first_zero_location(self):
        q0 = prof.difference_width_scale(2.0, 50.0, 0.0)
        assert q0 == pytest.approx(np.sqrt(8.0 * np.pi * 50.0 / 2.0), rel=1e-14)
        val = prof.phase_matching_intensity(np.array([q0]), 2.0, 50.0, 0.0)
        assert val[0] < 1e-20

    def test_mismatch_shifts_first_zero(self):
        q0 = prof.difference_width_scale(2.0, 50.0, 1.5)
        assert q0 == pytest.approx(np.sqrt(4.0 * 50.0 * 1.5 + 8.0 * np.pi * 50.0 / 2.0),
                                   rel=1e-14)

    def test_no_real_zero_raises(self):
        # strongly negative mismatch pushes the zero off the real axis
        with pytest.raises(ValueError):
            prof.difference_width_scale(2.0, 50.0, -10.0)


class TestProfileConstruction:
    def test_momentum_profile_shapes(self, scaled_params):
        pk = prof.momentum_profiles(scaled_params)
        assert pk.basis == "momentum"
        assert pk.narrow == "sum"
        assert pk.sum_sigma == pytest.approx(1.0 / scaled_params.waist_w0, rel=1e-14)
        assert np.sum(pk.diff_density) * pk.diff_step == pytest.approx(1.0, abs=1e-10)
        assert pk.diff_cdf[-1] == pytest.approx(1.0, abs=1e-12)
        # the difference density is symmetric
        np.testing.assert_allclose(pk.diff_density, pk.diff_density[::-1],
                                   atol=1e-12 * pk.diff_density.max())

    def test_position_profile_shapes(self, scaled_params):
        pr = prof.position_profiles(scaled_params)
        assert pr.basis == "position"
        assert pr.narrow == "diff"
        assert pr.sum_sigma == pytest.approx(scaled_params.waist_w0, rel=1e-14)
        assert np.sum(pr.diff_density) * pr.diff_step == pytest.approx(1.0, abs=1e-10)
        # trimmed grid stays symmetric about zero
        assert abs(pr.diff_grid[0] + pr.diff_grid[-1]) < 2.0 * pr.diff_step

    def test_profiles_for_basis_dispatch(self, scaled_params):
        assert prof.profiles_for_basis(scaled_params, "momentum").basis == "momentum"
        assert prof.profiles_for_basis(scaled_params, "position").basis == "position"
        with pytest.raises(ValueError):
            prof.profiles_for_basis(scaled_params, "energy")

    def test_marginal_density_normalized(self, scaled_params):
        for p in (prof.momentum_profiles(scaled_params),
                  prof.position_profiles(scaled_params)):
            a = prof.marginal_grid(p, 2 ** 14)
            dens = prof.marginal_density(p, a)
            assert np.all(dens >= 0.0)
            assert np.trapezoid(dens, a) == pytest.approx(1.0, abs=1e-6)
            np.testing.assert_allclose(dens, dens[::-1], atol=1e-12 * dens.max())


class TestQuantiles:
    def test_gaussian_two_sigma_coverage(self):
        grid = np.linspace(-10.0, 10.0, 4001)
        dens = np.exp(-0.5 * grid ** 2) / np.sqrt(2.0 * np.pi)
        half = prof.quantile_half_extent(grid, dens, 0.954499736103642)
        assert half == pytest.approx(2.0, abs=0.01)

    def test_marginal_half_extent_monotone_in_coverage(self, scaled_params):
        pk = prof.momentum_profiles(scaled_params)
        extents = [prof.marginal_half_extent(pk, c) for c in (0.9, 0.99, 0.9994)]
        assert extents[0] < extents[1] < extents[2]


class TestDualRoute:
    """Profile-route quantities must agree with the dense-grid route."""

    def test_momentum_mutual_information(self, scaled_params, scaled_amplitude):
        mi_grid = mutual_information(to_distribution(scaled_amplitude))
        mi_prof = prof.mutual_information_1d(prof.momentum_profiles(scaled_params))
        assert mi_prof == pytest.approx(mi_grid, abs=3e-3)

    def test_position_mutual_information(self, scaled_params, scaled_amplitude):
        dist = to_distribution(to_position_basis(scaled_amplitude))
        mi_grid = mutual_information(dist)
        mi_prof = prof.mutual_information_1d(prof.position_profiles(scaled_params))
        assert mi_prof == pytest.approx(mi_grid, abs=3e-3)

    def test_momentum_conditional_variance(self, scaled_params, scaled_amplitude):
        cv_grid = conditional_variance(to_distribution(scaled_amplitude))
        cv_prof = prof.mean_conditional_variance(prof.momentum_profiles(scaled_params))
        assert cv_prof == pytest.approx(cv_grid, rel=2e-2)

    def test_position_conditional_variance(self, scaled_params, scaled_amplitude):
        dist = to_distribution(to_position_basis(scaled_amplitude))
        cv_grid = conditional_variance(dist)
        cv_prof = prof.mean_conditional_variance(prof.position_profiles(scaled_params))
        assert cv_prof == pytest.approx(cv_grid, rel=5e-3)

    def test_kernel_schmidt_modes_match_grid_svd(self, scaled_params, scaled_amplitude):
        km = prof.kernel_schmidt_modes(scaled_params, n_modes=8)
        with pytest.warns(RuntimeWarning):
            sd = schmidt_decompose(scaled_amplitude, n_modes=8)
        np.testing.assert_allclose(km.coefficients, sd.coefficients[:8], rtol=2e-4)
        # orthonormality of the kernel modes (columns of signal_modes)
        gram = km.signal_modes.conj().T @ km.signal_modes * km.step
        np.testing.assert_allclose(gram, np.eye(8), atol=1e-8)

    def test_kernel_purity_matches_grid_spectrum(self, scaled_params, scaled_amplitude):
        purity = prof.kernel_purity(scaled_params, half_extent=60.0, n_grid=1200)
        full = schmidt_decompose(scaled_amplitude,
                                 n_modes=min(scaled_amplitude.values.shape))
        weights = full.coefficients ** 2
        weights = weights / weights.sum()
        k_grid = 1.0 / np.sum(weights ** 2)
        assert 1.0 / purity == pytest.approx(k_grid, rel=1e-3)


class TestBinnedJoint:
    def test_block_sums_nest(self, scaled_params):
        pk = prof.momentum_profiles(scaled_params)
        half = prof.marginal_half_extent(pk, 0.9994)
        coarse = prof.binned_pixel_joint(pk, np.linspace(-half, half, 9), subdiv=96)
        fine = prof.binned_pixel_joint(pk, np.linspace(-half, half, 17), subdiv=48)
        folded = fine.reshape(8, 2, 8, 2).sum(axis=(1, 3))
        np.testing.assert_allclose(folded, coarse, rtol=1e-10, atol=1e-14)

    def test_row_sums_track_marginal_masses(self, scaled_params):
        pk = prof.momentum_profiles(scaled_params)
        half = prof.marginal_half_extent(pk, 0.9994)
        edges = np.linspace(-half, half, 17)
        joint = prof.binned_pixel_joint(pk, edges, subdiv=64)
        masses = prof.marginal_pixel_masses(pk, edges)
        # the binned joint evaluates the wide factor at the slice center,
        # an approximation that is ~1e-5 in the physical regime but reaches
        # a few percent on the oscillatory tail of this low-mode test
        # source; the exactly averaged marginal masses bound that error
        np.testing.assert_allclose(joint.sum(axis=1), masses, rtol=0.15)
        assert joint.sum() == pytest.approx(1.0, abs=5e-3)
        # the quadrature subdivides one axis and windows the other, so
        # exchange symmetry also holds only to the approximation error
        np.testing.assert_allclose(joint, joint.T, atol=0.03 * joint.max())


class TestCrossBasis:
    def test_mixed_density_mass_is_one(self, scaled_params):
        mi, mass = prof.cross_basis_mutual_information(scaled_params)
        assert mass == pytest.approx(1.0, abs=5e-3)
        assert mi >= 0.0

    def test_cross_basis_far_below_matched_basis(self, scaled_params):
        # the low-mode-count test source leaks a little more between bases
        # than a physical source, but the contrast must stay large
        mi_cross, _ = prof.cross_basis_mutual_information(scaled_params)
        mi_same = prof.mutual_information_1d(prof.momentum_profiles(scaled_params))
        assert mi_cross < 0.05 * mi_same


class TestTransverse2D:
    def test_vector_information_exceeds_scalar(self, scaled_params):
        ent = prof.transverse_entropies_2d(scaled_params)
        mi_1d = prof.mutual_information_1d(prof.momentum_profiles(scaled_params))
        # discarding one transverse component cannot gain information
        assert ent.mi >= mi_1d
        assert ent.h_joint == pytest.approx(ent.h_sum + ent.h_diff - 2.0, abs=1e-12)

    def test_memory_budget_is_enforced(self, scaled_params):
        with pytest.raises(prof.ResolutionBudgetError):
            prof.transverse_entropies_2d(scaled_params, memory_budget_mb=0.01)
