"""Entropies, mutual information and security bounds on gridded densities.

All entropies are differential entropies in bits unless a function name
says discrete. Two-photon quantities accept the `JointDistribution`
container from `pdc_model`; the strongly entangled regime where such
grids are unaffordable is served by companion `*_source` functions that
evaluate the same quantities through the separable factorization in
`profiles`.

The security chain implemented here: the secret key rate under forward
reconciliation is Delta I = I_AB - I_AE; an entropic uncertainty
relation for individual attacks bounds Eve's conditional entropy
through the complementary basis, giving

    Delta I >= log2(pi e) - H(r_A|r_B) - H(k_A|k_B)
            >= (1/2) log2( 1 / (4 Var(r_A|r_B) Var(k_A|k_B)) ),

where the second line uses the maximum-entropy property of the Gaussian
at fixed variance. A positive second line is therefore guaranteed by
the conditional-variance product falling below 1/4, which doubles as an
EPR-type entanglement witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import profiles
from .errors import NormalizationError, NumericalModelError
from .pdc_model import Grid1D, JointAmplitude, JointDistribution, _axis_fourier

_NORM_TOL = 1e-6
_ROUTE_TOL = 1e-6

LOG2_PI_E = float(np.log2(np.pi * np.e))


def differential_entropy(density: np.ndarray, step, *,
                         norm_tol: float = _NORM_TOL) -> float:
    """Plug-in differential entropy of a gridded density, in bits.

    Parameters
    ----------
    density : ndarray
        Nonnegative density samples, any dimensionality.
    step : float or sequence of float
        Grid step per axis (a scalar is broadcast to all axes).

    Raises
    ------
    NormalizationError
        If the density does not integrate to 1 within ``norm_tol``.
    """
    density = np.asarray(density, dtype=float)
    steps = np.broadcast_to(np.asarray(step, dtype=float), (density.ndim,))
    volume = float(np.prod(steps))
    total = float(density.sum() * volume)
    if abs(total - 1.0) > norm_tol:
        raise NormalizationError(
            f"density integrates to {total!r}, off 1 by more than {norm_tol}")
    p = density[density > 0.0]
    return float(-np.sum(p * np.log2(p)) * volume)


def marginal_entropy(dist: JointDistribution, photon: str = "signal") -> float:
    """Differential entropy of one photon's marginal, in bits."""
    if photon == "signal":
        density = dist.values.sum(axis=1) * dist.idler_grid.step
        step = dist.signal_grid.step
    elif photon == "idler":
        density = dist.values.sum(axis=0) * dist.signal_grid.step
        step = dist.idler_grid.step
    else:
        raise ValueError(f"photon must be 'signal' or 'idler', got {photon!r}")
    return differential_entropy(density, step)


def joint_entropy(dist: JointDistribution) -> float:
    """Differential entropy of the two-photon joint density, in bits."""
    return differential_entropy(dist.values,
                                (dist.signal_grid.step, dist.idler_grid.step))


def conditional_entropy(dist: JointDistribution, given: str = "idler") -> float:
    """H(A|B) = h(A, B) - h(B), in bits, with B the ``given`` photon."""
    return joint_entropy(dist) - marginal_entropy(dist, given)


def mutual_information(dist: JointDistribution) -> float:
    """Mutual information of a gridded joint density, in bits.

    Evaluated along two algebraically equivalent routes, the entropy
    identity h(A) + h(B) - h(A,B) and the direct relative entropy
    against the product of marginals, which must agree to 1e-6 bits;
    disagreement indicates a broken grid and raises. The direct route is
    returned because it is immune to cancellation between large
    entropies.
    """
    ds, di = dist.signal_grid.step, dist.idler_grid.step
    pa = dist.values.sum(axis=1) * di
    pb = dist.values.sum(axis=0) * ds
    via_entropies = (differential_entropy(pa, ds) + differential_entropy(pb, di)
                     - joint_entropy(dist))

    outer = pa[:, None] * pb[None, :]
    mask = dist.values > 0.0
    direct = float(np.sum(dist.values[mask] *
                          np.log2(dist.values[mask] / outer[mask])) * ds * di)
    if abs(direct - via_entropies) > _ROUTE_TOL:
        raise NumericalModelError(
            f"mutual information routes disagree: direct {direct!r} vs "
            f"entropy identity {via_entropies!r}")
    return direct


def conditional_variance(dist: JointDistribution, given: str = "idler") -> float:
    """Mean conditional variance E_B[Var(A|B)], in grid units squared.

    The average over the conditioning photon of the variance of the
    other photon's conditional density. This is the variance that enters
    the security bound: by concavity of the logarithm it upper-bounds
    the exponentiated conditional entropy exactly as a single slice
    variance would, while being measurable from binned joint counts.
    """
    if given == "idler":
        w = dist.values
        coord = dist.signal_grid.points[:, None]
    elif given == "signal":
        w = dist.values.T
        coord = dist.idler_grid.points[:, None]
    else:
        raise ValueError(f"given must be 'signal' or 'idler', got {given!r}")
    norms = w.sum(axis=0)
    good = norms > 0.0
    m1 = (w * coord).sum(axis=0)[good] / norms[good]
    m2 = (w * coord * coord).sum(axis=0)[good] / norms[good]
    weights = norms[good] / norms[good].sum()
    return float(np.sum(weights * (m2 - m1 * m1)))


def cross_basis_mutual_information(amp: JointAmplitude) -> float:
    """Mutual information between one photon's momentum and the other's position.

    Transforms only the idler axis of a gridded momentum amplitude to
    position and evaluates the mutual information of the resulting mixed
    density. For any product amplitude this vanishes identically; for
    the physical state it must stay negligible for conjugate-basis
    sifting to discard no information.
    """
    if amp.basis != "momentum":
        raise ValueError(f"expected a momentum amplitude, got basis {amp.basis!r}")
    mixed, idler_grid = _axis_fourier(amp.values, amp.idler_grid, axis=1, sign=+1.0)
    dist = JointDistribution(basis="momentum-position",
                             signal_grid=amp.signal_grid,
                             idler_grid=idler_grid,
                             values=np.abs(mixed) ** 2)
    return mutual_information(dist)


def cross_basis_mutual_information_source(params, **kwargs) -> float:
    """Cross-basis mutual information at full physical parameters.

    Streams the mixed-basis density row by row (see
    `profiles.cross_basis_mutual_information`) so the strongly
    entangled regime needs no explicit two-dimensional grid. The
    integrated mass is checked as a quadrature control.
    """
    mi, mass = profiles.cross_basis_mutual_information(params, **kwargs)
    if abs(mass - 1.0) > 5e-3:
        raise NumericalModelError(
            f"mixed-basis density integrates to {mass!r}; grid spans too small")
    return mi


# ---------------------------------------------------------------------------
# discrete (pixel-level) quantities
# ---------------------------------------------------------------------------

def discrete_entropy(p: np.ndarray) -> float:
    """Shannon entropy in bits of a probability vector or matrix."""
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if not np.isfinite(total) or abs(total - 1.0) > _NORM_TOL:
        raise NormalizationError(f"probabilities sum to {total!r}")
    pos = p[p > 0.0]
    return float(-np.sum(pos * np.log2(pos)))


def discrete_mutual_information(joint: np.ndarray) -> float:
    """Mutual information in bits of a joint probability matrix.

    The matrix must sum to 1. A diagonal matrix over n outcomes returns
    exactly log2(n) when uniform; refining a partition can never reduce
    the value (data processing).
    """
    joint = np.asarray(joint, dtype=float)
    total = joint.sum()
    if abs(total - 1.0) > _NORM_TOL:
        raise NormalizationError(f"joint probabilities sum to {total!r}")
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    mask = joint > 0.0
    outer = pa[:, None] * pb[None, :]
    return float(np.sum(joint[mask] * np.log2(joint[mask] / outer[mask])))


# ---------------------------------------------------------------------------
# witness and key-rate reports
# ---------------------------------------------------------------------------

WITNESS_BOUND = 0.25


@dataclass(frozen=True)
class WitnessReport:
    """Conditional-variance entanglement witness.

    The product of the position and momentum mean conditional variances
    certifies a positive key rate when it does not exceed 1/4; this is
    the EPR criterion in the highly entangled limit.
    """

    variance_position: float
    variance_momentum: float

    @property
    def product(self) -> float:
        return self.variance_position * self.variance_momentum

    @property
    def satisfied(self) -> bool:
        return self.product <= WITNESS_BOUND


@dataclass(frozen=True)
class KeyRateReport:
    """Certified key-rate bounds from conditional entropies and variances.

    entropic_bound is log2(pi e) - H(r_A|r_B) - H(k_A|k_B); the weaker
    variance_bound replaces each conditional entropy by its Gaussian
    maximum at the measured conditional variance. i_ab is the mutual
    information of the coding basis, delta_i the certified rate
    (entropic bound), and i_ae the implied ceiling on the
    eavesdropper's information, i_ab - delta_i.
    """

    i_ab: float
    entropic_bound: float
    variance_bound: float
    h_position_cond: float
    h_momentum_cond: float
    variance_position: float
    variance_momentum: float

    @property
    def delta_i(self) -> float:
        return self.entropic_bound

    @property
    def i_ae(self) -> float:
        return self.i_ab - self.entropic_bound

    @property
    def witness(self) -> WitnessReport:
        return WitnessReport(variance_position=self.variance_position,
                             variance_momentum=self.variance_momentum)


def _keyrate_from_parts(i_ab, h_r, h_k, var_r, var_k) -> KeyRateReport:
    entropic = LOG2_PI_E - h_r - h_k
    variance = 0.5 * np.log2(1.0 / (4.0 * var_r * var_k))
    if entropic < variance - _ROUTE_TOL:
        raise NumericalModelError(
            f"entropic key bound {entropic!r} fell below its variance "
            f"relaxation {variance!r}; conditional entropies are corrupted")
    return KeyRateReport(i_ab=float(i_ab), entropic_bound=float(entropic),
                         variance_bound=float(variance),
                         h_position_cond=float(h_r), h_momentum_cond=float(h_k),
                         variance_position=float(var_r),
                         variance_momentum=float(var_k))


def keyrate_lower_bound(position_dist: JointDistribution,
                        momentum_dist: JointDistribution,
                        coding_basis: str = "momentum") -> KeyRateReport:
    """Key-rate bounds from explicit joint densities in both bases.

    The first (entropic) line always weakly dominates the second
    (variance) line; both coincide when the conditional densities are
    Gaussian. The coding basis only selects which mutual information is
    reported as i_ab.
    """
    h_r = conditional_entropy(position_dist, given="idler")
    h_k = conditional_entropy(momentum_dist, given="idler")
    var_r = conditional_variance(position_dist, given="idler")
    var_k = conditional_variance(momentum_dist, given="idler")
    coding = momentum_dist if coding_basis == "momentum" else position_dist
    return _keyrate_from_parts(mutual_information(coding), h_r, h_k, var_r, var_k)


def _source_conditional_entropy(prof: profiles.SumDiffProfiles) -> float:
    """H(A|B) of one basis via the sum/difference factorization."""
    h_u, h_v = profiles.sum_diff_entropies(prof)
    a = profiles.marginal_grid(prof)
    pa = profiles.marginal_density(prof, a)
    h_b = profiles._entropy_bits(pa, a[1] - a[0])
    return h_u + h_v - 1.0 - h_b


def keyrate_lower_bound_source(params, coding_basis: str = "momentum") -> KeyRateReport:
    """Key-rate bounds of the pure source state at full physical parameters.

    Evaluates the conditional entropies and mean conditional variances
    through the separable factorization, avoiding any two-dimensional
    grid, and reports the same bound pair as `keyrate_lower_bound`.
    """
    prof_k = profiles.momentum_profiles(params)
    prof_r = profiles.position_profiles(params)
    h_k = _source_conditional_entropy(prof_k)
    h_r = _source_conditional_entropy(prof_r)
    var_k = profiles.mean_conditional_variance(prof_k)
    var_r = profiles.mean_conditional_variance(prof_r)
    prof_c = prof_k if coding_basis == "momentum" else prof_r
    i_ab = profiles.mutual_information_1d(prof_c)
    return _keyrate_from_parts(i_ab, h_r, h_k, var_r, var_k)


def pure_state_witness(params) -> WitnessReport:
    """Conditional-variance witness of the undisturbed source state."""
    var_k = profiles.mean_conditional_variance(profiles.momentum_profiles(params))
    var_r = profiles.mean_conditional_variance(profiles.position_profiles(params))
    return WitnessReport(variance_position=var_r, variance_momentum=var_k)


def gaussian_pair_distribution(rho: float, grid: Grid1D | None = None,
                               basis: str = "momentum") -> JointDistribution:
    """Correlated standard bivariate Gaussian as a JointDistribution.

    A convenience for validation work: unit marginal variances with
    correlation ``rho``, for which the mutual information is exactly
    -log2(1 - rho^2) / 2 and the conditional variance is 1 - rho^2.
    """
    if not -1.0 < rho < 1.0:
        raise ValueError("correlation must lie strictly inside (-1, 1)")
    if grid is None:
        grid = Grid1D(-8.0, 8.0, 512)
    a = grid.points[:, None]
    b = grid.points[None, :]
    det = 1.0 - rho * rho
    values = np.exp(-(a * a - 2.0 * rho * a * b + b * b) / (2.0 * det)) \
        / (2.0 * np.pi * np.sqrt(det))
    return JointDistribution(basis=basis, signal_grid=grid, idler_grid=grid,
                             values=values)
