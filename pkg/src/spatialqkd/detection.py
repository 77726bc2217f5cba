"""Detector arrays, channels, dark counts and pixel-level distributions.

Each party images one transverse axis of their photon onto a linear
array of n time-gated detectors covering the symmetric central interval
that holds a fixed fraction of the single-photon marginal. A result is
kept only when exactly one detector clicks on each side, which leaves
three accepted-event classes: both clicks dark, one photon plus one
dark, and two photons. Their probabilities follow the standard
single-dark-count expansion in the per-detector dark probability and
multiply the appropriate pixel distributions to give the measured joint
distribution; because a dark count is uniform over the array while the
photon correlations are tightly peaked, dark counts dilute the
conditional-variance witness more and more as channel loss grows, which
is what the threshold scan quantifies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import profiles
from .errors import CoverageError, NormalizationError, NumericalModelError
from .infotheory import WITNESS_BOUND, WitnessReport
from .pdc_model import JointDistribution, SourceParams

# Fraction of the single-photon marginal covered by each array. The
# default keeps the discarded tail small enough that dark counts, not
# truncation, set the witness threshold: at 128 pixels the sinc-squared
# momentum tails are heavy enough that a looser choice visibly shifts
# the loss threshold, and this value places the reference thresholds
# near 36% and 68% throughput for 128 and 256 pixels.
DEFAULT_ARRAY_COVERAGE = 0.9994

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class DetectorArrayParams:
    """One party's detector array.

    Attributes
    ----------
    n_pixels : int
        Number of identical detectors along the measured axis.
    efficiency : float
        Detection efficiency of each detector.
    dark_count_prob : float
        Probability of a dark count per detector per gate window.
    coverage : float
        Fraction of the single-photon marginal the array spans.
    """

    n_pixels: int
    efficiency: float = 0.6
    dark_count_prob: float = 1e-6
    coverage: float = DEFAULT_ARRAY_COVERAGE

    def __post_init__(self):
        if self.n_pixels < 1:
            raise ValueError("array needs at least one pixel")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if not 0.0 <= self.dark_count_prob < 1.0:
            raise ValueError("dark count probability must lie in [0, 1)")
        if not 0.0 < self.coverage < 1.0:
            raise ValueError("coverage must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class ChannelParams:
    """Quantum channel throughputs for the two arms.

    The Bob-side loss fraction, decibel loss and fiber-equivalent
    distance are derived views of ``throughput_bob`` and stay mutually
    consistent by construction.
    """

    throughput_alice: float = 1.0
    throughput_bob: float = 1.0

    def __post_init__(self):
        for t in (self.throughput_alice, self.throughput_bob):
            if not 0.0 <= t <= 1.0:
                raise ValueError("throughput must lie in [0, 1]")

    @property
    def loss_bob(self) -> float:
        """Lost fraction 1 - t on the Bob arm."""
        return 1.0 - self.throughput_bob

    @property
    def loss_db(self) -> float:
        """Bob-arm loss in dB; infinite for zero throughput."""
        if self.throughput_bob == 0.0:
            return np.inf
        return -10.0 * np.log10(self.throughput_bob) + 0.0

    def distance_km(self, extinction_db_per_km: float = 1.0) -> float:
        """Fiber length producing this loss at the given extinction."""
        return self.loss_db / extinction_db_per_km

    @classmethod
    def from_loss_db(cls, loss_db: float,
                     throughput_alice: float = 1.0) -> "ChannelParams":
        return cls(throughput_alice=throughput_alice,
                   throughput_bob=10.0 ** (-loss_db / 10.0))

    @classmethod
    def from_distance_km(cls, distance_km: float,
                         extinction_db_per_km: float = 1.0,
                         throughput_alice: float = 1.0) -> "ChannelParams":
        return cls.from_loss_db(distance_km * extinction_db_per_km,
                                throughput_alice=throughput_alice)


@dataclass(frozen=True)
class EventProbabilities:
    """Per-pulse probabilities of the accepted single-click-per-side classes.

    both_dark: no photon detected anywhere, one dark count per side.
    One-photon classes are split by which side saw the photon, since the
    two contribute differently to the measured joint distribution.
    both_photons: the signal class carrying the correlations.
    """

    both_dark: float
    alice_photon_bob_dark: float
    alice_dark_bob_photon: float
    both_photons: float

    def __post_init__(self):
        for p in (self.both_dark, self.alice_photon_bob_dark,
                  self.alice_dark_bob_photon, self.both_photons):
            if p < 0.0 or p > 1.0:
                raise ValueError("event probabilities must lie in [0, 1]")
        if self.total > 1.0 + 1e-12:
            raise ValueError("event probabilities exceed 1 in total")

    @property
    def single_dark(self) -> float:
        return self.alice_photon_bob_dark + self.alice_dark_bob_photon

    @property
    def total(self) -> float:
        return self.both_dark + self.single_dark + self.both_photons

    @property
    def background_fraction(self) -> float:
        """Fraction of accepted events that involve at least one dark count."""
        return (self.both_dark + self.single_dark) / self.total


def event_probabilities(pair_probability: float, array: DetectorArrayParams,
                        channel: ChannelParams, in_array_alice: float = 1.0,
                        in_array_bob: float = 1.0) -> EventProbabilities:
    """Accepted-event class probabilities per pump pulse.

    With per-detector dark probability Pd, array size n, effective
    detection probabilities eA = eta * qA * tA and eB on the two arms
    (qA, qB fold the probability that the photon lands inside the
    array), the three classes at exactly one click per side are

        P1 = [1 - Ppdc + Ppdc (1 - eA)(1 - eB)] n^2 Pd^2 (1 - Pd)^(2n-2)
        P2 = Ppdc [eA (1 - eB) + (1 - eA) eB] n Pd (1 - Pd)^(2n-1)
        P3 = Ppdc eA eB (1 - Pd)^(2n)

    and P2 is returned split into its two bracket terms.
    """
    if not 0.0 <= pair_probability <= 1.0:
        raise ValueError("pair probability must lie in [0, 1]")
    n = array.n_pixels
    pd = array.dark_count_prob
    ea = array.efficiency * in_array_alice * channel.throughput_alice
    eb = array.efficiency * in_array_bob * channel.throughput_bob
    quiet = (1.0 - pd) ** (2 * n - 2)
    p1 = (1.0 - pair_probability + pair_probability * (1.0 - ea) * (1.0 - eb)) \
        * n * n * pd * pd * quiet
    one_dark = n * pd * quiet * (1.0 - pd)
    p2a = pair_probability * ea * (1.0 - eb) * one_dark
    p2b = pair_probability * (1.0 - ea) * eb * one_dark
    p3 = pair_probability * ea * eb * quiet * (1.0 - pd) ** 2
    return EventProbabilities(both_dark=p1, alice_photon_bob_dark=p2a,
                              alice_dark_bob_photon=p2b, both_photons=p3)


@dataclass(frozen=True)
class PixelJointDistribution:
    """Joint pixel-pair probabilities over two n-detector arrays.

    ``joint`` is normalized to 1 over the array; the probability that a
    produced pair lands fully inside both arrays is kept separately in
    ``in_array_mass``, and ``alice_pixel_masses`` / ``bob_pixel_masses``
    hold the absolute per-pixel single-photon masses, so nothing about
    the discarded tails is lost by the normalization. ``weights`` is set
    on distributions that already mix in dark-count events.
    """

    basis: str
    edges: np.ndarray
    joint: np.ndarray = field(repr=False)
    in_array_mass: float
    alice_pixel_masses: np.ndarray = field(repr=False)
    bob_pixel_masses: np.ndarray = field(repr=False)
    weights: EventProbabilities | None = None

    def __post_init__(self):
        n = len(self.edges) - 1
        if self.joint.shape != (n, n):
            raise ValueError("joint matrix does not match the pixel edges")
        total = float(self.joint.sum())
        if abs(total - 1.0) > _NORM_TOL:
            raise NormalizationError(
                f"pixel joint sums to {total!r}, off 1 beyond {_NORM_TOL}")

    @property
    def n_pixels(self) -> int:
        return len(self.edges) - 1

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def pixel_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def alice_in_array(self) -> float:
        """Probability that Alice's photon lands inside her array."""
        return float(self.alice_pixel_masses.sum())

    @property
    def bob_in_array(self) -> float:
        return float(self.bob_pixel_masses.sum())

    def extended_joint(self) -> np.ndarray:
        """(n+1) x (n+1) absolute table with an out-of-array slot per side.

        Entry [i, j] for i, j < n is the absolute probability (given a
        pair) of landing in pixel pair (i, j); the final row/column hold
        the one-side-out and both-out masses. Sums to 1 exactly.
        """
        n = self.n_pixels
        absolute = self.joint * self.in_array_mass
        out = np.zeros((n + 1, n + 1))
        out[:n, :n] = absolute
        out[:n, n] = np.clip(self.alice_pixel_masses - absolute.sum(axis=1), 0.0, None)
        out[n, :n] = np.clip(self.bob_pixel_masses - absolute.sum(axis=0), 0.0, None)
        out[n, n] = max(1.0 - out.sum(), 0.0)
        return out


def _edges_from_half_extent(half: float, n: int) -> np.ndarray:
    return np.linspace(-half, half, n + 1)


def bin_distribution(dist: JointDistribution,
                     array: DetectorArrayParams) -> PixelJointDistribution:
    """Pixelize an explicitly gridded joint density onto an array pair.

    The array spans the symmetric central interval holding
    ``array.coverage`` of the signal-photon marginal, divided into n
    equal pixels; each grid cell is assigned to the pixel containing its
    center, so coarsening from 2n to n pixels reproduces 2 x 2 block
    sums exactly.

    Raises
    ------
    CoverageError
        If the requested coverage interval extends beyond the grid.
    """
    sg, ig = dist.signal_grid, dist.idler_grid
    marg = dist.values.sum(axis=1) * ig.step
    half = profiles.quantile_half_extent(sg.points, marg, array.coverage)
    if half > sg.half_extent or half > ig.half_extent:
        raise CoverageError(
            f"coverage {array.coverage} needs half-extent {half:.4g}, beyond "
            f"the grid at {min(sg.half_extent, ig.half_extent):.4g}")
    edges = _edges_from_half_extent(half, array.n_pixels)

    cell = dist.values * (sg.step * ig.step)
    idx_s = np.searchsorted(edges, sg.points, side="right") - 1
    idx_i = np.searchsorted(edges, ig.points, side="right") - 1
    n = array.n_pixels
    in_s = (idx_s >= 0) & (idx_s < n) & (sg.points >= edges[0])
    in_i = (idx_i >= 0) & (idx_i < n) & (ig.points >= edges[0])
    sub = cell[np.ix_(in_s, in_i)]
    flat = (idx_s[in_s][:, None] * n + idx_i[in_i][None, :]).ravel()
    raw = np.bincount(flat, weights=sub.ravel(), minlength=n * n).reshape(n, n)

    alice_masses = np.bincount(idx_s[in_s], weights=cell.sum(axis=1)[in_s],
                               minlength=n)
    bob_masses = np.bincount(idx_i[in_i], weights=cell.sum(axis=0)[in_i],
                             minlength=n)
    mass = float(raw.sum())
    return PixelJointDistribution(basis=dist.basis, edges=edges,
                                  joint=raw / mass, in_array_mass=mass,
                                  alice_pixel_masses=alice_masses,
                                  bob_pixel_masses=bob_masses)


def bin_source_distribution(params: SourceParams, basis: str,
                            array: DetectorArrayParams,
                            subdiv: int = 48) -> PixelJointDistribution:
    """Pixelized pure-state joint distribution at full physical parameters.

    Uses the separable factorization to integrate the joint density over
    pixel pairs semi-analytically (see `profiles.binned_pixel_joint`),
    so the strongly entangled regime needs no two-dimensional grid. The
    two photons see identical arrays.
    """
    prof = profiles.profiles_for_basis(params, basis)
    half = profiles.marginal_half_extent(prof, array.coverage)
    edges = _edges_from_half_extent(half, array.n_pixels)
    raw = profiles.binned_pixel_joint(prof, edges, subdiv=subdiv)
    masses = profiles.marginal_pixel_masses(prof, edges)
    mass = float(raw.sum())
    return PixelJointDistribution(basis=basis, edges=edges, joint=raw / mass,
                                  in_array_mass=mass,
                                  alice_pixel_masses=masses,
                                  bob_pixel_masses=masses.copy())


def noisy_pixel_joint(signal: PixelJointDistribution, pair_probability: float,
                      array: DetectorArrayParams,
                      channel: ChannelParams) -> PixelJointDistribution:
    """Accepted-event pixel distribution including dark-count classes.

    Mixes the four accepted classes with their per-pulse weights: the
    two-photon class follows the binned signal, a photon paired with a
    dark count follows that photon's marginal against a uniform dark,
    and the double-dark class is uniform on both sides. Out-of-array
    mass enters through the effective efficiencies in the weights.

    Raises
    ------
    NumericalModelError
        If every class has probability zero (nothing is ever accepted).
    """
    w = event_probabilities(pair_probability, array, channel,
                            in_array_alice=signal.alice_in_array,
                            in_array_bob=signal.bob_in_array)
    if w.total <= 0.0:
        raise NumericalModelError(
            "no accepted events: dark counts and pair production are both zero")
    n = signal.n_pixels
    uniform = np.full(n, 1.0 / n)
    m_alice = signal.joint.sum(axis=1)
    m_bob = signal.joint.sum(axis=0)
    mixed = (w.both_photons * signal.joint
             + w.alice_photon_bob_dark * np.outer(m_alice, uniform)
             + w.alice_dark_bob_photon * np.outer(uniform, m_bob)
             + w.both_dark * np.outer(uniform, uniform)) / w.total
    return PixelJointDistribution(basis=signal.basis, edges=signal.edges,
                                  joint=mixed,
                                  in_array_mass=signal.in_array_mass,
                                  alice_pixel_masses=signal.alice_pixel_masses,
                                  bob_pixel_masses=signal.bob_pixel_masses,
                                  weights=w)


def pixel_conditional_variance(pixel: PixelJointDistribution,
                               given: str = "bob") -> float:
    """Mean conditional variance of one side's pixel-center coordinate.

    E_B[Var(A|B)] over the discrete pixel distribution, with pixels
    represented by their center coordinates. This is the quantity a
    finite array actually measures for the witness product.
    """
    if given == "bob":
        w = pixel.joint
    elif given == "alice":
        w = pixel.joint.T
    else:
        raise ValueError(f"given must be 'alice' or 'bob', got {given!r}")
    c = pixel.centers
    norms = w.sum(axis=0)
    good = norms > 0.0
    m1 = (w * c[:, None]).sum(axis=0)[good] / norms[good]
    m2 = (w * (c * c)[:, None]).sum(axis=0)[good] / norms[good]
    weights = norms[good] / norms[good].sum()
    return float(np.sum(weights * (m2 - m1 * m1)))


def binned_witness(signal_momentum: PixelJointDistribution,
                   signal_position: PixelJointDistribution,
                   pair_probability: float, array: DetectorArrayParams,
                   channel: ChannelParams) -> WitnessReport:
    """Conditional-variance witness as measured through noisy arrays."""
    noisy_k = noisy_pixel_joint(signal_momentum, pair_probability, array, channel)
    noisy_r = noisy_pixel_joint(signal_position, pair_probability, array, channel)
    return WitnessReport(
        variance_position=pixel_conditional_variance(noisy_r),
        variance_momentum=pixel_conditional_variance(noisy_k))


@dataclass(frozen=True)
class ThresholdScanResult:
    """Outcome of scanning the witness product against Bob-arm throughput.

    ``threshold_throughput`` is the throughput below which the witness
    product exceeds 1/4 (None when no crossing exists in the scanned
    interval; ``holds_everywhere`` then says on which side it sat).
    """

    n_pixels: int
    threshold_throughput: float | None
    product_at_unity: float
    holds_at_unity: bool
    holds_everywhere: bool
    scanned_interval: tuple[float, float]

    @property
    def threshold_loss_db(self) -> float | None:
        if self.threshold_throughput is None:
            return None
        return -10.0 * np.log10(self.threshold_throughput)

    def threshold_distance_km(self, extinction_db_per_km: float = 1.0) -> float | None:
        db = self.threshold_loss_db
        return None if db is None else db / extinction_db_per_km


def witness_threshold_scan(params: SourceParams, array: DetectorArrayParams,
                           throughput_alice: float = 1.0,
                           scan_interval: tuple[float, float] = (1e-4, 1.0),
                           xtol: float = 1e-5,
                           subdiv: int = 48) -> ThresholdScanResult:
    """Minimum Bob-arm throughput at which the witness still certifies security.

    Bins the pure state once per basis, then scans the dark-count-mixed
    witness product over Bob's throughput and bisects the crossing with
    1/4. Dark counts are uniform while the signal is peaked, so the
    product grows as throughput falls; with zero dark counts it stays
    below 1/4 for every positive throughput and no threshold exists.
    """
    sig_k = bin_source_distribution(params, "momentum", array, subdiv=subdiv)
    sig_r = bin_source_distribution(params, "position", array, subdiv=subdiv)

    def product(t: float) -> float:
        channel = ChannelParams(throughput_alice=throughput_alice, throughput_bob=t)
        return binned_witness(sig_k, sig_r, params.pair_probability,
                              array, channel).product

    t_lo, t_hi = scan_interval
    p_hi = product(t_hi)
    p_lo = product(t_lo)
    holds_hi = p_hi <= WITNESS_BOUND
    holds_lo = p_lo <= WITNESS_BOUND
    if holds_hi == holds_lo:
        return ThresholdScanResult(n_pixels=array.n_pixels,
                                   threshold_throughput=None,
                                   product_at_unity=p_hi,
                                   holds_at_unity=holds_hi,
                                   holds_everywhere=holds_hi,
                                   scanned_interval=scan_interval)
    t_star = brentq(lambda t: product(t) - WITNESS_BOUND, t_lo, t_hi, xtol=xtol)
    return ThresholdScanResult(n_pixels=array.n_pixels,
                               threshold_throughput=float(t_star),
                               product_at_unity=p_hi,
                               holds_at_unity=holds_hi,
                               holds_everywhere=False,
                               scanned_interval=scan_interval)
