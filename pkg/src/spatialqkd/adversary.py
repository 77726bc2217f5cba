"""Intercept-resend eavesdropping: information bounds and entanglement decay.

The adversary model is a partial intercept-resend attack on the Bob arm:
a fraction lambda of the transmitted photons is measured by Eve in a
randomly chosen basis (position or momentum, equal probability, the same
pixelization as the receiver) and replaced by a photon prepared in the
measured pixel. Channel loss gives the attack cover: Eve can intercept
at most the fraction whose added background stays statistically hidden
inside the dark-count floor of the legitimate detectors, which yields a
closed-form cap lambda_max as a function of loss, array size and dark
count probability.

Two consequences of the attack are computed. First, the pixel-level
information balance: the accepted-event distributions between
Alice/Bob and Alice/Eve, whose mutual informations give the worst-case
secret key rate Delta I = I_AB - I_AE at maximal hidden interception.
Second, the surviving entanglement: the attacked state in a truncated
Schmidt basis, whose logarithmic negativity stays positive for every
intercept fraction short of 1, so the state remains entangled however
deep the allowed interception cuts.

The class weights and measured distributions here form a definite
model of the attack (interception before the lossy segment, resent
photons subject to the same loss, conjugate-basis resends spread
uniformly over the array); the reference thresholds quoted in the
documentation were used to calibrate exactly this combination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import profiles
from .detection import (ChannelParams, DetectorArrayParams,
                        EventProbabilities, PixelJointDistribution,
                        bin_source_distribution, event_probabilities)
from .infotheory import discrete_mutual_information
from .pdc_model import SourceParams

BASIS_MATCH_PROB = 0.5


@dataclass(frozen=True)
class AttackParams:
    """Intercept-resend attack settings.

    intercept_fraction is the probability lambda that any given
    transmitted photon is intercepted; n_eve is Eve's array size, which
    defaults to (and currently must equal) the receiver's, since the
    measured-distribution model is formulated at equal pixelization.
    """

    intercept_fraction: float
    n_eve: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.intercept_fraction <= 1.0:
            raise ValueError("intercept fraction must lie in [0, 1]")
        if self.n_eve is not None and self.n_eve < 1:
            raise ValueError("Eve's array needs at least one pixel")


def lambda_max(loss_fraction: float, n_pixels: int,
               dark_count_prob: float) -> float:
    """Largest intercept fraction statistically hidden by channel loss.

    With loss fraction l and per-detector dark probability Pd over n
    detectors,

        lambda_max = min( 2 n / ((1/l - 1)(1/Pd - 1) + n), 1 ).

    A lossless channel or dark-count-free detectors hide nothing; a
    fully lossy channel hides everything.
    """
    if not 0.0 <= loss_fraction <= 1.0:
        raise ValueError("loss fraction must lie in [0, 1]")
    if loss_fraction == 0.0:
        return 0.0
    if loss_fraction == 1.0:
        return 1.0
    if dark_count_prob <= 0.0:
        return 0.0
    denom = (1.0 / loss_fraction - 1.0) * (1.0 / dark_count_prob - 1.0) + n_pixels
    return min(2.0 * n_pixels / denom, 1.0)


@dataclass(frozen=True)
class AttackedDistributions:
    """Accepted-event pixel distributions under a partial intercept attack.

    alice_bob and alice_eve are normalized joint probability matrices
    over pixel pairs; weights holds the per-pulse class probabilities
    they were mixed from. Both are genuine mixture distributions, so any
    information measure must be evaluated on them directly, never by
    combining per-class informations.
    """

    alice_bob: np.ndarray
    alice_eve: np.ndarray
    weights: EventProbabilities

    @property
    def i_ab(self) -> float:
        return discrete_mutual_information(self.alice_bob)

    @property
    def i_ae(self) -> float:
        return discrete_mutual_information(self.alice_eve)


def attacked_pixel_joint(signal: PixelJointDistribution,
                         pair_probability: float,
                         array: DetectorArrayParams,
                         channel: ChannelParams,
                         attack: AttackParams) -> AttackedDistributions:
    """Alice-Bob and Alice-Eve pixel distributions under the attack.

    Starting from the accepted-event classes, each class distribution is
    modified by the intercept fraction lambda: an intercepted photon
    measured in the matching basis reproduces the signal correlations at
    Eve's (and, after resend, Bob's) pixel, while a mismatched-basis
    resend arrives uniformly spread over the array. Eve's record
    correlates with Alice whenever Alice detected her own photon and the
    intercept basis matched, whether or not Bob's side ended in a dark
    count; when Alice's click was dark, Eve learns nothing.
    """
    if attack.n_eve is not None and attack.n_eve != signal.n_pixels:
        raise ValueError("the attack model requires Eve to match the "
                         "receiver pixelization")
    w = event_probabilities(pair_probability, array, channel,
                            in_array_alice=signal.alice_in_array,
                            in_array_bob=signal.bob_in_array)
    if w.total <= 0.0:
        raise ValueError("no accepted events at these parameters")
    lam = attack.intercept_fraction
    match = BASIS_MATCH_PROB
    n = signal.n_pixels
    s = signal.joint
    m_alice = s.sum(axis=1)
    m_bob = s.sum(axis=0)
    u = np.full(n, 1.0 / n)
    a_u = np.outer(m_alice, u)
    u_b = np.outer(u, m_bob)
    u_u = np.outer(u, u)

    keep = 1.0 - lam * match  # not intercepted, or intercepted in the same basis
    ab = (w.both_photons * (keep * s + lam * match * a_u)
          + w.alice_photon_bob_dark * a_u
          + w.alice_dark_bob_photon * (keep * u_b + lam * match * u_u)
          + w.both_dark * u_u) / w.total
    ae = ((w.both_photons + w.alice_photon_bob_dark)
          * (lam * match * s + keep * a_u)
          + (w.alice_dark_bob_photon + w.both_dark) * u_u) / w.total
    return AttackedDistributions(alice_bob=ab, alice_eve=ae, weights=w)


@dataclass(frozen=True)
class SecurityPoint:
    """Worst-case information balance at one channel loss.

    i_ab_min and i_ae_max are the legitimate and adversarial mutual
    informations at the largest hidden intercept fraction; the certified
    rate is their difference, computed exactly as such.
    """

    loss_fraction: float
    loss_db: float
    lambda_max: float
    i_ab_min: float
    i_ae_max: float

    @property
    def delta_i_min(self) -> float:
        return self.i_ab_min - self.i_ae_max


def delta_i_min(loss_fraction: float, params: SourceParams,
                array: DetectorArrayParams,
                signal: PixelJointDistribution | None = None,
                throughput_alice: float = 1.0) -> SecurityPoint:
    """Information balance at one loss with the intercept fraction maxed out.

    Sets lambda to the hiding cap for this loss and evaluates both
    mutual informations on the attacked distributions. A precomputed
    binned pure-state distribution can be passed to amortize the
    pixelization across a scan.
    """
    if signal is None:
        signal = bin_source_distribution(params, "momentum", array)
    channel = ChannelParams(throughput_alice=throughput_alice,
                            throughput_bob=1.0 - loss_fraction)
    lam = lambda_max(loss_fraction, array.n_pixels, array.dark_count_prob)
    dists = attacked_pixel_joint(signal, params.pair_probability, array,
                                 channel, AttackParams(intercept_fraction=lam))
    return SecurityPoint(loss_fraction=loss_fraction, loss_db=channel.loss_db,
                         lambda_max=lam, i_ab_min=dists.i_ab,
                         i_ae_max=dists.i_ae)


@dataclass(frozen=True)
class SecurityCurve:
    """Certified key rate against channel loss, with its zero crossing."""

    points: tuple[SecurityPoint, ...]
    crossing_loss_db: float | None
    crossing_lambda: float | None

    @property
    def loss_db(self) -> np.ndarray:
        return np.array([p.loss_db for p in self.points])

    @property
    def delta_i(self) -> np.ndarray:
        return np.array([p.delta_i_min for p in self.points])


def security_curve(params: SourceParams, array: DetectorArrayParams,
                   loss_db_grid: np.ndarray | None = None,
                   signal: PixelJointDistribution | None = None) -> SecurityCurve:
    """Worst-case key rate across channel losses and its security horizon.

    Evaluates `delta_i_min` on a grid of losses and locates the zero
    crossing of the certified rate by bisection between the bracketing
    grid points. The pure-state pixelization is computed once and
    shared by every point.
    """
    if loss_db_grid is None:
        loss_db_grid = np.arange(5.0, 47.5, 2.5)
    if signal is None:
        signal = bin_source_distribution(params, "momentum", array)

    def point(db: float) -> SecurityPoint:
        return delta_i_min(1.0 - 10.0 ** (-db / 10.0), params, array,
                           signal=signal)

    points = tuple(point(db) for db in np.asarray(loss_db_grid, dtype=float))

    crossing_db = None
    crossing_lam = None
    for left, right in zip(points[:-1], points[1:]):
        if (left.delta_i_min > 0.0) and (right.delta_i_min <= 0.0):
            crossing_db = brentq(lambda db: point(db).delta_i_min,
                                 left.loss_db, right.loss_db, xtol=1e-4)
            crossing_lam = lambda_max(1.0 - 10.0 ** (-crossing_db / 10.0),
                                      array.n_pixels, array.dark_count_prob)
            break
    return SecurityCurve(points=points, crossing_loss_db=crossing_db,
                         crossing_lambda=crossing_lam)


# ---------------------------------------------------------------------------
# entanglement of the attacked state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogNegativityReport:
    """Logarithmic negativity of the attacked state in a truncated basis.

    captured_weight is the Schmidt probability weight retained by the
    truncation (of the untruncated state); the reported value refers to
    the renormalized truncated state.
    """

    value: float
    intercept_fraction: float
    n_modes: int
    captured_weight: float


def _measurement_branch(modes: np.ndarray, grid: np.ndarray, step: float,
                        edges: np.ndarray, ct: np.ndarray) -> np.ndarray:
    """Post-measure-resend density operator of one basis branch.

    For each pixel, Eve's projection of the Bob photon collapses the
    pair to (A-side overlap kernel) x (resent pixel state), giving

        rho = sum_m (c c^T * G_m) otimes |chi_m><chi_m|

    in the truncated Schmidt-pair basis, with G_m the Gram matrix of the
    Bob modes restricted to pixel m and chi_m the normalized pixel
    indicator expanded over the modes. Pixels outside the mode support
    contribute nothing; the resulting trace deficit is handled by the
    caller's final normalization.
    """
    d = len(ct)
    rho = np.zeros((d * d, d * d), dtype=complex)
    idx = np.searchsorted(grid, edges)
    coeff = ct[:, None] * ct[None, :]
    for m in range(len(edges) - 1):
        seg = modes[:, idx[m]:idx[m + 1]]
        if seg.shape[1] == 0:
            continue
        gram = (seg @ seg.conj().T) * step
        a_op = coeff * gram
        width = edges[m + 1] - edges[m]
        r = seg.conj().sum(axis=1) * step / np.sqrt(width)
        rho += np.kron(a_op, np.outer(r, r.conj()))
    return rho


@dataclass(frozen=True)
class _NegativityModel:
    """Precomputed operators of the attacked state in the Schmidt basis."""

    coefficients: np.ndarray
    pure: np.ndarray
    branch_momentum: np.ndarray
    branch_position: np.ndarray
    captured_weight: float

    @property
    def n_modes(self) -> int:
        return len(self.coefficients)

    def report(self, intercept_fraction: float) -> LogNegativityReport:
        if not 0.0 <= intercept_fraction <= 1.0:
            raise ValueError("intercept fraction must lie in [0, 1]")
        d = self.n_modes
        lam = intercept_fraction
        rho = (1.0 - lam) * self.pure \
            + 0.5 * lam * (self.branch_momentum + self.branch_position)
        rho = rho / np.trace(rho).real
        transposed = rho.reshape(d, d, d, d).transpose(0, 3, 2, 1) \
            .reshape(d * d, d * d)
        eigs = np.linalg.eigvalsh(transposed)
        return LogNegativityReport(value=float(np.log2(np.abs(eigs).sum())),
                                   intercept_fraction=lam, n_modes=d,
                                   captured_weight=self.captured_weight)


def _build_negativity_model(params: SourceParams, n_modes: int,
                            array: DetectorArrayParams, n_grid: int,
                            fft_pad: int) -> _NegativityModel:
    schmidt = profiles.kernel_schmidt_modes(params, n_modes=n_modes,
                                            n_grid=n_grid)
    grid, step = schmidt.grid, schmidt.step
    c2 = schmidt.coefficients ** 2
    ct = np.sqrt(c2 / c2.sum())
    modes_k = schmidt.idler_modes.T  # rows are Bob's momentum modes

    # Bob's position modes by zero-padded FFT of his momentum modes
    n_pad = len(grid) * fft_pad
    modes_x = np.fft.fftshift(
        np.fft.fft(np.fft.ifftshift(modes_k, axes=1), n=n_pad, axis=1),
        axes=1) * step / np.sqrt(2.0 * np.pi)
    x = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(n_pad, d=step))
    dx = x[1] - x[0]

    half_k = profiles.marginal_half_extent(profiles.momentum_profiles(params),
                                           array.coverage)
    half_x = profiles.marginal_half_extent(profiles.position_profiles(params),
                                           array.coverage)
    edges_k = np.linspace(-half_k, half_k, array.n_pixels + 1)
    edges_x = np.linspace(-half_x, half_x, array.n_pixels + 1)

    rho_k = _measurement_branch(modes_k, grid, step, edges_k, ct)
    rho_x = _measurement_branch(modes_x, x, dx, edges_x, ct)

    d = n_modes
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * d + np.arange(d)] = ct
    return _NegativityModel(coefficients=ct, pure=np.outer(psi, psi.conj()),
                            branch_momentum=rho_k, branch_position=rho_x,
                            captured_weight=schmidt.captured_weight)


def log_negativity(params: SourceParams, intercept_fraction: float,
                   n_modes: int = 16,
                   array: DetectorArrayParams | None = None,
                   n_grid: int = 2400, fft_pad: int = 8) -> LogNegativityReport:
    """Logarithmic negativity of the state after a partial intercept attack.

    The attacked two-photon state is modeled as

        rho(lambda) = (1 - lambda) |psi><psi|
                      + (lambda / 2) (rho_momentum + rho_position),

    with the two branches the measure-resend operators of Eve's basis
    choices over the receiver's pixel arrays, expanded in the leading
    Schmidt modes of the pure state and renormalized by the trace. The
    negativity LN = log2 ||rho^(T_B)||_1 equals 2 log2(sum c_i) of the
    renormalized spectrum at lambda = 0 and reaches exactly 0 only at
    lambda = 1, where the state is a pixel-separable mixture.
    """
    if array is None:
        array = DetectorArrayParams(n_pixels=128)
    model = _build_negativity_model(params, n_modes, array, n_grid, fft_pad)
    return model.report(intercept_fraction)


def negativity_curve(params: SourceParams, intercept_fractions,
                     n_modes: int = 16,
                     array: DetectorArrayParams | None = None,
                     n_grid: int = 2400,
                     fft_pad: int = 8) -> list[LogNegativityReport]:
    """Logarithmic negativity at several intercept fractions.

    The Schmidt modes and measurement branches are computed once and
    reused, so sweeping lambda costs little beyond a single evaluation.
    """
    if array is None:
        array = DetectorArrayParams(n_pixels=128)
    model = _build_negativity_model(params, n_modes, array, n_grid, fft_pad)
    return [model.report(float(lam)) for lam in intercept_fractions]
