"""Biphoton source model: parameters, gridded amplitudes, Schmidt analysis.

The transverse-momentum amplitude of a collinear degenerate pair
produced by a Gaussian pump of waist w0 in a crystal of length L is

    f(ks, ki) = C exp(-w0^2 (ks + ki)^2 / 4) * phi_L(ks - ki)

with phi_L the longitudinal phase-matching function. This module owns
the parameter set, explicit two-dimensional grids for the regimes where
they are affordable, the unitary transform to the transverse-position
basis, Schmidt decompositions, and entropy summaries. The heavy regime
where the two characteristic widths are separated by orders of
magnitude is served by the separable machinery in `profiles`, which
several functions here defer to.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import profiles
from .errors import GridResolutionError, NormalizationError

_NORM_TOL = 1e-9

DEFAULT_REFRACTIVE_INDEX = 1.66
DEFAULT_PUMP_WAVELENGTH_NM = 400.0
DEFAULT_PUMP_FWHM_MM = 2.0
DEFAULT_CRYSTAL_LENGTH_MM = 2.0
DEFAULT_PAIR_PROBABILITY = 0.01


def waist_from_fwhm(fwhm_mm: float) -> float:
    """Gaussian amplitude waist w0 from the intensity FWHM of the pump."""
    return fwhm_mm / np.sqrt(2.0 * np.log(2.0))


def degenerate_wavenumber(pump_wavelength_nm: float,
                          refractive_index: float = DEFAULT_REFRACTIVE_INDEX) -> float:
    """Wavenumber K of the degenerate daughter photons inside the crystal.

    The daughters are at twice the pump wavelength; K = 2 pi n / lambda
    in rad/mm with lambda converted from nm.
    """
    wavelength_mm = 2.0 * pump_wavelength_nm * 1e-6
    return 2.0 * np.pi * refractive_index / wavelength_mm


@dataclass(frozen=True)
class SourceParams:
    """Physical parameters of the downconversion source.

    Attributes
    ----------
    waist_w0 : float
        Pump amplitude waist in mm.
    crystal_length : float
        Crystal length L in mm.
    wavenumber_K : float
        Degenerate daughter wavenumber inside the crystal, rad/mm.
    pump_wavelength : float
        Pump wavelength in nm (bookkeeping; K is the operative quantity).
    mismatch_delta : float
        Collinear phase mismatch delta in rad/mm (0 = perfect matching).
    pair_probability : float
        Probability that a pump pulse yields a photon pair.
    """

    waist_w0: float
    crystal_length: float
    wavenumber_K: float
    pump_wavelength: float = DEFAULT_PUMP_WAVELENGTH_NM
    mismatch_delta: float = 0.0
    pair_probability: float = DEFAULT_PAIR_PROBABILITY

    def __post_init__(self):
        if self.waist_w0 <= 0 or self.crystal_length <= 0 or self.wavenumber_K <= 0:
            raise ValueError("waist, crystal length and wavenumber must be positive")
        if not 0.0 <= self.pair_probability <= 1.0:
            raise ValueError("pair_probability must lie in [0, 1]")

    @classmethod
    def default(cls) -> "SourceParams":
        """Reference configuration: 400 nm pump, 2 mm FWHM, 2 mm crystal."""
        return cls(waist_w0=waist_from_fwhm(DEFAULT_PUMP_FWHM_MM),
                   crystal_length=DEFAULT_CRYSTAL_LENGTH_MM,
                   wavenumber_K=degenerate_wavenumber(DEFAULT_PUMP_WAVELENGTH_NM),
                   pump_wavelength=DEFAULT_PUMP_WAVELENGTH_NM)

    @property
    def sum_width_momentum(self) -> float:
        """Standard deviation 1/w0 of the momentum-sum Gaussian, rad/mm."""
        return 1.0 / self.waist_w0

    @property
    def difference_scale_momentum(self) -> float:
        """First zero of the phase-matching intensity in the momentum difference."""
        return profiles.difference_width_scale(self.crystal_length, self.wavenumber_K,
                                               self.mismatch_delta)


@dataclass(frozen=True)
class Grid1D:
    """Uniform symmetric sampling grid with endpoint-inclusive semantics.

    The step is (maximum - minimum) / (num - 1); ``num`` must be a power
    of two so that nested pixel binnings and FFT sizes stay aligned.
    """

    minimum: float
    maximum: float
    num: int

    def __post_init__(self):
        if self.num < 2 or self.num & (self.num - 1):
            raise ValueError(f"grid size {self.num} is not a power of two")
        if not self.maximum > self.minimum:
            raise ValueError("grid maximum must exceed minimum")

    @property
    def step(self) -> float:
        return (self.maximum - self.minimum) / (self.num - 1)

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.num)

    @property
    def half_extent(self) -> float:
        return 0.5 * (self.maximum - self.minimum)


def auto_grid(params: SourceParams, num: int = 1024,
              coverage_factor: float = 5.0) -> Grid1D:
    """Symmetric grid sized from the widest transverse feature.

    The half-extent is ``coverage_factor`` times the larger of the two
    characteristic momentum widths (pump width 1/w0 and phase-matching
    first zero). Note that covering the wide feature does not by itself
    resolve the narrow one; `build_amplitude` checks resolution
    separately and rejects grids whose step is too coarse.
    """
    if num < 64:
        raise ValueError("auto_grid requires at least 64 points")
    half = coverage_factor * max(params.sum_width_momentum,
                                 params.difference_scale_momentum)
    return Grid1D(-half, half, num)


@dataclass(frozen=True)
class JointAmplitude:
    """Two-photon amplitude sampled on a rectangular grid.

    values[m, n] is the amplitude at signal point m, idler point n. The
    stored array is normalized so that sum(|f|^2) * step_s * step_i = 1;
    ``normalization`` records the constant that was applied to the raw
    profile product to achieve that.
    """

    basis: str
    signal_grid: Grid1D
    idler_grid: Grid1D
    values: np.ndarray = field(repr=False)
    normalization: float = 1.0

    def __post_init__(self):
        total = self.norm_squared
        if abs(total - 1.0) > _NORM_TOL:
            raise NormalizationError(
                f"amplitude norm {total!r} deviates from 1 beyond {_NORM_TOL}")

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)
                     * self.signal_grid.step * self.idler_grid.step)


@dataclass(frozen=True)
class JointDistribution:
    """Joint probability density |f|^2 on the same grid as its amplitude."""

    basis: str
    signal_grid: Grid1D
    idler_grid: Grid1D
    values: np.ndarray = field(repr=False)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.values) * self.signal_grid.step * self.idler_grid.step)


_MIN_SAMPLES_ACROSS_FEATURE = 8


def build_amplitude(params: SourceParams, signal_grid: Grid1D,
                    idler_grid: Grid1D | None = None) -> JointAmplitude:
    """Two-photon momentum amplitude on an explicit grid.

    Raises
    ------
    GridResolutionError
        If the coarser grid step leaves fewer than 8 samples across the
        narrowest transverse feature, min(1/w0, first phase-matching
        zero). In the strongly entangled regime this rejects any
        affordable grid; use the separable routines in `profiles` there.
    """
    if idler_grid is None:
        idler_grid = signal_grid
    narrow = min(params.sum_width_momentum, params.difference_scale_momentum)
    step = max(signal_grid.step, idler_grid.step)
    if step > narrow / _MIN_SAMPLES_ACROSS_FEATURE:
        needed = int(np.ceil(2.0 * signal_grid.half_extent /
                             (narrow / _MIN_SAMPLES_ACROSS_FEATURE))) + 1
        raise GridResolutionError(
            f"grid step {step:.4g} rad/mm leaves fewer than "
            f"{_MIN_SAMPLES_ACROSS_FEATURE} samples across the narrowest "
            f"feature ({narrow:.4g} rad/mm); this extent needs at least "
            f"{needed} points per axis")

    ks = signal_grid.points[:, None]
    ki = idler_grid.points[None, :]
    gauss = np.exp(-(params.waist_w0 ** 2) * (ks + ki) ** 2 / 4.0)
    phi = profiles.phase_matching_function(ks - ki, params.crystal_length,
                                           params.wavenumber_K,
                                           params.mismatch_delta)
    raw = gauss * phi
    total = np.sum(np.abs(raw) ** 2) * signal_grid.step * idler_grid.step
    if total <= 0.0:
        raise NormalizationError("amplitude vanishes on the supplied grid")
    scale = 1.0 / np.sqrt(total)
    return JointAmplitude(basis="momentum", signal_grid=signal_grid,
                          idler_grid=idler_grid, values=raw * scale,
                          normalization=scale)


def _axis_fourier(values: np.ndarray, grid: Grid1D, axis: int,
                  sign: float) -> tuple[np.ndarray, Grid1D]:
    """Unitary continuous Fourier transform along one axis.

    Approximates (2 pi)^(-1/2) * integral f(k) exp(sign * i k x) dk on
    the conjugate grid x_n = (n - N/2) * 2 pi / (N dk). Implemented as a
    phase-corrected DFT so it is exact for the trapezoid-sampled
    integrand regardless of where the input grid starts; the pairing
    keeps Parseval exact in double precision.
    """
    n = grid.num
    dk = grid.step
    dx = 2.0 * np.pi / (n * dk)
    x = (np.arange(n) - n // 2) * dx
    out_grid = Grid1D(float(x[0]), float(x[-1]), n)

    m = np.arange(n)
    alt = (-1.0) ** m
    shaped = [1] * values.ndim
    shaped[axis] = n
    alt = alt.reshape(shaped)
    phase = np.exp(sign * 1j * grid.minimum * x).reshape(shaped)

    work = values * alt
    if sign > 0:
        spectrum = np.fft.ifft(work, axis=axis) * n
    else:
        spectrum = np.fft.fft(work, axis=axis)
    out = spectrum * phase * (dk / np.sqrt(2.0 * np.pi))
    return out, out_grid


def to_position_basis(amp: JointAmplitude) -> JointAmplitude:
    """Transform a momentum amplitude to the transverse-position basis.

    Applies the unitary two-dimensional Fourier transform
    f(x_s, x_i) = (2 pi)^-1 * integral f(ks, ki) exp(i ks xs + i ki xi).
    The output grids are the reciprocal grids with step 2 pi / (N dk);
    Parseval holds to machine precision, so the result passes the same
    normalization check as the input.
    """
    if amp.basis != "momentum":
        raise ValueError(f"expected a momentum amplitude, got basis {amp.basis!r}")
    work, sg = _axis_fourier(amp.values, amp.signal_grid, axis=0, sign=+1.0)
    work, ig = _axis_fourier(work, amp.idler_grid, axis=1, sign=+1.0)
    return JointAmplitude(basis="position", signal_grid=sg, idler_grid=ig,
                          values=work, normalization=amp.normalization)


def to_momentum_basis(amp: JointAmplitude) -> JointAmplitude:
    """Inverse of `to_position_basis` (round-trips to machine precision)."""
    if amp.basis != "position":
        raise ValueError(f"expected a position amplitude, got basis {amp.basis!r}")
    work, sg = _axis_fourier(amp.values, amp.signal_grid, axis=0, sign=-1.0)
    work, ig = _axis_fourier(work, amp.idler_grid, axis=1, sign=-1.0)
    return JointAmplitude(basis="momentum", signal_grid=sg, idler_grid=ig,
                          values=work, normalization=amp.normalization)


def to_distribution(amp: JointAmplitude) -> JointDistribution:
    """Joint detection probability density |f|^2 of an amplitude."""
    return JointDistribution(basis=amp.basis, signal_grid=amp.signal_grid,
                             idler_grid=amp.idler_grid,
                             values=np.abs(amp.values) ** 2)


def marginal(dist: JointDistribution, photon: str = "signal") -> np.ndarray:
    """Single-photon marginal density along one axis of a joint density."""
    if photon == "signal":
        return dist.values.sum(axis=1) * dist.idler_grid.step
    if photon == "idler":
        return dist.values.sum(axis=0) * dist.signal_grid.step
    raise ValueError(f"photon must be 'signal' or 'idler', got {photon!r}")


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt spectrum and mode functions of a gridded pure state.

    coefficients: singular values c_i, descending; sum of squares equals
    the captured weight (1 up to grid truncation). signal_modes /
    idler_modes hold the mode functions column-wise on the amplitude's
    grids with continuum normalization. Entropy, Schmidt number and
    concurrence are computed from the renormalized spectrum.
    """

    coefficients: np.ndarray
    signal_modes: np.ndarray = field(repr=False)
    idler_modes: np.ndarray = field(repr=False)
    captured_weight: float
    entropy: float
    schmidt_number: float
    concurrence: float


_TRUNCATION_WARN_WEIGHT = 1e-6


def _spectrum_summaries(c2: np.ndarray) -> tuple[float, float, float]:
    total = c2.sum()
    if total <= 0.0:
        raise NormalizationError("Schmidt spectrum has no weight")
    p = c2 / total
    pos = p[p > 0]
    entropy = float(-np.sum(pos * np.log2(pos)))
    purity = float(np.sum(p * p))
    schmidt_number = 1.0 / purity
    concurrence = float(np.sqrt(max(2.0 * (1.0 - purity), 0.0)))
    return entropy, schmidt_number, concurrence


def schmidt_decompose(amp: JointAmplitude,
                      n_modes: int | None = None) -> SchmidtDecomposition:
    """Schmidt decomposition of a gridded amplitude by singular values.

    The amplitude matrix scaled by sqrt(step_s * step_i) is an isometry
    of the continuum problem, so its singular values are the Schmidt
    coefficients directly. Requesting fewer modes than carry weight
    triggers a truncation warning with the dropped probability.
    """
    scaled = amp.values * np.sqrt(amp.signal_grid.step * amp.idler_grid.step)
    u, s, vh = np.linalg.svd(scaled, full_matrices=False)
    full_weight = float(np.sum(s ** 2))
    if n_modes is not None and n_modes < len(s):
        dropped = float(np.sum(s[n_modes:] ** 2))
        if dropped > _TRUNCATION_WARN_WEIGHT:
            warnings.warn(
                f"Schmidt truncation to {n_modes} modes drops probability "
                f"weight {dropped:.3e}", RuntimeWarning, stacklevel=2)
        u, s, vh = u[:, :n_modes], s[:n_modes], vh[:n_modes]
    entropy, schmidt_number, concurrence = _spectrum_summaries(s ** 2)
    return SchmidtDecomposition(
        coefficients=s,
        signal_modes=u / np.sqrt(amp.signal_grid.step),
        idler_modes=vh.conj().T / np.sqrt(amp.idler_grid.step),
        captured_weight=float(np.sum(s ** 2)),
        entropy=entropy,
        schmidt_number=schmidt_number,
        concurrence=concurrence)


def schmidt_decompose_separable(params: SourceParams, n_modes: int = 16,
                                n_grid: int = 2400) -> SchmidtDecomposition:
    """Leading Schmidt structure at parameters too entangled for a grid.

    Diagonalizes the reduced one-photon kernel (see
    `profiles.kernel_schmidt_modes`) instead of the full amplitude, so
    only the compact supports of the leading modes need resolving. The
    spectrum summaries use the renormalized captured weight and are
    meaningful only when that weight is close to the quantity of
    interest; the global purity is better obtained from
    `profiles.kernel_purity`.
    """
    modes = profiles.kernel_schmidt_modes(params, n_modes=n_modes, n_grid=n_grid)
    entropy, schmidt_number, concurrence = _spectrum_summaries(
        modes.coefficients ** 2)
    return SchmidtDecomposition(
        coefficients=modes.coefficients,
        signal_modes=modes.signal_modes,
        idler_modes=modes.idler_modes,
        captured_weight=modes.captured_weight,
        entropy=entropy,
        schmidt_number=schmidt_number,
        concurrence=concurrence)


def schmidt_number_full(params: SourceParams) -> float:
    """Effective Schmidt mode count 1 / Tr(rho^2) of the full state."""
    return 1.0 / profiles.kernel_purity(params)


def basis_mutual_information(params: SourceParams, basis: str = "momentum",
                             **kwargs) -> float:
    """Continuous one-axis mutual information (bits) in the chosen basis."""
    prof = profiles.profiles_for_basis(params, basis, **kwargs)
    return profiles.mutual_information_1d(prof)


def transverse_entropies(params: SourceParams,
                         dims: int = 1) -> profiles.TransverseEntropies:
    """Entropy summary of the transverse state, per axis or full 2-D.

    dims=1 returns the one-axis quantities in the momentum basis using
    the separable factorization; dims=2 returns the full transverse
    entropies via the radial reduction (see
    `profiles.transverse_entropies_2d`). The 2-D mutual information
    always weakly exceeds the 1-D value since the second axis adds
    correlated degrees of freedom.
    """
    if dims == 1:
        prof = profiles.momentum_profiles(params)
        a = profiles.marginal_grid(prof)
        pa = profiles.marginal_density(prof, a)
        h_a = profiles._entropy_bits(pa, a[1] - a[0])
        h_u, h_v = profiles.sum_diff_entropies(prof)
        h_joint = h_u + h_v - 1.0
        return profiles.TransverseEntropies(h_sum=h_u, h_diff=h_v,
                                            h_marginal=h_a, h_joint=h_joint,
                                            mi=2.0 * h_a - h_joint, dims=1)
    if dims == 2:
        return profiles.transverse_entropies_2d(params)
    raise ValueError("dims must be 1 or 2")
