"""Sum/difference coordinate machinery for the biphoton state.

The paraxial two-photon amplitude behind this package factorizes exactly
in the rotated coordinates u = k_s + k_i and v = k_s - k_i: a Gaussian
pump envelope carries the sum while the longitudinal phase-matching
function carries the difference. The same factorization holds again
after Fourier transforming to transverse position, with the narrow and
wide factors trading places. Every joint density needed in either basis
is therefore a product of two one-dimensional densities up to a linear
change of variables, and all marginals, conditionals, entropies and
pixel integrals reduce to one-dimensional quadrature.

This reduction is what keeps the realistic parameter regime tractable.
At the reference settings the two characteristic momentum widths differ
by nearly three orders of magnitude (1/w0 against the first zero of the
phase-matching lobe), so a direct two-dimensional grid that resolves the
narrow feature while covering the wide one would need tens of thousands
of points per axis. The functions here never build that grid; they carry
the two factors separately and recombine them analytically.

Units: transverse momenta in rad/mm, positions in mm, entropies in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import erf

from .errors import ResolutionBudgetError

if TYPE_CHECKING:  # pragma: no cover - import cycle guard for type checkers
    from .pdc_model import SourceParams

_SERIES_CUTOFF = 1e-8


def phase_matching_function(q, crystal_length: float, wavenumber_K: float,
                            mismatch_delta: float = 0.0):
    """Complex longitudinal phase-matching amplitude.

    Evaluates (exp(i*theta) - 1) / (i*theta) with
    theta = (delta - q^2/(4K)) * L. The quotient has a removable
    singularity at theta = 0; below |theta| = 1e-8 it is evaluated by its
    second-order series 1 + i*theta/2 - theta^2/6, which is exact to
    double precision there.

    Parameters
    ----------
    q : array_like
        Transverse momentum difference k_s - k_i in rad/mm.
    crystal_length : float
        Crystal length L in mm.
    wavenumber_K : float
        Degenerate wavenumber K inside the crystal in rad/mm.
    mismatch_delta : float, optional
        Collinear phase mismatch delta = 2K - k_p in rad/mm.

    Returns
    -------
    ndarray of complex
    """
    q = np.asarray(q, dtype=float)
    theta = (mismatch_delta - q * q / (4.0 * wavenumber_K)) * crystal_length
    small = np.abs(theta) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, theta)
    direct = (np.exp(1j * safe) - 1.0) / (1j * safe)
    series = 1.0 + 0.5j * theta - theta * theta / 6.0
    return np.where(small, series, direct)


def phase_matching_intensity(q, crystal_length: float, wavenumber_K: float,
                             mismatch_delta: float = 0.0):
    """|phi_L|^2 evaluated in its exact sinc^2 form (no phase needed)."""
    q = np.asarray(q, dtype=float)
    half = 0.5 * (mismatch_delta - q * q / (4.0 * wavenumber_K)) * crystal_length
    return np.sinc(half / np.pi) ** 2


def difference_width_scale(crystal_length: float, wavenumber_K: float,
                           mismatch_delta: float = 0.0) -> float:
    """Momentum difference at which the phase-matching intensity first vanishes.

    For perfect collinear matching this is sqrt(8 pi K / L); a positive
    mismatch pushes the zero outward. Used as the characteristic width of
    the wide (difference) factor in momentum.
    """
    q2 = 4.0 * wavenumber_K * mismatch_delta + 8.0 * np.pi * wavenumber_K / crystal_length
    if q2 <= 0.0:
        raise ValueError("phase-matching profile has no real first zero for these parameters")
    return float(np.sqrt(q2))


def _gauss_density(x, sigma):
    return np.exp(-0.5 * (x / sigma) ** 2) / (np.sqrt(2.0 * np.pi) * sigma)


def _gauss_cdf(x, sigma):
    return 0.5 * (1.0 + erf(x / (np.sqrt(2.0) * sigma)))


def _entropy_bits(density: np.ndarray, step: float) -> float:
    """Plug-in differential entropy of a gridded density, in bits."""
    p = density[density > 0.0]
    return float(-np.sum(p * np.log2(p)) * step)


def gaussian_entropy_bits(sigma: float, dims: int = 1) -> float:
    """Differential entropy of an isotropic Gaussian, in bits."""
    return dims * 0.5 * np.log2(2.0 * np.pi * np.e * sigma * sigma)


@dataclass(frozen=True)
class SumDiffProfiles:
    """One-dimensional sum and difference densities of one biphoton basis.

    The joint density in this basis is

        p(a, b) = 2 * p_sum(a + b) * p_diff(a - b)

    where p_sum is an exact zero-mean Gaussian of standard deviation
    ``sum_sigma`` and p_diff is carried numerically on ``diff_grid``. The
    attribute ``narrow`` records which factor is the narrow one: the sum
    in momentum (tight anticorrelation), the difference in position
    (photons born at the same spot).
    """

    basis: str
    sum_sigma: float
    diff_grid: np.ndarray
    diff_density: np.ndarray
    narrow: str
    diff_cdf: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.diff_cdf is None:
            step = self.diff_step
            cdf = np.cumsum(self.diff_density) * step
            cdf /= cdf[-1]
            object.__setattr__(self, "diff_cdf", cdf)

    @property
    def diff_step(self) -> float:
        return float(self.diff_grid[1] - self.diff_grid[0])

    @property
    def diff_sigma(self) -> float:
        """RMS width of the difference density (numeric)."""
        m2 = np.sum(self.diff_grid ** 2 * self.diff_density) * self.diff_step
        return float(np.sqrt(m2))

    def diff_density_at(self, x):
        """Difference density interpolated at arbitrary points (0 outside)."""
        return np.interp(x, self.diff_grid, self.diff_density, left=0.0, right=0.0)

    def diff_window(self, lo, hi):
        """Probability mass of the difference coordinate in [lo, hi]."""
        c = lambda x: np.interp(x, self.diff_grid, self.diff_cdf, left=0.0, right=1.0)
        return c(hi) - c(lo)

    def sum_window(self, lo, hi):
        """Probability mass of the sum coordinate in [lo, hi] (analytic)."""
        return _gauss_cdf(hi, self.sum_sigma) - _gauss_cdf(lo, self.sum_sigma)


def momentum_profiles(params: "SourceParams", n_points: int = 2 ** 17,
                      span_zeros: float = 48.0) -> SumDiffProfiles:
    """Sum/difference densities of the transverse-momentum basis.

    The sum k_s + k_i is Gaussian with standard deviation 1/w0 (pump
    envelope); the difference carries the sinc^2 phase-matching profile,
    gridded out to ``span_zeros`` times its first zero so that the slow
    q^-4 tails are captured.
    """
    scale = difference_width_scale(params.crystal_length, params.wavenumber_K,
                                   params.mismatch_delta)
    half = span_zeros * scale
    v = np.linspace(-half, half, n_points)
    pv = phase_matching_intensity(v, params.crystal_length, params.wavenumber_K,
                                  params.mismatch_delta)
    pv = pv / (pv.sum() * (v[1] - v[0]))
    return SumDiffProfiles(basis="momentum", sum_sigma=1.0 / params.waist_w0,
                           diff_grid=v, diff_density=pv, narrow="sum")


def position_profiles(params: "SourceParams", n_points: int = 2 ** 17,
                      span_zeros: float = 48.0,
                      tail_mass: float = 1e-9) -> SumDiffProfiles:
    """Sum/difference densities of the transverse-position basis.

    The position sum x_s + x_i is Gaussian with standard deviation w0
    (Fourier pair of the pump envelope). The position difference density
    is |FT(phi_L)(y/2)|^2, obtained from a dense FFT of the complex
    phase-matching amplitude; the retained phase matters here. The
    outermost grid region holding at most ``tail_mass`` of probability is
    trimmed to keep downstream convolutions affordable.
    """
    scale = difference_width_scale(params.crystal_length, params.wavenumber_K,
                                   params.mismatch_delta)
    half = span_zeros * scale
    v = np.linspace(-half, half, n_points)
    dv = v[1] - v[0]
    phi = phase_matching_function(v, params.crystal_length, params.wavenumber_K,
                                  params.mismatch_delta)
    spectrum = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(phi))) * dv
    t = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(n_points, d=dv))
    y = 2.0 * t
    dy = y[1] - y[0]
    py = np.abs(spectrum) ** 2
    py = py / (py.sum() * dy)

    # trim tails: keep the central region holding 1 - tail_mass of the mass
    cdf = np.cumsum(py) * dy
    cdf /= cdf[-1]
    lo = int(np.searchsorted(cdf, tail_mass / 2.0))
    hi = int(np.searchsorted(cdf, 1.0 - tail_mass / 2.0)) + 1
    lo, hi = max(lo - 1, 0), min(hi + 1, n_points)
    y, py = y[lo:hi], py[lo:hi]
    py = py / (py.sum() * dy)
    return SumDiffProfiles(basis="position", sum_sigma=params.waist_w0,
                           diff_grid=y, diff_density=py, narrow="diff")


def profiles_for_basis(params: "SourceParams", basis: str, **kwargs) -> SumDiffProfiles:
    if basis == "momentum":
        return momentum_profiles(params, **kwargs)
    if basis == "position":
        return position_profiles(params, **kwargs)
    raise ValueError(f"unknown basis {basis!r}")


# ---------------------------------------------------------------------------
# marginals and entropies
# ---------------------------------------------------------------------------

_HERMITE_NODES = 61


def _gauss_hermite(n=_HERMITE_NODES):
    x, w = hermegauss(n)
    return x, w / np.sqrt(2.0 * np.pi)


def marginal_grid(prof: SumDiffProfiles, n_points: int = 2 ** 15) -> np.ndarray:
    """A symmetric grid covering the single-photon marginal of this basis."""
    half = 0.5 * float(np.abs(prof.diff_grid[-1])) + 8.0 * prof.sum_sigma
    return np.linspace(-half, half, n_points)


def marginal_density(prof: SumDiffProfiles, a: np.ndarray) -> np.ndarray:
    """Single-photon marginal density on the supplied grid.

    The marginal is the convolution p_a(a) = 2 (p_sum * p_diff)(2a). It
    is evaluated by integrating over whichever factor is narrow: against
    Gauss-Hermite nodes when the Gaussian sum is narrow (momentum), or by
    direct summation over the numeric difference density when that one is
    narrow (position). Either way the wide factor is evaluated exactly at
    shifted arguments, so no two-dimensional grid appears.
    """
    a = np.asarray(a, dtype=float)
    if prof.narrow == "sum":
        nodes, weights = _gauss_hermite()
        out = np.zeros_like(a)
        for x, w in zip(nodes, weights):
            out += w * prof.diff_density_at(2.0 * a - prof.sum_sigma * x)
        return 2.0 * out
    # narrow difference factor: sum over its grid against the exact Gaussian
    out = np.zeros_like(a)
    d, pd, dd = prof.diff_grid, prof.diff_density, prof.diff_step
    chunk = max(1, int(2 ** 22 // max(len(d), 1)))
    for i in range(0, len(a), chunk):
        block = a[i:i + chunk, None]
        out[i:i + chunk] = (pd[None, :] * _gauss_density(2.0 * block - d[None, :],
                                                         prof.sum_sigma)).sum(axis=1) * dd
    return 2.0 * out


def quantile_half_extent(grid: np.ndarray, density: np.ndarray, coverage: float) -> float:
    """Half-width of the symmetric central interval holding ``coverage`` mass."""
    step = grid[1] - grid[0]
    cdf = np.cumsum(density) * step
    cdf /= cdf[-1]
    target = 0.5 * (1.0 + coverage)
    return float(abs(np.interp(target, cdf, grid)))


def marginal_half_extent(prof: SumDiffProfiles, coverage: float,
                         n_points: int = 2 ** 15) -> float:
    """Symmetric half-extent holding ``coverage`` of the single-photon marginal."""
    a = marginal_grid(prof, n_points)
    pa = marginal_density(prof, a)
    return quantile_half_extent(a, pa, coverage)


def sum_diff_entropies(prof: SumDiffProfiles) -> tuple[float, float]:
    """Differential entropies (bits) of the sum and difference densities."""
    h_sum = gaussian_entropy_bits(prof.sum_sigma)
    h_diff = _entropy_bits(prof.diff_density, prof.diff_step)
    return h_sum, h_diff


def mutual_information_1d(prof: SumDiffProfiles, n_marginal: int = 2 ** 15) -> float:
    """Continuous mutual information of the two photons in this basis, in bits.

    Uses the exact identity for a density of the form
    2 p_u(a+b) p_v(a-b): the joint entropy is h(u) + h(v) - 1 bit (the
    log-determinant of the rotation), so I = 2 h(a) - h(u) - h(v) + 1.
    """
    a = marginal_grid(prof, n_marginal)
    pa = marginal_density(prof, a)
    h_a = _entropy_bits(pa, a[1] - a[0])
    h_u, h_v = sum_diff_entropies(prof)
    return 2.0 * h_a - h_u - h_v + 1.0


def mean_conditional_variance(prof: SumDiffProfiles, n_outer: int = 129,
                              n_inner: int = 2 ** 12) -> float:
    """Average over one photon of the conditional variance of the other.

    Computes E_b[Var(a | b)] for the pure-state joint density of this
    basis. For each conditioning value the slice density is the product
    of the narrow factor (integrated on a dense local grid) and the wide
    factor evaluated analytically, so the conditional moments come from
    one-dimensional sums. The outer average uses the exact marginal as
    the weight.
    """
    a = marginal_grid(prof)
    pa = marginal_density(prof, a)
    half = quantile_half_extent(a, pa, 1.0 - 1e-8)
    b = np.linspace(-half, half, n_outer)
    wb = marginal_density(prof, b)
    wb = wb / wb.sum()

    if prof.narrow == "sum":
        # slice over s = a + b: weight p_sum(s) * p_diff(s - 2b), Var(a|b) = Var(s|b)
        s = np.linspace(-10.0 * prof.sum_sigma, 10.0 * prof.sum_sigma, n_inner)
        w = _gauss_density(s, prof.sum_sigma)[None, :] * \
            prof.diff_density_at(s[None, :] - 2.0 * b[:, None])
        coord = np.broadcast_to(s[None, :], w.shape)
    else:
        # slice over d = a - b: weight p_diff(d) * p_sum(2b + d), Var(a|b) = Var(d|b)
        d = np.linspace(prof.diff_grid[0], prof.diff_grid[-1], n_inner)
        w = prof.diff_density_at(d)[None, :] * \
            _gauss_density(2.0 * b[:, None] + d[None, :], prof.sum_sigma)
        coord = np.broadcast_to(d[None, :], w.shape)

    norm = w.sum(axis=1)
    good = norm > 0.0
    m1 = (w * coord).sum(axis=1)[good] / norm[good]
    m2 = (w * coord * coord).sum(axis=1)[good] / norm[good]
    var = m2 - m1 * m1
    weights = wb[good] / wb[good].sum()
    return float((weights * var).sum())


# ---------------------------------------------------------------------------
# pixel binning
# ---------------------------------------------------------------------------

def binned_pixel_joint(prof: SumDiffProfiles, edges: np.ndarray,
                       subdiv: int = 48) -> np.ndarray:
    """Raw pixel-pair probabilities over a square detector array.

    Integrates the joint density over every pixel pair semi-analytically:
    the narrow factor is integrated over the partner pixel exactly (an
    erf window for the Gaussian sum, the numeric CDF for the difference
    density) while the wide factor is evaluated at the slice center and
    integrated on a ``subdiv``-fold subdivision of each pixel. Returns
    the n x n matrix of absolute probabilities; its total is the
    both-photons-in-array mass, deliberately not renormalized here.

    Binning is exactly nested: halving n with the same total subdivision
    reproduces 2 x 2 block sums to machine precision, because the narrow
    windows telescope across shared pixel edges.
    """
    edges = np.asarray(edges, dtype=float)
    n = len(edges) - 1
    fine = np.linspace(edges[0], edges[-1], n * subdiv + 1)
    centers = 0.5 * (fine[1:] + fine[:-1])
    step = centers[1] - centers[0]

    if prof.narrow == "sum":
        # b in pixel j  <=>  s = a + b in [a + e_j, a + e_{j+1}]
        wide = 2.0 * prof.diff_density_at(2.0 * centers)
        upper = _gauss_cdf((centers[None, :] + edges[1:, None]) / prof.sum_sigma, 1.0)
        lower = _gauss_cdf((centers[None, :] + edges[:-1, None]) / prof.sum_sigma, 1.0)
    else:
        # b in pixel j  <=>  d = a - b in [a - e_{j+1}, a - e_j]
        wide = 2.0 * _gauss_density(2.0 * centers, prof.sum_sigma)
        cdf_at = lambda x: np.interp(x, prof.diff_grid, prof.diff_cdf, left=0.0, right=1.0)
        upper = cdf_at(centers[None, :] - edges[:-1, None])
        lower = cdf_at(centers[None, :] - edges[1:, None])

    windows = (upper - lower) * wide[None, :]
    # accumulate the fine axis into Alice pixels: result[i, j]
    joint = windows.reshape(n, n, subdiv).sum(axis=2).T * step
    return joint


def marginal_pixel_masses(prof: SumDiffProfiles, edges: np.ndarray,
                          n_points: int = 2 ** 15) -> np.ndarray:
    """Single-photon probability mass inside each pixel of one array."""
    a = marginal_grid(prof, n_points)
    pa = marginal_density(prof, a)
    step = a[1] - a[0]
    cdf = np.cumsum(pa) * step
    cdf /= cdf[-1]
    at = np.interp(edges, a, cdf, left=0.0, right=1.0)
    return np.diff(at)


# ---------------------------------------------------------------------------
# cross-basis joint density
# ---------------------------------------------------------------------------

def cross_basis_mutual_information(params: "SourceParams", n_alice: int = 1024,
                                   alice_sigmas: float = 5.0,
                                   row_chunk: int = 16) -> tuple[float, float]:
    """Mutual information between one photon's momentum and the other's position.

    Builds the mixed-basis density |g(k_s, x_i)|^2, where g is the
    partial Fourier transform of the two-photon amplitude over the idler
    momentum, by FFT of Gaussian-windowed phase-matching slices row by
    row. The plug-in entropies are accumulated streaming so the full
    mixed density never has to be stored.

    Returns
    -------
    (mi_bits, total_mass)
        The mutual information in bits and the integrated density, which
        should be 1 up to quadrature error (useful as a validity check).
    """
    w0 = params.waist_w0
    scale = difference_width_scale(params.crystal_length, params.wavenumber_K,
                                   params.mismatch_delta)
    # the idler-momentum integrand is phi_L windowed by a Gaussian of width
    # ~2/w0; the grid must resolve the window and cover the wide profile
    dv_target = min(2.0 / w0 / 12.0, scale / 64.0)
    half_v = 24.0 * scale
    n_v = int(2 ** np.ceil(np.log2(2.0 * half_v / dv_target)))
    n_v = min(max(n_v, 2 ** 12), 2 ** 20)
    v = np.linspace(-half_v, half_v, n_v)
    dv = v[1] - v[0]
    phi = phase_matching_function(v, params.crystal_length, params.wavenumber_K,
                                  params.mismatch_delta)
    dy = 2.0 * np.pi / (n_v * dv)
    # amplitude normalization |C|^2 and the 1/(2 pi) of the unitary partial
    # Fourier transform, so the mixed density integrates to 1
    i_u = np.sqrt(2.0 * np.pi) / w0
    i_v = phase_matching_norm(params)
    density_scale = 2.0 / (i_u * i_v) / (2.0 * np.pi)

    # Alice momentum grid spanning her marginal
    prof_k = momentum_profiles(params)
    a_grid = marginal_grid(prof_k, 2 ** 15)
    pa = marginal_density(prof_k, a_grid)
    sigma_a = float(np.sqrt(np.sum(a_grid ** 2 * pa) * (a_grid[1] - a_grid[0])))
    a = np.linspace(-alice_sigmas * sigma_a, alice_sigmas * sigma_a, n_alice)
    da = a[1] - a[0]

    mass = 0.0
    h_joint = 0.0
    p_alice = np.zeros(n_alice)
    p_y = np.zeros(n_v)
    for i in range(0, n_alice, row_chunk):
        block = a[i:i + row_chunk, None]
        windowed = np.exp(-(w0 ** 2) * (2.0 * block - v[None, :]) ** 2 / 4.0) * phi[None, :]
        g = np.fft.fft(windowed, axis=1) * dv
        rows = np.abs(g) ** 2 * density_scale
        mass_rows = rows.sum(axis=1)
        p_alice[i:i + row_chunk] = mass_rows * dy
        p_y += rows.sum(axis=0) * da
        mass += mass_rows.sum() * dy * da
        pos = rows[rows > 0.0]
        h_joint -= float(np.sum(pos * np.log2(pos))) * da * dy

    p_alice /= mass
    p_y /= mass
    h_joint = h_joint / mass + np.log2(mass)
    h_a = _entropy_bits(p_alice, da)
    h_y = _entropy_bits(p_y, dy)
    mi = h_a + h_y - h_joint
    return float(mi), float(mass)


# ---------------------------------------------------------------------------
# Schmidt structure from the reduced one-photon kernel
# ---------------------------------------------------------------------------

def phase_matching_norm(params: "SourceParams", n_points: int = 2 ** 17,
                        span_zeros: float = 48.0) -> float:
    """Integral of |phi_L|^2 over the momentum difference, by dense Simpson sum."""
    scale = difference_width_scale(params.crystal_length, params.wavenumber_K,
                                   params.mismatch_delta)
    v = np.linspace(-span_zeros * scale, span_zeros * scale, n_points)
    pv = phase_matching_intensity(v, params.crystal_length, params.wavenumber_K,
                                  params.mismatch_delta)
    return float(pv.sum() * (v[1] - v[0]))


def pair_amplitude_rows(params: "SourceParams", a_rows: np.ndarray,
                        b_cols: np.ndarray) -> np.ndarray:
    """Normalized two-photon momentum amplitude evaluated on a row/column grid.

    The normalization constant follows from the factorization: with
    I_u the Gaussian integral of the squared sum factor and I_v the
    phase-matching norm, |C|^2 = 2 / (I_u I_v) makes the continuous
    density integrate to 1.
    """
    w0 = params.waist_w0
    i_u = np.sqrt(2.0 * np.pi) / w0
    i_v = phase_matching_norm(params)
    c = np.sqrt(2.0 / (i_u * i_v))
    gauss = np.exp(-(w0 ** 2) * (a_rows[:, None] + b_cols[None, :]) ** 2 / 4.0)
    phi = phase_matching_function(a_rows[:, None] - b_cols[None, :],
                                  params.crystal_length, params.wavenumber_K,
                                  params.mismatch_delta)
    return c * gauss * phi


@dataclass(frozen=True)
class KernelSchmidtModes:
    """Leading Schmidt structure extracted from the reduced one-photon kernel.

    coefficients are the singular values c_i (descending, continuum
    normalization, sum of squares at most 1); signal_modes and
    idler_modes are column-wise mode functions on ``grid``;
    captured_weight is the probability weight sum(c_i^2) retained by the
    truncation.
    """

    coefficients: np.ndarray
    signal_modes: np.ndarray
    idler_modes: np.ndarray
    grid: np.ndarray
    captured_weight: float

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])


def reduced_density_kernel(params: "SourceParams", grid: np.ndarray,
                           n_hermite: int = _HERMITE_NODES) -> np.ndarray:
    """One-photon reduced density kernel rho(a, a') in the momentum basis.

    Tracing the pure two-photon state over the partner photon leaves

        rho(a, a') = |C|^2 e^{-w0^2 (a-a')^2 / 8} * sqrt(2 pi)/w0
                     * E_x[ phi(2m + d/2 - x/w0) phi*(2m - d/2 - x/w0) ]

    with m = (a+a')/2, d = a-a' and x a standard normal variable; the
    expectation is evaluated with Gauss-Hermite quadrature, which is
    exact for the Gaussian weight. Eigenvalues of the kernel times the
    grid step are the squared Schmidt coefficients.
    """
    w0 = params.waist_w0
    i_u = np.sqrt(2.0 * np.pi) / w0
    i_v = phase_matching_norm(params)
    c2 = 2.0 / (i_u * i_v)
    m = 0.5 * (grid[:, None] + grid[None, :])
    d = grid[:, None] - grid[None, :]
    nodes, weights = _gauss_hermite(n_hermite)
    acc = np.zeros((len(grid), len(grid)), dtype=complex)
    for x, w in zip(nodes, weights):
        shift = x / w0
        acc += w * phase_matching_function(2.0 * m + 0.5 * d - shift,
                                           params.crystal_length,
                                           params.wavenumber_K,
                                           params.mismatch_delta) \
                 * np.conj(phase_matching_function(2.0 * m - 0.5 * d - shift,
                                                   params.crystal_length,
                                                   params.wavenumber_K,
                                                   params.mismatch_delta))
    return c2 * np.exp(-(w0 ** 2) * d * d / 8.0) * i_u * acc


def kernel_schmidt_modes(params: "SourceParams", n_modes: int = 16,
                         half_extent: float | None = None,
                         n_grid: int = 2400) -> KernelSchmidtModes:
    """Leading Schmidt coefficients and mode pairs at full physical fidelity.

    Diagonalizes the reduced one-photon kernel on a dense local grid
    (the leading modes are compactly supported even though the full
    marginal has very wide tails), then reconstructs the partner modes
    by projecting the two-photon amplitude onto each signal mode. This
    route handles parameter sets whose direct two-dimensional grid would
    be unaffordable.
    """
    from scipy.linalg import eigh

    if half_extent is None:
        au = 1.0 / params.waist_w0
        scale = difference_width_scale(params.crystal_length, params.wavenumber_K,
                                       params.mismatch_delta)
        prof = momentum_profiles(params, n_points=2 ** 15)
        ell = np.sqrt(au * max(prof.diff_sigma, au))
        half_extent = 3.2 * np.sqrt(2.0 * n_modes + 1.0) * ell
    grid = np.linspace(-half_extent, half_extent, n_grid)
    step = grid[1] - grid[0]
    kernel = reduced_density_kernel(params, grid)
    eigvals, eigvecs = eigh(kernel)
    order = np.argsort(eigvals)[::-1][:n_modes]
    c2 = np.clip(eigvals[order] * step, 0.0, None)
    signal = eigvecs[:, order] / np.sqrt(step)

    psi = pair_amplitude_rows(params, grid, grid)
    c = np.sqrt(c2)
    idler = (signal.conj().T @ psi) * step / np.where(c > 0, c, 1.0)[:, None]
    return KernelSchmidtModes(coefficients=c, signal_modes=signal,
                              idler_modes=idler.T, grid=grid,
                              captured_weight=float(c2.sum()))


def kernel_purity(params: "SourceParams", half_extent: float = 2000.0,
                  n_grid: int = 3000) -> float:
    """Purity of the reduced one-photon state, Tr(rho^2) = sum c_i^4.

    Computed directly from the kernel as a double grid sum, which
    converges without resolving individual high-order modes. The inverse
    is the Schmidt number (effective mode count).
    """
    grid = np.linspace(-half_extent, half_extent, n_grid)
    step = grid[1] - grid[0]
    kernel = reduced_density_kernel(params, grid, n_hermite=41)
    return float(np.sum(np.abs(kernel) ** 2) * step * step)


# ---------------------------------------------------------------------------
# full two-dimensional transverse entropies (radial reduction)
# ---------------------------------------------------------------------------

def _radial_entropy_bits(r: np.ndarray, density: np.ndarray) -> float:
    """Entropy in bits of an isotropic 2-D density given its radial profile."""
    step = r[1] - r[0]
    integrand = np.zeros_like(density)
    good = density > 0.0
    integrand[good] = density[good] * np.log2(density[good])
    return float(-2.0 * np.pi * np.sum(r * integrand) * step)


@dataclass(frozen=True)
class TransverseEntropies:
    """Entropies (bits) of the full two-dimensional transverse model."""

    h_sum: float
    h_diff: float
    h_marginal: float
    h_joint: float
    mi: float
    dims: int = 2


def transverse_entropies_2d(params: "SourceParams", n_radial: int = 2 ** 17,
                            span_zeros: float = 48.0,
                            n_marginal: int = 2 ** 13,
                            memory_budget_mb: float = 512.0) -> TransverseEntropies:
    """Entropies and mutual information of the full 2-D transverse vectors.

    The amplitude factorizes in the vector sum and difference of the two
    transverse momenta: an isotropic Gaussian (closed-form entropy) and
    the radially symmetric phase-matching intensity (radial quadrature).
    The joint entropy is their sum minus the exact 2-bit Jacobian of the
    linear change of variables per transverse dimension pair, and the
    marginal follows from a radially reduced 2-D convolution evaluated
    with Gauss-Hermite quadrature. Memory use is estimated up front; an
    oversized request raises with a suggested resolution.
    """
    nodes, weights = _gauss_hermite()
    peak_bytes = min(n_marginal, 512) * len(nodes) ** 2 * 8
    if peak_bytes > memory_budget_mb * 1e6:
        suggested = int(memory_budget_mb * 1e6 / (len(nodes) ** 2 * 8)) * 512
        raise ResolutionBudgetError(
            f"radial convolution needs ~{peak_bytes / 1e6:.0f} MB, over the "
            f"{memory_budget_mb:.0f} MB budget; try n_marginal <= {suggested}",
            suggested=suggested)

    sigma_u = 1.0 / params.waist_w0
    scale = difference_width_scale(params.crystal_length, params.wavenumber_K,
                                   params.mismatch_delta)
    q = np.linspace(0.0, span_zeros * scale, n_radial)
    dq = q[1] - q[0]
    pv = phase_matching_intensity(q, params.crystal_length, params.wavenumber_K,
                                  params.mismatch_delta)
    norm_v = 2.0 * np.pi * np.sum(q * pv) * dq
    pv = pv / norm_v
    h_diff = _radial_entropy_bits(q, pv)
    h_sum = gaussian_entropy_bits(sigma_u, dims=2)

    # radial profile of the single-photon marginal: p(a) = 4 (p_u ** p_v)(2a)
    r = np.linspace(0.0, 0.5 * span_zeros * scale * 0.5 + 8.0 * sigma_u, n_marginal)
    gx = sigma_u * np.repeat(nodes, len(nodes))
    gy = sigma_u * np.tile(nodes, len(nodes))
    wxy = (weights[:, None] * weights[None, :]).ravel()
    marg = np.zeros_like(r)
    chunk = 512
    for i in range(0, n_marginal, chunk):
        rr = r[i:i + chunk]
        radius = np.hypot(2.0 * rr[:, None] - gx[None, :], gy[None, :])
        marg[i:i + chunk] = (np.interp(radius, q, pv, right=0.0) * wxy[None, :]).sum(axis=1)
    marg *= 4.0
    dr = r[1] - r[0]
    total = 2.0 * np.pi * np.sum(r * marg) * dr
    marg = marg / total
    h_marg = _radial_entropy_bits(r, marg)

    h_joint = h_sum + h_diff - 2.0
    mi = 2.0 * h_marg - h_joint
    return TransverseEntropies(h_sum=h_sum, h_diff=h_diff, h_marginal=h_marg,
                               h_joint=h_joint, mi=mi)
