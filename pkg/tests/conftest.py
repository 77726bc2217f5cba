"""Shared fixtures and the acceptance-summary reporting hook."""

import numpy as np
import pytest

from spatialqkd.pdc_model import (Grid1D, JointAmplitude, SourceParams,
                                  auto_grid, build_amplitude)

# ---------------------------------------------------------------------------
# acceptance reporting: every acceptance criterion registers one line here,
# printed after the test summary so pass/fail is visible without -s
# ---------------------------------------------------------------------------

_acceptance_lines: dict[int, str] = {}


def record_acceptance(criterion: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    _acceptance_lines[criterion] = f"[{status}] criterion {criterion}: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(_acceptance_lines):
        terminalreporter.write_line(_acceptance_lines[key])


# ---------------------------------------------------------------------------
# parameter sets
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def default_params() -> SourceParams:
    return SourceParams.default()


@pytest.fixture(scope="session")
def scaled_params() -> SourceParams:
    """Weakly entangled configuration resolvable on an explicit grid.

    A small wavenumber puts the first phase-matching zero at about
    25 rad/mm against a 1 rad/mm pump width, so both transverse features
    fit on an affordable two-dimensional grid. Used wherever the
    explicit-grid route is compared against the factorized one.
    """
    return SourceParams(waist_w0=1.0, crystal_length=2.0, wavenumber_K=50.0)


@pytest.fixture(scope="session")
def scaled_amplitude(scaled_params):
    return build_amplitude(scaled_params, auto_grid(scaled_params, num=2048))


# ---------------------------------------------------------------------------
# double-Gaussian surrogate with closed-form everything
# ---------------------------------------------------------------------------

def double_gaussian_amplitude(sigma_sum: float, sigma_diff: float,
                              num: int = 512,
                              span_sigmas: float = 7.0) -> JointAmplitude:
    """Amplitude exp(-(a+b)^2/(4 s+^2) - (a-b)^2/(4 s-^2)), grid-normalized.

    The sum and difference coordinates are independent Gaussians with
    standard deviations ``sigma_sum`` and ``sigma_diff``, which makes the
    marginals, the mutual information, the conditional variances and the
    Schmidt spectrum all available in closed form.
    """
    half = span_sigmas * 0.5 * np.hypot(sigma_sum, sigma_diff)
    grid = Grid1D(-half, half, num)
    a = grid.points[:, None]
    b = grid.points[None, :]
    raw = np.exp(-(a + b) ** 2 / (4.0 * sigma_sum ** 2)
                 - (a - b) ** 2 / (4.0 * sigma_diff ** 2))
    scale = 1.0 / np.sqrt(np.sum(raw ** 2) * grid.step ** 2)
    return JointAmplitude(basis="momentum", signal_grid=grid, idler_grid=grid,
                          values=raw * scale, normalization=scale)


def double_gaussian_schmidt_weights(sigma_sum: float, sigma_diff: float,
                                    n: int) -> np.ndarray:
    """Analytic geometric Schmidt weights of the double-Gaussian state."""
    z = (sigma_sum - sigma_diff) / (sigma_sum + sigma_diff)
    mu = z * z
    return (1.0 - mu) * mu ** np.arange(n)


def double_gaussian_mi_bits(sigma_sum: float, sigma_diff: float) -> float:
    """Closed-form mutual information of the double-Gaussian state."""
    s2, d2 = sigma_sum ** 2, sigma_diff ** 2
    return float(np.log2((s2 + d2) / (2.0 * sigma_sum * sigma_diff)))


def double_gaussian_conditional_variance(sigma_sum: float,
                                         sigma_diff: float) -> float:
    """Closed-form conditional variance Var(a | b) of the same state."""
    s2, d2 = sigma_sum ** 2, sigma_diff ** 2
    return s2 * d2 / (s2 + d2)
