"""LoS steering vectors and Rayleigh magnitude sampling."""

from __future__ import annotations

import numpy as np


def phase_function(theta: float, M: int, spacing_over_wavelength: float = 0.5) -> np.ndarray:
    """Normalized element phase ``-(m - (M+1)/2) * (d/lambda) * cos(theta)``, m = 1..M."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    m = np.arange(1, M + 1, dtype=float)
    return -(m - (M + 1) / 2.0) * spacing_over_wavelength * np.cos(theta)


def steering_vector(theta: float, M: int, spacing_over_wavelength: float = 0.5) -> np.ndarray:
    """ULA steering vector of the IRS, centered on the array midpoint.

    Returns a complex array of length ``M`` with unit-modulus entries
    ``exp(j*2*pi*Psi(m))``.
    """
    return np.exp(2j * np.pi * phase_function(theta, M, spacing_over_wavelength))


def los_direct_channel() -> complex:
    # The closed forms add the direct path as a real, in-phase amplitude.
    return 1.0 + 0.0j


def sample_rayleigh_magnitudes(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` Rayleigh(alpha) magnitudes by inverse-CDF sampling.

    With ``u ~ U(0, 1]``, ``alpha * sqrt(-2 ln u)`` has density
    ``(x/alpha^2) exp(-x^2 / (2 alpha^2))``.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    u = 1.0 - rng.random(n)  # (0, 1], keeps log finite
    return alpha * np.sqrt(-2.0 * np.log(u))


def rayleigh_mean(alpha: float) -> float:
    return alpha * np.sqrt(np.pi / 2.0)


def rayleigh_median(alpha: float) -> float:
    return alpha * np.sqrt(2.0 * np.log(2.0))
