"""k-bit phase codebook, nearest-phase quantization and quantization-error sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import phase_function, steering_vector

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseCodebook:
    """Feasible phase set ``{(2i+1) pi / 2^k : i = 0 .. 2^k - 1}``.

    ``delta_x = pi / 2^k`` is half the codeword spacing, so it bounds the
    quantization error.
    """

    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    @property
    def size(self) -> int:
        return 1 << self.k

    @property
    def delta_x(self) -> float:
        return math.pi / self.size

    @property
    def omega(self) -> np.ndarray:
        return (2 * np.arange(self.size) + 1) * math.pi / self.size


def codebook(k: int) -> PhaseCodebook:
    return PhaseCodebook(k)


@dataclass(frozen=True)
class QuantizedPhase:
    quantized: float
    error: float


def wrap_phase(x):
    """Wrap to (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.where(y == -math.pi, math.pi, y)


def quantize_array(phi, book: PhaseCodebook) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized nearest-codeword quantization on the circle.

    Returns ``(quantized, error)`` with ``error = wrap(phi - quantized)``.
    An input exactly midway between two codewords maps to the numerically
    smaller codeword.
    """
    phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
    n = book.size
    # position in units of codeword spacing, codeword i sits at t == i
    t = (phi - book.delta_x) / (2.0 * book.delta_x)
    lo = np.floor(t)
    frac = t - lo
    i_lo = np.mod(lo, n).astype(np.int64)
    i_hi = np.mod(lo + 1, n).astype(np.int64)
    idx = np.where(frac < 0.5, i_lo, i_hi)
    idx = np.where(frac == 0.5, np.minimum(i_lo, i_hi), idx)
    quantized = (2 * idx + 1) * math.pi / n
    # clip trims 1-ulp rounding overshoot at cell boundaries
    error = np.clip(wrap_phase(phi - quantized), -book.delta_x, book.delta_x)
    return quantized, error


def quantize(phi: float, book: PhaseCodebook) -> QuantizedPhase:
    q, err = quantize_array(phi, book)
    return QuantizedPhase(float(q), float(err))


def sample_quantization_errors(book: PhaseCodebook | None, n: int,
                               rng: np.random.Generator) -> np.ndarray:
    """``n`` draws uniform on ``[-delta_x, delta_x]``.

    ``book=None`` means continuous phases; the errors are then all zero.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if book is None:
        return np.zeros(n)
    return rng.uniform(-book.delta_x, book.delta_x, n)


def design_continuous_phases(theta_ai: float, theta_ib: float, M: int,
                             spacing_over_wavelength: float = 0.5) -> np.ndarray:
    """Continuous IRS phases that co-phase the cascaded LoS path.

    ``phi_m = 2 pi Psi_ib(m) - 2 pi Psi_ai(m)``, not reduced modulo 2 pi.
    """
    return TWO_PI * (phase_function(theta_ib, M, spacing_over_wavelength)
                     - phase_function(theta_ai, M, spacing_over_wavelength))


def cascaded_los_sum(phases, theta_ai: float, theta_ib: float,
                     spacing_over_wavelength: float = 0.5) -> complex:
    """``h(theta_ib)^H diag(exp(j phases)) h(theta_ai)``."""
    phases = np.asarray(phases, dtype=float)
    M = phases.size
    h_ib = steering_vector(theta_ib, M, spacing_over_wavelength)
    h_ai = steering_vector(theta_ai, M, spacing_over_wavelength)
    return complex(np.vdot(h_ib, np.exp(1j * phases) * h_ai))
