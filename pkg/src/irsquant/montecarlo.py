"""Seeded Monte Carlo estimators used as independent checks of the closed forms.

Every estimator splits its work into fixed-size blocks. Block ``i`` draws
from ``SeedSequence(seed, spawn_key=(i,))``, so the stream used by a block
depends only on ``(seed, i)`` and never on scheduling. Per-block moments are
merged in block order, which makes threaded and serial runs bit-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytics import QuantizationModel, receive_amplitude
from .channels import sample_rayleigh_magnitudes
from .config import ChannelKind, LinkBudget, SystemConfig, build_link_budget
from .quantizer import PhaseCodebook, quantize_array, sample_quantization_errors

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class EstimatorResult:
    """Sample mean with its standard error.

    For complex means ``std_error`` refers to the real part and
    ``std_error_imag`` to the imaginary part.
    """

    mean: float | complex
    std_error: float
    n: int
    seed: int
    std_error_imag: float | None = None

    def z_score(self, expected: float | complex) -> float:
        """Deviation from ``expected`` in standard errors (real part for complex means)."""
        diff = abs(complex(self.mean).real - complex(expected).real)
        return _ratio(diff, self.std_error)

    def z_score_imag(self, expected: float = 0.0) -> float:
        diff = abs(complex(self.mean).imag - expected)
        return _ratio(diff, self.std_error_imag or 0.0)

    def agrees(self, expected: float | complex, n_sigma: float = 3.0) -> bool:
        return self.z_score(expected) <= n_sigma


def _ratio(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else math.inf


@dataclass(frozen=True)
class TrialConfig:
    trials: int
    seed: int = 0
    symbols_per_trial: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.symbols_per_trial < 1:
            raise ValueError("symbols_per_trial must be >= 1")


@dataclass(frozen=True)
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0  # sum of squared deviations

    @classmethod
    def of(cls, x: np.ndarray) -> _Moments:
        x = np.asarray(x, dtype=float).ravel()
        if x.size == 0:
            return cls()
        # shifting by a sample keeps constant data exact and limits cancellation
        d = x - x[0]
        s1 = float(d.sum())
        m2 = float(np.dot(d, d)) - s1 * s1 / x.size
        return cls(x.size, float(x[0]) + s1 / x.size, max(m2, 0.0))

    def merge(self, other: _Moments) -> _Moments:
        if self.n == 0:
            return other
        if other.n == 0:
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        return _Moments(
            n,
            self.mean + delta * other.n / n,
            self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        )

    @property
    def std_error(self) -> float:
        if self.n < 2:
            return math.inf
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Random stream for one block; a pure function of ``(seed, block)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _run_blocks(total: int, block_size: int, seed: int,
                fn: Callable[[np.random.Generator, int], object], workers: int = 1) -> list:
    if total < 1:
        raise ValueError(f"sample count must be >= 1, got {total}")
    full, rest = divmod(total, block_size)
    counts = [block_size] * full + ([rest] if rest else [])

    def job(i: int):
        return fn(block_rng(seed, i), counts[i])

    if workers > 1 and len(counts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, range(len(counts))))
    return [job(i) for i in range(len(counts))]


def _reduce(parts: list[tuple[_Moments, ...]]) -> tuple[_Moments, ...]:
    acc = [_Moments()] * len(parts[0])
    for part in parts:
        acc = [a.merge(p) for a, p in zip(acc, part)]
    return tuple(acc)


def _book(k: int | None) -> PhaseCodebook | None:
    return None if k is None else PhaseCodebook(k)


def mc_gain_los(M: int, k: int | None, trials: int, seed: int, *,
                workers: int = 1) -> EstimatorResult:
    """Estimate ``E[exp(j dphi)]`` from ``M * trials`` uniform quantization errors.

    ``k=None`` forces all errors to zero. The real part should approach
    ``sinc(pi/2^k)`` and the imaginary part zero.
    """
    if M < 1 or trials < 1:
        raise ValueError("M and trials must be >= 1")
    book = _book(k)

    def block(rng, count):
        err = sample_quantization_errors(book, count, rng)
        return _Moments.of(np.cos(err)), _Moments.of(np.sin(err))

    re, im = _reduce(_run_blocks(M * trials, BLOCK_SIZE, seed, block, workers))
    return EstimatorResult(complex(re.mean, im.mean), re.std_error, re.n, seed,
                           std_error_imag=im.std_error)


def mc_w_g_rayleigh(M: int, k: int | None, alpha_ai: float, alpha_ib: float,
                    trials: int, seed: int, *,
                    workers: int = 1) -> tuple[EstimatorResult, EstimatorResult]:
    """Estimate the in-phase (W) and quadrature (G) per-element cascade terms.

    W averages ``|h_ib| |h_ai| cos(dphi)`` and G averages
    ``|h_ib| |h_ai| sin(dphi)`` over ``M * trials`` independent elements.
    """
    if M < 1 or trials < 1:
        raise ValueError("M and trials must be >= 1")
    book = _book(k)

    def block(rng, count):
        h_ib = sample_rayleigh_magnitudes(alpha_ib, count, rng)
        h_ai = sample_rayleigh_magnitudes(alpha_ai, count, rng)
        err = sample_quantization_errors(book, count, rng)
        prod = h_ib * h_ai
        return _Moments.of(prod * np.cos(err)), _Moments.of(prod * np.sin(err))

    w, g = _reduce(_run_blocks(M * trials, BLOCK_SIZE, seed, block, workers))
    return (EstimatorResult(w.mean, w.std_error, w.n, seed),
            EstimatorResult(g.mean, g.std_error, g.n, seed))


def _element_errors(book, rng, shape, phase_errors: str) -> np.ndarray:
    if book is None:
        return np.zeros(shape)
    if phase_errors == "uniform":
        return sample_quantization_errors(book, math.prod(shape), rng).reshape(shape)
    if phase_errors == "quantized":
        # quantize arbitrary continuous phases instead of assuming the error law
        desired = rng.uniform(0.0, 2.0 * math.pi, shape)
        return quantize_array(desired, book)[1]
    raise ValueError(f"unknown phase_errors mode {phase_errors!r}")


def mc_receive_amplitude(config: SystemConfig, channel_kind: ChannelKind | str,
                         k: int | None, trials: int, seed: int, *,
                         budget: LinkBudget | None = None,
                         phase_errors: str = "uniform",
                         workers: int = 1) -> EstimatorResult:
    """Mean noiseless receive amplitude over ``trials`` simulated links.

    LoS:      ``sqrt(g_aib P) |sum_m exp(j dphi_m)| + sqrt(g_ab P)``
    Rayleigh: ``sqrt(g_aib P) |sum_m |h_ib|_m |h_ai|_m exp(j dphi_m)| + sqrt(g_ab P) |h_ab|``

    ``phase_errors="quantized"`` derives each error by quantizing a uniformly
    random continuous phase rather than sampling the uniform error law.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    kind = ChannelKind(channel_kind)
    budget = build_link_budget(config, kind) if budget is None else budget
    book = _book(k)
    M = config.M
    p_a = config.transmit_power_linear
    reflect = np.sqrt(budget.g_aib * p_a)
    direct = np.sqrt(budget.g_ab * p_a)

    def block(rng, count):
        err = _element_errors(book, rng, (count, M), phase_errors)
        if kind is ChannelKind.LOS:
            coherent = np.abs(np.exp(1j * err).sum(axis=1))
            amp = reflect * coherent + direct
        else:
            h_ib = sample_rayleigh_magnitudes(config.alpha_ib, count * M, rng).reshape(count, M)
            h_ai = sample_rayleigh_magnitudes(config.alpha_ai, count * M, rng).reshape(count, M)
            h_ab = sample_rayleigh_magnitudes(config.alpha_ab, count, rng)
            coherent = np.abs((h_ib * h_ai * np.exp(1j * err)).sum(axis=1))
            amp = reflect * coherent + direct * h_ab
        return (_Moments.of(amp),)

    per_block = max(1, BLOCK_SIZE // M)
    (amp,) = _reduce(_run_blocks(trials, per_block, seed, block, workers))
    return EstimatorResult(amp.mean, amp.std_error, amp.n, seed)


# Gray-mapped QPSK, one unit of energy per bit: bits (b0, b1) -> (1-2*b0) + j(1-2*b1)
_QPSK_BITS = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int8)
_QPSK_POINTS = (1 - 2 * _QPSK_BITS[:, 0]) + 1j * (1 - 2 * _QPSK_BITS[:, 1])


def mc_ber_qpsk(amplitude: float, noise_power: float, symbols: int, seed: int, *,
                decision: str = "gray", workers: int = 1) -> EstimatorResult:
    """Simulate Gray-coded QPSK over a flat channel of gain ``amplitude`` in AWGN.

    Noise is circular complex Gaussian of total power ``noise_power``
    (half per quadrature). ``decision="gray"`` picks the nearest
    constellation point and demaps it; ``decision="per_bit"`` slices each
    quadrature independently. Returns the bit error fraction over
    ``2 * symbols`` bits with its binomial standard error.
    """
    if symbols < 1:
        raise ValueError(f"symbols must be >= 1, got {symbols}")
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    if decision not in ("gray", "per_bit"):
        raise ValueError(f"unknown decision rule {decision!r}")
    noise_std = math.sqrt(noise_power / 2.0)

    def block(rng, count):
        bits = rng.integers(0, 2, size=(count, 2), dtype=np.int8)
        tx = (1 - 2 * bits[:, 0]) + 1j * (1 - 2 * bits[:, 1])
        noise = rng.standard_normal((count, 2)) * noise_std
        rx = amplitude * tx + (noise[:, 0] + 1j * noise[:, 1])
        if decision == "gray":
            nearest = np.argmin(np.abs(rx[:, None] - amplitude * _QPSK_POINTS[None, :]), axis=1)
            decided = _QPSK_BITS[nearest]
        else:
            decided = np.column_stack([rx.real < 0, rx.imag < 0]).astype(np.int8)
        return int(np.count_nonzero(decided != bits))

    errors = sum(_run_blocks(symbols, 1 << 18, seed, block, workers))
    n_bits = 2 * symbols
    p = errors / n_bits
    return EstimatorResult(p, math.sqrt(p * (1.0 - p) / n_bits), n_bits, seed)


def resolve_adaptively(estimate: Callable[[int], EstimatorResult], expected: float,
                       n_start: int, n_cap: int = 10**7,
                       n_sigma: float = 6.0) -> EstimatorResult:
    """Double the sample budget until ``|expected| > n_sigma * std_error`` or the cap is hit.

    ``estimate(n)`` must run the estimator with ``n`` samples.
    """
    n = min(n_start, n_cap)
    while True:
        result = estimate(n)
        if abs(expected) > n_sigma * result.std_error or n >= n_cap:
            return result
        n = min(2 * n, n_cap)


def analytic_receive_amplitude(config: SystemConfig, channel_kind: ChannelKind | str,
                               k: int | None) -> float:
    """Closed-form counterpart of :func:`mc_receive_amplitude`."""
    kind = ChannelKind(channel_kind)
    return receive_amplitude(build_link_budget(config, kind), config, kind,
                             QuantizationModel.from_bits(k))
