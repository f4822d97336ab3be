"""Closed-form SNR, SNR loss, achievable rate and BER under phase quantization.

Three quantization models share every formula and differ only in the
coherent-gain factor multiplying the reflected path:

* ``NoLoss``       continuous phases, factor 1
* ``ExactLoss(k)`` uniform error on ``[-pi/2^k, pi/2^k]``, factor ``sinc(pi/2^k)``
* ``ApproxLoss(k)`` second-order Taylor factor ``1 - (pi/2^k)^2 / 6``
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .config import ChannelKind, LinkBudget, SystemConfig, build_link_budget, linear_to_db


class LossKind(str, enum.Enum):
    NONE = "NoLoss"
    EXACT = "ExactLoss"
    APPROX = "ApproxLoss"


@dataclass(frozen=True)
class QuantizationModel:
    kind: LossKind
    k: int | None = None

    def __post_init__(self) -> None:
        kind = LossKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is LossKind.NONE:
            if self.k is not None:
                raise ValueError("NoLoss takes no bit count")
        elif self.k is None or self.k < 1:
            raise ValueError(f"{kind.value} needs k >= 1, got {self.k}")

    @classmethod
    def no_loss(cls) -> QuantizationModel:
        return cls(LossKind.NONE)

    @classmethod
    def exact(cls, k: int) -> QuantizationModel:
        return cls(LossKind.EXACT, k)

    @classmethod
    def approx(cls, k: int) -> QuantizationModel:
        return cls(LossKind.APPROX, k)

    @classmethod
    def from_bits(cls, k: int | None) -> QuantizationModel:
        """``None`` (infinite resolution) maps to NoLoss, anything else to ExactLoss."""
        return cls.no_loss() if k is None else cls.exact(k)

    @property
    def label(self) -> str:
        return self.kind.value

    def __str__(self) -> str:
        return self.label if self.k is None else f"{self.label}({self.k})"


NO_LOSS = QuantizationModel.no_loss()


def gain_factor(model: QuantizationModel) -> float:
    if model.kind is LossKind.NONE:
        return 1.0
    x = math.pi / (1 << model.k)
    if model.kind is LossKind.EXACT:
        return math.sin(x) / x
    return 1.0 - x * x / 6.0


def q_function(z):
    """Gaussian upper-tail probability ``Q(z) = P(N(0,1) > z)``.

    Accepts scalars or arrays. Uses the complementary error function, which
    keeps full relative accuracy deep into the upper tail.
    """
    out = 0.5 * special.erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def ber_general(snr_per_bit, beta: float = 1.0, mu: float = 2.0):
    """Nearest-neighbour BER approximation ``beta * Q(sqrt(mu * z))``."""
    if beta <= 0 or mu <= 0:
        raise ValueError("beta and mu must be positive")
    z = np.asarray(snr_per_bit, dtype=float)
    if np.any(z < 0):
        raise ValueError("SNR per bit must be non-negative")
    return beta * q_function(np.sqrt(mu * z))


def ber(snr_linear):
    """QPSK bit error rate ``Q(sqrt(2 * snr))``."""
    return ber_general(snr_linear, 1.0, 2.0)


def receive_amplitude_los(budget: LinkBudget, config: SystemConfig,
                          model: QuantizationModel) -> float:
    p_a = config.transmit_power_linear
    reflected = math.sqrt(budget.g_aib * p_a) * config.M * gain_factor(model)
    # direct channel is the unit-gain LoS scalar h_ab = 1
    return reflected + math.sqrt(budget.g_ab * p_a)


def receive_amplitude_rayleigh(budget: LinkBudget, config: SystemConfig,
                               model: QuantizationModel) -> float:
    p_a = config.transmit_power_linear
    # E|h_ai| * E|h_ib| = (pi/2) alpha_ai alpha_ib for independent Rayleigh magnitudes
    cascade_mean = 0.5 * math.pi * config.alpha_ai * config.alpha_ib
    reflected = math.sqrt(budget.g_aib * p_a) * config.M * gain_factor(model) * cascade_mean
    direct = math.sqrt(budget.g_ab * p_a * math.pi / 2.0) * config.alpha_ab
    return reflected + direct


def receive_amplitude(budget: LinkBudget, config: SystemConfig,
                      channel_kind: ChannelKind | str, model: QuantizationModel) -> float:
    if ChannelKind(channel_kind) is ChannelKind.LOS:
        return receive_amplitude_los(budget, config, model)
    return receive_amplitude_rayleigh(budget, config, model)


def snr(amplitude, noise_power: float):
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    return amplitude * amplitude / noise_power


class SnrLoss(NamedTuple):
    linear: float
    db: float


def snr_loss(budget: LinkBudget, config: SystemConfig, channel_kind: ChannelKind | str,
             model: QuantizationModel) -> SnrLoss:
    """SNR without quantization loss divided by the SNR under ``model``."""
    sigma2 = config.noise_power_linear
    reference = snr(receive_amplitude(budget, config, channel_kind, NO_LOSS), sigma2)
    degraded = snr(receive_amplitude(budget, config, channel_kind, model), sigma2)
    ratio = reference / degraded
    return SnrLoss(ratio, linear_to_db(ratio))


def achievable_rate(snr_linear):
    """Shannon rate ``log2(1 + snr)`` in bits/s/Hz."""
    x = np.asarray(snr_linear, dtype=float)
    if np.any(x < 0):
        raise ValueError("SNR must be non-negative")
    out = np.log1p(x) / math.log(2.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MetricReport:
    channel: ChannelKind
    model: QuantizationModel
    snr_linear: float
    snr_db: float
    rate: float
    ber: float
    loss_vs_noloss_db: float


def metric_report(config: SystemConfig, channel_kind: ChannelKind | str,
                  model: QuantizationModel | None = None, *,
                  noise_power: float | None = None) -> MetricReport:
    """All link metrics for one configuration.

    ``model`` defaults to ``QuantizationModel.from_bits(config.k)``;
    ``noise_power`` (linear) overrides ``config.noise_power``.
    """
    kind = ChannelKind(channel_kind)
    model = QuantizationModel.from_bits(config.k) if model is None else model
    budget = build_link_budget(config, kind)
    sigma2 = config.noise_power_linear if noise_power is None else noise_power
    value = snr(receive_amplitude(budget, config, kind, model), sigma2)
    reference = snr(receive_amplitude(budget, config, kind, NO_LOSS), sigma2)
    return MetricReport(
        channel=kind,
        model=model,
        snr_linear=value,
        snr_db=linear_to_db(value) if value > 0 else -math.inf,
        rate=achievable_rate(value),
        ber=ber(value),
        loss_vs_noloss_db=linear_to_db(reference / value),
    )
