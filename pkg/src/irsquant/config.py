"""Scenario configuration, path-loss model, planar geometry and noise calibration.

All dB/dBm quantities are converted to linear units exactly once, when a
:class:`LinkBudget` is built. Everything downstream works in linear units.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path


class ChannelKind(str, enum.Enum):
    LOS = "los"
    RAYLEIGH = "rayleigh"


class GeometryError(ValueError):
    """Raised when node placement makes a link distance zero."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Parameters of the Alice -> IRS -> Bob scenario.

    Angles are in radians, distances in meters, powers in dBm. ``k=None``
    stands for continuous (unquantized) phase shifters. ``direct_link=False``
    removes the Alice -> Bob path (``g_ab = 0``).
    """

    M: int = 128
    k: int | None = 3
    element_spacing_over_wavelength: float = 0.5
    theta_ai: float = math.pi / 4
    theta_ib: float = math.pi / 3
    theta_ab: float = math.pi / 2
    d_ab: float = 100.0
    d_ai: float = 30.0
    transmit_power: float = 30.0
    noise_power: float = -80.0
    pl_ref_db: float = -30.0
    pl_ref_distance: float = 1.0
    gamma_ai: float = 2.0
    gamma_ib: float = 2.0
    gamma_ab: float = 2.0
    rayleigh_gamma_ai: float = 2.5
    rayleigh_gamma_ib: float = 2.5
    rayleigh_gamma_ab: float = 3.5
    alpha_ai: float = 0.5
    alpha_ib: float = 0.5
    alpha_ab: float = 0.5
    direct_link: bool = True

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1 or None, got {self.k}")
        if self.element_spacing_over_wavelength <= 0:
            raise ValueError("element spacing must be positive")
        for name in ("d_ab", "d_ai", "pl_ref_distance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("theta_ai", "theta_ib", "theta_ab"):
            if not 0.0 <= getattr(self, name) <= math.pi:
                raise ValueError(f"{name} must lie in [0, pi]")
        for name in (
            "gamma_ai", "gamma_ib", "gamma_ab",
            "rayleigh_gamma_ai", "rayleigh_gamma_ib", "rayleigh_gamma_ab",
            "alpha_ai", "alpha_ib", "alpha_ab",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def transmit_power_linear(self) -> float:
        """P_a in watts."""
        return dbm_to_watts(self.transmit_power)

    @property
    def noise_power_linear(self) -> float:
        """sigma^2 in watts."""
        return dbm_to_watts(self.noise_power)

    def exponents(self, kind: ChannelKind) -> tuple[float, float, float]:
        """Path-loss exponents (ai, ib, ab) for the given channel kind."""
        if ChannelKind(kind) is ChannelKind.LOS:
            return self.gamma_ai, self.gamma_ib, self.gamma_ab
        return self.rayleigh_gamma_ai, self.rayleigh_gamma_ib, self.rayleigh_gamma_ab

    def replace(self, **changes) -> SystemConfig:
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class LinkBudget:
    g_ai: float
    g_ib: float
    g_ab: float
    d_ib: float
    g_aib: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("g_ai", "g_ib"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {getattr(self, name)}")
        # g_ab == 0 encodes a blocked direct path
        if not 0.0 <= self.g_ab <= 1.0:
            raise ValueError(f"g_ab must lie in [0, 1], got {self.g_ab}")
        object.__setattr__(self, "g_aib", self.g_ai * self.g_ib)


def path_loss_db(distance: float, exponent: float, ref_db: float = -30.0,
                 ref_distance: float = 1.0) -> float:
    """Log-distance path loss ``PL0 - 10*gamma*log10(d/d0)`` in dB.

    The result is a (negative) gain in dB; ``db_to_linear`` gives the
    linear power gain.
    """
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance}")
    if ref_distance <= 0:
        raise ValueError(f"reference distance must be positive, got {ref_distance}")
    return ref_db - 10.0 * exponent * math.log10(distance / ref_distance)


def derive_geometry(d_ab: float, d_ai: float, theta_ab: float, theta_ai: float) -> float:
    """Distance IRS -> Bob for Alice at the origin and polar placement of the others.

    Bob sits at ``(d_ab, theta_ab)`` and the IRS at ``(d_ai, theta_ai)``.
    """
    if d_ab <= 0 or d_ai <= 0:
        raise ValueError("distances must be positive")
    bob = (d_ab * math.cos(theta_ab), d_ab * math.sin(theta_ab))
    irs = (d_ai * math.cos(theta_ai), d_ai * math.sin(theta_ai))
    d_ib = math.hypot(bob[0] - irs[0], bob[1] - irs[1])
    # relative tolerance: polar -> cartesian rounding leaves ~1e-14 residue
    if d_ib <= 1e-9 * max(d_ab, d_ai):
        raise GeometryError("IRS and Bob coincide; IRS -> Bob path loss is undefined")
    return d_ib


def build_link_budget(config: SystemConfig, channel_kind: ChannelKind | str) -> LinkBudget:
    gamma_ai, gamma_ib, gamma_ab = config.exponents(ChannelKind(channel_kind))
    d_ib = derive_geometry(config.d_ab, config.d_ai, config.theta_ab, config.theta_ai)

    def gain(distance: float, exponent: float) -> float:
        return db_to_linear(path_loss_db(distance, exponent, config.pl_ref_db,
                                         config.pl_ref_distance))

    g_ab = gain(config.d_ab, gamma_ab) if config.direct_link else 0.0
    return LinkBudget(
        g_ai=gain(config.d_ai, gamma_ai),
        g_ib=gain(d_ib, gamma_ib),
        g_ab=g_ab,
        d_ib=d_ib,
    )


def noise_power_for_target_snr(target_snr_db: float, noiseless_amplitude: float) -> float:
    """Noise power that puts ``amplitude**2 / sigma2`` at the target SNR."""
    if noiseless_amplitude <= 0:
        raise ValueError("noiseless amplitude must be positive")
    return noiseless_amplitude ** 2 / db_to_linear(target_snr_db)


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}
_INFINITE = {"inf", "infinite", "infinity", "none"}


def _coerce(name: str, raw: str):
    kind = SystemConfig.__dataclass_fields__[name].type
    raw = raw.strip()
    if name == "k":
        return None if raw.lower() in _INFINITE else int(raw)
    if kind == "int":
        return int(raw)
    if kind == "bool":
        if raw.lower() in _TRUE:
            return True
        if raw.lower() in _FALSE:
            return False
        raise ValueError(f"{name}: expected a boolean, got {raw!r}")
    return float(raw)


def parse_overrides(pairs, base: SystemConfig | None = None) -> SystemConfig:
    """Apply ``key=value`` strings on top of ``base`` (defaults if omitted)."""
    fields = SystemConfig.__dataclass_fields__
    changes = {}
    for lineno, line in enumerate(pairs, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        try:
            changes[key] = _coerce(key, value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    return dataclasses.replace(base or SystemConfig(), **changes)


def load_config(path: str | Path, base: SystemConfig | None = None) -> SystemConfig:
    """Read a flat ``key=value`` config file; ``#`` starts a comment."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_overrides(text.splitlines(), base)
