"""Command-line sweeps behind the SNR-loss, rate and BER curves, plus a verify mode.

Usage::

    irsquant sweep-snr-loss [--channel los|rayleigh|both] [--k 1 2 3] [--m 8 64]
    irsquant sweep-rate --target-snr-db 15
    irsquant sweep-ber --target-snr-db -5 --trials 1000000
    irsquant verify

Every subcommand writes CSV (header row, 10 significant digits) preceded by
``#`` comment lines carrying the seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import analytics as an
from .analytics import QuantizationModel
from .config import (
    ChannelKind,
    SystemConfig,
    build_link_budget,
    db_to_linear,
    load_config,
    noise_power_for_target_snr,
    parse_overrides,
)
from .montecarlo import mc_ber_qpsk, mc_gain_los, mc_w_g_rayleigh, resolve_adaptively

DEFAULT_SEED = 20220601
DEFAULT_TRIALS = 10**6
VERIFY_SNRS_DB = (-5.0, 0.0, 5.0)


class UsageError(ValueError):
    """Invalid sweep request; the CLI exits with status 2."""


@dataclass(frozen=True)
class SweepSpec:
    channels: tuple[ChannelKind, ...] = (ChannelKind.LOS, ChannelKind.RAYLEIGH)
    k_values: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    m_values: tuple[int, ...] = (8, 64, 1024)
    target_snr_db: float | None = None
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    workers: int = 1
    config: SystemConfig = field(default_factory=SystemConfig)

    def __post_init__(self) -> None:
        if not self.channels:
            raise UsageError("at least one channel kind is required")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise UsageError("k values must be a non-empty list of integers >= 1")
        if not self.m_values or any(m < 1 for m in self.m_values):
            raise UsageError("M values must be a non-empty list of integers >= 1")
        if self.trials < 1:
            raise UsageError("trials must be >= 1")


def _row_seed(seed: int, *keys: int) -> int:
    """Stateless per-row seed, independent of evaluation order."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, np.uint64)[0])


def _variants(k: int, include_noloss: bool) -> list[QuantizationModel]:
    models = [QuantizationModel.exact(k), QuantizationModel.approx(k)]
    return ([an.NO_LOSS] + models) if include_noloss else models


def _calibrated(spec: SweepSpec, kind: ChannelKind, M: int):
    cfg = spec.config.replace(M=M)
    budget = build_link_budget(cfg, kind)
    if spec.target_snr_db is None:
        raise UsageError("this sweep needs --target-snr-db")
    reference = an.receive_amplitude(budget, cfg, kind, an.NO_LOSS)
    sigma2 = noise_power_for_target_snr(spec.target_snr_db, reference)
    return cfg, budget, sigma2


def run_sweep_snr_loss(spec: SweepSpec) -> list[dict]:
    rows = []
    for kind in spec.channels:
        for M in spec.m_values:
            cfg = spec.config.replace(M=M)
            budget = build_link_budget(cfg, kind)
            for k in spec.k_values:
                for model in _variants(k, include_noloss=False):
                    loss = an.snr_loss(budget, cfg, kind, model)
                    rows.append({"channel": kind.value, "M": M, "k": k,
                                 "variant": model.label, "snr_loss_db": loss.db})
    return rows


def run_sweep_rate(spec: SweepSpec) -> list[dict]:
    rows = []
    for kind in spec.channels:
        for M in spec.m_values:
            cfg, budget, sigma2 = _calibrated(spec, kind, M)
            for k in spec.k_values:
                for model in _variants(k, include_noloss=True):
                    amp = an.receive_amplitude(budget, cfg, kind, model)
                    rows.append({"channel": kind.value, "M": M, "k": k,
                                 "variant": model.label,
                                 "rate_bits": an.achievable_rate(an.snr(amp, sigma2))})
    return rows


def run_sweep_ber(spec: SweepSpec) -> list[dict]:
    """Closed-form BER next to a simulated QPSK link at the same SNR."""
    rows = []
    for ci, kind in enumerate(ChannelKind):
        if kind not in spec.channels:
            continue
        for M in spec.m_values:
            cfg, budget, sigma2 = _calibrated(spec, kind, M)
            for k in spec.k_values:
                for vi, model in enumerate(_variants(k, include_noloss=True)):
                    amp = an.receive_amplitude(budget, cfg, kind, model)
                    sim = mc_ber_qpsk(amp, sigma2, spec.trials, _row_seed(spec.seed, ci, M, k, vi),
                                      workers=spec.workers)
                    rows.append({"channel": kind.value, "M": M, "k": k,
                                 "variant": model.label,
                                 "ber_analytic": an.ber(an.snr(amp, sigma2)),
                                 "ber_mc": sim.mean, "ber_mc_stderr": sim.std_error})
    return rows


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    observed: float
    std_error: float
    z_score: float

    @property
    def passed(self) -> bool:
        return self.z_score <= 3.0


def run_verify(spec: SweepSpec, *, gain_bias: float = 1.0) -> list[Check]:
    """Compare every Monte Carlo estimator with its closed form at 3 sigma.

    ``gain_bias`` scales the expected coherent-gain factor; it exists so the
    sensitivity of the checks can be exercised.
    """
    cfg = spec.config
    checks = []
    cap = max(spec.trials, 10**7)
    cascade_mean = 0.5 * math.pi * cfg.alpha_ai * cfg.alpha_ib
    for k in spec.k_values:
        factor = an.gain_factor(QuantizationModel.exact(k)) * gain_bias
        seed = _row_seed(spec.seed, 1, k)
        gain = resolve_adaptively(
            lambda n: mc_gain_los(1, k, n, seed, workers=spec.workers),
            factor, spec.trials, cap)
        checks.append(Check(f"gain_los_real[k={k}]", factor, gain.mean.real,
                            gain.std_error, gain.z_score(factor)))
        checks.append(Check(f"gain_los_imag[k={k}]", 0.0, gain.mean.imag,
                            gain.std_error_imag, gain.z_score_imag(0.0)))

        w_expected = factor * cascade_mean
        seed = _row_seed(spec.seed, 2, k)
        last = {}

        def estimate_w(n):
            last["wg"] = mc_w_g_rayleigh(1, k, cfg.alpha_ai, cfg.alpha_ib, n, seed,
                                         workers=spec.workers)
            return last["wg"][0]

        w = resolve_adaptively(estimate_w, w_expected, spec.trials, cap)
        g = last["wg"][1]
        checks.append(Check(f"rayleigh_W[k={k}]", w_expected, w.mean, w.std_error,
                            w.z_score(w_expected)))
        checks.append(Check(f"rayleigh_G[k={k}]", 0.0, g.mean, g.std_error, g.z_score(0.0)))

    snrs = VERIFY_SNRS_DB if spec.target_snr_db is None else (spec.target_snr_db,)
    for i, snr_db in enumerate(snrs):
        snr = db_to_linear(snr_db)
        expected = an.ber(snr)
        seed = _row_seed(spec.seed, 3, i)
        sim = resolve_adaptively(
            lambda n: mc_ber_qpsk(1.0, 1.0 / snr, n, seed, workers=spec.workers),
            expected, spec.trials, cap)
        checks.append(Check(f"ber_qpsk[snr_db={snr_db:g}]", expected, sim.mean,
                            sim.std_error, sim.z_score(expected)))
    return checks


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "PASS" if value else "FAIL"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.10g}"
    return str(value)


def write_csv(rows: Iterable[dict], columns: Sequence[str], stream, comments=()) -> None:
    for line in comments:
        stream.write(f"# {line}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])


COLUMNS = {
    "sweep-snr-loss": ("channel", "M", "k", "variant", "snr_loss_db"),
    "sweep-rate": ("channel", "M", "k", "variant", "rate_bits"),
    "sweep-ber": ("channel", "M", "k", "variant", "ber_analytic", "ber_mc", "ber_mc_stderr"),
    "verify": ("check", "expected", "observed", "std_error", "z_score", "status"),
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", choices=("los", "rayleigh", "both"), default="both")
    common.add_argument("--k", type=int, nargs="+", default=list(SweepSpec.k_values),
                        metavar="K", help="quantization bit counts (default 1..6)")
    common.add_argument("--m", type=int, nargs="+", default=list(SweepSpec.m_values),
                        metavar="M", help="IRS element counts (default 8 64 1024)")
    common.add_argument("--target-snr-db", type=float, default=None,
                        help="calibrate noise so the no-loss SNR equals this value")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS,
                        help="Monte Carlo samples or symbols per estimate")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=int, default=1,
                        help="threads for Monte Carlo blocks (output does not depend on it)")
    common.add_argument("--config", default=None, help="key=value scenario file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a single config field, repeatable")
    common.add_argument("--output", default="-", help="output path, '-' for stdout")

    parser = argparse.ArgumentParser(prog="irsquant", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep-snr-loss", parents=[common], help="SNR loss versus k")
    sub.add_parser("sweep-rate", parents=[common], help="achievable rate versus k")
    sub.add_parser("sweep-ber", parents=[common], help="QPSK BER versus k, closed form and simulated")
    verify = sub.add_parser("verify", parents=[common],
                            help="check Monte Carlo estimators against closed forms")
    verify.add_argument("--tamper-gain", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def _spec_from_args(args) -> SweepSpec:
    config = load_config(args.config) if args.config else SystemConfig()
    config = parse_overrides(args.set, config)
    channels = (tuple(ChannelKind) if args.channel == "both"
                else (ChannelKind(args.channel),))
    return SweepSpec(channels=channels, k_values=tuple(args.k), m_values=tuple(args.m),
                     target_snr_db=args.target_snr_db, trials=args.trials, seed=args.seed,
                     workers=args.workers, config=config)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _spec_from_args(args)
        if args.command in ("sweep-rate", "sweep-ber") and spec.target_snr_db is None:
            raise UsageError(f"{args.command} needs --target-snr-db")
        buf = io.StringIO()
        comments = [f"seed={spec.seed}", f"command={args.command}"]
        status = 0
        if args.command == "sweep-snr-loss":
            rows = run_sweep_snr_loss(spec)
        elif args.command == "sweep-rate":
            rows = run_sweep_rate(spec)
        elif args.command == "sweep-ber":
            rows = run_sweep_ber(spec)
        else:
            checks = run_verify(spec, gain_bias=args.tamper_gain)
            rows = [{"check": c.name, "expected": c.expected, "observed": c.observed,
                     "std_error": c.std_error, "z_score": c.z_score, "status": c.passed}
                    for c in checks]
            failed = sum(not c.passed for c in checks)
            status = 1 if failed else 0
        write_csv(rows, COLUMNS[args.command], buf, comments)
        if args.command == "verify":
            buf.write(f"# result={'FAIL' if status else 'PASS'} "
                      f"passed={len(rows) - failed}/{len(rows)}\n")
    except (UsageError, ValueError, OSError) as exc:
        parser.error(str(exc))

    if args.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return status


if __name__ == "__main__":
    sys.exit(main())
