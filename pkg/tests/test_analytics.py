import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsquant.analytics import (
    NO_LOSS,
    QuantizationModel,
    achievable_rate,
    ber,
    ber_general,
    gain_factor,
    metric_report,
    q_function,
    receive_amplitude_los,
    receive_amplitude_rayleigh,
    snr,
    snr_loss,
)
from irsquant.config import ChannelKind, build_link_budget, noise_power_for_target_snr

# Frozen with mpmath at 40 digits.
SINC_PI_2 = 0.63661977236758134      # 2/pi
APPROX_K2 = 0.89719162082198585      # 1 - pi^2/96
Q_1 = 0.15865525393145705            # quadrature of the Gaussian tail
Q_SQRT_2_M5DB = 0.21322801835762035  # Q(sqrt(2 * 10^-0.5))
SQRT_2_M5DB = 0.79527072876705067
LOSS_K3_LINEAR = 1.0530292875455149  # 1 / sinc(pi/8)^2
LOSS_K3_DB = 0.22440450238215409
LOSS_K1_LINEAR = 2.4674011002723397  # (pi/2)^2
LOSS_K1_DB = 3.9223975406030532
RATE_15DB = 5.0278076733505191       # log2(1 + 10^1.5)
AMP_LOS_M128 = 3.6852006266339043e-4  # sqrt(g_ai g_ib) * 128 + sqrt(g_ab), P_a = 1 W
RAYLEIGH_CASCADE_05 = 0.39269908169872415  # (pi/2) * 0.25
RAYLEIGH_MEAN_05 = 0.62665706865775013


def q_quadrature(z):
    mpmath.mp.dps = 30
    tail = mpmath.quad(lambda x: mpmath.exp(-x * x / 2), [z, mpmath.inf])
    return float(tail / mpmath.sqrt(2 * mpmath.pi))


def test_model_constructors():
    assert str(QuantizationModel.exact(3)) == "ExactLoss(3)"
    assert QuantizationModel.from_bits(None) == NO_LOSS
    assert QuantizationModel.from_bits(4) == QuantizationModel.exact(4)
    with pytest.raises(ValueError):
        QuantizationModel.approx(0)
    with pytest.raises(ValueError):
        QuantizationModel("NoLoss", 3)


def test_gain_factor_examples():
    assert gain_factor(NO_LOSS) == 1.0
    assert gain_factor(QuantizationModel.exact(1)) == pytest.approx(SINC_PI_2, abs=1e-15)
    assert gain_factor(QuantizationModel.approx(2)) == pytest.approx(APPROX_K2, abs=1e-15)


def test_gain_factor_monotone_and_taylor_gap():
    exact = [gain_factor(QuantizationModel.exact(k)) for k in range(1, 13)]
    assert all(0 < g < 1 for g in exact)
    assert all(a < b for a, b in zip(exact, exact[1:]))
    # beyond k = 8 the bound's margin (x^6/5040) drops under float rounding
    for k in range(1, 9):
        x = math.pi / 2**k
        gap = exact[k - 1] - gain_factor(QuantizationModel.approx(k))
        assert 0 <= gap <= x**4 / 120


def test_q_function_examples():
    assert q_function(0.0) == 0.5
    assert q_function(-1.7) == pytest.approx(1 - q_function(1.7), abs=1e-15)
    assert q_function(1.0) == pytest.approx(Q_1, abs=1e-12)


def test_q_function_against_quadrature():
    for z in np.linspace(-8, 8, 33):
        assert abs(q_function(z) - q_quadrature(z)) <= 1e-10


def test_q_function_vectorized():
    z = np.array([-1.0, 0.0, 2.5])
    np.testing.assert_allclose(q_function(z), [q_function(v) for v in z], rtol=1e-15)


def test_ber_general_examples():
    assert ber_general(0.0, 1, 2) == 0.5
    assert ber_general(1e6, 1, 2) == pytest.approx(0.0, abs=1e-300)
    assert ber_general(10**-0.5, 1, 2) == pytest.approx(Q_SQRT_2_M5DB, abs=1e-12)
    assert q_function(SQRT_2_M5DB) == pytest.approx(Q_SQRT_2_M5DB, abs=1e-12)
    assert ber_general(1.0, 2.0, 1.0) == pytest.approx(2 * q_function(1.0))
    with pytest.raises(ValueError):
        ber_general(1.0, 0.0, 2.0)


def test_ber_qpsk_examples():
    assert ber(0.0) == 0.5
    assert ber(1e4) < 1e-300
    assert ber(10**-0.5) == pytest.approx(Q_SQRT_2_M5DB, abs=1e-12)


def test_los_amplitude(config, no_direct):
    budget = build_link_budget(config, ChannelKind.LOS)
    p = config.transmit_power_linear
    amp = receive_amplitude_los(budget, config, NO_LOSS)
    assert amp == pytest.approx(math.sqrt(budget.g_aib * p) * 128 + math.sqrt(budget.g_ab * p))
    assert amp == pytest.approx(AMP_LOS_M128 * math.sqrt(p), rel=1e-12)

    nd_budget = build_link_budget(no_direct, ChannelKind.LOS)
    for k in (1, 3, 6):
        model = QuantizationModel.exact(k)
        ratio = (receive_amplitude_los(nd_budget, no_direct, model)
                 / receive_amplitude_los(nd_budget, no_direct, NO_LOSS))
        assert ratio == pytest.approx(gain_factor(model), rel=1e-14)


def test_rayleigh_amplitude(config, no_direct):
    budget = build_link_budget(no_direct, ChannelKind.RAYLEIGH)
    p = no_direct.transmit_power_linear
    amp = receive_amplitude_rayleigh(budget, no_direct, NO_LOSS)
    assert amp == pytest.approx(math.sqrt(budget.g_aib * p) * 128 * RAYLEIGH_CASCADE_05,
                                rel=1e-14)
    amp1 = receive_amplitude_rayleigh(budget, no_direct, QuantizationModel.exact(1))
    assert amp1 / amp == pytest.approx(SINC_PI_2, rel=1e-14)

    full = build_link_budget(config, ChannelKind.RAYLEIGH)
    reflect = math.sqrt(full.g_aib * p) * 128 * RAYLEIGH_CASCADE_05
    direct = receive_amplitude_rayleigh(full, config, NO_LOSS) - reflect
    assert direct == pytest.approx(math.sqrt(full.g_ab * p) * RAYLEIGH_MEAN_05, rel=1e-9)


def test_snr_examples():
    assert snr(1.0, 1.0) == 1.0
    assert snr(2.0, 1.0) == 4.0
    amp = 2.5e-4
    assert snr(amp, noise_power_for_target_snr(15.0, amp)) == pytest.approx(10**1.5, rel=1e-12)
    with pytest.raises(ValueError):
        snr(1.0, 0.0)


@pytest.mark.parametrize("kind", list(ChannelKind))
def test_snr_loss_without_direct_path(no_direct, kind):
    budget = build_link_budget(no_direct, kind)
    for M in (1, 8, 1024):
        cfg = no_direct.replace(M=M)
        loss3 = snr_loss(budget, cfg, kind, QuantizationModel.exact(3))
        assert loss3.linear == pytest.approx(LOSS_K3_LINEAR, rel=1e-13)
        assert loss3.db == pytest.approx(LOSS_K3_DB, abs=1e-12)
        loss1 = snr_loss(budget, cfg, kind, QuantizationModel.exact(1))
        assert loss1.linear == pytest.approx(LOSS_K1_LINEAR, rel=1e-13)
        assert loss1.db == pytest.approx(LOSS_K1_DB, abs=1e-12)


def test_snr_loss_vanishes_for_fine_quantizers(config):
    budget = build_link_budget(config, ChannelKind.LOS)
    loss = snr_loss(budget, config, ChannelKind.LOS, QuantizationModel.exact(30))
    assert gain_factor(QuantizationModel.exact(30)) >= 1 - 1e-12
    assert abs(loss.db) <= 1e-9


@pytest.mark.parametrize("kind", list(ChannelKind))
def test_snr_loss_approaches_factor_limit_for_large_M(config, kind):
    model = QuantizationModel.exact(2)
    budget = build_link_budget(config, kind)
    limit = -20 * math.log10(gain_factor(model))
    losses = [snr_loss(budget, config.replace(M=M), kind, model).db
              for M in (1, 8, 64, 1024, 2**14, 2**20)]
    assert all(a <= b for a, b in zip(losses, losses[1:]))
    assert losses[-1] < limit
    assert limit - losses[-1] < 1e-3


def test_achievable_rate_examples():
    assert achievable_rate(0.0) == 0.0
    assert achievable_rate(1.0) == 1.0
    assert achievable_rate(10**1.5) == pytest.approx(RATE_15DB, abs=1e-12)


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_rate_increasing_ber_decreasing(a, b):
    lo, hi = sorted((a, b))
    if hi - lo <= 1e-9 * max(hi, 1.0):
        return
    assert achievable_rate(hi) > achievable_rate(lo)
    if ber(lo) > 1e-300:
        assert ber(hi) < ber(lo)


@settings(max_examples=200)
@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_rate_concave(a, b):
    mid = achievable_rate((a + b) / 2)
    assert mid >= (achievable_rate(a) + achievable_rate(b)) / 2 - 1e-12


def test_metric_report(config):
    noloss = metric_report(config, ChannelKind.LOS, NO_LOSS)
    assert noloss.loss_vs_noloss_db == 0.0
    assert noloss.rate == achievable_rate(noloss.snr_linear)
    assert noloss.ber == ber(noloss.snr_linear)
    assert noloss.snr_db == pytest.approx(10 * math.log10(noloss.snr_linear))

    exact3 = metric_report(config, ChannelKind.LOS, QuantizationModel.exact(3))
    assert 0 < exact3.loss_vs_noloss_db <= 0.23
    assert exact3.ber >= noloss.ber and exact3.rate <= noloss.rate

    # model defaults to the config's bit count
    assert metric_report(config, "rayleigh") == metric_report(config, "rayleigh",
                                                              QuantizationModel.exact(3))
    assert metric_report(config.replace(k=None), "los").loss_vs_noloss_db == 0.0
