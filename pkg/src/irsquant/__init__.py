"""Performance loss of IRS-aided links with k-bit discrete phase shifters."""

from .analytics import (
    NO_LOSS,
    LossKind,
    MetricReport,
    QuantizationModel,
    achievable_rate,
    ber,
    ber_general,
    gain_factor,
    metric_report,
    q_function,
    receive_amplitude,
    receive_amplitude_los,
    receive_amplitude_rayleigh,
    snr,
    snr_loss,
)
from .channels import los_direct_channel, sample_rayleigh_magnitudes, steering_vector
from .config import (
    ChannelKind,
    GeometryError,
    LinkBudget,
    SystemConfig,
    build_link_budget,
    derive_geometry,
    load_config,
    noise_power_for_target_snr,
    path_loss_db,
)
from .montecarlo import (
    EstimatorResult,
    TrialConfig,
    mc_ber_qpsk,
    mc_gain_los,
    mc_receive_amplitude,
    mc_w_g_rayleigh,
)
from .quantizer import (
    PhaseCodebook,
    QuantizedPhase,
    codebook,
    design_continuous_phases,
    quantize,
    sample_quantization_errors,
)

__version__ = "0.1.0"
