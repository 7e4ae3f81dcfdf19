"""Joint ML synchronization-parameter estimation for hybrid multi-chain
receivers, with Fisher-information bounds and a Monte Carlo benchmark harness."""

from .crlb import (
    CrlbReport,
    FisherMatrix,
    RegularityReport,
    crlb_closed_alpha,
    crlb_closed_noise_var,
    crlb_gamma,
    crlb_numeric,
    crlb_closed_cfo_phase,
    crlb_snr,
    fim,
    regularity_check,
)
from .errors import (
    CholeskyFailure,
    ConfigError,
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidParams,
    LengthMismatch,
    MmwSyncError,
    SingularFim,
    ZeroTruth,
)
from .estimators import (
    EstimateReport,
    PeriodogramSearch,
    default_fft_size,
    estimate_all,
    estimate_amplitude,
    estimate_cfo,
    estimate_noise_var,
    estimate_phase,
    matched_filter,
    parabolic_interp,
    periodogram_objective,
)
from .montecarlo import McCell, McConfig, McReport, normalized_error, run_campaign
from .signal_model import (
    ChannelConfig,
    ChannelRealization,
    FrontEnd,
    ReceivedBlock,
    SyncParams,
    TrainingBlock,
    assemble_channel,
    effective_gains,
    gen_channel,
    gen_front_end,
    gen_training,
    model_block,
    steering_vector,
    synthesize,
    wrap_cfo,
    wrap_phase,
)

__version__ = "0.1.0"
