"""Bayesian belief updating when signal noise depends on actions and states."""

from .bandit import BanditEnv, bandit_output, run_bandit_episode, tracking_update, tracking_variance
from .conjugate import update_constant, update_count, update_mass
from .core import (
    INFINITE_VARIANCE,
    Constant,
    GaussianBelief,
    InverseCount,
    InverseMass,
    StateFunction,
    TrackingError,
    VarianceFunction,
    aggregate_signals,
    noise_variance,
    sample_signal,
)
from .errors import (
    DegeneratePosterior,
    DomainError,
    EmptyInput,
    NegativeVariance,
    NoInformation,
    ParseError,
    ValidationError,
    VarsigError,
    ZeroEvidence,
)
from .population import (
    ForecastRecord,
    PopulationState,
    TrapConfig,
    forecast_error_variance,
    participation_mass,
    simulate_trap,
    trap_dispersion,
    trap_step,
)
from .posterior import (
    GridSpec,
    PosteriorGrid,
    figure1_curves,
    posterior_curves,
    grid_posterior,
    log_unnormalized_posterior,
    mh_sample,
    posterior_moments,
)
from .regimes import DiscreteBelief, RegimeModel, regime_filter_run, regime_predict, regime_update
from .seeds import derive_replica_seed

__version__ = "0.1.0"
