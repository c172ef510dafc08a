"""specrad: finite-sample spectral-radius estimation with certified
high-probability error bounds, plus a stabilizability test for networked
control over lossy channels from finite channel samples."""

from .channel import ChannelEstimate, bound_f5, estimate_channel, estimate_q
from .config import ExperimentConfig, Fig1Config, Fig2Config, SystemConfig, load_config
from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    InfeasibleError,
    PreconditionError,
    SingularDesignError,
    SpecradError,
)
from .harness import RunRecord, derive_stream, run_fig1, run_fig2
from .ident import (
    LsEstimate,
    RhoEstimateReport,
    bound_C,
    bound_f1,
    bound_f1_from_gram,
    bound_f3,
    estimate_rho,
    least_squares,
    rho_bound_data_dependent,
    rho_bound_data_independent,
    sample_complexity_rho,
)
from .matops import (
    eigenvalues,
    gramian_sigma,
    real_power,
    spectral_norm,
    spectral_radius,
    spectral_variation_bound,
    sym_eig_extremes,
)
from .simkit import (
    ChannelTrace,
    DataTuple,
    LtiSystem,
    RngSeed,
    Trajectory,
    last_tuples,
    pool_tuples,
    simulate_channel,
    simulate_ensemble,
    simulate_trajectory,
)
from .stabtest import (
    Outcome,
    StabVerdict,
    TheoremConditions,
    TrajectoryPlan,
    sample_complexity_n_for_test,
    sample_complexity_nq,
    stab_margin_rhs,
    stabilizability_test,
    theorem3_conditions,
)

__version__ = "0.1.0"
