"""Remote state estimation over packet-dropping links under an active
eavesdropping attack: decoy-noise encoding, quickest change detection of the
attack, and the closed-form steady-state analysis that drives the encoding
design.
"""

from .analysis import (
    MuDesign,
    SteadyStateReport,
    conditional_cov_eaves,
    conditional_cov_user,
    eaves_stationary,
    expected_cov_eaves,
    expected_cov_user,
    j_eaves,
    j_user,
    mu_op,
    noise_cov,
    open_loop_cov,
    steady_state_report,
    user_stationary,
)
from .channel import ChannelModel, ChannelOutcome, sample_attack_time, sample_outcome
from .coder import EncodingPolicy, EstimatorState, Packet, eaves_update, encode, user_update
from .detector import (
    CalibrationResult,
    DetectorConfig,
    ShiryaevState,
    bayes_risk,
    calibrate_threshold,
    check_stop,
    moving_average,
    update_posterior,
)
from .harness import (
    EpisodeTrace,
    MonteCarloReport,
    MuSweepReport,
    Scenario,
    ScenarioError,
    export_csv,
    load_csv,
    mu_sweep,
    run_episode,
    run_monte_carlo,
    scenario_from_config,
)
from .kernels import BACKEND
from .linalg import (
    ConvergenceError,
    DimensionError,
    StabilityError,
    solve_dare,
    solve_lyapunov,
    spectral_radius,
)
from .plant import EpisodeStreams, PlantState, SystemModel, sample_noise_packet, step_plant

__version__ = "0.1.0"
