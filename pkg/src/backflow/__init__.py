"""Collision-model simulator for distinguishability revivals and their
environmental precursors, for qubit chains and Gaussian bosonic chains."""

__version__ = "0.1.0"

from .config import CVBlock, ConfigError, DVBlock, ScenarioConfig, load_config
from .cv_model import (
    CVChainState,
    CVParams,
    GaussianState,
    bs_aa,
    bs_sa,
    cv_chain_init,
    cv_decorrelate,
    cv_marginal,
    cv_step,
    cv_system,
    thermal_squeezed_cov,
)
from .dv_model import (
    DVChainState,
    DVParams,
    dv_ancilla,
    dv_chain_init,
    dv_initial_system,
    dv_marginal,
    dv_step,
    dv_system,
    partial_swap,
)
from .linalg import NumericalFailure
from .metrics import (
    bures_distance,
    bures_from_fidelity,
    gaussian_bures,
    gaussian_fidelity,
    trace_distance,
    uhlmann_fidelity,
)
from .precursors import (
    BoundReport,
    TrajectoryPair,
    analyze,
    detect_revivals,
    hierarchy_sweep,
    info_decomposition,
    lhs_grid,
    rhs_terms,
    simulate_pair,
    steady_state_trace,
    system_distance_series,
)
