"""Coupled swarm dynamics: second-order particle optimization, its
first-order consensus limit, and the experiments that measure the gap
between them under shared noise."""

from .consensus import consensus_point, laplace_value
from .dynamics import (
    MemoryParams,
    NonFiniteStateError,
    Params,
    RunRecord,
    SwarmState,
    cbo_memory_step,
    cbo_step,
    initial_state,
    pso_memory_step,
    pso_step,
    run,
)
from .experiments import (
    CompareTable,
    LimitStudyConfig,
    StudyResult,
    compare_distributions,
    laplace_sweep,
    optimize,
    zero_inertia_study,
)
from .metrics import (
    default_bins,
    empirical_moments,
    kl_histogram,
    paired_msq_gap,
    wasserstein2_1d,
)
from .noise import NoiseTape, initial_positions
from .objectives import (
    Objective,
    ackley,
    c_alpha,
    estimate_weighted_lipschitz,
    make_objective,
    rastrigin,
    sphere,
)

__version__ = "0.1.0"

__all__ = [
    "CompareTable",
    "LimitStudyConfig",
    "MemoryParams",
    "NoiseTape",
    "NonFiniteStateError",
    "Objective",
    "Params",
    "RunRecord",
    "StudyResult",
    "SwarmState",
    "ackley",
    "c_alpha",
    "cbo_memory_step",
    "cbo_step",
    "compare_distributions",
    "consensus_point",
    "default_bins",
    "empirical_moments",
    "estimate_weighted_lipschitz",
    "initial_positions",
    "initial_state",
    "kl_histogram",
    "laplace_sweep",
    "laplace_value",
    "make_objective",
    "optimize",
    "paired_msq_gap",
    "pso_memory_step",
    "pso_step",
    "rastrigin",
    "run",
    "sphere",
    "wasserstein2_1d",
    "zero_inertia_study",
]
