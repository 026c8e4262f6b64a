"""Structured multi-armed bandit laboratory."""

from .bounds import TheoremBounds, theorem_bounds
from .confidence import (
    ArmStatistics,
    CompetitiveSet,
    ConfidenceSet,
    build_confidence_set,
    competitive_arms,
    confidence_radius,
)
from .environment import EmpiricalPool, GaussianEnvironment, empirical_draw, gaussian_draw
from .model import (
    CompetitiveAnalysis,
    GapProfile,
    RewardModel,
    ThetaGrid,
    build_from_table,
    build_linear,
    competitive_analysis,
    gap_profile,
)
from .modelio import load_model, load_pool, model_from_dict, model_to_dict, save_model
from .policies import (
    ALGORITHM_IDS,
    InformativenessScores,
    PolicyParams,
    algorithm_c_step,
    informative_c_step,
    informativeness,
    klucb_index,
    select_with_base,
    ts_sample,
    ucb_index,
    ucb_s_step,
)
from .simulation import (
    AlgorithmSpec,
    ExperimentConfig,
    ExperimentResult,
    RunTrace,
    mix64,
    run_experiment,
    run_replication,
    write_csv_outputs,
)

__version__ = "0.1.0"
