"""Wake-up timing analysis for content-based data collection.

The heavy lifting lives in the compiled extension; this package simply
re-exports it.
"""

from ._core import (
    AccuracyResult,
    CampaignSummary,
    CsmaParams,
    EnergyModel,
    Method,
    MismatchPoint,
    RangeQuery,
    RangeSurvival,
    RoundResult,
    ScenarioConfig,
    Scheme,
    StationaryDistribution,
    SuccessDistribution,
    TransitionMatrix,
    ZetaOptimum,
    ZetaSweepPoint,
    gamma_cowu,
    gamma_cowu_upper_bound,
    gamma_round_robin,
    matrix_power,
    mismatch_curve,
    optimize_zeta,
    range_survival_probs,
    run_campaign,
    simulate_cowu_round,
    simulate_round_robin_round,
    simulated_result,
    stationary,
    success_distribution,
    wake_count_distribution,
    wake_probability,
    zeta_accuracy_sweep,
)

__all__ = [
    "AccuracyResult",
    "CampaignSummary",
    "CsmaParams",
    "EnergyModel",
    "Method",
    "MismatchPoint",
    "RangeQuery",
    "RangeSurvival",
    "RoundResult",
    "ScenarioConfig",
    "Scheme",
    "StationaryDistribution",
    "SuccessDistribution",
    "TransitionMatrix",
    "ZetaOptimum",
    "ZetaSweepPoint",
    "gamma_cowu",
    "gamma_cowu_upper_bound",
    "gamma_round_robin",
    "matrix_power",
    "mismatch_curve",
    "optimize_zeta",
    "range_survival_probs",
    "run_campaign",
    "simulate_cowu_round",
    "simulate_round_robin_round",
    "simulated_result",
    "stationary",
    "success_distribution",
    "wake_count_distribution",
    "wake_probability",
    "zeta_accuracy_sweep",
]

__version__ = "0.1.0"
