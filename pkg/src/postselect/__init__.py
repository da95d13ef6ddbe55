"""Optimal decisions, measurements and risk for binary quantum state
discrimination when rejecting ("don't know") carries an explicit cost."""

from .decision import (
    REJECT,
    DecisionRule,
    LikelihoodTable,
    LossMatrix,
    Posterior,
    Prior,
    bayes_risk_array,
    conditional_risk,
    conditional_risks,
    optimal_decision,
    optimal_rule,
    posterior,
    total_risk,
)
from .errors import DimensionError, DomainError, UnreachableError, ZeroEvidenceError
from .qubit import (
    BornTable,
    Povm,
    StatePair,
    born_probabilities,
    build_povm,
    helstrom_povm,
    usd_povm,
)
from .risk import (
    DecisionRegionMap,
    analytic_risk,
    brute_force_risk,
    decision_region_map,
    generalized_risk,
    grid_search_generalized_angle,
    grid_search_optimal_angle,
    helstrom_threshold,
    optimal_angle,
)
from .simulate import GameConfig, SimulationReport, simulate_game, validate_risk_surface
from .tradeoff import (
    OutcomeProbabilities,
    TradeoffCurve,
    chow_identity_risk,
    error_from_reject_integral,
    lambda_from_reject_probability,
    outcome_probabilities,
    risk_from_reject_integral,
    tradeoff_curve,
)

__version__ = "0.1.0"
