"""Bayesian opponent modelling for small limit poker.

Thin Python surface over the C++ core: exact game engines for small limit
hold'em variants, posterior inference over sampled opponent strategies, best
responses to posterior mixtures, a certified near-equilibrium solver, and the
match/experiment harness.
"""

from ._core import (
    CALL,
    FOLD,
    RAISE,
    BehaviourStrategy,
    GameSpec,
    HandRecord,
    InfosetIndex,
    MatchLog,
    MatchRow,
    Observation,
    PosteriorEnsemble,
    ResponseResult,
    SolveResult,
    StrategyEnsemble,
    bayesian_best_response,
    best_response,
    expected_value,
    exploitability,
    load_strategy,
    make_observation,
    map_response,
    preset_config_json,
    run_experiment,
    run_match,
    sample_strategy,
    save_strategy,
    solve,
    thompson_response,
    uniform_strategy,
    validate_strategy,
    winning_rate,
)

__all__ = [
    "CALL",
    "FOLD",
    "RAISE",
    "BehaviourStrategy",
    "GameSpec",
    "HandRecord",
    "InfosetIndex",
    "MatchLog",
    "MatchRow",
    "Observation",
    "PosteriorEnsemble",
    "ResponseResult",
    "SolveResult",
    "StrategyEnsemble",
    "bayesian_best_response",
    "best_response",
    "expected_value",
    "exploitability",
    "load_strategy",
    "make_observation",
    "map_response",
    "preset_config_json",
    "run_experiment",
    "run_match",
    "sample_strategy",
    "save_strategy",
    "solve",
    "thompson_response",
    "uniform_strategy",
    "validate_strategy",
    "winning_rate",
]
