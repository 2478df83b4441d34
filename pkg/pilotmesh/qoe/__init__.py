from .catalog import DEFAULT_PREFERENCE, PARAMETER_NAMES, ParameterId
from .experiment import HarmonicStats, expected_score, random_harmonic_experiment
from .propositions import (
    SignClaim,
    check_half_top_dominance,
    expected_claim,
    find_counterexamples,
    prefix_length,
    proposition_prefixes,
    worst_case_bounds,
)
from .rating import DEFAULT_POLICY, Rating, RatingPolicy, rate_percentage
from .report import (
    SatisfactionParam,
    SatisfactionReport,
    harmonic_number,
    harmonic_weights,
    us_overall,
    us_overall_batch,
)

__all__ = (
    "DEFAULT_POLICY",
    "DEFAULT_PREFERENCE",
    "PARAMETER_NAMES",
    "HarmonicStats",
    "ParameterId",
    "Rating",
    "RatingPolicy",
    "SatisfactionParam",
    "SatisfactionReport",
    "SignClaim",
    "check_half_top_dominance",
    "expected_claim",
    "expected_score",
    "find_counterexamples",
    "harmonic_number",
    "harmonic_weights",
    "prefix_length",
    "proposition_prefixes",
    "random_harmonic_experiment",
    "rate_percentage",
    "us_overall",
    "us_overall_batch",
    "worst_case_bounds",
)
