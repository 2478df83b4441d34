"""
Sign guarantees of the harmonic-weighted score.

If the top half of the ranked parameters is rated high enough, no
rating of the remaining parameters can flip the sign of the overall
score. ``check_half_top_dominance`` derives the claim from the
worst-case completion; ``find_counterexamples`` enumerates every
completion to verify the asserted sign.
"""

from __future__ import annotations

import itertools
import math
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from pilotmesh.exceptions import PilotMeshValidationError

from .report import RATING_VALUES

if TYPE_CHECKING:
    from collections.abc import Sequence

MAX_EXHAUSTIVE_K = 10
LEVELS = (-2, -1, 0, 1, 2)


class SignClaim(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NON_NEGATIVE = "non_negative"
    NON_POSITIVE = "non_positive"
    NONE = "none"

    def holds(self, value: float | Fraction | int) -> bool:
        match self:
            case SignClaim.POSITIVE:
                return value > 0
            case SignClaim.NEGATIVE:
                return value < 0
            case SignClaim.NON_NEGATIVE:
                return value >= 0
            case SignClaim.NON_POSITIVE:
                return value <= 0
            case _:
                return True


def prefix_length(k: int, proposition: int) -> int:
    """Fixed prefix: max(1, ⌊k/2⌋) top ratings of ±2, or ⌈k/2⌉ ratings of the same sign."""
    if proposition == 1:
        return max(1, k // 2)
    if proposition == 2:
        return math.ceil(k / 2)
    msg = f"Unknown proposition {proposition}, expected 1 or 2"
    raise PilotMeshValidationError(msg)


def _check_prefix_shape(k: int, prefix: Sequence[int], proposition: int) -> None:
    expected = prefix_length(k, proposition)
    if len(prefix) != expected:
        msg = f"Proposition {proposition} fixes {expected} ratings for k={k}, got {len(prefix)}"
        raise PilotMeshValidationError(msg)
    allowed = ({2}, {-2}) if proposition == 1 else ({1, 2}, {-1, -2})
    if not any(set(prefix) <= group for group in allowed):
        msg = f"Prefix {tuple(prefix)} does not match proposition {proposition}"
        raise PilotMeshValidationError(msg)


def worst_case_bounds(k: int, prefix: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Exact smallest and largest weighted sum over all completions of ``prefix``."""
    fixed = sum((Fraction(r, i) for i, r in enumerate(prefix, start=1)), Fraction(0))
    tail = sum((Fraction(1, i) for i in range(len(prefix) + 1, k + 1)), Fraction(0))
    return fixed - 2 * tail, fixed + 2 * tail


def check_half_top_dominance(k: int, prefix: Sequence[int], proposition: int | None = None) -> SignClaim:
    """
    Sign the overall score must take for every completion of ``prefix``.

    A strictly positive (negative) worst case gives a strict claim, a worst
    case of exactly zero a weak one, anything else no claim. When
    ``proposition`` is given the prefix must have that proposition's
    length and rating set.
    """
    if k < 1 or len(prefix) > k:
        msg = f"Prefix of length {len(prefix)} does not fit k={k}"
        raise PilotMeshValidationError(msg)
    if any(r not in RATING_VALUES for r in prefix):
        msg = f"Ratings must lie in {{-2, ..., 2}}, got {tuple(prefix)}"
        raise PilotMeshValidationError(msg)
    if proposition is not None:
        _check_prefix_shape(k, prefix, proposition)

    low, high = worst_case_bounds(k, prefix)
    if low > 0:
        return SignClaim.POSITIVE
    if high < 0:
        return SignClaim.NEGATIVE
    if low == 0:
        return SignClaim.NON_NEGATIVE
    if high == 0:
        return SignClaim.NON_POSITIVE
    return SignClaim.NONE


def proposition_prefixes(k: int, proposition: int) -> list[tuple[int, ...]]:
    """Every prefix the proposition speaks about, both signs."""
    length = prefix_length(k, proposition)
    if proposition == 1:
        return [(2,) * length, (-2,) * length]
    positive = list(itertools.product((1, 2), repeat=length))
    return positive + [tuple(-r for r in p) for p in positive]


def expected_claim(k: int, prefix: Sequence[int], proposition: int) -> SignClaim:
    """
    Sign the claim asserts for an admissible prefix.

    Strict in the sign of the prefix, except for a single ±1 at k=2, where
    the remaining rating can cancel it exactly.
    """
    _check_prefix_shape(k, prefix, proposition)
    positive = prefix[0] > 0
    if proposition == 2 and k == 2 and abs(prefix[0]) == 1:
        return SignClaim.NON_NEGATIVE if positive else SignClaim.NON_POSITIVE
    return SignClaim.POSITIVE if positive else SignClaim.NEGATIVE


def find_counterexamples(k: int, proposition: int) -> list[tuple[int, ...]]:
    """
    Exhaustively score every completion of every admissible prefix.

    Scores are compared as exact integers scaled by lcm(1..k).
    Returns the full rating vectors whose score breaks the sign the claim
    asserts for their prefix.
    """
    if not 1 <= k <= MAX_EXHAUSTIVE_K:
        msg = f"Exhaustive check supports 1 <= k <= {MAX_EXHAUSTIVE_K}, got {k}"
        raise PilotMeshValidationError(msg)
    scale = math.lcm(*range(1, k + 1))
    weights = np.array([scale // i for i in range(1, k + 1)], dtype=np.int64)
    length = prefix_length(k, proposition)
    tails = np.array(list(itertools.product(LEVELS, repeat=k - length)), dtype=np.int64)

    failures: list[tuple[int, ...]] = []
    for prefix in proposition_prefixes(k, proposition):
        claim = expected_claim(k, prefix, proposition)
        head = int(np.dot(weights[:length], prefix))
        scores = head + tails @ weights[length:]
        for row in np.flatnonzero([not claim.holds(int(s)) for s in scores]):
            failures.append((*prefix, *(int(r) for r in tails[row])))
    return failures
