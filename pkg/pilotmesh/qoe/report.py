from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pilotmesh.exceptions import PilotMeshValidationError

from .rating import Rating

if TYPE_CHECKING:
    from collections.abc import Sequence

EXACT_LIMIT = 64
RATING_VALUES = frozenset(int(r) for r in Rating)


class SatisfactionParam(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    rating: Rating


class SatisfactionReport(BaseModel):
    """Ratings in preference order: list position i (1-based) is the rank."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    params: list[SatisfactionParam] = Field(min_length=1)

    @classmethod
    def from_ratings(cls, ratings: Sequence[int], names: Sequence[str] | None = None) -> SatisfactionReport:
        names = names or [f"param_{i}" for i in range(1, len(ratings) + 1)]
        return cls(params=[SatisfactionParam(name=n, rating=Rating(r)) for n, r in zip(names, ratings)])

    @property
    def ratings(self) -> tuple[int, ...]:
        return tuple(int(p.rating) for p in self.params)


@lru_cache(maxsize=256)
def harmonic_number(k: int) -> float:
    return math.fsum(1.0 / i for i in range(1, k + 1))


def harmonic_weights(k: int) -> np.ndarray:
    """Normalized rank weights (1/i) / H_k."""
    weights = 1.0 / np.arange(1, k + 1, dtype=np.float64)
    return weights / harmonic_number(k)


def us_overall(report: SatisfactionReport | Sequence[int]) -> float:
    """
    Harmonic-rank-weighted score (Σ US_i/i) / (Σ 1/i), always within [−2, 2].

    Up to 64 parameters the sums are exact rationals; beyond that they
    use compensated summation.
    """
    ratings = report.ratings if isinstance(report, SatisfactionReport) else tuple(int(r) for r in report)
    if not ratings:
        msg = "Cannot score an empty report"
        raise PilotMeshValidationError(msg)
    if any(r not in RATING_VALUES for r in ratings):
        msg = f"Ratings must lie in {{-2, ..., 2}}, got {ratings}"
        raise PilotMeshValidationError(msg)
    k = len(ratings)
    if k <= EXACT_LIMIT:
        num = sum((Fraction(r, i) for i, r in enumerate(ratings, start=1)), Fraction(0))
        den = sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))
        return float(num / den)
    return math.fsum(r / i for i, r in enumerate(ratings, start=1)) / harmonic_number(k)


def us_overall_batch(ratings: np.ndarray) -> np.ndarray:
    """Score every row of a ``(n, k)`` rating matrix."""
    ratings = np.asarray(ratings, dtype=np.float64)
    if ratings.ndim != 2 or ratings.shape[1] == 0:
        msg = f"Expected a (n, k) rating matrix, got shape {ratings.shape}"
        raise PilotMeshValidationError(msg)
    return ratings @ harmonic_weights(ratings.shape[1])
