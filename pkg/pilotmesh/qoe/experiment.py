from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Annotated

import numpy as np
from annotated_doc import Doc

from pilotmesh.exceptions import PilotMeshValidationError

from .propositions import LEVELS
from .report import harmonic_weights

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger("pilotmesh.qoe")

DEFAULT_QUANTILES = (0.5, 0.9, 0.99)


@dataclass(frozen=True, slots=True, eq=False)
class HarmonicStats:
    k: int
    trials: int
    seed: int
    mean: float
    std: float
    abs_quantiles: dict[float, float]
    samples: np.ndarray = field(repr=False)

    def fraction_below(self, threshold: float) -> float:
        """Share of trials with ``|us_overall| < threshold``."""
        return float(np.mean(np.abs(self.samples) < threshold))


def _check_probabilities(probabilities: Sequence[float] | None) -> np.ndarray | None:
    if probabilities is None:
        return None
    p = np.asarray(probabilities, dtype=np.float64)
    if p.shape != (len(LEVELS),) or np.any(p < 0) or not np.isclose(p.sum(), 1.0):
        msg = f"Expected {len(LEVELS)} non-negative level probabilities summing to 1, got {list(probabilities)}"
        raise PilotMeshValidationError(msg)
    return p


def expected_score(probabilities: Sequence[float] | None = None) -> float:
    """Mean of the overall score; the normalized weights make it the mean rating."""
    p = _check_probabilities(probabilities)
    if p is None:
        return 0.0
    return float(np.dot(LEVELS, p))


def _score_trials(k: int, seeds: list[np.random.SeedSequence], probabilities: np.ndarray | None) -> np.ndarray:
    weights = harmonic_weights(k)
    levels = np.asarray(LEVELS, dtype=np.float64)
    out = np.empty(len(seeds))
    for n, child in enumerate(seeds):
        rng = np.random.default_rng(child)
        ratings = rng.choice(levels, size=k, p=probabilities)
        out[n] = float(ratings @ weights)
    return out


def random_harmonic_experiment(
    k: int,
    trials: int,
    seed: int,
    probabilities: Annotated[
        Sequence[float] | None,
        Doc(
            """
            Probability of each rating level from −2 to 2.

            ``None`` draws the five levels uniformly.
            """
        ),
    ] = None,
    *,
    workers: Annotated[
        int,
        Doc(
            """
            Worker processes. Every trial owns a seed spawned from
            ``seed``, so the samples do not depend on this value.
            """
        ),
    ] = 1,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
) -> HarmonicStats:
    """Sample the overall score of ``k`` i.i.d. ratings ``trials`` times."""
    if k < 1 or trials < 1:
        msg = f"k and trials must be positive, got k={k}, trials={trials}"
        raise PilotMeshValidationError(msg)
    p = _check_probabilities(probabilities)
    children = np.random.SeedSequence(seed).spawn(trials)

    if workers > 1:
        chunks = [children[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_score_trials, [k] * workers, chunks, [p] * workers))
        samples = np.empty(trials)
        for i, part in enumerate(parts):
            samples[i::workers] = part
    else:
        samples = _score_trials(k, children, p)

    magnitude = np.abs(samples)
    stats = HarmonicStats(
        k=k,
        trials=trials,
        seed=seed,
        mean=float(samples.mean()),
        std=float(samples.std()),
        abs_quantiles={q: float(np.quantile(magnitude, q)) for q in quantiles},
        samples=samples,
    )
    logger.info("[RESULT] k=%d trials=%d mean=%.4f std=%.4f", k, trials, stats.mean, stats.std)
    return stats
