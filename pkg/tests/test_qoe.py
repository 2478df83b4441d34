import numpy as np
import pytest
from pydantic import ValidationError

from pilotmesh.exceptions import PilotMeshValidationError
from pilotmesh.qoe import (
    PARAMETER_NAMES,
    ParameterId,
    Rating,
    RatingPolicy,
    SatisfactionReport,
    expected_score,
    harmonic_number,
    harmonic_weights,
    random_harmonic_experiment,
    rate_percentage,
    us_overall,
    us_overall_batch,
)


class TestRating:
    @pytest.mark.parametrize(
        ("pct", "rating"),
        [(100, 2), (80.1, 2), (80, 1), (60.5, 1), (60, 0), (40.01, 0), (40, -1), (20, -1), (19.9, -2), (0, -2)],
    )
    def test_default_thresholds(self, pct: float, rating: int) -> None:
        """Upper boundaries are open, the lowest one closed."""
        assert rate_percentage(pct) == rating

    def test_monotone_in_percentage(self) -> None:
        """A higher achievement never rates lower."""
        grid = np.linspace(0, 100, 401)
        ratings = [int(rate_percentage(float(pct))) for pct in grid]
        assert ratings == sorted(ratings)
        assert (ratings[0], ratings[-1]) == (-2, 2)

    def test_out_of_range(self) -> None:
        """Percentages live in [0, 100]."""
        with pytest.raises(PilotMeshValidationError):
            rate_percentage(100.5)
        with pytest.raises(PilotMeshValidationError):
            rate_percentage(-1)

    def test_custom_policy(self) -> None:
        """Thresholds are configurable."""
        policy = RatingPolicy(excellent=90, good=70, satisfactory=50, poor=30)
        assert rate_percentage(85, policy) is Rating.GOOD
        assert rate_percentage(25, policy) is Rating.BAD

    def test_policy_order(self) -> None:
        """Thresholds must strictly decrease."""
        with pytest.raises(PilotMeshValidationError):
            RatingPolicy(excellent=50, good=60)


class TestCatalog:
    def test_nine_parameters(self) -> None:
        """Every parameter has a readable name."""
        assert len(ParameterId) == 9
        assert set(PARAMETER_NAMES) == set(ParameterId)
        assert ParameterId.JOIN_TIME.label == "join time"


class TestUsOverall:
    def test_worked_example(self) -> None:
        """Ratings 2, -2, 2 score 10/11."""
        assert us_overall([2, -2, 2]) == pytest.approx(10 / 11)

    def test_report_input(self) -> None:
        """Reports and plain sequences score the same."""
        report = SatisfactionReport.from_ratings([2, -2, 2], ["a", "b", "c"])
        assert report.params[1].name == "b"
        assert us_overall(report) == us_overall([2, -2, 2])

    @pytest.mark.parametrize("value", [-2, -1, 0, 1, 2])
    def test_constant_ratings(self, value: int) -> None:
        """A constant vector scores its value."""
        assert us_overall([value] * 7) == pytest.approx(value)

    def test_many_parameters(self) -> None:
        """Long reports stay within the rating range."""
        ratings = [2 if i % 3 else -2 for i in range(200)]
        assert -2 <= us_overall(ratings) <= 2

    def test_rank_sensitivity(self) -> None:
        """Moving the better rating to the higher rank raises the score; raising any rating does too."""
        rng = np.random.default_rng(5)
        for ratings in rng.integers(-2, 3, size=(200, 6)).tolist():
            i, j = sorted(rng.choice(6, size=2, replace=False).tolist())
            if ratings[i] < ratings[j]:
                swapped = ratings.copy()
                swapped[i], swapped[j] = ratings[j], ratings[i]
                assert us_overall(swapped) > us_overall(ratings)
            if ratings[j] < 2:
                raised = ratings.copy()
                raised[j] += 1
                assert us_overall(raised) > us_overall(ratings)

    def test_rejects_invalid(self) -> None:
        """Empty and out-of-range inputs are refused."""
        with pytest.raises(PilotMeshValidationError):
            us_overall([])
        with pytest.raises(PilotMeshValidationError):
            us_overall([3])

    def test_report_rejects_bad_rating(self) -> None:
        """Reports only hold valid ratings."""
        with pytest.raises(ValidationError):
            SatisfactionReport.model_validate({"params": [{"name": "x", "rating": 5}]})

    def test_harmonic(self) -> None:
        """Weights are normalized harmonic ranks."""
        assert harmonic_number(4) == pytest.approx(25 / 12)
        assert harmonic_weights(4).sum() == pytest.approx(1)
        assert harmonic_weights(4)[0] == pytest.approx(12 / 25)

    def test_batch_matches_scalar(self) -> None:
        """Vectorized scores agree with the exact ones."""
        ratings = np.array([[2, -2, 2], [0, 1, -1]])
        assert us_overall_batch(ratings).tolist() == pytest.approx([us_overall(r) for r in ratings.tolist()])


class TestExperiment:
    def test_expected_score(self) -> None:
        """The mean is the mean rating."""
        assert expected_score() == 0
        assert expected_score([0, 0, 0, 0, 1]) == 2
        with pytest.raises(PilotMeshValidationError):
            expected_score([0.5, 0.5])

    def test_reproducible(self) -> None:
        """The same seed draws the same samples."""
        a = random_harmonic_experiment(50, 100, seed=3)
        b = random_harmonic_experiment(50, 100, seed=3)
        assert np.array_equal(a.samples, b.samples)
        assert a.samples.shape == (100,)
        assert set(a.abs_quantiles) == {0.5, 0.9, 0.99}

    def test_workers_do_not_change_samples(self) -> None:
        """Per-trial seeds make the pool size irrelevant."""
        serial = random_harmonic_experiment(30, 40, seed=9)
        pooled = random_harmonic_experiment(30, 40, seed=9, workers=2)
        assert np.array_equal(serial.samples, pooled.samples)

    def test_skewed_levels(self) -> None:
        """Always rating 2 scores 2."""
        stats = random_harmonic_experiment(20, 10, seed=0, probabilities=[0, 0, 0, 0, 1])
        assert stats.mean == pytest.approx(2)
        assert stats.fraction_below(0.6) == 0

    def test_invalid_arguments(self) -> None:
        """k and trials must be positive."""
        with pytest.raises(PilotMeshValidationError):
            random_harmonic_experiment(0, 10, seed=0)
