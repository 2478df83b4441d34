import logging

import pytest

from pilotmesh.exceptions import (
    InfeasibleInstanceError,
    OracleGuardError,
    OverlayError,
    PilotMeshError,
    PilotMeshValidationError,
    SegmentOverflowError,
)


class TestPilotMeshError:
    def test_is_exception_subclass(self) -> None:
        """The base error is a plain exception."""
        assert issubclass(PilotMeshError, Exception)
        assert not issubclass(PilotMeshError, ValueError)

    def test_str_contains_message(self) -> None:
        """The message leads the rendered string."""
        assert str(PilotMeshError("something broke")).startswith("something broke")

    def test_details_default_empty_dict(self) -> None:
        """Missing details become an empty dict."""
        assert PilotMeshError("oops").details == {}
        assert PilotMeshError("oops", details=None).details == {}

    def test_str_contains_details(self) -> None:
        """Details are appended after a separator."""
        err = PilotMeshError("oops", details={"m": 3})
        assert str(err) == "oops | Details: m=3"

    def test_log_includes_pointer(self, caplog: pytest.LogCaptureFixture, monkeypatch: pytest.MonkeyPatch) -> None:
        """A JSON pointer is logged next to the message."""
        monkeypatch.setattr(logging.getLogger("pilotmesh"), "propagate", True)
        err = PilotMeshValidationError("bad value", pointer="/demands/2")
        with caplog.at_level(logging.WARNING, logger="pilotmesh.exceptions"):
            err.log(level=logging.WARNING)
        assert "PilotMeshValidationError: bad value | At: /demands/2" in caplog.text

    def test_log_with_custom_level(self) -> None:
        """Logging at any level does not raise."""
        PilotMeshError("oops").log(level=logging.DEBUG)


class TestValidationError:
    def test_default_message(self) -> None:
        """The default message is generic."""
        assert PilotMeshValidationError().message == "Validation failed"

    def test_pointer_stored(self) -> None:
        """The pointer is kept as attribute and detail."""
        err = PilotMeshValidationError("Expected a number", pointer="/devices/4/shared_mb")
        assert err.pointer == "/devices/4/shared_mb"
        assert err.details["pointer"] == "/devices/4/shared_mb"

    def test_no_pointer(self) -> None:
        """Without a pointer no detail is added."""
        err = PilotMeshValidationError("nope")
        assert err.pointer is None
        assert "pointer" not in err.details

    def test_segment_overflow(self) -> None:
        """Overflow errors name the segment and its width."""
        err = SegmentOverflowError("enb", 256, 8)
        assert isinstance(err, PilotMeshValidationError)
        assert err.segment == "enb"
        assert err.details == {"segment": "enb", "value": 256, "width": 8}
        assert "does not fit in 8 bits" in err.message


class TestSolverErrors:
    def test_infeasible_default_message(self) -> None:
        """Totals are recorded as details."""
        err = InfeasibleInstanceError(total_demand=1200.0, capacity=1000.0)
        assert err.message == "Instance is infeasible"
        assert err.details == {"total_demand": 1200.0, "capacity": 1000.0}

    def test_oracle_guard_message(self) -> None:
        """The guard reports the instance size."""
        err = OracleGuardError(m=15, e=3, max_m=14, max_e=14)
        assert "m=15" in err.message
        assert err.details == {"m": 15, "e": 3}

    @pytest.mark.parametrize(
        "error_cls",
        [InfeasibleInstanceError, OracleGuardError, OverlayError, PilotMeshValidationError],
    )
    def test_is_subclass_of_base(self, error_cls: type[PilotMeshError]) -> None:
        """All library errors share one base."""
        assert issubclass(error_cls, PilotMeshError)
