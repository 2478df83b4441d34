from typing import Annotated, Any

from annotated_doc import Doc

from .base import PilotMeshError


class PilotMeshValidationError(PilotMeshError):
    """
    Raised when an input fails validation.

    Example:
        >>> raise PilotMeshValidationError(
        ...     "Expected a number",
        ...     pointer="/demands/3",
        ... )
    """

    def __init__(
        self,
        message: Annotated[
            str,
            Doc(
                """
                Validation error description.

                Used when instance files, scenario files, reports or
                direct arguments fail schema or range checks.
                """
            ),
        ] = "Validation failed",
        pointer: Annotated[
            str | None,
            Doc(
                """
                JSON pointer to the offending value.

                Set when the error was raised while parsing a file,
                e.g. ``/devices/4/shared_mb``.
                """
            ),
        ] = None,
        **kwargs: Any,  # noqa: ANN401
    ) -> None:
        details = kwargs.pop("details", None) or {}
        if pointer is not None:
            details = {"pointer": pointer, **details}
        self.pointer = pointer
        super().__init__(message=message, details=details, **kwargs)


class SegmentOverflowError(PilotMeshValidationError):
    """Raised when an overlay id segment does not fit its bit width."""

    def __init__(self, segment: str, value: int, width: int) -> None:
        self.segment = segment
        super().__init__(
            f"Segment '{segment}' value {value} does not fit in {width} bits",
            details={"segment": segment, "value": value, "width": width},
        )
