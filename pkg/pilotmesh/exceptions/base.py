from __future__ import annotations

import logging
from typing import Annotated, Any

from annotated_doc import Doc

logger = logging.getLogger("pilotmesh.exceptions")


class PilotMeshError(Exception):
    """
    Base exception for the pilotmesh library.

    Attributes:
        message: Error description
        details: Extra diagnostic context
    """

    def __init__(
        self,
        message: Annotated[
            str,
            Doc(
                """
                Human-readable error message.

                Describes which input or model state
                could not be handled.
                """
            ),
        ],
        details: (
            Annotated[
                dict[str, Any],
                Doc(
                    """
                Additional error details.

                Arbitrary dictionary with diagnostic context such as
                the offending segment, a JSON pointer into the input
                file or the instance dimensions.
                """
                ),
            ]
            | None
        ) = None,
    ) -> None:
        self.message = message
        self.details = details or {}
        super().__init__(self._format_message())

    def _format_message(self) -> str:
        parts = [self.message]

        if self.details:
            details_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            parts.append(f"Details: {details_str}")

        return " | ".join(parts)

    def log(self, level: int = logging.ERROR) -> None:
        log_message = f"{self.__class__.__name__}: {self.message}"

        pointer = self.details.get("pointer")
        if pointer is not None:
            log_message += f" | At: {pointer}"

        logger.log(level, log_message)
