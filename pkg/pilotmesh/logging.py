import logging
import os
import sys
from datetime import datetime, timezone
from typing import ClassVar

LOGGER_NAME = "pilotmesh"
LEVEL_ENV_VAR = "PILOTMESH_LOG"
DEFAULT_LEVEL = logging.WARNING


class ColorFormatter(logging.Formatter):
    """
    Logging formatter with colored output.

    Adds ANSI colors and level icons to each record. Messages
    prefixed with ``[RESULT]`` are rendered as a result arrow, which
    the solver and the simulation use for their per-run summaries.
    """

    RESET = "\033[0m"

    BOLD = "\033[1m"

    GRAY = "\033[90m"
    CYAN = "\033[36m"
    GREEN = "\033[32m"
    YELLOW = "\033[33m"
    BLUE = "\033[34m"
    RED = "\033[31m"
    RED_BG = "\033[41m"
    PURPLE = "\033[35m"

    LEVEL_COLORS: ClassVar[dict[int, str]] = {
        logging.DEBUG: YELLOW,
        logging.INFO: GREEN,
        logging.WARNING: BLUE,
        logging.ERROR: RED,
        logging.CRITICAL: RED_BG,
    }

    LEVEL_ICONS: ClassVar[dict[int, str]] = {
        logging.DEBUG: "·",
        logging.INFO: "✔",
        logging.WARNING: "⚠",
        logging.ERROR: "✖",
        logging.CRITICAL: "✖",
    }

    def formatTime(self, record, datefmt=None) -> str:  # noqa  N802
        t = datetime.fromtimestamp(record.created, tz=timezone.utc)
        return f"{self.GRAY}{t.strftime('%H:%M:%S.%f')[:-3]}{self.RESET}"

    def format(self, record: logging.LogRecord) -> str:
        color = self.LEVEL_COLORS.get(record.levelno, self.RESET)
        icon = self.LEVEL_ICONS.get(record.levelno, "")

        record.levelname = f"{color}{self.BOLD}{record.levelname:<8}{self.RESET}"
        record.name = f"{self.CYAN}{record.name}{self.RESET}"

        msg = str(record.msg)

        if msg.startswith("[RESULT]"):
            record.msg = f"{self.PURPLE}↳ {msg[8:].strip()}{self.RESET}"
        else:
            record.msg = f"{color}{icon} {msg}{self.RESET}"

        return super().format(record)


def level_from_env(default: int = DEFAULT_LEVEL) -> int:
    """
    Resolve the log level from ``PILOTMESH_LOG``.

    Accepts level names (``DEBUG``, ``info``) or numeric levels.
    Unknown values fall back to ``default``.
    """
    raw = os.environ.get(LEVEL_ENV_VAR, "").strip()
    if not raw:
        return default
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw.upper())
    return level if isinstance(level, int) else default


def setup_logger(*, debug: bool = False, level: int | None = None) -> logging.Logger:
    """
    Configure and return the package logger.

    Installs a single colored stderr handler. The level is, in order of
    precedence: ``DEBUG`` when ``debug`` is set, the explicit ``level``,
    then ``PILOTMESH_LOG``. Calling it again only adjusts the level.
    """
    effective = logging.DEBUG if debug else level if level is not None else level_from_env()
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)

    for handler in logger.handlers:
        if isinstance(handler.formatter, ColorFormatter):
            handler.setLevel(effective)
            if isinstance(handler, logging.StreamHandler) and handler.stream is not sys.stderr:
                # no flush, the old stream may already be closed
                with handler.lock:
                    handler.stream = sys.stderr
            return logger

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(effective)
    handler.setFormatter(
        ColorFormatter("%(asctime)s │ %(levelname)s │ %(name)s │ %(message)s")
    )
    logger.addHandler(handler)
    logger.propagate = False

    return logger
