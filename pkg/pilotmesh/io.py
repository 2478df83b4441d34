"""Artifact reading and writing: JSON, CSV and JSON lines."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import TYPE_CHECKING, Any, TypeVar

import orjson
from pydantic import BaseModel, ValidationError

from .__meta__ import __version__
from .exceptions import PilotMeshValidationError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

ModelT = TypeVar("ModelT", bound=BaseModel)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
TOOL_NAME = "pilotmesh"


def json_pointer(loc: Iterable[int | str]) -> str:
    """Render a pydantic error location as an RFC 6901 pointer."""
    parts = [str(p).replace("~", "~0").replace("/", "~1") for p in loc]
    return "/" + "/".join(parts) if parts else ""


def from_validation_error(error: ValidationError, source: str | None = None) -> PilotMeshValidationError:
    first = error.errors()[0]
    pointer = json_pointer(first["loc"])
    where = f" in {source}" if source else ""
    return PilotMeshValidationError(
        f"{first['msg']}{where} at '{pointer or '/'}'",
        pointer=pointer,
        details={"errors": error.error_count()},
    )


def decode_json(raw: bytes | str, source: str | None = None) -> Any:  # noqa: ANN401
    """
    Raises:
        PilotMeshValidationError: malformed JSON, with an empty pointer.
    """
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        msg = f"Malformed JSON{f' in {source}' if source else ''}: {exc}"
        raise PilotMeshValidationError(msg, pointer="") from exc


def validate_model(data: Any, model: type[ModelT], source: str | None = None) -> ModelT:  # noqa: ANN401
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise from_validation_error(exc, source) from exc


def parse_model(raw: bytes | str, model: type[ModelT], source: str | None = None) -> ModelT:
    """
    Decode JSON and validate it against ``model``.

    Raises:
        PilotMeshValidationError: malformed JSON or schema violation, with
            a JSON pointer to the first offending value.
    """
    return validate_model(decode_json(raw, source), model, source)


def load_model(path: Path | str, model: type[ModelT]) -> ModelT:
    """Read ``path`` and validate it; a missing file raises ``FileNotFoundError``."""
    path = Path(path)
    return parse_model(path.read_bytes(), model, source=path.name)


def dump_json(data: Any) -> bytes:  # noqa: ANN401
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json", by_alias=True)
    return orjson.dumps(data, option=JSON_OPTIONS) + b"\n"


def write_json(path: Path | str, data: Any) -> Path:  # noqa: ANN401
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_json(data))
    return path


def artifact_meta(seed: int | list[int] | None, config: dict[str, Any] | None = None) -> dict[str, Any]:
    """Header embedded in every artifact so it can be regenerated from itself."""
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "seed": seed,
        "config": config or {},
    }


def _cell(value: Any) -> Any:  # noqa: ANN401
    return f"{value:.4f}" if isinstance(value, float) else value


def write_csv(
    path: Path | str,
    header: dict[str, Any],
    fieldnames: Sequence[str],
    rows: Iterable[dict[str, Any]],
) -> Path:
    """
    CSV with a leading ``# {json}`` line carrying ``header``.

    Floats are written with four decimals, so repeated runs produce
    identical bytes.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("# " + orjson.dumps(header, option=orjson.OPT_SORT_KEYS).decode() + "\n")
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({name: _cell(row[name]) for name in fieldnames})
    return path


def write_jsonl(path: Path | str, events: Iterable[dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(orjson.dumps(event, option=orjson.OPT_SORT_KEYS) + b"\n" for event in events))
    return path
