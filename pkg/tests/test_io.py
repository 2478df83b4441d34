from pathlib import Path

import orjson
import pytest

from pilotmesh.exceptions import PilotMeshValidationError
from pilotmesh.io import (
    artifact_meta,
    json_pointer,
    load_model,
    parse_model,
    write_csv,
    write_json,
    write_jsonl,
)
from pilotmesh.model import ScenarioFile
from pilotmesh.solver import Instance


class TestParseModel:
    def test_malformed_json(self) -> None:
        """Broken JSON yields an empty pointer."""
        with pytest.raises(PilotMeshValidationError) as exc_info:
            parse_model(b"{not json", ScenarioFile, "scenario.json")
        assert exc_info.value.pointer == ""
        assert "scenario.json" in exc_info.value.message

    def test_schema_violation_pointer(self) -> None:
        """Schema errors point at the first offending value."""
        raw = orjson.dumps(
            {"isd": 10, "d2d_range": 5, "devices": [{"id": 0, "x": 0, "y": 0, "shared_mb": -3}]}
        )
        with pytest.raises(PilotMeshValidationError) as exc_info:
            parse_model(raw, ScenarioFile)
        assert exc_info.value.pointer == "/devices/0/shared_mb"

    def test_json_pointer_escapes(self) -> None:
        """Pointer tokens are escaped."""
        assert json_pointer(["a/b", "c~d", 0]) == "/a~1b/c~0d/0"
        assert json_pointer([]) == ""

    def test_missing_file(self, tmp_path: Path) -> None:
        """Missing files surface as FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_model(tmp_path / "nope.json", Instance)


class TestWriters:
    def test_write_and_load_instance(self, tmp_path: Path, tiny_instance: Instance) -> None:
        """Written instances load back unchanged."""
        path = write_json(tmp_path / "out" / "instance.json", tiny_instance)
        assert load_model(path, Instance).model_dump() == tiny_instance.model_dump()

    def test_json_sorted_keys(self, tmp_path: Path) -> None:
        """Output is stable across runs."""
        path = write_json(tmp_path / "a.json", {"b": 1, "a": 2})
        assert path.read_text().index('"a"') < path.read_text().index('"b"')

    def test_csv_header_and_floats(self, tmp_path: Path) -> None:
        """CSV starts with the JSON header and rounds floats."""
        path = write_csv(
            tmp_path / "m.csv",
            artifact_meta(7, {"n_users": 3}),
            ("seed", "mean_us"),
            [{"seed": 7, "mean_us": 2 / 3}],
        )
        lines = path.read_text().splitlines()
        header = orjson.loads(lines[0].removeprefix("# "))
        assert header["seed"] == 7
        assert header["tool"] == "pilotmesh"
        assert lines[1:] == ["seed,mean_us", "7,0.6667"]

    def test_jsonl(self, tmp_path: Path) -> None:
        """One JSON object per line."""
        path = write_jsonl(tmp_path / "e.jsonl", [{"k": 1}, {"k": 2}])
        assert [orjson.loads(line) for line in path.read_bytes().splitlines()] == [{"k": 1}, {"k": 2}]
