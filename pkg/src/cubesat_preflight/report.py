"""Run manifests, output emission, and summary-schema checking.

All files are written atomically (temp file + rename) so a crashed run never
leaves a truncated CSV behind. Identical inputs produce byte-identical outputs
except for the manifest's timestamp field.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .thermal import TemperatureHistory, ThermalSummary


@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    command: str
    model_path: str | None
    model_sha256: str | None
    parameters: dict = field(default_factory=dict)
    created_utc: str = ""

    @classmethod
    def create(cls, command: str, model_path: str | Path | None,
               parameters: dict) -> "RunManifest":
        sha = None
        if model_path is not None:
            sha = hashlib.sha256(Path(model_path).read_bytes()).hexdigest()
        return cls(
            tool_version=__version__,
            command=command,
            model_path=str(model_path) if model_path is not None else None,
            model_sha256=sha,
            parameters=dict(parameters),
            created_utc=datetime.now(timezone.utc).isoformat(),
        )

    def as_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "command": self.command,
            "model_path": self.model_path,
            "model_sha256": self.model_sha256,
            "parameters": self.parameters,
            "created_utc": self.created_utc,
        }


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def write_csv(path: str | Path, header, rows) -> Path:
    path = Path(path)
    import io
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    _atomic_write(path, buf.getvalue())
    return path


HISTORY_HEADER = ["time_s", "node", "temp_C", "q_solar_W", "q_ir_W", "q_albedo_W",
                  "q_internal_W", "q_space_W", "p_elec_W", "in_eclipse"]


def history_rows(histories: dict[str, TemperatureHistory]):
    """Plot-ready time histories, one row per node per sample."""
    for name in sorted(histories):
        h = histories[name]
        for i in range(len(h.times_s)):
            yield [f"{h.times_s[i]:.3f}", name,
                   f"{h.temperatures_k[i] - 273.15:.4f}",
                   f"{h.q_solar_w[i]:.5f}", f"{h.q_ir_w[i]:.5f}",
                   f"{h.q_albedo_w[i]:.5f}", f"{h.q_internal_w[i]:.5f}",
                   f"{h.q_space_w[i]:.5f}", f"{h.p_electric_w[i]:.5f}",
                   int(bool(h.in_eclipse[i]))]


def thermal_summary_dict(summaries: dict[str, ThermalSummary], scenario_meta: dict) -> dict:
    nodes = [summaries[name].as_dict() for name in sorted(summaries)]
    return {
        "schema": "cubesat-preflight/thermal-summary/1",
        "scenario": scenario_meta,
        "nodes": nodes,
        "passed": all(summaries[n].passed for n in summaries),
    }


RANGE_BAR_HEADER = ["case", "surface", "mode", "node", "min_C", "max_C"]


def range_bar_rows(case: str, surface: str, mode: str,
                   summaries: dict[str, ThermalSummary]):
    """Min/max bars per node, the layout used for range-comparison plots."""
    for name in sorted(summaries):
        s = summaries[name]
        yield [case, surface, mode, name, f"{s.t_min_c:.3f}", f"{s.t_max_c:.3f}"]


# ---------------------------------------------------------------------------
# minimal JSON-schema subset checker (type/required/properties/items/enum)

def validate_against(instance, schema, where: str = "$") -> None:
    """Raise ValueError where the instance violates the schema subset."""
    t = schema.get("type")
    if t is not None:
        checkers = {
            "object": dict, "array": list, "string": str,
            "boolean": bool, "number": (int, float), "integer": int,
        }
        expected = checkers[t]
        if t == "number" and isinstance(instance, bool):
            raise ValueError(f"{where}: expected number, got boolean")
        if t == "integer" and isinstance(instance, bool):
            raise ValueError(f"{where}: expected integer, got boolean")
        if not isinstance(instance, expected):
            raise ValueError(f"{where}: expected {t}, got {type(instance).__name__}")
    if "enum" in schema and instance not in schema["enum"]:
        raise ValueError(f"{where}: {instance!r} not in {schema['enum']}")
    if t == "object":
        for key in schema.get("required", []):
            if key not in instance:
                raise ValueError(f"{where}: missing required key {key!r}")
        props = schema.get("properties", {})
        for key, sub in props.items():
            if key in instance:
                validate_against(instance[key], sub, f"{where}.{key}")
        if schema.get("additionalProperties") is False:
            extra = set(instance) - set(props)
            if extra:
                raise ValueError(f"{where}: unexpected keys {sorted(extra)}")
    if t == "array" and "items" in schema:
        for i, item in enumerate(instance):
            validate_against(item, schema["items"], f"{where}[{i}]")


def load_summary_schema() -> dict:
    schema_path = Path(__file__).parent / "data" / "summary.schema.json"
    return json.loads(schema_path.read_text())
