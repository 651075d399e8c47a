"""Deterministic JSON reports."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numerics import LogScalar, format_fraction


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    seed: int | None = None
    runtime: float | None = None

    def verdict(self, name: str, holds: bool, margin, detail: str = "") -> None:
        """Record a named check; ``margin`` is positive when it holds with room."""
        self.verdicts.append({"name": name, "holds": bool(holds), "margin": margin, "detail": detail})

    @property
    def ok(self) -> bool:
        return all(v["holds"] for v in self.verdicts)

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "verdicts": self.verdicts,
            "seed": self.seed,
            "ok": self.ok,
        }
        if self.runtime is not None:
            out["runtime_seconds"] = self.runtime
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())


def jsonable(value):
    """Plain JSON values: LogScalars become ``{sign, log10, approx}``, Fractions ``"a/b"``."""
    if isinstance(value, LogScalar):
        return {"sign": value.sign, "log10": value.log10 if value.sign else None, "approx": value.approx()}
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if value is None or isinstance(value, str):
        return value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def render_text(report: Report) -> str:
    """Short human summary: results one per line, then verdicts."""
    lines = [f"{report.command}:"]
    for key in sorted(report.results):
        lines.append(f"  {key}: {_brief(report.results[key])}")
    for v in report.verdicts:
        mark = "PASS" if v["holds"] else "FAIL"
        lines.append(f"  [{mark}] {v['name']} (margin {_brief(v['margin'])})")
    return "\n".join(lines) + "\n"


def _brief(value) -> str:
    value = jsonable(value)
    if isinstance(value, dict) and "approx" in value:
        return value["approx"]
    text = json.dumps(value, sort_keys=True, ensure_ascii=False)
    return text if len(text) <= 100 else text[:97] + "..."
