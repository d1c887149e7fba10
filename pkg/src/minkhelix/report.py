"""Verification report shared by the sabban and detect verdicts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import SampleGrid

__all__ = ["VerificationReport", "spread_of", "round12"]

PASS = "PASS"
FAIL = "FAIL"


def spread_of(values) -> tuple[float, float]:
    """Mean and (max - min) / max(1, |mean|) over the finite entries."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return math.nan, math.nan
    mean = float(v.mean())
    return mean, float((v.max() - v.min()) / max(1.0, abs(mean)))


def round12(x):
    """Round floats to 12 significant digits for stable serialisation."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: round12(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [round12(v) for v in x]
    return x


@dataclass
class VerificationReport:
    subject: str
    grid: SampleGrid
    metric_name: str
    values: np.ndarray
    verdict: str
    excluded_nodes: int = 0
    details: str = ""
    cause: str | None = None
    theorem: int | None = None
    metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.verdict not in (PASS, FAIL):
            raise ValueError(f"verdict must be PASS or FAIL, got {self.verdict!r}")

    @property
    def mean(self) -> float:
        return spread_of(self.values)[0]

    @property
    def spread(self) -> float:
        return spread_of(self.values)[1]

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        out: dict = {"subject": self.subject}
        if self.theorem is not None:
            out["theorem"] = self.theorem
        out["grid"] = self.grid.to_dict()
        out["metric"] = self.metric_name
        out["mean"] = self.mean
        out["spread"] = self.spread
        out["excluded"] = self.excluded_nodes
        out["verdict"] = self.verdict
        if self.cause is not None:
            out["cause"] = self.cause
        if self.metrics:
            out["metrics"] = dict(self.metrics)
        return round12(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def summary(self) -> str:
        line = (f"{self.subject}: {self.verdict} {self.metric_name} mean={self.mean:.12g} "
                f"spread={self.spread:.3g} excluded={self.excluded_nodes}/{self.grid.count}")
        if self.cause:
            line += f" cause={self.cause}"
        return line
