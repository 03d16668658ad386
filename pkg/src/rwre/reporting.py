"""CSV and JSON emission for experiment campaigns.

Data outputs are deterministic byte-for-byte given (config, seed): floats
carry 17 significant digits (lossless round trip), newlines are LF, and row
order follows replica indices.  Timing lives in a separate file so the data
artifacts stay reproducible.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit_csv(rows: Sequence[Sequence], header: Sequence[str], path) -> None:
    """Write rows with a fixed header, 17-significant-digit floats, LF ends."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path):
    """Round-trip reader: header plus rows with floats parsed back."""
    with open(path) as fh:
        lines = fh.read().split("\n")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        vals = []
        for tok in line.split(","):
            try:
                vals.append(int(tok))
            except ValueError:
                try:
                    vals.append(float(tok))
                except ValueError:
                    vals.append(tok)
        rows.append(tuple(vals))
    return header, rows


@dataclass
class MetricRecord:
    """One verification metric with its threshold and outcome."""

    name: str
    value: float
    passed: bool
    target_lo: Optional[float] = None
    target_hi: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    theorem: str = ""
    note: str = ""


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    records: List[MetricRecord] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    backend: str = ""
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, record: MetricRecord) -> None:
        self.records.append(record)

    def to_json_file(self, path) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        payload = {
            "experiment": self.experiment,
            "config": self.config,
            "passed": self.passed,
            "records": [asdict(r) for r in self.records],
            "counts": self.counts,
            "backend": self.backend,
            "notes": self.notes,
        }
        with open(path, "w", newline="") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def summary_lines(self) -> List[str]:
        out = []
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            rng = ""
            if r.target_lo is not None or r.target_hi is not None:
                rng = f" target=[{r.target_lo}, {r.target_hi}]"
            tag = f" [{r.theorem}]" if r.theorem else ""
            out.append(f"{status} {r.name} = {r.value:.6g}{rng}{tag}"
                       + (f"  ({r.note})" if r.note else ""))
        return out
