"""Validity scoring, the keep/adapt decision, and the AUC evaluation harness."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import ConfigError, DegenerateInput, MissingMetric
from .metrics import MetricValue

_WEIGHT_TOL = 1e-9

KEEP = "Keep"
ADAPT = "Adapt"


@dataclass(frozen=True)
class ValidatorConfig:
    """Enabled metrics with weights, the decision threshold, and sampling
    knobs for the stochastic metrics."""
    weights: dict[str, float]
    threshold: float = 0.5
    mcd_passes: int = 8
    ensemble_size: int = 5
    sample_count: int = 8
    temperature: float = 1.0

    def __post_init__(self):
        if not self.weights:
            raise ConfigError("at least one metric weight required")
        if any(w < 0 for w in self.weights.values()):
            raise ConfigError("metric weights must be nonnegative")
        total = math.fsum(self.weights.values())
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise ConfigError(f"metric weights sum to {total!r}, not 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must lie in [0,1]")
        for knob in ("mcd_passes", "ensemble_size", "sample_count"):
            if getattr(self, knob) < 2:
                raise ConfigError(f"{knob} must be at least 2")
        if self.temperature <= 0:
            raise ConfigError("temperature must be positive")


@dataclass(frozen=True)
class ValidityReport:
    metrics: dict[str, MetricValue]
    v: float
    threshold: float
    decision: str
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def keep(self) -> bool:
        return self.decision == KEEP


def combine_v(metric_values, config: ValidatorConfig,
              provenance: dict | None = None) -> ValidityReport:
    """V = 1 - sum(w_i * u_i); Keep iff V >= T."""
    if isinstance(metric_values, dict):
        by_kind = dict(metric_values)
    else:
        by_kind = {m.kind: m for m in metric_values}
    missing = [k for k in config.weights if k not in by_kind]
    if missing:
        raise MissingMetric(", ".join(sorted(missing)))
    v = 1.0 - math.fsum(config.weights[k] * by_kind[k].u
                        for k in config.weights)
    decision = KEEP if v >= config.threshold else ADAPT
    return ValidityReport({k: by_kind[k] for k in config.weights}, v,
                          config.threshold, decision, provenance or {})


@dataclass(frozen=True)
class EvalRecord:
    score: float
    label: str
    metric: str = ""
    model: str = ""
    benchmark: str = ""

    def __post_init__(self):
        if self.label not in ("correct", "incorrect"):
            raise DegenerateInput(f"label must be correct/incorrect, got {self.label!r}")
        if not 0.0 <= self.score <= 1.0:
            raise DegenerateInput("score must lie in [0,1]")


def roc_auc(records) -> float:
    """Probability that the metric ranks a misprediction above a correct
    prediction, ties counted half (Mann-Whitney with midranks)."""
    scores = [(r.score, r.label) for r in records]
    n_inc = sum(1 for _, lab in scores if lab == "incorrect")
    n_cor = len(scores) - n_inc
    if n_inc == 0 or n_cor == 0:
        raise DegenerateInput("need at least one record of each label")
    ranked = sorted(scores, key=lambda t: t[0])
    rank_sum_inc = 0.0
    i = 0
    while i < len(ranked):
        j = i
        while j < len(ranked) and ranked[j][0] == ranked[i][0]:
            j += 1
        midrank = (i + 1 + j) / 2.0  # average of 1-based ranks i+1 .. j
        rank_sum_inc += midrank * sum(
            1 for k in range(i, j) if ranked[k][1] == "incorrect")
        i = j
    u_stat = rank_sum_inc - n_inc * (n_inc + 1) / 2.0
    return u_stat / (n_inc * n_cor)


def read_records(path) -> list[EvalRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_records(fh)


def parse_records(fh) -> list[EvalRecord]:
    reader = csv.DictReader(fh)
    expected = ["score", "label", "metric", "model", "benchmark"]
    if reader.fieldnames != expected:
        raise ConfigError(
            f"record header must be {','.join(expected)}, got {reader.fieldnames}")
    return [EvalRecord(float(row["score"]), row["label"], row["metric"],
                       row["model"], row["benchmark"]) for row in reader]


def write_records(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["score", "label", "metric", "model", "benchmark"])
        for r in records:
            writer.writerow([repr(r.score), r.label, r.metric, r.model,
                             r.benchmark])


def render_table(rows) -> tuple[str, str]:
    """Pivot AUC rows into metrics x (model, benchmark) grids.

    Row order and column order follow first appearance in `rows`; cells show
    three decimals; absent combinations are left blank. Returns (text, csv).
    """
    metrics: list[str] = []
    columns: list[tuple[str, str]] = []
    cells: dict[tuple[str, tuple[str, str]], float] = {}
    for row in rows:
        metric, model, benchmark, auc = (row["metric"], row["model"],
                                         row["benchmark"], row["auc"])
        if metric not in metrics:
            metrics.append(metric)
        col = (model, benchmark)
        if col not in columns:
            columns.append(col)
        cells[(metric, col)] = auc

    headers = ["metric"] + [f"{m} {b}".strip() for m, b in columns]
    grid = [headers]
    for metric in metrics:
        line = [metric]
        for col in columns:
            value = cells.get((metric, col))
            line.append("" if value is None else f"{value:.3f}")
        grid.append(line)

    widths = [max(len(row[i]) for row in grid) for i in range(len(headers))]
    text_lines = []
    for idx, row in enumerate(grid):
        text_lines.append("  ".join(cell.ljust(w)
                                    for cell, w in zip(row, widths)).rstrip())
        if idx == 0:
            text_lines.append("  ".join("-" * w for w in widths))
    text = "\n".join(text_lines) + "\n"

    buf = io.StringIO()
    writer = csv.writer(buf)
    for row in grid:
        writer.writerow(row)
    return text, buf.getvalue()
