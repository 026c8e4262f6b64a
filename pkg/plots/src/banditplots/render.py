"""Render experiment CSVs to figure files.

Reads the runner's published summary.csv / pulls.csv schemas and draws
regret-vs-round curves with one-standard-deviation bands, or grouped
per-arm pull bars. Plots are pure functions of the CSV content; nothing is
recomputed from traces.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SUMMARY_COLUMNS = ["scenario_id", "algorithm", "t", "mean_regret", "std_regret", "n_runs"]
PULLS_COLUMNS = ["scenario_id", "algorithm", "arm", "mean_pulls_at_T"]


class PlotError(ValueError):
    """Bad input file, schema mismatch or empty selection."""


@dataclass
class PlotSpec:
    input_path: Path
    output_path: Path
    title: str = ""
    algorithms: tuple[str, ...] = field(default_factory=tuple)  # empty = all
    log_x: bool = False
    dpi: int = 150


def _read_rows(path: Path, expected_columns) -> list[dict]:
    if not path.exists():
        raise PlotError(f"missing input file: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in expected_columns if c not in header]
        if missing:
            raise PlotError(f"{path} lacks columns: {', '.join(missing)}")
        return list(reader)


def _select(rows: list[dict], spec: PlotSpec) -> list[dict]:
    if spec.algorithms:
        rows = [r for r in rows if r["algorithm"] in spec.algorithms]
    if not rows:
        raise PlotError("no rows match the algorithm filter")
    return rows


def _series_key(rows: list[dict]):
    scenarios = sorted({r["scenario_id"] for r in rows})
    if len(scenarios) == 1:
        return lambda r: r["algorithm"]
    return lambda r: f"{r['scenario_id']}/{r['algorithm']}"


def _save(fig, spec: PlotSpec) -> Path:
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=spec.dpi)
    plt.close(fig)
    return out


def plot_regret(spec: PlotSpec):
    """Mean cumulative regret per algorithm over rounds, with a shaded band
    of plus/minus one standard deviation. Returns (figure, output path)."""
    rows = _select(_read_rows(Path(spec.input_path), SUMMARY_COLUMNS), spec)
    key = _series_key(rows)
    series: dict[str, list[tuple[int, float, float]]] = {}
    for row in rows:
        series.setdefault(key(row), []).append(
            (int(row["t"]), float(row["mean_regret"]), float(row["std_regret"]))
        )

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name in sorted(series):
        pts = sorted(series[name])
        ts = [p[0] for p in pts]
        mean = [p[1] for p in pts]
        lo = [m - s for _, m, s in pts]
        hi = [m + s for _, m, s in pts]
        ax.plot(ts, mean, label=name)
        ax.fill_between(ts, lo, hi, alpha=0.2)
    ax.set_xlabel("t")
    ax.set_ylabel("cumulative regret")
    if spec.log_x:
        ax.set_xscale("log")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    path = _save(fig, spec)
    return fig, path


def plot_pulls(spec: PlotSpec):
    """Grouped bars of mean pulls at the horizon, per arm per algorithm."""
    rows = _select(_read_rows(Path(spec.input_path), PULLS_COLUMNS), spec)
    key = _series_key(rows)
    groups: dict[str, dict[int, float]] = {}
    arms: set[int] = set()
    for row in rows:
        arm = int(row["arm"])
        arms.add(arm)
        groups.setdefault(key(row), {})[arm] = float(row["mean_pulls_at_T"])

    arm_list = sorted(arms)
    names = sorted(groups)
    width = 0.8 / len(names)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, name in enumerate(names):
        xs = [a + (i - (len(names) - 1) / 2) * width for a in arm_list]
        ys = [groups[name].get(a, 0.0) for a in arm_list]
        ax.bar(xs, ys, width=width, label=name)
    ax.set_xticks(arm_list)
    ax.set_xlabel("arm")
    ax.set_ylabel("mean pulls at T")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    path = _save(fig, spec)
    return fig, path
