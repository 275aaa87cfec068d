#!/usr/bin/env python3
"""Scatter per-restart benchmark ratios with a dashed mean line per series.

Reads either of the two CSV files a benchmark run writes:

* ``comparison.csv`` (wide): uses the ``iteration_ratio_*`` /
  ``time_ratio_*`` columns directly, one series per column.
* ``runs.csv`` (long): pivots (run_id, algorithm) rows and computes
  baseline/algorithm ratios against the ``dca`` rows itself.

Usage::

    plot_ratios.py bench_out/comparison.csv -o ratios.png
    plot_ratios.py bench_out/runs.csv --metric time -o time_ratios.png
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

BASELINE = "dca"
METRIC_COLUMNS = {"iteration": "iterations", "time": "wall_time_s"}


def _parse_float(cell: str | None) -> float | None:
    if cell is None or cell == "":
        return None
    value = float(cell)
    return value if math.isfinite(value) else None


def _series_from_comparison(rows: list[dict], metric: str) -> dict[str, tuple[list[float], list[float]]]:
    prefix = f"{metric}_ratio_{BASELINE}_over_"
    labels = [c[len(prefix):] for c in rows[0] if c.startswith(prefix)]
    series: dict[str, tuple[list[float], list[float]]] = {}
    for label in labels:
        xs, ys = [], []
        for row in rows:
            value = _parse_float(row.get(prefix + label))
            if value is not None:
                xs.append(float(row["run_id"]))
                ys.append(value)
        series[label] = (xs, ys)
    return series


def _series_from_runs(rows: list[dict], metric: str) -> dict[str, tuple[list[float], list[float]]]:
    column = METRIC_COLUMNS[metric]
    by_run: dict[float, dict[str, float]] = {}
    algorithms: list[str] = []
    for row in rows:
        if row.get("status") not in (None, "ok"):
            continue
        value = _parse_float(row.get(column))
        if value is None:
            continue
        algorithm = row["algorithm"]
        if algorithm not in algorithms:
            algorithms.append(algorithm)
        by_run.setdefault(float(row["run_id"]), {})[algorithm] = value
    series: dict[str, tuple[list[float], list[float]]] = {}
    for algorithm in algorithms:
        if algorithm == BASELINE:
            continue
        xs, ys = [], []
        for run_id in sorted(by_run):
            group = by_run[run_id]
            if BASELINE in group and algorithm in group and group[algorithm] > 0.0:
                xs.append(run_id)
                ys.append(group[BASELINE] / group[algorithm])
        series[algorithm] = (xs, ys)
    return series


def load_ratio_series(path, metric: str = "iteration") -> dict[str, tuple[list[float], list[float]]]:
    """Ratio series keyed by algorithm label: (run ids, baseline/algorithm)."""
    if metric not in METRIC_COLUMNS:
        raise ValueError(f"metric must be one of {sorted(METRIC_COLUMNS)}")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    header = rows[0].keys()
    if any(c.startswith(f"{metric}_ratio_") for c in header):
        series = _series_from_comparison(rows, metric)
    elif "algorithm" in header:
        series = _series_from_runs(rows, metric)
    else:
        raise ValueError(f"{path}: neither ratio columns nor (run_id, algorithm) rows found")
    series = {label: (xs, ys) for label, (xs, ys) in series.items() if ys}
    if not series:
        raise ValueError(f"{path}: no usable {metric} ratios")
    return series


def build_figure(series: dict[str, tuple[list[float], list[float]]], metric: str = "iteration"):
    """Scatter each series and draw a dashed horizontal line at its mean.

    Returns ``(fig, ax, mean_lines)`` where ``mean_lines[label]`` is the
    Line2D of that series' mean, so callers can read its y-data back.
    """
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    mean_lines = {}
    for idx, (label, (xs, ys)) in enumerate(series.items()):
        color = f"C{idx}"
        mean = sum(ys) / len(ys)
        ax.scatter(xs, ys, s=14, alpha=0.7, color=color,
                   label=f"{BASELINE}/{label} (mean {mean:.2f})")
        mean_lines[label] = ax.axhline(mean, color=color, linestyle="--", linewidth=1.2)
    ax.axhline(1.0, color="gray", linewidth=0.8)
    ax.set_xlabel("restart")
    ax.set_ylabel(f"{metric} ratio vs {BASELINE}")
    ax.set_title(f"Per-restart {metric} ratios ({BASELINE} / algorithm)")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig, ax, mean_lines


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="comparison.csv or runs.csv from a benchmark")
    parser.add_argument("-o", "--out", default="ratios.png", help="output image path")
    parser.add_argument("--metric", choices=sorted(METRIC_COLUMNS), default="iteration")
    args = parser.parse_args(argv)

    try:
        series = load_ratio_series(args.csv, args.metric)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig, _, _ = build_figure(series, args.metric)
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    print(f"wrote {Path(args.out)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
