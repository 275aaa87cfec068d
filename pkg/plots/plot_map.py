#!/usr/bin/env python3
"""Draw a city dataset, its constraint regions, and solved centers.

Inputs are the files the solver CLI writes, nothing else:

* a city table CSV (``name,lat,lon,area_sq_mi``) - each city is drawn as a
  disk of radius ``radius_scale * sqrt(area / pi)`` at ``(lon, lat)``,
* a solve report JSON - supplies the centers, the constraint set specs
  (balls as dashed circles, boxes as dashed rectangles, halfspaces as their
  boundary line), and the ``radius_scale`` actually used for the solve.

Usage::

    plot_map.py data/us_cities_50_2014.csv report.json -o map.png
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib import patches


def load_city_rows(path) -> list[dict]:
    """City rows as dicts with name/lon/lat/area floats."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"name", "lat", "lon", "area_sq_mi"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            out.append({
                "name": row["name"],
                "lon": float(row["lon"]),
                "lat": float(row["lat"]),
                "area": float(row["area_sq_mi"]),
            })
    if not out:
        raise ValueError(f"{path}: no data rows")
    return out


def _draw_constraint(ax, spec: dict, color: str) -> None:
    kind = spec.get("type")
    if kind == "ball":
        ax.add_patch(patches.Circle(tuple(spec["center"]), spec["radius"],
                                    fill=False, color=color, linestyle="--", linewidth=1.2))
    elif kind == "box":
        lo, hi = spec["lower"], spec["upper"]
        ax.add_patch(patches.Rectangle(tuple(lo), hi[0] - lo[0], hi[1] - lo[1],
                                       fill=False, color=color, linestyle="--", linewidth=1.2))
    elif kind == "halfspace":
        a, b = spec["normal"], float(spec["offset"])
        x0, x1 = ax.get_xlim()
        y0, y1 = ax.get_ylim()
        if abs(a[1]) > abs(a[0]):  # wide line: y as a function of x
            xs = [x0, x1]
            ys = [(b - a[0] * x) / a[1] for x in xs]
        else:
            ys = [y0, y1]
            xs = [(b - a[1] * y) / a[0] for y in ys]
        ax.plot(xs, ys, color=color, linestyle="--", linewidth=1.2)
    # whole_space constrains nothing; draw nothing


def build_figure(cities: list[dict], report: dict):
    """Returns ``(fig, ax)`` with city disks, constraints, and centers drawn."""
    radius_scale = float(report.get("data", {}).get("radius_scale", 0.1))
    fig, ax = plt.subplots(figsize=(9.0, 6.0))

    for city in cities:
        radius = radius_scale * math.sqrt(city["area"] / math.pi)
        ax.add_patch(patches.Circle((city["lon"], city["lat"]), radius,
                                    color="steelblue", alpha=0.45, linewidth=0))

    lons = [c["lon"] for c in cities]
    lats = [c["lat"] for c in cities]
    pad = 2.0
    ax.set_xlim(min(lons) - pad, max(lons) + pad)
    ax.set_ylim(min(lats) - pad, max(lats) + pad)

    for l, group in enumerate(report.get("constraints", [])):
        for spec in group:
            _draw_constraint(ax, spec, color=f"C{l % 10}")

    centers = report.get("centers", [])
    for l, center in enumerate(centers):
        ax.plot(center[0], center[1], marker="x", markersize=11, markeredgewidth=2.5,
                color=f"C{l % 10}", linestyle="none",
                label=f"center {l} ({center[0]:.2f}, {center[1]:.2f})")

    ax.set_xlabel("longitude")
    ax.set_ylabel("latitude")
    ax.set_aspect("equal", adjustable="box")
    cost = report.get("cost")
    title = "City disks, constraint regions, solved centers"
    if cost is not None:
        title += f" (cost {cost:.2f})"
    ax.set_title(title)
    if centers:
        ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig, ax


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("cities_csv", help="city table the solve used")
    parser.add_argument("report_json", help="JSON report written by `solve --out`")
    parser.add_argument("-o", "--out", default="map.png", help="output image path")
    args = parser.parse_args(argv)

    try:
        cities = load_city_rows(args.cities_csv)
        with open(args.report_json) as fh:
            report = json.load(fh)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig, _ = build_figure(cities, report)
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    print(f"wrote {Path(args.out)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
