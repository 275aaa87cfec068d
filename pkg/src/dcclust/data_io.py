"""Dataset loading, synthetic data generation, and report files.

Formats handled here:

* TSPLIB-style point files (``NODE_COORD_SECTION`` with ``id x y`` rows).
* City tables: CSV with columns ``name, lat, lon, area_sq_mi``.  Each city
  becomes a disk target whose radius is ``radius_scale * sqrt(area / pi)``,
  so the disk covers the city's land area at the chosen scale.  Center
  coordinates are returned in (lon, lat) order to match the plotting plane.
* Raw point CSVs (header ``x0..x{d-1}``) written with round-trip precision.
* Solve reports as JSON.

All random generation goes through :func:`numpy.random.default_rng` seeded
explicitly, so every artifact is reproducible from its recorded seed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class CityTable:
    """A loaded city dataset: names, (lon, lat) centers, areas, disk radii."""

    names: list[str]
    centers: np.ndarray  # (m, 2), columns (lon, lat)
    areas: np.ndarray    # (m,) land areas
    radii: np.ndarray    # (m,) target disk radii


def load_tsplib(path) -> np.ndarray:
    """Read the node coordinates of a TSPLIB file into an (n, 2) array."""
    path = Path(path)
    points: list[tuple[float, float]] = []
    dimension = None
    in_coords = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            upper = line.upper()
            if in_coords:
                if upper == "EOF":
                    in_coords = False
                    break
                parts = line.split()
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 'id x y', got {line!r}")
                try:
                    points.append((float(parts[1]), float(parts[2])))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric coordinate in {line!r}") from None
            elif upper.startswith("DIMENSION"):
                _, _, value = line.partition(":")
                try:
                    dimension = int(value.strip())
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad DIMENSION value {value.strip()!r}") from None
            elif upper.startswith("NODE_COORD_SECTION"):
                in_coords = True
    if not points:
        raise ValueError(f"{path}: no NODE_COORD_SECTION entries found")
    if dimension is not None and len(points) != dimension:
        raise ValueError(f"{path}: DIMENSION is {dimension} but {len(points)} coordinates were read")
    return np.array(points, dtype=float)


_CITY_COLUMNS = ("name", "lat", "lon", "area_sq_mi")


def load_cities_csv(path, radius_scale: float = 0.1) -> CityTable:
    """Load a city table and derive target disk radii from land areas."""
    path = Path(path)
    if radius_scale <= 0.0:
        raise ValueError("radius_scale must be positive")
    names: list[str] = []
    rows: list[tuple[float, float, float]] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in _CITY_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}; header is {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                lat, lon, area = float(row["lat"]), float(row["lon"]), float(row["area_sq_mi"])
            except (TypeError, ValueError):
                raise ValueError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
            if area <= 0.0:
                raise ValueError(f"{path}:{lineno}: area must be positive, got {area}")
            names.append(row["name"])
            rows.append((lon, lat, area))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    arr = np.array(rows, dtype=float)
    centers = arr[:, :2]
    areas = arr[:, 2]
    radii = radius_scale * np.sqrt(areas / np.pi)
    return CityTable(names=names, centers=centers, areas=areas, radii=radii)


def save_cities_csv(path, names, lats, lons, areas) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CITY_COLUMNS)
        for name, lat, lon, area in zip(names, lats, lons, areas):
            writer.writerow([name, repr(float(lat)), repr(float(lon)), repr(float(area))])


def generate_points(n: int, dim: int, low: float = 0.0, high: float = 10.0,
                    seed: int = 0) -> np.ndarray:
    """Uniform points in a cube, reproducible from the seed."""
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be positive")
    if not low < high:
        raise ValueError("low must be less than high")
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=(n, dim))


def generate_synthetic_cities(n: int, seed: int = 0):
    """A synthetic city table over a continental-scale lon/lat window.

    Rows cluster around a fixed set of anchor locations with a uniform
    background mix; areas are lognormal.  Purely synthetic stand-in data
    for large benchmark runs, deterministic in the seed.  Returns
    ``(names, lats, lons, areas)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    anchors = np.array([
        (40.7, -74.0), (34.1, -118.3), (41.9, -87.7), (29.8, -95.4),
        (33.4, -112.1), (39.9, -75.2), (32.8, -96.8), (37.7, -122.4),
        (47.6, -122.3), (39.7, -105.0), (33.7, -84.4), (25.8, -80.2),
        (44.9, -93.3), (36.2, -86.8), (39.1, -94.6), (40.4, -111.9),
    ])
    lat_lo, lat_hi = 26.0, 49.0
    lon_lo, lon_hi = -124.0, -68.0

    pick = rng.uniform(size=n) < 0.75
    idx = rng.integers(0, len(anchors), size=n)
    lats = np.where(pick,
                    anchors[idx, 0] + rng.normal(0.0, 1.2, size=n),
                    rng.uniform(lat_lo, lat_hi, size=n))
    lons = np.where(pick,
                    anchors[idx, 1] + rng.normal(0.0, 1.6, size=n),
                    rng.uniform(lon_lo, lon_hi, size=n))
    lats = np.clip(lats, lat_lo, lat_hi)
    lons = np.clip(lons, lon_lo, lon_hi)
    areas = np.clip(rng.lognormal(np.log(120.0), 0.7, size=n), 15.0, 800.0)
    names = [f"city_{i + 1:04d}" for i in range(n)]
    return names, lats, lons, areas


def save_points_csv(path, X: np.ndarray) -> None:
    """Write points with full round-trip precision."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    header = ",".join(f"x{j}" for j in range(X.shape[1]))
    np.savetxt(path, X, fmt="%.17g", delimiter=",", header=header, comments="")


def load_points_csv(path) -> np.ndarray:
    path = Path(path)
    try:
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{path}: could not parse point rows ({exc})") from None


def write_report(path, payload: dict) -> None:
    """Serialize a report dict to JSON (floats keep round-trip precision)."""
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def read_report(path) -> dict:
    with open(Path(path)) as fh:
        return json.load(fh)
