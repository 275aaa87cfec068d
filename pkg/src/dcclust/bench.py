"""Benchmark harness: paired restarts, ratio tables, and scaling sweeps.

A benchmark run solves the same model from ``restarts`` random starting
points, once per algorithm, with every algorithm given the identical start
for a given restart (the pairing is what makes per-run iteration and time
ratios meaningful).  Restart ``r`` draws its start from a fresh generator
seeded ``base_seed + r``, so any row can be reproduced in isolation.

Outputs are plain files: a long-format ``runs.csv`` with one row per
(restart, algorithm), a wide ``comparison.csv`` with per-restart ratios
against the plain-descent baseline, and a ``summary.json`` of aggregates.
"""

from __future__ import annotations

import csv
import hashlib
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .solver import (LineSearchParams, NumericalFailure, PenaltySchedule,
                     SolveReport, StopRule, bdca_solve, dca_solve)

BASELINE = "dca"
KNOWN_ALGORITHMS = ("dca", "bdca", "bdca_adaptive")


def resolve_linesearch(algorithm: str, base: LineSearchParams) -> LineSearchParams | None:
    """Line-search parameters for an algorithm name; None means plain descent."""
    if algorithm == "dca":
        return None
    if algorithm == "bdca":
        return LineSearchParams(alpha=base.alpha, beta=base.beta, lambda_bar=base.lambda_bar,
                                adaptive=False, gamma=base.gamma, lambda_floor=base.lambda_floor)
    if algorithm == "bdca_adaptive":
        return LineSearchParams(alpha=base.alpha, beta=base.beta, lambda_bar=base.lambda_bar,
                                adaptive=True, gamma=base.gamma, lambda_floor=base.lambda_floor)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {KNOWN_ALGORITHMS}")


def solve_with(model, algorithm: str, X0: np.ndarray, schedule: PenaltySchedule,
               stop: StopRule, linesearch: LineSearchParams,
               collect_trace: bool = False) -> SolveReport:
    ls = resolve_linesearch(algorithm, linesearch)
    if ls is None:
        return dca_solve(model, X0, schedule=schedule, stop=stop, collect_trace=collect_trace)
    return bdca_solve(model, X0, schedule=schedule, stop=stop, linesearch=ls,
                      collect_trace=collect_trace)


@dataclass
class RunRecord:
    """One solve inside a benchmark."""

    run_id: int
    seed: int
    algorithm: str
    status: str                    # "ok" or "failed"
    iterations: int | None
    wall_time_s: float | None
    cost: float | None
    stages: int | None
    termination: str | None
    start_hash: str
    centers: np.ndarray | None


def start_fingerprint(X0: np.ndarray) -> str:
    return hashlib.sha1(np.ascontiguousarray(X0).tobytes()).hexdigest()[:12]


def _run_one_restart(model, algorithms, run_id: int, seed: int,
                     schedule, stop, linesearch) -> list[RunRecord]:
    rng = np.random.default_rng(seed)
    X0 = model.initial_centers(rng)
    fp = start_fingerprint(X0)
    records = []
    for algorithm in algorithms:
        X_start = X0.copy()
        t0 = time.perf_counter()
        try:
            report = solve_with(model, algorithm, X_start, schedule, stop, linesearch)
            wall = time.perf_counter() - t0
            records.append(RunRecord(run_id, seed, algorithm, "ok",
                                     report.iterations_total, wall, report.cost,
                                     len(report.stage_taus), report.termination.value,
                                     fp, report.X))
        except NumericalFailure:
            wall = time.perf_counter() - t0
            records.append(RunRecord(run_id, seed, algorithm, "failed",
                                     None, wall, None, None, None, fp, None))
    if any(rec.start_hash != fp for rec in records):
        raise AssertionError("paired restarts diverged on their starting point")
    return records


def run_experiment(model, algorithms, restarts: int, base_seed: int,
                   schedule: PenaltySchedule = PenaltySchedule(),
                   stop: StopRule = StopRule(),
                   linesearch: LineSearchParams = LineSearchParams(),
                   threads: int = 1) -> list[RunRecord]:
    """Paired multi-start benchmark; returns records sorted by (run, algorithm)."""
    algorithms = list(algorithms)
    if not algorithms:
        raise ValueError("need at least one algorithm")
    for a in algorithms:
        resolve_linesearch(a, linesearch)  # validate names up front
    if restarts < 1:
        raise ValueError("restarts must be positive")

    def job(r: int) -> list[RunRecord]:
        return _run_one_restart(model, algorithms, r, base_seed + r, schedule, stop, linesearch)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            nested = list(pool.map(job, range(restarts)))
    else:
        nested = [job(r) for r in range(restarts)]

    order = {a: i for i, a in enumerate(algorithms)}
    records = [rec for group in nested for rec in group]
    records.sort(key=lambda rec: (rec.run_id, order[rec.algorithm]))
    return records


# -- aggregation ---------------------------------------------------------------


def _ok(records, algorithm):
    return [r for r in records if r.algorithm == algorithm and r.status == "ok"]


def paired_ratios(records, algorithms) -> dict:
    """Per-restart baseline/algorithm ratios for iterations and wall time.

    Ratios above 1 mean the algorithm needed less than plain descent.
    Only restarts where both solves succeeded contribute.
    """
    if BASELINE not in algorithms:
        return {}
    base_by_run = {r.run_id: r for r in _ok(records, BASELINE)}
    out = {}
    for algorithm in algorithms:
        if algorithm == BASELINE:
            continue
        iter_ratios, time_ratios = [], []
        for rec in _ok(records, algorithm):
            base = base_by_run.get(rec.run_id)
            if base is None or not rec.iterations or not base.iterations:
                continue
            iter_ratios.append(base.iterations / rec.iterations)
            if rec.wall_time_s and rec.wall_time_s > 0.0:
                time_ratios.append(base.wall_time_s / rec.wall_time_s)
        key = f"{BASELINE}_over_{algorithm}"
        out[key] = {
            "n": len(iter_ratios),
            "iteration_ratio_median": statistics.median(iter_ratios) if iter_ratios else None,
            "iteration_ratio_mean": statistics.fmean(iter_ratios) if iter_ratios else None,
            "time_ratio_median": statistics.median(time_ratios) if time_ratios else None,
            "time_ratio_mean": statistics.fmean(time_ratios) if time_ratios else None,
        }
    return out


def summarize(records, algorithms) -> dict:
    """Aggregate statistics per algorithm plus paired ratios."""
    algorithms = list(algorithms)
    per_alg = {}
    for algorithm in algorithms:
        ok = _ok(records, algorithm)
        failed = [r for r in records if r.algorithm == algorithm and r.status == "failed"]
        entry = {"n_ok": len(ok), "n_failed": len(failed)}
        if ok:
            costs = [r.cost for r in ok]
            iters = [r.iterations for r in ok]
            times = [r.wall_time_s for r in ok]
            entry.update({
                "cost_mean": statistics.fmean(costs),
                "cost_median": statistics.median(costs),
                "cost_std": statistics.pstdev(costs) if len(costs) > 1 else 0.0,
                "iterations_mean": statistics.fmean(iters),
                "iterations_median": statistics.median(iters),
                "time_mean_s": statistics.fmean(times),
                "time_total_s": sum(times),
                "centers_mean": np.mean([r.centers for r in ok], axis=0).tolist(),
            })
        per_alg[algorithm] = entry
    return {
        "restarts": len({r.run_id for r in records}),
        "algorithms": per_alg,
        "ratios": paired_ratios(records, algorithms),
    }


# -- file output ---------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_runs_csv(path, records) -> None:
    """Long format: one row per (restart, algorithm)."""
    path = Path(path)
    k_d = next((r.centers.shape for r in records if r.centers is not None), None)
    center_cols = []
    if k_d is not None:
        center_cols = [f"center{l}_{j}" for l in range(k_d[0]) for j in range(k_d[1])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run_id", "seed", "algorithm", "status", "iterations",
                         "wall_time_s", "cost", "stages", "termination", "start_hash",
                         *center_cols])
        for r in records:
            flat = r.centers.ravel().tolist() if r.centers is not None else [None] * len(center_cols)
            writer.writerow([r.run_id, r.seed, r.algorithm, r.status, _fmt(r.iterations),
                             _fmt(r.wall_time_s), _fmt(r.cost), _fmt(r.stages),
                             _fmt(r.termination), r.start_hash, *map(_fmt, flat)])


def write_comparison_csv(path, records, algorithms) -> None:
    """Wide format: one row per restart with per-algorithm columns and ratios."""
    path = Path(path)
    algorithms = list(algorithms)
    by_run: dict[int, dict[str, RunRecord]] = {}
    for r in records:
        by_run.setdefault(r.run_id, {})[r.algorithm] = r

    ratio_algs = [a for a in algorithms if a != BASELINE] if BASELINE in algorithms else []
    header = ["run_id", "seed", "start_hash"]
    for a in algorithms:
        header += [f"{a}_iterations", f"{a}_time_s", f"{a}_cost"]
    for a in ratio_algs:
        header += [f"iteration_ratio_{BASELINE}_over_{a}", f"time_ratio_{BASELINE}_over_{a}"]

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for run_id in sorted(by_run):
            group = by_run[run_id]
            any_rec = next(iter(group.values()))
            row = [run_id, any_rec.seed, any_rec.start_hash]
            for a in algorithms:
                rec = group.get(a)
                if rec is None or rec.status != "ok":
                    row += ["", "", ""]
                else:
                    row += [_fmt(rec.iterations), _fmt(rec.wall_time_s), _fmt(rec.cost)]
            base = group.get(BASELINE)
            for a in ratio_algs:
                rec = group.get(a)
                if (base and rec and base.status == "ok" and rec.status == "ok"
                        and rec.iterations and base.iterations):
                    row.append(_fmt(base.iterations / rec.iterations))
                    row.append(_fmt(base.wall_time_s / rec.wall_time_s)
                               if rec.wall_time_s else "")
                else:
                    row += ["", ""]
            writer.writerow(row)


# -- scaling sweeps --------------------------------------------------------------


def _tile(base: list[float], dim: int) -> np.ndarray:
    reps = -(-dim // len(base))
    return np.array((base * reps)[:dim], dtype=float)


def scaling_point_instance(dim: int, n: int, seed: int):
    """Uniform cloud in [0, 10]^dim with three unit-ball center constraints."""
    from .clustering import ClusteringModel
    from .data_io import generate_points
    from .sets import Ball

    points = generate_points(n, dim, 0.0, 10.0, seed)
    anchors = [_tile([1.0, 5.0], dim), _tile([6.0, 4.0], dim), _tile([8.0], dim)]
    constraints = [[Ball(center=a, radius=1.0)] for a in anchors]
    return ClusteringModel(points, constraints)


_SET_ANCHOR_PAIRS = [
    ([1, 5, 5, 5, 5, 5, 5, 5, 5, 5], [2, 6, 5, 5, 5, 5, 5, 5, 5, 5]),
    ([5, 4, 1, 2, 3, 1, 2, 3, 1, 2], [4, 4, 1, 2, 3, 1, 2, 3, 1, 2]),
    ([8, 5, 9, 8, 7, 9, 8, 7, 9, 8], [8, 4, 9, 8, 7, 9, 8, 7, 9, 8]),
    ([9, 8, 1, 6, 9, 1, 6, 9, 1, 6], [8, 8, 1, 6, 9, 1, 6, 9, 1, 6]),
]


def scaling_set_instance(dim: int, n: int, seed: int, target_radius: float = 0.1):
    """Ball targets around a uniform cloud with four two-ball center constraints."""
    from .data_io import generate_points
    from .set_clustering import SetClusteringModel
    from .sets import Ball

    if dim > 10:
        raise ValueError("set scaling template defines constraints up to dimension 10")
    points = generate_points(n, dim, 0.0, 10.0, seed)
    targets = [Ball(center=p, radius=target_radius) for p in points]
    constraints = [
        [Ball(center=np.array(a, dtype=float)[:dim], radius=1.0),
         Ball(center=np.array(b, dtype=float)[:dim], radius=1.0)]
        for a, b in _SET_ANCHOR_PAIRS
    ]
    return SetClusteringModel(targets, constraints)


def run_scaling(kind: str, dims, sizes, restarts: int, base_seed: int,
                schedule: PenaltySchedule = PenaltySchedule(),
                stop: StopRule = StopRule(),
                linesearch: LineSearchParams = LineSearchParams(),
                algorithms=("dca", "bdca"), warmups: int = 1) -> list[dict]:
    """Sweep instance sizes and record mean effort per algorithm."""
    builders = {"clustering": scaling_point_instance, "set_clustering": scaling_set_instance}
    if kind not in builders:
        raise ValueError(f"unknown scaling kind {kind!r}; expected one of {sorted(builders)}")
    build = builders[kind]
    rows = []
    for dim in dims:
        for n in sizes:
            instance_seed = base_seed + 1000 * dim + n
            model = build(dim, n, instance_seed)
            warm_rng = np.random.default_rng(instance_seed)
            for _ in range(warmups):
                solve_with(model, "dca", model.initial_centers(warm_rng),
                           schedule, stop, linesearch)
            records = run_experiment(model, algorithms, restarts, instance_seed + 1,
                                     schedule=schedule, stop=stop, linesearch=linesearch)
            summary = summarize(records, algorithms)
            for algorithm in algorithms:
                entry = summary["algorithms"][algorithm]
                rows.append({
                    "model": kind, "dim": dim, "n": n, "algorithm": algorithm,
                    "restarts": restarts,
                    "n_ok": entry["n_ok"], "n_failed": entry["n_failed"],
                    "iterations_mean": entry.get("iterations_mean"),
                    "time_mean_s": entry.get("time_mean_s"),
                    "cost_mean": entry.get("cost_mean"),
                })
    return rows


def write_scaling_csv(path, rows) -> None:
    path = Path(path)
    header = ["model", "dim", "n", "algorithm", "restarts", "n_ok", "n_failed",
              "iterations_mean", "time_mean_s", "cost_mean"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in header])
