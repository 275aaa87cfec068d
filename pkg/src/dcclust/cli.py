"""Command-line interface.

Subcommands:

* ``solve``    one solve of a configured model, report to stdout and JSON
* ``bench``    paired multi-start benchmark writing runs.csv, comparison.csv, summary.json
* ``scaling``  instance-size sweep writing scaling.csv
* ``generate`` synthetic datasets (uniform points, synthetic city tables)

Exit codes: 0 on success, 1 when a solve fails numerically (or every
benchmark run fails), 2 for usage, file, or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__, bench, data_io
from .clustering import ClusteringModel
from .set_clustering import SetClusteringModel
from .sets import Ball, WholeSpace, from_spec, to_spec
from .solver import LineSearchParams, NumericalFailure, PenaltySchedule, StopRule

log = logging.getLogger("dcclust")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class ConfigError(ValueError):
    """A configuration file is missing, malformed, or inconsistent."""


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return cfg


def _section(cfg: dict, name: str) -> dict:
    value = cfg.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"config section {name!r} must be a mapping")
    return value


def build_solver_options(cfg: dict) -> tuple[PenaltySchedule, StopRule, LineSearchParams]:
    s = _section(cfg, "solver")
    try:
        schedule = PenaltySchedule(tau0=float(s.get("tau0", 1.0)),
                                   sigma=float(s.get("sigma", 10.0)),
                                   tau_final=float(s.get("tau_final", 1e8)))
        stop = StopRule(step_tol=float(s.get("step_tol", 1e-6)),
                        max_inner=int(s.get("max_inner", 10000)),
                        max_total=int(s.get("max_total", 1_000_000)))
        linesearch = LineSearchParams(alpha=float(s.get("alpha", 0.05)),
                                      beta=float(s.get("beta", 0.1)),
                                      lambda_bar=float(s.get("lambda_bar", 2.0)),
                                      gamma=float(s.get("gamma", 2.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver settings: {exc}") from exc
    return schedule, stop, linesearch


def _build_constraints(cfg: dict):
    spec = cfg.get("constraints")
    if spec is None:
        return None
    if not isinstance(spec, list) or not all(isinstance(group, list) for group in spec):
        raise ConfigError("'constraints' must be a list of per-center lists of set specs")
    try:
        return [[from_spec(s) for s in group] for group in spec]
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad constraint spec: {exc}") from exc


def build_model(cfg: dict):
    """Instantiate the configured model; returns (model, model_kind, data_echo)."""
    kind = cfg.get("model")
    if kind not in ("clustering", "set_clustering"):
        raise ConfigError("config key 'model' must be 'clustering' or 'set_clustering'")
    data = _section(cfg, "data")
    dkind = data.get("kind")
    constraints = _build_constraints(cfg)
    k = cfg.get("k")

    try:
        if kind == "clustering":
            if dkind == "tsplib":
                points = data_io.load_tsplib(data["path"])
            elif dkind == "points_csv":
                points = data_io.load_points_csv(data["path"])
            elif dkind == "uniform":
                points = data_io.generate_points(int(data["n"]), int(data["dim"]),
                                                 float(data.get("low", 0.0)),
                                                 float(data.get("high", 10.0)),
                                                 int(data.get("seed", 0)))
            else:
                raise ConfigError(
                    "data.kind for a clustering model must be tsplib, points_csv, or uniform")
            model = ClusteringModel(points, constraints, k=k)
        else:
            if dkind == "cities_csv":
                table = data_io.load_cities_csv(data["path"],
                                                radius_scale=float(data.get("radius_scale", 0.1)))
                targets = [Ball(center=c, radius=r) for c, r in zip(table.centers, table.radii)]
            elif dkind == "uniform_balls":
                points = data_io.generate_points(int(data["n"]), int(data["dim"]),
                                                 float(data.get("low", 0.0)),
                                                 float(data.get("high", 10.0)),
                                                 int(data.get("seed", 0)))
                radius = float(data.get("target_radius", 0.1))
                targets = [Ball(center=p, radius=radius) for p in points]
            else:
                raise ConfigError(
                    "data.kind for a set_clustering model must be cities_csv or uniform_balls")
            model = SetClusteringModel(targets, constraints, k=k)
    except KeyError as exc:
        raise ConfigError(f"data section is missing key {exc}") from exc
    except (ValueError, OSError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return model, kind, dict(data)


def _constraints_echo(cfg: dict, model) -> list:
    spec = cfg.get("constraints")
    if spec is not None:
        return spec
    return [[to_spec(s) for s in group if not isinstance(s, WholeSpace)]
            for group in model.sets]


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    model, kind, data_echo = build_model(cfg)
    schedule, stop, linesearch = build_solver_options(cfg)
    algorithm = args.algorithm or _section(cfg, "solver").get("algorithm", "dca")

    rng = np.random.default_rng(args.seed)
    X0 = model.initial_centers(rng)
    log.info("solving %s model with %s from seed %d", kind, algorithm, args.seed)
    report = bench.solve_with(model, algorithm, X0, schedule, stop, linesearch)

    print(f"cost: {report.cost:.5f}")
    print("centers:")
    for row in report.X:
        print("  " + "  ".join(f"{v:.5f}" for v in row))
    log.info("%d iterations over %d stages, termination %s",
             report.iterations_total, len(report.stage_taus), report.termination.value)

    if args.out:
        payload = {
            "model": kind,
            "algorithm": algorithm,
            "k": model.k,
            "seed": args.seed,
            "cost": report.cost,
            "centers": report.X.tolist(),
            "iterations_total": report.iterations_total,
            "termination": report.termination.value,
            "stages": [
                {"tau": tau, "iterations": it, "termination": term.value}
                for tau, it, term in zip(report.stage_taus, report.iterations_by_stage,
                                         report.stage_terminations)
            ],
            "max_constraint_distance": model.max_constraint_distance(report.X),
            "constraints": _constraints_echo(cfg, model),
            "data": data_echo,
        }
        data_io.write_report(args.out, payload)
        log.info("report written to %s", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = load_config(args.config)
    model, kind, data_echo = build_model(cfg)
    schedule, stop, linesearch = build_solver_options(cfg)
    b = _section(cfg, "bench")
    algorithms = b.get("algorithms", ["dca", "bdca"])
    restarts = int(b.get("restarts", 10))
    base_seed = args.seed if args.seed is not None else int(b.get("base_seed", 0))
    threads = args.threads if args.threads is not None else int(b.get("threads", 1))

    log.info("benchmark: %d restarts of %s on a %s model", restarts, algorithms, kind)
    records = bench.run_experiment(model, algorithms, restarts, base_seed,
                                   schedule=schedule, stop=stop, linesearch=linesearch,
                                   threads=threads)
    summary = summarize_with_config(records, algorithms, cfg, base_seed)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    bench.write_runs_csv(outdir / "runs.csv", records)
    bench.write_comparison_csv(outdir / "comparison.csv", records, algorithms)
    data_io.write_report(outdir / "summary.json", summary)

    for algorithm in algorithms:
        entry = summary["algorithms"][algorithm]
        if entry["n_ok"]:
            print(f"{algorithm}: mean cost {entry['cost_mean']:.5f}, "
                  f"mean iterations {entry['iterations_mean']:.1f}, "
                  f"ok {entry['n_ok']}/{entry['n_ok'] + entry['n_failed']}")
        else:
            print(f"{algorithm}: all {entry['n_failed']} runs failed")
    for key, ratios in summary["ratios"].items():
        if ratios["iteration_ratio_median"] is not None:
            print(f"{key}: median iteration ratio {ratios['iteration_ratio_median']:.2f}, "
                  f"median time ratio {ratios['time_ratio_median']:.2f}")
    print(f"wrote {outdir / 'runs.csv'}, {outdir / 'comparison.csv'}, {outdir / 'summary.json'}")

    if all(entry["n_ok"] == 0 for entry in summary["algorithms"].values()):
        log.error("every run failed")
        return EXIT_RUNTIME
    return EXIT_OK


def summarize_with_config(records, algorithms, cfg, base_seed) -> dict:
    summary = bench.summarize(records, algorithms)
    summary["base_seed"] = base_seed
    summary["config"] = cfg
    return summary


def cmd_scaling(args) -> int:
    cfg = load_config(args.config)
    schedule, stop, linesearch = build_solver_options(cfg)
    sc = _section(cfg, "scaling")
    kind = sc.get("kind")
    if kind is None:
        raise ConfigError("scaling config needs scaling.kind (clustering or set_clustering)")
    dims = sc.get("dims", [2])
    sizes = sc.get("sizes", [50])
    restarts = int(sc.get("restarts", 3))
    warmups = int(sc.get("warmups", 1))
    algorithms = sc.get("algorithms", ["dca", "bdca"])
    base_seed = args.seed if args.seed is not None else int(sc.get("base_seed", 0))

    log.info("scaling sweep: %s over dims %s and sizes %s", kind, dims, sizes)
    rows = bench.run_scaling(kind, dims, sizes, restarts, base_seed,
                             schedule=schedule, stop=stop, linesearch=linesearch,
                             algorithms=algorithms, warmups=warmups)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    bench.write_scaling_csv(outdir / "scaling.csv", rows)
    for row in rows:
        print(f"dim {row['dim']:>3} n {row['n']:>6} {row['algorithm']:>14}: "
              f"mean iterations {row['iterations_mean']:.1f}, mean time {row['time_mean_s']:.4f}s")
    print(f"wrote {outdir / 'scaling.csv'}")
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.dataset == "points":
        X = data_io.generate_points(args.n, args.dim, args.low, args.high, args.seed)
        data_io.save_points_csv(args.out, X)
    else:
        names, lats, lons, areas = data_io.generate_synthetic_cities(args.n, args.seed)
        data_io.save_cities_csv(args.out, names, lats, lons, areas)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcclust",
        description="Constrained clustering and set clustering by difference-of-convex descent.",
        epilog="Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.")
    parser.add_argument("--version", action="version", version=f"dcclust {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one solve from a config file")
    p_solve.add_argument("--config", required=True, help="YAML model and solver configuration")
    p_solve.add_argument("--algorithm", choices=bench.KNOWN_ALGORITHMS,
                         help="override the configured algorithm")
    p_solve.add_argument("--seed", type=int, default=0, help="seed for the starting point")
    p_solve.add_argument("--out", help="write a JSON report here")
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="paired multi-start benchmark")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--out", default="bench_out", help="output directory")
    p_bench.add_argument("--seed", type=int, help="override bench.base_seed")
    p_bench.add_argument("--threads", type=int, help="worker threads for restarts")
    p_bench.set_defaults(func=cmd_bench)

    p_scale = sub.add_parser("scaling", help="instance-size sweep")
    p_scale.add_argument("--config", required=True)
    p_scale.add_argument("--out", default="scaling_out", help="output directory")
    p_scale.add_argument("--seed", type=int, help="override scaling.base_seed")
    p_scale.set_defaults(func=cmd_scaling)

    p_gen = sub.add_parser("generate", help="write synthetic datasets")
    gen_sub = p_gen.add_subparsers(dest="dataset", required=True)
    g_points = gen_sub.add_parser("points", help="uniform points in a cube")
    g_points.add_argument("--n", type=int, required=True)
    g_points.add_argument("--dim", type=int, default=2)
    g_points.add_argument("--low", type=float, default=0.0)
    g_points.add_argument("--high", type=float, default=10.0)
    g_points.add_argument("--seed", type=int, default=0)
    g_points.add_argument("--out", required=True)
    g_points.set_defaults(func=cmd_generate)
    g_cities = gen_sub.add_parser("cities", help="synthetic city table")
    g_cities.add_argument("--n", type=int, required=True)
    g_cities.add_argument("--seed", type=int, default=0)
    g_cities.add_argument("--out", required=True)
    g_cities.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except NumericalFailure as exc:
        log.error("solve failed: %s", exc)
        print(f"error: solve failed numerically: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
