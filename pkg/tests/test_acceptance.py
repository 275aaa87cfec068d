"""Acceptance gate: one test per shipped guarantee of the solver suite.

Each test prints a single PASS/FAIL line with the quantities it measured,
then asserts.  Every expected number here is pinned with its tolerance;
nothing is computed from the code under test.
"""

from __future__ import annotations

import time

import numpy as np
import scipy.optimize

from dcclust import ClusteringModel, SetClusteringModel
from dcclust.bench import paired_ratios, run_experiment, scaling_point_instance, summarize
from dcclust.cli import build_model, build_solver_options, load_config
from dcclust.solver import (
    LineSearchParams,
    PenaltySchedule,
    bdca_solve,
    dca_solve,
    descent_violations,
)

from helpers import random_centers, random_point_model, random_set_model

ALGS = ("dca", "bdca", "bdca_adaptive")

# 76-point benchmark, two centers, 100 paired restarts.
TSP76_COST_TARGET = 33576.253
TSP76_COST_TOL = 0.01
TSP76_CENTERS_TARGET = np.array([[26.6996, 57.9713], [41.0691, 23.4880]])
TSP76_CENTERS_TOL = 0.005
TSP76_TIME_LIMIT_S = 5.0

# 50-city disk-target benchmark, three centers, 100 paired restarts.
CITIES50_COST_TARGET = 2271.07
CITIES50_COST_TOL = 1.0
CITIES50_TIME_LIMIT_S = 30.0


def check(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_tsp76_means_and_speed(configs_dir):
    cfg = load_config(configs_dir / "eil76.yaml")
    model, _, _ = build_model(cfg)
    schedule, stop, linesearch = build_solver_options(cfg)
    assert linesearch.lambda_bar == 1.0  # this benchmark runs with trial step 1

    t0 = time.perf_counter()
    records = run_experiment(model, ["dca", "bdca"], restarts=100, base_seed=100,
                             schedule=schedule, stop=stop, linesearch=linesearch)
    elapsed = time.perf_counter() - t0
    summary = summarize(records, ["dca", "bdca"])

    cost_errs = {a: abs(summary["algorithms"][a]["cost_mean"] - TSP76_COST_TARGET)
                 for a in ("dca", "bdca")}
    center_errs = {a: float(np.max(np.abs(np.asarray(summary["algorithms"][a]["centers_mean"])
                                          - TSP76_CENTERS_TARGET)))
                   for a in ("dca", "bdca")}
    ok = (all(summary["algorithms"][a]["n_ok"] == 100 for a in ("dca", "bdca"))
          and all(e <= TSP76_COST_TOL for e in cost_errs.values())
          and all(e <= TSP76_CENTERS_TOL for e in center_errs.values())
          and elapsed < TSP76_TIME_LIMIT_S)
    check("criterion 1 (76-point benchmark)", ok,
          f"mean cost dca={summary['algorithms']['dca']['cost_mean']:.5f} "
          f"bdca={summary['algorithms']['bdca']['cost_mean']:.5f} "
          f"(target {TSP76_COST_TARGET} +/- {TSP76_COST_TOL}), "
          f"max center error {max(center_errs.values()):.5f} (tol {TSP76_CENTERS_TOL}), "
          f"{elapsed:.2f}s of {TSP76_TIME_LIMIT_S}s for 200 solves")


def test_criterion_2_city_disk_benchmark(configs_dir):
    cfg = load_config(configs_dir / "cities50_bench.yaml")
    model, _, _ = build_model(cfg)
    schedule, stop, linesearch = build_solver_options(cfg)
    algorithms = cfg["bench"]["algorithms"]
    assert list(algorithms) == list(ALGS)

    t0 = time.perf_counter()
    records = run_experiment(model, algorithms, restarts=100,
                             base_seed=int(cfg["bench"]["base_seed"]),
                             schedule=schedule, stop=stop, linesearch=linesearch)
    elapsed = time.perf_counter() - t0
    summary = summarize(records, algorithms)

    means = {a: summary["algorithms"][a]["cost_mean"] for a in algorithms}
    errs = {a: abs(m - CITIES50_COST_TARGET) for a, m in means.items()}
    ok = (all(summary["algorithms"][a]["n_ok"] == 100 for a in algorithms)
          and all(e <= CITIES50_COST_TOL for e in errs.values())
          and elapsed < CITIES50_TIME_LIMIT_S)
    check("criterion 2 (50-city disk benchmark)", ok,
          "mean cost " + " ".join(f"{a}={means[a]:.5f}" for a in algorithms)
          + f" (target {CITIES50_COST_TARGET} +/- {CITIES50_COST_TOL}), "
          f"{elapsed:.2f}s of {CITIES50_TIME_LIMIT_S}s for 300 solves")


def test_criterion_3_linesearch_iteration_advantage():
    model = scaling_point_instance(dim=2, n=1000, seed=42)
    t0 = time.perf_counter()
    records = run_experiment(model, list(ALGS), restarts=100, base_seed=4242)
    elapsed = time.perf_counter() - t0
    ratios = paired_ratios(records, list(ALGS))

    med_bdca = ratios["dca_over_bdca"]["iteration_ratio_median"]
    med_adaptive = ratios["dca_over_bdca_adaptive"]["iteration_ratio_median"]
    ok = (ratios["dca_over_bdca"]["n"] == 100
          and med_bdca >= 2.0
          and med_adaptive >= med_bdca)
    check("criterion 3 (line-search advantage)", ok,
          f"median iteration ratio dca/bdca={med_bdca:.2f} (need >= 2.0), "
          f"dca/bdca_adaptive={med_adaptive:.2f} (need >= dca/bdca), "
          f"{elapsed:.1f}s for 300 solves")


def test_criterion_4_monotone_descent():
    rng = np.random.default_rng(44)
    worst = 0.0
    violations = 0
    for i in range(200):
        if i % 2 == 0:
            model = random_point_model(rng, n=int(rng.integers(5, 15)))
        else:
            model = random_set_model(rng, m=int(rng.integers(3, 10)))
        X0 = model.initial_centers(rng)
        algorithm = ALGS[i % 3]
        if algorithm == "dca":
            report = dca_solve(model, X0, collect_trace=True)
        else:
            ls = LineSearchParams(adaptive=(algorithm == "bdca_adaptive"))
            report = bdca_solve(model, X0, linesearch=ls, collect_trace=True)
        bad = descent_violations(report, rel_tol=1e-9)
        violations += len(bad)
        for prev, cur in bad:
            worst = max(worst, cur.cost - prev.cost)
    ok = violations == 0
    check("criterion 4 (monotone descent)", ok,
          f"0 required, found {violations} objective increases over 200 solves "
          f"(worst jump {worst:.3e}, rel tol 1e-9)")


def test_criterion_5_zero_trial_step_collapses_to_plain_descent():
    rng = np.random.default_rng(55)
    mismatches = []
    for i in range(50):
        model = (random_point_model(rng, n=int(rng.integers(5, 15))) if i % 2 == 0
                 else random_set_model(rng, m=int(rng.integers(3, 10))))
        X0 = model.initial_centers(rng)
        plain = dca_solve(model, X0.copy())
        boosted = bdca_solve(model, X0.copy(), linesearch=LineSearchParams(lambda_bar=0.0))
        same = (np.array_equal(plain.X, boosted.X)
                and plain.iterations_total == boosted.iterations_total
                and plain.cost == boosted.cost)
        if not same:
            mismatches.append(i)
    ok = not mismatches
    check("criterion 5 (zero trial step coincidence)", ok,
          f"bit-identical iterates, counts, and costs on 50/50 instances required; "
          f"mismatches at {mismatches or 'none'}")


def _surrogate_gap(model, rng) -> float:
    X = random_centers(rng, model.k, model.d)
    tau = float(rng.choice([1.0, 10.0, 100.0]))
    V = model.subgrad_h(X, tau)
    shape = X.shape

    def fun(z):
        Z = z.reshape(shape)
        return model.eval_g_h(Z, tau)[0] - float(np.sum(V * Z))

    def jac(z):
        Z = z.reshape(shape)
        return (model.grad_g(Z, tau) - V).ravel()

    res = scipy.optimize.minimize(fun, X.ravel(), jac=jac, method="BFGS",
                                  options={"gtol": 1e-12, "maxiter": 500})
    return float(np.max(np.abs(model.dca_point(X, tau).ravel() - res.x)))


def test_criterion_6_surrogate_minimizer_matches_oracle():
    rng = np.random.default_rng(66)
    worst_point = max(_surrogate_gap(random_point_model(rng), rng) for _ in range(50))
    worst_set = max(_surrogate_gap(random_set_model(rng), rng) for _ in range(50))
    ok = worst_point <= 1e-6 and worst_set <= 1e-6
    check("criterion 6 (closed-form surrogate minimizer)", ok,
          f"max |closed form - optimizer| = {worst_point:.2e} (points), "
          f"{worst_set:.2e} (set targets); tol 1e-6 over 50 instances each")


def test_criterion_7_analytic_identities():
    rng = np.random.default_rng(77)
    n_cases = 120
    worst_split = worst_grad = worst_phi = worst_proj = 0.0

    for i in range(n_cases):
        model = random_point_model(rng) if i % 2 == 0 else random_set_model(rng)
        X = random_centers(rng, model.k, model.d)
        tau = float(rng.choice([1.0, 10.0, 100.0]))

        g, h = model.eval_g_h(X, tau)
        f = model.eval_penalized(X, tau)
        worst_split = max(worst_split, abs((g - h) - f) / max(1.0, abs(f)))

        eps = 1e-6
        grad = model.grad_g(X, tau)
        l = int(rng.integers(model.k))
        j = int(rng.integers(model.d))
        Xp, Xm = X.copy(), X.copy()
        Xp[l, j] += eps
        Xm[l, j] -= eps
        fd = (model.eval_g_h(Xp, tau)[0] - model.eval_g_h(Xm, tau)[0]) / (2 * eps)
        worst_grad = max(worst_grad, abs(grad[l, j] - fd) / max(1.0, abs(grad[l, j])))

        for s in model.sets[l]:
            x = rng.uniform(-5.0, 5.0, size=model.d)
            residual = abs((float(np.dot(x, x)) - s.phi(x)) - s.dist_sq(x))
            worst_phi = max(worst_phi, residual / max(1.0, float(np.dot(x, x))))
            p = s.project(x)
            for _ in range(5):
                z = s.project(rng.uniform(-5.0, 5.0, size=model.d))
                inner = float(np.dot(x - p, z - p))
                scale = max(1.0, np.linalg.norm(x - p) * np.linalg.norm(z - p))
                worst_proj = max(worst_proj, inner / scale)

    ok = (worst_split <= 1e-8 and worst_grad <= 1e-5
          and worst_phi <= 1e-10 and worst_proj <= 1e-12)
    check("criterion 7 (analytic identities)", ok,
          f"over {n_cases} cases: split residual {worst_split:.2e} (tol 1e-8), "
          f"gradient FD residual {worst_grad:.2e} (tol 1e-5), "
          f"phi identity residual {worst_phi:.2e} (tol 1e-10), "
          f"projection optimality residual {worst_proj:.2e} (tol 1e-12)")


def test_criterion_8_default_penalty_ladder_has_eight_stages():
    expected = [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6, 1e7]
    declared = PenaltySchedule().stages()

    model = scaling_point_instance(dim=2, n=30, seed=5)
    X0 = model.initial_centers(np.random.default_rng(0))
    report = dca_solve(model, X0)
    ok = (declared == expected
          and report.stage_taus == expected
          and len(report.iterations_by_stage) == 8
          and all(it >= 1 for it in report.iterations_by_stage))
    check("criterion 8 (penalty continuation ladder)", ok,
          f"stages visited {report.stage_taus} (expected {expected})")
