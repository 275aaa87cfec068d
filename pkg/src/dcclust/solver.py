"""Difference-of-convex descent with penalty continuation.

The driver minimizes a penalized objective ``F_tau`` supplied by a model
through the :class:`DcProblem` protocol.  For a fixed penalty weight the
basic iteration is

    Y = problem.dca_point(X, tau)        # minimizer of the convex surrogate
    X <- Y                               # plain descent, or
    X <- Y + lam * (Y - X)               # descent with line search

where ``lam`` is found by Armijo backtracking along the difference
direction ``d = Y - X``: starting from a trial value, ``lam`` is scaled by
``beta`` until

    F_tau(Y + lam * d) <= F_tau(Y) - alpha * lam^2 * ||d||^2.

The trial value is either a constant or the self-adaptive rule of
:func:`next_trial_step`, which doubles the step after two consecutive
fully accepted trials and otherwise reuses the last accepted value.

An outer loop then grows ``tau`` geometrically so constraint violations
are driven to zero; each stage restarts the line-search history and runs
the inner iteration to its step tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, Sequence

import numpy as np


class DcProblem(Protocol):
    """What a model must expose for the penalty-continuation solver."""

    def eval_cost(self, X: np.ndarray) -> float:
        """Unpenalized model cost at ``X`` (the reported quantity)."""
        ...

    def eval_penalized(self, X: np.ndarray, tau: float) -> float:
        """Penalized objective ``F_tau`` the solver descends."""
        ...

    def dca_point(self, X: np.ndarray, tau: float) -> np.ndarray:
        """Minimizer of the convex surrogate of ``F_tau`` built at ``X``."""
        ...


class Termination(Enum):
    """Why an inner stage stopped."""

    STEP_TOLERANCE = "step_tolerance"
    ZERO_DIRECTION = "zero_direction"
    ITERATION_CAP = "iteration_cap"


class NumericalFailure(RuntimeError):
    """A solve produced a non-finite iterate or objective value.

    Carries whatever trace was collected up to the failure so callers can
    log partial progress instead of losing the run.
    """

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class PenaltySchedule:
    """Geometric penalty continuation: tau0, tau0*sigma, ... while < tau_final."""

    tau0: float = 1.0
    sigma: float = 10.0
    tau_final: float = 1e8

    def __post_init__(self):
        if not (self.tau0 > 0.0 and math.isfinite(self.tau0)):
            raise ValueError("tau0 must be positive and finite")
        if not (self.sigma > 1.0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must exceed 1")
        if self.tau_final < self.tau0:
            raise ValueError("tau_final must be at least tau0")

    def stages(self) -> list[float]:
        """Penalty weights visited, in order.

        >>> PenaltySchedule().stages()
        [1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0, 1000000.0, 10000000.0]
        """
        out = []
        tau = self.tau0
        while tau < self.tau_final:
            out.append(tau)
            tau = tau * self.sigma
        if not out:
            out.append(self.tau0)
        return out


@dataclass(frozen=True)
class LineSearchParams:
    """Backtracking parameters for the boosted step.

    ``lambda_bar`` is the constant trial step; with ``adaptive=True`` it is
    instead the trial used at the second iteration of each stage while the
    rule of :func:`next_trial_step` governs the rest.  ``lambda_bar = 0``
    disables the search entirely, reproducing plain descent exactly.
    """

    alpha: float = 0.05
    beta: float = 0.1
    lambda_bar: float = 2.0
    adaptive: bool = False
    gamma: float = 2.0
    lambda_floor: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.alpha:
            raise ValueError("alpha must be positive")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.lambda_bar < 0.0:
            raise ValueError("lambda_bar must be nonnegative")
        if self.adaptive and self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1 for the adaptive rule")


@dataclass(frozen=True)
class StopRule:
    """Inner-loop stopping thresholds."""

    step_tol: float = 1e-6
    zero_direction_tol: float = 1e-15
    max_inner: int = 10000
    max_total: int = 1_000_000

    def __post_init__(self):
        if self.step_tol <= 0.0:
            raise ValueError("step_tol must be positive")
        if self.max_inner < 1 or self.max_total < 1:
            raise ValueError("iteration caps must be positive")


@dataclass(frozen=True)
class TraceEntry:
    """One inner iteration: objective values, step length, search effort."""

    stage: int
    tau: float
    iteration: int
    cost: float          # penalized objective after the update
    surrogate_cost: float  # penalized objective at the plain descent point Y
    step_sq: float       # squared Frobenius norm of X_next - X
    lam: float           # accepted line-search step (0 without search)
    backtracks: int


@dataclass
class SolveReport:
    """Outcome of one penalty-continuation solve."""

    X: np.ndarray
    cost: float
    penalized_cost: float
    iterations_total: int
    iterations_by_stage: list[int]
    stage_taus: list[float]
    stage_terminations: list[Termination]
    termination: Termination
    trace: list[TraceEntry] | None = None


def next_trial_step(trials: Sequence[float], accepted: Sequence[float],
                    gamma: float, lambda_bar_1: float) -> float:
    """Self-adaptive trial step for the upcoming iteration.

    ``trials`` and ``accepted`` hold, per past iteration, the trial value the
    search started from and the value it accepted.  The first iteration uses
    no search, the second starts from ``lambda_bar_1``, and afterwards the
    trial grows by ``gamma`` when the last two searches accepted their trial
    untouched, otherwise it reuses the last accepted step.

    >>> next_trial_step([], [], 2.0, 2.0)
    0.0
    >>> next_trial_step([0.0], [0.0], 2.0, 2.0)
    2.0
    >>> next_trial_step([0.0, 2.0], [0.0, 2.0], 2.0, 2.0)
    4.0
    >>> next_trial_step([0.0, 2.0], [0.0, 0.2], 2.0, 2.0)
    0.2
    """
    if len(trials) != len(accepted):
        raise ValueError("trial and accepted histories must have equal length")
    k = len(trials)
    if k == 0:
        return 0.0
    if k == 1:
        return lambda_bar_1
    if accepted[-2] == trials[-2] and accepted[-1] == trials[-1]:
        return gamma * accepted[-1]
    return accepted[-1]


def _backtrack(problem: DcProblem, Y: np.ndarray, d: np.ndarray, dnorm_sq: float,
               f_y: float, lam: float, tau: float, ls: LineSearchParams) -> tuple[float, float, int]:
    """Shrink ``lam`` until the sufficient-decrease test passes.

    Returns the accepted step, the objective at the accepted point, and the
    number of shrinkages.  A trial of zero is accepted immediately.
    """
    backtracks = 0
    while lam > 0.0:
        f_try = problem.eval_penalized(Y + lam * d, tau)
        if np.isfinite(f_try) and f_try <= f_y - ls.alpha * lam * lam * dnorm_sq:
            return lam, f_try, backtracks
        lam *= ls.beta
        backtracks += 1
        if lam < ls.lambda_floor:
            break
    return 0.0, f_y, backtracks


def _solve(problem: DcProblem, X0: np.ndarray, schedule: PenaltySchedule,
           stop: StopRule, ls: LineSearchParams | None,
           collect_trace: bool) -> SolveReport:
    X = np.array(X0, dtype=float)
    if not np.all(np.isfinite(X)):
        raise NumericalFailure("initial point contains non-finite entries")

    trace: list[TraceEntry] | None = [] if collect_trace else None
    iters_by_stage: list[int] = []
    stage_taus: list[float] = []
    stage_terms: list[Termination] = []
    total = 0
    capped = False

    for stage_idx, tau in enumerate(schedule.stages()):
        trials: list[float] = []
        accepted: list[float] = []
        term = Termination.ITERATION_CAP
        inner = 0

        while inner < stop.max_inner:
            if total >= stop.max_total:
                capped = True
                break
            Y = problem.dca_point(X, tau)
            if not np.all(np.isfinite(Y)):
                raise NumericalFailure(
                    f"non-finite iterate at stage {stage_idx}, iteration {inner}", trace)
            d = Y - X
            dnorm_sq = float(np.sum(d * d))
            inner += 1
            total += 1

            if math.sqrt(dnorm_sq) < stop.zero_direction_tol:
                X = Y
                term = Termination.ZERO_DIRECTION
                if collect_trace:
                    f_here = problem.eval_penalized(X, tau)
                    trace.append(TraceEntry(stage_idx, tau, inner - 1, f_here, f_here,
                                            dnorm_sq, 0.0, 0))
                break

            if ls is None:
                lam, backtracks = 0.0, 0
                X_next = Y
                f_y = f_next = problem.eval_penalized(Y, tau) if collect_trace else math.nan
            else:
                f_y = problem.eval_penalized(Y, tau)
                if not np.isfinite(f_y):
                    raise NumericalFailure(
                        f"non-finite objective at stage {stage_idx}, iteration {inner - 1}", trace)
                if ls.adaptive:
                    trial = next_trial_step(trials, accepted, ls.gamma, ls.lambda_bar)
                else:
                    trial = ls.lambda_bar
                lam, f_next, backtracks = _backtrack(problem, Y, d, dnorm_sq, f_y, trial, tau, ls)
                trials.append(trial)
                accepted.append(lam)
                X_next = Y if lam == 0.0 else Y + lam * d

            step_sq = (1.0 + lam) * (1.0 + lam) * dnorm_sq
            if collect_trace:
                trace.append(TraceEntry(stage_idx, tau, inner - 1, f_next, f_y,
                                        step_sq, lam, backtracks))
            X = X_next
            if math.sqrt(step_sq) < stop.step_tol:
                term = Termination.STEP_TOLERANCE
                break

        iters_by_stage.append(inner)
        stage_taus.append(tau)
        stage_terms.append(Termination.ITERATION_CAP if capped else term)
        if capped:
            break

    final_tau = stage_taus[-1]
    cost = problem.eval_cost(X)
    penalized = problem.eval_penalized(X, final_tau)
    if not (np.isfinite(cost) and np.isfinite(penalized)):
        raise NumericalFailure("final objective is non-finite", trace)
    return SolveReport(
        X=X,
        cost=float(cost),
        penalized_cost=float(penalized),
        iterations_total=int(sum(iters_by_stage)),
        iterations_by_stage=[int(v) for v in iters_by_stage],
        stage_taus=stage_taus,
        stage_terminations=stage_terms,
        termination=Termination.ITERATION_CAP if capped else stage_terms[-1],
        trace=trace,
    )


def dca_solve(problem: DcProblem, X0: np.ndarray,
              schedule: PenaltySchedule = PenaltySchedule(),
              stop: StopRule = StopRule(),
              collect_trace: bool = False) -> SolveReport:
    """Plain difference-of-convex descent under penalty continuation."""
    return _solve(problem, X0, schedule, stop, None, collect_trace)


def bdca_solve(problem: DcProblem, X0: np.ndarray,
               schedule: PenaltySchedule = PenaltySchedule(),
               stop: StopRule = StopRule(),
               linesearch: LineSearchParams = LineSearchParams(),
               collect_trace: bool = False) -> SolveReport:
    """Descent boosted by an Armijo line search along the difference direction."""
    return _solve(problem, X0, schedule, stop, linesearch, collect_trace)


def descent_violations(report: SolveReport, rel_tol: float = 1e-9) -> list[tuple[TraceEntry, TraceEntry]]:
    """Pairs of consecutive trace entries where the objective rose within a stage.

    The penalized objective must be non-increasing along the iterates of any
    single stage; increases beyond ``rel_tol`` (relative to the earlier
    value) are returned.  Requires a report produced with trace collection.
    """
    if report.trace is None:
        raise ValueError("report carries no trace; solve with collect_trace=True")
    bad = []
    for prev, cur in zip(report.trace, report.trace[1:]):
        if cur.stage != prev.stage:
            continue
        allowed = rel_tol * max(1.0, abs(prev.cost))
        if cur.cost > prev.cost + allowed:
            bad.append((prev, cur))
    return bad
