"""Center placement where each data item is itself a convex target set.

Instead of point data, the model is given ``m`` convex target sets and
places ``k`` centers so every target is near some center in the squared
set-distance sense:

    psi(X) = sum_i  min_l  dist(x^l; T_i)^2.

Location constraints on the centers enter exactly as in
:mod:`dcclust.clustering`, through a quadratic penalty with weight tau.
When every target is a ball the distance and projection kernels collapse
to closed-form array expressions, which is what makes the benchmark runs
cheap; arbitrary targets fall back to per-set projection calls.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .clustering import _pad_constraints
from .sets import Ball, ConvexSet, WholeSpace

_TINY = np.finfo(float).tiny


class SetClusteringModel:
    """Constrained center placement over convex target sets.

    Parameters
    ----------
    targets : sequence of ConvexSet
        The sets to be covered, all of one ambient dimension.
    constraints : sequence of sequences of ConvexSet, optional
        Per-center constraint sets, as in :class:`~dcclust.clustering.ClusteringModel`.
    k : int, optional
        Number of centers; required when ``constraints`` is omitted.
    use_fast_path : bool
        Allow the vectorized all-ball kernels when applicable.  Exists so
        tests can pin the generic path against the fast one.
    """

    def __init__(self, targets: Sequence[ConvexSet],
                 constraints: Sequence[Sequence[ConvexSet]] | None = None,
                 k: int | None = None, use_fast_path: bool = True):
        self.targets = list(targets)
        if not self.targets:
            raise ValueError("need at least one target set")
        self.m = len(self.targets)
        self.d = self.targets[0].dim
        for t in self.targets:
            if t.dim != self.d:
                raise ValueError("all target sets must share one dimension")

        if constraints is None:
            if k is None:
                raise ValueError("give k when no constraints are supplied")
            constraints = [[] for _ in range(k)]
        self.sets, self.q = _pad_constraints(constraints, self.d)
        self.k = len(self.sets)
        if k is not None and k != self.k:
            raise ValueError(f"k={k} disagrees with {self.k} constraint groups")
        if self.k < 1:
            raise ValueError("need at least one center")
        for l, group in enumerate(self.sets):
            for s in group:
                if s.dim != self.d:
                    raise ValueError(f"constraint for center {l} has dim {s.dim}, targets have dim {self.d}")

        self._fast = use_fast_path and all(isinstance(t, Ball) for t in self.targets)
        if self._fast:
            self._tc = np.stack([t.center for t in self.targets])
            self._tr = np.array([t.radius for t in self.targets])

    # -- target geometry ------------------------------------------------------

    def _target_sq_distances(self, X: np.ndarray) -> np.ndarray:
        """(m, k) squared set distances from every center to every target."""
        if self._fast:
            gap = np.linalg.norm(X[None, :, :] - self._tc[:, None, :], axis=2) - self._tr[:, None]
            return np.maximum(gap, 0.0) ** 2
        out = np.empty((self.m, self.k))
        for i, t in enumerate(self.targets):
            for l in range(self.k):
                out[i, l] = t.dist_sq(X[l])
        return out

    def _target_projections(self, X: np.ndarray) -> np.ndarray:
        """(m, k, d) projections of every center onto every target."""
        if self._fast:
            diff = X[None, :, :] - self._tc[:, None, :]
            n = np.linalg.norm(diff, axis=2)
            scale = np.minimum(1.0, self._tr[:, None] / np.maximum(n, _TINY))
            return self._tc[:, None, :] + scale[:, :, None] * diff
        W = np.empty((self.m, self.k, self.d))
        for i, t in enumerate(self.targets):
            for l in range(self.k):
                W[i, l] = t.project(X[l])
        return W

    def assignments(self, X: np.ndarray) -> np.ndarray:
        """Index of the closest center per target (lowest index wins ties)."""
        return np.argmin(self._target_sq_distances(np.asarray(X, dtype=float)), axis=1)

    def max_constraint_distance(self, X: np.ndarray) -> float:
        X = np.asarray(X, dtype=float)
        worst = 0.0
        for l in range(self.k):
            for s in self.sets[l]:
                worst = max(worst, np.sqrt(s.dist_sq(X[l])))
        return float(worst)

    # -- objective pieces ------------------------------------------------------

    def eval_cost(self, X: np.ndarray) -> float:
        """psi(X): summed squared set distance of each target to its closest center."""
        X = np.asarray(X, dtype=float)
        return float(self._target_sq_distances(X).min(axis=1).sum())

    def constraint_penalty(self, X: np.ndarray) -> float:
        X = np.asarray(X, dtype=float)
        total = 0.0
        for l in range(self.k):
            for s in self.sets[l]:
                total += s.dist_sq(X[l])
        return total

    def eval_penalized(self, X: np.ndarray, tau: float) -> float:
        return 0.5 * self.eval_cost(X) + 0.5 * tau * self.constraint_penalty(X)

    def eval_g_h(self, X: np.ndarray, tau: float) -> tuple[float, float]:
        """The two convex halves with ``g - h`` equal to :meth:`eval_penalized`."""
        X = np.asarray(X, dtype=float)
        frob_sq = float((X * X).sum())
        g = 0.5 * (self.m + tau * self.q) * frob_sq

        W = self._target_projections(X)
        phi_targets = float(2.0 * (W * X[None, :, :]).sum() - (W * W).sum())
        d2 = ((X[None, :, :] - W) ** 2).sum(axis=2)
        drop_min = float((d2.sum(axis=1) - d2.min(axis=1)).sum())
        phi_constraints = 0.0
        for l in range(self.k):
            for s in self.sets[l]:
                phi_constraints += s.phi(X[l])
        h = 0.5 * phi_targets + 0.5 * drop_min + 0.5 * tau * phi_constraints
        return g, h

    def grad_g(self, X: np.ndarray, tau: float) -> np.ndarray:
        return (self.m + tau * self.q) * np.asarray(X, dtype=float)

    def subgrad_h(self, X: np.ndarray, tau: float) -> np.ndarray:
        """A subgradient of the concave-side function ``h`` at ``X``."""
        X = np.asarray(X, dtype=float)
        S = self._assigned_pull(X)
        U = self._constraint_projection_sum(X)
        return self.m * X - S + tau * U

    # -- solver interface -------------------------------------------------------

    def dca_point(self, X: np.ndarray, tau: float) -> np.ndarray:
        """Closed-form minimizer of the convex surrogate built at ``X``:
        ``Z = (m X - S + tau U) / (m + tau q)`` with ``S`` the pull of the
        assigned targets and ``U`` the summed constraint projections."""
        X = np.asarray(X, dtype=float)
        S = self._assigned_pull(X)
        U = self._constraint_projection_sum(X)
        return (self.m * X - S + tau * U) / (self.m + tau * self.q)

    def _assigned_pull(self, X: np.ndarray) -> np.ndarray:
        """S[l] = sum over targets assigned to l of (x^l - P(x^l; T_i))."""
        W = self._target_projections(X)
        d2 = ((X[None, :, :] - W) ** 2).sum(axis=2)
        r = np.argmin(d2, axis=1)
        pulls = X[r] - W[np.arange(self.m), r]
        S = np.empty((self.k, self.d))
        for j in range(self.d):
            S[:, j] = np.bincount(r, weights=pulls[:, j], minlength=self.k)
        return S

    def _constraint_projection_sum(self, X: np.ndarray) -> np.ndarray:
        U = np.zeros((self.k, self.d))
        for l in range(self.k):
            for s in self.sets[l]:
                U[l] += s.project(X[l])
        return U

    def initial_centers(self, rng: np.random.Generator) -> np.ndarray:
        """One starting point: center ``l`` drawn from its first constraint set.

        Unconstrained centers fall back to the bounding box of the targets,
        which is only known for ball targets.
        """
        rows = []
        for group in self.sets:
            if group and not isinstance(group[0], WholeSpace):
                rows.append(group[0].sample_uniform(rng))
            elif self._fast:
                lo = (self._tc - self._tr[:, None]).min(axis=0)
                hi = (self._tc + self._tr[:, None]).max(axis=0)
                rows.append(rng.uniform(lo, hi))
            else:
                raise ValueError("cannot sample starts: no bounded constraint and non-ball targets")
        return np.stack(rows)
