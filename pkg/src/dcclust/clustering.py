"""Center placement for point sets under convex location constraints.

The model places ``k`` centers so that every data point is near its
closest center, while center ``l`` is pushed into the intersection of its
constraint sets.  The reported cost is

    psi(X) = sum_i  min_l  ||x^l - a_i||^2

and the solver descends the penalized objective

    F_tau(X) = psi(X) / 2 + (tau / 2) * sum_{l,j} dist(x^l; C_{l,j})^2,

whose difference-of-convex structure admits a closed-form surrogate
minimizer; see :meth:`ClusteringModel.dca_point`.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .sets import ConvexSet, WholeSpace


def _pad_constraints(constraints: Sequence[Sequence[ConvexSet]], dim: int) -> tuple[list[list[ConvexSet]], int]:
    """Pad ragged per-center constraint lists to a common length with R^d."""
    lists = [list(group) for group in constraints]
    q = max((len(g) for g in lists), default=0)
    for g in lists:
        g.extend(WholeSpace(dim) for _ in range(q - len(g)))
    return lists, q


class ClusteringModel:
    """Constrained center placement over a fixed point cloud.

    Parameters
    ----------
    points : (n, d) array
        The data points ``a_i``.
    constraints : sequence of sequences of ConvexSet, optional
        ``constraints[l]`` holds the sets center ``l`` must lie in.  Lists
        may be ragged; they are padded internally with the whole space.
        The first set of each list doubles as the sampling region for
        :meth:`initial_centers`, so put a bounded set first.  Omit for
        unconstrained placement.
    k : int, optional
        Number of centers; required when ``constraints`` is omitted.
    """

    def __init__(self, points: np.ndarray,
                 constraints: Sequence[Sequence[ConvexSet]] | None = None,
                 k: int | None = None):
        A = np.asarray(points, dtype=float)
        if A.ndim != 2 or A.shape[0] < 1:
            raise ValueError("points must be a nonempty (n, d) array")
        if not np.all(np.isfinite(A)):
            raise ValueError("points must be finite")
        self.points = A
        self.n, self.d = A.shape

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
                    raise ValueError(f"constraint for center {l} has dim {s.dim}, data has dim {self.d}")

        self._colsum = A.sum(axis=0)
        self._row_sq = (A * A).sum(axis=1)

    # -- geometry -----------------------------------------------------------

    def _sq_distances(self, X: np.ndarray) -> np.ndarray:
        """(n, k) squared distances from every point to every center."""
        d2 = self._row_sq[:, None] - 2.0 * (self.points @ X.T) + (X * X).sum(axis=1)[None, :]
        return np.maximum(d2, 0.0)

    def assignments(self, X: np.ndarray) -> np.ndarray:
        """Index of the closest center per point (lowest index wins ties)."""
        return np.argmin(self._sq_distances(np.asarray(X, dtype=float)), axis=1)

    def max_constraint_distance(self, X: np.ndarray) -> float:
        """Largest Euclidean violation of any constraint set."""
        X = np.asarray(X, dtype=float)
        worst = 0.0
        for l in range(self.k):
            for s in self.sets[l]:
                worst = max(worst, np.sqrt(s.dist_sq(X[l])))
        return float(worst)

    # -- objective pieces ----------------------------------------------------

    def eval_cost(self, X: np.ndarray) -> float:
        """psi(X): summed squared distance of each point to its closest center."""
        X = np.asarray(X, dtype=float)
        return float(self._sq_distances(X).min(axis=1).sum())

    def constraint_penalty(self, X: np.ndarray) -> float:
        """sum_{l,j} dist(x^l; C_{l,j})^2 without the tau weight."""
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
        d2 = self._sq_distances(X)
        frob_sq = float((X * X).sum())
        g = 0.5 * float(d2.sum()) + 0.5 * tau * self.q * frob_sq
        drop_min = float((d2.sum(axis=1) - d2.min(axis=1)).sum())
        phi_sum = 0.0
        for l in range(self.k):
            for s in self.sets[l]:
                phi_sum += s.phi(X[l])
        h = 0.5 * drop_min + 0.5 * tau * phi_sum
        return g, h

    def grad_g(self, X: np.ndarray, tau: float) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return (self.n + tau * self.q) * X - self._colsum[None, :]

    def subgrad_h(self, X: np.ndarray, tau: float) -> np.ndarray:
        """A subgradient of the concave-side function ``h`` at ``X``."""
        X = np.asarray(X, dtype=float)
        d2 = self._sq_distances(X)
        S = self._assigned_pull(X, d2)
        U = self._constraint_projection_sum(X)
        return self.n * X - self._colsum[None, :] - S + tau * U

    # -- solver interface ----------------------------------------------------

    def dca_point(self, X: np.ndarray, tau: float) -> np.ndarray:
        """Closed-form minimizer of the convex surrogate built at ``X``.

        Solves ``grad_g(Z) = subgrad_h(X)`` for ``Z``; the data column sum
        cancels, leaving ``Z = (n X - S + tau U) / (n + tau q)`` where ``S``
        pulls each center toward the points assigned to it and ``U`` sums
        the projections of each center onto its constraint sets.
        """
        X = np.asarray(X, dtype=float)
        d2 = self._sq_distances(X)
        S = self._assigned_pull(X, d2)
        U = self._constraint_projection_sum(X)
        return (self.n * X - S + tau * U) / (self.n + tau * self.q)

    def _assigned_pull(self, X: np.ndarray, d2: np.ndarray) -> np.ndarray:
        """S[l] = sum over points assigned to l of (x^l - a_i)."""
        r = np.argmin(d2, axis=1)
        counts = np.bincount(r, minlength=self.k).astype(float)
        sums = np.empty((self.k, self.d))
        for j in range(self.d):
            sums[:, j] = np.bincount(r, weights=self.points[:, j], minlength=self.k)
        return counts[:, None] * X - sums

    def _constraint_projection_sum(self, X: np.ndarray) -> np.ndarray:
        U = np.zeros((self.k, self.d))
        for l in range(self.k):
            for s in self.sets[l]:
                U[l] += s.project(X[l])
        return U

    def initial_centers(self, rng: np.random.Generator) -> np.ndarray:
        """One starting point: center ``l`` drawn from its first constraint set.

        Unconstrained centers fall back to the bounding box of the data.
        """
        lo, hi = self.points.min(axis=0), self.points.max(axis=0)
        rows = []
        for group in self.sets:
            if group and not isinstance(group[0], WholeSpace):
                rows.append(group[0].sample_uniform(rng))
            else:
                rows.append(rng.uniform(lo, hi))
        return np.stack(rows)
