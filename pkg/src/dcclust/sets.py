"""Closed convex sets with projections, distances, and uniform sampling.

Every set exposes the three operations the solvers rely on: Euclidean
projection, squared distance, and the projection cross term ``phi``.  The
cross term is the function

    phi(x) = 2 <x, P(x)> - ||P(x)||^2

where ``P`` is the projection onto the set.  It is convex, differentiable
with gradient ``2 P(x)``, and satisfies ``||x||^2 - phi(x) = dist(x)^2``,
which is what lets squared set distances enter a difference-of-convex
decomposition.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

_TINY = np.finfo(float).tiny


class ConvexSet(ABC):
    """A closed convex subset of R^d."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    @abstractmethod
    def project(self, x: np.ndarray) -> np.ndarray:
        """Euclidean projection of a single point onto the set."""

    def project_rows(self, X: np.ndarray) -> np.ndarray:
        """Projection applied independently to each row of a 2-d array."""
        X = np.asarray(X, dtype=float)
        return np.stack([self.project(row) for row in X])

    def dist_sq(self, x: np.ndarray) -> float:
        """Squared Euclidean distance from ``x`` to the set."""
        x = np.asarray(x, dtype=float)
        r = x - self.project(x)
        return float(np.dot(r, r))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        """Whether ``x`` lies in the set, up to a Euclidean slack of ``tol``."""
        return self.dist_sq(x) <= tol * tol

    def phi(self, x: np.ndarray) -> float:
        """Projection cross term ``2 <x, P(x)> - ||P(x)||^2``."""
        x = np.asarray(x, dtype=float)
        p = self.project(x)
        return float(2.0 * np.dot(x, p) - np.dot(p, p))

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a point uniformly from the set.  Only bounded sets support this."""
        raise ValueError(f"cannot sample uniformly from unbounded set {type(self).__name__}")


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    """Closed Euclidean ball ``{x : ||x - center|| <= radius}``.

    >>> b = Ball(center=[0.0, 0.0], radius=1.0)
    >>> b.project([3.0, 4.0])
    array([0.6, 0.8])
    >>> b.dist_sq([3.0, 4.0])
    16.0
    """

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if c.ndim != 1:
            raise ValueError("ball center must be a 1-d point")
        if not np.all(np.isfinite(c)):
            raise ValueError("ball center must be finite")
        r = float(self.radius)
        if not (r > 0.0 and np.isfinite(r)):
            raise ValueError(f"ball radius must be positive and finite, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size

    def project(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = x - self.center
        n = float(np.linalg.norm(d))
        if n <= self.radius:
            return x.copy()
        return self.center + (self.radius / n) * d

    def project_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        diff = X - self.center
        n = np.linalg.norm(diff, axis=1, keepdims=True)
        scale = np.minimum(1.0, self.radius / np.maximum(n, _TINY))
        return self.center + scale * diff

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        v = rng.normal(size=self.dim)
        n = float(np.linalg.norm(v))
        while n == 0.0:
            v = rng.normal(size=self.dim)
            n = float(np.linalg.norm(v))
        u = rng.uniform()
        return self.center + (self.radius * u ** (1.0 / self.dim) / n) * v


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    """Axis-aligned box ``{x : lower <= x <= upper}`` (componentwise)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("box lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def project_rows(self, X: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(X, dtype=float), self.lower, self.upper)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """Halfspace ``{x : <normal, x> <= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.normal, dtype=float))
        if a.ndim != 1:
            raise ValueError("halfspace normal must be a 1-d vector")
        if not np.all(np.isfinite(a)) or float(np.dot(a, a)) == 0.0:
            raise ValueError("halfspace normal must be finite and nonzero")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "_norm_sq", float(np.dot(a, a)))

    @property
    def dim(self) -> int:
        return self.normal.size

    def project(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        excess = float(np.dot(self.normal, x)) - self.offset
        if excess <= 0.0:
            return x.copy()
        return x - (excess / self._norm_sq) * self.normal

    def project_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        excess = np.maximum(0.0, X @ self.normal - self.offset)
        return X - (excess / self._norm_sq)[:, None] * self.normal

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return float(np.dot(self.normal, x)) <= self.offset + tol * float(np.linalg.norm(self.normal))


@dataclass(frozen=True, eq=False)
class WholeSpace(ConvexSet):
    """All of R^d.  Projection is the identity and distances vanish.

    Used to pad ragged constraint lists so every center carries the same
    number of sets; a padded slot changes neither the penalty nor its
    subgradient.
    """

    ndim: int

    def __post_init__(self):
        n = int(self.ndim)
        if n < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "ndim", n)

    @property
    def dim(self) -> int:
        return self.ndim

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float).copy()

    def project_rows(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float).copy()

    def dist_sq(self, x: np.ndarray) -> float:
        return 0.0

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return True


def from_spec(spec: dict) -> ConvexSet:
    """Build a set from a plain-dict description (config files, reports).

    Recognized forms::

        {"type": "ball", "center": [..], "radius": r}
        {"type": "box", "lower": [..], "upper": [..]}
        {"type": "halfspace", "normal": [..], "offset": b}
        {"type": "whole_space", "dim": d}
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError(f"set description must be a dict with a 'type' key, got {spec!r}")
    kind = spec["type"]
    try:
        if kind == "ball":
            return Ball(center=spec["center"], radius=spec["radius"])
        if kind == "box":
            return Box(lower=spec["lower"], upper=spec["upper"])
        if kind == "halfspace":
            return Halfspace(normal=spec["normal"], offset=spec["offset"])
        if kind == "whole_space":
            return WholeSpace(ndim=spec["dim"])
    except KeyError as exc:
        raise ValueError(f"set description {spec!r} is missing field {exc}") from exc
    raise ValueError(f"unknown set type {kind!r}")


def to_spec(s: ConvexSet) -> dict:
    """Inverse of :func:`from_spec`, for serializing models into reports."""
    if isinstance(s, Ball):
        return {"type": "ball", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, Box):
        return {"type": "box", "lower": s.lower.tolist(), "upper": s.upper.tolist()}
    if isinstance(s, Halfspace):
        return {"type": "halfspace", "normal": s.normal.tolist(), "offset": s.offset}
    if isinstance(s, WholeSpace):
        return {"type": "whole_space", "dim": s.ndim}
    raise TypeError(f"cannot serialize set of type {type(s).__name__}")
