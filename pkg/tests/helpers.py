"""Shared builders for randomized test instances."""

from __future__ import annotations

import numpy as np

from dcclust import Ball, Box, ClusteringModel, Halfspace, SetClusteringModel


def random_bounded_set(rng: np.random.Generator, d: int):
    """A random ball or box with coordinates of order one."""
    if rng.uniform() < 0.5:
        return Ball(center=rng.uniform(-3.0, 3.0, size=d), radius=rng.uniform(0.3, 2.0))
    lo = rng.uniform(-3.0, 0.0, size=d)
    return Box(lower=lo, upper=lo + rng.uniform(0.2, 3.0, size=d))


def random_constraint_group(rng: np.random.Generator, d: int, q: int) -> list:
    """q constraint sets with a bounded one first (so starts can be sampled)."""
    group = [random_bounded_set(rng, d)]
    for _ in range(q - 1):
        if rng.uniform() < 0.3:
            normal = rng.normal(size=d)
            while not np.any(normal):
                normal = rng.normal(size=d)
            group.append(Halfspace(normal=normal, offset=rng.uniform(-1.0, 4.0)))
        else:
            group.append(random_bounded_set(rng, d))
    return group


def random_point_model(rng: np.random.Generator, n=None, d=None, k=None,
                       q=None) -> ClusteringModel:
    n = n if n is not None else int(rng.integers(5, 25))
    d = d if d is not None else int(rng.integers(1, 4))
    k = k if k is not None else int(rng.integers(1, 4))
    q = q if q is not None else int(rng.integers(1, 3))
    points = rng.uniform(-2.0, 2.0, size=(n, d))
    if q == 0:
        return ClusteringModel(points, None, k=k)
    constraints = [random_constraint_group(rng, d, q) for _ in range(k)]
    return ClusteringModel(points, constraints)


def random_set_model(rng: np.random.Generator, m=None, d=None, k=None,
                     q=None, ball_targets_only: bool = False) -> SetClusteringModel:
    m = m if m is not None else int(rng.integers(3, 14))
    d = d if d is not None else int(rng.integers(1, 4))
    k = k if k is not None else int(rng.integers(1, 4))
    q = q if q is not None else int(rng.integers(1, 3))
    targets = []
    for _ in range(m):
        if ball_targets_only or rng.uniform() < 0.7:
            targets.append(Ball(center=rng.uniform(-2.0, 2.0, size=d),
                                radius=rng.uniform(0.05, 0.8)))
        else:
            lo = rng.uniform(-2.0, 1.0, size=d)
            targets.append(Box(lower=lo, upper=lo + rng.uniform(0.1, 1.0)))
    constraints = [random_constraint_group(rng, d, q) for _ in range(k)]
    return SetClusteringModel(targets, constraints)


def random_centers(rng: np.random.Generator, k: int, d: int, scale: float = 3.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=(k, d))
