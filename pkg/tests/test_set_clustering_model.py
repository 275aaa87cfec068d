"""Set-target model: kernels, fast path, and the tiny-ball bridge to points."""

from __future__ import annotations

import numpy as np
import pytest

from dcclust import Ball, Box, ClusteringModel, SetClusteringModel, dca_solve
from dcclust.solver import PenaltySchedule

from helpers import random_centers, random_set_model

RNG = np.random.default_rng(20240819)
TAUS = (1.0, 10.0, 100.0)


def brute_cost(model: SetClusteringModel, X: np.ndarray) -> float:
    total = 0.0
    for t in model.targets:
        total += min(t.dist_sq(X[l]) for l in range(model.k))
    return total


class TestCost:
    def test_matches_brute_force_mixed_targets(self):
        for _ in range(25):
            model = random_set_model(RNG)
            X = random_centers(RNG, model.k, model.d)
            assert model.eval_cost(X) == pytest.approx(brute_cost(model, X), rel=1e-12, abs=1e-12)

    def test_ball_target_distance_formula(self):
        target = Ball(center=np.array([3.0, 0.0]), radius=1.0)
        model = SetClusteringModel([target], k=1)
        assert model.eval_cost(np.array([[0.0, 0.0]])) == pytest.approx(4.0)  # (3 - 1)^2
        assert model.eval_cost(np.array([[2.5, 0.0]])) == 0.0  # inside the target

    def test_tie_assigns_lowest_index(self):
        model = SetClusteringModel([Ball(center=np.zeros(2), radius=0.1)], k=2)
        X = np.array([[1.0, 0.0], [-1.0, 0.0]])
        assert model.assignments(X)[0] == 0


class TestFastPathAgreement:
    def test_kernels_match_generic_path(self):
        for _ in range(20):
            fast = random_set_model(RNG, ball_targets_only=True)
            slow = SetClusteringModel(fast.targets, [list(g) for g in fast.sets],
                                      use_fast_path=False)
            assert fast._fast and not slow._fast
            X = random_centers(RNG, fast.k, fast.d)
            np.testing.assert_allclose(fast._target_sq_distances(X),
                                       slow._target_sq_distances(X), atol=1e-12)
            np.testing.assert_allclose(fast._target_projections(X),
                                       slow._target_projections(X), atol=1e-12)
            for tau in TAUS:
                assert fast.eval_penalized(X, tau) == pytest.approx(slow.eval_penalized(X, tau), rel=1e-12)
                gf, hf = fast.eval_g_h(X, tau)
                gs, hs = slow.eval_g_h(X, tau)
                assert gf == pytest.approx(gs, rel=1e-12) and hf == pytest.approx(hs, rel=1e-12)
                np.testing.assert_allclose(fast.subgrad_h(X, tau), slow.subgrad_h(X, tau), atol=1e-10)
                np.testing.assert_allclose(fast.dca_point(X, tau), slow.dca_point(X, tau), atol=1e-12)

    def test_center_inside_target(self):
        target = Ball(center=np.array([1.0, 1.0]), radius=2.0)
        fast = SetClusteringModel([target], k=1)
        slow = SetClusteringModel([target], k=1, use_fast_path=False)
        X = np.array([[1.0, 1.0]])  # exactly the target center
        np.testing.assert_allclose(fast._target_projections(X), slow._target_projections(X))
        assert fast.eval_cost(X) == slow.eval_cost(X) == 0.0


class TestDcDecomposition:
    def test_g_minus_h_is_penalized_objective(self):
        for _ in range(40):
            model = random_set_model(RNG)
            X = random_centers(RNG, model.k, model.d)
            for tau in TAUS:
                g, h = model.eval_g_h(X, tau)
                assert g - h == pytest.approx(model.eval_penalized(X, tau), rel=1e-8, abs=1e-10)

    def test_grad_g_matches_finite_differences(self):
        eps = 1e-6
        for _ in range(10):
            model = random_set_model(RNG)
            X = random_centers(RNG, model.k, model.d)
            for tau in (1.0, 100.0):
                grad = model.grad_g(X, tau)
                for l in range(model.k):
                    for j in range(model.d):
                        Xp, Xm = X.copy(), X.copy()
                        Xp[l, j] += eps
                        Xm[l, j] -= eps
                        fd = (model.eval_g_h(Xp, tau)[0] - model.eval_g_h(Xm, tau)[0]) / (2 * eps)
                        assert grad[l, j] == pytest.approx(fd, rel=1e-5, abs=1e-5)

    def test_subgrad_h_matches_finite_differences_off_kinks(self):
        eps = 1e-6
        checked = 0
        trials = 0
        while checked < 10 and trials < 300:
            trials += 1
            model = random_set_model(RNG)
            X = random_centers(RNG, model.k, model.d)
            if model.k > 1:
                srt = np.sort(model._target_sq_distances(X), axis=1)
                if np.min(srt[:, 1] - srt[:, 0]) < 1e-3:
                    continue  # too close to an assignment boundary for FD
            subgrad = model.subgrad_h(X, 10.0)
            for l in range(model.k):
                for j in range(model.d):
                    Xp, Xm = X.copy(), X.copy()
                    Xp[l, j] += eps
                    Xm[l, j] -= eps
                    fd = (model.eval_g_h(Xp, 10.0)[1] - model.eval_g_h(Xm, 10.0)[1]) / (2 * eps)
                    assert subgrad[l, j] == pytest.approx(fd, rel=2e-5, abs=2e-5)
            checked += 1
        assert checked == 10


class TestSurrogateMinimizer:
    def test_minimizes_convex_surrogate(self):
        for _ in range(20):
            model = random_set_model(RNG)
            X = random_centers(RNG, model.k, model.d)
            tau = float(RNG.choice(TAUS))
            V = model.subgrad_h(X, tau)
            Z = model.dca_point(X, tau)

            def surrogate(W):
                return model.eval_g_h(W, tau)[0] - float(np.sum(V * W))

            base = surrogate(Z)
            for _ in range(12):
                assert base <= surrogate(Z + 1e-3 * RNG.normal(size=Z.shape)) + 1e-12

    def test_against_quadratic_oracle(self):
        scipy_opt = pytest.importorskip("scipy.optimize")
        for _ in range(5):
            model = random_set_model(RNG)
            X = random_centers(RNG, model.k, model.d)
            tau = float(RNG.choice(TAUS))
            V = model.subgrad_h(X, tau)
            shape = X.shape

            def fun(z):
                Z = z.reshape(shape)
                return model.eval_g_h(Z, tau)[0] - float(np.sum(V * Z))

            def jac(z):
                Z = z.reshape(shape)
                return (model.grad_g(Z, tau) - V).ravel()

            res = scipy_opt.minimize(fun, X.ravel(), jac=jac, method="BFGS",
                                     options={"gtol": 1e-12, "maxiter": 500})
            np.testing.assert_allclose(model.dca_point(X, tau).ravel(), res.x, atol=1e-6)

    def test_descent_step_never_increases_objective(self):
        for _ in range(20):
            model = random_set_model(RNG)
            X = random_centers(RNG, model.k, model.d)
            for tau in TAUS:
                Y = model.dca_point(X, tau)
                assert model.eval_penalized(Y, tau) <= model.eval_penalized(X, tau) + 1e-10


class TestTinyBallBridge:
    def test_matches_point_model_when_targets_shrink(self):
        # Targets that are radius-1e-9 balls around the data points make the
        # set model numerically indistinguishable from the point model.
        rng = np.random.default_rng(5)
        pts = np.vstack([rng.normal(loc=(-3.0, 0.0), scale=0.3, size=(8, 2)),
                         rng.normal(loc=(3.0, 1.0), scale=0.3, size=(8, 2))])
        constraints = [[Ball(center=np.array([-2.0, 0.0]), radius=2.0)],
                       [Ball(center=np.array([2.0, 1.0]), radius=2.0)]]
        point_model = ClusteringModel(pts, [list(g) for g in constraints])
        set_model = SetClusteringModel([Ball(center=p, radius=1e-9) for p in pts], constraints)

        X0 = point_model.initial_centers(np.random.default_rng(11))
        rp = dca_solve(point_model, X0.copy())
        rs = dca_solve(set_model, X0.copy())
        np.testing.assert_allclose(rs.X, rp.X, atol=1e-5)
        assert rs.cost == pytest.approx(rp.cost, abs=1e-5)


class TestStartsAndValidation:
    def test_initial_centers_land_in_first_set(self):
        box = Box(lower=np.zeros(2), upper=np.ones(2))
        model = SetClusteringModel([Ball(center=np.zeros(2), radius=1.0)], [[box]])
        for seed in range(5):
            X0 = model.initial_centers(np.random.default_rng(seed))
            assert box.contains(X0[0])

    def test_unconstrained_fallback_uses_target_box(self):
        targets = [Ball(center=np.array([2.0, 2.0]), radius=0.5),
                   Ball(center=np.array([4.0, 3.0]), radius=0.5)]
        model = SetClusteringModel(targets, k=2)
        X0 = model.initial_centers(np.random.default_rng(0))
        assert np.all(X0 >= [1.5, 1.5]) and np.all(X0 <= [4.5, 3.5])

    def test_unconstrained_non_ball_targets_cannot_sample(self):
        targets = [Box(lower=np.zeros(2), upper=np.ones(2))]
        model = SetClusteringModel(targets, k=1)
        with pytest.raises(ValueError):
            model.initial_centers(np.random.default_rng(0))

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            SetClusteringModel([], k=1)
        with pytest.raises(ValueError):
            SetClusteringModel([Ball(center=np.zeros(2), radius=1.0),
                                Ball(center=np.zeros(3), radius=1.0)], k=1)
        with pytest.raises(ValueError):
            SetClusteringModel([Ball(center=np.zeros(2), radius=1.0)])
        with pytest.raises(ValueError):
            SetClusteringModel([Ball(center=np.zeros(2), radius=1.0)],
                               [[Ball(center=np.zeros(3), radius=1.0)]])


class TestEndToEnd:
    def test_covering_two_target_groups(self):
        rng = np.random.default_rng(9)
        left = [Ball(center=rng.normal((-3.0, 0.0), 0.2), radius=0.1) for _ in range(6)]
        right = [Ball(center=rng.normal((3.0, 0.0), 0.2), radius=0.1) for _ in range(6)]
        model = SetClusteringModel(left + right, k=2)
        X0 = np.array([[-1.0, 0.5], [1.0, -0.5]])
        report = dca_solve(model, X0, schedule=PenaltySchedule(tau0=1.0, sigma=10.0, tau_final=1.0))
        got = report.X[np.argsort(report.X[:, 0])]
        assert got[0, 0] < -2.0 and got[1, 0] > 2.0
        assert report.cost < 1.0
