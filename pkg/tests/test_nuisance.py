"""Tests for the nuisance models: propensity, scaling exponent, outcome."""

import numpy as np
import pytest

from nete import (
    DegenerateDataError,
    InsufficientDataError,
    PropensityModel,
    derived_rng,
    estimate_alpha,
    fit_propensity,
    fit_pseudo_outcome,
    predict_outcome,
    predict_propensity,
)
from nete.nuisance import _sigmoid


def _logistic_data(n, b, rng):
    X = rng.uniform(size=(n, b.size))
    p = 1.0 / (1.0 + np.exp(-X @ b))
    D = (rng.uniform(size=n) < p).astype(float)
    return X, D


class TestFitPropensity:
    def test_recovers_coefficients(self):
        rng = derived_rng(0)
        b = np.array([0.8, -1.2, 0.3, 1.5, -0.4])
        X, D = _logistic_data(50_000, b, rng)
        model = fit_propensity(X, D)
        assert model.converged
        assert abs(model.weights[0]) < 0.1  # true intercept is 0
        assert np.max(np.abs(model.weights[1:] - b)) < 0.1

    def test_independent_treatment(self):
        rng = derived_rng(1)
        X = rng.uniform(size=(20_000, 3))
        D = (rng.uniform(size=20_000) < 0.5).astype(float)
        model = fit_propensity(X, D)
        p = predict_propensity(model, X)
        assert abs(model.weights[0]) < 0.2
        assert np.max(np.abs(p - 0.5)) < 0.05

    def test_single_class_raises(self):
        X = derived_rng(2).uniform(size=(100, 3))
        with pytest.raises(DegenerateDataError):
            fit_propensity(X, np.ones(100))

    def test_too_few_rows(self):
        X = derived_rng(3).uniform(size=(3, 5))
        with pytest.raises(InsufficientDataError):
            fit_propensity(X, np.array([0.0, 1.0, 0.0]))

    def test_gradient_at_optimum(self):
        # the analytic gradient must vanish at the fit and agree with finite
        # differences of the penalized objective
        rng = derived_rng(4)
        b = np.array([1.0, -0.5])
        X, D = _logistic_data(2000, b, rng)
        l2 = 1e-6
        model = fit_propensity(X, D, l2=l2)
        Z = np.column_stack([np.ones(X.shape[0]), X])
        w = model.weights

        def objective(w):
            z = Z @ w
            return float(np.mean(np.logaddexp(0.0, z) - D * z) + 0.5 * l2 * w @ w)

        p = _sigmoid(Z @ w)
        grad = Z.T @ (p - D) / X.shape[0] + l2 * w
        assert np.linalg.norm(grad) <= 1e-8
        h = 1e-6
        for j in range(w.size):
            e = np.zeros_like(w)
            e[j] = h
            fd = (objective(w + e) - objective(w - e)) / (2 * h)
            assert abs(fd - grad[j]) <= 1e-5 * max(1.0, abs(fd))


class TestPredictPropensity:
    def test_zero_weights(self):
        model = PropensityModel(weights=np.zeros(4))
        assert predict_propensity(model, np.ones(3)) == 0.5

    def test_clipping(self):
        model = PropensityModel(weights=np.array([50.0, 0.0]), clip_c=1e-4)
        assert predict_propensity(model, np.array([0.0])) == pytest.approx(0.9999)
        model = PropensityModel(weights=np.array([-50.0, 0.0]), clip_c=1e-4)
        assert predict_propensity(model, np.array([0.0])) == pytest.approx(1e-4)

    def test_interior_unchanged(self):
        # raw sigma = 0.3 at z = log(3/7)
        z = np.log(0.3 / 0.7)
        model = PropensityModel(weights=np.array([z, 0.0]), clip_c=1e-4)
        assert predict_propensity(model, np.array([5.0])) == pytest.approx(0.3, abs=1e-12)

    def test_matrix_input(self):
        model = PropensityModel(weights=np.array([0.0, 1.0]))
        p = predict_propensity(model, np.array([[0.0], [1.0]]))
        assert p.shape == (2,) and p[0] == 0.5

    def test_invalid_clip(self):
        with pytest.raises(ValueError):
            PropensityModel(weights=np.zeros(2), clip_c=0.7)


class TestEstimateAlpha:
    def test_exact_power_law(self):
        norms = derived_rng(5).uniform(1.0, 20.0, size=200)
        est = estimate_alpha(norms**2, norms)
        assert abs(est.alpha_hat - 2.0) < 1e-10
        assert est.n_used == 200

    def test_constant_outcome(self):
        norms = derived_rng(6).uniform(1.0, 5.0, size=100)
        est = estimate_alpha(np.full(100, 3.0), norms)
        assert abs(est.alpha_hat) < 1e-10
        assert est.intercept == pytest.approx(np.log(3.0), abs=1e-10)

    def test_outcome_rescale_invariance(self):
        rng = derived_rng(7)
        norms = rng.uniform(1.0, 10.0, size=150)
        Y = norms**1.3 * rng.uniform(0.5, 1.5, size=150)
        a = estimate_alpha(Y, norms)
        b = estimate_alpha(100.0 * Y, norms)
        assert abs(a.alpha_hat - b.alpha_hat) < 1e-12
        assert b.intercept - a.intercept == pytest.approx(np.log(100.0), abs=1e-9)

    def test_degenerate_norms(self):
        with pytest.raises(DegenerateDataError):
            estimate_alpha(np.array([1.0, 2.0, 3.0]), np.full(3, 2.0))

    def test_zero_outcomes_dropped(self):
        norms = np.array([1.0, 2.0, 4.0, 8.0])
        Y = np.array([1.0, 0.0, 16.0, 64.0])
        est = estimate_alpha(Y, norms)
        assert est.n_used == 3
        assert abs(est.alpha_hat - 2.0) < 1e-10

    def test_mostly_zero_warns(self):
        norms = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
        Y = np.array([0.0, 0.0, 0.0, 64.0, 256.0])
        with pytest.warns(UserWarning):
            est = estimate_alpha(Y, norms)
        assert est.n_used == 2 and abs(est.alpha_hat - 2.0) < 1e-10

    def test_too_few_usable(self):
        with pytest.raises(InsufficientDataError):
            estimate_alpha(np.array([0.0, 0.0, 1.0]), np.array([1.0, 2.0, 3.0]))

    def test_nonpositive_norms(self):
        with pytest.raises(ValueError):
            estimate_alpha(np.ones(3), np.array([1.0, 0.0, 2.0]))


def _angles(n, d, rng):
    raw = rng.uniform(size=(n, d))
    return raw / raw.sum(axis=1, keepdims=True)


class TestOutcomeModel:
    def test_linear_exact_interpolation(self):
        rng = derived_rng(8)
        X = rng.uniform(size=(200, 3))
        D = (rng.uniform(size=200) < 0.5).astype(float)
        S = _angles(200, 4, rng)
        y = 2.0 + X @ np.array([1.0, -2.0, 0.5]) + 3.0 * D + S @ np.array([0.1, 0.2, -0.3, 0.4])
        model = fit_pseudo_outcome(X, D, S, y, kind="linear")
        pred = predict_outcome(model, X, D, S)
        assert np.max(np.abs(pred - y)) < 1e-8

    def test_constant_target(self):
        rng = derived_rng(9)
        X = rng.uniform(size=(100, 2))
        D = (rng.uniform(size=100) < 0.5).astype(float)
        S = _angles(100, 3, rng)
        y = np.full(100, 4.2)
        for kind in ("linear", "random_forest"):
            model = fit_pseudo_outcome(X, D, S, y, kind=kind)
            pred = predict_outcome(model, X, D, S)
            assert np.max(np.abs(pred - 4.2)) < 1e-8

    def test_forest_deterministic(self):
        rng = derived_rng(10)
        X = rng.uniform(size=(300, 3))
        D = (rng.uniform(size=300) < 0.5).astype(float)
        S = _angles(300, 3, rng)
        y = X[:, 0] + D + rng.standard_normal(300)
        a = fit_pseudo_outcome(X, D, S, y, kind="random_forest", seed=5)
        b = fit_pseudo_outcome(X, D, S, y, kind="random_forest", seed=5)
        grid = rng.uniform(size=(50, 3))
        gd = (rng.uniform(size=50) < 0.5).astype(float)
        gs = _angles(50, 3, rng)
        assert np.array_equal(predict_outcome(a, grid, gd, gs), predict_outcome(b, grid, gd, gs))

    def test_forest_beats_mean_baseline(self):
        rng = derived_rng(11)
        n = 10_000
        X = rng.uniform(size=(n, 5))
        D = (rng.uniform(size=n) < 0.5).astype(float)
        S = _angles(n, 5, rng)
        y = D + S.sum(axis=1) + rng.uniform(-1.0, 1.0, size=n) + X[:, 0]
        model = fit_pseudo_outcome(X[: n // 2], D[: n // 2], S[: n // 2], y[: n // 2])
        pred = predict_outcome(model, X[n // 2 :], D[n // 2 :], S[n // 2 :])
        test_y = y[n // 2 :]
        rmse = np.sqrt(np.mean((pred - test_y) ** 2))
        baseline = np.sqrt(np.mean((test_y - y[: n // 2].mean()) ** 2))
        assert rmse < baseline

    def test_treatment_effect_visible(self):
        rng = derived_rng(12)
        X = rng.uniform(size=(500, 2))
        D = (rng.uniform(size=500) < 0.5).astype(float)
        S = _angles(500, 2, rng)
        y = 1.0 + 2.0 * D
        model = fit_pseudo_outcome(X, D, S, y, kind="linear")
        g1 = predict_outcome(model, X, 1.0, S)
        g0 = predict_outcome(model, X, 0.0, S)
        assert np.allclose(g1 - g0, 2.0, atol=1e-8)

    def test_too_few_rows(self):
        rng = derived_rng(13)
        with pytest.raises(InsufficientDataError):
            fit_pseudo_outcome(
                rng.uniform(size=(5, 2)),
                np.array([0, 1, 0, 1, 0], dtype=float),
                _angles(5, 2, rng),
                np.ones(5),
            )

    def test_unknown_kind(self):
        rng = derived_rng(14)
        with pytest.raises(ValueError):
            fit_pseudo_outcome(
                rng.uniform(size=(20, 2)),
                (rng.uniform(size=20) < 0.5).astype(float),
                _angles(20, 2, rng),
                np.ones(20),
                kind="spline",
            )
