"""Nuisance models: clipped logistic propensity, pseudo-outcome regression
and the log-log scaling exponent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import RandomForestRegressor

from .exceptions import DegenerateDataError, InsufficientDataError

DEFAULT_CLIP = 1e-4

RF_DEFAULTS = dict(
    n_estimators=100,
    max_depth=8,
    min_samples_leaf=5,
    max_features="sqrt",
    bootstrap=True,
)


@dataclass(frozen=True)
class PropensityModel:
    """Logistic propensity with predictions clipped to [clip_c, 1 - clip_c]."""

    weights: np.ndarray  # intercept first, then one weight per covariate
    clip_c: float = DEFAULT_CLIP
    converged: bool = True
    n_iter: int = 0

    def __post_init__(self):
        if not 0 < self.clip_c < 0.5:
            raise ValueError(f"clip_c must lie in (0, 1/2), got {self.clip_c}")


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_propensity(
    X,
    D,
    clip_c: float = DEFAULT_CLIP,
    l2: float = 1e-6,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> PropensityModel:
    """Fit a logistic regression of treatment on covariates by damped Newton steps.

    The L2 penalty (on all coefficients) keeps the Hessian well conditioned and
    guarantees a finite optimum even under separation.
    """
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    n, d = X.shape
    if n < d + 1:
        raise InsufficientDataError(f"need at least {d + 1} observations, got {n}")
    if D.min() == D.max():
        raise DegenerateDataError("treatment indicator contains a single class")

    Z = np.column_stack([np.ones(n), X])
    w = np.zeros(d + 1)

    def objective(w):
        z = Z @ w
        # log(1 + exp(z)) - D*z, numerically stable
        return float(np.mean(np.logaddexp(0.0, z) - D * z) + 0.5 * l2 * w @ w)

    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        p = _sigmoid(Z @ w)
        grad = Z.T @ (p - D) / n + l2 * w
        if np.linalg.norm(grad) <= tol:
            converged = True
            break
        h = np.maximum(p * (1.0 - p), 1e-12)
        hess = (Z * h[:, None]).T @ Z / n + l2 * np.eye(d + 1)
        step = np.linalg.solve(hess, grad)
        # backtracking keeps Newton steps from overshooting
        f0 = objective(w)
        lam = 1.0
        while lam > 1e-8 and objective(w - lam * step) > f0:
            lam *= 0.5
        w = w - lam * step
    return PropensityModel(weights=w, clip_c=clip_c, converged=converged, n_iter=it)


def predict_propensity(model: PropensityModel, X) -> np.ndarray | float:
    """Clipped propensity sigma(w . [1, x]); accepts one row or a matrix."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X2 = np.atleast_2d(X)
    p = _sigmoid(model.weights[0] + X2 @ model.weights[1:])
    p = np.clip(p, model.clip_c, 1.0 - model.clip_c)
    return float(p[0]) if single else p


@dataclass(frozen=True)
class AlphaEstimate:
    """Slope of the log|Y| on log-norm regression, used as the scaling exponent."""

    alpha_hat: float
    intercept: float
    n_used: int


def estimate_alpha(Y, U_norms) -> AlphaEstimate:
    """Ordinary least squares of log|Y| on log of the noise norm.

    Rows with Y == 0 are dropped before taking logs; a warning is emitted if
    more than half the sample is lost that way.
    """
    Y = np.asarray(Y, dtype=float)
    norms = np.asarray(U_norms, dtype=float)
    if np.any(norms <= 0):
        raise ValueError("all norms must be strictly positive")
    keep = Y != 0
    if keep.sum() < 2:
        raise InsufficientDataError("fewer than 2 usable rows after dropping Y == 0")
    if keep.sum() < 0.5 * Y.size:
        warnings.warn(
            f"estimate_alpha dropped {Y.size - keep.sum()} of {Y.size} rows with Y == 0",
            stacklevel=2,
        )
    x = np.log(norms[keep])
    if np.ptp(x) == 0:
        raise DegenerateDataError("all norms identical: scaling exponent is unidentified")
    slope, intercept = np.polyfit(x, np.log(np.abs(Y[keep])), 1)
    return AlphaEstimate(alpha_hat=float(slope), intercept=float(intercept), n_used=int(keep.sum()))


@dataclass(frozen=True)
class OutcomeModel:
    """Fitted regressor for the (pseudo-)outcome on features [x, d, s]."""

    kind: str  # "linear" | "random_forest"
    weights: np.ndarray | None = None
    forest: RandomForestRegressor | None = field(default=None, repr=False)

    def predict(self, features: np.ndarray) -> np.ndarray:
        if self.kind == "linear":
            return features @ self.weights[1:] + self.weights[0]
        return self.forest.predict(features)


def _features(X, D, S) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    S = np.atleast_2d(np.asarray(S, dtype=float))
    D = np.broadcast_to(np.asarray(D, dtype=float), (X.shape[0],))
    return np.column_stack([X, D, S])


def fit_pseudo_outcome(
    X,
    D,
    S,
    y,
    kind: str = "random_forest",
    seed: int = 0,
    rf_params: dict | None = None,
) -> OutcomeModel:
    """Regress the target on [covariates, treatment, angle]."""
    F = _features(X, D, S)
    y = np.asarray(y, dtype=float)
    if F.shape[0] < 10:
        raise InsufficientDataError("need at least 10 rows to fit the outcome model")
    if kind == "linear":
        Z = np.column_stack([np.ones(F.shape[0]), F])
        w, *_ = np.linalg.lstsq(Z, y, rcond=None)
        return OutcomeModel(kind="linear", weights=w)
    if kind == "random_forest":
        params = {**RF_DEFAULTS, **(rf_params or {})}
        forest = RandomForestRegressor(random_state=seed, **params)
        forest.fit(F, y)
        return OutcomeModel(kind="random_forest", forest=forest)
    raise ValueError(f"unknown outcome model kind: {kind!r}")


def predict_outcome(model: OutcomeModel, X, d, S) -> np.ndarray:
    """Deterministic prediction on [covariates, treatment, angle]."""
    return model.predict(_features(X, d, S))
