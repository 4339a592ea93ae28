"""Treatment-effect estimators conditional on extreme noise.

The main entry point is :func:`estimate_nete`, which runs the full pipeline:
sample splitting, nuisance fits, threshold selection, tail restriction and the
factored estimate theta = eta * mu. ``estimate_all`` shares the split, the
nuisances and the threshold across several methods, which is what the
benchmark harness uses.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .evt import (
    DEFAULT_MIN_ORDER_STATS,
    ThresholdRule,
    adaptive_hill,
    moment_factor,
    select_threshold,
)
from .exceptions import DataFormatError, EmptyTailError, InsufficientDataError, NeteError
from .nuisance import (
    DEFAULT_CLIP,
    OutcomeModel,
    PropensityModel,
    estimate_alpha,
    fit_propensity,
    fit_pseudo_outcome,
    predict_outcome,
    predict_propensity,
)

EVT_METHODS = ("evt_ipw", "evt_dr")
NAIVE_METHODS = ("naive_ipw", "naive_dr")
ALL_METHODS = EVT_METHODS + NAIVE_METHODS


@dataclass(frozen=True)
class ObservationTable:
    """Row-aligned data: covariates X, binary treatment D, outcome Y, noise U."""

    X: np.ndarray
    D: np.ndarray
    Y: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        U = np.atleast_2d(np.asarray(self.U, dtype=float))
        D = np.asarray(self.D, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        n = X.shape[0]
        if not (D.shape == (n,) and Y.shape == (n,) and U.shape[0] == n):
            raise ValueError("X, D, Y, U must have matching row counts")
        if not np.all((D == 0) | (D == 1)):
            raise ValueError("treatment must be binary 0/1")
        if n and np.any(U <= 0):
            raise ValueError("all noise entries must be strictly positive")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "U", U)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def norms(self) -> np.ndarray:
        """L1 norm of the noise vector, the severity measure used throughout."""
        return self.U.sum(axis=1)

    def angles(self) -> np.ndarray:
        return self.U / self.norms()[:, None]

    def subset(self, idx) -> "ObservationTable":
        return ObservationTable(self.X[idx], self.D[idx], self.Y[idx], self.U[idx])

    def to_csv(self, path) -> None:
        d_x, d_u = self.X.shape[1], self.U.shape[1]
        header = (
            [f"x{i + 1}" for i in range(d_x)]
            + ["d", "y"]
            + [f"u{i + 1}" for i in range(d_u)]
        )
        body = np.column_stack([self.X, self.D, self.Y, self.U])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in body:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "ObservationTable":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            try:
                rows = [[float(v) for v in row] for row in reader if row]
            except ValueError as exc:
                raise DataFormatError(f"{path}: non-numeric value in body") from exc
        d_x = sum(1 for c in header if c.startswith("x"))
        d_u = sum(1 for c in header if c.startswith("u"))
        if d_x + d_u + 2 != len(header) or "d" not in header or "y" not in header:
            raise DataFormatError(f"unexpected header {header}: want x1..xk,d,y,u1..um")
        data = np.asarray(rows, dtype=float)
        return cls(
            X=data[:, :d_x],
            D=data[:, d_x],
            Y=data[:, d_x + 1],
            U=data[:, d_x + 2 :],
        )


@dataclass(frozen=True)
class NeteEstimate:
    """Factored estimate theta = eta * mu plus the diagnostics that produced it."""

    method: str
    eta_hat: float
    mu_hat: float
    theta_hat: float
    threshold_t: float
    n_tail: int
    alpha_hat: float
    gamma_hat: float  # Hill estimate on the tail set (nan for naive methods)
    gamma_hat_full: float = float("nan")  # Hill estimate driving threshold selection

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "eta_hat": self.eta_hat,
            "mu_hat": self.mu_hat,
            "theta_hat": self.theta_hat,
            "threshold_t": self.threshold_t,
            "n_tail": self.n_tail,
            "alpha_hat": self.alpha_hat,
            "gamma_hat": self.gamma_hat,
            "gamma_hat_full": self.gamma_hat_full,
        }


@dataclass(frozen=True)
class EstimatorConfig:
    """Pipeline knobs; the defaults reproduce the reference experimental setup."""

    alpha: float | str = "auto"  # "auto" fits the log-log slope, a float pins it
    threshold: ThresholdRule = field(default_factory=ThresholdRule)
    clip_c: float = DEFAULT_CLIP
    l_n: int = DEFAULT_MIN_ORDER_STATS
    stability_radius: float | None = None  # None -> sqrt(log log n)
    outcome_kind: str = "random_forest"
    rf_params: dict | None = None
    alpha_on_first_half: bool = True  # fit alpha on the nuisance half only
    tail_only_nuisance: bool = False  # restrict nuisance fits to exceedances
    seed: int = 0  # seeds the outcome forests


def split_sample(data: ObservationTable, rng: np.random.Generator):
    """Random disjoint halves of sizes floor(n/2) and ceil(n/2)."""
    if data.n < 2:
        raise InsufficientDataError("need at least 2 observations to split")
    perm = rng.permutation(data.n)
    half = data.n // 2
    return data.subset(perm[:half]), data.subset(perm[half:])


def eta_ipw(tail: ObservationTable, prop: PropensityModel, alpha_hat: float) -> float:
    """Inverse propensity weighted mean of the scaled outcomes on the tail set."""
    if tail.n == 0:
        raise EmptyTailError("no observations above the threshold")
    p = predict_propensity(prop, tail.X)
    w = tail.D / p - (1.0 - tail.D) / (1.0 - p)
    return float(np.mean(tail.Y / tail.norms() ** alpha_hat * w))


def eta_dr(
    tail: ObservationTable,
    prop: PropensityModel,
    outcome: OutcomeModel,
    alpha_hat: float,
) -> float:
    """Doubly robust score mean on the tail set."""
    if tail.n == 0:
        raise EmptyTailError("no observations above the threshold")
    p = predict_propensity(prop, tail.X)
    S = tail.angles()
    g1 = predict_outcome(outcome, tail.X, 1.0, S)
    g0 = predict_outcome(outcome, tail.X, 0.0, S)
    g_obs = np.where(tail.D == 1, g1, g0)
    resid = tail.Y / tail.norms() ** alpha_hat - g_obs
    score = g1 - g0 + (tail.D - p) / (p * (1.0 - p)) * resid
    return float(np.mean(score))


def _second_half(data: ObservationTable) -> ObservationTable:
    return data.subset(np.arange(data.n // 2, data.n))


def naive_ipw(
    data: ObservationTable,
    t: float,
    alpha_hat: float,
    prop: PropensityModel,
) -> NeteEstimate:
    """Baseline IPW on the raw outcomes of the second-half tail, scaled by t^alpha."""
    half2 = _second_half(data)
    tail = half2.subset(half2.norms() > t)
    if tail.n == 0:
        raise EmptyTailError("no second-half observations above the threshold")
    p = predict_propensity(prop, tail.X)
    w = tail.D / p - (1.0 - tail.D) / (1.0 - p)
    theta = float(np.mean(tail.Y * w) / t**alpha_hat)
    return NeteEstimate(
        method="naive_ipw",
        eta_hat=theta,
        mu_hat=1.0,
        theta_hat=theta,
        threshold_t=t,
        n_tail=tail.n,
        alpha_hat=alpha_hat,
        gamma_hat=float("nan"),
    )


def naive_dr(
    data: ObservationTable,
    t: float,
    alpha_hat: float,
    prop: PropensityModel,
    raw_outcome: OutcomeModel,
) -> NeteEstimate:
    """Baseline DR on raw outcomes; ``raw_outcome`` regressed Y on (X, D, U)."""
    half2 = _second_half(data)
    tail = half2.subset(half2.norms() > t)
    if tail.n == 0:
        raise EmptyTailError("no second-half observations above the threshold")
    p = predict_propensity(prop, tail.X)
    g1 = predict_outcome(raw_outcome, tail.X, 1.0, tail.U)
    g0 = predict_outcome(raw_outcome, tail.X, 0.0, tail.U)
    g_obs = np.where(tail.D == 1, g1, g0)
    score = g1 - g0 + (tail.D - p) / (p * (1.0 - p)) * (tail.Y - g_obs)
    theta = float(np.mean(score) / t**alpha_hat)
    return NeteEstimate(
        method="naive_dr",
        eta_hat=theta,
        mu_hat=1.0,
        theta_hat=theta,
        threshold_t=t,
        n_tail=tail.n,
        alpha_hat=alpha_hat,
        gamma_hat=float("nan"),
    )


def estimate_all(
    data: ObservationTable,
    methods,
    cfg: EstimatorConfig = EstimatorConfig(),
    rng: np.random.Generator | None = None,
    strict: bool = True,
) -> dict[str, NeteEstimate]:
    """Run several estimators on one dataset, sharing the split, the fitted
    nuisances, the scaling exponent and the threshold across all of them.

    With ``strict=False`` a method whose computation raises a
    :class:`~nete.exceptions.NeteError` is omitted from the result instead of
    aborting the whole call; the benchmark harness counts omissions as
    failures.
    """
    methods = list(methods)
    unknown = set(methods) - set(ALL_METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    rng = rng if rng is not None else np.random.default_rng()

    try:
        return _estimate_all_impl(data, methods, cfg, rng, strict)
    except NeteError:
        if strict:
            raise
        return {}


def _estimate_all_impl(data, methods, cfg, rng, strict) -> dict[str, NeteEstimate]:
    half1, half2 = split_sample(data, rng)

    if cfg.alpha == "auto":
        alpha_src = half1 if cfg.alpha_on_first_half else data
        alpha_hat = estimate_alpha(alpha_src.Y, alpha_src.norms()).alpha_hat
    else:
        alpha_hat = float(cfg.alpha)

    prop = fit_propensity(half1.X, half1.D, clip_c=cfg.clip_c)

    norms2 = half2.norms()
    gamma_full = adaptive_hill(norms2, l_n=cfg.l_n, r=cfg.stability_radius).gamma_hat
    t = select_threshold(data.n, gamma_full, cfg.threshold)

    tail = half2.subset(norms2 > t)
    if tail.n == 0:
        raise EmptyTailError(f"no second-half observations above threshold t={t:.4g}")

    nuisance_rows = half1.subset(half1.norms() > t) if cfg.tail_only_nuisance else half1

    pseudo_outcome = None
    if "evt_dr" in methods:
        pseudo_outcome = fit_pseudo_outcome(
            nuisance_rows.X,
            nuisance_rows.D,
            nuisance_rows.angles(),
            nuisance_rows.Y / nuisance_rows.norms() ** alpha_hat,
            kind=cfg.outcome_kind,
            seed=cfg.seed,
            rf_params=cfg.rf_params,
        )
    raw_outcome = None
    if "naive_dr" in methods:
        raw_outcome = fit_pseudo_outcome(
            nuisance_rows.X,
            nuisance_rows.D,
            nuisance_rows.U,
            nuisance_rows.Y,
            kind=cfg.outcome_kind,
            seed=cfg.seed + 1,
            rf_params=cfg.rf_params,
        )

    results: dict[str, NeteEstimate] = {}
    evt_requested = [m for m in methods if m in EVT_METHODS]
    if evt_requested:
        try:
            gamma_tail = adaptive_hill(
                tail.norms(), l_n=cfg.l_n, r=cfg.stability_radius
            ).gamma_hat
            mu_hat = moment_factor(alpha_hat, gamma_tail)
        except NeteError:
            if strict:
                raise
            evt_requested = []
        for m in evt_requested:
            eta = (
                eta_ipw(tail, prop, alpha_hat)
                if m == "evt_ipw"
                else eta_dr(tail, prop, pseudo_outcome, alpha_hat)
            )
            results[m] = NeteEstimate(
                method=m,
                eta_hat=eta,
                mu_hat=mu_hat,
                theta_hat=eta * mu_hat,
                threshold_t=t,
                n_tail=tail.n,
                alpha_hat=alpha_hat,
                gamma_hat=gamma_tail,
                gamma_hat_full=gamma_full,
            )

    # the naive formulas index the second half of the table directly, so glue
    # the shuffled halves back together in split order
    if any(m in NAIVE_METHODS for m in methods):
        glued = ObservationTable(
            np.vstack([half1.X, half2.X]),
            np.concatenate([half1.D, half2.D]),
            np.concatenate([half1.Y, half2.Y]),
            np.vstack([half1.U, half2.U]),
        )
        if "naive_ipw" in methods:
            est = naive_ipw(glued, t, alpha_hat, prop)
            results["naive_ipw"] = replace(est, gamma_hat_full=gamma_full)
        if "naive_dr" in methods:
            est = naive_dr(glued, t, alpha_hat, prop, raw_outcome)
            results["naive_dr"] = replace(est, gamma_hat_full=gamma_full)
    return results


def estimate_nete(
    data: ObservationTable,
    method: str = "evt_dr",
    cfg: EstimatorConfig = EstimatorConfig(),
    rng: np.random.Generator | None = None,
) -> NeteEstimate:
    """Full pipeline for a single estimator; see :func:`estimate_all`."""
    return estimate_all(data, [method], cfg=cfg, rng=rng)[method]
