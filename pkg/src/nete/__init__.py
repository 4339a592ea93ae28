"""Estimation of treatment effects conditional on rare extreme events.

The estimand is the limit of E[(Y(1) - Y(0)) / t^alpha | ||U|| > t] as the
severity threshold t grows, factored into a direction (spectral) effect and a
tail moment. The package provides the EVT-IPW and EVT-DR estimators, naive
baselines, synthetic and semi-synthetic data generators and a Monte Carlo
benchmark harness.
"""

from .bench import (
    BenchmarkCell,
    BenchmarkResult,
    ExperimentConfig,
    run_mse_benchmark,
    run_semi_synthetic,
)
from .datagen import (
    SemiSynConfig,
    SyntheticConfig,
    counterfactual_tail_effect,
    generate_semi_synthetic,
    generate_synthetic,
    ground_truth_nete,
    load_wavesurge,
    normalize_extremes,
    synthetic_wavesurge,
    test_set_estimate,
)
from .estimators import (
    ALL_METHODS,
    EstimatorConfig,
    NeteEstimate,
    ObservationTable,
    estimate_all,
    estimate_nete,
    eta_dr,
    eta_ipw,
    naive_dr,
    naive_ipw,
    split_sample,
)
from .evt import (
    HillEstimate,
    ParetoParams,
    ThresholdRule,
    adaptive_hill,
    adaptive_k,
    hill_gamma,
    moment_factor,
    pareto_cdf,
    pareto_quantile,
    select_threshold,
)
from .exceptions import (
    DataFormatError,
    DegenerateDataError,
    EmptyTailError,
    InfiniteMomentError,
    InsufficientDataError,
    NeteError,
)
from .nuisance import (
    AlphaEstimate,
    OutcomeModel,
    PropensityModel,
    estimate_alpha,
    fit_propensity,
    fit_pseudo_outcome,
    predict_outcome,
    predict_propensity,
)
from .samplers import (
    LinearParetoSpec,
    MixtureSpec,
    derived_rng,
    sample_linear_pareto,
    sample_matrix_A,
    sample_pareto_mixture,
)

__version__ = "0.1.0"
