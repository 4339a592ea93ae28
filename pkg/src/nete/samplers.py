"""Seeded generators for multivariate regularly-varying noise.

Two mechanisms are provided: a linear map of iid Pareto coordinates
(``U = A Z``) and an elementwise Pareto mixture. Both take an explicit
``numpy.random.Generator`` so callers own the random streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evt import pareto_quantile


def derived_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for (seed, stream indices), e.g. one per repetition."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def sample_matrix_A(d_u: int, d_z: int, rng: np.random.Generator) -> np.ndarray:
    """Mixing matrix with iid Unif([1, 2]) entries."""
    if d_u < 1 or d_z < 1:
        raise ValueError("matrix dimensions must be >= 1")
    return rng.uniform(1.0, 2.0, size=(d_u, d_z))


@dataclass(frozen=True)
class LinearParetoSpec:
    """Noise U = A Z with Z_i iid Pareto(beta) and a nonnegative mixing matrix A."""

    beta: float
    A: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise ValueError("A must be a d_u x d_z matrix")
        if np.any(A < 0):
            raise ValueError("all entries of A must be nonnegative")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "A", A)

    @property
    def d_u(self) -> int:
        return self.A.shape[0]

    @property
    def d_z(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class MixtureSpec:
    """Noise with iid coordinates from 0.5 Pareto(beta) + 0.5 Pareto(beta + 1)."""

    beta: float
    d_u: int = 5

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.d_u < 1:
            raise ValueError("d_u must be >= 1")


def sample_linear_pareto(n: int, spec: LinearParetoSpec, rng: np.random.Generator) -> np.ndarray:
    """n x d_u matrix with rows A @ Z_i, Z_i having iid Pareto(beta) coordinates."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    Z = pareto_quantile(rng.uniform(size=(n, spec.d_z)), spec.beta)
    return Z @ spec.A.T


def sample_pareto_mixture(n: int, spec: MixtureSpec, rng: np.random.Generator) -> np.ndarray:
    """n x d_u matrix of independent draws from the two-component Pareto mixture."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    heavy = rng.uniform(size=(n, spec.d_u)) < 0.5
    u = rng.uniform(size=(n, spec.d_u))
    return np.where(
        heavy,
        pareto_quantile(u, spec.beta),
        pareto_quantile(u, spec.beta + 1.0),
    )
