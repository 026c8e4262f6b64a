"""Reward generators for a fixed hidden parameter.

Gaussian environments add noise to the true mean; empirical environments
replay held-out samples with replacement. Both consume randomness only from
the generator passed to each draw, one variate per call, so reward streams
can be shared across algorithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import RewardModel

__all__ = ["GaussianEnvironment", "EmpiricalPool", "gaussian_draw", "empirical_draw"]


@dataclass(frozen=True, eq=False)
class GaussianEnvironment:
    model: RewardModel
    theta_star: int
    noise_sigma: float

    def __post_init__(self):
        if not (self.noise_sigma > 0):
            raise ValueError("noise_sigma must be positive")
        if not (0 <= self.theta_star < self.model.grid.n_points):
            raise ValueError("theta_star is not a valid grid index")


def gaussian_draw(env: GaussianEnvironment, arm: int, rng) -> float:
    """True mean at the hidden parameter plus one scaled standard normal."""
    return (
        float(env.model.means[arm, env.theta_star])
        + env.noise_sigma * rng.standard_normal()
    )


@dataclass(frozen=True, eq=False)
class EmpiricalPool:
    """Per (theta index, arm) reward sample lists with deterministic fallbacks.

    Every cell must either hold at least one sample or have a finite fallback
    mean; this is checked at construction so draws never fail.
    """

    samples: tuple  # samples[theta][arm] -> tuple of floats
    fallback_mean: np.ndarray  # shape (|theta|, K)
    n_arms: int = field(init=False)

    def __post_init__(self):
        fallback = np.asarray(self.fallback_mean, dtype=float)
        if fallback.ndim != 2:
            raise ValueError("fallback_mean must be a |theta| x K table")
        n_theta, n_arms = fallback.shape
        if len(self.samples) != n_theta:
            raise ValueError("samples and fallback_mean disagree on |theta|")
        frozen = []
        for j, row in enumerate(self.samples):
            if len(row) != n_arms:
                raise ValueError("samples and fallback_mean disagree on K")
            cells = []
            for k, cell in enumerate(row):
                cell = tuple(float(v) for v in cell)
                if not cell and not math.isfinite(fallback[j, k]):
                    raise ValueError(
                        f"cell theta={j} arm={k} has no samples and no finite fallback"
                    )
                cells.append(cell)
            frozen.append(tuple(cells))
        fallback.setflags(write=False)
        object.__setattr__(self, "samples", tuple(frozen))
        object.__setattr__(self, "fallback_mean", fallback)
        object.__setattr__(self, "n_arms", n_arms)


def empirical_draw(pool: EmpiricalPool, theta_star: int, arm: int, rng) -> float:
    """Uniform draw with replacement from the cell; empty cells return the
    fallback mean without consuming randomness."""
    cell = pool.samples[theta_star][arm]
    if not cell:
        return float(pool.fallback_mean[theta_star, arm])
    return cell[int(rng.integers(len(cell)))]
