"""Confidence-set construction and the competitive-arm set.

The per-round set computations are the simulator's hot path, so each model
gets a lazily built search index: per arm, the grid sorted by mean value
plus prefix bitmasks over grid indices. Membership of the confidence set
for one arm is then two bisections and two big-int mask operations instead
of a scan over the grid, and the competitive test is one mask AND per arm.
The public functions below are thin wrappers over that index, so tests and
the simulator exercise the same code.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .model import RewardModel

__all__ = [
    "ArmStatistics",
    "ConfidenceSet",
    "CompetitiveSet",
    "confidence_radius",
    "build_confidence_set",
    "competitive_arms",
]


@dataclass
class ArmStatistics:
    """Pull counts and empirical means after `t` elapsed rounds.

    `means[k]` is only meaningful when `counts[k] > 0`; unpulled arms carry
    a NaN sentinel. The simulator maintains `sum(counts) == t`.
    """

    counts: list[int]
    means: list[float]
    t: int

    @classmethod
    def empty(cls, n_arms: int) -> "ArmStatistics":
        return cls(counts=[0] * n_arms, means=[math.nan] * n_arms, t=0)


def confidence_radius(n: int, t: int, alpha: float, sigma: float) -> float:
    """Half-width sqrt(2*alpha*sigma^2*ln(t)/n) of one arm's mean interval."""
    if n < 1:
        raise ValueError("confidence_radius requires at least one pull")
    if t < 1:
        raise ValueError("confidence_radius requires t >= 1")
    return math.sqrt(2.0 * alpha * sigma * sigma * math.log(t) / n)


@dataclass(frozen=True)
class ConfidenceSet:
    """Grid indices consistent with every pulled arm's empirical mean.

    Stored as a bitmask over grid indices (bit j <-> grid point j).
    """

    bits: int
    n_points: int
    t: int

    @property
    def member_indices(self) -> tuple[int, ...]:
        return tuple(_iter_bits(self.bits))

    @property
    def empty_fallback_triggered(self) -> bool:
        return self.bits == 0

    def __contains__(self, index: int) -> bool:
        return bool((self.bits >> index) & 1)


@dataclass(frozen=True)
class CompetitiveSet:
    arms: tuple[int, ...]

    def __contains__(self, arm: int) -> bool:
        return arm in self.arms


def _iter_bits(bits: int):
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class _ModelSetIndex:
    """Per-model sorted orders, prefix masks and exact-argmax masks."""

    def __init__(self, model: RewardModel):
        means = model.means
        self.n_arms, self.n_points = means.shape
        self.full_mask = (1 << self.n_points) - 1
        self.sorted_vals: list[list[float]] = []
        self.prefix: list[list[int]] = []
        for k in range(self.n_arms):
            order = np.argsort(means[k], kind="stable")
            vals = means[k, order].tolist()
            masks = [0] * (self.n_points + 1)
            acc = 0
            for i, j in enumerate(order.tolist()):
                acc |= 1 << j
                masks[i + 1] = acc
            self.sorted_vals.append(vals)
            self.prefix.append(masks)
        col_max = means.max(axis=0)
        self.argmax_bits = [
            int_from_mask(means[k] == col_max) for k in range(self.n_arms)
        ]

    def member_bits(self, counts, means_hat, t: int, two_alpha_sigma_sq: float) -> int:
        """Bitmask of grid points within every pulled arm's open interval."""
        log_t = math.log(t)
        bits = self.full_mask
        for k in range(self.n_arms):
            n_k = counts[k]
            if n_k == 0:
                continue  # unpulled arms impose no constraint
            r = math.sqrt(two_alpha_sigma_sq * log_t / n_k)
            mu = means_hat[k]
            vals = self.sorted_vals[k]
            lo = bisect_right(vals, mu - r)  # first value strictly above mu - r
            hi = bisect_left(vals, mu + r)  # first value at or above mu + r
            if hi <= lo:
                return 0
            bits &= self.prefix[k][hi] & ~self.prefix[k][lo]
            if not bits:
                return 0
        return bits

    def competitive_arm_tuple(self, bits: int) -> tuple[int, ...]:
        if bits == 0:
            return tuple(range(self.n_arms))
        return tuple(k for k in range(self.n_arms) if self.argmax_bits[k] & bits)

    def sup_value(self, bits: int, arm: int) -> float:
        """Max of the arm's means over a non-empty member bitmask."""
        prefix = self.prefix[arm]
        lo, hi = 0, self.n_points - 1
        # Largest sorted rank whose value-suffix still intersects the members.
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if bits & ~prefix[mid]:
                lo = mid
            else:
                hi = mid - 1
        return self.sorted_vals[arm][lo]


def int_from_mask(mask: np.ndarray) -> int:
    bits = 0
    for j in np.flatnonzero(mask):
        bits |= 1 << int(j)
    return bits


def set_index_for(model: RewardModel) -> _ModelSetIndex:
    idx = getattr(model, "_set_index", None)
    if idx is None:
        idx = _ModelSetIndex(model)
        object.__setattr__(model, "_set_index", idx)
    return idx


def build_confidence_set(
    model: RewardModel, stats: ArmStatistics, alpha: float
) -> ConfidenceSet:
    """Grid points whose means lie strictly within every pulled arm's interval.

    The inequality is strict, so at t = 1 (radius zero) any pulled arm makes
    the set empty and the all-arms fallback engages downstream.
    """
    if stats.t < 1:
        raise ValueError("confidence set is defined for t >= 1")
    index = set_index_for(model)
    bits = index.member_bits(
        stats.counts, stats.means, stats.t, 2.0 * alpha * model.sigma * model.sigma
    )
    return ConfidenceSet(bits=bits, n_points=index.n_points, t=stats.t)


def competitive_arms(model: RewardModel, conf: ConfidenceSet) -> CompetitiveSet:
    """Arms attaining the exact column maximum at some member point.

    Ties are inclusive: every argmax arm at a member point is competitive.
    On an empty confidence set the fallback returns all arms.
    """
    index = set_index_for(model)
    return CompetitiveSet(arms=index.competitive_arm_tuple(conf.bits))
