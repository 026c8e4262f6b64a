"""Policy layer: classic base algorithms, the confidence-set wrapper that
turns any of them into a structured policy, the informative add-on, and the
sup-based baseline.

All step functions are deterministic functions of (model, stats, params, rng
state). Thompson steps consume exactly one normal variate per candidate arm,
in ascending arm order; the informative wrapper consumes one uniform variate
for its exploration coin and, for the random metric only, one extra draw to
pick the arm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .confidence import (
    ArmStatistics,
    CompetitiveSet,
    ConfidenceSet,
    build_confidence_set,
    set_index_for,
)
from .model import RewardModel

__all__ = [
    "PolicyParams",
    "InformativeParams",
    "InformativenessScores",
    "ucb_index",
    "ts_sample",
    "klucb_index",
    "select_with_base",
    "algorithm_c_step",
    "ucb_s_step",
    "sup_argmax_arm",
    "informativeness",
    "informative_c_step",
    "exploration_probability",
    "ALGORITHM_IDS",
    "parse_algorithm_id",
    "policy_step",
]

BASES = ("ucb", "ts", "klucb")
METRICS = ("variance", "entropy", "random")

# External algorithm identifiers, exactly as they appear in configs and CSVs.
ALGORITHM_IDS = (
    "ucb",
    "ts",
    "klucb",
    "ucb-c",
    "ts-c",
    "klucb-c",
    "ucb-s",
    "ucb-c-kldiv",
    "ucb-c-entropy",
    "ucb-c-random",
    "ts-c-kldiv",
    "ts-c-entropy",
    "ts-c-random",
)

_METRIC_SUFFIX = {"kldiv": "variance", "entropy": "entropy", "random": "random"}


@dataclass(frozen=True)
class InformativeParams:
    metric: str = "variance"
    gamma: float = 30.0
    d: float = 1.1

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown informativeness metric {self.metric!r}")
        if not (self.gamma > 0):
            raise ValueError("gamma must be positive")
        if not (self.d > 1):
            raise ValueError("d must exceed 1")


@dataclass(frozen=True)
class PolicyParams:
    alpha: float = 3.0
    beta: float = 1.0
    base: str = "ucb"
    informative: InformativeParams | None = None

    def __post_init__(self):
        if not (self.alpha > 2):
            raise ValueError("alpha must exceed 2")
        if not (self.beta > 0):
            raise ValueError("beta must be positive")
        if self.base not in BASES:
            raise ValueError(f"unknown base algorithm {self.base!r}")


def ucb_index(mean: float, n: int, t: int, alpha: float, sigma: float) -> float:
    """Empirical mean plus the exploration bonus sqrt(2*alpha*sigma^2*ln t/n)."""
    if n == 0:
        return math.inf
    return mean + math.sqrt(2.0 * alpha * sigma * sigma * math.log(t) / n)


def ts_sample(mean: float, n: int, beta: float, sigma: float, rng) -> float:
    """One Gaussian posterior draw with variance beta*sigma^2/n."""
    if n == 0:
        return math.inf
    return mean + math.sqrt(beta * sigma * sigma / n) * rng.standard_normal()


def klucb_index(mean: float, n: int, t: int, sigma: float) -> float:
    """Gaussian KL-UCB closed form: mean + sqrt(2*sigma^2*f(t)/n).

    f(t) = ln t + 3 ln(max(1, ln t)); reduces to the plain mean at t = 1.
    """
    if n == 0:
        return math.inf
    log_t = math.log(t)
    f = log_t + 3.0 * math.log(max(1.0, log_t))
    return mean + math.sqrt(2.0 * sigma * sigma * f / n)


def select_with_base(
    base: str,
    candidates,
    stats: ArmStatistics,
    params: PolicyParams,
    rng,
    sigma: float,
) -> int:
    """Argmax of the base algorithm's index/sample over the candidate arms.

    Unpulled candidates win immediately (lowest index first) without touching
    the rng; ties in the scores go to the lowest arm index. With all arms as
    candidates this is exactly the classic base algorithm.
    """
    arms = candidates.arms if isinstance(candidates, CompetitiveSet) else tuple(candidates)
    if not arms:
        raise ValueError("candidate set must be non-empty")
    for k in arms:
        if stats.counts[k] == 0:
            return k
    t = stats.t
    best_arm = arms[0]
    if base == "ucb":
        coef = 2.0 * params.alpha * sigma * sigma * math.log(t)
        best = stats.means[best_arm] + math.sqrt(coef / stats.counts[best_arm])
        for k in arms[1:]:
            score = stats.means[k] + math.sqrt(coef / stats.counts[k])
            if score > best:
                best, best_arm = score, k
    elif base == "klucb":
        best = klucb_index(stats.means[best_arm], stats.counts[best_arm], t, sigma)
        for k in arms[1:]:
            score = klucb_index(stats.means[k], stats.counts[k], t, sigma)
            if score > best:
                best, best_arm = score, k
    elif base == "ts":
        best = ts_sample(stats.means[best_arm], stats.counts[best_arm], params.beta, sigma, rng)
        for k in arms[1:]:
            score = ts_sample(stats.means[k], stats.counts[k], params.beta, sigma, rng)
            if score > best:
                best, best_arm = score, k
    else:
        raise ValueError(f"unknown base algorithm {base!r}")
    return best_arm


def algorithm_c_step(
    model: RewardModel, stats: ArmStatistics, params: PolicyParams, rng
) -> tuple[int, ConfidenceSet, CompetitiveSet]:
    """One structured round: confidence set, competitive set, base selection."""
    conf = build_confidence_set(model, stats, params.alpha)
    cands = CompetitiveSet(arms=set_index_for(model).competitive_arm_tuple(conf.bits))
    arm = select_with_base(params.base, cands, stats, params, rng, model.sigma)
    return arm, conf, cands


def sup_argmax_arm(model: RewardModel, conf: ConfidenceSet) -> int:
    """Arm maximizing the sup of its mean function over the member set;
    empty sets fall back to the full grid. Ties go to the lowest index."""
    index = set_index_for(model)
    bits = conf.bits if conf.bits else index.full_mask
    best_arm = 0
    best = index.sup_value(bits, 0)
    for k in range(1, model.n_arms):
        v = index.sup_value(bits, k)
        if v > best:
            best, best_arm = v, k
    return best_arm


def ucb_s_step(
    model: RewardModel, stats: ArmStatistics, params: PolicyParams, rng
) -> int:
    """Baseline: argmax over arms of the sup of the mean over the confidence
    set, built exactly as for the structured policies."""
    del rng
    return sup_argmax_arm(model, build_confidence_set(model, stats, params.alpha))


@dataclass(frozen=True)
class InformativenessScores:
    scores: tuple[float, ...]


_ENTROPY_QUANTUM = 1e-6


def informativeness(
    metric: str, model: RewardModel, conf: ConfidenceSet
) -> InformativenessScores:
    """Score each arm by how much its mean function varies over the member set.

    variance: population variance of the arm's means under the uniform
    distribution on the members. entropy: Shannon entropy (nats) of the
    member means after quantizing values to 1e-6. random: all scores equal,
    selection then draws an arm uniformly. An empty confidence set falls back
    to the full grid.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown informativeness metric {metric!r}")
    if metric == "random":
        return InformativenessScores(scores=(0.0,) * model.n_arms)
    members = conf.member_indices if conf.bits else tuple(range(model.grid.n_points))
    sub = model.means[:, members]
    if metric == "variance":
        scores = tuple(float(v) for v in sub.var(axis=1))
    else:
        scores = []
        for k in range(model.n_arms):
            atoms = np.round(sub[k] / _ENTROPY_QUANTUM).astype(np.int64)
            _, counts = np.unique(atoms, return_counts=True)
            p = counts / counts.sum()
            scores.append(float(-(p * np.log(p)).sum()))
        scores = tuple(scores)
    return InformativenessScores(scores=scores)


def exploration_probability(t: int, gamma: float, d: float) -> float:
    """Chance of playing the most informative arm at round t, clamped to 1."""
    return min(1.0, gamma / t**d)


def informative_c_step(
    model: RewardModel, stats: ArmStatistics, params: PolicyParams, rng
) -> int:
    """Play the most informative arm with probability min(1, gamma/t^d),
    otherwise fall through to the structured step."""
    info = params.informative
    if info is None:
        raise ValueError("informative parameters are required for this step")
    p = exploration_probability(stats.t, info.gamma, info.d)
    if rng.random() < p:
        if info.metric == "random":
            return int(rng.integers(model.n_arms))
        conf = build_confidence_set(model, stats, params.alpha)
        scores = informativeness(info.metric, model, conf).scores
        best_arm = 0
        best = scores[0]
        for k in range(1, model.n_arms):
            if scores[k] > best:
                best, best_arm = scores[k], k
        return best_arm
    arm, _, _ = algorithm_c_step(model, stats, params, rng)
    return arm


def parse_algorithm_id(algorithm_id: str) -> tuple[str, str, str | None]:
    """Split an external id into (kind, base, metric).

    kind is one of 'classic', 'structured', 'sup', 'informative'.
    """
    if algorithm_id in BASES:
        return "classic", algorithm_id, None
    if algorithm_id == "ucb-s":
        return "sup", "ucb", None
    parts = algorithm_id.split("-")
    if len(parts) == 2 and parts[1] == "c" and parts[0] in BASES:
        return "structured", parts[0], None
    if (
        len(parts) == 3
        and parts[1] == "c"
        and parts[0] in BASES
        and parts[2] in _METRIC_SUFFIX
    ):
        return "informative", parts[0], _METRIC_SUFFIX[parts[2]]
    raise ValueError(f"unknown algorithm id {algorithm_id!r}")


def policy_step(
    algorithm_id: str,
    model: RewardModel,
    stats: ArmStatistics,
    params: PolicyParams,
    rng,
    all_arms: tuple[int, ...] | None = None,
) -> int:
    """Dispatch one round of the named algorithm; returns the chosen arm."""
    kind, base, _metric = parse_algorithm_id(algorithm_id)
    if kind == "classic":
        arms = all_arms if all_arms is not None else tuple(range(model.n_arms))
        return select_with_base(base, arms, stats, params, rng, model.sigma)
    if kind == "sup":
        return ucb_s_step(model, stats, params, rng)
    if kind == "structured":
        arm, _, _ = algorithm_c_step(model, stats, params, rng)
        return arm
    return informative_c_step(model, stats, params, rng)
