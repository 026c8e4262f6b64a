"""Finite-time pull-count and regret bound calculators.

These evaluate the closed-form upper bounds on expected pulls: the bounded
(O(1)) expressions for non-competitive arms, driven by the constants t0/tb,
and the logarithmic expressions for competitive sub-optimal arms. Outside
their validity ranges the result is an explicit invalid marker, never a
number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CompetitiveAnalysis, RewardModel

__all__ = ["BoundValue", "ArmBoundReport", "TheoremBounds", "theorem_bounds", "SCAN_CAP"]

SCAN_CAP = 10**9


@dataclass(frozen=True)
class BoundValue:
    value: float | None
    valid: bool
    reason: str = ""

    def __format__(self, spec: str) -> str:
        if self.valid and self.value is not None:
            return format(self.value, spec or ".4g")
        return f"not valid ({self.reason})"


def _invalid(reason: str) -> BoundValue:
    return BoundValue(value=None, valid=False, reason=reason)


def _smallest_tau(limit: float, coef: float, start: int, cap: int = SCAN_CAP) -> BoundValue:
    """Smallest integer tau >= start with coef*sqrt(ln(tau)/tau) <= limit.

    ln(tau)/tau peaks at e, so the predicate is monotone for tau >= 3; the
    first few integers are checked directly and the monotone region is
    bisected. Equivalent to a linear scan, without its runtime.
    """
    if limit <= 0:
        return _invalid("threshold must be positive")
    if start > cap:
        return _invalid(f"lower limit {start} exceeds scan cap {cap}")

    def ok(tau: int) -> bool:
        return coef * math.sqrt(math.log(tau) / tau) <= limit

    for tau in range(start, min(start + 3, 4, cap + 1)):
        if ok(tau):
            return BoundValue(value=float(tau), valid=True)
    lo = max(start, 4)
    if lo > cap or not ok(cap):
        return _invalid(f"no tau <= scan cap {cap} satisfies the threshold")
    if ok(lo):
        return BoundValue(value=float(lo), valid=True)
    hi = cap
    while hi - lo > 1:  # ok(lo) is False, ok(hi) is True
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return BoundValue(value=float(hi), valid=True)


_CHUNK = 4_000_000


def _sum_power(lo: int, hi: int, p: float) -> float:
    """Sum of t**p for integer t in [lo, hi]; empty ranges give 0.

    Chunked so absurd horizons cannot exhaust memory; p < -1 tails are cut
    off once the remaining integral bound is negligible.
    """
    if hi < lo:
        return 0.0
    total = 0.0
    start = lo
    while start <= hi:
        stop = min(start + _CHUNK - 1, hi)
        t = np.arange(start, stop + 1, dtype=float)
        total += float(np.sum(t**p))
        start = stop + 1
        if p < -1.0 and start <= hi:
            tail_bound = (start - 1) ** (p + 1.0) / -(p + 1.0)
            if tail_bound < 1e-12 * max(total, 1.0):
                break
    return total


def _probe_floor(beta: float, sigma: float) -> float | None:
    try:
        v = math.exp(11.0 * beta * sigma * sigma)
    except OverflowError:
        return None
    return v if math.isfinite(v) else None


@dataclass(frozen=True)
class ArmBoundReport:
    arm: int
    label: str
    kind: str  # optimal | competitive | non-competitive
    gap: float
    epsilon: float | None
    t0: BoundValue
    tb: BoundValue
    ucb_c: BoundValue
    ts_c: BoundValue


@dataclass(frozen=True)
class TheoremBounds:
    arms: tuple[ArmBoundReport, ...]
    total_ucb_c: BoundValue
    total_ts_c: BoundValue
    alpha: float
    beta: float
    horizon: int


def theorem_bounds(
    analysis: CompetitiveAnalysis,
    model: RewardModel,
    alpha: float,
    beta: float,
    horizon: int,
) -> TheoremBounds:
    """Per-arm pull-count bounds at the given horizon plus regret totals.

    Non-competitive arms get the bounded expressions (constants t0 for the
    UCB variant, tb with floor exp(11*beta*sigma^2) for the Thompson
    variant); competitive sub-optimal arms get the logarithmic expressions.
    The total is the gap-weighted sum over sub-optimal arms.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    k = model.n_arms
    sigma = model.sigma
    gp = analysis.gap_profile
    t_total = int(horizon)
    log_t = math.log(t_total)

    sum_2k = 2.0 * k * _sum_power(1, t_total, 1.0 - alpha)
    # min over sub-optimal arms; a co-optimal tie makes it 0 and the
    # bounded-pull constants undefined
    sub_gaps = [g for i, g in enumerate(gp.gaps) if i != gp.optimal_arm]
    delta_min = min(sub_gaps) if sub_gaps else 0.0
    floor = _probe_floor(beta, sigma)

    reports: list[ArmBoundReport] = []
    na = _invalid("not applicable")
    for arm in range(k):
        gap = gp.gaps[arm]
        if arm == gp.optimal_arm:
            reports.append(
                ArmBoundReport(arm, model.arm_labels[arm], "optimal", gap, None, na, na, na, na)
            )
            continue

        if analysis.competitive[arm]:
            if gap == 0.0:
                zero = _invalid("zero gap (co-optimal arm)")
                reports.append(
                    ArmBoundReport(
                        arm, model.arm_labels[arm], "competitive", gap, None, na, na, zero, zero
                    )
                )
                continue
            if alpha > 2:
                ucb_c = BoundValue(
                    8.0 * alpha * sigma * sigma * log_t / gap**2
                    + 2.0 * alpha / (alpha - 2.0)
                    + sum_2k,
                    True,
                )
                if floor is None:
                    ts_c = _invalid("exp(11*beta*sigma^2) overflows")
                else:
                    ts_c = BoundValue(
                        9.0 * beta * sigma * sigma * log_t / (2.0 * gap**2)
                        + 3.0
                        + floor
                        + 2.0 * _sum_power(1, t_total, -2.0 * beta) / gap ** (4.0 * beta)
                        + sum_2k,
                        True,
                    )
            else:
                ucb_c = _invalid("requires alpha > 2")
                ts_c = _invalid("requires alpha > 2")
            reports.append(
                ArmBoundReport(
                    arm, model.arm_labels[arm], "competitive", gap, None, na, na, ucb_c, ts_c
                )
            )
            continue

        eps = analysis.degrees[arm]
        threshold = min(delta_min, eps)
        if threshold <= 0:
            bad = _invalid("Delta_min is zero (tied optimal arms)")
            reports.append(
                ArmBoundReport(
                    arm, model.arm_labels[arm], "non-competitive", gap, eps, bad, bad, bad, bad
                )
            )
            continue

        t0 = _smallest_tau(threshold, 4.0 * math.sqrt(k * alpha) * sigma, start=2)
        if floor is None:
            tb = _invalid("exp(11*beta*sigma^2) overflows")
        elif floor > SCAN_CAP:
            tb = _invalid(f"floor exp(11*beta*sigma^2) = {floor:.3g} exceeds scan cap")
        else:
            tb = _smallest_tau(
                threshold,
                3.0 * math.sqrt(3.0 * k * alpha) * sigma,
                start=max(2, math.ceil(floor)),
            )

        if alpha <= 3:
            ucb_c = _invalid("requires alpha > 3")
        elif not t0.valid:
            ucb_c = _invalid(f"t0 unavailable: {t0.reason}")
        else:
            kt0 = int(k * t0.value)
            ucb_c = BoundValue(
                k * t0.value
                + sum_2k
                + 6.0 * k ** (3.0 - (2.0 - alpha)) * _sum_power(kt0, t_total, 2.0 - alpha),
                True,
            )
        if alpha <= 3 or beta <= 1:
            ts_c = _invalid("requires alpha > 3 and beta > 1")
        elif not tb.valid:
            ts_c = _invalid(f"tb unavailable: {tb.reason}")
        else:
            ktb = int(k * tb.value)
            ts_c = BoundValue(
                k * tb.value
                + sum_2k
                + 4.0 * k ** (3.0 - (2.0 - alpha)) * _sum_power(ktb, t_total, 2.0 - alpha)
                + k ** (2.0 - (1.0 - 2.0 * beta)) * _sum_power(ktb, t_total, 1.0 - 2.0 * beta),
                True,
            )
        reports.append(
            ArmBoundReport(
                arm, model.arm_labels[arm], "non-competitive", gap, eps, t0, tb, ucb_c, ts_c
            )
        )

    def total(side: str) -> BoundValue:
        acc = 0.0
        for rep in reports:
            if rep.kind == "optimal" or rep.gap == 0.0:
                continue  # zero-gap arms contribute nothing to regret
            bv = rep.ucb_c if side == "ucb" else rep.ts_c
            if not bv.valid:
                return _invalid(f"arm {rep.arm + 1}: {bv.reason}")
            acc += bv.value * rep.gap
        return BoundValue(acc, True)

    return TheoremBounds(
        arms=tuple(reports),
        total_ucb_c=total("ucb"),
        total_ts_c=total("ts"),
        alpha=float(alpha),
        beta=float(beta),
        horizon=t_total,
    )
