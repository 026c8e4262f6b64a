"""Hidden-parameter reward models on a finite parameter grid.

A model is a table of mean rewards, one row per arm and one column per
grid point of the hidden parameter, plus a sub-Gaussian variance proxy.
All offline structure analysis (optimality gaps, competitive arms,
degrees of non-competitiveness) lives here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ThetaGrid",
    "RewardModel",
    "GapProfile",
    "CompetitiveAnalysis",
    "build_from_table",
    "build_linear",
    "gap_profile",
    "competitive_analysis",
    "DEFAULT_TOL",
]

# Closed tolerance used for grid-value comparisons; absorbs float noise
# introduced when tables are built from arithmetic expressions.
DEFAULT_TOL = 1e-9


def _as_point_matrix(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
        raise ValueError("grid needs at least one point of dimension >= 1")
    return pts


@dataclass(frozen=True, eq=False)
class ThetaGrid:
    """Ordered finite set of parameter points.

    Indices into `points` are stable identifiers: the order never changes
    after construction.
    """

    points: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = _as_point_matrix(self.points)
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        seen = set()
        for row in pts:
            key = tuple(row.tolist())
            if key in seen:
                raise ValueError(f"duplicate grid point {key}")
            seen.add(key)
        if self.labels is not None and len(self.labels) != pts.shape[0]:
            raise ValueError("labels length must match number of points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def point(self, index: int) -> tuple[float, ...]:
        return tuple(self.points[index].tolist())

    def index_of(self, value, tol: float = DEFAULT_TOL) -> int:
        """Resolve a parameter value to its grid index.

        Matching uses the max-norm with tolerance `tol`; raises KeyError
        when no point matches.
        """
        v = np.atleast_1d(np.asarray(value, dtype=float))
        if v.shape != (self.dim,):
            raise KeyError(f"value has dimension {v.shape}, grid has dimension {self.dim}")
        dist = np.max(np.abs(self.points - v[None, :]), axis=1)
        j = int(np.argmin(dist))
        if dist[j] <= tol:
            return j
        raise KeyError(f"value {tuple(v.tolist())} is not on the grid")

    def nearest(self, value, k: int = 3) -> list[tuple[int, tuple[float, ...]]]:
        """The `k` grid points closest (max-norm) to `value`, for error messages."""
        v = np.atleast_1d(np.asarray(value, dtype=float))
        dist = np.max(np.abs(self.points - v[None, :]), axis=1)
        order = np.argsort(dist, kind="stable")[:k]
        return [(int(j), self.point(int(j))) for j in order]


@dataclass(frozen=True, eq=False)
class RewardModel:
    """Immutable structured-bandit instance: grid, mean table, variance proxy."""

    grid: ThetaGrid
    means: np.ndarray  # shape (K, |grid|)
    sigma: float
    arm_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        if means.ndim != 2 or means.shape[0] < 1:
            raise ValueError("means must be a K x |grid| table with K >= 1")
        if means.shape[1] != self.grid.n_points:
            raise ValueError(
                f"means has {means.shape[1]} columns, grid has {self.grid.n_points} points"
            )
        if not np.all(np.isfinite(means)):
            raise ValueError("means table contains a non-finite entry")
        if not (self.sigma > 0):
            raise ValueError("sigma must be positive")
        means.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigma", float(self.sigma))
        labels = self.arm_labels or tuple(f"arm{k + 1}" for k in range(means.shape[0]))
        if len(labels) != means.shape[0]:
            raise ValueError("arm_labels length must match number of arms")
        object.__setattr__(self, "arm_labels", tuple(labels))

    @property
    def n_arms(self) -> int:
        return self.means.shape[0]

    def evaluate(self, arm: int, theta_index: int) -> float:
        return float(self.means[arm, theta_index])


def build_from_table(grid: ThetaGrid, means, sigma: float) -> RewardModel:
    """Build a model from an explicit K x |grid| mean-reward table."""
    return RewardModel(grid=grid, means=np.asarray(means, dtype=float), sigma=sigma)


def build_linear(features, grid: ThetaGrid, sigma: float) -> RewardModel:
    """Build a model whose arm means are inner products of arm features with theta."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise ValueError("features must be a K x m matrix")
    if x.shape[1] != grid.dim:
        raise ValueError(
            f"features have dimension {x.shape[1]}, grid has dimension {grid.dim}"
        )
    means = x @ grid.points.T
    return RewardModel(grid=grid, means=means, sigma=sigma)


@dataclass(frozen=True)
class GapProfile:
    """Optimal arm and sub-optimality gaps for a fixed true parameter."""

    theta_star_index: int
    optimal_arm: int
    gaps: tuple[float, ...]


def gap_profile(model: RewardModel, theta_star: int) -> GapProfile:
    """Optimal arm (ties to the lowest index) and per-arm gaps at `theta_star`."""
    col = model.means[:, theta_star]
    k_star = int(np.argmax(col))  # argmax returns the first maximizer
    gaps = tuple(float(col[k_star] - col[k]) for k in range(model.n_arms))
    return GapProfile(theta_star_index=int(theta_star), optimal_arm=k_star, gaps=gaps)


@dataclass(frozen=True)
class CompetitiveAnalysis:
    """Asymptotic competitiveness structure at a fixed true parameter.

    `theta_star_set` collects the grid indices whose optimal-arm mean matches
    its value at the true parameter (within tolerance). An arm is flagged
    competitive when it attains the column maximum, within tolerance, at some
    point of that set. `degrees` maps each non-competitive arm to the largest
    tolerance-window half-width that still keeps it sub-optimal everywhere in
    the window.

    On a finite grid the exact-preimage competitive count and its open-window
    limit coincide (there is always a positive window width that excludes
    every off-set grid point), so `count` is the single competitive-arm count
    this package uses. A count of 1 is the diagnostic for the bounded-regret
    regime: every sub-optimal arm stops being pulled after finitely many
    rounds under the confidence-set policies.
    """

    theta_star_set: tuple[int, ...]
    competitive: tuple[bool, ...]
    count: int
    degrees: dict[int, float]
    gap_profile: GapProfile
    tol: float


def competitive_analysis(
    model: RewardModel, theta_star: int, tol: float = DEFAULT_TOL
) -> CompetitiveAnalysis:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    gp = gap_profile(model, theta_star)
    k_star = gp.optimal_arm
    means = model.means
    v_star = means[k_star, theta_star]

    dist = np.abs(means[k_star, :] - v_star)  # candidate window widths, one per point
    star_mask = dist <= tol
    theta_star_set = tuple(int(j) for j in np.flatnonzero(star_mask))

    col_max = means.max(axis=0)
    is_top = means >= (col_max - tol)[None, :]  # within-tol argmax flags, ties included

    competitive = tuple(bool(np.any(is_top[k, star_mask])) for k in range(model.n_arms))

    degrees: dict[int, float] = {}
    for k in range(model.n_arms):
        if competitive[k]:
            continue
        # Walk candidate widths in increasing order; the window {dist < eps}
        # only grows, so the largest admissible candidate is the first one
        # whose open window swallows a point where arm k is (near-)optimal.
        order = np.argsort(dist, kind="stable")
        eps_k = 0.0
        for j in order:
            if is_top[k, j]:
                eps_k = float(dist[j])
                break
        else:
            eps_k = float(dist[order[-1]])
        degrees[k] = eps_k

    return CompetitiveAnalysis(
        theta_star_set=theta_star_set,
        competitive=competitive,
        count=int(sum(competitive)),
        degrees=degrees,
        gap_profile=gp,
        tol=float(tol),
    )
