"""Bundled experiment scenarios.

Each builder tabulates its reward curves on a finite grid and returns a
ready-to-run config. The single-parameter curve shapes are reconstructions
that honor the published optimal-arm regions and competitive-arm counts
(the original curves were only ever drawn, not given analytically), so
their scenario ids carry an "analogue" suffix. The two-dimensional models
use the published formulas directly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .simulation import AlgorithmSpec, ExperimentConfig

__all__ = ["SCENARIO_IDS", "bundled_config", "scenario_summaries", "write_bundled_scenarios"]


def _grid_1d(lo: float, hi: float, step: float) -> list[list[float]]:
    n = int(round((hi - lo) / step))
    return [[round(lo + i * step, 9)] for i in range(n + 1)]


def _grid_2d(lo: float, hi: float, step: float) -> list[list[float]]:
    n = int(round((hi - lo) / step))
    axis = [round(lo + i * step, 9) for i in range(n + 1)]
    return [[a, b] for a in axis for b in axis]


def _table_source(grid, means, sigma, arm_labels=None) -> dict:
    src = {"kind": "table", "grid": grid, "means": means, "sigma": sigma}
    if arm_labels:
        src["arm_labels"] = list(arm_labels)
    return src


def _specs(ids, **overrides) -> tuple[AlgorithmSpec, ...]:
    return tuple(AlgorithmSpec(id=i, **overrides) for i in ids)


def _three_hills() -> dict:
    """Three-arm single-parameter table: arm 2 best on [0,1], arm 3 on
    [1,2.5], arm 1 on [2.5,6]; competitive count is 1/2/3 at 0.5/1.5/2.6."""
    grid = _grid_1d(0.0, 6.0, 0.05)
    xs = [0.0, 0.25, 1.0, 1.8, 2.5, 2.6, 6.0]
    ys = [1.6, 1.5, 0.2, 1.5, 1.4, 1.5, 4.9]
    theta = np.array([p[0] for p in grid])
    mu1 = np.interp(theta, xs, ys)
    mu2 = 2.0 - theta
    mu3 = np.minimum(0.3 + 0.7 * theta, 2.65 - 0.5 * theta)
    return _table_source(grid, [mu1.tolist(), mu2.tolist(), mu3.tolist()], 2.0)


def _two_arm_crossing() -> dict:
    """Two arms on [0,6]: arm 2 best on [0,3), arm 1 on [3,6]; one
    competitive arm outside [3,5], two inside.

    Written so the crossing at theta=3 is an exact float tie.
    """
    grid = _grid_1d(0.0, 6.0, 0.05)
    theta = np.array([p[0] for p in grid])
    mu1 = (np.abs(theta - 2.5) - 0.5) / 2.0
    mu2 = (21.0 - 7.0 * theta) / 20.0
    return _table_source(grid, [mu1.tolist(), mu2.tolist()], 2.0)


def _planes_and_ridge(offset: float) -> dict:
    """Two-dimensional parameter on [-1,1]^2: sum plane, difference plane,
    max-abs ridge; the second and third arms are lowered by `offset`."""
    grid = _grid_2d(-1.0, 1.0, 0.05 if offset == 0.0 else 0.1)
    pts = np.array(grid)
    mu1 = pts[:, 0] + pts[:, 1]
    mu2 = pts[:, 0] - pts[:, 1] - offset
    mu3 = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1])) - offset
    return _table_source(grid, [mu1.tolist(), mu2.tolist(), mu3.tolist()], 2.0)


def _step_arm() -> dict:
    """Two nearly flat arms crossing just left of 3 plus a step arm that is
    sub-optimal everywhere but reveals which side of 3 the parameter is on.

    The step spans the full reward range so that a few dozen pulls pin its
    side even as the confidence radius grows with log t.
    """
    grid = _grid_1d(0.0, 6.0, 0.1)
    theta = np.array([p[0] for p in grid])
    mu1 = 4.5 + 0.05 * (theta - 2.95)
    mu2 = 4.5 - 0.05 * (theta - 2.95)
    mu3 = np.where(theta < 3.0, 0.0, 4.0)
    return _table_source(grid, [mu1.tolist(), mu2.tolist(), mu3.tolist()], 2.0)


def _build_three_arm_regions() -> ExperimentConfig:
    return ExperimentConfig(
        scenario_id="three_arm_regions_analogue",
        model_source=_three_hills(),
        theta_star={"sweep": [0.5, 1.5, 2.6]},
        algorithms=_specs(["ucb", "ucb-c", "ucb-s", "ts", "ts-c", "klucb", "klucb-c"]),
        horizon=50000,
        runs=100,
        master_seed=20240501,
    )


def _build_two_arm_sweep() -> ExperimentConfig:
    sweep = [round(0.25 * i, 9) for i in range(21)]
    return ExperimentConfig(
        scenario_id="two_arm_sweep_analogue",
        model_source=_two_arm_crossing(),
        theta_star={"sweep": sweep},
        algorithms=_specs(["ucb", "ucb-s", "ucb-c", "ts-c"]),
        horizon=50000,
        runs=100,
        master_seed=20240502,
    )


def _build_linear() -> ExperimentConfig:
    return ExperimentConfig(
        scenario_id="linear_bandit",
        model_source={
            "kind": "linear",
            "features": [[2.0, 1.0], [1.0, 1.5], [3.0, -1.0]],
            "grid": _grid_2d(0.0, 1.0, 0.05),
            "sigma": 2.0,
        },
        theta_star={"sweep": [[0.9, 0.9], [0.5, 0.5]]},
        algorithms=_specs(["ucb", "ucb-c", "ts-c"]),
        horizon=50000,
        runs=100,
        master_seed=20240503,
    )


def _build_multitheta() -> ExperimentConfig:
    return ExperimentConfig(
        scenario_id="multitheta_planes",
        model_source=_planes_and_ridge(0.0),
        theta_star={"sweep": [[0.9, 0.2], [-0.2, 0.1]]},
        algorithms=_specs(["ucb", "ucb-c", "ts-c"]),
        horizon=20000,
        runs=100,
        master_seed=20240504,
    )


def _build_starvation() -> ExperimentConfig:
    # offset 0.25 keeps every arm crossing off the 0.1 grid (no exact ties)
    # and gives non-competitiveness degrees 0.3 and 0.4
    return ExperimentConfig(
        scenario_id="starvation_multitheta",
        model_source=_planes_and_ridge(0.25),
        theta_star=[0.9, 0.2],
        algorithms=_specs(["ucb", "ucb-c", "ts", "ts-c"]),
        horizon=20000,
        runs=50,
        master_seed=20240505,
    )


def _build_step_informative() -> ExperimentConfig:
    return ExperimentConfig(
        scenario_id="step_informative_analogue",
        model_source=_step_arm(),
        theta_star=3.1,
        algorithms=_specs(
            [
                "ucb",
                "ucb-c",
                "ucb-c-kldiv",
                "ucb-c-entropy",
                "ucb-c-random",
                "ts",
                "ts-c",
                "ts-c-kldiv",
                "ts-c-entropy",
                "ts-c-random",
            ],
            gamma=30.0,
            d=1.1,
        ),
        horizon=20000,
        runs=100,
        master_seed=20240506,
    )


_BUILDERS = {
    "three_arm_regions_analogue": _build_three_arm_regions,
    "two_arm_sweep_analogue": _build_two_arm_sweep,
    "linear_bandit": _build_linear,
    "multitheta_planes": _build_multitheta,
    "starvation_multitheta": _build_starvation,
    "step_informative_analogue": _build_step_informative,
}

SCENARIO_IDS = tuple(_BUILDERS)

_DESCRIPTIONS = {
    "three_arm_regions_analogue": "3 arms on [0,6], competitive count 1/2/3 at theta* 0.5/1.5/2.6",
    "two_arm_sweep_analogue": "2 arms on [0,6], theta* sweep over [0,5]",
    "linear_bandit": "linear 3-arm bandit, 2-d theta on [0,1]^2",
    "multitheta_planes": "sum/difference/max arms on [-1,1]^2",
    "starvation_multitheta": "2-d theta with a single competitive arm (offset competitors)",
    "step_informative_analogue": "step arm scenario for informative exploration",
}


def bundled_config(name: str) -> ExperimentConfig:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown bundled scenario {name!r}; known: {', '.join(SCENARIO_IDS)}")


def scenario_summaries() -> list[dict]:
    return [{"id": sid, "description": _DESCRIPTIONS[sid]} for sid in SCENARIO_IDS]


def write_bundled_scenarios(directory) -> list[Path]:
    """Regenerate the shipped scenario JSON files (development helper)."""
    out = []
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for sid in SCENARIO_IDS:
        path = directory / f"{sid}.json"
        path.write_text(json.dumps(bundled_config(sid).to_dict(), indent=1))
        out.append(path)
    return out
