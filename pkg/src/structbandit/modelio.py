"""Model exchange format.

A model file is a JSON document:

    {"grid": [[...], ...], "labels": [...], "sigma": s,
     "arms": [{"label": ..., "means": [...]}, ...]}

with an optional "pools" object mapping "thetaIndex:arm" to reward sample
arrays for empirical replay. Field names are fixed; files round-trip
losslessly through the table constructor.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .environment import EmpiricalPool
from .model import RewardModel, ThetaGrid, build_from_table

__all__ = ["model_to_dict", "model_from_dict", "save_model", "load_model", "load_pool"]


def model_to_dict(model: RewardModel, pools: dict[tuple[int, int], list[float]] | None = None) -> dict:
    doc = {
        "grid": [list(p) for p in model.grid.points.tolist()],
        "labels": list(model.grid.labels) if model.grid.labels else None,
        "sigma": model.sigma,
        "arms": [
            {"label": model.arm_labels[k], "means": model.means[k].tolist()}
            for k in range(model.n_arms)
        ],
    }
    if pools is not None:
        doc["pools"] = {
            f"{j}:{k}": [float(v) for v in vals] for (j, k), vals in pools.items()
        }
    return doc


def model_from_dict(doc: dict) -> RewardModel:
    try:
        grid = ThetaGrid(
            points=np.asarray(doc["grid"], dtype=float),
            labels=tuple(doc["labels"]) if doc.get("labels") else None,
        )
        means = [arm["means"] for arm in doc["arms"]]
        labels = tuple(str(arm.get("label", f"arm{i + 1}")) for i, arm in enumerate(doc["arms"]))
        sigma = float(doc["sigma"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model document: {exc}") from exc
    model = build_from_table(grid, means, sigma)
    return RewardModel(grid=grid, means=model.means, sigma=sigma, arm_labels=labels)


def save_model(path, model: RewardModel, pools=None) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, pools), indent=1))


def load_model(path) -> RewardModel:
    return model_from_dict(json.loads(Path(path).read_text()))


def load_pool(path, model: RewardModel | None = None) -> EmpiricalPool:
    """Build the replay pool from a model file's "pools" field.

    Cells without samples fall back to the model's mean table.
    """
    doc = json.loads(Path(path).read_text())
    if model is None:
        model = model_from_dict(doc)
    n_theta = model.grid.n_points
    samples = [[() for _ in range(model.n_arms)] for _ in range(n_theta)]
    for key, vals in doc.get("pools", {}).items():
        j_str, k_str = key.split(":")
        samples[int(j_str)][int(k_str)] = tuple(float(v) for v in vals)
    return EmpiricalPool(
        samples=tuple(tuple(row) for row in samples),
        fallback_mean=model.means.T.copy(),
    )
