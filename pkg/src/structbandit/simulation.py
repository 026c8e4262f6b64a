"""Deterministic experiment runner.

A replication is the unit of work: one (scenario, algorithm, run) triple,
driven by generators derived from the master seed with a fixed mixing
function (documented on `mix64`). Reward randomness is keyed by
(scenario, run, arm) only, so the j-th pull of an arm yields the same
reward under every algorithm of that run; policy randomness is keyed by
(scenario, algorithm, run). Replications can therefore run in any order,
serial or parallel, and the emitted CSVs are byte-identical for a fixed
config.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import policies
from .confidence import ArmStatistics
from .environment import EmpiricalPool, empirical_draw
from .model import GapProfile, RewardModel, build_from_table, build_linear, gap_profile, ThetaGrid
from .modelio import load_model, load_pool
from .policies import InformativeParams, PolicyParams, parse_algorithm_id

__all__ = [
    "AlgorithmSpec",
    "ExperimentConfig",
    "RunTrace",
    "ExperimentResult",
    "ConfigError",
    "mix64",
    "run_replication",
    "run_experiment",
    "expand_sweep",
    "resolve_scenario",
    "write_csv_outputs",
    "config_from_dict",
    "config_from_file",
]


class ConfigError(ValueError):
    """Invalid experiment configuration; messages name the offending field."""


def mix64(*parts) -> int:
    """Fold a tuple of strings/ints into one 64-bit seed.

    Recipe (part of the external contract): FNV-1a over the UTF-8 bytes of
    the parts joined with unit separators, followed by two splitmix64
    finalization rounds.
    """
    data = "\x1f".join(str(p) for p in parts).encode("utf-8")
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    for _ in range(2):
        h = (h + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = h
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        h = z ^ (z >> 31)
    return h


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class AlgorithmSpec:
    id: str
    alpha: float = 3.0
    beta: float = 1.0
    gamma: float = 30.0
    d: float = 1.1

    def policy_params(self) -> PolicyParams:
        kind, base, metric = parse_algorithm_id(self.id)
        informative = (
            InformativeParams(metric=metric, gamma=self.gamma, d=self.d)
            if kind == "informative"
            else None
        )
        return PolicyParams(alpha=self.alpha, beta=self.beta, base=base, informative=informative)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario_id: str
    model_source: dict
    theta_star: object  # grid value (scalar or vector) or {"index": j}
    algorithms: tuple[AlgorithmSpec, ...]
    horizon: int
    runs: int
    master_seed: int
    record_every: int = 100
    environment: dict = field(default_factory=lambda: {"kind": "gaussian"})

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "model": self.model_source,
            "theta_star": self.theta_star,
            "algorithms": [
                {"id": a.id, "alpha": a.alpha, "beta": a.beta, "gamma": a.gamma, "d": a.d}
                for a in self.algorithms
            ],
            "horizon": self.horizon,
            "runs": self.runs,
            "master_seed": self.master_seed,
            "record_every": self.record_every,
            "environment": self.environment,
        }


def config_from_dict(doc: dict) -> ExperimentConfig:
    for name in (
        "scenario_id", "model", "theta_star", "algorithms", "horizon", "runs", "master_seed",
    ):
        if name not in doc:
            raise ConfigError(f"missing field: {name}")
    algo_docs = doc["algorithms"]
    algorithms = []
    seen = set()
    for entry in algo_docs:
        if isinstance(entry, str):
            entry = {"id": entry}
        spec = AlgorithmSpec(
            id=entry["id"],
            alpha=float(entry.get("alpha", 3.0)),
            beta=float(entry.get("beta", 1.0)),
            gamma=float(entry.get("gamma", 30.0)),
            d=float(entry.get("d", 1.1)),
        )
        try:
            parse_algorithm_id(spec.id)
        except ValueError as exc:
            raise ConfigError(str(exc))
        if spec.id in seen:
            raise ConfigError(f"duplicate algorithm id {spec.id!r}")
        seen.add(spec.id)
        algorithms.append(spec)
    if not algorithms:
        raise ConfigError("algorithms must be non-empty")
    cfg = ExperimentConfig(
        scenario_id=str(doc["scenario_id"]),
        model_source=doc["model"],
        theta_star=doc["theta_star"],
        algorithms=tuple(algorithms),
        horizon=int(doc["horizon"]),
        runs=int(doc["runs"]),
        master_seed=int(doc["master_seed"]),
        record_every=int(doc.get("record_every", 100)),
        environment=dict(doc.get("environment", {"kind": "gaussian"})),
    )
    _validate_config(cfg)
    return cfg


def config_from_file(path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    return config_from_dict(doc)


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.runs < 1:
        raise ConfigError("runs must be >= 1")
    if cfg.horizon < 1:
        raise ConfigError("horizon must be >= 1")
    if not (1 <= cfg.record_every <= cfg.horizon):
        raise ConfigError("record_every must be in [1, horizon]")
    if cfg.environment.get("kind", "gaussian") not in ("gaussian", "empirical"):
        raise ConfigError(f"unknown environment kind {cfg.environment.get('kind')!r}")


@dataclass(frozen=True)
class RunTrace:
    algorithm_id: str
    run: int
    checkpoints: tuple  # of (t, cumulative regret, per-arm pull counts)

    @property
    def final_regret(self) -> float:
        return self.checkpoints[-1][1]

    @property
    def final_pulls(self) -> tuple[int, ...]:
        return self.checkpoints[-1][2]


@dataclass(frozen=True)
class ResolvedScenario:
    """Config with the model, gaps and environment materialized."""

    config: ExperimentConfig
    model: RewardModel
    theta_index: int
    gaps: GapProfile
    pool: EmpiricalPool | None
    noise_sigma: float


def _resolve_model(source: dict) -> tuple[RewardModel, EmpiricalPool | None]:
    kind = source.get("kind", "table")
    if kind == "table":
        grid = ThetaGrid(
            points=np.asarray(source["grid"], dtype=float),
            labels=tuple(source["labels"]) if source.get("labels") else None,
        )
        model = build_from_table(grid, source["means"], float(source["sigma"]))
        if source.get("arm_labels"):
            model = RewardModel(
                grid=grid, means=model.means, sigma=model.sigma,
                arm_labels=tuple(source["arm_labels"]),
            )
        return model, None
    if kind == "linear":
        grid = ThetaGrid(points=np.asarray(source["grid"], dtype=float))
        return build_linear(source["features"], grid, float(source["sigma"])), None
    if kind == "file":
        path = source["path"]
        model = load_model(path)
        doc = json.loads(Path(path).read_text())
        pool = load_pool(path, model) if "pools" in doc else None
        return model, pool
    raise ConfigError(f"unknown model source kind {kind!r}")


def resolve_scenario(cfg: ExperimentConfig) -> ResolvedScenario:
    model, pool = _resolve_model(cfg.model_source)
    theta = cfg.theta_star
    if isinstance(theta, dict) and "index" in theta:
        theta_index = int(theta["index"])
        if not (0 <= theta_index < model.grid.n_points):
            raise ConfigError(f"theta_star index {theta_index} out of range")
    else:
        try:
            theta_index = model.grid.index_of(theta)
        except KeyError as exc:
            raise ConfigError(str(exc))
    if cfg.horizon < model.n_arms:
        raise ConfigError("horizon must be at least the number of arms")
    env = cfg.environment
    if env.get("kind", "gaussian") == "empirical":
        if pool is None:
            raise ConfigError("empirical environment requires a model file with pools")
    noise_sigma = float(env.get("noise_sigma", model.sigma))
    return ResolvedScenario(
        config=cfg, model=model, theta_index=theta_index,
        gaps=gap_profile(model, theta_index), pool=pool, noise_sigma=noise_sigma,
    )


@lru_cache(maxsize=8)
def _resolve_cached(config_json: str) -> ResolvedScenario:
    return resolve_scenario(config_from_dict(json.loads(config_json)))


def run_replication(
    cfg: ExperimentConfig | ResolvedScenario, algorithm_id: str, run: int
) -> RunTrace:
    """One full run of one algorithm: round-robin initialization, then the
    policy loop; per-round regret from the true gap profile."""
    scenario = cfg if isinstance(cfg, ResolvedScenario) else resolve_scenario(cfg)
    config = scenario.config
    spec = next((a for a in config.algorithms if a.id == algorithm_id), None)
    if spec is None:
        raise ValueError(f"algorithm {algorithm_id!r} is not part of this experiment")
    kind, base, _ = parse_algorithm_id(algorithm_id)
    params = spec.policy_params()

    model = scenario.model
    n_arms = model.n_arms
    horizon = config.horizon
    record_every = config.record_every
    gaps = scenario.gaps.gaps
    theta_index = scenario.theta_index
    empirical = config.environment.get("kind", "gaussian") == "empirical"
    pool = scenario.pool
    true_means = model.means[:, theta_index]
    noise = scenario.noise_sigma

    reward_rngs = [
        _generator(mix64(config.master_seed, config.scenario_id, "rewards", run, arm))
        for arm in range(n_arms)
    ]
    policy_rng = _generator(
        mix64(config.master_seed, config.scenario_id, "policy", algorithm_id, run)
    )

    counts = [0] * n_arms
    sums = [0.0] * n_arms
    means = [math.nan] * n_arms
    stats = ArmStatistics(counts=counts, means=means, t=0)
    all_arms = tuple(range(n_arms))

    cum_regret = 0.0
    checkpoints = []
    for t_round in range(1, horizon + 1):
        if t_round <= n_arms:
            arm = t_round - 1
        else:
            stats.t = t_round - 1
            if kind == "classic":
                arm = policies.select_with_base(
                    base, all_arms, stats, params, policy_rng, model.sigma
                )
            elif kind == "structured":
                arm, _, _ = policies.algorithm_c_step(model, stats, params, policy_rng)
            elif kind == "sup":
                arm = policies.ucb_s_step(model, stats, params, policy_rng)
            else:
                arm = policies.informative_c_step(model, stats, params, policy_rng)
        if empirical:
            reward = empirical_draw(pool, theta_index, arm, reward_rngs[arm])
        else:
            reward = float(true_means[arm]) + noise * reward_rngs[arm].standard_normal()
        counts[arm] += 1
        sums[arm] += reward
        means[arm] = sums[arm] / counts[arm]
        cum_regret += gaps[arm]
        if t_round % record_every == 0 or t_round == horizon:
            checkpoints.append((t_round, cum_regret, tuple(counts)))
    return RunTrace(algorithm_id=algorithm_id, run=run, checkpoints=tuple(checkpoints))


def _job(config_json: str, algorithm_id: str, run: int) -> RunTrace:
    return run_replication(_resolve_cached(config_json), algorithm_id, run)


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    traces: tuple[RunTrace, ...]  # sorted by (algorithm id, run)

    def mean_final_regret(self, algorithm_id: str) -> float:
        finals = [tr.final_regret for tr in self.traces if tr.algorithm_id == algorithm_id]
        return float(np.mean(finals))

    def mean_pulls_at(self, algorithm_id: str, t: int) -> np.ndarray:
        rows = []
        for tr in self.traces:
            if tr.algorithm_id != algorithm_id:
                continue
            for cp_t, _, pulls in tr.checkpoints:
                if cp_t == t:
                    rows.append(pulls)
                    break
        if not rows:
            raise KeyError(f"no checkpoint at t={t} for {algorithm_id}")
        return np.asarray(rows, dtype=float).mean(axis=0)

    def summary_rows(self):
        """(scenario_id, algorithm, t, mean_regret, std_regret, n_runs) rows."""
        out = []
        scenario = self.config.scenario_id
        for spec in sorted(self.config.algorithms, key=lambda a: a.id):
            regs = {}
            for tr in self.traces:
                if tr.algorithm_id != spec.id:
                    continue
                for t, reg, _ in tr.checkpoints:
                    regs.setdefault(t, []).append(reg)
            for t in sorted(regs):
                vals = np.asarray(regs[t])
                std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
                out.append((scenario, spec.id, t, float(vals.mean()), std, len(vals)))
        return out

    def pulls_rows(self):
        """(scenario_id, algorithm, arm, mean_pulls_at_T) rows."""
        out = []
        for spec in sorted(self.config.algorithms, key=lambda a: a.id):
            finals = [
                tr.final_pulls for tr in self.traces if tr.algorithm_id == spec.id
            ]
            mean_pulls = np.asarray(finals, dtype=float).mean(axis=0)
            for arm, v in enumerate(mean_pulls):
                out.append((self.config.scenario_id, spec.id, arm + 1, float(v)))
        return out


def expand_sweep(cfg: ExperimentConfig) -> tuple[ExperimentConfig, ...]:
    """Expand a {"sweep": [...]} theta_star into one sub-scenario per value."""
    theta = cfg.theta_star
    if isinstance(theta, dict) and "sweep" in theta:
        out = []
        for value in theta["sweep"]:
            if isinstance(value, (list, tuple)):
                label = ",".join(str(float(x)) for x in value)
            else:
                label = str(float(value))
            out.append(
                replace(cfg, scenario_id=f"{cfg.scenario_id}[theta={label}]", theta_star=value)
            )
        return tuple(out)
    return (cfg,)


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run runs x algorithms replications, optionally across processes.

    Traces are sorted by (algorithm id, run) before aggregation, so the
    result is independent of execution order and thread count.
    """
    scenario = resolve_scenario(cfg)
    jobs = [(spec.id, run) for spec in cfg.algorithms for run in range(cfg.runs)]
    if threads > 1 and len(jobs) > 1:
        config_json = json.dumps(cfg.to_dict(), sort_keys=True)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_job, config_json, aid, run) for aid, run in jobs]
            traces = [f.result() for f in futures]
    else:
        traces = [run_replication(scenario, aid, run) for aid, run in jobs]
    traces.sort(key=lambda tr: (tr.algorithm_id, tr.run))
    return ExperimentResult(config=cfg, traces=tuple(traces))


def _fmt(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def write_csv_outputs(results, out_dir) -> dict[str, Path]:
    """Write trace.csv, summary.csv and pulls.csv under `out_dir`.

    Accepts one ExperimentResult or a sequence of them (sweeps emit one
    result per sub-scenario, concatenated into the same three files).
    """
    if isinstance(results, ExperimentResult):
        results = [results]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_arms = max(len(r.traces[0].checkpoints[0][2]) for r in results)

    paths = {}

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["scenario_id", "algorithm", "run", "t", "cum_regret"]
        + [f"pulls_{k + 1}" for k in range(n_arms)]
    )
    for result in results:
        scenario = result.config.scenario_id
        for tr in result.traces:
            for t, reg, pulls in tr.checkpoints:
                w.writerow([scenario, tr.algorithm_id, tr.run, t, _fmt(reg)] + list(pulls))
    paths["trace"] = out / "trace.csv"
    paths["trace"].write_text(buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario_id", "algorithm", "t", "mean_regret", "std_regret", "n_runs"])
    for result in results:
        for row in result.summary_rows():
            w.writerow([row[0], row[1], row[2], _fmt(row[3]), _fmt(row[4]), row[5]])
    paths["summary"] = out / "summary.csv"
    paths["summary"].write_text(buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario_id", "algorithm", "arm", "mean_pulls_at_T"])
    for result in results:
        for row in result.pulls_rows():
            w.writerow([row[0], row[1], row[2], _fmt(row[3])])
    paths["pulls"] = out / "pulls.csv"
    paths["pulls"].write_text(buf.getvalue())
    return paths
