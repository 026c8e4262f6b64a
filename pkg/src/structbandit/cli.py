"""Command-line entry point.

Subcommands: run (execute an experiment config and write the three CSVs),
analyze (offline competitive/bound diagnostics for a model file), ingest
(ratings files to a model-exchange file), describe (list bundled scenarios
and algorithm ids). Exit codes: 0 success, 1 runtime failure, 2 usage or
validation error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import scenarios
from .bounds import theorem_bounds
from .ingest import IngestError, export_model, learn_reward_table, parse_movielens
from .model import competitive_analysis
from .modelio import load_model
from .policies import ALGORITHM_IDS
from .simulation import (
    ConfigError,
    config_from_file,
    expand_sweep,
    resolve_scenario,
    run_experiment,
    write_csv_outputs,
)

USAGE_ERROR = 2
RUNTIME_ERROR = 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="structbandit",
        description="Structured bandit experiment runner and analyzer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("--config", required=True,
                       help="path to a config JSON or a bundled scenario id")
    p_run.add_argument("--out", default="out", help="output directory for the CSVs")
    p_run.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_run.add_argument("--runs", type=int, default=None, help="override runs")
    p_run.add_argument("--horizon", type=int, default=None, help="override horizon")
    p_run.add_argument("--threads", type=int, default=None,
                       help="worker processes (default: available parallelism)")

    p_an = sub.add_parser("analyze", help="competitive structure and bound diagnostics")
    p_an.add_argument("--model", required=True, help="model-exchange JSON file")
    p_an.add_argument("--theta-star", required=True,
                      help="true parameter, e.g. '3' or '0.9,0.2'")
    p_an.add_argument("--alpha", type=float, default=3.0)
    p_an.add_argument("--beta", type=float, default=1.0)
    p_an.add_argument("--horizon", type=int, default=100000)
    p_an.add_argument("--tol", type=float, default=1e-9)
    p_an.add_argument("--json", action="store_true", help="machine-readable output")

    p_in = sub.add_parser("ingest", help="build a model file from ratings data")
    p_in.add_argument("--users", required=True)
    p_in.add_argument("--movies", required=True)
    p_in.add_argument("--ratings", required=True)
    p_in.add_argument("--out", required=True, help="output model JSON path")
    p_in.add_argument("--seed", type=int, default=0, help="split seed")
    p_in.add_argument("--sigma", type=float, default=2.0,
                      help="variance proxy recorded in the model")

    p_desc = sub.add_parser("describe", help="list bundled scenarios and algorithms")
    p_desc.add_argument("--json", action="store_true")
    return parser


def _load_config(spec: str):
    if spec in scenarios.SCENARIO_IDS:
        return scenarios.bundled_config(spec)
    path = Path(spec)
    if not path.exists():
        raise ConfigError(
            f"config {spec!r} is neither a bundled scenario nor an existing file"
        )
    return config_from_file(path)


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
        if cfg.record_every > cfg.horizon:
            cfg = dataclasses.replace(cfg, record_every=cfg.horizon)
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)

    results = []
    for sub_cfg in expand_sweep(cfg):
        scenario = resolve_scenario(sub_cfg)  # validates before any rounds run
        analysis = competitive_analysis(scenario.model, scenario.theta_index)
        print(
            f"{sub_cfg.scenario_id}: K={scenario.model.n_arms} |Theta|="
            f"{scenario.model.grid.n_points} theta*={scenario.model.grid.point(scenario.theta_index)} "
            f"C(theta*)={analysis.count} algorithms={','.join(a.id for a in sub_cfg.algorithms)}"
        )
        results.append(run_experiment(sub_cfg, threads=threads))
    paths = write_csv_outputs(results, args.out)
    for name in ("trace", "summary", "pulls"):
        print(f"wrote {paths[name]}")
    return 0


def _parse_theta(text: str):
    try:
        parts = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse theta-star {text!r}")
    if not parts:
        raise ConfigError("theta-star is empty")
    return parts[0] if len(parts) == 1 else parts


def _cmd_analyze(args) -> int:
    model = load_model(args.model)
    theta = _parse_theta(args.theta_star)
    try:
        theta_index = model.grid.index_of(theta)
    except KeyError:
        near = model.grid.nearest(theta)
        listing = "; ".join(f"index {j}: {pt}" for j, pt in near)
        print(f"theta* {theta} is not on the grid; nearest points: {listing}",
              file=sys.stderr)
        return USAGE_ERROR

    analysis = competitive_analysis(model, theta_index, tol=args.tol)
    bounds = theorem_bounds(analysis, model, args.alpha, args.beta, args.horizon)
    gp = analysis.gap_profile

    if args.json:
        doc = {
            "theta_star_index": theta_index,
            "theta_star": list(model.grid.point(theta_index)),
            "optimal_arm": gp.optimal_arm + 1,
            "gaps": list(gp.gaps),
            "theta_star_set_size": len(analysis.theta_star_set),
            "competitive": list(analysis.competitive),
            "count": analysis.count,
            "bounded_regret_regime": analysis.count == 1,
            "degrees": {str(k + 1): v for k, v in analysis.degrees.items()},
            "bounds": {
                "horizon": bounds.horizon,
                "alpha": bounds.alpha,
                "beta": bounds.beta,
                "arms": [
                    {
                        "arm": rep.arm + 1,
                        "label": rep.label,
                        "kind": rep.kind,
                        "gap": rep.gap,
                        "epsilon": rep.epsilon,
                        "t0": rep.t0.value if rep.t0.valid else rep.t0.reason,
                        "tb": rep.tb.value if rep.tb.valid else rep.tb.reason,
                        "ucb_c": rep.ucb_c.value if rep.ucb_c.valid else rep.ucb_c.reason,
                        "ts_c": rep.ts_c.value if rep.ts_c.valid else rep.ts_c.reason,
                    }
                    for rep in bounds.arms
                ],
                "total_ucb_c": bounds.total_ucb_c.value
                if bounds.total_ucb_c.valid
                else bounds.total_ucb_c.reason,
                "total_ts_c": bounds.total_ts_c.value
                if bounds.total_ts_c.valid
                else bounds.total_ts_c.reason,
            },
        }
        print(json.dumps(doc, indent=1))
        return 0

    print(f"theta* = {model.grid.point(theta_index)} (index {theta_index})")
    print(f"optimal arm k* = {gp.optimal_arm + 1} ({model.arm_labels[gp.optimal_arm]})")
    print(f"gaps = {tuple(round(g, 6) for g in gp.gaps)}")
    print(f"|Theta*| = {len(analysis.theta_star_set)}   C(theta*) = {analysis.count}")
    if analysis.count == 1:
        print("single competitive arm: bounded-regret regime")
    for rep in bounds.arms:
        line = f"arm {rep.arm + 1} [{rep.label}]: {rep.kind}, gap={rep.gap:.6g}"
        if rep.kind == "non-competitive":
            line += f", eps={rep.epsilon:.6g}, t0={rep.t0:.6g}, tb={rep.tb:.6g}"
        if rep.kind != "optimal":
            line += f", ucb-c bound={rep.ucb_c:.6g}, ts-c bound={rep.ts_c:.6g}"
        print(line)
    print(f"regret bound total (ucb-c) = {bounds.total_ucb_c:.6g}")
    print(f"regret bound total (ts-c)  = {bounds.total_ts_c:.6g}")
    return 0


def _cmd_ingest(args) -> int:
    records = parse_movielens(args.users, args.movies, args.ratings)
    genres = sorted({g for r in records for g in r.genres})
    table, pool, meta = learn_reward_table(records, genres, args.seed)
    _, doc = export_model(table, args.sigma, pool)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=1))
    print(f"meta-users: {len(meta)}")
    print(f"genres: {len(table.genres)}")
    print(f"fallback cells: {len(table.fallback_cells)}")
    print(f"wrote {out}")
    return 0


def _cmd_describe(args) -> int:
    if args.json:
        print(
            json.dumps(
                {"scenarios": scenarios.scenario_summaries(),
                 "algorithms": list(ALGORITHM_IDS)},
                indent=1,
            )
        )
        return 0
    print("bundled scenarios:")
    for entry in scenarios.scenario_summaries():
        print(f"  {entry['id']}: {entry['description']}")
    print("algorithm ids:")
    print("  " + " ".join(ALGORITHM_IDS))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "ingest":
            return _cmd_ingest(args)
        return _cmd_describe(args)
    except (ConfigError, IngestError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
