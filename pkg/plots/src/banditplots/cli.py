"""plot: render structbandit CSV outputs to image files.

    plot regret --in summary.csv --out regret.png [--filter ucb,ucb-c] [--logx]
    plot pulls  --in pulls.csv   --out pulls.png  [--filter ucb,ucb-c]

Exit codes: 0 success, 2 bad input (missing file, schema mismatch, empty
filter selection), 1 unexpected runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotError, PlotSpec, plot_pulls, plot_regret


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("regret", "regret curves from summary.csv"),
                            ("pulls", "per-arm pull bars from pulls.csv")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--in", dest="input_path", required=True)
        p.add_argument("--out", dest="output_path", required=True)
        p.add_argument("--filter", default="", help="comma-separated algorithm ids")
        p.add_argument("--title", default="")
        p.add_argument("--logx", action="store_true")
        p.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    algorithms = tuple(a for a in args.filter.split(",") if a)
    spec = PlotSpec(
        input_path=Path(args.input_path),
        output_path=Path(args.output_path),
        title=args.title,
        algorithms=algorithms,
        log_x=args.logx,
        dpi=args.dpi,
    )
    try:
        if args.command == "regret":
            _, path = plot_regret(spec)
        else:
            _, path = plot_pulls(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
