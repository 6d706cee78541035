"""Command-line front end: pattern | image | tomo | sweep.

Exit codes: 0 success, 2 scenario/validation error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import sys

from .geometry import DegenerateGeometryError
from .numerics import DegenerateGridError
from .pipeline import SWEEP_RUNNERS, run_image, run_pattern, run_sweep, run_tomo
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True, help="scenario YAML file")
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (default: 1)")
    parser.add_argument(
        "--quicklook",
        action="store_true",
        help="also emit 16-bit PGM magnitude quicklooks",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oamradar",
        description=(
            "Deterministic vortex-beam interferometric radar imaging and "
            "height-tomography simulator"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("pattern", "antenna gain and field patterns"),
        ("image", "raw echoes, focused and ground-remapped images"),
        ("tomo", "sub-band stacks and height profiles"),
        ("sweep", "parameter sweeps with one metrics row per value"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "sweep":
            p.add_argument(
                "--axis", required=True, choices=sorted(SWEEP_RUNNERS), help="swept parameter"
            )
            p.add_argument(
                "--values",
                default=None,
                help="comma-separated sweep values (defaults to the canonical list)",
            )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        if args.seed is not None:
            if args.seed < 0:
                raise ScenarioError("seed", "must be a non-negative integer")
            scenario.seed = args.seed
            scenario.validate()
        if args.command == "pattern":
            run_pattern(scenario, args.out, threads=args.threads, quicklook=args.quicklook)
        elif args.command == "image":
            run_image(scenario, args.out, threads=args.threads, quicklook=args.quicklook)
        elif args.command == "tomo":
            run_tomo(scenario, args.out, threads=args.threads, quicklook=args.quicklook)
        elif args.command == "sweep":
            values = None
            if args.values is not None:
                try:
                    values = [float(v) for v in args.values.split(",") if v.strip()]
                except ValueError:
                    raise ScenarioError("sweep.values", f"not a number list: {args.values!r}")
            run_sweep(
                scenario,
                args.axis,
                values=values,
                outdir=args.out,
                threads=args.threads,
                quicklook=args.quicklook,
            )
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DegenerateGeometryError, DegenerateGridError) as exc:
        print(f"degenerate configuration: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
