"""Command line: ``lagtorus verify <suite> [options]``.

Exit status is 0 when every check passes, 1 when any check fails and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import sys

from .suites import SUITES, CliConfig, run_suites


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lagtorus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", help="run a check suite and print a report")
    verify.add_argument("suite", choices=SUITES + ("all",))
    verify.add_argument("--n", type=int, default=2, help="sphere dimension for the highdim suite (2..6)")
    verify.add_argument("--epsilon", type=float, default=0.01, help="Morse function amplitude")
    verify.add_argument("--grid", type=int, default=64, help="grid size for grid checks")
    verify.add_argument("--resolution", type=int, default=512, help="loop sampling for Maslov indices")
    verify.add_argument("--tol-geom", type=float, default=1e-12, help="geometric constraint tolerance")
    verify.add_argument("--seed", type=int, default=0, help="seed for random samples")
    verify.add_argument("--format", choices=("text", "json"), default="text")
    verify.add_argument("--out", default=None, help="write the report here instead of stdout")
    verify.add_argument(
        "--timings", action="store_true", help="record wall-clock runtime_ms (makes output non-reproducible)"
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = CliConfig(
            n=args.n,
            epsilon=args.epsilon,
            grid=args.grid,
            resolution=args.resolution,
            tol_geom=args.tol_geom,
            seed=args.seed,
            timings=args.timings,
        )
    except ValueError as exc:
        parser.error(str(exc))
    names = SUITES if args.suite == "all" else (args.suite,)
    report = run_suites(names, cfg)
    text = report.to_json() if args.format == "json" else report.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.overall == "pass" else 1


def run(argv) -> int:
    """Run the CLI and return the exit code instead of raising SystemExit."""
    try:
        return main(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
