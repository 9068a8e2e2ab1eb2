"""
Command-line harness: run one scenario, sweep parameter grids, write maps.

Exit codes: 0 success, 1 configuration error, 2 generation failure.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from rapsim.core.config import build_params, default_grid, expand_grid, load_config
from rapsim.core.errors import ConfigurationError, GenerationError, PreconditionError
from rapsim.core.experiment import (
    generate_scenario,
    request_table,
    run_scenario,
    run_sweep,
    summary_csv,
    sweep_csv,
    write_report,
)
from rapsim.core.trace import MessageTrace, method_trace_path
from rapsim.core.world import generate_store_map, render_map
from rapsim.models import Method, ScenarioParams

logger = logging.getLogger("rapsim")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_GENERATION = 2


def _setup_logging(verbose: bool):
    level = logging.DEBUG if verbose else os.environ.get("RAPSIM_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _params(args) -> tuple:
    if args.config:
        params, grid = load_config(args.config)
    else:
        params, grid = ScenarioParams(), {}
    if args.seed is not None:
        params = build_params({"seed": args.seed}, params)
    return params, grid


def cmd_run(args) -> int:
    params, _ = _params(args)
    scenario = generate_scenario(params)

    dd_trace = MessageTrace() if args.trace else None
    hfi_trace = MessageTrace() if args.trace else None
    result = run_scenario(scenario, dd_trace=dd_trace, hfi_trace=hfi_trace)

    table = request_table(result)
    if args.out:
        Path(args.out).write_text(table + "\n")
    else:
        print(table)
    if args.trace:
        for method, trace in ((Method.DD, dd_trace), (Method.HFI, hfi_trace)):
            logger.info("Trace written to %s", trace.write(method_trace_path(args.trace, method.value)))
    if result.bound_violations:
        logger.warning("%d lower-bound violations", result.bound_violations)
    return EXIT_OK


def cmd_sweep(args) -> int:
    params, grid = _params(args)
    points = expand_grid(params, grid) if grid else default_grid(params)
    if args.point_only:
        points = [("default", params)]
    report = run_sweep(points, args.repetitions, workers=args.workers)

    if args.out:
        for path in write_report(report, args.out, args.summary_out):
            logger.info("Wrote %s", path)
    else:
        sys.stdout.write(sweep_csv(report))
        sys.stdout.write("\n")
        sys.stdout.write(summary_csv(report))
    return EXIT_OK


def cmd_gen_map(args) -> int:
    grid = generate_store_map(args.width, args.height, args.aisle_spacing)
    text = render_map(grid)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_serve(args) -> int:
    from rapsim.main import run
    run()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rapsim", description=__doc__.strip().splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed", type=int, help="base seed (overrides the config)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv"], default="csv", help="output format; csv is the only one")

    run = sub.add_parser("run", help="run one scenario and print a per-request table")
    common(run)
    run.add_argument("--trace", help="trace file; DD and HFI go to <stem>.dd<ext> and <stem>.hfi<ext>")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a parameter sweep and emit CSV")
    common(sweep)
    sweep.add_argument("--repetitions", type=int, default=20, help="scenarios per parameter point")
    sweep.add_argument("--summary-out", help="summary CSV (default: <out>.summary.csv)")
    sweep.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sweep.add_argument("--point-only", action="store_true", help="sweep only the configured point")
    sweep.set_defaults(func=cmd_sweep)

    gen = sub.add_parser("gen-map", help="write a generated store map")
    common(gen)
    gen.add_argument("--width", type=int, default=24)
    gen.add_argument("--height", type=int, default=16)
    gen.add_argument("--aisle-spacing", type=int, default=4)
    gen.set_defaults(func=cmd_gen_map)

    serve = sub.add_parser("serve", help="start the HTTP API")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except (ConfigurationError, PreconditionError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except GenerationError as e:
        logger.error("%s", e)
        return EXIT_GENERATION


if __name__ == "__main__":
    sys.exit(main())
