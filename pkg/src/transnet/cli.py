"""Command-line interface: ``transnet run | scenario | verify | bench``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .bench import DEFAULT_LENGTHS, format_bench, run_bench
from .config import ConfigError, load_config
from .driver import ConvergenceError, run_program
from .scenarios import SCENARIOS, run_scenario
from .verify import run_verify

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_NO_CONVERGENCE = 0, 1, 2, 3


def _write_csv(result, output):
    if output in (None, "-"):
        result.to_csv(sys.stdout)
    else:
        result.to_csv(output)


def _parse_option(text: str):
    if "=" not in text:
        raise ConfigError("--set", f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return key, float(value)
    except ValueError:
        return key, value


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    res = run_program(cfg.material, cfg.steps, F0=cfg.F0, algorithmic=cfg.algorithmic_tangent)
    _write_csv(res, args.output)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    opts = dict(_parse_option(o) for o in args.set or [])
    for key in ("substeps",):
        if key in opts:
            opts[key] = int(opts[key])
    try:
        res = run_scenario(args.name, **opts)
    except TypeError as exc:
        raise ConfigError("--set", str(exc)) from None
    _write_csv(res, args.output)
    print(json.dumps(res.summary, indent=2), file=sys.stderr)
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_verify(args.seed)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_bench(args) -> int:
    print(format_bench(run_bench(args.lengths)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transnet",
                                description="Transient-network viscoelasticity at a material point.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a load program from a TOML config")
    r.add_argument("config")
    r.add_argument("-o", "--output", help="CSV file (default: stdout)")
    r.set_defaults(func=_cmd_run)

    s = sub.add_parser("scenario", help="run a built-in scenario")
    s.add_argument("name", choices=sorted(SCENARIOS))
    s.add_argument("-o", "--output", help="CSV file (default: stdout)")
    s.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="scenario option, e.g. --set k=0.1 or --set variant=negative")
    s.set_defaults(func=_cmd_scenario)

    v = sub.add_parser("verify", help="run oracle, tangent and dissipation self-checks")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=_cmd_verify)

    b = sub.add_parser("bench", help="compare recurrence and naive history cost")
    b.add_argument("--lengths", type=int, nargs="+", default=list(DEFAULT_LENGTHS))
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: invalid configuration at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
