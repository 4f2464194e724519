"""Command-line entry point.

symdesigns run --config cfg.toml --out results/ [--threads N] [--seed N] [--dry-run]
symdesigns list

Exit codes: 0 success, 2 configuration or contract problem, 3 resource
budget exceeded, 4 numerical failure, 130 interrupted (partial CSV kept,
metadata marked truncated).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import ConfigError, ContractError, NumericalError, ResourceBudgetError
from .experiments import (
    execute_experiment,
    experiment_catalogue,
    plan_experiment,
    validate_config,
)
from .records import write_csv, write_metadata


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdesigns",
        description="Projected ensembles from symmetric states and chaotic dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment described by a TOML config")
    run.add_argument("--config", required=True, help="path to the TOML config file")
    run.add_argument("--out", required=True, help="directory for CSV and metadata output")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads (overrides the config)")
    run.add_argument("--seed", type=int, default=None,
                     help="master seed (overrides the config)")
    run.add_argument("--dry-run", action="store_true",
                     help="validate, print the plan as JSON, write nothing")

    sub.add_parser("list", help="print the experiment catalogue as JSON")
    return parser


def _load_config(path: str) -> dict:
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(config_path, "rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc


def _run(args) -> int:
    config = _load_config(args.config)
    parsed = validate_config(config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        parsed["seed"] = args.seed
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        parsed["threads"] = args.threads
    plan = plan_experiment(parsed)
    if args.dry_run:
        print(json.dumps(plan, indent=2, sort_keys=True))
        return 0

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    rows, truncated = execute_experiment(parsed)
    wall = time.monotonic() - started

    csv_path = out_dir / parsed["csv"]
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    row_count = write_csv(csv_path, rows)
    meta_path = out_dir / parsed["metadata"]
    meta_path.parent.mkdir(parents=True, exist_ok=True)
    write_metadata(
        meta_path, config=config, seed=parsed["seed"], threads=parsed["threads"],
        csv_name=parsed["csv"], row_count=row_count, truncated=truncated,
        wall_seconds=wall,
    )
    status = "interrupted" if truncated else "done"
    print(f"{status}: {row_count} rows -> {csv_path} ({wall:.1f}s)")
    return 130 if truncated else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list":
            print(json.dumps(experiment_catalogue(), indent=2, sort_keys=True))
            return 0
        return _run(args)
    except (ConfigError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
