"""``felab`` command line: run, sweep, list-models."""

from __future__ import annotations

import argparse
import json
import sys

from felab.harness.config import ConfigError, load_config
from felab.harness.registry import list_models
from felab.harness.runner import EXIT_CONFIG, parse_grid, run, sweep


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="experiment config (.toml or .json)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: FELAB_THREADS or 1)")
    p.add_argument("--out", default=None, help="CSV report path; a .json mirror is written next to it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="felab", description="Free-energy subadditivity experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run a config over a parameter grid")
    _add_common(p_sweep)
    p_sweep.add_argument(
        "--grid",
        action="append",
        default=[],
        metavar="PATH=V1,V2,...",
        help="dotted config path and comma-separated values; repeat for a second axis",
    )

    p_list = sub.add_parser("list-models", help="list registered Hamiltonian laws")
    p_list.add_argument("--json", action="store_true", help="emit the full listing as JSON")
    return parser


def _print_models(as_json: bool) -> None:
    models = list_models()
    if as_json:
        print(json.dumps(models, indent=2))
        return
    for m in models:
        print(f"{m['id']:<16} {m['family']:<10} {m['topic']:<22} {m['description']}")
        props = m["params"].get("properties", {})
        required = set(m["params"].get("required", []))
        if props:
            fields = ", ".join(f"{k}{'' if k in required else '?'}" for k in props)
            print(f"{'':<16} params: {fields}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-models":
        _print_models(args.json)
        return 0
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            result = run(cfg, args.out, args.seed, args.threads)
        else:
            result = sweep(cfg, parse_grid(args.grid), args.out, args.seed, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if result.message:
        print(result.message, file=sys.stderr)
    if result.path is not None:
        print(f"{len(result.rows)} rows -> {result.path} (exit {result.exit_code})")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
