"""Command-line entry point: ``windnpp <analysis> [--config|--preset] [--out]``."""

from __future__ import annotations

import argparse
import sys

from . import presets
from .config import ANALYSES, OUTPUT_ENV_VAR, load_config
from .errors import ConfigError
from .runner import run, summary_lines

DEFAULT_PRESET = "dabaa-zafarana"

_HELP = {
    "pq": "voltage-quality assessment at the point of common coupling",
    "reliability": "emergency-power Markov availability and reliability",
    "aggregate": "portfolio aggregation, duration curves and variation ranges",
    "credit": "peak-window capacity credit and replacement capacity",
    "lcoe": "levelized cost of energy and sensitivity sweeps",
    "compare": "coupled vs dispersed portfolio LCOE comparison",
}


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="YAML run configuration")
    src.add_argument("--preset", choices=presets.PRESET_NAMES,
                     help=f"built-in configuration (default: {DEFAULT_PRESET})")
    p.add_argument("--out", help=f"output directory (default: config output_dir, "
                                 f"${OUTPUT_ENV_VAR}, or ./windnpp-out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="windnpp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ANALYSES:
        _common(sub.add_parser(name, help=_HELP[name]))
    p = sub.add_parser("run", help="run every analysis selected in a configuration")
    p.add_argument("config_path", nargs="?", metavar="config", help="YAML run configuration")
    _common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config_path = args.config
    if args.command == "run" and args.config_path:
        if config_path or args.preset:
            print("error: give the configuration once", file=sys.stderr)
            return 2
        config_path = args.config_path
    preset = args.preset
    if config_path is None and preset is None:
        preset = DEFAULT_PRESET
    try:
        cfg = load_config(config_path, preset=None if config_path else preset)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "run":
        selected = cfg.analyses
    else:
        selected = (args.command,)
        if args.command not in ANALYSES or not _has_inputs(cfg, args.command):
            print(f"error: {cfg.source} has no inputs for the {args.command!r} analysis",
                  file=sys.stderr)
            return 2

    report = run(cfg, args.out, analyses=selected)
    for line in summary_lines(report):
        print(line)
    if selected:
        print(f"outputs in {report.output_dir}")
    return 0 if report.ok else 1


def _has_inputs(cfg, analysis: str) -> bool:
    return {
        "pq": bool(cfg.pq_scenarios),
        "reliability": cfg.reliability is not None,
        "aggregate": bool(cfg.portfolios),
        "credit": cfg.credit is not None,
        "lcoe": cfg.lcoe is not None or bool(cfg.cost_models),
        "compare": bool(cfg.comparisons),
    }[analysis]


if __name__ == "__main__":
    sys.exit(main())
