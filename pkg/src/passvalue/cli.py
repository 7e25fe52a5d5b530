"""Command-line entry point: ``passvalue <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .events import ParseError
from .pipeline import COMMANDS, ConfigError, UsageError, make_config

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2, 3


def _cell(text: str) -> tuple[float, float]:
    try:
        length, width = (float(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--cell expects LENGTHxWIDTH in metres, got {text!r}") from None
    return length, width


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--out", dest="out_dir", help="output directory")
    common.add_argument("--data", dest="data_dir", help="directory holding events.csv, lineups.csv, ...")
    for name in ("events", "lineups", "fixtures", "players", "taxonomy"):
        common.add_argument(f"--{name}", help=f"{name} CSV (default <data>/{name}.csv)")
    common.add_argument("--cache", dest="cache_dir", help="index cache directory (default <out>/cache)")
    common.add_argument("--threads", type=int)
    common.add_argument("--no-cluster", dest="clustered", action="store_false", default=None,
                        help="search every stored subsequence instead of the matching cluster")
    common.add_argument("--k", type=int, help="neighbours averaged per query")
    common.add_argument("--cell", type=_cell, help="grid cell size, e.g. 15x17")
    common.add_argument("--min-minutes", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--strict", action="store_true", default=None,
                        help="fail on the first malformed record")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="passvalue", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "sweep-k":
            p.add_argument("--ks", dest="sweep_ks", help="comma-separated k values")
        if name == "similar":
            p.add_argument("--target", type=int, help="player id (default: top-rated player)")
            p.add_argument("--born-after", help="YYYY-MM-DD")
            p.add_argument("--top-n", type=int)
        if name == "synth":
            p.add_argument("--games", dest="synth_games", type=int)
            p.add_argument("--teams", dest="synth_teams", type=int)
            p.add_argument("--seasons", dest="synth_seasons", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "verbose", "cell") and v is not None}
    if args.cell is not None:
        overrides["cell_length"], overrides["cell_width"] = args.cell
    try:
        cfg = make_config(args.config, **overrides)
        manifest = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UsageError, FileNotFoundError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(json.dumps({"command": args.command, "outputs": sorted(manifest["outputs"]),
                      "timings": manifest["timings"]}, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
