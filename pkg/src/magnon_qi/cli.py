"""Command-line entry point: one subcommand per dataset."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import DISCORD_CHOICES, OCCUPANCY_CHOICES, load_config
from .errors import ConfigError, MagnonQIError
from .sweeps import SUBCOMMANDS, write_outputs

log = logging.getLogger("magnon_qi")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("--workers must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magnon-qi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", nargs="?", default=None, help="TOML configuration file")
        p.add_argument("--out", default=None, help="output directory (overrides output_dir)")
        p.add_argument("--workers", type=_positive_int, default=1)
        p.add_argument("--discord-convention", choices=DISCORD_CHOICES, default=None)
        p.add_argument("--occupancy", choices=OCCUPANCY_CHOICES, default=None)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(
            discord_convention=args.discord_convention, occupancy=args.occupancy, output_dir=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = SUBCOMMANDS[args.command](cfg, workers=args.workers)
    except MagnonQIError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        paths = write_outputs(table, cfg)
    except OSError as exc:
        print(f"I/O error: {exc.strerror} ({exc.filename})", file=sys.stderr)
        return EXIT_IO
    flagged = sum(1 for row in table.rows if row.get("status", "ok") != "ok")
    log.info("%s: %d rows (%d flagged)", args.command, len(table.rows), flagged)
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
