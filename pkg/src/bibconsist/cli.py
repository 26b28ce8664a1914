"""Command line entry point: ``bibconsist {ingest,measure,sample,compare,all,convert}``."""
from __future__ import annotations

import argparse
import gzip
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .ingest import FORMATS, PARADIGMS, IngestError, parse_records, to_jsonl
from .pipeline import EXIT_INPUT, EXIT_OK, cmd_all, cmd_compare, cmd_ingest, cmd_measure, cmd_sample

COMMANDS = {
    "ingest": cmd_ingest,
    "measure": cmd_measure,
    "sample": cmd_sample,
    "compare": cmd_compare,
    "all": cmd_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bibconsist",
                                     description="Consistency of bibliographic databases via network measures.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        p.add_argument("--seed", type=int)
        p.add_argument("--kmin", type=int, choices=(10, 25))
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--paradigm", action="append", choices=PARADIGMS,
                       help="restrict to one paradigm; repeatable")
    conv = sub.add_parser("convert", help="convert an edge list or Cora pair file to JSONL records")
    conv.add_argument("input", type=Path)
    conv.add_argument("output", type=Path)
    conv.add_argument("--format", required=True, choices=[f for f in FORMATS if f != "jsonl"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "convert":
        try:
            opener = gzip.open if args.input.suffix == ".gz" else open
            with opener(args.input, "rb") as fh:
                records = parse_records(fh, args.format)
            args.output.write_text(to_jsonl(records), encoding="utf-8")
        except (OSError, IngestError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        return EXIT_OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.seed is not None:
        cfg.seed = args.seed
    if args.kmin is not None:
        cfg.k_min = args.kmin
        cfg.alt_k_min = 25 if args.kmin == 10 else 10
    if args.out is not None:
        cfg.out = str(Path(args.out).resolve())
    try:
        outcome = COMMANDS[args.command](cfg, args.paradigm)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for msg in outcome.errors:
        print(f"error: {msg}", file=sys.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
