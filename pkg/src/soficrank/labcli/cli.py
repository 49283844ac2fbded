"""Command line: ``soficrank run|check|report``.

Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 configuration error.
Caps come from ``SOFICRANK_<CAP>`` environment variables, then the config.
"""
from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, RepresentationInvalid, SoficRankError
from .config import config_hash, load_config
from .report import emit_report, load_record, summary_text
from .runner import run

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="soficrank", description="Sofic rank experiments.")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="run every check of a config and write a run directory")
    p.add_argument("config")
    p.add_argument("--out", default="runs", help="root of the run directories (default: runs)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for rank jobs")
    p.add_argument("--timings", action="store_true", help="fill the ms column of results.csv")

    p = sub.add_parser("check", help="parse and validate a config")
    p.add_argument("config")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("report", help="print the summary of an existing run directory")
    p.add_argument("run_dir")
    return ap


def _load(path, seed):
    config = load_config(path)
    return config if seed is None else config.with_seed(seed)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.verb == "check":
            config = _load(args.config, args.seed)
            print(f"ok {config_hash(config)[:16]} checks={','.join(config.checks)}")
            return EXIT_OK
        if args.verb == "report":
            try:
                record = load_record(args.run_dir)
            except (OSError, ValueError, KeyError) as exc:
                print(f"error: cannot read run directory: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            sys.stdout.write(summary_text(record))
            return EXIT_OK if record.passed else EXIT_FAIL
        config = _load(args.config, args.seed)
        record = run(config, args.jobs)
        out = emit_report(record, args.out, args.timings)
        sys.stdout.write(summary_text(record))
        print(f"run directory: {out}")
        return EXIT_OK if record.passed else EXIT_FAIL
    except (ConfigError, RepresentationInvalid, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SoficRankError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
