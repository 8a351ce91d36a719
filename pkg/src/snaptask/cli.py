"""Command line: ``snaptask check ...`` and ``snaptask replay ...``.

Exit status: 0 when every run is valid, 1 when failures were found, 2 on a
configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .harness import CampaignConfig, ConfigError, replay_failure, run_campaign


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="snaptask")
    sub = ap.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run a checking campaign")
    check.add_argument("--config", help="JSON file with campaign settings")
    check.add_argument("--object")
    check.add_argument("--writers", type=int)
    check.add_argument("--readers", type=int)
    check.add_argument("--mode", choices=["exhaustive", "random"])
    check.add_argument("--crash", action="store_true", default=None,
                       help="also explore crashed (truncated) schedules")
    check.add_argument("--snapshot", choices=["primitive", "collect"])
    check.add_argument("--trials", type=int)
    check.add_argument("--seed", type=int)
    check.add_argument("--mutant")
    check.add_argument("--out", help="write the JSON report here")
    check.add_argument("-v", "--verbose", action="store_true")

    rep = sub.add_parser("replay", help="re-execute a failure from a report")
    rep.add_argument("--report", required=True)
    rep.add_argument("--failure", type=int, default=0)
    return ap


def _config(args: argparse.Namespace) -> CampaignConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    for key in ("object", "writers", "readers", "mode", "crash", "snapshot", "trials", "seed", "mutant"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return CampaignConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    if args.command == "check":
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        try:
            report = run_campaign(_config(args))
        except (ConfigError, OSError, json.JSONDecodeError, TypeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if args.out:
            report.write(args.out)
        print(f"{report.runs_executed} runs: {report.valid} valid, {report.invalid} invalid, "
              f"{report.pending_adoptions} with pending adoption")
        for f in report.failures[:3]:
            print(f"  run {f['run']}: {f['violation']}")
        return 0 if report.ok else 1

    try:
        print(replay_failure(args.report, args.failure))
    except (IndexError, ConfigError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
