"""Command-line entry points: serve, batch, analyze, presets."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, batch, presets, storage
from .service import LOG_DIR_ENV, serve


def _cmd_serve(args: argparse.Namespace) -> int:
    serve(bind=args.bind, config_file=args.config)
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    spec = batch.load_batch_spec(args.cohort)
    written = batch.run_batch(spec, args.out, seed=args.seed, fast=args.fast)
    print(f"wrote {len(written)} session logs to {args.out}")
    logs = [storage.load_log(p) for p in written]
    rows = analysis.aggregate_metrics(logs)
    for row in rows:
        print("  {group}/{setup}: n={n_participants} trials={n_trials} "
              "median T_EC={median_t_ec_s}s median T_RR={median_t_rr_s}s "
              "C_PR={c_pr_percent}".format(**{
                  k: (round(v, 3) if isinstance(v, float) else v) for k, v in row.items()}))
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    log_dir = Path(args.logs)
    logs = storage.load_logs(log_dir)
    if not logs:
        print(f"no session logs found in {log_dir}", file=sys.stderr)
        return 1
    paths = analysis.write_report(logs, Path(args.out), grouping=args.grouping)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_presets(args: argparse.Namespace) -> int:
    if args.action != "list":
        print(f"unknown presets action {args.action!r}", file=sys.stderr)
        return 2
    for name in presets.PRESET_NAMES:
        profile = presets.preset(name)
        print(f"{name}: avatar latency median {profile.orient_latency_avatar_median_ms:.0f} ms, "
              f"object latency median {profile.orient_latency_object_median_ms:.0f} ms, "
              f"follow {profile.follow_prob}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazetrial",
                                     description="Gaze-driven joint-attention training sessions: "
                                                 "serve, simulate, and analyze.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--bind", default="127.0.0.1:8000", help="host:port to listen on")
    p_serve.add_argument("--config", default=None, help="service config JSON "
                         f"(log dir also overridable via ${LOG_DIR_ENV})")
    p_serve.set_defaults(func=_cmd_serve)

    p_batch = sub.add_parser("batch", help="run a simulated cohort and write session logs")
    p_batch.add_argument("--cohort", default=None,
                         help="cohort spec JSON (default: packaged 16 ASD + 13 NT, both setups)")
    p_batch.add_argument("--out", required=True, help="output directory for log files")
    p_batch.add_argument("--seed", type=int, default=None, help="master seed override")
    p_batch.add_argument("--fast", action="store_true", default=True,
                         help="fast-simulated clock (default)")
    p_batch.set_defaults(func=_cmd_batch)

    p_analyze = sub.add_parser("analyze", help="aggregate logs and run the statistics report")
    p_analyze.add_argument("--logs", required=True, help="directory of session log JSON files")
    p_analyze.add_argument("--out", required=True, help="output directory for report files")
    p_analyze.add_argument("--grouping", choices=analysis.GROUPINGS,
                           default=analysis.GROUPING_PER_TRIAL)
    p_analyze.set_defaults(func=_cmd_analyze)

    p_presets = sub.add_parser("presets", help="inspect behaviour presets")
    p_presets.add_argument("action", choices=["list"])
    p_presets.set_defaults(func=_cmd_presets)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
