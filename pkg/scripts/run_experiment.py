#!/usr/bin/env python3
"""Run the full simulated study end to end: batch cohorts, then analysis.

Simulates the default cohort (16 ASD + 13 NT participants, VR and AR
setups) in fast time, writes canonical session logs, and produces the
aggregate metric table, group-difference tests, correlations, and
plot-ready CSV series.

    python scripts/run_experiment.py --out results/ [--seed N] [--trials N]
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from gazetrial.analysis import aggregate_metrics, write_report  # noqa: E402
from gazetrial.batch import load_batch_spec, run_batch  # noqa: E402
from gazetrial.storage import load_log  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--cohort", default=None, help="cohort spec JSON (default: packaged study cohort)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None,
                        help="override trials per session (study default: 2)")
    parser.add_argument("--grouping", choices=["per_trial", "per_participant"],
                        default="per_trial")
    args = parser.parse_args()

    spec = load_batch_spec(args.cohort)
    if args.trials is not None:
        overrides = dict(spec.session_overrides)
        overrides["trials_per_session"] = args.trials
        spec = replace(spec, session_overrides=overrides)

    out = Path(args.out)
    log_dir = out / "logs"
    print(f"simulating {sum(g.n for g in spec.groups)} participants x {len(spec.setups)} setups ...")
    paths = run_batch(spec, log_dir, seed=args.seed)
    print(f"wrote {len(paths)} session logs to {log_dir}")

    logs = [load_log(p) for p in paths]
    for row in aggregate_metrics(logs, grouping=args.grouping):
        print("  {group}/{setup}: median T_EC={median_t_ec_s:.2f}s  median T_RR={median_t_rr_s:.2f}s  "
              "C_PR={c_pr_percent:.1f}% ({n_trials} trials)".format(**row))

    report_paths = write_report(logs, out / "report", grouping=args.grouping)
    report = json.loads((out / "report" / "report.json").read_text())
    print("group differences (one-tailed, NT < ASD):")
    for diff in report["group_differences"]:
        print(f"  {diff['setup']} {diff['metric']}: U={diff['u']}, z={diff['z']:.3f}, "
              f"p={diff['p_value']:.2e} [{diff['method']}]")
    for path in report_paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
