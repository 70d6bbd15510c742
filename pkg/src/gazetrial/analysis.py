"""Cohort-level aggregation and the group-difference / correlation report.

Works from persisted session logs: per (group, setup) cell it aggregates
median/mean eye-contact and response times plus correctness, runs one-tailed
Mann-Whitney tests between groups (expected direction: NT faster), and
correlates the ASD participants' times against age and CARS score with
Spearman rank correlation. Output is a machine-readable report dict plus
plot-ready CSV series; no plotting here.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from pathlib import Path

from .engine import SessionLog
from .stats import ALT_LESS, StatTestResult, mann_whitney_u, spearman

GROUPING_PER_TRIAL = "per_trial"
GROUPING_PER_PARTICIPANT = "per_participant"
GROUPINGS = (GROUPING_PER_TRIAL, GROUPING_PER_PARTICIPANT)

METRICS = ("t_ec_s", "t_rr_s")
DEFAULT_ALPHAS = (0.05, 0.01)


class _Cell:
    """All logs for one (group, setup) cell, indexed by participant."""

    def __init__(self):
        self.participants: dict[str, dict] = {}

    def add(self, log: SessionLog) -> None:
        pid = log.participant.participant_id
        entry = self.participants.setdefault(pid, {
            "age_years": log.participant.age_years,
            "cars_score": log.participant.cars_score,
            "t_ec_s": [], "t_rr_s": [], "responded": 0, "correct": 0, "trials": 0,
        })
        for r in log.trials:
            entry["trials"] += 1
            if r.t_ec_ms is not None:
                entry["t_ec_s"].append(r.t_ec_ms / 1000.0)
            if r.t_rr_ms is not None:
                entry["t_rr_s"].append(r.t_rr_ms / 1000.0)
            if r.responded_side is not None:
                entry["responded"] += 1
                if r.correct:
                    entry["correct"] += 1

    def metric_values(self, metric: str, grouping: str) -> list[float]:
        if grouping == GROUPING_PER_TRIAL:
            return [v for e in self.participants.values() for v in e[metric]]
        return [statistics.median(e[metric]) for e in self.participants.values() if e[metric]]

    def c_pr(self, grouping: str) -> float | None:
        if grouping == GROUPING_PER_TRIAL:
            responded = sum(e["responded"] for e in self.participants.values())
            correct = sum(e["correct"] for e in self.participants.values())
            return 100.0 * correct / responded if responded else None
        rates = [100.0 * e["correct"] / e["responded"]
                 for e in self.participants.values() if e["responded"]]
        return statistics.fmean(rates) if rates else None

    @property
    def responded(self) -> int:
        return sum(e["responded"] for e in self.participants.values())

    @property
    def correct(self) -> int:
        return sum(e["correct"] for e in self.participants.values())

    @property
    def n_trials(self) -> int:
        return sum(e["trials"] for e in self.participants.values())


def collect_cells(logs: list[SessionLog]) -> dict[tuple[str, str], _Cell]:
    cells: dict[tuple[str, str], _Cell] = {}
    for log in logs:
        cells.setdefault((log.participant.group, log.setup), _Cell()).add(log)
    return cells


def _agg(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    return statistics.median(values), statistics.fmean(values)


def aggregate_metrics(logs: list[SessionLog], grouping: str = GROUPING_PER_TRIAL) -> list[dict]:
    """One row per (group, setup): median/mean times in seconds, C_PR percent."""
    if not logs:
        raise ValueError("aggregate_metrics requires at least one log")
    if grouping not in GROUPINGS:
        raise ValueError(f"unknown grouping {grouping!r}")
    rows = []
    for (group, setup), cell in sorted(collect_cells(logs).items()):
        med_ec, mean_ec = _agg(cell.metric_values("t_ec_s", grouping))
        med_rr, mean_rr = _agg(cell.metric_values("t_rr_s", grouping))
        rows.append({
            "group": group,
            "setup": setup,
            "grouping": grouping,
            "n_participants": len(cell.participants),
            "n_trials": cell.n_trials,
            "median_t_ec_s": med_ec,
            "mean_t_ec_s": mean_ec,
            "median_t_rr_s": med_rr,
            "mean_t_rr_s": mean_rr,
            "c_pr_percent": cell.c_pr(grouping),
            "responded_trials": cell.responded,
            "correct_trials": cell.correct,
        })
    return rows


def metrics_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _test_entry(result: StatTestResult, setup: str, metric: str, alphas) -> dict:
    entry = result.to_dict()
    entry["setup"] = setup
    entry["metric"] = metric
    entry["significant"] = {str(a): bool(result.p_value < a) for a in alphas}
    return entry


def analysis_report(logs: list[SessionLog], grouping: str = GROUPING_PER_TRIAL,
                    alphas=DEFAULT_ALPHAS, continuity: bool = True) -> dict:
    """Group differences, within-ASD correlations, and correctness comparison.

    Mann-Whitney is one-tailed with NT hypothesized faster than ASD.
    Correlations use per-participant median times against age and CARS.
    Both significance thresholds are reported rather than choosing one.
    """
    cells = collect_cells(logs)
    if len({g for g, _ in cells}) < 2:
        raise ValueError("analysis_report requires at least two groups")
    setups = sorted({s for _, s in cells})
    omissions: list[str] = []
    group_differences = []
    correlations = []
    c_pr_rows = []

    for setup in setups:
        nt = cells.get(("NT", setup))
        asd = cells.get(("ASD", setup))
        for group, cell in (("NT", nt), ("ASD", asd)):
            if cell is not None:
                c_pr_rows.append({
                    "group": group, "setup": setup,
                    "c_pr_percent": cell.c_pr(grouping),
                    "responded_trials": cell.responded,
                    "correct_trials": cell.correct,
                })
        if nt is None or asd is None:
            missing = "NT" if nt is None else "ASD"
            omissions.append(f"setup {setup}: no {missing} logs; group difference skipped")
        else:
            for metric in METRICS:
                nt_vals = nt.metric_values(metric, grouping)
                asd_vals = asd.metric_values(metric, grouping)
                if not nt_vals or not asd_vals:
                    omissions.append(f"setup {setup}: no {metric} values in one group")
                    continue
                result = mann_whitney_u(nt_vals, asd_vals, alternative=ALT_LESS,
                                        continuity=continuity,
                                        test_name=f"mann_whitney_{metric}_{setup}")
                group_differences.append(_test_entry(result, setup, metric, alphas))
        if asd is None:
            omissions.append(f"setup {setup}: no ASD logs; correlations skipped")
            continue
        for metric in METRICS:
            pairs = [(statistics.median(e[metric]), e["age_years"], e["cars_score"])
                     for e in asd.participants.values() if e[metric]]
            if len(pairs) < 3:
                omissions.append(f"setup {setup}: fewer than 3 ASD participants with {metric}")
                continue
            values = [p[0] for p in pairs]
            for attr, idx in (("age_years", 1), ("cars_score", 2)):
                result = spearman(values, [p[idx] for p in pairs],
                                  test_name=f"spearman_{metric}_vs_{attr}_{setup}")
                entry = _test_entry(result, setup, metric, alphas)
                entry["attribute"] = attr
                correlations.append(entry)

    return {
        "schema_version": "1",
        "grouping": grouping,
        "alphas": list(alphas),
        "metrics": aggregate_metrics(logs, grouping),
        "group_differences": group_differences,
        "correlations": correlations,
        "c_pr": c_pr_rows,
        "omissions": omissions,
    }


def trial_series_csv(logs: list[SessionLog]) -> str:
    """Plot-ready long-format series: one row per trial metric value."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["group", "setup", "participant_id", "trial_index", "metric", "value_s"])
    for log in sorted(logs, key=lambda l: (l.participant.group, l.setup, l.participant.participant_id)):
        for r in log.trials:
            for metric, value in (("t_ec_s", r.t_ec_ms), ("t_rr_s", r.t_rr_ms)):
                if value is not None:
                    writer.writerow([log.participant.group, log.setup,
                                     log.participant.participant_id, r.trial_index,
                                     metric, f"{value / 1000.0:.3f}"])
    return buf.getvalue()


def participant_series_csv(logs: list[SessionLog]) -> str:
    """Per-participant medians with attributes, for correlation scatter plots."""
    cells = collect_cells(logs)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["group", "setup", "participant_id", "age_years", "cars_score",
                     "median_t_ec_s", "median_t_rr_s", "c_pr_percent"])
    for (group, setup), cell in sorted(cells.items()):
        for pid, e in sorted(cell.participants.items()):
            med_ec = statistics.median(e["t_ec_s"]) if e["t_ec_s"] else None
            med_rr = statistics.median(e["t_rr_s"]) if e["t_rr_s"] else None
            c_pr = 100.0 * e["correct"] / e["responded"] if e["responded"] else None
            writer.writerow([group, setup, pid, e["age_years"], e["cars_score"],
                             "" if med_ec is None else f"{med_ec:.3f}",
                             "" if med_rr is None else f"{med_rr:.3f}",
                             "" if c_pr is None else f"{c_pr:.3f}"])
    return buf.getvalue()


def write_report(logs: list[SessionLog], out_dir: Path,
                 grouping: str = GROUPING_PER_TRIAL) -> list[Path]:
    """Write report.json, metrics.csv, and the plot series; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = analysis_report(logs, grouping=grouping)
    paths = []
    report_path = out_dir / "report.json"
    # Full float precision here; the fixed-decimal canonical form is for session logs.
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths.append(report_path)
    metrics_path = out_dir / "metrics.csv"
    metrics_path.write_text(metrics_to_csv(report["metrics"]), encoding="utf-8")
    paths.append(metrics_path)
    trials_path = out_dir / "trial_series.csv"
    trials_path.write_text(trial_series_csv(logs), encoding="utf-8")
    paths.append(trials_path)
    participants_path = out_dir / "participant_series.csv"
    participants_path.write_text(participant_series_csv(logs), encoding="utf-8")
    paths.append(participants_path)
    return paths
