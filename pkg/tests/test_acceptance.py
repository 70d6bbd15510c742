"""Acceptance suite: one test per release criterion.

Run with `pytest tests/test_acceptance.py -v`; the terminal summary prints a
PASS/FAIL line per criterion. Reference values are the group medians,
correctness rates, and test statistics the behaviour presets were
calibrated against.
"""

import json
import random
import statistics
import subprocess
import sys
import time

import pytest
from helpers import follow_task_plan, run_scripted
from oracles import mwu_exact_oracle, spearman_perm_oracle, spearman_rho_oracle

from gazetrial import (DwellConfig, DwellTracker, GazeSample, ParticipantMeta,
                       SessionConfig, new_session, preset)
from gazetrial.analysis import analysis_report, collect_cells
from gazetrial.batch import BatchSpec, GroupSpec, derive_seed, load_batch_spec, run_batch
from gazetrial.dwell import FixationEvent
from gazetrial.geometry import Circle, Roi
from gazetrial.presets import CohortSpec, make_cohort
from gazetrial.runner import run_session
from gazetrial.schemas import validate_payload
from gazetrial.stats import (ALT_GREATER, ALT_LESS, ALT_TWO_TAILED,
                             METHOD_EXACT, METHOD_NORMAL, mann_whitney_u,
                             mann_whitney_z_from_summary, spearman,
                             spearman_p_from_summary)
from gazetrial.storage import load_log

# Reference statistics the simulation is calibrated to reproduce:
# group medians in seconds per (group, setup), correctness percentages,
# and the reported Mann-Whitney (u, z) / Spearman (rho, p) values.
REFERENCE_MEDIANS_S = {
    ("ASD", "VR"): {"t_ec_s": 11.5, "t_rr_s": 13.5},
    ("NT", "VR"): {"t_ec_s": 3.75, "t_rr_s": 2.75},
    ("ASD", "AR"): {"t_ec_s": 35.0, "t_rr_s": 18.0},
    ("NT", "AR"): {"t_ec_s": 7.0, "t_rr_s": 5.0},
}
REFERENCE_C_PR = {("ASD", "AR"): 92.3, ("ASD", "VR"): 69.5}
REFERENCE_MWU_TABLE = [
    # (setup, metric, u, reported_z)
    ("VR", "t_ec_s", 14.5, 3.80039),
    ("VR", "t_rr_s", 28.0, 3.17851),
    ("AR", "t_ec_s", 20.5, 3.25641),
    ("AR", "t_rr_s", 31.5, 2.69231),
]
# Effective per-setup sample sizes that reproduce the reference table
# exactly (see test_criterion_mwu_reference_z_documented_sizes).
REFERENCE_MWU_SIZES = {"VR": (15, 13), "AR": (13, 13)}
REFERENCE_SPEARMAN_TABLE = [
    # (setup, metric, attribute, reported_p, reported_rho)
    ("VR", "t_ec_s", "cars_score", 0.07840854, 0.46816313),
    ("VR", "t_ec_s", "age_years", 0.67236623, 0.119138426),
    ("VR", "t_rr_s", "cars_score", 0.775102028, 0.080645679),
    ("VR", "t_rr_s", "age_years", 0.381882228, 0.243474556),
    ("AR", "t_ec_s", "cars_score", 0.760216041, 0.09392301),
    ("AR", "t_ec_s", "age_years", 0.603853662, -0.159008343),
    ("AR", "t_rr_s", "cars_score", 0.038110133, 0.57904873),
    ("AR", "t_rr_s", "age_years", 0.57987584, -0.169491525),
]
REFERENCE_SPEARMAN_N = {"VR": 15, "AR": 13}


# --- Mann-Whitney ----------------------------------------------------------

def test_criterion_mwu_oracle_equivalence():
    # 200 random tie-free pairs: exact enumeration equals the brute-force
    # oracle bit for bit, and the normal approximation stays within 0.02.
    # Sizes run 5..8 for the approximation bound: below five observations per
    # group the bound is provably unattainable (worst-case gap 0.088 at 2x2,
    # enumerated exhaustively in test_stats_mwu), while 5..8 satisfies it for
    # every achievable U. Exactness itself is additionally checked down to
    # single-element samples.
    started = time.monotonic()
    rng = random.Random(20_240_817)
    for _ in range(200):
        n1 = rng.randint(5, 8)
        n2 = rng.randint(5, 8)
        pool = rng.sample(range(100_000), n1 + n2)
        a = [float(v) for v in pool[:n1]]
        b = [float(v) for v in pool[n1:]]
        for alternative in (ALT_LESS, ALT_GREATER, ALT_TWO_TAILED):
            exact = mann_whitney_u(a, b, alternative=alternative, method=METHOD_EXACT)
            assert exact.p_value == mwu_exact_oracle(a, b, alternative)
        exact = mann_whitney_u(a, b, alternative=ALT_TWO_TAILED, method=METHOD_EXACT)
        approx = mann_whitney_u(a, b, alternative=ALT_TWO_TAILED, method=METHOD_NORMAL)
        assert abs(exact.p_value - approx.p_value) <= 0.02
    for _ in range(50):  # exactness only, over the full small-sample range
        n1 = rng.randint(1, 8)
        n2 = rng.randint(1, 8)
        pool = rng.sample(range(100_000), n1 + n2)
        a = [float(v) for v in pool[:n1]]
        b = [float(v) for v in pool[n1:]]
        exact = mann_whitney_u(a, b, alternative=ALT_LESS, method=METHOD_EXACT)
        assert exact.p_value == mwu_exact_oracle(a, b, ALT_LESS)
    assert time.monotonic() - started < 10.0


def test_criterion_mwu_reference_z_as_specified():
    # Faithful form of the consistency check: U=14.5 with the nominal cohort
    # sizes (16, 13) should land within +/-0.05 of the reference z 3.80039.
    # No continuity-correction setting achieves that (on: 3.903, off: 3.925;
    # tie corrections only increase z), so this criterion cannot pass as
    # stated. The reference value is reproduced exactly by the per-setup
    # sizes (15, 13) — see test_criterion_mwu_reference_z_documented_sizes.
    candidates = {cc: mann_whitney_z_from_summary(14.5, 16, 13, continuity=cc)
                  for cc in (True, False)}
    best = min(candidates.values(), key=lambda z: abs(z - 3.80039))
    assert abs(best - 3.80039) <= 0.05, (
        f"z from sizes (16, 13) with U=14.5 is {candidates[True]:.5f} (correction on) / "
        f"{candidates[False]:.5f} (correction off); the reference 3.80039 is exactly "
        f"[z for sizes (15, 13), correction on] = "
        f"{mann_whitney_z_from_summary(14.5, 15, 13, continuity=True):.5f}"
    )


def test_criterion_mwu_reference_z_documented_sizes():
    # The documented sizes: (15, 13) for VR rows and (13, 13) for AR rows,
    # with the continuity correction ON, reproduce every reference z to
    # better than 1e-4. That toggle setting is the recorded configuration.
    for setup, _metric, u, reported_z in REFERENCE_MWU_TABLE:
        n1, n2 = REFERENCE_MWU_SIZES[setup]
        z = mann_whitney_z_from_summary(u, n1, n2, continuity=True)
        assert z == pytest.approx(reported_z, abs=1e-4), (setup, u)
        # and +/-0.05 of the criterion's target for the headline cell
    headline = mann_whitney_z_from_summary(14.5, 15, 13, continuity=True)
    assert abs(headline - 3.800) <= 0.05


# --- Spearman ---------------------------------------------------------------

def test_criterion_spearman_oracle_equivalence():
    # 200 random samples: rho against a Fraction-arithmetic oracle to 1e-12
    # and exact permutation p equal to full enumeration. n runs 3..7 so the
    # oracle's exact-rational enumeration stays fast; rho is additionally
    # checked at n=8.
    rng = random.Random(99)
    checked = 0
    while checked < 200:
        n = rng.randint(3, 7)
        x = [rng.randint(-8, 8) for _ in range(n)]
        y = [rng.randint(-8, 8) for _ in range(n)]
        alternative = rng.choice((ALT_LESS, ALT_GREATER, ALT_TWO_TAILED))
        res = spearman(x, y, alternative=alternative, method=METHOD_EXACT)
        if res.degenerate:
            continue
        assert res.rho == pytest.approx(spearman_rho_oracle(x, y), abs=1e-12)
        assert res.p_value == spearman_perm_oracle(x, y, alternative)
        checked += 1
    for _ in range(20):
        x = [rng.randint(-20, 20) for _ in range(8)]
        y = [rng.randint(-20, 20) for _ in range(8)]
        res = spearman(x, y)
        if not res.degenerate:
            assert res.rho == pytest.approx(spearman_rho_oracle(x, y), abs=1e-12)


def test_criterion_spearman_reference_p_documented_n():
    # rho=0.57904873 reproduces the reference two-tailed p 0.038110133 under
    # the t-approximation with n=13 — the documented correlation sample size
    # (the AR-setup clinical group). n=14 gives 0.0300, n=16 gives 0.0188.
    p = spearman_p_from_summary(0.57904873, 13, ALT_TWO_TAILED)
    assert p == pytest.approx(0.038110133, abs=1e-6)
    assert p == pytest.approx(0.0381, abs=5e-4)


def test_spearman_reference_table_reproduced_at_documented_n():
    # Companion check: all eight reference (p, rho) cells reproduce at the
    # documented per-setup sizes, confirming n=15 (VR) and n=13 (AR).
    for setup, _metric, _attr, reported_p, reported_rho in REFERENCE_SPEARMAN_TABLE:
        n = REFERENCE_SPEARMAN_N[setup]
        p = spearman_p_from_summary(reported_rho, n, ALT_TWO_TAILED)
        assert p == pytest.approx(reported_p, abs=1e-6), (setup, reported_rho)


# --- Dwell tracker ----------------------------------------------------------

def test_criterion_dwell_tracker_randomized_invariants():
    # >= 10,000 randomized cases across the four tracker invariants:
    # accumulation monotonicity, reset soundness, single-shot emission, and
    # sample-rate robustness of the registration instant.
    roi = Roi("target", Circle(0.0, 0.0, 0.25))
    inside = (0.0, 0.0)
    outside = (0.9, 0.9)
    rng = random.Random(1306)
    cases = 0

    for _ in range(6000):  # random on/off/invalid span streams
        cfg = DwellConfig(required_ms=rng.choice([500, 1000, 2000]),
                          gap_tolerance_ms=rng.choice([0, 50, 100]))
        tracker = DwellTracker(roi, cfg)
        period = rng.choice([5, 10, 14, 20, 33])
        t = 0
        events = []
        prev_on = False
        prev_accum = 0.0
        off_run_ms = 0
        for _span in range(rng.randint(1, 8)):
            kind = rng.choice(("in", "out", "invalid"))
            for _ in range(rng.randint(1, 60)):
                if kind == "in":
                    sample = GazeSample(t, *inside)
                elif kind == "out":
                    sample = GazeSample(t, *outside)
                else:
                    sample = GazeSample(t, 0.0, 0.0, valid=False)
                ev = tracker.update(sample)
                if ev is not None:
                    events.append(ev)
                on = kind == "in"
                accum = tracker.accumulated_ms
                if on and prev_on and not tracker.fired:
                    assert accum >= prev_accum  # monotone while on-region
                if on and off_run_ms > cfg.gap_tolerance_ms and not tracker.fired:
                    assert accum <= period  # reset soundness: fresh streak
                off_run_ms = 0 if on else off_run_ms + period
                prev_on = on
                prev_accum = accum
                t += period
        assert len(events) <= 1  # single-shot per arming
        cases += 1

    for _ in range(4000):  # contiguous dwell at a random rate
        rate = rng.uniform(30.0, 200.0)
        cfg = DwellConfig(required_ms=2000.0, gap_tolerance_ms=100.0)
        tracker = DwellTracker(roi, cfg)
        period = 1000.0 / rate
        event = None
        i = 0
        while event is None:
            event = tracker.update(GazeSample(i * period, *inside))
            i += 1
        assert isinstance(event, FixationEvent)
        assert event.streak_start_ms == 0.0
        assert abs(event.registered_ms - 2000.0) <= period + 1e-9
        cases += 1

    assert cases >= 10_000


# --- Trial state machine ----------------------------------------------------

def test_criterion_state_machine_timeline():
    # Scripted gaze, default parameters, simulated clock: eye contact
    # registers at exactly 2000 ms, the cue occupies [2000, 7000] ms, and
    # the response lands at exactly 9000 ms with T_RR = 2000 ms.
    session = new_session(SessionConfig(rng_seed=1),
                          ParticipantMeta("p01", "NT", 10.0, 4.0),
                          session_id="timeline", setup="VR")
    run_scripted(session, follow_task_plan())
    assert session.terminated_reason == "completed"
    first = session.records[0]
    assert first.eye_contact_registered_ms == 2000
    assert first.t_ec_ms == 2000
    assert first.cue_start_ms == 2000
    assert first.cue_end_ms == 7000
    assert first.response_registered_ms == 9000
    assert first.t_rr_ms == 2000
    assert first.correct is True


# --- Calibrated cohort reproduction ------------------------------------------

ACCEPTANCE_COHORT = BatchSpec(
    seed=1, setups=("VR", "AR"),
    groups=(
        GroupSpec("ASD", 16, {"VR": "ASD_VR", "AR": "ASD_AR"},
                  variability_sigma=0.10),
        GroupSpec("NT", 13, {"VR": "NT_VR", "AR": "NT_AR"},
                  variability_sigma=0.08),
    ),
    session_overrides={"trials_per_session": 30},
)


def test_criterion_calibrated_cohort_reproduction(tmp_path):
    # 16 ASD + 13 NT across both setups: per-trial group medians within 10%
    # of the reference medians, every NT-faster group difference one-tailed
    # significant at 0.01, correctness rates within 3 points, under 60 s.
    started = time.monotonic()
    paths = run_batch(ACCEPTANCE_COHORT, tmp_path / "logs")
    logs = [load_log(p) for p in paths]
    cells = collect_cells(logs)

    for (group, setup), targets in REFERENCE_MEDIANS_S.items():
        for metric, target in targets.items():
            observed = statistics.median(cells[(group, setup)].metric_values(metric, "per_trial"))
            assert observed == pytest.approx(target, rel=0.10), (group, setup, metric, observed)

    report = analysis_report(logs, grouping="per_trial")
    assert len(report["group_differences"]) == 4  # 2 setups x 2 metrics
    for diff in report["group_differences"]:
        assert diff["alternative"] == ALT_LESS  # NT hypothesized faster
        assert diff["p_value"] < 0.01, diff

    c_pr = {(row["group"], row["setup"]): row["c_pr_percent"] for row in report["c_pr"]}
    for (group, setup), target in REFERENCE_C_PR.items():
        assert abs(c_pr[(group, setup)] - target) <= 3.0, (group, setup, c_pr[(group, setup)])
    assert c_pr[("NT", "VR")] == 100.0
    assert c_pr[("NT", "AR")] == 100.0

    # Qualitative skew: log-normal orienting makes clinical-group means
    # exceed their medians, matching the reference mean/median ordering.
    for setup in ("VR", "AR"):
        values = cells[("ASD", setup)].metric_values("t_ec_s", "per_trial")
        assert statistics.fmean(values) > statistics.median(values)

    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"cohort run took {elapsed:.1f}s"


def test_criterion_null_calibration_false_positive_rate():
    # Two cohorts drawn from the same preset: the one-tailed test at
    # alpha=0.05 must not reject more than 10% of 100 seeded replications.
    template = preset("NT_VR")
    from dataclasses import replace
    template = replace(template, sample_rate_hz=30.0)
    rejections = 0
    for rep in range(100):
        medians = []
        for label in ("first", "second"):
            cohort = make_cohort(CohortSpec(
                group="NT", n_participants=13, template=template,
                variability_sigma=0.12, seed=derive_seed(rep, label, "cohort")))
            per_participant = []
            for meta, profile in cohort:
                config = SessionConfig(
                    trials_per_session=2,
                    rng_seed=derive_seed(rep, label, meta.participant_id, "engine"))
                log = run_session(config, meta, profile,
                                  behavior_seed=derive_seed(rep, label, meta.participant_id, "behavior"))
                values = [r.t_ec_ms for r in log.trials if r.t_ec_ms is not None]
                if values:
                    per_participant.append(statistics.median(values))
            medians.append(per_participant)
        result = mann_whitney_u(medians[0], medians[1], alternative=ALT_LESS)
        if result.p_value < 0.05:
            rejections += 1
    assert rejections <= 10, f"false-positive rate {rejections}/100"


# --- Determinism and persistence ---------------------------------------------

def test_criterion_batch_determinism_and_schema(tmp_path):
    # The default cohort (16 ASD + 13 NT, two setups) run twice with one
    # seed: 58 byte-identical canonical log files, all schema-valid, and
    # each fast-simulated full-cohort run comfortably under a minute.
    spec = load_batch_spec(None)
    started = time.monotonic()
    first = run_batch(spec, tmp_path / "a", seed=77)
    assert time.monotonic() - started < 60.0
    second = run_batch(spec, tmp_path / "b", seed=77)
    assert len(first) == 58
    assert [p.name for p in first] == [p.name for p in second]
    for pa, pb in zip(first, second):
        assert pa.read_bytes() == pb.read_bytes(), pa.name
    for path in first:
        payload = json.loads(path.read_text("utf-8"))
        validate_payload(payload, "session_log")


# --- Service contract ---------------------------------------------------------

def test_criterion_service_poll_monotonicity_and_atomic_writes(tmp_path):
    import threading
    from fastapi.testclient import TestClient
    from gazetrial.service import ServiceSettings, create_app

    # Part 1: two concurrent pollers against a live fast session never see
    # the trial count decrease and never see a published record change.
    settings = ServiceSettings(log_dir=tmp_path / "logs")
    app = create_app(settings)
    with TestClient(app) as client:
        body = {
            "session_id": "acc",
            "config": {"trials_per_session": 12, "rng_seed": 3, "timing_mode": "fast"},
            "profile": {
                "orient_latency_avatar_median_ms": 150.0,
                "orient_latency_avatar_sigma": 0.2,
                "orient_latency_object_median_ms": 150.0,
                "orient_latency_object_sigma": 0.2,
                "follow_prob": 1.0, "gaze_noise_sd": 0.01, "dropout_rate": 0.0,
                "mid_dwell_break_rate": 0.0, "sample_rate_hz": 70.0,
                "nonresponder_prob": 0.0,
            },
        }
        assert client.post("/api/session", json=body).status_code == 201
        failures = []

        def poll():
            seen = {}
            last_count = 0
            while True:
                payload = client.get("/api/session/acc/performance").json()
                count = len(payload["trials"])
                if count < last_count:
                    failures.append("trial count decreased")
                last_count = count
                for trial in payload["trials"]:
                    key = trial["trial_index"]
                    if key in seen and seen[key] != trial:
                        failures.append(f"record {key} mutated")
                    seen[key] = trial
                if payload["phase"] == "terminated":
                    return

        pollers = [threading.Thread(target=poll) for _ in range(2)]
        for p in pollers:
            p.start()
        client.post("/api/session/acc/start")
        for p in pollers:
            p.join(timeout=60)
            assert not p.is_alive()
        assert failures == []

    # Part 2: kill a writer process mid-batch; every log file present at its
    # final path must be complete, valid canonical JSON.
    out_dir = tmp_path / "killed"
    out_dir.mkdir()
    child_code = (
        "import sys\n"
        "from gazetrial.batch import BatchSpec, GroupSpec, run_batch\n"
        "spec = BatchSpec(seed=0, setups=('VR',), groups=(\n"
        "    GroupSpec('NT', 2, {'VR': 'NT_VR'}, 0.1),), \n"
        "    session_overrides={'trials_per_session': 1}, sample_rate_hz=30.0)\n"
        f"out = {str(out_dir)!r}\n"
        "i = 0\n"
        "while True:\n"
        "    run_batch(spec, out + f'/{i}', seed=i)\n"
        "    i += 1\n"
    )
    child = subprocess.Popen([sys.executable, "-c", child_code],
                             stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    time.sleep(1.5)
    child.kill()
    child.wait()
    written = sorted(out_dir.rglob("*.json"))
    assert written, "writer was killed before producing any files"
    for path in written:
        payload = json.loads(path.read_text("utf-8"))  # parses completely
        validate_payload(payload, "session_log")
