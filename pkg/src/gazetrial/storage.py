"""Canonical JSON persistence for session logs.

The on-disk form is normative so determinism is testable byte for byte:
sorted keys, every float printed with exactly three decimals, UTF-8, one
trailing newline. Times are stored in seconds (engine-internal milliseconds
divided by 1000), which three decimals represent losslessly. Writes are
atomic (temp file + rename) so a crashed writer never leaves partial JSON
at the final path.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .config import ParticipantMeta, SessionConfig
from .engine import SessionLog, SessionMetrics, TrialRecord
from .schemas import validate_payload


def canonical_json(obj) -> str:
    return _canon(obj) + "\n"


def _canon(o) -> str:
    if isinstance(o, dict):
        items = sorted(o.items())
        return "{" + ",".join(f"{json.dumps(k, ensure_ascii=False)}:{_canon(v)}" for k, v in items) + "}"
    if isinstance(o, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in o) + "]"
    if isinstance(o, bool) or o is None:
        return json.dumps(o)
    if isinstance(o, float):
        r = round(o, 3)
        if r == 0.0:
            r = 0.0  # avoid "-0.000"
        return format(r, ".3f")
    if isinstance(o, (int, str)):
        return json.dumps(o, ensure_ascii=False)
    raise TypeError(f"cannot canonicalize {type(o).__name__}")


def _ms_to_s(v: float | None) -> float | None:
    return None if v is None else v / 1000.0


def _s_to_ms(v: float | None) -> float | None:
    return None if v is None else v * 1000.0


def trial_to_jsonable(r: TrialRecord) -> dict:
    return {
        "trial_index": r.trial_index,
        "left_object_id": r.left_object_id,
        "right_object_id": r.right_object_id,
        "target_side": r.target_side,
        "cued_side": r.cued_side,
        "stimulus_onset_s": _ms_to_s(r.stimulus_onset_ms),
        "eye_contact_registered_s": _ms_to_s(r.eye_contact_registered_ms),
        "cue_start_s": _ms_to_s(r.cue_start_ms),
        "cue_end_s": _ms_to_s(r.cue_end_ms),
        "response_registered_s": _ms_to_s(r.response_registered_ms),
        "responded_side": r.responded_side,
        "t_ec_s": _ms_to_s(r.t_ec_ms),
        "t_rr_s": _ms_to_s(r.t_rr_ms),
        "correct": r.correct,
        "done": r.done,
    }


def trial_from_jsonable(d: dict) -> TrialRecord:
    return TrialRecord(
        trial_index=d["trial_index"],
        left_object_id=d["left_object_id"],
        right_object_id=d["right_object_id"],
        target_side=d["target_side"],
        cued_side=d["cued_side"],
        stimulus_onset_ms=_s_to_ms(d["stimulus_onset_s"]),
        eye_contact_registered_ms=_s_to_ms(d["eye_contact_registered_s"]),
        cue_start_ms=_s_to_ms(d["cue_start_s"]),
        cue_end_ms=_s_to_ms(d["cue_end_s"]),
        response_registered_ms=_s_to_ms(d["response_registered_s"]),
        responded_side=d["responded_side"],
        correct=d["correct"],
        done=d["done"],
    )


def log_to_jsonable(log: SessionLog) -> dict:
    m = log.metrics
    return {
        "schema_version": log.schema_version,
        "session_id": log.session_id,
        "setup": log.setup,
        "termination_reason": log.termination_reason,
        "feedback_note": log.feedback_note,
        "config": log.config.to_dict(),
        "participant": log.participant.to_dict(),
        "trials": [trial_to_jsonable(t) for t in log.trials],
        "metrics": {
            "median_t_ec_s": m.median_t_ec_s,
            "mean_t_ec_s": m.mean_t_ec_s,
            "median_t_rr_s": m.median_t_rr_s,
            "mean_t_rr_s": m.mean_t_rr_s,
            "c_pr_percent": m.c_pr_percent,
            "responded_trials": m.responded_trials,
            "correct_trials": m.correct_trials,
        },
    }


def log_from_jsonable(d: dict) -> SessionLog:
    m = d["metrics"]
    return SessionLog(
        schema_version=d["schema_version"],
        session_id=d["session_id"],
        setup=d["setup"],
        config=SessionConfig.from_dict(d["config"]),
        participant=ParticipantMeta.from_dict(d["participant"]),
        trials=[trial_from_jsonable(t) for t in d["trials"]],
        termination_reason=d["termination_reason"],
        metrics=SessionMetrics(
            median_t_ec_s=m["median_t_ec_s"],
            mean_t_ec_s=m["mean_t_ec_s"],
            median_t_rr_s=m["median_t_rr_s"],
            mean_t_rr_s=m["mean_t_rr_s"],
            c_pr_percent=m["c_pr_percent"],
            responded_trials=m["responded_trials"],
            correct_trials=m["correct_trials"],
        ),
        feedback_note=d["feedback_note"],
    )


def write_canonical(payload: dict, path: Path) -> Path:
    """Atomically write canonical JSON: temp file in the same directory, fsync, rename."""
    path = Path(path)
    data = canonical_json(payload).encode("utf-8")
    tmp = path.parent / f".{path.name}.tmp-{os.getpid()}"
    with open(tmp, "wb") as f:
        f.write(data)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)
    return path


def store_log(log: SessionLog, path: Path) -> Path:
    """Validate against the published schema and persist canonically."""
    payload = log_to_jsonable(log)
    validate_payload(payload, "session_log")  # internal bug guard
    return write_canonical(payload, Path(path))


def load_log(path: Path) -> SessionLog:
    with open(path, "r", encoding="utf-8") as f:
        return log_from_jsonable(json.load(f))


def load_logs(directory: Path) -> list[SessionLog]:
    paths = sorted(Path(directory).glob("*.json"))
    return [load_log(p) for p in paths]
