"""Engine output events and the trial phase enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TrialPhase(str, Enum):
    AWAIT_EYE_CONTACT = "await_eye_contact"
    CUE_HEAD_TURN = "cue_head_turn"
    CUE_FINGER_POINT = "cue_finger_point"
    AWAIT_RESPONSE = "await_response"
    FEEDBACK = "feedback"
    DONE = "done"


# Session termination reasons.
TERMINATED_COMPLETED = "completed"
TERMINATED_INACTIVITY = "inactivity_timeout"
TERMINATED_OPERATOR = "operator_stop"


@dataclass(frozen=True, slots=True)
class TrialStarted:
    trial_index: int
    t_ms: float
    left_object_id: str
    right_object_id: str
    target_side: str
    cued_side: str


@dataclass(frozen=True, slots=True)
class PhaseChanged:
    trial_index: int
    phase: TrialPhase
    t_ms: float


@dataclass(frozen=True, slots=True)
class EyeContactRegistered:
    trial_index: int
    t_ms: float


@dataclass(frozen=True, slots=True)
class ResponseRegistered:
    trial_index: int
    t_ms: float
    side: str
    correct: bool


@dataclass(frozen=True, slots=True)
class FeedbackIssued:
    trial_index: int
    t_ms: float
    positive: bool


@dataclass(frozen=True, slots=True)
class SessionTerminated:
    t_ms: float
    reason: str


EngineEvent = (
    TrialStarted
    | PhaseChanged
    | EyeContactRegistered
    | ResponseRegistered
    | FeedbackIssued
    | SessionTerminated
)
