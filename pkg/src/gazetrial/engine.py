"""The trial state machine: phase scheduling, cue gating, and metric capture.

One Session consumes a single time-ordered stream of gaze samples and clock
ticks and emits engine events. Trials run through the fixed phase sequence

    await_eye_contact -> cue_head_turn -> cue_finger_point
        -> await_response -> feedback -> done

Eye contact gates cue delivery; the cue runs for exactly the configured
duration; object dwell trackers are armed only when the response window
opens, so anticipatory gazes during the cue never register. The engine is a
deterministic function of (config, input stream, seed) and performs no I/O.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass

from .config import (SIDE_LEFT, SIDE_RIGHT, ParticipantMeta, SessionConfig,
                     object_catalog, other_side)
from .dwell import DwellConfig, DwellTracker
from .errors import ConfigError, IllegalStateError, SampleOrderError, SessionClosedError
from .events import (EngineEvent, EyeContactRegistered, FeedbackIssued,
                     PhaseChanged, ResponseRegistered, SessionTerminated,
                     TERMINATED_COMPLETED, TERMINATED_INACTIVITY,
                     TERMINATED_OPERATOR, TrialPhase, TrialStarted)
from .geometry import AVATAR_EYES, DEFAULT_SCENE, OBJECT_LEFT, OBJECT_RIGHT, GazeSample, Scene


@dataclass(frozen=True, slots=True)
class ClockTick:
    """A pure time advance with no gaze information."""

    t_ms: float


@dataclass
class TrialRecord:
    trial_index: int
    left_object_id: str
    right_object_id: str
    target_side: str
    cued_side: str
    stimulus_onset_ms: float
    eye_contact_registered_ms: float | None = None
    cue_start_ms: float | None = None
    cue_end_ms: float | None = None
    response_registered_ms: float | None = None
    responded_side: str | None = None
    correct: bool | None = None
    done: bool = False

    @property
    def t_ec_ms(self) -> float | None:
        if self.eye_contact_registered_ms is None:
            return None
        return self.eye_contact_registered_ms - self.stimulus_onset_ms

    @property
    def t_rr_ms(self) -> float | None:
        if self.response_registered_ms is None or self.cue_end_ms is None:
            return None
        return self.response_registered_ms - self.cue_end_ms


@dataclass
class SessionMetrics:
    """Aggregates over one session, in seconds (times) and percent (C_PR)."""

    median_t_ec_s: float | None
    mean_t_ec_s: float | None
    median_t_rr_s: float | None
    mean_t_rr_s: float | None
    c_pr_percent: float | None
    responded_trials: int
    correct_trials: int


@dataclass
class SessionLog:
    schema_version: str
    session_id: str
    setup: str
    config: SessionConfig
    participant: ParticipantMeta
    trials: list[TrialRecord]
    termination_reason: str
    metrics: SessionMetrics
    feedback_note: str | None = None


def select_trial_objects(rng: random.Random, catalog: tuple[str, ...],
                         cue_validity: float = 1.0) -> tuple[str, str, str, str]:
    """Draw (left_id, right_id, target_side, cued_side) for one trial.

    Objects are drawn uniformly without replacement; the target side is a
    fair coin; the cue points at the target with probability cue_validity.
    """
    if len(catalog) < 2:
        raise ConfigError("object_catalog_size", "needs at least 2 objects to stage a trial")
    left, right = rng.sample(catalog, 2)
    target = SIDE_LEFT if rng.random() < 0.5 else SIDE_RIGHT
    cued = target if rng.random() < cue_validity else other_side(target)
    return left, right, target, cued


def _round3(x: float) -> float:
    return round(x, 3)


class Session:
    """A running session; see module docstring for the trial lifecycle."""

    def __init__(self, config: SessionConfig, participant: ParticipantMeta,
                 scene: Scene = DEFAULT_SCENE, session_id: str = "session",
                 setup: str = "VR"):
        config.validate()
        participant.validate()
        self.config = config
        self.participant = participant
        self.scene = scene
        self.session_id = session_id
        self.setup = setup
        self.rng = random.Random(config.rng_seed)
        self.catalog = object_catalog(config.object_catalog_size)
        self.records: list[TrialRecord] = []
        self.phase: TrialPhase | None = None  # None until the first input
        self.terminated_reason: str | None = None
        self.last_gaze: GazeSample | None = None
        self._last_input_ms: float | None = None
        self._last_gaze_ms: float | None = None
        self._last_activity_ms = 0.0
        self._eyes_tracker: DwellTracker | None = None
        self._left_tracker: DwellTracker | None = None
        self._right_tracker: DwellTracker | None = None
        self._head_turn_end_ms = 0.0
        self._cue_end_ms = 0.0
        self._feedback_end_ms = 0.0
        self._eyes_roi = scene.roi(AVATAR_EYES)
        self._left_roi = scene.roi(OBJECT_LEFT)
        self._right_roi = scene.roi(OBJECT_RIGHT)

    # -- public state ------------------------------------------------------

    @property
    def terminated(self) -> bool:
        return self.terminated_reason is not None

    @property
    def trial_index(self) -> int:
        return len(self.records) - 1 if self.records else 0

    @property
    def current_trial(self) -> TrialRecord | None:
        return self.records[-1] if self.records else None

    @property
    def last_update_ms(self) -> float:
        return self._last_input_ms if self._last_input_ms is not None else 0.0

    # -- lifecycle ---------------------------------------------------------

    def step(self, item: GazeSample | ClockTick) -> list[EngineEvent]:
        """Feed one input; returns every event it produced, in order."""
        if self.terminated:
            raise SessionClosedError(f"session {self.session_id!r} is closed ({self.terminated_reason})")
        t = item.t_ms
        if self._last_input_ms is not None and t < self._last_input_ms:
            raise SampleOrderError(f"input at {t} ms precedes previous input at {self._last_input_ms} ms")
        self._last_input_ms = t

        events: list[EngineEvent] = []
        if self.phase is None:
            self._last_activity_ms = t
            self._begin_trial(t, events)
        else:
            self._advance_boundaries(t, events)

        if not self.terminated:
            term = self._check_inactivity(t)
            if term is not None:
                events.append(term)

        if not self.terminated and isinstance(item, GazeSample):
            self._consume_gaze(item, events)
        return events

    def check_inactivity(self, now_ms: float) -> SessionTerminated | None:
        """Terminate if no in-region gaze activity for the configured timeout."""
        if self.terminated:
            return None
        return self._check_inactivity(now_ms)

    def stop(self, now_ms: float) -> list[EngineEvent]:
        """Operator stop; valid any time before termination."""
        if self.terminated:
            raise SessionClosedError(f"session {self.session_id!r} is already closed")
        if self._last_input_ms is None:
            self._last_input_ms = now_ms
        return [self._terminate(TERMINATED_OPERATOR, now_ms)]

    def finalize(self) -> SessionLog:
        """Build the immutable session log; only valid after termination."""
        if not self.terminated:
            raise IllegalStateError("cannot finalize a running session")
        t_ec = [r.t_ec_ms for r in self.records if r.t_ec_ms is not None]
        t_rr = [r.t_rr_ms for r in self.records if r.t_rr_ms is not None]
        responded = [r for r in self.records if r.responded_side is not None]
        correct = sum(1 for r in responded if r.correct)
        c_pr = _round3(100.0 * correct / len(responded)) if responded else None
        metrics = SessionMetrics(
            median_t_ec_s=_round3(statistics.median(t_ec) / 1000.0) if t_ec else None,
            mean_t_ec_s=_round3(statistics.fmean(t_ec) / 1000.0) if t_ec else None,
            median_t_rr_s=_round3(statistics.median(t_rr) / 1000.0) if t_rr else None,
            mean_t_rr_s=_round3(statistics.fmean(t_rr) / 1000.0) if t_rr else None,
            c_pr_percent=c_pr,
            responded_trials=len(responded),
            correct_trials=correct,
        )
        return SessionLog(
            schema_version="1",
            session_id=self.session_id,
            setup=self.setup,
            config=self.config,
            participant=self.participant,
            trials=list(self.records),
            termination_reason=self.terminated_reason or "",
            metrics=metrics,
        )

    # -- internals ---------------------------------------------------------

    def _begin_trial(self, t: float, events: list[EngineEvent]) -> None:
        index = len(self.records)
        left, right, target, cued = select_trial_objects(self.rng, self.catalog, self.config.cue_validity)
        self.records.append(TrialRecord(
            trial_index=index, left_object_id=left, right_object_id=right,
            target_side=target, cued_side=cued, stimulus_onset_ms=t,
        ))
        self.phase = TrialPhase.AWAIT_EYE_CONTACT
        self._eyes_tracker = DwellTracker(self._eyes_roi, DwellConfig(
            self.config.eye_contact_dwell_ms, self.config.gap_tolerance_ms, self.config.count_gap_time))
        self._left_tracker = None
        self._right_tracker = None
        events.append(TrialStarted(index, t, left, right, target, cued))
        events.append(PhaseChanged(index, TrialPhase.AWAIT_EYE_CONTACT, t))

    def _advance_boundaries(self, t: float, events: list[EngineEvent]) -> None:
        # Several boundaries can fall inside one input gap; handle them in order.
        while not self.terminated:
            if self.phase is TrialPhase.CUE_HEAD_TURN and t >= self._head_turn_end_ms:
                self.phase = TrialPhase.CUE_FINGER_POINT
                events.append(PhaseChanged(self.trial_index, self.phase, self._head_turn_end_ms))
            elif self.phase is TrialPhase.CUE_FINGER_POINT and t >= self._cue_end_ms:
                self.phase = TrialPhase.AWAIT_RESPONSE
                dwell_cfg = DwellConfig(self.config.response_dwell_ms,
                                        self.config.gap_tolerance_ms, self.config.count_gap_time)
                self._left_tracker = DwellTracker(self._left_roi, dwell_cfg)
                self._right_tracker = DwellTracker(self._right_roi, dwell_cfg)
                events.append(PhaseChanged(self.trial_index, self.phase, self._cue_end_ms))
            elif self.phase is TrialPhase.FEEDBACK and t >= self._feedback_end_ms:
                record = self.records[-1]
                record.done = True
                self.phase = TrialPhase.DONE
                events.append(PhaseChanged(record.trial_index, TrialPhase.DONE, self._feedback_end_ms))
                if len(self.records) >= self.config.trials_per_session:
                    events.append(self._terminate(TERMINATED_COMPLETED, self._feedback_end_ms))
                else:
                    self._begin_trial(t, events)  # next trial on this tick
            else:
                break

    def _check_inactivity(self, now_ms: float) -> SessionTerminated | None:
        if now_ms - self._last_activity_ms >= self.config.inactivity_timeout_ms:
            return self._terminate(TERMINATED_INACTIVITY, now_ms)
        return None

    def _terminate(self, reason: str, t: float) -> SessionTerminated:
        self.terminated_reason = reason
        return SessionTerminated(t, reason)

    def _consume_gaze(self, sample: GazeSample, events: list[EngineEvent]) -> None:
        t = sample.t_ms
        if self._last_gaze_ms is not None and t <= self._last_gaze_ms:
            raise SampleOrderError(
                f"gaze sample at {t} ms does not follow previous sample at {self._last_gaze_ms} ms")
        self._last_gaze_ms = t
        self.last_gaze = sample
        hit_id = self.scene.hit(sample.x, sample.y) if sample.valid else None
        if hit_id is not None:
            self._last_activity_ms = t

        if self.phase is TrialPhase.AWAIT_EYE_CONTACT:
            fix = self._eyes_tracker.advance(t, hit_id == AVATAR_EYES)
            if fix is not None:
                self._register_eye_contact(fix.registered_ms, events)
        elif self.phase is TrialPhase.AWAIT_RESPONSE:
            fix = self._left_tracker.advance(t, hit_id == OBJECT_LEFT)
            side = SIDE_LEFT
            if fix is None:
                fix = self._right_tracker.advance(t, hit_id == OBJECT_RIGHT)
                side = SIDE_RIGHT
            if fix is not None:
                self._register_response(side, fix.registered_ms, events)
        # Gaze during cue delivery and feedback only feeds the activity timer.

    def _register_eye_contact(self, t: float, events: list[EngineEvent]) -> None:
        record = self.records[-1]
        record.eye_contact_registered_ms = t
        # The cue starts at the instant eye contact registers.
        record.cue_start_ms = t
        record.cue_end_ms = t + self.config.cue_duration_ms
        self._head_turn_end_ms = t + self.config.head_turn_fraction * self.config.cue_duration_ms
        self._cue_end_ms = record.cue_end_ms
        self.phase = TrialPhase.CUE_HEAD_TURN
        events.append(EyeContactRegistered(record.trial_index, t))
        events.append(PhaseChanged(record.trial_index, TrialPhase.CUE_HEAD_TURN, t))

    def _register_response(self, side: str, t: float, events: list[EngineEvent]) -> None:
        record = self.records[-1]
        record.response_registered_ms = t
        record.responded_side = side
        record.correct = side == record.target_side
        self.phase = TrialPhase.FEEDBACK
        self._feedback_end_ms = t + self.config.feedback_duration_ms
        events.append(ResponseRegistered(record.trial_index, t, side, record.correct))
        events.append(FeedbackIssued(record.trial_index, t, record.correct))
        events.append(PhaseChanged(record.trial_index, TrialPhase.FEEDBACK, t))


def new_session(config: SessionConfig, participant: ParticipantMeta,
                scene: Scene = DEFAULT_SCENE, session_id: str = "session",
                setup: str = "VR") -> Session:
    """Validate the configuration and stage a session at trial zero."""
    return Session(config, participant, scene=scene, session_id=session_id, setup=setup)
