"""Synthetic participant gaze: behavioral profiles and the stream generator.

A GazeGenerator plays one participant against one session. It reacts to
engine events (stimulus onset, cue end, feedback) and produces timestamped
samples at the profile's rate: idle scatter away from every region, then a
log-normally distributed orienting latency, then a noisy fixation on the
relevant region until the engine registers it. Dropouts and mid-dwell
breaks make the dwell behaviour imperfect in controlled ways.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, replace

from .config import SIDE_LEFT, other_side
from .errors import ConfigError
from .events import (EngineEvent, FeedbackIssued, PhaseChanged, TrialPhase,
                     TrialStarted)
from .geometry import AVATAR_EYES, OBJECT_LEFT, OBJECT_RIGHT, GazeSample, Scene


@dataclass(frozen=True)
class BehaviorProfile:
    """Parameters of one synthetic participant's gaze behaviour.

    Latencies are log-normal, given as (median_ms, sigma) with sigma the
    log-space standard deviation, so the median survives scaling and the
    mean exceeds the median the way reaction-time data does.
    """

    orient_latency_avatar_median_ms: float
    orient_latency_avatar_sigma: float
    orient_latency_object_median_ms: float
    orient_latency_object_sigma: float
    follow_prob: float
    gaze_noise_sd: float = 0.02
    dropout_rate: float = 0.0
    mid_dwell_break_rate: float = 0.0  # per-second hazard of a tolerance-breaking glance away
    sample_rate_hz: float = 70.0
    nonresponder_prob: float = 0.0

    def validate(self) -> None:
        if self.orient_latency_avatar_median_ms <= 0 or self.orient_latency_object_median_ms <= 0:
            raise ConfigError("orient_latency_median_ms", "medians must be > 0")
        if self.orient_latency_avatar_sigma < 0 or self.orient_latency_object_sigma < 0:
            raise ConfigError("orient_latency_sigma", "sigmas must be >= 0")
        for name in ("follow_prob", "dropout_rate", "nonresponder_prob"):
            if not (0.0 <= getattr(self, name) <= 1.0):
                raise ConfigError(name, "must be within [0, 1]")
        if self.gaze_noise_sd < 0:
            raise ConfigError("gaze_noise_sd", "must be >= 0")
        if self.mid_dwell_break_rate < 0:
            raise ConfigError("mid_dwell_break_rate", "must be >= 0")
        if self.sample_rate_hz < 30:
            raise ConfigError("sample_rate_hz", "must be >= 30")

    def scaled(self, latency_factor: float) -> "BehaviorProfile":
        """Individual variant with both orienting medians scaled."""
        return replace(
            self,
            orient_latency_avatar_median_ms=self.orient_latency_avatar_median_ms * latency_factor,
            orient_latency_object_median_ms=self.orient_latency_object_median_ms * latency_factor,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BehaviorProfile":
        profile = cls(**d)
        profile.validate()
        return profile


def _lognormal_ms(rng: random.Random, median_ms: float, sigma: float) -> float:
    if sigma == 0:
        return median_ms
    return median_ms * math.exp(sigma * rng.gauss(0.0, 1.0))


_SCATTER = "scatter"
_FIXATE = "fixate"


class GazeGenerator:
    """Closed-loop gaze source for one participant in one session."""

    def __init__(self, profile: BehaviorProfile, scene: Scene, rng: random.Random,
                 gap_tolerance_ms: float = 100.0):
        profile.validate()
        self.profile = profile
        self.scene = scene
        self.rng = rng
        self.gap_tolerance_ms = gap_tolerance_ms
        self._mode = _SCATTER
        self._target_roi: str | None = None
        self._target_center: tuple[float, float] = (0.0, 0.0)
        self._fixate_from_ms = 0.0
        self._break_until_ms: float | None = None
        self._per_sample_break_p = min(1.0, profile.mid_dwell_break_rate / profile.sample_rate_hz)
        self._trial_sides: tuple[str, str] | None = None  # (target, cued)

    # -- event reactions ---------------------------------------------------

    def observe(self, events: list[EngineEvent]) -> None:
        for ev in events:
            if isinstance(ev, TrialStarted):
                self._trial_sides = (ev.target_side, ev.cued_side)
                latency = _lognormal_ms(self.rng, self.profile.orient_latency_avatar_median_ms,
                                        self.profile.orient_latency_avatar_sigma)
                self._aim(AVATAR_EYES, ev.t_ms + latency)
            elif isinstance(ev, PhaseChanged) and ev.phase is TrialPhase.AWAIT_RESPONSE:
                self._plan_response(ev.t_ms)
            elif isinstance(ev, FeedbackIssued):
                self._rest()

    def _plan_response(self, cue_end_ms: float) -> None:
        if self.rng.random() < self.profile.nonresponder_prob:
            self._rest()
            return
        target, _cued = self._trial_sides or (SIDE_LEFT, SIDE_LEFT)
        side = target if self.rng.random() < self.profile.follow_prob else other_side(target)
        roi = OBJECT_LEFT if side == SIDE_LEFT else OBJECT_RIGHT
        latency = _lognormal_ms(self.rng, self.profile.orient_latency_object_median_ms,
                                self.profile.orient_latency_object_sigma)
        self._aim(roi, cue_end_ms + latency)

    def _aim(self, roi_id: str, from_ms: float) -> None:
        self._mode = _FIXATE
        self._target_roi = roi_id
        self._target_center = self.scene.roi(roi_id).center
        self._fixate_from_ms = from_ms
        self._break_until_ms = None

    def _rest(self) -> None:
        self._mode = _SCATTER
        self._target_roi = None
        self._break_until_ms = None

    # -- sample production -------------------------------------------------

    def next_sample(self, t_ms: float) -> GazeSample:
        if self.profile.dropout_rate > 0 and self.rng.random() < self.profile.dropout_rate:
            return GazeSample(t_ms, 0.0, 0.0, valid=False)

        fixating = self._mode == _FIXATE and t_ms >= self._fixate_from_ms
        if fixating:
            if self._break_until_ms is not None:
                if t_ms < self._break_until_ms:
                    fixating = False
                else:
                    self._break_until_ms = None
            if fixating and self._per_sample_break_p > 0 and self.rng.random() < self._per_sample_break_p:
                # Glance away long enough that the dwell clock restarts.
                self._break_until_ms = t_ms + self.gap_tolerance_ms + self.rng.uniform(100.0, 500.0)
                fixating = False

        if not fixating:
            x, y = self._scatter_point()
            return GazeSample(t_ms, x, y, valid=True)

        cx, cy = self._target_center
        sd = self.profile.gaze_noise_sd
        if sd > 0:
            cx += self.rng.gauss(0.0, sd)
            cy += self.rng.gauss(0.0, sd)
        return GazeSample(t_ms, _clip(cx), _clip(cy), valid=True)

    def _scatter_point(self) -> tuple[float, float]:
        # Rejection-sample a point away from every region so idle gaze never
        # counts as activity or feeds a dwell.
        while True:
            x = self.rng.uniform(-1.0, 1.0)
            y = self.rng.uniform(-1.0, 1.0)
            if self.scene.hit(x, y) is None:
                return x, y


def _clip(v: float) -> float:
    return -1.0 if v < -1.0 else (1.0 if v > 1.0 else v)


def sample_times(sample_rate_hz: float, n: int, start_index: int = 0) -> list[int]:
    """Integer-millisecond sample grid at the given rate (no cumulative drift)."""
    return [round((start_index + i) * 1000.0 / sample_rate_hz) for i in range(n)]
