"""Gap-tolerant dwell accumulation and fixation registration.

A fixation registers once accumulated on-region time reaches the required
duration. Short off-region or invalid spans (up to the gap tolerance) pause
accumulation without resetting it: blinks and single dropped tracker frames
should not restart a two-second dwell. Any longer diversion resets the
streak to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, SampleOrderError
from .geometry import GazeSample, Roi


@dataclass(frozen=True)
class DwellConfig:
    required_ms: float = 2000.0
    gap_tolerance_ms: float = 100.0
    # Whether tolerated gap time counts toward required_ms. Off by default:
    # the dwell threshold measures on-target time only.
    count_gap_time: bool = False

    def validate(self) -> None:
        if self.required_ms <= 0:
            raise ConfigError("required_ms", "must be > 0")
        if not (0 <= self.gap_tolerance_ms < self.required_ms):
            raise ConfigError("gap_tolerance_ms", "must be >= 0 and < required_ms")


@dataclass(frozen=True, slots=True)
class FixationEvent:
    roi_id: str
    streak_start_ms: float
    registered_ms: float


class DwellTracker:
    """Dwell accumulator for one region and one arming.

    Emits at most one FixationEvent; a new arming means a new tracker.
    Samples must be fed in strictly increasing time order.
    """

    __slots__ = ("roi", "cfg", "_last_t", "_streak_start", "_accum", "_last_on", "_prev_on", "_fired")

    def __init__(self, roi: Roi, cfg: DwellConfig):
        cfg.validate()
        self.roi = roi
        self.cfg = cfg
        self._last_t: float | None = None
        self._streak_start: float | None = None
        self._accum = 0.0
        self._last_on = 0.0
        self._prev_on = False
        self._fired = False

    @property
    def fired(self) -> bool:
        return self._fired

    @property
    def accumulated_ms(self) -> float:
        """On-region time credited to the current streak."""
        return self._accum if self._streak_start is not None else 0.0

    def update(self, sample: GazeSample) -> FixationEvent | None:
        on = sample.valid and self.roi.contains(sample.x, sample.y)
        return self.advance(sample.t_ms, on)

    def advance(self, t: float, on: bool) -> FixationEvent | None:
        """update() with containment already decided; the engine's fast path."""
        if self._last_t is not None and t <= self._last_t:
            raise SampleOrderError(f"sample at {t} ms does not follow previous sample at {self._last_t} ms")
        self._last_t = t

        if self._fired:
            self._prev_on = on
            return None

        event = None
        if on:
            if self._streak_start is None:
                self._streak_start = t
                self._accum = 0.0
            else:
                delta = t - self._last_on
                if self._prev_on:
                    self._accum += delta
                elif delta > self.cfg.gap_tolerance_ms:
                    # Off-span outran the tolerance between observations.
                    self._streak_start = t
                    self._accum = 0.0
                elif self.cfg.count_gap_time:
                    self._accum += delta
            self._last_on = t
            if self._accum >= self.cfg.required_ms:
                self._fired = True
                event = FixationEvent(self.roi.roi_id, self._streak_start, t)
        elif self._streak_start is not None and t - self._last_on > self.cfg.gap_tolerance_ms:
            self._streak_start = None
            self._accum = 0.0
        self._prev_on = on
        return event


def dwell_update(tracker: DwellTracker, sample: GazeSample) -> FixationEvent | None:
    """Functional alias for DwellTracker.update."""
    return tracker.update(sample)
