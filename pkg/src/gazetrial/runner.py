"""Closed-loop session execution on an injected clock.

One loop serves both timing modes: the simulated participant produces a
sample for each grid time, the engine consumes it, and the clock either
returns immediately (fast mode) or sleeps until the sample's wall time
(real mode). External commands (operator stop) are polled between inputs so
they enter the session's single ordered input stream.
"""

from __future__ import annotations

import random
import time
from typing import Callable, Iterable

from .behavior import BehaviorProfile, GazeGenerator
from .config import ParticipantMeta, SessionConfig, TIMING_REAL
from .engine import Session, SessionLog, new_session
from .events import EngineEvent
from .geometry import DEFAULT_SCENE, Scene

# Commands injectable into the session input stream.
CMD_STOP = "stop"


class SimulatedClock:
    def sleep_until(self, t_ms: float) -> None:
        pass


class WallClock:
    def __init__(self):
        self._t0 = time.monotonic()

    def sleep_until(self, t_ms: float) -> None:
        remaining = self._t0 + t_ms / 1000.0 - time.monotonic()
        if remaining > 0:
            time.sleep(remaining)


def run_session(
    config: SessionConfig,
    participant: ParticipantMeta,
    profile: BehaviorProfile,
    *,
    session_id: str = "session",
    setup: str = "VR",
    scene: Scene = DEFAULT_SCENE,
    behavior_seed: int = 0,
    on_events: Callable[[Session, list[EngineEvent]], None] | None = None,
    on_sample: Callable[[Session], None] | None = None,
    poll_commands: Callable[[], Iterable[str]] | None = None,
    session: Session | None = None,
) -> SessionLog:
    """Run one participant against one session until it terminates.

    Pass an existing Session (e.g. one already exposed to pollers) to drive
    it in place; otherwise a fresh one is created from config/participant.
    """
    if session is None:
        session = new_session(config, participant, scene=scene, session_id=session_id, setup=setup)
    generator = GazeGenerator(profile, session.scene, random.Random(behavior_seed),
                              gap_tolerance_ms=session.config.gap_tolerance_ms)
    config = session.config
    clock = WallClock() if config.timing_mode == TIMING_REAL else SimulatedClock()
    period = 1000.0 / profile.sample_rate_hz
    i = 0
    while not session.terminated:
        t = round(i * period)
        clock.sleep_until(t)
        if poll_commands is not None:
            for cmd in poll_commands():
                if cmd == CMD_STOP and not session.terminated:
                    events = session.stop(t)
                    if on_events is not None:
                        on_events(session, events)
            if session.terminated:
                break
        sample = generator.next_sample(t)
        events = session.step(sample)
        if events:
            generator.observe(events)
            if on_events is not None:
                on_events(session, events)
        if on_sample is not None:
            on_sample(session)
        i += 1
    return session.finalize()
