"""Shared test drivers: scripted gaze streams against a session."""

from gazetrial import GazeSample, Session
from gazetrial.geometry import DEFAULT_SCENE, AVATAR_EYES, OBJECT_LEFT, OBJECT_RIGHT

EYES_POINT = DEFAULT_SCENE.roi(AVATAR_EYES).center
LEFT_POINT = DEFAULT_SCENE.roi(OBJECT_LEFT).center
RIGHT_POINT = DEFAULT_SCENE.roi(OBJECT_RIGHT).center
AWAY_POINT = (0.95, -0.95)


def object_point(side):
    return LEFT_POINT if side == "left" else RIGHT_POINT


def run_scripted(session: Session, plan, period: int = 10, max_ms: int = 300_000):
    """Drive a session with plan(t_ms, session) -> (x, y) until it terminates.

    plan may return None for an invalid sample. Returns all emitted events.
    """
    events = []
    t = 0
    while not session.terminated and t <= max_ms:
        point = plan(t, session)
        if point is None:
            sample = GazeSample(t, 0.0, 0.0, valid=False)
        else:
            sample = GazeSample(t, point[0], point[1], valid=True)
        events.extend(session.step(sample))
        t += period
    return events


def follow_task_plan(response_delays_ms=None, respond_side=None):
    """A compliant participant: eyes until the cue starts, cued target after cue end.

    response_delays_ms optionally delays the object fixation per trial index;
    respond_side(trial_record) can override which object is fixated.
    """
    def plan(t, session):
        record = session.current_trial
        if record is None or record.cue_end_ms is None:
            return EYES_POINT
        delay = 0
        if response_delays_ms and record.trial_index < len(response_delays_ms):
            delay = response_delays_ms[record.trial_index]
        if t >= record.cue_end_ms + delay:
            side = respond_side(record) if respond_side else record.target_side
            return object_point(side)
        return EYES_POINT

    return plan
