"""gazetrial: a headless gaze-driven joint-attention training platform.

Core pieces: dwell-based fixation registration over scene regions, the
trial state machine (eye contact gates a timed directional cue, then a
response window with feedback), synthetic participants calibrated to
reference group behaviour, nonparametric statistics, and an HTTP session
service with canonical JSON logs.
"""

from .behavior import BehaviorProfile, GazeGenerator
from .config import ParticipantMeta, SessionConfig
from .dwell import DwellConfig, DwellTracker, FixationEvent
from .engine import (ClockTick, Session, SessionLog, SessionMetrics,
                     TrialRecord, new_session, select_trial_objects)
from .errors import (ConfigError, GazeTrialError, IllegalStateError,
                     SampleOrderError, SessionClosedError)
from .events import (EngineEvent, EyeContactRegistered, FeedbackIssued,
                     PhaseChanged, ResponseRegistered, SessionTerminated,
                     TERMINATED_COMPLETED, TERMINATED_INACTIVITY,
                     TERMINATED_OPERATOR, TrialPhase, TrialStarted)
from .geometry import (AVATAR_EYES, DEFAULT_SCENE, OBJECT_LEFT, OBJECT_RIGHT,
                       Circle, GazeSample, Rect, Roi, Scene, point_in_roi)
from .presets import CohortSpec, PRESET_NAMES, make_cohort, preset
from .runner import run_session
from .stats import (ALT_GREATER, ALT_LESS, ALT_TWO_TAILED, StatTestResult,
                    mann_whitney_u, mann_whitney_z_from_summary, spearman)

__version__ = "0.1.0"

__all__ = [
    "AVATAR_EYES", "ALT_GREATER", "ALT_LESS", "ALT_TWO_TAILED",
    "BehaviorProfile", "Circle", "ClockTick", "CohortSpec", "ConfigError",
    "DEFAULT_SCENE", "DwellConfig", "DwellTracker", "EngineEvent",
    "EyeContactRegistered", "FeedbackIssued", "FixationEvent",
    "GazeGenerator", "GazeSample", "GazeTrialError", "IllegalStateError",
    "OBJECT_LEFT", "OBJECT_RIGHT", "ParticipantMeta", "PhaseChanged",
    "PRESET_NAMES", "Rect", "ResponseRegistered", "Roi", "SampleOrderError",
    "Scene", "Session", "SessionClosedError", "SessionConfig", "SessionLog",
    "SessionMetrics", "SessionTerminated", "StatTestResult",
    "TERMINATED_COMPLETED", "TERMINATED_INACTIVITY", "TERMINATED_OPERATOR",
    "TrialPhase", "TrialRecord", "TrialStarted", "make_cohort",
    "mann_whitney_u", "mann_whitney_z_from_summary", "new_session",
    "point_in_roi", "preset", "run_session", "select_trial_objects",
    "spearman",
]
