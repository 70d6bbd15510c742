"""Session parameters and participant metadata."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .errors import ConfigError

TIMING_FAST = "fast"
TIMING_REAL = "real"

SIDE_LEFT = "left"
SIDE_RIGHT = "right"


def other_side(side: str) -> str:
    return SIDE_RIGHT if side == SIDE_LEFT else SIDE_LEFT


@dataclass(frozen=True)
class SessionConfig:
    """Per-session experiment parameters.

    The first four fields are the operator-entered task parameters; the
    rest control timing details, randomization, and the simulated clock.
    """

    eye_contact_dwell_ms: float = 2000.0
    response_dwell_ms: float = 2000.0
    cue_duration_ms: float = 5000.0
    trials_per_session: int = 2
    inactivity_timeout_ms: float = 1_200_000.0  # 20 minutes
    head_turn_fraction: float = 0.4
    cue_validity: float = 1.0
    rng_seed: int = 0
    timing_mode: str = TIMING_FAST
    object_catalog_size: int = 7
    feedback_duration_ms: float = 2000.0
    gap_tolerance_ms: float = 100.0
    count_gap_time: bool = False

    def validate(self) -> None:
        for name in ("eye_contact_dwell_ms", "response_dwell_ms", "cue_duration_ms",
                     "inactivity_timeout_ms", "feedback_duration_ms"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be > 0")
        if self.trials_per_session < 1:
            raise ConfigError("trials_per_session", "must be >= 1")
        if not (0.0 < self.head_turn_fraction < 1.0):
            raise ConfigError("head_turn_fraction", "must be strictly between 0 and 1")
        if not (0.0 <= self.cue_validity <= 1.0):
            raise ConfigError("cue_validity", "must be within [0, 1]")
        if self.timing_mode not in (TIMING_FAST, TIMING_REAL):
            raise ConfigError("timing_mode", f"must be '{TIMING_FAST}' or '{TIMING_REAL}'")
        if self.object_catalog_size < 2:
            raise ConfigError("object_catalog_size", "must be >= 2")
        if self.gap_tolerance_ms < 0:
            raise ConfigError("gap_tolerance_ms", "must be >= 0")
        if self.gap_tolerance_ms >= min(self.eye_contact_dwell_ms, self.response_dwell_ms):
            raise ConfigError("gap_tolerance_ms", "must be < the dwell durations")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration field")
        cfg = cls(**d)
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class ParticipantMeta:
    """Numeric participant attributes used for logging and correlations."""

    participant_id: str
    group: str  # "ASD" | "NT"
    age_years: float
    cars_score: float
    synthetic: bool = True

    def validate(self) -> None:
        if self.group not in ("ASD", "NT"):
            raise ConfigError("group", "must be 'ASD' or 'NT'")
        if self.age_years <= 0:
            raise ConfigError("age_years", "must be > 0")
        if self.cars_score < 0:
            raise ConfigError("cars_score", "must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ParticipantMeta":
        meta = cls(**d)
        meta.validate()
        return meta


_NAMED_CATALOG = ("ball", "toy_car", "duck", "teddy_bear", "cup", "drum", "rocket")


def object_catalog(size: int) -> tuple[str, ...]:
    """Object ids available for a trial; the default seven carry toy names."""
    if size < 2:
        raise ConfigError("object_catalog_size", "must be >= 2")
    if size <= len(_NAMED_CATALOG):
        return _NAMED_CATALOG[:size]
    extra = tuple(f"object_{i + 1:02d}" for i in range(len(_NAMED_CATALOG), size))
    return _NAMED_CATALOG + extra
