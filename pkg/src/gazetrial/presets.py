"""Calibrated behaviour presets and synthetic cohort construction.

Preset parameters live in data/presets.json (human-editable); they were
fitted empirically with scripts/calibrate_presets.py so that large simulated
cohorts land on the reference group medians. Cohorts add per-participant
log-normal latency multipliers plus synthetic ages and CARS scores drawn
from the published group means, so the analysis pipeline has participant
attributes to correlate against.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from importlib import resources

from .behavior import BehaviorProfile
from .config import ParticipantMeta
from .errors import ConfigError

PRESET_NAMES = ("NT_VR", "ASD_VR", "NT_AR", "ASD_AR")

# Group attribute distributions (mean, sd) used for synthetic metadata.
GROUP_ATTRS = {
    "ASD": {"age_years": (9.46, 2.27), "cars_score": (32.03, 2.87)},
    "NT": {"age_years": (9.99, 2.32), "cars_score": (9.23, 5.58)},
}
AGE_RANGE_YEARS = (6.0, 13.0)


def _load_preset_table() -> dict[str, dict]:
    text = resources.files("gazetrial.data").joinpath("presets.json").read_text("utf-8")
    table = json.loads(text)
    table.pop("_comment", None)
    return table


_PRESETS: dict[str, dict] | None = None


def preset(name: str) -> BehaviorProfile:
    """Calibrated profile for one group/setup cell; see PRESET_NAMES."""
    global _PRESETS
    if _PRESETS is None:
        _PRESETS = _load_preset_table()
    try:
        params = _PRESETS[name]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}") from None
    return BehaviorProfile.from_dict(params)


@dataclass(frozen=True)
class CohortSpec:
    """Recipe for one synthetic participant group."""

    group: str  # "ASD" | "NT"
    n_participants: int
    template: BehaviorProfile
    variability_sigma: float = 0.15  # log-sd of per-participant latency multipliers
    cars_latency_coupling: float = 0.0  # 0 = independent; 1 = latency multiplier tracks CARS exactly
    seed: int = 0

    def validate(self) -> None:
        if self.group not in GROUP_ATTRS:
            raise ConfigError("group", "must be 'ASD' or 'NT'")
        if self.n_participants < 1:
            raise ConfigError("n_participants", "must be >= 1")
        if self.variability_sigma < 0:
            raise ConfigError("variability_sigma", "must be >= 0")
        if not (-1.0 <= self.cars_latency_coupling <= 1.0):
            raise ConfigError("cars_latency_coupling", "must be within [-1, 1]")
        self.template.validate()


def make_cohort(spec: CohortSpec) -> list[tuple[ParticipantMeta, BehaviorProfile]]:
    """Draw a deterministic cohort of (metadata, individually scaled profile).

    The attribute and multiplier draws depend only on (group, n, sigma,
    coupling, seed) so two specs sharing those — e.g. the same participants
    under two setups — produce the same people.
    """
    spec.validate()
    rng = random.Random(spec.seed)
    age_mean, age_sd = GROUP_ATTRS[spec.group]["age_years"]
    cars_mean, cars_sd = GROUP_ATTRS[spec.group]["cars_score"]
    out: list[tuple[ParticipantMeta, BehaviorProfile]] = []
    for i in range(spec.n_participants):
        z_age = rng.gauss(0.0, 1.0)
        z_cars = rng.gauss(0.0, 1.0)
        z_mult = rng.gauss(0.0, 1.0)
        age = round(min(max(age_mean + age_sd * z_age, AGE_RANGE_YEARS[0]), AGE_RANGE_YEARS[1]), 3)
        cars = round(max(cars_mean + cars_sd * z_cars, 0.0), 3)
        c = spec.cars_latency_coupling
        w = c * z_cars + math.sqrt(max(0.0, 1.0 - c * c)) * z_mult
        multiplier = math.exp(spec.variability_sigma * w)
        meta = ParticipantMeta(
            participant_id=f"{spec.group.lower()}{i + 1:02d}",
            group=spec.group,
            age_years=age,
            cars_score=cars,
            synthetic=True,
        )
        out.append((meta, spec.template.scaled(multiplier)))
    return out
