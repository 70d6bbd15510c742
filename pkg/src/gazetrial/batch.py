"""Batch execution of whole cohorts in fast-simulated time.

A cohort spec file (JSON) names the groups, their sizes, per-setup behaviour
presets, and a master seed. Every (participant x setup) session runs
closed-loop and lands as one canonical log file named
{group}_{setup}_{participant_id}.json. All randomness derives from the
master seed, so a repeated run is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .config import SessionConfig, TIMING_FAST
from .errors import ConfigError
from .presets import CohortSpec, make_cohort, preset
from .runner import run_session
from .storage import store_log

DEFAULT_COHORT_RESOURCE = "cohort_default.json"


@dataclass(frozen=True)
class GroupSpec:
    group: str
    n: int
    presets: dict[str, str]  # setup -> preset name
    variability_sigma: float = 0.15
    cars_latency_coupling: float = 0.0


@dataclass(frozen=True)
class BatchSpec:
    seed: int
    setups: tuple[str, ...]
    groups: tuple[GroupSpec, ...]
    session_overrides: dict
    sample_rate_hz: float | None = None


def load_batch_spec(path: str | Path | None) -> BatchSpec:
    """Read a cohort spec file; None loads the packaged default cohort."""
    if path is None:
        text = resources.files("gazetrial.data").joinpath(DEFAULT_COHORT_RESOURCE).read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    raw = json.loads(text)
    try:
        groups = tuple(
            GroupSpec(
                group=g["group"],
                n=int(g["n"]),
                presets=dict(g["presets"]),
                variability_sigma=float(g.get("variability_sigma", 0.15)),
                cars_latency_coupling=float(g.get("cars_latency_coupling", 0.0)),
            )
            for g in raw["groups"]
        )
        spec = BatchSpec(
            seed=int(raw.get("seed", 0)),
            setups=tuple(raw.get("setups", ["VR", "AR"])),
            groups=groups,
            session_overrides=dict(raw.get("session", {})),
            sample_rate_hz=raw.get("sample_rate_hz"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("cohort_spec", f"invalid cohort spec: {exc}") from exc
    if not spec.groups:
        raise ConfigError("groups", "cohort spec needs at least one group")
    if not spec.setups:
        raise ConfigError("setups", "cohort spec needs at least one setup")
    return spec


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary labels (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def run_batch(spec: BatchSpec, out_dir: str | Path, seed: int | None = None,
              fast: bool = True, progress=None) -> list[Path]:
    """Run every (participant x setup) session; returns the written log paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    master = spec.seed if seed is None else seed
    overrides = dict(spec.session_overrides)
    overrides["timing_mode"] = TIMING_FAST if fast else overrides.get("timing_mode", TIMING_FAST)
    paths: list[Path] = []
    for group_spec in spec.groups:
        # One multiplier/attribute draw per participant, shared across setups.
        cohort_seed = derive_seed(master, group_spec.group, "cohort")
        for setup in spec.setups:
            preset_name = group_spec.presets.get(setup)
            if preset_name is None:
                raise ConfigError("presets", f"group {group_spec.group!r} has no preset for setup {setup!r}")
            template = preset(preset_name)
            if spec.sample_rate_hz is not None:
                template = replace(template, sample_rate_hz=float(spec.sample_rate_hz))
            cohort = make_cohort(CohortSpec(
                group=group_spec.group,
                n_participants=group_spec.n,
                template=template,
                variability_sigma=group_spec.variability_sigma,
                cars_latency_coupling=group_spec.cars_latency_coupling,
                seed=cohort_seed,
            ))
            for meta, profile in cohort:
                config = SessionConfig.from_dict({
                    **overrides,
                    "rng_seed": derive_seed(master, meta.participant_id, setup, "engine"),
                })
                session_id = f"{group_spec.group.lower()}_{setup.lower()}_{meta.participant_id}"
                log = run_session(
                    config, meta, profile,
                    session_id=session_id, setup=setup,
                    behavior_seed=derive_seed(master, meta.participant_id, setup, "behavior"),
                )
                path = store_log(log, out / f"{session_id}.json")
                paths.append(path)
                if progress is not None:
                    progress(log, path)
    return paths
