"""Published JSON Schemas for the wire and file formats.

The .schema.json files in this directory are the contract for session
configs, persisted session logs, polled performance payloads, and mirror
frames. validate_payload() is used internally as a bug guard before
anything is persisted or served.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

SCHEMA_NAMES = ("session_config", "session_log", "performance_payload", "mirror_frame")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(f"unknown schema {name!r}")
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def _registry() -> Registry:
    resources_ = [
        (load_schema(name)["$id"], Resource.from_contents(load_schema(name)))
        for name in SCHEMA_NAMES
    ]
    return Registry().with_resources(resources_)


@lru_cache(maxsize=None)
def _validator(name: str) -> Draft202012Validator:
    return Draft202012Validator(load_schema(name), registry=_registry())


def validate_payload(payload: dict, schema_name: str) -> None:
    """Raise jsonschema.ValidationError if payload violates the named schema."""
    _validator(schema_name).validate(payload)


def is_valid(payload: dict, schema_name: str) -> bool:
    return _validator(schema_name).is_valid(payload)


ValidationError = jsonschema.ValidationError
