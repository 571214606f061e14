"""Published JSON schemas for run specifications and emitted documents."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

from ..errors import ConfigError

NAMES = ("runspec", "trajectory", "check_report", "radial_field")


@lru_cache(maxsize=None)
def load(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(name)
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _registry() -> Registry:
    pairs = []
    for name in NAMES:
        schema = load(name)
        res = Resource.from_contents(schema)
        pairs.append((schema["$id"], res))
        pairs.append((f"{name}.schema.json", res))
    return Registry().with_resources(pairs)


def validator(name: str):
    schema = load(name)
    cls = jsonschema.validators.validator_for(schema)
    return cls(schema, registry=_registry())


def validate(doc, name: str) -> None:
    """Raise ConfigError listing every schema violation in ``doc``."""
    errors = sorted(validator(name).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        msgs = [f"{'/'.join(map(str, e.path)) or '<root>'}: {e.message}" for e in errors]
        raise ConfigError(f"{name} schema violation: " + "; ".join(msgs))
