"""Experiment configuration: TOML or JSON, validated before any computation."""

from __future__ import annotations

import copy
import json
import sys
from pathlib import Path

import jsonschema

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KINDS = (
    "free_energy",
    "subadditivity",
    "counterexample",
    "golden_thompson",
    "symmetrizer",
    "parisi_minimize",
    "corollary_parisi",
    "ac_control",
)


class ConfigError(ValueError):
    pass


POS_INT = {"type": "integer", "minimum": 1}
NONNEG_INT = {"type": "integer", "minimum": 0}
NUMBER = {"type": "number"}
POS = {"type": "number", "exclusiveMinimum": 0}
XI = {"type": "array", "items": {"type": "number", "minimum": 0}}
MODEL = {
    "type": "object",
    "properties": {"id": {"type": "string"}, "params": {"type": "object"}},
    "required": ["id"],
    "additionalProperties": False,
}
STATE_MC = {
    "type": "object",
    "properties": {"n_state_samples": POS_INT, "chunk": POS_INT},
    "required": ["n_state_samples"],
    "additionalProperties": False,
}
GRID = {"nx": {"type": "integer", "minimum": 2049}, "n_nodes": {"type": "integer", "minimum": 64}}
OPTIMIZER = {"k": {"type": "integer", "minimum": 1, "maximum": 4}, "n_restarts": NONNEG_INT, "max_iter": POS_INT, **GRID}

COMMON = {
    "experiment": {"enum": list(KINDS)},
    "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
    "description": {"type": "string"},
    "seed": NONNEG_INT,
    "threads": POS_INT,
    "output": {"type": "string"},
    "z": POS,
    "expect_violation": {"type": "boolean"},
}

SAMPLING = {
    "n_disorder": POS_INT,
    "convention": {"enum": ["probability", "counting"]},
    "state_mc": STATE_MC,
}

KIND_PROPERTIES = {
    "free_energy": ({"model": MODEL, **SAMPLING}, ["model"]),
    "subadditivity": (
        {
            "model1": MODEL,
            "model2": MODEL,
            "combined": MODEL,
            "coupling": {"enum": ["independent", "common"]},
            **SAMPLING,
        },
        ["model1", "model2"],
    ),
    "counterexample": (
        {"x": {"oneOf": [NUMBER, {"type": "array", "items": NUMBER, "minItems": 1}]}, "n_disorder": {"type": "integer", "minimum": 2}},
        ["x"],
    ),
    "golden_thompson": (
        {"dim": POS_INT, "n_pairs": POS_INT, "commuting": {"type": "boolean"}, "scale": POS},
        ["dim", "n_pairs"],
    ),
    "symmetrizer": (
        {
            "group": {"enum": ["signed_permutations", "qsk_local", "syk_monomials"]},
            "dim": POS_INT,
            "n_generators": POS_INT,
            "rep": {"enum": ["jordan_wigner", "left_regular"]},
            "n_matrices": POS_INT,
            "tolerance": POS,
        },
        ["group", "dim", "n_matrices"],
    ),
    "parisi_minimize": ({"xi": XI, **OPTIMIZER}, ["xi", "k"]),
    "corollary_parisi": ({"xi1": XI, "xi2": XI, **OPTIMIZER}, ["xi1", "xi2", "k"]),
    "ac_control": (
        {
            "xi": XI,
            "zeta": {
                "type": "object",
                "properties": {"breakpoints": {"type": "array", "items": NUMBER}, "values": {"type": "array", "items": NUMBER}},
                "required": ["breakpoints", "values"],
                "additionalProperties": False,
            },
            "controls": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "properties": {"control": {"enum": ["zero", "constant", "pde_feedback"]}, "u0": {"type": "number", "minimum": -1, "maximum": 1}},
                    "required": ["control"],
                    "additionalProperties": False,
                },
            },
            "n_steps": {"type": "integer", "minimum": 1000},
            "n_paths": {"type": "integer", "minimum": 2},
            "allowance": {"type": "number", "minimum": 0},
            **GRID,
        },
        ["xi", "zeta", "controls"],
    ),
}


def schema_for(kind: str) -> dict:
    props, required = KIND_PROPERTIES[kind]
    return {
        "type": "object",
        "properties": {**COMMON, **props},
        "required": ["experiment", "id"] + required,
        "additionalProperties": False,
    }


def validate(config: dict) -> dict:
    """Check ``config`` against the schema of its experiment kind; returns a deep copy."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a table")
    kind = config.get("experiment")
    if kind not in KIND_PROPERTIES:
        raise ConfigError(f"experiment must be one of {KINDS}, got {kind!r}")
    try:
        jsonschema.validate(config, schema_for(kind))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    return copy.deepcopy(config)


def load_config(path) -> dict:
    """Parse a ``.toml`` or ``.json`` file and validate it."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        if path.suffix == ".json":
            data = json.loads(raw.decode())
        else:
            data = tomllib.loads(raw.decode())
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return validate(data)


def set_path(config: dict, dotted: str, value) -> dict:
    """Copy of ``config`` with ``config[a][b]... = value`` for ``dotted = "a.b..."``."""
    out = copy.deepcopy(config)
    node = out
    keys = dotted.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{dotted}: {key} is not a table")
    node[keys[-1]] = value
    return out
