"""Run-config loading and schema validation for the CLI.

Configs are JSON documents validated before any computation runs; unknown
keys are rejected everywhere (additionalProperties: false), so typos fail
fast with exit code 2 instead of silently changing a run.  Temperature
accepts the string "inf" since JSON has no infinity literal.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping

import jsonschema

from .lattice import Lattice
from .model import ModelParams


class ConfigError(ValueError):
    """Invalid run configuration; maps to exit code 2."""


_SITE = {"type": "array", "items": {"type": "integer"}, "minItems": 1}

_BOUNDARY = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["free", "periodic", "fixed", "all_plus",
                          "all_minus", "dobrushin"]},
        "wall": {"type": "number"},
        "pattern": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [_SITE, {"type": "integer"}],
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_LATTICE = {
    "type": "object",
    "properties": {
        "d": {"type": "integer", "minimum": 1},
        "extents": {"type": "array", "items": {"type": "integer", "minimum": 1},
                    "minItems": 1},
        "boundary": _BOUNDARY,
    },
    "required": ["extents"],
    "additionalProperties": False,
}

_TEMPERATURE = {"anyOf": [{"type": "number"}, {"const": "inf"}]}

_MODEL = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["ising", "potts"]},
        "T": _TEMPERATURE,
        "h": {"type": "number"},
        "q": {"type": "integer", "minimum": 2},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_OBSERVABLE = {
    "type": "object",
    "properties": {
        "type": {"enum": ["magnetization", "abs_magnetization", "spin",
                          "spin_product"]},
        "site": _SITE,
        "sites": {"type": "array", "items": _SITE, "minItems": 1},
    },
    "required": ["type"],
    "additionalProperties": False,
}

_SAMPLER = {"enum": ["metropolis", "wolff"]}

SCHEMAS: dict[str, dict] = {
    "enumerate": {
        "type": "object",
        "properties": {
            "lattice": _LATTICE,
            "model": _MODEL,
            "cap": {"type": "integer", "minimum": 1},
            "marginals": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "window": {"type": "array", "items": _SITE, "minItems": 1},
                        "pattern": {"type": "array",
                                    "items": {"type": "integer"}, "minItems": 1},
                    },
                    "required": ["window", "pattern"],
                    "additionalProperties": False,
                },
            },
            "correlations": {"type": "array",
                             "items": {"type": "array", "items": _SITE,
                                       "minItems": 1}},
            "verify_gibbs": {
                "type": "object",
                "properties": {
                    "window": {"anyOf": [{"type": "integer", "minimum": 1},
                                         {"type": "array",
                                          "items": {"type": "integer",
                                                    "minimum": 1}}]},
                },
                "required": ["window"],
                "additionalProperties": False,
            },
            "verify_fkg": {"type": "array",
                           "items": {"type": "array", "items": _SITE,
                                     "minItems": 2, "maxItems": 2}},
            "seed": {"type": "integer", "minimum": 0},
        },
        "required": ["lattice", "model"],
        "additionalProperties": False,
    },
    "sample": {
        "type": "object",
        "properties": {
            "lattice": _LATTICE,
            "model": _MODEL,
            "sampler": _SAMPLER,
            "observables": {"type": "array", "items": _OBSERVABLE, "minItems": 1},
            "n_sweeps": {"type": "integer", "minimum": 1},
            "burn_in": {"type": "integer", "minimum": 0},
            "seed": {"type": "integer", "minimum": 0},
            "figure": {"type": "string"},
        },
        "required": ["lattice", "model", "sampler", "observables", "n_sweeps"],
        "additionalProperties": False,
    },
    "sweep": {
        "type": "object",
        "properties": {
            "lattice": _LATTICE,
            "model": _MODEL,
            "temperatures": {"type": "array", "items": {"type": "number"},
                             "minItems": 1},
            "sampler": _SAMPLER,
            "observables": {"type": "array", "items": _OBSERVABLE, "minItems": 1},
            "n_sweeps": {"type": "integer", "minimum": 1},
            "burn_in": {"type": "integer", "minimum": 0},
            "seed": {"type": "integer", "minimum": 0},
            "figure": {"type": "string"},
        },
        "required": ["lattice", "model", "temperatures", "sampler",
                     "observables", "n_sweeps"],
        "additionalProperties": False,
    },
    "onsager": {
        "type": "object",
        "properties": {
            "temperatures": {"type": "array", "items": {"type": "number"},
                             "minItems": 1},
            "t_min": {"type": "number", "exclusiveMinimum": 0},
            "t_max": {"type": "number", "exclusiveMinimum": 0},
            "count": {"type": "integer", "minimum": 2},
            "figure": {"type": "string"},
        },
        "additionalProperties": False,
    },
    "series-check": {
        "type": "object",
        "properties": {
            "lattice": _LATTICE,
            "model": _MODEL,
            "t": {"type": "number", "exclusiveMinimum": 0},
        },
        "required": ["lattice", "model"],
        "additionalProperties": False,
    },
    "census": {
        "type": "object",
        "properties": {
            "lattice": _LATTICE,
            "model": _MODEL,
            "cap": {"type": "integer", "minimum": 1},
        },
        "required": ["lattice"],
        "additionalProperties": False,
    },
    "render": {
        "type": "object",
        "properties": {
            "lattice": _LATTICE,
            "model": _MODEL,
            "values": {"type": "array", "items": {"type": "integer"},
                       "minItems": 1},
            "sample": {
                "type": "object",
                "properties": {
                    "sampler": _SAMPLER,
                    "n_sweeps": {"type": "integer", "minimum": 1},
                    "burn_in": {"type": "integer", "minimum": 0},
                },
                "required": ["sampler", "n_sweeps"],
                "additionalProperties": False,
            },
            "overlay": {"type": "boolean"},
            "seed": {"type": "integer", "minimum": 0},
        },
        "required": ["lattice"],
        "additionalProperties": False,
    },
}


def validate_config(obj: Any, command: str) -> dict:
    if command not in SCHEMAS:
        raise ConfigError(f"unknown subcommand {command!r}")
    try:
        jsonschema.validate(obj, SCHEMAS[command],
                            cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from exc
    return obj


def load_config(path: str, command: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            obj = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(obj, command)


def build_lattice(cfg: Mapping) -> Lattice:
    try:
        return Lattice.from_dict(cfg["lattice"])
    except ValueError as exc:
        raise ConfigError(f"invalid lattice: {exc}") from exc


def build_params(cfg: Mapping, temperature: float | None = None) -> ModelParams:
    model = cfg["model"]
    if temperature is None:
        if "T" not in model:
            raise ConfigError("model.T is required here")
        temperature = math.inf if model["T"] == "inf" else float(model["T"])
    q = None
    if model["kind"] == "potts":
        if "q" not in model:
            raise ConfigError("potts model needs q")
        q = int(model["q"])
    elif "q" in model:
        raise ConfigError("q is only meaningful for the potts model")
    try:
        return ModelParams(temperature, field=float(model.get("h", 0.0)), q=q)
    except ValueError as exc:
        raise ConfigError(f"invalid model: {exc}") from exc
