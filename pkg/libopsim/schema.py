"""
Configuration schema

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Per subcommand: the accepted inputs (operators) and parameters, with their validators and defaults.
"""

__all__ = ["SCHEMA", "SUBCOMMANDS", "PIPELINES", "validate", "json_schema"]

from libopsim.config import Parameter, ConfigError, SEED_LIMIT
from libopsim.car import MAX_MODES
from libopsim.dilation import RhoSeq
from libopsim.dominance import PolyFamily
from libopsim.format import FORMATS
from libopsim.instance import INSTANCE_KINDS
from libopsim.sequences import AlphaSeq, BetaWeight

PIPELINES = ("rota", "foguel_b3", "foguel_b2", "zd", "racz")

_BETA = Parameter.Spec(BetaWeight.from_spec)
_ALPHA = Parameter.Spec(AlphaSeq.from_spec, required=True)
_RHO = Parameter.Spec(RhoSeq.from_spec, default=RhoSeq())
_FAMILY = {
    "family": Parameter.Choice(*PolyFamily.KINDS, default="random_coeff"),
    "degree": Parameter.Numeric(1, 64, default=3),
    "level": Parameter.Numeric(1, 8, default=1),
    "count": Parameter.Numeric(1, 100000, default=32),
    "vanish": Parameter.Numeric(0, 64, default=0),
}
_INSTANCE = {
    "instance": Parameter.Choice(*INSTANCE_KINDS, default="gaussian"),
    "n": Parameter.Numeric(1, 256, default=4),
    "cap": Parameter.Real(0, None, default=0.9),
}

SCHEMA = {
    "nearness": {
        "inputs": {"t1": Parameter.Matrix(required=True), "t2": Parameter.Matrix(required=True)},
        "params": {
            "beta": _BETA,
            "nmax": Parameter.Numeric(1, 100000, default=64),
            "samples": Parameter.Numeric(1, 100000, default=200),
        },
    },
    "renorm": {
        "inputs": {"t": Parameter.Matrix(required=True), "c": Parameter.Matrix(), "v1": Parameter.Matrix(),
                   "v2": Parameter.Matrix()},
        "params": {
            "beta": _BETA,
            "gamma": Parameter.Real(0, None, strict=True, words=("auto",), default="auto"),
            "d": Parameter.Numeric(0, 4096, default=8),
            "p": Parameter.Real(1, None, strict=True, default=2.0),
            "trials": Parameter.Numeric(0, 10000, default=8),
        },
    },
    "rota": {
        "inputs": {"t": Parameter.Matrix()},
        "params": dict({
            "beta": _BETA,
            "d": Parameter.Numeric(0, 4096, default=48),
        }, **_INSTANCE, **_FAMILY),
    },
    "dominance": {
        "inputs": {"t1": Parameter.Matrix(required=True), "t2": Parameter.Matrix()},
        "params": dict(_FAMILY),
    },
    "foguel": {
        "inputs": {},
        "params": {
            "alpha": _ALPHA,
            "N": Parameter.Numeric(1, 64, default=2),
            "m": Parameter.Numeric(1, MAX_MODES, default=None),
            "nmax": Parameter.Numeric(1, 64, default=None),
            "weight": Parameter.Choice("const", "dirichlet", default="const"),
            "identity_check": Parameter.Flag(default=True),
        },
    },
    "alpha": {
        "inputs": {},
        "params": {
            "alpha": _ALPHA,
            "kmax": Parameter.Numeric(1, 10 ** 7, default=10000),
            "nmax": Parameter.Numeric(1, 10 ** 7, default=10000),
            "eps": Parameter.Real(0, None, default=0.5),
        },
    },
    "crho": {
        "inputs": {"t": Parameter.Matrix(required=True)},
        "params": {
            "rho": _RHO,
            "rmax": Parameter.Real(0, 1, strict=True, default=0.999),
            "grid": Parameter.Numeric(8, 1 << 16, default=256),
            "radii": Parameter.Numeric(1, 1024, default=16),
            "ntrunc": Parameter.Numeric(1, 100000, default=64),
        },
    },
    "shift": {
        "inputs": {"t": Parameter.Matrix()},
        "params": {
            "beta": _BETA,
            "N": Parameter.Numeric(2, 4096, default=16),
            "multiplicity": Parameter.Numeric(1, 64, default=1),
            "order": Parameter.Numeric(1, 64, default=4),
        },
    },
    "pipeline": {
        "inputs": {"t": Parameter.Matrix()},
        "params": dict({
            "name": Parameter.Choice(*PIPELINES, required=True),
            "alpha": Parameter.Spec(AlphaSeq.from_spec, default=AlphaSeq("explicit", table=[1.0])),
            "beta": _BETA,
            "rho": _RHO,
            "d": Parameter.Numeric(0, 4096, default=8),
            "N": Parameter.Numeric(1, 64, default=2),
            "m": Parameter.Numeric(1, MAX_MODES, default=None),
            "k": Parameter.Numeric(1, 64, default=1),
            "M": Parameter.Real(0, None, strict=True, default=1.0),
            "trials": Parameter.Numeric(0, 10000, default=8),
        }, **_INSTANCE, **_FAMILY),
    },
}

SUBCOMMANDS = tuple(SCHEMA)


def validate(config):
    """Parsed (inputs, params) of a RunConfig, defaults filled in; raises ConfigError with a pointer"""
    if config.subcommand not in SCHEMA:
        raise ConfigError("subcommand", "unknown subcommand {!r}, expected one of {}".format(
            config.subcommand, SUBCOMMANDS))
    schema = SCHEMA[config.subcommand]
    parsed = {}
    for section, values in (("inputs", config.inputs), ("params", config.params)):
        table = schema[section]
        unknown = sorted(set(values) - set(table))
        if unknown:
            raise ConfigError("{}.{}".format(section, unknown[0]), "unknown {} for '{}'".format(
                "input" if section == "inputs" else "parameter", config.subcommand))
        out = {}
        for name, validator in table.items():
            pointer = "{}.{}".format(section, name)
            if values.get(name) is None:
                if validator.required:
                    raise ConfigError(pointer, "missing")
                out[name] = validator.default
            else:
                out[name] = validator.parse(values[name], pointer, config.base_dir)
        parsed[section] = out
    return parsed["inputs"], parsed["params"]


def json_schema():
    """JSON Schema (draft-07) of a run configuration; configs/schema.json is this document"""
    variants = []
    for name, table in SCHEMA.items():
        variant = {"properties": {"subcommand": {"const": name}}}
        for section in ("inputs", "params"):
            fields = table[section]
            body = {"type": "object", "additionalProperties": False,
                    "properties": {key: validator.json_schema() for key, validator in fields.items()}}
            required = [key for key, validator in fields.items() if validator.required]
            if required:
                body["required"] = required
            variant["properties"][section] = body
        variants.append(variant)
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "title": "opsim run configuration",
        "type": "object",
        "required": ["subcommand"],
        "additionalProperties": False,
        "properties": {
            "subcommand": {"enum": list(SUBCOMMANDS)},
            "inputs": {"type": "object"},
            "params": {"type": "object"},
            "seed": {"type": "integer", "minimum": 0, "maximum": SEED_LIMIT - 1, "default": 0},
            "out": {"type": "string"},
            "format": {"enum": list(FORMATS)},
        },
        "oneOf": variants,
    }
