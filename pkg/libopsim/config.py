"""
Run configuration and parameter validators

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

A run configuration is a JSON or YAML document:

    subcommand: rota
    inputs: {t: t.json}
    params: {d: 48, beta: {kind: const}}
    seed: 7
    out: report.json

Relative input paths resolve against the directory of the configuration file. Every validation error names
its place in the document ("params.d", "inputs.t1").
"""

__all__ = ["RunConfig", "Parameter", "ConfigError", "SEED_LIMIT"]

import json
import logging
import os
from dataclasses import dataclass, field

import yaml

from libopsim.format import decode_matrix

LOG = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


class ConfigError(ValueError):
    """Raised when a configuration value fails validation; .pointer locates it in the document"""
    def __init__(self, pointer, message):
        super().__init__("{}: {}".format(pointer, message))
        self.pointer = pointer


def _load_document(path):
    with open(path, encoding="utf-8") as fil:
        return yaml.safe_load(fil.read())


def _with_default(schema, default):
    if default is not None:
        schema["default"] = default
    return schema


class Parameter:
    """Configuration value types"""
    # pylint: disable=too-few-public-methods
    class Numeric:
        """Integer comprised between minimum and maximum (inclusive)"""
        def __init__(self, minimum, maximum, default=None, required=False):
            self._min_max = (minimum, maximum)
            self.default = default
            self.required = required

        def parse(self, value, pointer, base_dir="."):  # pylint: disable=unused-argument
            """Parse integer value"""
            if isinstance(value, bool):
                raise ConfigError(pointer, "expected an integer, got {!r}".format(value))
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            if isinstance(value, str):
                try:
                    value = int(value)
                except ValueError:
                    raise ConfigError(pointer, "expected an integer, got {!r}".format(value)) from None
            if not isinstance(value, int):
                raise ConfigError(pointer, "expected an integer, got {!r}".format(value))
            min_val, max_val = self._min_max
            if value < min_val or value > max_val:
                raise ConfigError(pointer, "value must be comprised between {} and {}".format(min_val, max_val))
            return value

        def json_schema(self):
            return _with_default({"type": "integer", "minimum": self._min_max[0], "maximum": self._min_max[1]},
                                 self.default)

    class Real:
        """Real number within (or at) the bounds; `words` lists accepted keywords such as 'auto'"""
        def __init__(self, minimum=None, maximum=None, strict=False, words=(), default=None, required=False):
            self._min_max = (minimum, maximum)
            self._strict = strict
            self._words = words
            self.default = default
            self.required = required

        def parse(self, value, pointer, base_dir="."):  # pylint: disable=unused-argument
            """Parse real value"""
            if isinstance(value, str) and value in self._words:
                return value
            if isinstance(value, bool):
                raise ConfigError(pointer, "expected a number, got {!r}".format(value))
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ConfigError(pointer, "expected a number{}, got {!r}".format(
                    " or one of {}".format(self._words) if self._words else "", value)) from None
            min_val, max_val = self._min_max
            low_bad = min_val is not None and (value <= min_val if self._strict else value < min_val)
            high_bad = max_val is not None and (value >= max_val if self._strict else value > max_val)
            if low_bad or high_bad or value != value:
                raise ConfigError(pointer, "value must be comprised between {} and {}{}".format(
                    min_val, max_val, " (exclusive)" if self._strict else ""))
            return value

        def json_schema(self):
            out = {"type": "number"}
            for key, bound in zip(("Minimum", "Maximum"), self._min_max):
                if bound is not None:
                    out["exclusive" + key if self._strict else key.lower()] = bound
            if self._words:
                out = {"anyOf": [out, {"enum": list(self._words)}]}
            return _with_default(out, self.default)

    class Choice:
        """Value must be present in the constructor list"""
        def __init__(self, *expected_values, default=None, required=False):
            self._expected_values = expected_values
            self.default = default
            self.required = required

        def parse(self, value, pointer, base_dir="."):  # pylint: disable=unused-argument
            """Check if value is present in list"""
            if value not in self._expected_values:
                raise ConfigError(pointer, "invalid value {!r}, expected one of {}".format(
                    value, self._expected_values))
            return value

        def json_schema(self):
            return _with_default({"enum": list(self._expected_values)}, self.default)

    class Flag:
        """Boolean value, also spelled as on/off, yes/no, true/false, 1/0"""
        values = (
            ('0', 'off', 'no', 'false', 'disable', 'disabled'),  # False
            ('1', 'on', 'yes', 'true', 'enable', 'enabled')      # True
        )

        def __init__(self, default=False, required=False):
            self.default = default
            self.required = required

        def parse(self, value, pointer, base_dir="."):  # pylint: disable=unused-argument
            """Parse boolean value"""
            if isinstance(value, bool):
                return value
            if isinstance(value, int) and value in (0, 1):
                return bool(value)
            if isinstance(value, str):
                if value.lower() in self.values[0]:
                    return False
                if value.lower() in self.values[1]:
                    return True
            raise ConfigError(pointer, "invalid boolean value {!r}".format(value))

        def json_schema(self):
            return _with_default({"type": "boolean"}, self.default)

    class Spec:
        """
        Sequence, weight or rho spec: a mapping, inline JSON text, a short form understood by the factory
        (e.g. "const:2"), or the path of a JSON/YAML file holding one of these
        """
        def __init__(self, factory, default=None, required=False):
            self._factory = factory
            self.default = default
            self.required = required

        def parse(self, value, pointer, base_dir="."):
            """Build the spec object"""
            if isinstance(value, str):
                text = value.strip()
                path = os.path.join(base_dir, text)
                if text.startswith(("{", "[")):
                    try:
                        value = json.loads(text)
                    except json.JSONDecodeError as err:
                        raise ConfigError(pointer, "malformed JSON: {}".format(err)) from None
                elif os.path.isfile(path):
                    value = _load_document(path)
                elif ":" in text and text.partition(":")[2] and os.path.isfile(
                        os.path.join(base_dir, text.partition(":")[2])):
                    kind, _, ref = text.partition(":")
                    value = {"kind": kind, "table": _load_document(os.path.join(base_dir, ref))}
            try:
                return self._factory(value)
            except (ValueError, TypeError) as err:
                raise ConfigError(pointer, str(err)) from None

        def json_schema(self):
            return _with_default({"type": ["object", "array", "string"]},
                                 None if self.default is None else self.default.to_spec())

    class Matrix:
        """Operator given inline in Matrix JSON form or as a path to a Matrix JSON file"""
        def __init__(self, required=False):
            self.default = None
            self.required = required

        def parse(self, value, pointer, base_dir="."):
            """Load the operator"""
            if isinstance(value, str):
                path = os.path.join(base_dir, value)
                try:
                    value = _load_document(path)
                except OSError as err:
                    raise ConfigError(pointer, "cannot read '{}': {}".format(path, err.strerror)) from None
                except yaml.YAMLError as err:
                    raise ConfigError(pointer, "malformed document '{}': {}".format(path, err)) from None
            return decode_matrix(value, pointer)

        def json_schema(self):  # pylint: disable=no-self-use
            return {"type": ["object", "array", "string"]}


@dataclass
class RunConfig:
    """One run: the subcommand, its inputs and parameters, the master seed and the report path"""
    subcommand: str
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: object = None
    base_dir: str = "."
    format: object = None

    def __post_init__(self):
        if not isinstance(self.inputs, dict):
            raise ConfigError("inputs", "expected a mapping")
        if not isinstance(self.params, dict):
            raise ConfigError("params", "expected a mapping")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError("seed", "expected an integer in [0, 2^64)")

    @classmethod
    def from_dict(cls, doc, base_dir="."):
        """Build from a parsed document"""
        if not isinstance(doc, dict):
            raise ConfigError("$", "configuration must be a mapping")
        unknown = set(doc) - {"subcommand", "inputs", "params", "seed", "out", "format"}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        if "subcommand" not in doc:
            raise ConfigError("subcommand", "missing")
        return cls(doc["subcommand"], doc.get("inputs") or {}, doc.get("params") or {}, doc.get("seed", 0),
                   doc.get("out"), base_dir, doc.get("format"))

    @classmethod
    def load(cls, path):
        """Read a JSON or YAML configuration file"""
        try:
            doc = _load_document(path)
        except OSError as err:
            raise ConfigError("$", "cannot read '{}': {}".format(path, err.strerror)) from None
        except yaml.YAMLError as err:
            raise ConfigError("$", "malformed configuration '{}': {}".format(path, err)) from None
        LOG.debug("loaded configuration %s", path)
        return cls.from_dict(doc, os.path.dirname(os.path.abspath(path)))

    def override(self, **params):
        """Replace parameter values (command-line flags take precedence over the file)"""
        for key, value in params.items():
            if value is not None:
                self.params[key] = value
        return self

    def to_dict(self):
        return {"subcommand": self.subcommand, "inputs": self.inputs, "params": self.params, "seed": self.seed}
