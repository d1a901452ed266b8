"""
Configuration schema

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import json
import os

import pytest

from libopsim.config import RunConfig, ConfigError
from libopsim.schema import validate, json_schema, SCHEMA, SUBCOMMANDS
from libopsim.sequences import AlphaSeq, BetaWeight


def test_defaults_are_filled_in():
    inputs, params = validate(RunConfig("alpha", params={"alpha": "example32"}))
    assert inputs == {}
    assert isinstance(params["alpha"], AlphaSeq)
    assert params["kmax"] == 10000
    assert params["eps"] == 0.5


def test_inline_operator_and_weight():
    inputs, params = validate(RunConfig("renorm", inputs={"t": [[0.5]]}, params={"beta": "dirichlet", "d": 4}))
    assert inputs["t"].shape == (1, 1)
    assert inputs["c"] is None
    assert isinstance(params["beta"], BetaWeight)
    assert params["gamma"] == "auto"
    assert params["d"] == 4


@pytest.mark.parametrize("config, pointer", [
    (RunConfig("eigen"), "subcommand"),
    (RunConfig("alpha", params={"alpha": "pisier", "foo": 1}), "params.foo"),
    (RunConfig("alpha"), "params.alpha"),
    (RunConfig("nearness", inputs={"t2": [[0]]}), "inputs.t1"),
    (RunConfig("crho", inputs={"t": [[0]], "c": [[0]]}), "inputs.c"),
    (RunConfig("crho", inputs={"t": [[0]]}, params={"rmax": 1.0}), "params.rmax"),
    (RunConfig("pipeline", params={"name": "bogus"}), "params.name"),
])
def test_errors_carry_pointers(config, pointer):
    with pytest.raises(ConfigError) as err:
        validate(config)
    assert err.value.pointer == pointer


def test_relative_inputs_resolve_against_the_config(configs_dir):
    inputs, _ = validate(RunConfig.load(os.path.join(configs_dir, "nearness.yml")))
    assert inputs["t1"][0, 1] == 0.5
    assert not inputs["t2"].any()


def test_every_subcommand_has_both_sections():
    assert SUBCOMMANDS == tuple(SCHEMA)
    for table in SCHEMA.values():
        assert set(table) == {"inputs", "params"}


def test_shipped_json_schema_is_current(configs_dir):
    with open(os.path.join(configs_dir, "schema.json"), encoding="utf-8") as fil:
        assert json.load(fil) == json_schema()


def test_json_schema_mirrors_the_validators():
    doc = json_schema()
    assert [v["properties"]["subcommand"]["const"] for v in doc["oneOf"]] == list(SUBCOMMANDS)
    for variant in doc["oneOf"]:
        name = variant["properties"]["subcommand"]["const"]
        for section in ("inputs", "params"):
            body = variant["properties"][section]
            assert set(body["properties"]) == set(SCHEMA[name][section])
            required = {key for key, validator in SCHEMA[name][section].items() if validator.required}
            assert set(body.get("required", [])) == required
    crho = doc["oneOf"][SUBCOMMANDS.index("crho")]["properties"]["params"]["properties"]
    assert crho["rmax"] == {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1, "default": 0.999}
    assert crho["rho"]["default"] == {"kind": "const", "value": 1.0}


@pytest.mark.parametrize("name", ["alpha.yml", "crho.yml", "nearness.yml", "rota.yml", "shift.yml"])
def test_example_configs_use_schema_keys(configs_dir, name):
    config = RunConfig.load(os.path.join(configs_dir, name))
    variant = json_schema()["oneOf"][SUBCOMMANDS.index(config.subcommand)]["properties"]
    assert set(config.inputs) <= set(variant["inputs"]["properties"])
    assert set(config.params) <= set(variant["params"]["properties"])
