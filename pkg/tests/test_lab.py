"""
Laboratory dispatch, reports and playbooks

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import io
import json
import os

import pytest

from libopsim.config import RunConfig, ConfigError
from libopsim.format import plain
from libopsim.lab import Laboratory
from libopsim.lab.report import Report, Verdict, PASS, FAIL, INCONCLUSIVE, EXIT_OK, EXIT_INPUT, EXIT_FAIL
from libopsim.schema import SUBCOMMANDS


def _load(configs_dir, name):
    return RunConfig.load(os.path.join(configs_dir, name))


def _statuses(report):
    return {v.name: v.status for v in report.verdicts}


def test_verdict_bounds():
    assert Verdict.at_most("x", 1.0, 1.0, 0.0).status == PASS
    assert Verdict.at_most("x", 1.1, 1.0, 0.05).status == FAIL
    assert Verdict.at_most("x", 1.1, 10.0, 0.02, relative=True).margin == pytest.approx(9.1)
    assert Verdict.at_least("x", 0.9, 1.0, 0.2, relative=True).status == PASS
    assert Verdict.at_least("x", 0.7, 1.0, 0.2, relative=True).status == FAIL
    verdict = Verdict.at_most("x", 0.5, 1.0, 0.0, d=3)
    assert verdict.params == {"d": 3, "value": 0.5, "limit": 1.0}


def test_report_exit_code():
    passed = Verdict.flag("ok", True)
    assert Report({}, {}, [passed, Verdict.inconclusive("tail", "no bound")]).exit_code == EXIT_OK
    assert Report({}, {}, [passed, Verdict.flag("bad", False)]).exit_code == EXIT_FAIL
    assert Report({}, {}, []).exit_code == EXIT_OK


def test_actions_cover_every_subcommand():
    assert set(Laboratory().actions) == set(SUBCOMMANDS)
    assert all(Laboratory().actions.values())


def test_unavailable_action():
    with pytest.raises(Laboratory.UnavailableActionError):
        Laboratory().run(RunConfig("eigen"))


def test_rota_example(configs_dir):
    report = Laboratory().run(_load(configs_dir, "rota.yml"))
    assert report.exit_code == EXIT_OK
    assert report.results["t1_norm"] <= 1 + 1e-8
    assert _statuses(report)["renormed_contraction"] == PASS


def test_foguel_example(configs_dir):
    report = Laboratory().run(_load(configs_dir, "foguel.json"))
    assert report.exit_code == EXIT_OK
    assert report.results["A"] == pytest.approx(1.0)
    assert report.results["B2"] == pytest.approx(1.0)
    assert report.results["B3"] == pytest.approx(1.0)
    assert report.results["alpha_spec"] == {"kind": "explicit", "table": [1.0]}
    assert [entry[0] for entry in report.results["power_diffs"]] == [1, 2]
    n, value, bound = report.results["power_diffs"][0]
    assert (n, bound) == (1, 0.0)
    assert value == pytest.approx(1.0, abs=1e-12)
    assert value > bound
    assert not [name for name in _statuses(report) if "estimate" in name or "dp" in name]
    assert len(report.tables["power_diff"]) == 2


def test_foguel_needs_enough_modes():
    with pytest.raises(ConfigError) as err:
        Laboratory().run(RunConfig("foguel", params={"alpha": [1.0], "N": 3, "m": 4}))
    assert err.value.pointer == "params.m"


def test_crho_failure_is_reported(jordan):
    report = Laboratory().run(RunConfig("crho", inputs={"t": jordan.real.tolist()}, params={"rho": "const:1"}))
    assert report.exit_code == EXIT_FAIL
    assert _statuses(report)["crho_positivity"] == FAIL


def test_alpha_example32(configs_dir):
    report = Laboratory().run(_load(configs_dir, "alpha.yml"))
    assert report.exit_code == EXIT_OK
    assert report.results["example32_at_kmax"] < 0.06
    assert report.results["B3"]["converged"] is False


def test_renorm_rejects_orphan_intertwiners():
    config = RunConfig("renorm", inputs={"t": [[0.5]], "v1": [[1.0]]})
    with pytest.raises(ConfigError) as err:
        Laboratory().run(config)
    assert err.value.pointer == "inputs.v1"


def test_report_reruns_identically(configs_dir):
    lab = Laboratory()
    first = lab.run(_load(configs_dir, "nearness.yml"))
    again = lab.run(RunConfig.from_dict(json.loads(json.dumps(plain(first.config)))))
    assert plain(again.config) == plain(first.config)
    assert plain(again.results) == plain(first.results)
    assert plain(again.verdicts) == plain(first.verdicts)


def test_action_writes_report_and_tables(configs_dir, tmp_path):
    config = _load(configs_dir, "nearness.yml")
    config.out = str(tmp_path / "report.json")
    report = Laboratory().action(config)
    with open(config.out, encoding="utf-8") as fil:
        doc = json.load(fil)
    assert set(doc) == {"config", "results", "verdicts", "timings"}
    assert doc["results"]["s"] == pytest.approx(report.results["s"])
    with open(str(tmp_path / "report.partials.csv"), "rb") as fil:
        header = fil.readline()
    assert header == b"n,s_partial,term,power_difference\r\n"


def test_action_csv_to_stream(configs_dir):
    out = io.StringIO()
    config = _load(configs_dir, "crho.yml")
    config.format = "csv"
    Laboratory(out_file=out).action(config)
    assert out.getvalue().startswith("name,status,margin,tolerance,params\r\n")


def test_action_unknown_format(configs_dir):
    config = _load(configs_dir, "crho.yml")
    config.format = "xml"
    with pytest.raises(ConfigError):
        Laboratory(out_file=io.StringIO()).action(config)


def test_play(configs_dir, tmp_path):
    playbook = tmp_path / "book.yml"
    playbook.write_text("\n".join([
        "playbook:",
        "  actions:",
        "    - crho:",
        "        config: {}".format(os.path.join(configs_dir, "crho.yml")),
        "        out: crho.json",
        "    - alpha:",
        "        params: {alpha: 'geometric:0.5', kmax: 100, nmax: 100}",
        "        out: alpha.txt",
        "        format: txt",
    ]))
    assert Laboratory().play(str(playbook)) == EXIT_OK
    assert os.path.isfile(str(tmp_path / "crho.json"))
    assert os.path.isfile(str(tmp_path / "alpha.txt"))


def test_play_reports_the_worst_code(tmp_path):
    playbook = tmp_path / "book.yml"
    playbook.write_text("playbook:\n  actions:\n    - crho:\n        inputs: {t: [[0, 2], [0, 0]]}\n"
                        "        params: {rho: 'const:1'}\n        out: fail.json\n    - eigen\n")
    assert Laboratory().play(str(playbook)) == EXIT_FAIL
    playbook.write_text("playbook:\n  actions:\n    - eigen\n")
    assert Laboratory().play(str(playbook)) == EXIT_INPUT


def test_play_mismatched_config(configs_dir, tmp_path):
    playbook = tmp_path / "book.yml"
    playbook.write_text("playbook:\n  actions:\n    - rota:\n        config: {}\n".format(
        os.path.join(configs_dir, "crho.yml")))
    assert Laboratory().play(str(playbook)) == EXIT_INPUT


def test_shift_example(configs_dir):
    report = Laboratory().run(_load(configs_dir, "shift.yml"))
    assert report.exit_code == EXIT_OK
    assert {"dirichlet_weights", "two_isometry", "schaeffer_dilation"} <= set(_statuses(report))


@pytest.mark.slow
@pytest.mark.parametrize("name, key", [
    ("pipeline-b3.yml", "B3_finite"),
    ("pipeline-zd.yml", "dominated_by_dilation"),
    ("pipeline-racz.yml", "racz_bound"),
    ("rota-random.yml", "paulsen_renormed"),
])
def test_pipelines(configs_dir, name, key):
    report = Laboratory().run(_load(configs_dir, name))
    statuses = _statuses(report)
    assert statuses[key] == PASS
    assert FAIL not in statuses.values()
    assert report.exit_code == EXIT_OK


def test_dominance_lower_bounds():
    config = RunConfig("dominance", inputs={"t1": [[0.5, 1.0], [0.0, 0.5]]},
                       params={"level": 2, "count": 4, "family": "monomial", "degree": 2})
    report = Laboratory().run(config)
    assert report.results["lower_bound"] is True
    assert report.results["ratio"] == "paulsen"
    assert _statuses(report) == {"level_embedding[level=2]": PASS}
    assert INCONCLUSIVE not in _statuses(report).values()
