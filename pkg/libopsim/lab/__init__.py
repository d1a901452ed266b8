"""
Laboratory: subcommand dispatch, playbooks and report emission

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""
__all__ = [
    "Laboratory", "Report", "Verdict",
]

import importlib
import logging
import os
import sys
import time

import yaml

from libopsim.car import MAX_MODES, foguel_hankel
from libopsim.config import RunConfig, ConfigError
from libopsim.format import encode_matrix, plain, FORMATS
from libopsim.lab import stages
from libopsim.lab.report import Report, Verdict, EXIT_OK, EXIT_INPUT
from libopsim.renorm import RenormConfig
from libopsim.schema import validate

LOG = logging.getLogger(__name__)


class Laboratory:
    """Runs validated configurations through the numerical modules and writes their reports"""
    def __init__(self, *args, **kwargs):  # pylint: disable=unused-argument
        self.format = kwargs.get("format") or "json"
        self.out_file = kwargs.get("out_file", sys.stdout)

    @property
    def actions(self):
        """Dictionary of subcommands and their description"""
        res = {}
        for met in [f for f in dir(self) if f.startswith("cmd_") and callable(getattr(self, f))]:
            res[met[len("cmd_"):]] = getattr(self, met).__doc__
        return res

    def run(self, config):
        """Validate, dispatch and time one configuration"""
        try:
            met = getattr(self, "cmd_{}".format(config.subcommand))
        except AttributeError:
            raise Laboratory.UnavailableActionError(config.subcommand) from None
        inputs, params = validate(config)
        LOG.info("running %s (seed %d)", config.subcommand, config.seed)
        start = time.perf_counter()
        results, verdicts, tables = met(inputs, params, config.seed)
        elapsed = time.perf_counter() - start
        return Report(self.echo(config, inputs, params), results, verdicts, {"total": elapsed}, tables)

    @staticmethod
    def echo(config, inputs, params):
        """Self-contained configuration: inputs inlined as Matrix JSON, parameters with defaults filled in"""
        return {
            "subcommand": config.subcommand,
            "inputs": {name: encode_matrix(value) for name, value in inputs.items() if value is not None},
            "params": plain(params),
            "seed": config.seed,
        }

    def action(self, config):
        """Run a configuration and write its report (and CSV tables next to a report file)"""
        report = self.run(config)
        fmt = config.format or self.format
        if fmt not in FORMATS:
            raise ConfigError("format", "unknown format {!r}, expected one of {}".format(fmt, FORMATS))
        out_file = self.out_file
        if config.out:
            out_file = os.path.join(config.base_dir, config.out)

        formatter = self.formatter(fmt, out_file)
        if fmt == "csv":
            formatter.format_table(report.verdicts)
        else:
            formatter.format(report.document())
        formatter.close()

        if isinstance(out_file, str):
            stem = os.path.splitext(out_file)[0]
            for name, rows in report.tables.items():
                table = self.formatter("csv", "{}.{}.csv".format(stem, name))
                table.format_table(rows)
                table.close()
        elif report.tables:
            LOG.debug("tables %s are written with report files only", sorted(report.tables))
        return report

    @staticmethod
    def formatter(fmt, out_file):
        module = importlib.import_module("libopsim.format.{}".format(fmt))
        return getattr(module, fmt.capitalize())(out_file=out_file)

    def play(self, file):
        """Run the configurations listed in a YAML playbook; returns the worst exit code"""
        with open(file, encoding="utf-8") as fil:
            doc = yaml.safe_load(fil.read())
        try:
            actions = doc["playbook"]["actions"]
        except (KeyError, TypeError):
            raise ConfigError("playbook.actions", "missing") from None
        base_dir = os.path.dirname(os.path.abspath(file))

        worst = EXIT_OK
        for index, action in enumerate(actions):
            if isinstance(action, str):
                action = {action: None}
            for cmd, arg in action.items():
                arg = dict(arg or {})
                if arg.get("out"):
                    arg["out"] = os.path.join(base_dir, arg["out"])
                try:
                    if "config" in arg:
                        config = RunConfig.load(os.path.join(base_dir, arg.pop("config")))
                        if config.subcommand != cmd:
                            raise ConfigError("playbook.actions[{}]".format(index),
                                              "configuration is for '{}'".format(config.subcommand))
                        config.override(**arg.pop("params", {}))
                        for key in ("seed", "out", "format"):
                            if key in arg:
                                setattr(config, key, arg.pop(key))
                    else:
                        config = RunConfig.from_dict(dict(arg, subcommand=cmd), base_dir)
                    code = self.action(config).exit_code
                except Laboratory.UnavailableActionError:
                    LOG.error("action '%s' unavailable", cmd)
                    code = EXIT_INPUT
                except (ValueError, OSError) as err:
                    LOG.error("action '%s' failed: %s", cmd, err)
                    code = EXIT_INPUT
                worst = max(worst, code)
        return worst

    @staticmethod
    def cmd_nearness(inputs, params, seed):
        """Quadratic nearness of t1 and t2, with the row form and asymptotic envelope"""
        return stages.nearness_stage(inputs["t1"], inputs["t2"], params["beta"], params["nmax"], params["samples"],
                                     seed)

    @staticmethod
    def cmd_renorm(inputs, params, seed):
        """Decomposition renorming of t (against c through v1, v2 when given)"""
        if inputs["c"] is None:
            for name in ("v1", "v2"):
                if inputs[name] is not None:
                    raise ConfigError("inputs.{}".format(name), "requires inputs.c")
        cfg = RenormConfig(inputs["t"], C=inputs["c"], V2=inputs["v2"], V1=inputs["v1"], beta=params["beta"],
                           gamma=params["gamma"], d=params["d"], p=params["p"])
        if cfg.p != 2:
            return stages.banach_stage(cfg)
        return stages.renorm_stage(cfg, params["trials"], seed)

    @staticmethod
    def cmd_rota(inputs, params, seed):
        """Rota renorming of t, or of a seeded instance"""
        t = stages.instance(inputs, params, seed)
        return stages.rota_stage(t, params["beta"], params["d"], stages.make_family(params, seed), params["level"])

    @staticmethod
    def cmd_dominance(inputs, params, seed):
        """Sampled dominance of t1 by t2 (Paulsen ratio of t1 without t2)"""
        return stages.dominance_stage(inputs["t1"], inputs["t2"], stages.make_family(params, seed),
                                      params["level"])

    @staticmethod
    def cmd_foguel(inputs, params, seed):  # pylint: disable=unused-argument
        """Power differences of the CAR-valued Foguel-Hankel operator"""
        N = params["N"]  # pylint: disable=invalid-name
        nmax = params["nmax"] or N
        m = params["m"] or min(MAX_MODES, 2 * N - 2 + nmax)
        if m < 2 * N - 1:
            raise ConfigError("params.m", "need m >= 2N-1 = {}".format(2 * N - 1))
        fh = foguel_hankel(params["alpha"], N, m)
        return stages.foguel_stage(fh, nmax, params["weight"], params["identity_check"])

    @staticmethod
    def cmd_alpha(inputs, params, seed):  # pylint: disable=unused-argument
        """Summability functionals of a coefficient sequence"""
        return stages.alpha_stage(params["alpha"], params["kmax"], params["nmax"], params["eps"])

    @staticmethod
    def cmd_crho(inputs, params, seed):  # pylint: disable=unused-argument
        """C_rho positivity of t on a polar grid"""
        return stages.crho_stage(inputs["t"], params["rho"], params["rmax"], params["grid"], params["radii"],
                                 params["ntrunc"])

    @staticmethod
    def cmd_shift(inputs, params, seed):  # pylint: disable=unused-argument
        """Truncated weighted shift, with a Schaffer dilation of t when given"""
        return stages.shift_stage(inputs["t"], params["beta"], params["N"], params["multiplicity"], params["order"])

    @staticmethod
    def cmd_pipeline(inputs, params, seed):
        """End-to-end chain of stages, each with its own verdicts"""
        name = params["name"]
        if name == "rota":
            t = stages.instance(inputs, params, seed)
            return stages.rota_stage(t, params["beta"], params["d"], stages.make_family(params, seed),
                                     params["level"])
        if name in ("foguel_b3", "foguel_b2"):
            return stages.foguel_pipeline(params, seed, dirichlet=name == "foguel_b2")
        if name == "zd":
            return stages.zd_pipeline(params, seed)
        return stages.racz_pipeline_stage(params, seed)

    class UnavailableActionError(ValueError):
        """Raised when a subcommand is not available"""
