"""
libopsim command line interface

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

    opsim <subcommand> [--config FILE] [--out FILE] [--format json|csv|txt] [--seed S] [--<param> VALUE ...]
    opsim play --config PLAYBOOK

Exit codes: 0 when every verdict passes (or is inconclusive), 2 on any failed verdict, 1 on input errors.
"""

__all__ = ["main", "build_parser"]

import argparse
import json
import logging
import os
import sys

from libopsim.config import RunConfig, ConfigError
from libopsim.format import FORMATS
from libopsim.lab import Laboratory
from libopsim.lab.report import EXIT_INPUT
from libopsim.schema import SCHEMA

LOG = logging.getLogger(__name__)


def build_parser():
    """Argument parser with one sub-parser per subcommand and one flag per schema entry"""
    parser = argparse.ArgumentParser(prog="opsim", description="libopsim Command Line Interface.")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    subparsers.required = True
    actions = Laboratory().actions

    for name, schema in SCHEMA.items():
        sub = subparsers.add_parser(name, help=actions.get(name))
        sub.add_argument("--config", help="JSON or YAML run configuration")
        sub.add_argument("--out", help="Write the report to the specified file")
        sub.add_argument("--format", choices=FORMATS, help="Report format")
        sub.add_argument("--seed", type=int, help="Master seed")
        sub.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
        inputs = sub.add_argument_group("inputs")
        for key in schema["inputs"]:
            inputs.add_argument("--{}".format(key), dest="input_{}".format(key),
                                help="Matrix JSON file or inline Matrix JSON")
        params = sub.add_argument_group("parameters")
        for key in schema["params"]:
            params.add_argument("--{}".format(key), dest="param_{}".format(key))

    play = subparsers.add_parser("play", help="Run the actions of a YAML playbook")
    play.add_argument("--config", required=True, help="YAML playbook")
    play.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
    return parser


def _input_value(name, value):
    """Inline JSON is parsed here; paths given on the command line are relative to the working directory"""
    text = value.strip()
    if text.startswith(("{", "[")):
        try:
            return json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError("inputs.{}".format(name), "malformed JSON: {}".format(err)) from None
    return os.path.abspath(text)


def _config(args):
    if args.config:
        config = RunConfig.load(args.config)
        if config.subcommand != args.subcommand:
            raise ConfigError("subcommand", "configuration is for '{}', not '{}'".format(
                config.subcommand, args.subcommand))
    else:
        config = RunConfig(args.subcommand)

    for key, value in vars(args).items():
        if value is None:
            continue
        if key.startswith("input_"):
            name = key[len("input_"):]
            config.inputs[name] = _input_value(name, value)
        elif key.startswith("param_"):
            config.override(**{key[len("param_"):]: value})
    if args.seed is not None:
        config.seed = args.seed
        config.__post_init__()
    if args.out:
        config.out = os.path.abspath(args.out)
    if args.format:
        config.format = args.format
    return config


def main(argv=None):
    """Parse arguments, run, and return the exit code"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    lab = Laboratory(out_file=sys.stdout)
    try:
        if args.subcommand == "play":
            return lab.play(args.config)
        return lab.action(_config(args)).exit_code
    except (ValueError, OSError) as err:
        print("opsim: error: {}".format(err), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
