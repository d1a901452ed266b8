"""
Matrix JSON and report formatters

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import io
import json
import math
import os
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
import pytest

from libopsim.format import encode_matrix, decode_matrix, plain, MatrixFormatError
from libopsim.format.csv import Csv
from libopsim.format.json import Json
from libopsim.format.txt import Txt
from libopsim.sequences import BetaWeight


def test_matrix_json_round_trip(complex_matrix):
    a = complex_matrix(3, 2)
    doc = json.loads(json.dumps(encode_matrix(a)))
    assert doc["rows"] == 3 and doc["cols"] == 2
    assert np.array_equal(decode_matrix(doc), a)


def test_decode_nested_lists():
    assert np.array_equal(decode_matrix([[0, 2], [0, 0]]), np.array([[0, 2], [0, 0]], dtype=complex))


def test_decode_accepts_real_entries():
    doc = {"rows": 1, "cols": 2, "data": [1.5, [0.0, -1.0]]}
    assert np.array_equal(decode_matrix(doc), np.array([[1.5, -1j]]))


@pytest.mark.parametrize("doc, where", [
    ({"rows": 2, "cols": 2, "data": [[1, 0]] * 3}, "inputs.t.data"),
    ({"rows": 1, "cols": 1, "data": [["a", 0]]}, "inputs.t.data[0]"),
    ({"rows": 0, "cols": 1, "data": []}, "inputs.t"),
    ({"cols": 1, "data": []}, "inputs.t"),
    ([1, 2], "inputs.t"),
])
def test_decode_errors_name_their_place(doc, where):
    with pytest.raises(MatrixFormatError) as err:
        decode_matrix(doc, "inputs.t")
    assert str(err.value).startswith(where)


def test_decode_rejects_non_finite():
    with pytest.raises(MatrixFormatError):
        decode_matrix({"rows": 1, "cols": 1, "data": [[1e308 * 10, 0.0]]})


def test_plain_conversions():
    Pair = namedtuple("Pair", ["a", "b"])

    @dataclass
    class Box:
        value: float
        label: str

    assert plain(np.float64(0.25)) == 0.25
    assert plain(math.inf) == "inf"
    assert plain(-math.inf) == "-inf"
    assert plain(math.nan) == "nan"
    assert plain(1 + 2j) == [1.0, 2.0]
    assert plain(3 + 0j) == 3.0
    assert plain(np.arange(3)) == [0, 1, 2]
    assert plain(Pair(1, np.int64(2))) == {"a": 1, "b": 2}
    assert plain(Box(0.5, "x")) == {"value": 0.5, "label": "x"}
    assert plain(BetaWeight.dirichlet()) == {"kind": "sqrt"}
    assert plain(np.eye(2))["rows"] == 2


def test_json_to_stream():
    out = io.StringIO()
    Json(out_file=out).format({"b": 1, "a": [0.1, math.inf]})
    text = out.getvalue()
    assert text.endswith("\n")
    assert json.loads(text) == {"a": [0.1, "inf"], "b": 1}
    assert text.index('"a"') < text.index('"b"')


def test_json_file_is_written_atomically(tmp_path):
    target = str(tmp_path / "report.json")
    fmt = Json(out_file=target)
    fmt.format({"s": 0.5})
    assert not os.path.exists(target)
    fmt.close()
    with open(target, encoding="utf-8") as fil:
        assert json.load(fil) == {"s": 0.5}
    assert sorted(os.listdir(tmp_path)) == ["report.json"]


def test_csv_table(tmp_path):
    target = str(tmp_path / "table.csv")
    fmt = Csv(out_file=target)
    fmt.format_table([{"n": 1, "value": 0.1}, {"n": 2, "extra": "x, y"}])
    fmt.close()
    with open(target, "rb") as fil:
        content = fil.read().decode("utf-8")
    assert content == 'n,value,extra\r\n1,0.1,\r\n2,,"x, y"\r\n'


def test_csv_float_cells_round_trip():
    out = io.StringIO()
    Csv(out_file=out).format({"x": 0.1 + 0.2})
    assert out.getvalue().splitlines()[1] == repr(0.1 + 0.2)


def test_txt_summarizes_matrices():
    out = io.StringIO()
    Txt(out_file=out).format({"matrix": np.eye(2), "s": 0.5, "list": [1, 2]})
    lines = out.getvalue().splitlines()
    assert lines[0] == "matrix: <2x2 matrix>"
    assert lines[1] == "s:      0.5"
    assert lines[2] == "list:   1 2"


def test_unknown_output_target():
    with pytest.raises(TypeError):
        Json(out_file=42).format({})
