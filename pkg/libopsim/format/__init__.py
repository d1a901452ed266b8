"""
Report formatter abstraction layer

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Formatters receive plain data (see :func:`plain`) and write it to a stream or, atomically, to a file path.
Matrices travel in the Matrix JSON form {"rows": r, "cols": c, "data": [[re, im], ...]} (row-major).
"""

import dataclasses
import io
import math
import os
import tempfile

import numpy as np
import scipy.sparse

__all__ = [
    "csv", "json", "txt", "Format", "plain", "encode_matrix", "decode_matrix", "MatrixFormatError", "FORMATS",
]

FORMATS = ("json", "csv", "txt")


class MatrixFormatError(ValueError):
    """Raised when a Matrix JSON document is malformed"""


def _number(value):
    if math.isfinite(value):
        return value
    if math.isnan(value):
        return "nan"
    return "inf" if value > 0 else "-inf"


def encode_matrix(matrix):
    """Matrix JSON document of a two-dimensional array"""
    if scipy.sparse.issparse(matrix):
        matrix = matrix.toarray()
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "data": [[_number(float(z.real)), _number(float(z.imag))] for z in arr.reshape(-1)],
    }


def decode_matrix(doc, pointer="matrix"):
    """Complex array from a Matrix JSON document, or from nested lists of real numbers"""
    if isinstance(doc, list):
        try:
            arr = np.asarray(doc, dtype=float)
        except (TypeError, ValueError):
            raise MatrixFormatError("{}: nested lists must hold numbers".format(pointer)) from None
        if arr.ndim != 2:
            raise MatrixFormatError("{}: nested lists must be two-dimensional".format(pointer))
        return arr.astype(complex)
    if not isinstance(doc, dict) or not {"rows", "cols", "data"} <= set(doc):
        raise MatrixFormatError("{}: expected a mapping with rows, cols and data".format(pointer))
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise MatrixFormatError("{}: rows and cols must be positive integers".format(pointer))
    if not isinstance(data, list) or len(data) != rows * cols:
        raise MatrixFormatError("{}.data: expected {} entries, got {}".format(
            pointer, rows * cols, len(data) if isinstance(data, list) else type(data).__name__))
    values = []
    for i, entry in enumerate(data):
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            values.append(complex(entry))
        elif isinstance(entry, list) and len(entry) == 2 and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry):
            values.append(complex(entry[0], entry[1]))
        else:
            raise MatrixFormatError("{}.data[{}]: expected [re, im]".format(pointer, i))
    arr = np.array(values, dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError("{}: entries must be finite".format(pointer))
    return arr


def plain(data):
    """Recursively convert results (arrays, records, sequences) to JSON-compatible data"""
    # pylint: disable=too-many-return-statements
    if data is None or isinstance(data, (bool, str, int)):
        return data
    if isinstance(data, float):
        return _number(data)
    if isinstance(data, complex):
        return _number(data.real) if data.imag == 0 else [_number(data.real), _number(data.imag)]
    if isinstance(data, np.generic):
        return plain(data.item())
    if isinstance(data, np.ndarray) or scipy.sparse.issparse(data):
        if data.ndim == 2:
            return encode_matrix(data)
        return [plain(v) for v in np.asarray(data).reshape(-1).tolist()]
    if hasattr(data, "to_spec"):
        return data.to_spec()
    if hasattr(data, "coeffs") and hasattr(data, "degree"):
        return {"size": data.size, "degree": data.degree,
                "coefficients": [encode_matrix(data.coeffs[:, :, k]) for k in range(data.coeffs.shape[2])]}
    if dataclasses.is_dataclass(data):
        return {f.name: plain(getattr(data, f.name)) for f in dataclasses.fields(data)}
    if hasattr(data, "_asdict"):
        return {k: plain(v) for k, v in data._asdict().items()}
    if isinstance(data, dict):
        return {str(k): plain(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [plain(v) for v in data]
    return str(data)


class Format:
    """Formatter abstraction class"""
    def __init__(self, *args, **kwargs):  # pylint: disable=unused-argument
        self.out_file = kwargs['out_file']
        self._buffer = None

    def format(self, data):
        """Format data"""
        self.write(str(data))

    def format_table(self, rows):
        """Format a list of records"""
        for row in rows:
            self.format(row)

    def write(self, text):
        """Write text to the output stream, or buffer it for the atomic file write"""
        if not text:
            return
        try:
            self._get_io().write(text)
        except BrokenPipeError:
            pass

    def close(self):
        """Move buffered output into place: temporary file in the target directory, then rename"""
        if self._buffer is None:
            return
        target = os.path.abspath(self.out_file)
        handle, temp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-", suffix=".part")
        try:
            with os.fdopen(handle, "w", encoding="utf-8", newline="") as fil:
                fil.write(self._buffer.getvalue())
            os.replace(temp, target)
        except BaseException:
            if os.path.exists(temp):
                os.unlink(temp)
            raise
        self._buffer = None

    def _get_io(self):
        if isinstance(self.out_file, str):
            if self._buffer is None:
                self._buffer = io.StringIO(newline="")
            return self._buffer
        if hasattr(self.out_file, "write"):
            return self.out_file
        raise TypeError("Unknown output file object type: {}".format(type(self.out_file)))
