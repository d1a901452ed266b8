"""
Matrix polynomials

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

__all__ = ["MatrixPolynomial"]

import numpy as np

from libopsim.linalg import as_operator, NotFiniteError


class MatrixPolynomial:
    """n x n array of scalar polynomials, coefficients stored degree ascending as an (n, n, deg+1) array"""
    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=complex)
        if arr.ndim == 1:
            arr = arr.reshape(1, 1, -1)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] == 0:
            raise ValueError("coefficients must have shape (n, n, deg+1), got {}".format(arr.shape))
        if not np.all(np.isfinite(arr)):
            raise NotFiniteError("polynomial coefficients must be finite")
        self.coeffs = arr

    @classmethod
    def scalar(cls, coeffs):
        """Scalar polynomial from a degree-ascending coefficient list"""
        return cls(np.asarray(coeffs, dtype=complex).reshape(1, 1, -1))

    @classmethod
    def monomial(cls, degree, size=1):
        """z^degree times the identity"""
        coeffs = np.zeros((size, size, degree + 1), dtype=complex)
        coeffs[:, :, degree] = np.eye(size)
        return cls(coeffs)

    @classmethod
    def from_lists(cls, entries):
        """Build from nested lists [[p_00, p_01, ...], ...] of coefficient lists"""
        size = len(entries)
        degree = max(len(c) for row in entries for c in row) - 1
        coeffs = np.zeros((size, size, degree + 1), dtype=complex)
        for i, row in enumerate(entries):
            if len(row) != size:
                raise ValueError("row {} has {} entries, expected {}".format(i, len(row), size))
            for j, c in enumerate(row):
                coeffs[i, j, :len(c)] = c
        return cls(coeffs)

    @classmethod
    def diagonal(cls, scalar_poly, size):
        """Scalar polynomial embedded diagonally at matrix level `size`"""
        coeffs = np.einsum("ij,k->ijk", np.eye(size), scalar_poly.coeffs[0, 0])
        return cls(coeffs)

    @property
    def size(self):
        return self.coeffs.shape[0]

    @property
    def degree(self):
        """Degree, ignoring trailing zero coefficients (0 for the zero polynomial)"""
        nonzero = np.flatnonzero(np.any(self.coeffs != 0, axis=(0, 1)))
        return int(nonzero[-1]) if nonzero.size else 0

    def scaled(self, factor):
        return MatrixPolynomial(self.coeffs * factor)

    def at(self, z):
        """Value at a scalar z, an n x n matrix"""
        return np.polynomial.polynomial.polyval(z, np.moveaxis(self.coeffs, 2, 0))

    def at_many(self, zs):
        """Values at an array of scalars, shape (len(zs), n, n)"""
        powers = np.power.outer(np.asarray(zs, dtype=complex), np.arange(self.coeffs.shape[2]))
        return np.einsum("gk,ijk->gij", powers, self.coeffs)

    def evaluate(self, a):
        """Horner evaluation at a square operator; block (i, j) of the result is p_ij(A)"""
        a = as_operator(a, square=True)
        m = a.shape[0]
        lifted = np.kron(np.eye(self.size), a)
        eye = np.eye(m)
        result = np.kron(self.coeffs[:, :, -1], eye)
        for k in range(self.coeffs.shape[2] - 2, -1, -1):
            result = result @ lifted + np.kron(self.coeffs[:, :, k], eye)
        return result

    def __repr__(self):
        return "MatrixPolynomial(size={}, degree={})".format(self.size, self.degree)
