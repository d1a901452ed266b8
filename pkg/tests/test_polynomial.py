"""
Matrix polynomials

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import numpy as np
import pytest

from libopsim.linalg import NotFiniteError
from libopsim.polynomial import MatrixPolynomial


def test_from_lists_pads_short_entries():
    poly = MatrixPolynomial.from_lists([[[1.0], [0.0, 2.0]], [[0.0], [1.0, 0.0, 3.0]]])
    assert poly.size == 2
    assert poly.degree == 2
    assert poly.coeffs.shape == (2, 2, 3)
    assert poly.coeffs[0, 1, 1] == 2.0


def test_from_lists_rejects_ragged_rows():
    with pytest.raises(ValueError):
        MatrixPolynomial.from_lists([[[1.0], [1.0]], [[1.0]]])


def test_degree_ignores_trailing_zeros():
    assert MatrixPolynomial.scalar([1.0, 2.0, 0.0, 0.0]).degree == 1
    assert MatrixPolynomial.scalar([0.0]).degree == 0


def test_monomial_and_diagonal():
    mono = MatrixPolynomial.monomial(3, size=2)
    assert mono.degree == 3
    assert np.allclose(mono.at(2.0), 8 * np.eye(2))
    diag = MatrixPolynomial.diagonal(MatrixPolynomial.scalar([1.0, -1.0]), 3)
    assert np.allclose(diag.at(0.5), 0.5 * np.eye(3))


def test_at_many_agrees_with_at(rng):
    coeffs = rng.standard_normal((2, 2, 4)) + 1j * rng.standard_normal((2, 2, 4))
    poly = MatrixPolynomial(coeffs)
    zs = np.exp(1j * np.linspace(0, 6, 7))
    many = poly.at_many(zs)
    for z, value in zip(zs, many):
        assert np.allclose(poly.at(z), value)


def test_evaluate_block_layout(rng):
    t = rng.standard_normal((3, 3))
    poly = MatrixPolynomial.from_lists([[[0.0, 1.0], [1.0]], [[0.0], [0.0, 0.0, 1.0]]])
    value = poly.evaluate(t)
    assert np.allclose(value[:3, :3], t)
    assert np.allclose(value[:3, 3:], np.eye(3))
    assert np.allclose(value[3:, :3], 0)
    assert np.allclose(value[3:, 3:], t @ t)


def test_evaluate_at_scalar_matches_at():
    poly = MatrixPolynomial.scalar([1.0, 2.0, 3.0])
    assert np.allclose(poly.evaluate([[0.5]]), poly.at(0.5))


def test_rejects_non_finite_coefficients():
    with pytest.raises(NotFiniteError):
        MatrixPolynomial.scalar([1.0, np.inf])


def test_scaled():
    poly = MatrixPolynomial.scalar([2.0, 4.0]).scaled(0.5)
    assert np.allclose(poly.coeffs.reshape(-1), [1.0, 2.0])
