"""
Shared fixtures

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import os

import numpy as np
import pytest

CONFIGS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def complex_matrix(rng):
    """Factory of complex Gaussian matrices drawn from the test generator"""
    def make(rows, cols=None):
        cols = rows if cols is None else cols
        return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return make


@pytest.fixture
def jordan():
    """[[0, 2], [0, 0]]: numerical radius 1, norm 2"""
    return np.array([[0, 2], [0, 0]], dtype=complex)


@pytest.fixture
def configs_dir():
    return CONFIGS
