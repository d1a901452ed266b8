"""
Quadratic nearness

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import math

import numpy as np
import pytest

from libopsim.instance import gen_instance
from libopsim.linalg import DimensionMismatchError
from libopsim.nearness import (
    quadratic_nearness, factored_nearness, row_form_check, asymptotic_nearness, sandwich_check, cesaro_renorming,
    NotIsometricError,
)
from libopsim.oracles import direct_partial_sum_norm
from libopsim.sequences import BetaWeight


def test_operator_is_at_distance_zero_from_itself(complex_matrix):
    t = complex_matrix(4)
    report = quadratic_nearness(t, t, N_max=8)
    assert report.s == 0.0
    assert report.u == 0.0


@pytest.mark.parametrize("a", [0.5, 2.0])
def test_square_zero_against_zero(a):
    t = np.array([[0, a], [0, 0]], dtype=complex)
    report = quadratic_nearness(t, np.zeros((2, 2)), N_max=16)
    assert report.s == pytest.approx(a, rel=1e-12)
    assert report.s_partial[0] == 0.0
    assert report.tail_bound is not None and report.tail_bound <= 0.5 ** 16
    assert report.vanishes_beyond(2)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        quadratic_nearness(np.eye(2), np.eye(3))


@pytest.mark.parametrize("seed", range(20))
def test_nearness_invariants(seed):
    t1 = gen_instance("gaussian", 3, 0.8, seed)
    t2 = gen_instance("contraction", 3, 0.7, seed + 1000)
    report = quadratic_nearness(t1, t2, N_max=32)
    assert np.all(np.diff(report.s_partial) >= -1e-12 * max(1.0, report.s))
    assert report.s <= report.u + 1e-10
    oracle = direct_partial_sum_norm(t1, t2, N=32).value
    assert report.s ** 2 == pytest.approx(oracle, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_row_form_brackets_the_nearness(seed):
    t1 = gen_instance("gaussian", 3, 0.8, seed)
    t2 = gen_instance("gaussian", 3, 0.5, seed + 1000)
    square = quadratic_nearness(t1, t2, N_max=32).s ** 2
    row = row_form_check(t1, t2, N=32, samples=200, seed=seed)
    assert row <= square * (1 + 1e-10)
    assert row >= 0.9 * square


def test_dirichlet_weight_shrinks_the_nearness():
    t1 = gen_instance("contraction", 3, 0.95, 1)
    t2 = gen_instance("contraction", 3, 0.95, 2)
    plain = quadratic_nearness(t1, t2, N_max=32)
    weighted = quadratic_nearness(t1, t2, BetaWeight.dirichlet(), N_max=32)
    assert weighted.s <= plain.s + 1e-12
    oracle = direct_partial_sum_norm(t1, t2, BetaWeight.dirichlet(), N=32).value
    assert weighted.s ** 2 == pytest.approx(oracle, rel=1e-10)


def test_tail_bound_for_a_scalar():
    report = quadratic_nearness([[0.5]], [[0.0]], N_max=10)
    exact = math.sqrt(0.25 ** 11 / 0.75)
    assert report.tail_bound >= exact * (1 - 1e-12)
    assert report.tail_bound <= exact * 1.5


def test_no_tail_bound_without_power_stability():
    report = quadratic_nearness(np.eye(2), np.zeros((2, 2)), N_max=8)
    assert report.tail_bound is None
    assert report.s == pytest.approx(math.sqrt(8))


def test_factored_nearness_of_an_exact_factorization(rng):
    r = np.triu(rng.standard_normal((5, 5)), 1) * 0.3
    w = np.eye(5)[:, 1:4]
    t = w.T @ r @ w
    report = factored_nearness(t, w.T, r, w, N_max=12)
    assert report.s <= 1e-12


def test_factored_nearness_shapes():
    with pytest.raises(DimensionMismatchError):
        factored_nearness(np.eye(2), np.eye(2, 3), np.eye(3), np.eye(2, 3))


def test_asymptotic_envelope():
    res = asymptotic_nearness([[0.5]], [[0.25]], 8)
    assert len(res.norms) == 9
    assert res.norms[0] == 0.0
    assert res.envelope == pytest.approx(max(res.norms[7:]))


def test_sandwich_bounds():
    t = np.eye(3) + 0.01 * np.diag([1.0, -1.0, 0.5])
    res = sandwich_check(t, np.eye(3), 0.5, 3)
    assert res.premise_ok
    assert res.worst_lower >= 0
    assert res.worst_upper >= 0


def test_sandwich_premise_failure():
    res = sandwich_check(0.1 * np.eye(2), np.eye(2), 0.5, 2)
    assert not res.premise_ok
    assert res.worst_lower is None


def test_sandwich_needs_an_isometry():
    with pytest.raises(NotIsometricError):
        sandwich_check(np.eye(2), 2 * np.eye(2), 0.5, 2)


def test_cesaro_renorming_of_a_diagonal_contraction():
    res = cesaro_renorming(np.diag([0.5, 0.3]), 16)
    assert res.norm == pytest.approx(0.5)
    assert res.sim_const >= 1.0
