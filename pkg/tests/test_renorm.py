"""
Decomposition renorming

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import dataclasses
import time

import numpy as np
import pytest

from libopsim.dominance import PolyFamily, paulsen_ratio
from libopsim.instance import gen_instance
from libopsim.linalg import op_norm, DimensionMismatchError
from libopsim.oracles import kkt_min
from libopsim.polynomial import MatrixPolynomial
from libopsim.renorm import (
    RenormConfig, build_gram, gamma_opt, equivalence_check, dominance_step_check, banach_norm_value,
    matrix_contraction_check, decay_index, DegenerateWeightsError, ZeroOperatorError, GAMMA_EXACT,
    EXACT_GAMMA_FACTOR,
)
from libopsim.sequences import BetaWeight
from libopsim.shifts import NotContractionError, truncated_weighted_shift


def _stacked_powers(t, d):
    return np.hstack([np.linalg.matrix_power(t, k) for k in range(d + 1)])


def _gram_value(cert, x):
    return float((x.conj() @ cert.G @ x).real)


def test_scalar_rota_gram():
    cert = build_gram(RenormConfig([[0.5]], d=3))
    assert cert.G[0, 0].real == pytest.approx(0.75 / (1 - 0.25 ** 4), rel=1e-12)
    assert cert.mode == "rota"
    assert cert.gamma is None


@pytest.mark.parametrize("seed", range(5))
def test_rota_gram_matches_kkt_oracle(seed, complex_matrix):
    t = gen_instance("gaussian", 3, 0.8, seed)
    beta = BetaWeight.dirichlet()
    d = 6
    cert = build_gram(RenormConfig(t, beta=beta, d=d))
    q = np.diag(np.repeat(beta.values(d + 1) ** 2, 3))
    x = complex_matrix(3, 1).reshape(-1)
    oracle = kkt_min(q, _stacked_powers(t, d), x).value
    assert _gram_value(cert, x) == pytest.approx(oracle, rel=1e-9)


def test_full_gram_matches_kkt_oracle(complex_matrix):
    t = gen_instance("gaussian", 3, 0.8, 3)
    c = truncated_weighted_shift(None, 5).matrix
    v2 = complex_matrix(5, 3)
    v1 = complex_matrix(3, 5)
    d, gamma = 4, 2.0
    cert = build_gram(RenormConfig(t, C=c, V2=v2, V1=v1, gamma=gamma, d=d))
    b = gamma * np.hstack([np.linalg.matrix_power(c, k) @ v2 for k in range(d + 1)])
    q = np.eye(3 * (d + 1)) + b.conj().T @ b
    x = complex_matrix(3, 1).reshape(-1)
    oracle = kkt_min(q, _stacked_powers(t, d), x).value
    assert _gram_value(cert, x) == pytest.approx(oracle, rel=1e-9)
    assert cert.gamma == gamma


@pytest.mark.parametrize("seed", range(20))
def test_rota_renorming(seed):
    n = 1 + seed % 8
    t = gen_instance("gaussian", n, 0.9, seed)
    d = 48
    cert = build_gram(RenormConfig(t, d=d))
    power_norm = op_norm(np.linalg.matrix_power(t, d + 1))
    # the renormed operator is a contraction whenever |T^{d+1}| <= 1
    assert cert.t1_norm <= max(1.0, power_norm) + 1e-8
    assert equivalence_check(cert).ok
    assert cert.sim_const <= cert.sim_bound * (1 + 1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_rota_renorming_at_full_count(seed):
    n = 1 + seed % 8
    t = gen_instance("gaussian", n, 0.9, seed)
    cert = build_gram(RenormConfig(t, d=48))
    power_norm = op_norm(np.linalg.matrix_power(t, 49))
    assert cert.t1_norm <= max(1.0, power_norm) + 1e-8
    assert equivalence_check(cert).ok
    # von Neumann on T1 / |T1|: degree 3 polynomials grow by at most |T1|^3
    ratio = paulsen_ratio(cert.T1, PolyFamily(count=16, seed=seed), 2).max_ratio
    assert ratio <= max(1.0, cert.t1_norm) ** 3 * (1 + 1e-6)
    if power_norm <= 1:
        assert ratio <= 1 + 1e-6


@pytest.mark.slow
def test_rota_gram_runtime_at_dimension_64():
    t = gen_instance("gaussian", 64, 0.9, 1)
    start = time.perf_counter()
    cert = build_gram(RenormConfig(t, d=32))
    assert time.perf_counter() - start <= 30.0
    assert cert.G.shape == (64, 64)
    assert np.isfinite(cert.t1_norm)


def test_rota_renorming_of_a_nilpotent_operator():
    cert = build_gram(RenormConfig([[0, 2], [0, 0]], d=2))
    assert cert.t1_norm <= 1 + 1e-8
    assert equivalence_check(cert).witness is None


@pytest.mark.parametrize("seed", range(10))
def test_full_mode_bracket(seed, complex_matrix):
    rng = np.random.default_rng(seed)
    n, k = 3, 6
    t = gen_instance("gaussian", n, 0.9, seed)
    c = truncated_weighted_shift(None, k).matrix
    v2 = rng.standard_normal((k, n))
    v1 = rng.standard_normal((n, k))
    cert = build_gram(RenormConfig(t, C=c, V2=v2, V1=v1, d=8))
    assert cert.s_d > 0
    eq = equivalence_check(cert)
    assert eq.ok
    assert eq.lower_margin >= -1e-8
    assert eq.upper_margin >= -1e-8
    assert cert.sim_const <= cert.sim_bound * (1 + 1e-6)
    # with the optimal gamma the bracket ratio is the similarity bound
    assert cert.bound_hi / cert.bound_lo == pytest.approx(cert.sim_bound, rel=1e-12)


def test_exact_factorization_uses_a_large_gamma():
    t = gen_instance("contraction", 3, 0.8, 2)
    cert = build_gram(RenormConfig(t, C=t, d=4))
    assert cert.s_d == 0.0
    assert cert.gamma == pytest.approx(EXACT_GAMMA_FACTOR)
    assert equivalence_check(cert).ok


def test_gamma_opt():
    assert gamma_opt(1.0, 1.0, 1.0, 0.0) == GAMMA_EXACT
    assert gamma_opt(1.0, 1.0, 1.0, 4.0) == pytest.approx(0.5)
    assert gamma_opt(np.eye(2), 2 * np.eye(2), 2.0, 1.0) == pytest.approx(1.0)
    with pytest.raises(ZeroOperatorError):
        gamma_opt(1.0, 0.0, 1.0, 1.0)
    with pytest.raises(ZeroOperatorError):
        gamma_opt(0.0, 1.0, 1.0, 1.0)


def test_degenerate_weights():
    beta = BetaWeight("table", table=[1.0, 1e-9, 1.0, 1.0])
    with pytest.raises(DegenerateWeightsError):
        build_gram(RenormConfig(np.eye(2) * 0.5, beta=beta, d=3))


def test_config_validation():
    with pytest.raises(ValueError):
        RenormConfig(np.eye(2), d=-1)
    with pytest.raises(ValueError):
        RenormConfig(np.eye(2), gamma=-1.0)
    with pytest.raises(ValueError):
        RenormConfig(np.eye(2), p=1)
    with pytest.raises(DimensionMismatchError):
        RenormConfig(np.eye(2), C=np.eye(3), V2=np.eye(2))
    with pytest.raises(ValueError):
        build_gram(RenormConfig(np.eye(2), p=3))


def test_default_intertwiners_embed():
    cfg = RenormConfig(np.eye(2) * 0.5, C=np.zeros((4, 4)))
    assert cfg.V2.shape == (4, 2)
    assert cfg.V1.shape == (2, 4)
    assert not cfg.rota


@pytest.mark.parametrize("seed", range(8))
def test_dominance_step_rota(seed, complex_matrix):
    rng = np.random.default_rng(seed)
    t = gen_instance("gaussian", 3, 0.8, seed)
    cfg = RenormConfig(t, d=4)
    coeffs = rng.standard_normal((2, 2, 3)) + 1j * rng.standard_normal((2, 2, 3))
    poly = MatrixPolynomial(coeffs)
    check = dominance_step_check(cfg, poly, complex_matrix(6, 1).reshape(-1), poly.degree)
    assert check.ok
    assert check.lhs <= check.rhs * (1 + 1e-8)


def test_dominance_step_full_mode(complex_matrix):
    t = gen_instance("gaussian", 3, 0.8, 5)
    c = truncated_weighted_shift(None, 5).matrix
    cfg = RenormConfig(t, C=c, V2=complex_matrix(5, 3), V1=complex_matrix(3, 5), d=4)
    poly = MatrixPolynomial.scalar([0.5, -1.0, 0.25])
    check = dominance_step_check(cfg, poly, complex_matrix(3, 1).reshape(-1), 2)
    assert check.ok


def test_dominance_step_degree_guard():
    cfg = RenormConfig(np.eye(2) * 0.5, d=2)
    with pytest.raises(ValueError):
        dominance_step_check(cfg, MatrixPolynomial.monomial(3), np.ones(2), 2)


@pytest.mark.parametrize("seed", range(3))
def test_banach_norm_at_two_is_the_gram_norm(seed, complex_matrix):
    t = gen_instance("gaussian", 3, 0.7, seed)
    x = complex_matrix(3, 1).reshape(-1)
    cert = build_gram(RenormConfig(t, d=4))
    value = banach_norm_value(t, x, 2, d=4)
    assert value == pytest.approx(np.sqrt(_gram_value(cert, x)), rel=1e-6)


def test_banach_norm_below_trivial_decomposition(complex_matrix):
    t = gen_instance("gaussian", 3, 0.7, 9)
    x = complex_matrix(3, 1).reshape(-1)
    beta = BetaWeight("const", 1.5)
    value = banach_norm_value(t, x, 3, beta, d=4)
    assert value <= 1.5 * np.linalg.norm(x) * (1 + 1e-6)
    assert value > 0


def test_banach_norm_without_decomposition():
    x = np.array([3.0, 4.0])
    assert banach_norm_value(np.eye(2), x, 3, d=0) == pytest.approx(5.0)


@pytest.mark.parametrize("seed", range(5))
def test_matrix_contraction_check(seed, complex_matrix):
    b = complex_matrix(4)
    gram = b @ b.conj().T
    a = complex_matrix(3)
    a = a / op_norm(a)
    assert matrix_contraction_check(gram, a, complex_matrix(3, 4)).ok


def test_matrix_contraction_check_needs_a_contraction():
    with pytest.raises(NotContractionError):
        matrix_contraction_check(np.eye(2), 2 * np.eye(2), np.ones((2, 2)))


def test_decay_index():
    assert decay_index([[0, 1], [0, 0]]) == 2
    assert decay_index(np.eye(2), k_max=10) is None
    assert decay_index([[0.5]], tol=0.1) == 4


def test_level_two_step_uses_fixed_gamma(complex_matrix):
    t = gen_instance("gaussian", 2, 0.8, 1)
    cfg = RenormConfig(t, C=truncated_weighted_shift(None, 4).matrix, V2=complex_matrix(4, 2),
                       V1=complex_matrix(2, 4), d=3)
    cert = build_gram(cfg)
    wider = build_gram(dataclasses.replace(cfg, d=5, gamma=cert.gamma))
    assert wider.gamma == cert.gamma
