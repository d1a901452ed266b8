"""
Polynomial dominance estimates

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

All ratios here are sampled over a finite family of matrix polynomials, hence lower bounds on the
dominance (or polynomial-boundedness) constants.
"""

__all__ = [
    "PolyFamily", "dominance_ratio", "paulsen_ratio", "zd_pipeline_check", "DominanceResult", "PaulsenResult",
    "FamilyAnnihilatedError", "FactorizationError",
]

import logging
from collections import namedtuple

import numpy as np
from numpy.polynomial import chebyshev

from libopsim.linalg import as_operator, op_norm, circle_sup_norm, matpoly_eval, DimensionMismatchError
from libopsim.nearness import factored_nearness
from libopsim.polynomial import MatrixPolynomial

LOG = logging.getLogger(__name__)

DENOMINATOR_FLOOR = 1e-13
FACTORIZATION_TOL = 1e-8

DominanceResult = namedtuple("DominanceResult", ["max_ratio", "witness", "skipped", "ratios"])
PaulsenResult = namedtuple("PaulsenResult", ["max_ratio", "witness", "ratios"])


class FamilyAnnihilatedError(ValueError):
    """Raised when every sampled polynomial is annihilated by the dominating operator"""


class FactorizationError(ValueError):
    """Raised when T^k = V1 C^k V2 fails beyond the announced index"""
    def __init__(self, k, defect):
        super().__init__("factorization fails at k = {}: defect {:.3e}".format(k, defect))
        self.k = k
        self.defect = defect


class PolyFamily:
    """
    Seeded family of matrix polynomials normalized to circle sup norm 1.

    Kinds: random_coeff (complex Gaussian coefficients), chebyshev_like (Chebyshev series with decaying
    matrix coefficients), zd_vanishing (coefficients below z^d vanish) and monomial (z^k times I).
    At level n > 1 the diagonal embeddings of the level-1 family are included.
    """
    KINDS = ("random_coeff", "chebyshev_like", "zd_vanishing", "monomial")

    def __init__(self, kind="random_coeff", degree_max=3, d=0, count=32, seed=0):
        if kind not in self.KINDS:
            raise PolyFamily.KindError("unknown family '{}', expected one of {}".format(kind, self.KINDS))
        if degree_max < 1:
            raise ValueError("degree_max must be >= 1")
        if kind == "zd_vanishing" and not 0 <= d <= degree_max:
            raise ValueError("vanishing order d must lie in [0, degree_max]")
        self.kind = kind
        self.degree_max = degree_max
        self.d = d
        self.count = count
        self.seed = seed

    def _coefficients(self, rng, index, level):
        if self.kind == "monomial":
            return MatrixPolynomial.monomial(index % self.degree_max + 1, level).coeffs

        degree = int(rng.integers(max(self.d, 1), self.degree_max + 1))
        shape = (level, level, degree + 1)
        gaussian = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if self.kind == "random_coeff":
            return gaussian
        if self.kind == "zd_vanishing":
            gaussian[:, :, :self.d] = 0
            return gaussian

        coeffs = np.zeros(shape, dtype=complex)
        for k in range(degree + 1):
            basis = chebyshev.cheb2poly(np.eye(degree + 1)[k])
            coeffs += np.einsum("ij,k->ijk", gaussian[:, :, k] / (k + 1), np.pad(basis, (0, degree + 1 - basis.size)))
        return coeffs

    def sample(self, level=1):
        """`count` polynomials at matrix level `level`, deterministic in (seed, level, index)"""
        if level < 1:
            raise ValueError("level must be >= 1")
        family = []
        for index in range(self.count):
            rng = np.random.default_rng([self.seed, level, index])
            poly = MatrixPolynomial(self._coefficients(rng, index, level))
            size = circle_sup_norm(poly)
            if size == 0:
                continue
            family.append(poly.scaled(1.0 / size))
        if level > 1:
            family.extend(MatrixPolynomial.diagonal(p, level) for p in self.sample(1))
        return family

    def __repr__(self):
        return "PolyFamily(kind={}, degree_max={}, d={}, count={}, seed={})".format(
            self.kind, self.degree_max, self.d, self.count, self.seed)

    class KindError(ValueError):
        """Raised when a family kind is unknown"""


def dominance_ratio(T1, T2, fam, level=1):
    """max over the family of |P(T1)| / |P(T2)|, skipping (and counting) denominators below 1e-13"""
    t1 = as_operator(T1, square=True, name="T1")
    t2 = as_operator(T2, square=True, name="T2")
    best, witness, skipped, ratios = 0.0, None, 0, []
    for poly in fam.sample(level):
        denominator = op_norm(matpoly_eval(poly, t2))
        if denominator < DENOMINATOR_FLOOR:
            skipped += 1
            ratios.append(None)
            continue
        ratio = op_norm(matpoly_eval(poly, t1)) / denominator
        ratios.append(ratio)
        if ratio > best:
            best, witness = ratio, poly
    if witness is None:
        raise FamilyAnnihilatedError("T2 annihilates family")
    LOG.debug("dominance ratio %.6g at level %d (%d skipped)", best, level, skipped)
    return DominanceResult(best, witness, skipped, ratios)


def paulsen_ratio(T, fam, level=1):
    """max over the family of |P(T)| / sup_{|z|=1} |P(z)|"""
    t = as_operator(T, square=True, name="T")
    best, witness, ratios = 0.0, None, []
    for poly in fam.sample(level):
        ratio = op_norm(matpoly_eval(poly, t)) / circle_sup_norm(poly)
        ratios.append(ratio)
        if ratio > best:
            best, witness = ratio, poly
    return PaulsenResult(best, witness, ratios)


def zd_pipeline_check(T, V1, C, V2, d, N_max, beta=None):
    """Verify T^k = V1 C^k V2 for d <= k <= N_max, then return the factored nearness"""
    t = as_operator(T, square=True, name="T")
    c = as_operator(C, square=True, name="C")
    v1 = as_operator(V1, name="V1")
    v2 = as_operator(V2, name="V2")
    if v1.shape != (t.shape[0], c.shape[0]) or v2.shape != (c.shape[0], t.shape[0]):
        raise DimensionMismatchError("V1, C, V2 do not compose with T")

    t_power = np.linalg.matrix_power(t, d)
    c_power = np.linalg.matrix_power(c, d)
    for k in range(d, N_max + 1):
        defect = op_norm(t_power - v1 @ c_power @ v2)
        if defect > FACTORIZATION_TOL:
            raise FactorizationError(k, defect)
        t_power = t_power @ t
        c_power = c_power @ c
    return factored_nearness(t, v1, c, v2, beta, N_max)
