"""
CAR generators and CAR-valued Foguel-Hankel operators

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Generators are built by the Jordan-Wigner transformation as sparse matrices; the Hankel and Foguel-Hankel
blocks stay sparse (each generator has 2^{m-1} non-zeros) and their norms go through linalg.op_norm.
"""

__all__ = [
    "CarSystem", "FoguelHankel", "car_generators", "lambda_of", "hankel", "shifted_hankel", "foguel_hankel",
    "power_diff_norm", "power_diff_block", "car_defects", "hankel_row_bound", "InsufficientModesError", "MAX_MODES",
]

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from libopsim.linalg import op_norm, as_vector, DimensionMismatchError
from libopsim.sequences import AlphaSeq

LOG = logging.getLogger(__name__)

MAX_MODES = 12
LOWERING = scipy.sparse.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))
PARITY = scipy.sparse.csr_matrix(np.diag([1, -1]).astype(complex))
EYE2 = scipy.sparse.identity(2, dtype=complex, format="csr")


class InsufficientModesError(ValueError):
    """Raised when a Hankel truncation needs more CAR generators than available"""


def _nested_kron(factors):
    out = factors[0]
    for factor in factors[1:]:
        out = scipy.sparse.kron(out, factor, format="csr")
    return out


@dataclass
class CarSystem:
    """Jordan-Wigner CAR generators C_0 .. C_{m-1} on (C^2)^{tensor m}"""
    m: int
    generators: list = field(repr=False)

    @property
    def dim(self):
        return 2 ** self.m

    def dense(self, n):
        return self.generators[n].toarray()


def car_generators(m):
    """C_n = Z^{tensor n} (x) A (x) I^{tensor (m-n-1)}, A the 2x2 lowering matrix and Z = diag(1, -1)"""
    if not 1 <= m <= MAX_MODES:
        raise ValueError("number of modes must lie in [1, {}], got {}".format(MAX_MODES, m))
    generators = []
    for n in range(m):
        factors = [PARITY] * n + [LOWERING] + [EYE2] * (m - n - 1)
        generators.append(_nested_kron(factors))
    LOG.debug("built %d CAR generators of dimension %d", m, 2 ** m)
    return CarSystem(m, generators)


def car_defects(system):
    """Largest anticommutator defects (|C_i C_j + C_j C_i|, |C_i C_j* + C_j* C_i - delta_ij I|) over all pairs"""
    eye = scipy.sparse.identity(system.dim, dtype=complex, format="csr")
    worst_anti = 0.0
    worst_mixed = 0.0
    for i, c_i in enumerate(system.generators):
        for j, c_j in enumerate(system.generators):
            anti = c_i @ c_j + c_j @ c_i
            mixed = c_i @ c_j.conj().T + c_j.conj().T @ c_i
            if i == j:
                mixed = mixed - eye
            worst_anti = max(worst_anti, abs(anti).max() if anti.nnz else 0.0)
            worst_mixed = max(worst_mixed, abs(mixed).max() if mixed.nnz else 0.0)
    return worst_anti, worst_mixed


def lambda_of(system, u):
    """Lambda(u) = sum_n u_n C_n; an isometry of l^2 onto its range"""
    u = as_vector(u, name="u")
    if u.size > system.m:
        raise DimensionMismatchError("u has {} coordinates but only {} modes".format(u.size, system.m))
    out = scipy.sparse.csr_matrix((system.dim, system.dim), dtype=complex)
    for coeff, gen in zip(u, system.generators):
        if coeff != 0:
            out = out + coeff * gen
    return out


def _coefficients(alpha, count):
    if isinstance(alpha, AlphaSeq):
        return alpha.values(count)
    values = np.zeros(count)
    table = np.asarray(alpha, dtype=float).reshape(-1)
    values[:min(count, table.size)] = table[:count]
    return values


def shifted_hankel(alpha, n, N, m, system=None):
    """[alpha_{i+j+n} C_{i+j+n}]_{0 <= i, j < N}, sparse of size N 2^m"""
    if N < 1:
        raise ValueError("Hankel truncation N must be >= 1")
    needed = 2 * N - 1 + n
    if m < needed:
        raise InsufficientModesError("insufficient modes: need m >= {}, got {}".format(needed, m))
    system = system or car_generators(m)
    coeffs = _coefficients(alpha, needed)
    zero = scipy.sparse.csr_matrix((system.dim, system.dim), dtype=complex)
    blocks = [[coeffs[i + j + n] * system.generators[i + j + n] if coeffs[i + j + n] else zero
               for j in range(N)] for i in range(N)]
    return scipy.sparse.bmat(blocks, format="csr")


def hankel(alpha, N, m, system=None):
    """Y_alpha = [alpha_{i+j} C_{i+j}]_{0 <= i, j < N}"""
    return shifted_hankel(alpha, 0, N, m, system)


@dataclass
class FoguelHankel:
    """R(Y) = [[S*, Y], [0, S]] with S the N-truncated shift of multiplicity 2^m, and R(0) alongside"""
    alpha: object
    N: int
    m: int
    Y: object = field(repr=False)
    R: object = field(repr=False)
    R0: object = field(repr=False)
    S: object = field(repr=False)
    system: CarSystem = field(repr=False)

    @property
    def dim(self):
        return self.R.shape[0]


def foguel_hankel(alpha, N, m):
    """Assemble the truncated Foguel-Hankel operator R(Y_alpha) and R(0)"""
    system = car_generators(m)
    y = hankel(alpha, N, m, system)
    base = scipy.sparse.csr_matrix(np.diag(np.ones(N - 1, dtype=complex), -1))
    s = scipy.sparse.kron(base, scipy.sparse.identity(system.dim, dtype=complex), format="csr")
    s_h = s.conj().T.tocsr()
    r = scipy.sparse.bmat([[s_h, y], [None, s]], format="csr")
    r0 = scipy.sparse.bmat([[s_h, None], [None, s]], format="csr")
    return FoguelHankel(alpha, N, m, y, r, r0, s, system)


def power_diff_block(fh, n):
    """Upper-right block of R(Y)^n - R(0)^n, i.e. sum_{k<n} S*^k Y S^{n-1-k}"""
    if n < 1:
        raise ValueError("power n must be >= 1")
    s = fh.S
    s_h = s.conj().T.tocsr()
    left = [scipy.sparse.identity(s.shape[0], dtype=complex, format="csr")]
    right = [scipy.sparse.identity(s.shape[0], dtype=complex, format="csr")]
    for _ in range(n - 1):
        left.append(left[-1] @ s_h)
        right.append(right[-1] @ s)
    out = scipy.sparse.csr_matrix(s.shape, dtype=complex)
    for k in range(n):
        out = out + left[k] @ fh.Y @ right[n - 1 - k]
    return out


def _power_difference(fh, n):
    r_power = fh.R
    r0_power = fh.R0
    for _ in range(n - 1):
        r_power = r_power @ fh.R
        r0_power = r0_power @ fh.R0
    return (r_power - r0_power).tocsr()


def power_diff_norm(fh, n, method="identity"):
    """
    |R(Y)^n - R(0)^n|, through the upper-triangular block power identity ("identity") or by direct
    subtraction of the matrix powers ("subtraction", the oracle path)
    """
    if method == "identity":
        return op_norm(power_diff_block(fh, n))
    if method == "subtraction":
        if n < 1:
            raise ValueError("power n must be >= 1")
        return op_norm(_power_difference(fh, n))
    raise ValueError("unknown method '{}'".format(method))


def hankel_row_bound(alpha, n, N):
    """
    [sum_{i<N} tail(i+n)]^{1/2}, an upper bound on |shifted_hankel(alpha, n, N, .)|: block row i is a row of
    CAR generators with coefficients alpha_{i+n} .. alpha_{i+n+N-1}, of norm at most tail(i+n)^{1/2}
    """
    tails = alpha.tails(n + N - 1)
    return math.sqrt(math.fsum(tails[n:n + N]))
