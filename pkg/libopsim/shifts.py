"""
Truncated weighted shifts, semi-invariant compressions and finite unitary dilations

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

__all__ = [
    "TruncatedShift", "truncated_weighted_shift", "dirichlet_shift", "two_isometry_defect", "sarason_check",
    "schaeffer_dilation", "NotInvariantError", "NotContractionError",
]

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from libopsim.linalg import as_operator, op_norm, psd_sqrt, DimensionMismatchError
from libopsim.sequences import BetaWeight, shift_weights

LOG = logging.getLogger(__name__)

INVARIANCE_TOL = 1e-10
CONTRACTION_TOL = 1e-12


class NotInvariantError(ValueError):
    """Raised when a subspace handed to the Sarason check is not invariant"""
    def __init__(self, which, defect):
        super().__init__("not invariant: {} has defect {:.3e}".format(which, defect))
        self.which = which
        self.defect = defect


class NotContractionError(ValueError):
    """Raised when a dilation source has norm above 1"""


@dataclass
class TruncatedShift:
    """
    Weighted shift e_{n,j} -> w_n e_{n+1,j} compressed to the first N fibers; the last fiber maps to 0.
    Fiber dimension is the multiplicity.
    """
    N: int
    multiplicity: int
    weights: list
    matrix: np.ndarray = field(repr=False)

    def sidecar(self):
        """Metadata emitted next to the matrix"""
        return {"weights": [float(w) for w in self.weights], "multiplicity": self.multiplicity}


def truncated_weighted_shift(beta=None, N=2, multiplicity=1):
    """S_{w(beta)} on span(e_0 .. e_{N-1}) tensor C^multiplicity"""
    if N < 2:
        raise ValueError("truncation N must be >= 2")
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    beta = beta or BetaWeight()
    weights = shift_weights(beta, N - 1)
    base = np.diag(np.asarray(weights, dtype=complex), -1)
    matrix = base if multiplicity == 1 else np.kron(base, np.eye(multiplicity))
    return TruncatedShift(N, multiplicity, weights, matrix)


def dirichlet_shift(N, multiplicity=1):
    """Weighted shift with w_n = sqrt((n+2)/(n+1))"""
    return truncated_weighted_shift(BetaWeight.dirichlet(), N, multiplicity)


def two_isometry_defect(shift):
    """
    Norm of I - 2D*D + D*^2 D^2 compressed to the interior fibers e_0 .. e_{N-3}, where truncation agrees
    with the infinite shift
    """
    if shift.N < 4:
        raise ValueError("two-isometry defect needs N >= 4")
    d = shift.matrix
    d_h = d.conj().T
    d2 = d @ d
    defect = np.eye(d.shape[0]) - 2 * d_h @ d + d2.conj().T @ d2
    interior = (shift.N - 2) * shift.multiplicity
    return op_norm(defect[:interior, :interior])


def _orthonormal(basis, dim, name):
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim == 1:
        basis = basis.reshape(-1, 1)
    if basis.shape[0] != dim:
        raise DimensionMismatchError("{} has {} rows, expected {}".format(name, basis.shape[0], dim))
    if basis.shape[1] == 0:
        return basis
    return scipy.linalg.orth(basis)


def _invariance_defect(r, q):
    if q.shape[1] == 0:
        return 0.0
    image = r @ q
    return float(np.linalg.norm(image - q @ (q.conj().T @ image), 2))


def sarason_check(r, h1_basis, h2_basis, n_max):
    """
    Compress R to H = H1 (-) H2 for R-invariant H2 <= H1 and return max_{n <= n_max} |T^n - P_H R^n|_H|,
    T = P_H R|_H. Semi-invariance makes the compression multiplicative, so the defect is roundoff.
    """
    r = as_operator(r, square=True)
    dim = r.shape[0]
    q1 = _orthonormal(h1_basis, dim, "H1 basis")
    q2 = _orthonormal(h2_basis, dim, "H2 basis")

    for which, q in (("H1", q1), ("H2", q2)):
        defect = _invariance_defect(r, q)
        if defect > INVARIANCE_TOL:
            raise NotInvariantError(which, defect)
    if q2.shape[1]:
        outside = float(np.linalg.norm(q2 - q1 @ (q1.conj().T @ q2), 2))
        if outside > INVARIANCE_TOL:
            raise NotInvariantError("H2 inside H1", outside)

    proj = q1 @ q1.conj().T - q2 @ q2.conj().T
    eig, vec = scipy.linalg.eigh((proj + proj.conj().T) / 2)
    w = vec[:, eig > 0.5]
    if w.shape[1] == 0:
        return 0.0

    t = w.conj().T @ r @ w
    t_power = np.eye(w.shape[1], dtype=complex)
    r_power = np.eye(dim, dtype=complex)
    worst = 0.0
    for _ in range(n_max):
        t_power = t_power @ t
        r_power = r_power @ r
        worst = max(worst, op_norm(t_power - w.conj().T @ r_power @ w))
    return worst


def schaeffer_dilation(t, N):
    """
    Finite Schaffer (Egervary) unitary dilation with 2N+1 blocks: U has T and the defect operators
    D_T = (I - T*T)^{1/2}, D_{T*} = (I - TT*)^{1/2} in its first two block rows and a cyclic block shift
    below, so that T^n = E* U^n E for 1 <= n <= 2N where E embeds H as the first block.
    """
    t = as_operator(t, square=True)
    if N < 1:
        raise ValueError("dilation order N must be >= 1")
    norm = op_norm(t)
    if norm > 1 + CONTRACTION_TOL:
        raise NotContractionError("not a contraction: |T| = {:.12g}".format(norm))

    n = t.shape[0]
    eye = np.eye(n)
    t_h = t.conj().T
    d_t = psd_sqrt(eye - t_h @ t)
    d_t_star = psd_sqrt(eye - t @ t_h)

    blocks = 2 * N + 1
    u = np.zeros((blocks * n, blocks * n), dtype=complex)
    last = (blocks - 1) * n
    u[:n, :n] = t
    u[:n, last:] = d_t_star
    u[n:2 * n, :n] = d_t
    u[n:2 * n, last:] = -t_h
    for b in range(2, blocks):
        u[b * n:(b + 1) * n, (b - 1) * n:b * n] = eye

    embed = np.zeros((blocks * n, n), dtype=complex)
    embed[:n, :n] = eye
    LOG.debug("Schaffer dilation of a %dx%d contraction into %d blocks", n, n, blocks)
    return u, embed
