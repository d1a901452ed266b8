"""
Dense complex linear algebra primitives

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Every operator is carried as a finite complex two-dimensional numpy array.
Sparse scipy matrices are accepted by :func:`op_norm` only, for the large CAR
blocks.
"""

__all__ = [
    "as_operator", "as_vector", "op_norm", "spectral_radius", "hermitian_part", "numerical_radius",
    "psd_sqrt", "matpoly_eval", "circle_sup_norm", "induced_pnorm_bracket", "CircleNorm",
    "EmptyOperatorError", "NotSquareError", "NotFiniteError", "NotPSDError", "DimensionMismatchError",
]

import logging
import math
from collections import namedtuple

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.sparse
import scipy.sparse.linalg

LOG = logging.getLogger(__name__)

PSD_CLAMP = 1e-12
DENSE_NORM_LIMIT = 1024
RADIUS_GRID = 1024
ITERATIVE_NORM_TOL = 1e-10

CircleNorm = namedtuple("CircleNorm", ["value", "grid_value", "grid_size"])


class EmptyOperatorError(ValueError):
    """Raised when an operator has a zero dimension"""


class NotSquareError(ValueError):
    """Raised when a square operator is expected"""


class NotFiniteError(ValueError):
    """Raised when an operator holds NaN or infinite entries"""


class DimensionMismatchError(ValueError):
    """Raised when operator dimensions do not compose"""


class NotPSDError(ValueError):
    """Raised when a Hermitian matrix has an eigenvalue below -PSD_CLAMP"""
    def __init__(self, eigenvalue):
        super().__init__("not PSD: smallest eigenvalue {:.3e}".format(eigenvalue))
        self.eigenvalue = eigenvalue


def as_operator(a, square=False, name="operator"):
    """Coerce to a finite complex 2-D array, checking shape invariants"""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatchError("{} must be two-dimensional, got shape {}".format(name, arr.shape))
    if 0 in arr.shape:
        raise EmptyOperatorError("empty operator")
    if not np.all(np.isfinite(arr)):
        raise NotFiniteError("{} has non-finite entries".format(name))
    if square and arr.shape[0] != arr.shape[1]:
        raise NotSquareError("{} must be square, got {}x{}".format(name, *arr.shape))
    return arr


def as_vector(x, dim=None, name="vector"):
    """Coerce to a finite complex 1-D array of the given length"""
    vec = np.asarray(x, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(vec)):
        raise NotFiniteError("{} has non-finite entries".format(name))
    if dim is not None and vec.shape[0] != dim:
        raise DimensionMismatchError("{} has length {}, expected {}".format(name, vec.shape[0], dim))
    return vec


def _sparse_op_norm(a):
    if a.nnz == 0:
        return 0.0
    if min(a.shape) <= DENSE_NORM_LIMIT:
        return float(scipy.linalg.svdvals(a.toarray())[0])

    a = a.tocsr()
    a_h = a.conj().T.tocsr()
    gram = scipy.sparse.linalg.LinearOperator(
        (a.shape[1], a.shape[1]), matvec=lambda v: a_h @ (a @ v), dtype=complex)
    start = np.random.default_rng(0x5EED).standard_normal(a.shape[1]).astype(complex)
    try:
        top = scipy.sparse.linalg.eigsh(gram, k=1, which="LA", v0=start, tol=ITERATIVE_NORM_TOL ** 2,
                                        return_eigenvectors=False)
        return float(math.sqrt(max(top[0].real, 0.0)))
    except scipy.sparse.linalg.ArpackNoConvergence:
        LOG.warning("Lanczos norm did not converge on a %dx%d operator, using a dense SVD", *a.shape)
        return float(scipy.linalg.svdvals(a.toarray())[0])


def op_norm(a):
    """Operator norm (largest singular value)"""
    if scipy.sparse.issparse(a):
        if 0 in a.shape:
            raise EmptyOperatorError("empty operator")
        return _sparse_op_norm(a)
    a = as_operator(a)
    return float(scipy.linalg.svdvals(a)[0])


def spectral_radius(a):
    """Largest eigenvalue modulus"""
    a = as_operator(a, square=True)
    return float(np.max(np.abs(scipy.linalg.eigvals(a))))


def hermitian_part(a):
    """(A + A*)/2"""
    return (a + a.conj().T) / 2


def _local_maxima(values, count):
    """Indices of the largest circular local maxima of a sampled periodic function"""
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    peaks = np.flatnonzero((values >= left) & (values >= right))
    if peaks.size == 0:
        peaks = np.arange(values.size)
    return peaks[np.argsort(values[peaks])[::-1][:count]]


def _refine_periodic_max(func, thetas, values, count=4):
    """Bounded scalar refinement of a sampled periodic maximum"""
    step = 2 * math.pi / thetas.size
    best = float(values.max())
    for idx in _local_maxima(values, count):
        res = scipy.optimize.minimize_scalar(
            lambda t: -func(t), bounds=(thetas[idx] - step, thetas[idx] + step), method="bounded",
            options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def numerical_radius(a, grid=RADIUS_GRID):
    """
    Numerical radius w(A) = max_theta lambda_max(Herm(e^{i theta} A)), on a theta grid with local refinement
    """
    a = as_operator(a, square=True)
    if grid < RADIUS_GRID:
        raise ValueError("numerical radius grid must have at least {} points".format(RADIUS_GRID))
    if not np.any(a):
        return 0.0

    def support(theta):
        return scipy.linalg.eigvalsh(hermitian_part(np.exp(1j * theta) * a))[-1]

    thetas = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    values = np.array([support(t) for t in thetas])
    return max(0.0, _refine_periodic_max(support, thetas, values))


def psd_sqrt(g):
    """Unique PSD square root of a Hermitian matrix, small negative eigenvalues clamped to 0"""
    g = as_operator(g, square=True, name="Gram matrix")
    g = hermitian_part(g)
    off_diagonal = g - np.diag(np.diag(g))
    if not np.any(off_diagonal):
        diag = np.diag(g).real
        if diag.min() < -PSD_CLAMP:
            raise NotPSDError(diag.min())
        return np.diag(np.sqrt(np.clip(diag, 0.0, None))).astype(complex)

    eig, vec = scipy.linalg.eigh(g)
    if eig[0] < -PSD_CLAMP:
        raise NotPSDError(eig[0])
    if eig[0] < 0:
        LOG.debug("clamping eigenvalue %.3e to 0", eig[0])
    root = (vec * np.sqrt(np.clip(eig, 0.0, None))) @ vec.conj().T
    return hermitian_part(root)


def matpoly_eval(poly, a):
    """Evaluate a MatrixPolynomial at a square operator, as the block matrix [p_ij(A)]"""
    return poly.evaluate(a)


def circle_sup_norm(poly, grid_size=512, certificate=False):
    """
    sup over |z| = 1 of the largest singular value of P(z), sampled on a uniform grid and refined around the
    best grid points. The value is a lower bound on the true supremum.
    """
    if grid_size < 256:
        raise ValueError("circle grid must have at least 256 points")

    def top_singular(theta):
        return scipy.linalg.svdvals(poly.at(np.exp(1j * theta)))[0]

    thetas = np.linspace(0.0, 2 * math.pi, grid_size, endpoint=False)
    values = np.linalg.svd(poly.at_many(np.exp(1j * thetas)), compute_uv=False)[:, 0]
    grid_value = float(values.max())
    refined = _refine_periodic_max(top_singular, thetas, values)
    if certificate:
        return CircleNorm(refined, grid_value, grid_size)
    return refined


def _dual_map(y, p):
    """Gradient direction of the p-norm: |y|^{p-1} sign(y)"""
    mag = np.abs(y)
    phase = np.divide(y, mag, out=np.zeros_like(y), where=mag > 0)
    return mag ** (p - 1) * phase


def _pnorm(x, p):
    return float(np.linalg.norm(x, ord=p))


def induced_pnorm_bracket(a, p, samples=256, seed=0, polish=24):
    """
    Bracket the induced l_p -> l_p operator norm.

    The lower end maximizes |Ax|_p over seeded p-normalized samples, the best of which is polished by the
    Boyd power iteration; the upper end is the Riesz-Thorin bound |A|_1^{1/p} |A|_inf^{1-1/p}.
    """
    a = as_operator(a, square=True)
    if not p > 1:
        raise ValueError("p must be > 1, got {}".format(p))

    norm_1 = float(np.abs(a).sum(axis=0).max())
    norm_inf = float(np.abs(a).sum(axis=1).max())
    hi = norm_inf if math.isinf(p) else norm_1 ** (1.0 / p) * norm_inf ** (1.0 - 1.0 / p)

    rng = np.random.default_rng(seed)
    n = a.shape[0]
    cands = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    cands = np.vstack([np.eye(n, dtype=complex), cands])
    ratios = [_pnorm(a @ x, p) / _pnorm(x, p) for x in cands]
    best = int(np.argmax(ratios))
    lo = ratios[best]

    if not math.isinf(p):
        q = p / (p - 1)
        x = cands[best] / _pnorm(cands[best], p)
        for _ in range(polish):
            z = a.conj().T @ _dual_map(a @ x, p)
            if not np.any(z):
                break
            x = _dual_map(z, q)
            x = x / _pnorm(x, p)
            lo = max(lo, _pnorm(a @ x, p))

    return min(lo, hi), hi
