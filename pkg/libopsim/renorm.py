"""
Renorming by decompositions

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

For x = sum_{k <= d} T^k x_k the norm

    |x|^2 = min  gamma^2 |sum_k C^k V2 x_k|^2 + sum_k beta(k)^2 |x_k|^2

is a constrained least-squares problem with the closed form |x|^2 = x* G x, G = (A Q^-1 A*)^-1, where
A = [I, T, .., T^d] and Q = B*B + D*D collects the objective. In Rota mode (no C) the first term is dropped.
The operator T1 = G^{1/2} T G^{-1/2} is then similar to T with constant |G^{1/2}| |G^{-1/2}|.
"""

__all__ = [
    "RenormConfig", "GramCertificate", "build_gram", "gamma_opt", "equivalence_check", "dominance_step_check",
    "banach_norm_value", "matrix_contraction_check", "decay_index", "Equivalence", "StepCheck", "HilbertCheck",
    "DegenerateWeightsError", "ZeroOperatorError", "NonConvergenceError", "GAMMA_EXACT",
]

import dataclasses
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from libopsim.linalg import as_operator, as_vector, op_norm, psd_sqrt, matpoly_eval, DimensionMismatchError
from libopsim.nearness import factored_nearness
from libopsim.sequences import BetaWeight
from libopsim.shifts import truncated_weighted_shift, NotContractionError

LOG = logging.getLogger(__name__)

# gamma_opt result when T^n = V1 C^n V2 exactly and gamma may grow without bound
GAMMA_EXACT = "exact"
EXACT_GAMMA_FACTOR = 100.0
CONDITION_LIMIT = 1e14
BRACKET_TOL = 1e-8
STEP_TOL = 1e-8
SOLVER_TOL = 1e-8
SOLVER_MAXITER = 100000

Equivalence = namedtuple("Equivalence", ["lower_margin", "upper_margin", "ok", "witness"])
StepCheck = namedtuple("StepCheck", ["lhs", "rhs", "ok"])
HilbertCheck = namedtuple("HilbertCheck", ["lhs", "rhs", "ok"])


class DegenerateWeightsError(ValueError):
    """Raised when the objective matrix of the decomposition problem is numerically singular"""


class ZeroOperatorError(ValueError):
    """Raised when an intertwining operator is the null operator"""


class NonConvergenceError(ValueError):
    """Raised when the convex decomposition solver stops before its tolerance; .best is an upper bound"""
    def __init__(self, best, iterations):
        super().__init__("decomposition solver did not converge in {} iterations (best {:.12g})".format(
            iterations, best))
        self.best = best
        self.iterations = iterations


@dataclass
class RenormConfig:
    """
    Input of the decomposition norm. C = None selects Rota mode. V1 and V2 default to the identity,
    which requires C to act on the same space as T.
    """
    T: np.ndarray = field(repr=False)
    C: object = field(default=None, repr=False)
    V2: object = field(default=None, repr=False)
    V1: object = field(default=None, repr=False)
    beta: BetaWeight = None
    gamma: object = "auto"
    d: int = 8
    p: float = 2

    def __post_init__(self):
        self.T = as_operator(self.T, square=True, name="T")
        self.beta = self.beta or BetaWeight()
        if self.d < 0:
            raise ValueError("params.d must be >= 0, got {}".format(self.d))
        if not self.p > 1:
            raise ValueError("params.p must be > 1, got {}".format(self.p))
        if self.gamma != "auto" and not (isinstance(self.gamma, (int, float)) and self.gamma > 0):
            raise ValueError("params.gamma must be 'auto' or a positive number, got {!r}".format(self.gamma))
        if self.C is None:
            return

        n = self.T.shape[0]
        self.C = as_operator(self.C, square=True, name="C")
        k = self.C.shape[0]
        self.V2 = np.eye(k, n, dtype=complex) if self.V2 is None else as_operator(self.V2, name="V2")
        self.V1 = np.eye(n, k, dtype=complex) if self.V1 is None else as_operator(self.V1, name="V1")
        if self.V2.shape != (k, n) or self.V1.shape != (n, k):
            raise DimensionMismatchError("V2 must be {k}x{n} and V1 {n}x{k}, got {} and {}".format(
                self.V2.shape, self.V1.shape, k=k, n=n))

    @property
    def rota(self):
        return self.C is None

    @property
    def n(self):
        return self.T.shape[0]


@dataclass
class GramCertificate:
    """Gram matrix of the d-truncated norm, its square root, the renormed operator and the bracket"""
    G: np.ndarray = field(repr=False)
    L: np.ndarray = field(repr=False)
    T1: np.ndarray = field(repr=False)
    s_d: float
    gamma: object
    eig_lo: float
    eig_hi: float
    bound_lo: float
    bound_hi: float
    sim_const: float
    sim_bound: float
    d: int
    mode: str

    @property
    def t1_norm(self):
        return op_norm(self.T1)


def gamma_opt(V1, V2, beta0, s):
    """gamma = [beta(0) |V1| / (s |V2|)]^{1/2}, or GAMMA_EXACT when s = 0"""
    norm_v1 = V1 if np.isscalar(V1) else op_norm(V1)
    norm_v2 = V2 if np.isscalar(V2) else op_norm(V2)
    if norm_v2 == 0:
        raise ZeroOperatorError("V2 is the null operator")
    if s == 0:
        return GAMMA_EXACT
    if norm_v1 == 0:
        raise ZeroOperatorError("V1 is the null operator")
    return math.sqrt(beta0 * norm_v1 / (s * norm_v2))


def _row_spread(t, beta, d):
    """|sum_{k <= d} T^k T^k* / beta(k)^2|^{1/2}, the constant of |x| >= |x|_H in Rota mode"""
    acc = np.zeros(t.shape, dtype=complex)
    power = np.eye(t.shape[0], dtype=complex)
    for k in range(d + 1):
        acc += power @ power.conj().T / beta(k) ** 2
        power = power @ t
    return math.sqrt(max(float(scipy.linalg.eigvalsh((acc + acc.conj().T) / 2)[-1]), 0.0))


def _resolve_gamma(cfg):
    """Returns (gamma, s_d, norm_v1, norm_v2) for a full-mode config"""
    report = factored_nearness(cfg.T, cfg.V1, cfg.C, cfg.V2, cfg.beta, max(cfg.d, 1))
    s_d = report.s_partial[cfg.d]
    norm_v1, norm_v2 = op_norm(cfg.V1), op_norm(cfg.V2)
    if norm_v2 == 0:
        raise ZeroOperatorError("V2 is the null operator")
    if cfg.gamma != "auto":
        return float(cfg.gamma), s_d, norm_v1, norm_v2
    gamma = gamma_opt(norm_v1, norm_v2, cfg.beta(0), s_d)
    if gamma == GAMMA_EXACT:
        LOG.debug("powers factor exactly through C, using gamma = %g beta(0)/|V2|", EXACT_GAMMA_FACTOR)
        gamma = EXACT_GAMMA_FACTOR * cfg.beta(0) / norm_v2
    return gamma, s_d, norm_v1, norm_v2


def _objective(cfg, gamma):
    """Q = B*B + D*D over the stacked unknown (x_0, .., x_d)"""
    n, d = cfg.n, cfg.d
    weights = np.repeat(cfg.beta.values(d + 1) ** 2, n)
    q = np.diag(weights).astype(complex)
    if not cfg.rota:
        blocks = []
        power = np.eye(cfg.C.shape[0], dtype=complex)
        for _ in range(d + 1):
            blocks.append(power @ cfg.V2)
            power = power @ cfg.C
        b = gamma * np.hstack(blocks)
        q = q + b.conj().T @ b
    return q


def _constraint(cfg):
    """A = [I, T, .., T^d]"""
    blocks = []
    power = np.eye(cfg.n, dtype=complex)
    for _ in range(cfg.d + 1):
        blocks.append(power)
        power = power @ cfg.T
    return np.hstack(blocks)


def _solve_gram(cfg, gamma):
    q = _objective(cfg, gamma)
    eig = scipy.linalg.eigvalsh(q)
    if eig[0] <= 0 or eig[-1] / eig[0] > CONDITION_LIMIT:
        raise DegenerateWeightsError("degenerate weights: objective condition number {:.3e}".format(
            eig[-1] / eig[0] if eig[0] > 0 else math.inf))
    a = _constraint(cfg)
    factor = scipy.linalg.cho_factor(q)
    inner = a @ scipy.linalg.cho_solve(factor, a.conj().T)
    gram = scipy.linalg.inv((inner + inner.conj().T) / 2)
    return (gram + gram.conj().T) / 2


def build_gram(cfg):
    """Closed-form Gram matrix of the d-truncated decomposition norm (p = 2)"""
    if cfg.p != 2:
        raise ValueError("the Gram form exists for p = 2 only, got p = {}".format(cfg.p))

    if cfg.rota:
        gamma = None
        s_d = _row_spread(cfg.T, cfg.beta, cfg.d)
        bound_lo = 1.0 / s_d
        bound_hi = cfg.beta(0)
        sim_bound = cfg.beta(0) * s_d
    else:
        gamma, s_d, norm_v1, norm_v2 = _resolve_gamma(cfg)
        bound_lo = 1.0 / math.sqrt(norm_v1 ** 2 / gamma ** 2 + s_d ** 2)
        bound_hi = math.sqrt(gamma ** 2 * norm_v2 ** 2 + cfg.beta(0) ** 2)
        sim_bound = norm_v1 * norm_v2 + cfg.beta(0) * s_d

    LOG.debug("assembling Gram matrix: n=%d d=%d mode=%s", cfg.n, cfg.d, "rota" if cfg.rota else "full")
    gram = _solve_gram(cfg, gamma)
    eig = scipy.linalg.eigvalsh(gram)
    root = psd_sqrt(gram)
    inverse = scipy.linalg.inv(root)
    t1 = root @ cfg.T @ inverse
    return GramCertificate(
        G=gram, L=root, T1=t1, s_d=s_d, gamma=gamma, eig_lo=float(eig[0]), eig_hi=float(eig[-1]),
        bound_lo=bound_lo, bound_hi=bound_hi, sim_const=op_norm(root) * op_norm(inverse), sim_bound=sim_bound,
        d=cfg.d, mode="rota" if cfg.rota else "full")


def equivalence_check(cert):
    """
    Relative margins of bound_lo^2 <= lambda_min(G) and lambda_max(G) <= bound_hi^2. The witness is the
    eigenvector of the violated side, None when both hold.
    """
    eig, vec = scipy.linalg.eigh(cert.G)
    lower = (eig[0] - cert.bound_lo ** 2) / cert.bound_lo ** 2
    upper = (cert.bound_hi ** 2 - eig[-1]) / cert.bound_hi ** 2
    witness = None
    if lower < -BRACKET_TOL:
        witness = vec[:, 0]
    elif upper < -BRACKET_TOL:
        witness = vec[:, -1]
    return Equivalence(float(lower), float(upper), witness is None, witness)


def _level_norm(gram, x):
    """sqrt(sum_i x_i* G x_i) for x the concatenation of blocks x_i"""
    blocks = x.reshape(-1, gram.shape[0])
    return math.sqrt(max(float(np.einsum("ij,jk,ik->", blocks.conj(), gram, blocks).real), 0.0))


def dominance_step_check(cfg, P, x, e):
    """
    |P(T)x|_{d+e} <= max(|P(C)|, |P(S_w)|) |x|_d, with S_w the weighted shift truncated beyond the reach
    of degree d+e decompositions; deg P <= e
    """
    if P.degree > e:
        raise ValueError("polynomial degree {} exceeds the step e = {}".format(P.degree, e))
    x = as_vector(x, dim=P.size * cfg.n, name="x")

    gram_d = build_gram(cfg)
    fixed = cfg.gamma if cfg.rota else gram_d.gamma
    gram_de = build_gram(dataclasses.replace(cfg, d=cfg.d + e, gamma=fixed))

    lhs = _level_norm(gram_de.G, matpoly_eval(P, cfg.T) @ x)
    shift = truncated_weighted_shift(cfg.beta, cfg.d + e + P.degree + 4)
    factor = op_norm(matpoly_eval(P, shift.matrix))
    if not cfg.rota:
        factor = max(factor, op_norm(matpoly_eval(P, cfg.C)))
    rhs = factor * _level_norm(gram_d.G, x)
    return StepCheck(lhs, rhs, lhs <= rhs * (1 + STEP_TOL) + 1e-14)


def banach_norm_value(T, x, p, beta=None, d=8):
    """
    inf { sum_k beta(k)^p |x_k|^p : x = sum_{k <= d} T^k x_k }^{1/p}, solved with x_0 eliminated by
    L-BFGS-B over the remaining terms
    """
    t = as_operator(T, square=True, name="T")
    n = t.shape[0]
    x = as_vector(x, dim=n, name="x")
    if not p > 1:
        raise ValueError("p must be > 1, got {}".format(p))
    beta = beta or BetaWeight()
    weights = beta.values(d + 1) ** p
    if d == 0 or not np.any(x):
        return beta(0) * float(np.linalg.norm(x))

    powers = []
    power = t
    for _ in range(d):
        powers.append(power)
        power = power @ t
    tail = np.hstack(powers)

    def unpack(z):
        return (z[:n * d] + 1j * z[n * d:]).reshape(d, n)

    def objective(z):
        parts = unpack(z)
        head = x - tail @ parts.reshape(-1)
        vectors = [head] + list(parts)
        value = 0.0
        grads = []
        for weight, vec in zip(weights, vectors):
            size = np.linalg.norm(vec)
            value += weight * size ** p
            grads.append(weight * p * size ** (p - 2) * vec if size > 0 else np.zeros(n, dtype=complex))
        grad = np.concatenate(grads[1:]) - tail.conj().T @ grads[0]
        return value, np.concatenate([grad.real, grad.imag])

    if p == 2:
        start = np.zeros(2 * n * d)
    else:
        cfg = RenormConfig(t, beta=beta, d=d)
        q = _objective(cfg, None)
        a = _constraint(cfg)
        stacked = np.linalg.solve(q, a.conj().T @ (build_gram(cfg).G @ x))[n:]
        start = np.concatenate([stacked.real, stacked.imag])

    res = scipy.optimize.minimize(objective, start, jac=True, method="L-BFGS-B",
                                  options={"maxiter": SOLVER_MAXITER, "ftol": SOLVER_TOL * 1e-6, "gtol": 1e-12})
    best = float(res.fun) ** (1.0 / p)
    if res.status == 1:
        raise NonConvergenceError(best, res.nit)
    if not res.success:
        LOG.debug("decomposition solver stopped early: %s", res.message)
    return best


def matrix_contraction_check(gram, a, xs):
    """sum_i |sum_j a_ij x_j|_G^2 <= sum_j |x_j|_G^2 for a scalar contraction a"""
    a = as_operator(a, name="a")
    sigma = op_norm(a)
    if sigma > 1 + 1e-12:
        raise NotContractionError("not a contraction: |a| = {:.12g}".format(sigma))
    xs = np.asarray(xs, dtype=complex)
    if xs.shape != (a.shape[1], gram.shape[0]):
        raise DimensionMismatchError("xs must be {}x{}, got {}".format(a.shape[1], gram.shape[0], xs.shape))
    mixed = a @ xs
    lhs = _level_norm(gram, mixed.reshape(-1)) ** 2
    rhs = _level_norm(gram, xs.reshape(-1)) ** 2
    return HilbertCheck(lhs, rhs, lhs <= rhs * (1 + 1e-12) + 1e-14)


def decay_index(T, tol=1e-8, k_max=4096):
    """Smallest k with |T^k| <= tol, or None within k_max"""
    t = as_operator(T, square=True, name="T")
    power = np.eye(t.shape[0], dtype=complex)
    for k in range(k_max + 1):
        if op_norm(power) <= tol:
            return k
        power = power @ t
    return None
