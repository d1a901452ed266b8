"""
Quadratic nearness of operators

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Two operators T1, T2 are beta-quadratically near when the partial sums

    A_N = sum_{n <= N} beta(n)^-2 (T1^n - T2^n)(T1^n - T2^n)*

stay bounded; their nearness is s = sup_N |A_N|^{1/2}. The factored form compares T^n with V1 C^n V2.
"""

__all__ = [
    "NearnessReport", "quadratic_nearness", "factored_nearness", "row_form_check", "asymptotic_nearness",
    "sandwich_check", "cesaro_renorming", "NotIsometricError", "Asymptotic", "Sandwich", "Cesaro",
]

import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from libopsim.linalg import as_operator, op_norm, spectral_radius, psd_sqrt, DimensionMismatchError
from libopsim.sequences import BetaWeight

LOG = logging.getLogger(__name__)

ISOMETRY_TOL = 1e-10
MONOTONE_TOL = 1e-12

Asymptotic = namedtuple("Asymptotic", ["norms", "envelope"])
Sandwich = namedtuple("Sandwich", ["worst_lower", "worst_upper", "premise_ok", "premise_defect"])
Cesaro = namedtuple("Cesaro", ["norm", "sim_const", "m_max"])


class NotIsometricError(ValueError):
    """Raised when the reference operator of the sandwich check is not an isometry"""


@dataclass
class NearnessReport:
    """
    Partial nearness values s_N = |A_N|^{1/2} for N = 0 .. N_used, the final value s, the term-norm root
    u = [sum |T1^n - T2^n|^2 / beta(n)^2]^{1/2}, and an upper bound on the omitted tail
    [sum_{n > N_used} |T1^n - T2^n|^2 / beta(n)^2]^{1/2} (None when unknown).
    """
    s_partial: list
    s: float
    u: float
    tail_bound: object = None
    N_used: int = 0
    terms: list = field(default_factory=list)

    def vanishes_beyond(self, d, tol=1e-12):
        """All weighted terms of index >= d below tol"""
        return all(term <= tol for term in self.terms[d:])


def _square_pair(t1, t2):
    t1 = as_operator(t1, square=True, name="T1")
    t2 = as_operator(t2, square=True, name="T2")
    if t1.shape != t2.shape:
        raise DimensionMismatchError("T1 is {}x{} but T2 is {}x{}".format(*t1.shape, *t2.shape))
    return t1, t2


def _powers(a, count):
    """A^0 .. A^{count-1}, with A^0 = I even for A = 0"""
    out = np.eye(a.shape[0], dtype=complex)
    for _ in range(count):
        yield out
        out = out @ a


def _power_tail(norms, n_max):
    """
    Upper bound on sum_{n > n_max} |A^n|^2 from |A^j|, j <= n_max: with theta = |A^m| < 1 for some m,
    |A^{qm+j}| <= theta^q max_{j<m} |A^j|.
    """
    for m in range(1, n_max + 1):
        theta = norms[m]
        if theta < 1:
            break
    else:
        return None
    peak = max(norms[:m])
    q0 = (n_max + 1) // m
    return m * peak ** 2 * theta ** (2 * q0) / (1 - theta ** 2)


def _tail_bound(sides, beta, n_max):
    """Minkowski combination of the per-side power tails, divided by the weight floor beyond n_max"""
    floor = beta.lower_bound_from(n_max + 1)
    if floor is None:
        return None
    total = 0.0
    for norms, scale, radius in sides:
        if radius >= 1:
            return None
        tail = _power_tail(norms, n_max)
        if tail is None:
            return None
        total += scale * math.sqrt(tail)
    return total / floor


def _accumulate(differences, beta):
    """Assemble A_N term by term, recording s_N and the weighted term norms"""
    s_partial = []
    terms = []
    acc = None
    for n, diff in enumerate(differences):
        weight = beta(n)
        term = diff @ diff.conj().T / weight ** 2
        acc = term if acc is None else acc + term
        top = scipy.linalg.eigvalsh((acc + acc.conj().T) / 2)[-1]
        s_partial.append(math.sqrt(max(float(top), 0.0)))
        terms.append(op_norm(diff) / weight)
    drops = np.diff(s_partial)
    if drops.size and drops.min() < -MONOTONE_TOL * max(1.0, s_partial[-1]):
        LOG.warning("partial nearness decreased by %.3e", -drops.min())
    u = math.sqrt(math.fsum(t ** 2 for t in terms))
    return NearnessReport(s_partial, s_partial[-1], u, None, len(s_partial) - 1, terms)


def quadratic_nearness(T1, T2, beta=None, N_max=64):
    """beta-quadratic nearness of T1 and T2 summed to N_max, with a tail bound when both are power-stable"""
    t1, t2 = _square_pair(T1, T2)
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    beta = beta or BetaWeight()

    t1_norms, t2_norms, diffs = [], [], []
    for p1, p2 in zip(_powers(t1, N_max + 1), _powers(t2, N_max + 1)):
        t1_norms.append(op_norm(p1))
        t2_norms.append(op_norm(p2))
        diffs.append(p1 - p2)

    report = _accumulate(diffs, beta)
    sides = [(t1_norms, 1.0, spectral_radius(t1)), (t2_norms, 1.0, spectral_radius(t2))]
    report.tail_bound = _tail_bound(sides, beta, N_max)
    LOG.debug("nearness s=%.6g u=%.6g over %d terms", report.s, report.u, N_max + 1)
    return report


def factored_nearness(T, V1, C, V2, beta=None, N_max=64):
    """Nearness of T^n and V1 C^n V2, the n = 0 term comparing I with V1 V2"""
    t = as_operator(T, square=True, name="T")
    c = as_operator(C, square=True, name="C")
    v1 = as_operator(V1, name="V1")
    v2 = as_operator(V2, name="V2")
    n, k = t.shape[0], c.shape[0]
    if v2.shape != (k, n) or v1.shape != (n, k):
        raise DimensionMismatchError(
            "V2 must be {k}x{n} and V1 {n}x{k}, got {} and {}".format(v2.shape, v1.shape, k=k, n=n))
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    beta = beta or BetaWeight()

    t_norms, c_norms, diffs = [], [], []
    for pt, pc in zip(_powers(t, N_max + 1), _powers(c, N_max + 1)):
        t_norms.append(op_norm(pt))
        c_norms.append(op_norm(pc))
        diffs.append(pt - v1 @ pc @ v2)

    report = _accumulate(diffs, beta)
    sides = [(t_norms, 1.0, spectral_radius(t)),
             (c_norms, op_norm(v1) * op_norm(v2), spectral_radius(c))]
    report.tail_bound = _tail_bound(sides, beta, N_max)
    return report


def row_form_check(T1, T2, beta=None, N=32, samples=200, seed=0, polish=8):
    """
    max over seeded y of sum_{n <= N} |(T1^n - T2^n)* y|^2 / beta(n)^2 / |y|^2, evaluated term by term.
    The best sample is then improved by a few power steps y <- sum_n D_n D_n* y / beta(n)^2.
    """
    t1, t2 = _square_pair(T1, T2)
    beta = beta or BetaWeight()
    adjoints = [(p1 - p2).conj().T / beta(n)
                for n, (p1, p2) in enumerate(zip(_powers(t1, N + 1), _powers(t2, N + 1)))]

    def energy(y):
        return sum(np.sum(np.abs(d_h @ y) ** 2, axis=0) for d_h in adjoints)

    rng = np.random.default_rng(seed)
    dim = t1.shape[0]
    ys = rng.standard_normal((dim, samples)) + 1j * rng.standard_normal((dim, samples))
    ratios = energy(ys) / np.sum(np.abs(ys) ** 2, axis=0)
    best = int(np.argmax(ratios))
    ratio = float(ratios[best])

    y = ys[:, best] / np.linalg.norm(ys[:, best])
    for _ in range(polish):
        z = sum(d_h.conj().T @ (d_h @ y) for d_h in adjoints)
        size = np.linalg.norm(z)
        if size == 0:
            break
        y = z / size
        ratio = max(ratio, float(energy(y)))
    return ratio


def asymptotic_nearness(T1, T2, n_max):
    """|T1^n - T2^n| for n = 0 .. n_max and the largest value over the last quarter of that range"""
    t1, t2 = _square_pair(T1, T2)
    norms = [op_norm(p1 - p2) for p1, p2 in zip(_powers(t1, n_max + 1), _powers(t2, n_max + 1))]
    start = len(norms) - max(1, len(norms) // 4)
    return Asymptotic(norms, max(norms[start:]))


def sandwich_check(T, W, r, m_max, samples=64, seed=0):
    """
    With W an isometry and |T^m - W^m| <= r < 1 for 1 <= m <= m_max, verify
    (1-r)|x| <= |T^m x| <= (1+r)|x| on seeded unit samples. Margins are None when the premise fails.
    """
    t, w = _square_pair(T, W)
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1), got {}".format(r))
    defect = op_norm(w.conj().T @ w - np.eye(w.shape[0]))
    if defect > ISOMETRY_TOL:
        raise NotIsometricError("W is not an isometry: |W*W - I| = {:.3e}".format(defect))

    t_powers = list(_powers(t, m_max + 1))[1:]
    w_powers = list(_powers(w, m_max + 1))[1:]
    premise = max(op_norm(pt - pw) for pt, pw in zip(t_powers, w_powers))
    if premise > r:
        return Sandwich(None, None, False, premise)

    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((t.shape[0], samples)) + 1j * rng.standard_normal((t.shape[0], samples))
    xs = xs / np.linalg.norm(xs, axis=0)
    worst_lower = math.inf
    worst_upper = math.inf
    for pt in t_powers:
        lengths = np.linalg.norm(pt @ xs, axis=0)
        worst_lower = min(worst_lower, float(np.min(lengths - (1 - r))))
        worst_upper = min(worst_upper, float(np.min((1 + r) - lengths)))
    return Sandwich(worst_lower, worst_upper, True, premise)


def cesaro_renorming(T, m_max):
    """
    Average G = (1/M) sum_{m < M} T*^m T^m and report |G^{1/2} T G^{-1/2}| with the similarity constant
    |G^{1/2}| |G^{-1/2}|. Diagnostic only: nothing is claimed about convergence in M.
    """
    t = as_operator(T, square=True, name="T")
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    gram = np.zeros(t.shape, dtype=complex)
    for power in _powers(t, m_max):
        gram += power.conj().T @ power
    root = psd_sqrt(gram / m_max)
    inverse = scipy.linalg.inv(root)
    return Cesaro(op_norm(root @ t @ inverse), op_norm(root) * op_norm(inverse), m_max)
