"""
Brute-force reference computations

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Each oracle reaches its value by a different route than the module it backs: a dense KKT solve instead of
the Schur complement, explicit matrix powers instead of incremental products, sphere sampling instead of
eigenvalue sweeps. Dimensions are capped at ORACLE_MAX_DIM.
"""

__all__ = ["OracleResult", "kkt_min", "direct_partial_sum_norm", "unit_sphere_max", "SingularSystemError"]

import logging
from collections import namedtuple

import numpy as np
import scipy.linalg

from libopsim.sequences import BetaWeight

LOG = logging.getLogger(__name__)

ORACLE_MAX_DIM = 256
ASCENT_STEPS = (0.5, 0.1, 0.02, 0.004, 0.0008)
ASCENT_DIRECTIONS = (1, -1, 1j, -1j)

OracleResult = namedtuple("OracleResult", ["value", "method", "cost"])


class SingularSystemError(ValueError):
    """Raised when the KKT system of an oracle cannot be solved"""


def _cap(dim):
    if dim > ORACLE_MAX_DIM:
        raise ValueError("oracles are capped at dimension {}, got {}".format(ORACLE_MAX_DIM, dim))


def kkt_min(Q, A, x):
    """min X* Q X subject to A X = x, from the full system [[Q, A*], [A, 0]] [X; mu] = [0; x]"""
    q = np.asarray(Q, dtype=complex)
    a = np.asarray(A, dtype=complex)
    x = np.asarray(x, dtype=complex).reshape(-1)
    _cap(a.shape[0])
    rows, cols = a.shape
    kkt = np.block([[q, a.conj().T], [a, np.zeros((rows, rows))]])
    rhs = np.concatenate([np.zeros(cols), x])
    try:
        sol = scipy.linalg.solve(kkt, rhs)
    except (scipy.linalg.LinAlgError, ValueError) as err:
        raise SingularSystemError("singular KKT system: {}".format(err)) from err
    if not np.all(np.isfinite(sol)):
        raise SingularSystemError("singular KKT system")
    stacked = sol[:cols]
    value = float((stacked.conj() @ q @ stacked).real)
    return OracleResult(value, "kkt", "dense solve of order {}".format(rows + cols))


def direct_partial_sum_norm(T1, T2, beta=None, N=32):
    """|A_N| with every power recomputed by matrix_power and a full Hermitian eigendecomposition"""
    t1 = np.asarray(T1, dtype=complex)
    t2 = np.asarray(T2, dtype=complex)
    _cap(t1.shape[0])
    beta = beta or BetaWeight()
    total = np.zeros(t1.shape, dtype=complex)
    for n in range(N + 1):
        diff = np.linalg.matrix_power(t1, n) - np.linalg.matrix_power(t2, n)
        total = total + diff @ diff.conj().T / beta(n) ** 2
    eig = scipy.linalg.eigh((total + total.conj().T) / 2, eigvals_only=True)
    return OracleResult(float(np.max(np.abs(eig))), "eigh", "{} explicit powers".format(2 * (N + 1)))


def _objective(a, p, mode):
    if mode == "radius":
        return lambda x: abs(np.vdot(x, a @ x)) / np.vdot(x, x).real
    if mode == "norm":
        return lambda x: np.linalg.norm(a @ x, ord=p) / np.linalg.norm(x, ord=p)
    raise ValueError("unknown mode '{}'".format(mode))


def unit_sphere_max(A, p=2, samples=256, seed=0, mode="norm", sweeps=4):
    """
    Lower bound on max |Ax|_p / |x|_p (mode "norm") or on the numerical radius (mode "radius") from seeded
    sphere samples polished by coordinate ascent
    """
    a = np.asarray(A, dtype=complex)
    n = a.shape[1]
    _cap(n)
    value = _objective(a, p, mode)
    rng = np.random.default_rng(seed)
    cands = list(np.eye(n, dtype=complex))
    cands += list(rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n)))
    scores = [value(x) for x in cands]
    best = int(np.argmax(scores))
    x, score = cands[best], scores[best]

    for _ in range(sweeps):
        for step in ASCENT_STEPS:
            for j in range(n):
                for direction in ASCENT_DIRECTIONS:
                    trial = x.copy()
                    trial[j] += step * direction * np.linalg.norm(x) / np.sqrt(n)
                    if not np.any(trial):
                        continue
                    trial_score = value(trial)
                    if trial_score > score:
                        x, score = trial, trial_score
    LOG.debug("sphere oracle (%s) reached %.12g", mode, score)
    return OracleResult(float(score), "sphere-" + mode, "{} samples, {} sweeps".format(samples, sweeps))
