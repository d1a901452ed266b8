"""
rho-dilations and the C_rho classes

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

T is in C_rho when T^n = rho_n V* U^n V (n >= 1) for a unitary U and an isometric embedding V, equivalently
when Herm(I + sum_{n >= 1} 2 lambda^n / rho_n T^n) >= 0 on the open unit disk. Positivity is certified on a
compact sub-disk only.
"""

__all__ = [
    "RhoSeq", "crho_positivity", "crho_kernel", "rho_dilation_check", "racz_deficiency", "racz_pipeline",
    "CrhoResult", "RaczDeficiency", "RaczPipeline", "NotUnitaryError", "PASS", "FAIL", "INCONCLUSIVE",
]

import logging
import math
from collections import namedtuple

import numpy as np

from libopsim.linalg import as_operator, op_norm, DimensionMismatchError
from libopsim.nearness import factored_nearness, NotIsometricError
from libopsim.sequences import decade_diverges
from libopsim.shifts import schaeffer_dilation

LOG = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
POSITIVITY_TOL = 1e-10
PREMISE_TOL = 1e-10
NILPOTENT_TOL = 1e-14

CrhoResult = namedtuple("CrhoResult", [
    "min_eig", "tail_bound", "verdict", "witness", "r_max", "grid", "radii", "N_trunc"])
RaczDeficiency = namedtuple("RaczDeficiency", ["partial", "converged", "majorants", "limit_estimate"])
RaczPipeline = namedtuple("RaczPipeline", ["dilation_defect", "nearness", "deficiency", "bound", "ok"])


class NotUnitaryError(ValueError):
    """Raised when dilation data holds a non-unitary operator"""


class RhoSeq:
    """
    Positive sequence rho_n, n >= 1: const (rho_n = value), table (rho_n = table[n-1]) or
    power (rho_n = base + scale n^-exponent)
    """
    KINDS = ("const", "table", "power")

    def __init__(self, kind="const", value=1.0, table=None, base=1.0, scale=1.0, exponent=1.0):
        if kind not in self.KINDS:
            raise RhoSeq.KindError("unknown rho kind '{}', expected one of {}".format(kind, self.KINDS))
        self.kind = kind
        self.value = float(value)
        self.table = None
        self.base, self.scale, self.exponent = float(base), float(scale), float(exponent)
        if kind == "const" and not self.value > 0:
            raise RhoSeq.NonPositiveError("rho must be > 0, got {}".format(self.value))
        elif kind == "table":
            if table is None or len(table) == 0:
                raise RhoSeq.KindError("table rho needs a non-empty table")
            self.table = np.asarray(table, dtype=float).reshape(-1)
            if np.any(~(self.table > 0)):
                raise RhoSeq.NonPositiveError("rho_n must be > 0, got {}".format(list(self.table)))
        elif kind == "power":
            if self.exponent <= 0:
                raise RhoSeq.KindError("power rho needs a positive exponent")
            floor = self.base if self.scale >= 0 else self.base + self.scale
            if floor < 0 or (floor == 0 and self.scale <= 0):
                raise RhoSeq.NonPositiveError("power rho takes non-positive values")

    @classmethod
    def from_spec(cls, spec):
        """From a mapping {"kind": ..} or the short forms "const:2", "table:1,2,2", "power:base,scale,exp" """
        if isinstance(spec, (int, float)):
            return cls("const", value=spec)
        if isinstance(spec, str):
            kind, _, args = spec.partition(":")
            try:
                numbers = [float(v) for v in args.split(",")] if args else []
            except ValueError:
                raise RhoSeq.KindError("malformed rho spec '{}'".format(spec)) from None
            if kind == "const" and len(numbers) == 1:
                return cls("const", value=numbers[0])
            if kind == "table" and numbers:
                return cls("table", table=numbers)
            if kind == "power" and len(numbers) == 3:
                return cls("power", base=numbers[0], scale=numbers[1], exponent=numbers[2])
            raise RhoSeq.KindError("malformed rho spec '{}'".format(spec))
        if not isinstance(spec, dict) or "kind" not in spec:
            raise RhoSeq.KindError("rho spec must be a mapping with a 'kind' key")
        keys = ("value", "table", "base", "scale", "exponent")
        return cls(spec["kind"], **{k: spec[k] for k in keys if k in spec})

    def to_spec(self):
        if self.kind == "const":
            return {"kind": "const", "value": self.value}
        if self.kind == "table":
            return {"kind": "table", "table": [float(v) for v in self.table]}
        return {"kind": "power", "base": self.base, "scale": self.scale, "exponent": self.exponent}

    def __call__(self, n):
        if n < 1:
            raise IndexError("rho is indexed from 1, got {}".format(n))
        if self.kind == "const":
            return self.value
        if self.kind == "power":
            return self.base + self.scale * n ** -self.exponent
        if n > self.table.size:
            raise RhoSeq.RangeError("rho_{} is beyond the table of length {}".format(n, self.table.size))
        return float(self.table[n - 1])

    def values(self, count):
        """(rho_1, ..., rho_count)"""
        if self.kind == "power":
            return self.base + self.scale * np.arange(1, count + 1, dtype=float) ** -self.exponent
        return np.array([self(n) for n in range(1, count + 1)])

    def lower_bound_from(self, n):
        """inf_{k >= n} rho_k, None when the sequence is not known that far or the infimum is 0"""
        if self.kind == "const":
            return self.value
        if self.kind == "table":
            return None
        bound = self.base if self.scale >= 0 else self(n)
        return bound if bound > 0 else None

    def __repr__(self):
        return "RhoSeq({})".format(self.to_spec())

    class KindError(ValueError):
        """Raised when a rho spec is malformed"""

    class NonPositiveError(ValueError):
        """Raised when a rho value is not strictly positive"""

    class RangeError(ValueError):
        """Raised when a table rho is read beyond its table"""


def _series_powers(t, count):
    """T^1 .. T^count, cut short at the first vanishing power (flagged nilpotent)"""
    powers = []
    power = t
    for _ in range(count):
        if op_norm(power) <= NILPOTENT_TOL:
            return powers, True
        powers.append(power)
        power = power @ t
    return powers, op_norm(power) <= NILPOTENT_TOL


def _series_tail(t, rho, r_max, n_trunc):
    """
    Upper bound on 2 sum_{n > N} r^n |T^n| / rho_n: with theta = r^m |T^m| < 1 the terms of index
    qm + j are below theta^q r^j |T^j|. None when uncontrolled.
    """
    floor = rho.lower_bound_from(n_trunc + 1)
    if floor is None:
        return None
    norms = [1.0]
    power = np.eye(t.shape[0], dtype=complex)
    for j in range(1, n_trunc + 1):
        power = power @ t
        norms.append(r_max ** j * op_norm(power))
        if norms[j] < 1:
            m, theta = j, norms[j]
            q0 = (n_trunc + 1) // m
            return 2 * m * max(norms[:m]) * theta ** q0 / ((1 - theta) * floor)
    return None


def crho_kernel(T, rho, lam, N_trunc=64):
    """Smallest eigenvalue of Herm(I + sum_{n <= N_trunc} 2 lam^n / rho_n T^n)"""
    t = as_operator(T, square=True, name="T")
    powers, _ = _series_powers(t, N_trunc)
    total = np.eye(t.shape[0], dtype=complex)
    for n, power in enumerate(powers, start=1):
        total = total + 2 * lam ** n / rho(n) * power
    return float(np.linalg.eigvalsh((total + total.conj().T) / 2)[0])


def crho_positivity(T, rho, r_max=0.999, grid=256, N_trunc=64, radii=16):
    """
    Grid certificate of Herm(I + sum_n 2 lambda^n / rho_n T^n) >= 0 on |lambda| <= r_max. The verdict is
    "inconclusive" unless T is nilpotent or the series tail is controlled.
    """
    t = as_operator(T, square=True, name="T")
    if not 0 < r_max < 1:
        raise ValueError("r_max must lie in (0, 1), got {}".format(r_max))
    powers, nilpotent = _series_powers(t, N_trunc)
    tail = 0.0 if nilpotent else _series_tail(t, rho, r_max, N_trunc)

    moduli = np.linspace(r_max / radii, r_max, radii)
    angles = np.exp(2j * math.pi * np.arange(grid) / grid)
    lambdas = np.concatenate([[0.0], np.outer(moduli, angles).reshape(-1)])
    exponents = np.arange(1, len(powers) + 1)
    if powers:
        weights = 2 * lambdas[:, None] ** exponents / rho.values(len(powers))
        stack = np.einsum("gn,nij->gij", weights, np.array(powers))
    else:
        stack = np.zeros((lambdas.size,) + t.shape, dtype=complex)
    stack = stack + np.eye(t.shape[0])
    eigs = np.linalg.eigvalsh((stack + np.conj(np.swapaxes(stack, 1, 2))) / 2)[:, 0]
    worst = int(np.argmin(eigs))
    min_eig = float(eigs[worst])

    if tail is None:
        verdict = INCONCLUSIVE
    elif min_eig >= -tail - POSITIVITY_TOL:
        verdict = PASS
    else:
        verdict = FAIL
    LOG.debug("C_rho positivity: min eig %.6g over %d points, verdict %s", min_eig, lambdas.size, verdict)
    return CrhoResult(min_eig, tail, verdict, complex(lambdas[worst]), r_max, grid, radii, N_trunc)


def _check_unitary(u):
    eye = np.eye(u.shape[0])
    defect = max(op_norm(u.conj().T @ u - eye), op_norm(u @ u.conj().T - eye))
    if defect > PREMISE_TOL:
        raise NotUnitaryError("U is not unitary: defect {:.3e}".format(defect))


def _check_isometry(v):
    defect = op_norm(v.conj().T @ v - np.eye(v.shape[1]))
    if defect > PREMISE_TOL:
        raise NotIsometricError("V is not an isometry: defect {:.3e}".format(defect))


def rho_dilation_check(T, U, V, rho, n_max):
    """max over 1 <= n <= n_max of |T^n - rho_n V* U^n V|"""
    t = as_operator(T, square=True, name="T")
    u = as_operator(U, square=True, name="U")
    v = as_operator(V, name="V")
    if v.shape != (u.shape[0], t.shape[0]):
        raise DimensionMismatchError("V must be {}x{}, got {}".format(u.shape[0], t.shape[0], v.shape))
    _check_unitary(u)
    _check_isometry(v)
    worst = 0.0
    t_power, u_power = t, u
    for n in range(1, n_max + 1):
        worst = max(worst, op_norm(t_power - rho(n) * v.conj().T @ u_power @ v))
        t_power = t_power @ t
        u_power = u_power @ u
    return worst


def racz_deficiency(rho, k, M, N):
    """
    partial = sum_{n <= N} (rho_{nk} - M)^2 with the per-term majorants |rho_{nk} - M|. Convergence is decided
    in closed form for const and power sequences and by the doubling diagnostic for tables; power sequences
    also get an integral estimate of the full sum.
    """
    if k < 1 or not M > 0:
        raise ValueError("need k >= 1 and M > 0")
    if rho.kind == "table":
        N = min(N, rho.table.size // k)
    index = k * np.arange(1, N + 1)
    if rho.kind == "power":
        values = rho.base + rho.scale * index.astype(float) ** -rho.exponent
    elif rho.kind == "table":
        values = rho.table[index - 1]
    else:
        values = np.full(N, rho.value)
    majorants = np.abs(values - M)
    partials = np.cumsum(majorants ** 2)
    partial = math.fsum(majorants ** 2) if N else 0.0

    estimate = None
    if rho.kind == "const":
        converged = rho.value == M
        estimate = partial if converged else math.inf
    elif rho.kind == "power":
        converged = rho.base == M and 2 * rho.exponent > 1
        if converged:
            twice = 2 * rho.exponent
            estimate = partial + rho.scale ** 2 * k ** -twice * N ** (1 - twice) / (twice - 1)
        else:
            estimate = math.inf
    else:
        converged = not decade_diverges(partials)
    return RaczDeficiency(partial, converged, majorants, estimate)


def racz_pipeline(T0, rho, k, M, N=8):
    """
    Assemble T = rho_1 T0 from a square-zero contraction T0 and its Schaffer dilation (U, V), so that
    T^n = rho_n V* U^n V for n <= 2N; then S = T^k is compared with M V* U^{nk} V and the factored nearness
    s^2 is checked against (1 - M)^2 + sum_n (rho_{nk} - M)^2.

    T0^2 = 0 leaves two nonzero differences: (1 - M) I at n = 0 and, for k = 1 only, (rho_1 - M) T0 at n = 1.
    For k >= 2 the nearness is exactly |1 - M| and the rho terms of the bound are slack.
    """
    t0 = as_operator(T0, square=True, name="T0")
    if op_norm(t0 @ t0) > NILPOTENT_TOL:
        raise ValueError("T0 must square to zero")
    u, v = schaeffer_dilation(t0, N)
    t = rho(1) * t0
    horizon = 2 * N
    defect = rho_dilation_check(t, u, v, rho, horizon)

    n_max = max(horizon // k, 1)
    s = np.linalg.matrix_power(t, k)
    report = factored_nearness(s, M * v.conj().T, np.linalg.matrix_power(u, k), v, None, n_max)
    deficiency = racz_deficiency(rho, k, M, n_max)
    bound = (1 - M) ** 2 + deficiency.partial
    ok = report.s ** 2 <= bound * (1 + 1e-10) + 1e-10
    return RaczPipeline(defect, report, deficiency, bound, ok)
