"""
Scalar sequences and weight functions

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

AlphaSeq is the square-summable coefficient sequence of the Hankel symbols, BetaWeight the weight of the
quadratic nearness functional. Rule sequences expose exact tails, or rigorous upper bounds when only an
integral remainder is available.
"""

__all__ = [
    "AlphaSeq", "BetaWeight", "quantity_A", "quantity_B", "abel_swap_check", "shift_weights",
    "decade_diverges", "QuantityA", "QuantityB", "AbelCheck",
]

import logging
import math
from collections import namedtuple

import numpy as np

LOG = logging.getLogger(__name__)

QuantityA = namedtuple("QuantityA", ["value", "diverged", "argmax"])
QuantityB = namedtuple("QuantityB", ["partial", "converged", "bound"])
AbelCheck = namedtuple("AbelCheck", ["lhs", "rhs", "defect"])

# explicit terms summed beyond the requested index before the integral remainder takes over
EXAMPLE32_HORIZON = 2 ** 20


def decade_diverges(partials):
    """Partial sums (or sups) doubling over the final decade of indices"""
    partials = np.asarray(partials, dtype=float)
    last = partials.size - 1
    if last < 10:
        return False
    if not np.isfinite(partials[-1]):
        return True
    previous = partials[last // 10]
    return bool(previous > 0 and partials[-1] > 2 * previous)


class AlphaSeq:
    """Square-summable scalar sequence given by a rule or an explicit table"""
    KINDS = ("explicit", "pisier", "example32", "geometric")

    def __init__(self, kind="explicit", table=None, ratio=None):
        if kind not in self.KINDS:
            raise AlphaSeq.KindError("unknown sequence kind '{}', expected one of {}".format(kind, self.KINDS))
        self.kind = kind
        self.ratio = None if ratio is None else float(ratio)
        self.table = None
        if kind == "explicit":
            if table is None:
                raise AlphaSeq.KindError("explicit sequences need a table")
            self.table = np.asarray(table, dtype=float).reshape(-1)
            if not np.all(np.isfinite(self.table)):
                raise AlphaSeq.KindError("explicit table entries must be finite")
        elif kind == "geometric" and self.ratio is None:
            raise AlphaSeq.KindError("geometric sequences need a ratio")
        elif kind == "pisier" and self.ratio is not None and not 0 < self.ratio < 1:
            raise AlphaSeq.KindError("pisier ratio must lie in (0, 1)")

    @classmethod
    def from_spec(cls, spec):
        """Build from a sequence spec dict {"kind": ..., "table": [...], "ratio": c}"""
        if isinstance(spec, str):
            kind, _, ratio = spec.partition(":")
            spec = {"kind": kind, "ratio": float(ratio)} if ratio else {"kind": kind}
        if isinstance(spec, list):
            spec = {"kind": "explicit", "table": spec}
        if not isinstance(spec, dict) or "kind" not in spec:
            raise AlphaSeq.KindError("sequence spec must be a mapping with a 'kind' key")
        return cls(spec["kind"], table=spec.get("table"), ratio=spec.get("ratio"))

    def to_spec(self):
        spec = {"kind": self.kind}
        if self.table is not None:
            spec["table"] = [float(v) for v in self.table]
        if self.ratio is not None:
            spec["ratio"] = self.ratio
        return spec

    @property
    def support_hint(self):
        """Index beyond which the tail is known in closed form"""
        if self.kind == "explicit":
            return int(self.table.size)
        return 0

    @property
    def literal_pisier(self):
        return self.kind == "pisier" and self.ratio is None

    def value(self, k):
        """alpha_k"""
        if k < 0:
            raise IndexError("negative index {}".format(k))
        if self.kind == "explicit":
            return float(self.table[k]) if k < self.table.size else 0.0
        if self.kind == "geometric":
            return self.ratio ** k
        if self.kind == "pisier":
            if (k + 1) & k:
                return 0.0
            return 1.0 if self.ratio is None else self.ratio ** (k + 1).bit_length() / self.ratio
        # example32, alpha_0 := 0 where the rule divides by log 1
        if k == 0:
            return 0.0
        return (k + 1) ** -1.5 * math.log(k + 1) ** -0.5

    def values(self, count):
        """(alpha_0, ..., alpha_{count-1})"""
        if self.kind == "explicit":
            out = np.zeros(count)
            n = min(count, self.table.size)
            out[:n] = self.table[:n]
            return out
        if self.kind == "example32":
            idx = np.arange(count, dtype=float)
            out = np.zeros(count)
            out[1:] = (idx[1:] + 1) ** -1.5 / np.sqrt(np.log(idx[1:] + 1))
            return out
        return np.array([self.value(k) for k in range(count)])

    def _example32_squares(self, count):
        idx = np.arange(count, dtype=float)
        out = np.zeros(count)
        out[1:] = 1.0 / ((idx[1:] + 1) ** 3 * np.log(idx[1:] + 1))
        return out

    def tails(self, k_max):
        """
        (tail(0), ..., tail(k_max)) with tail(k) = sum_{i >= k} |alpha_i|^2.

        Exact for explicit, geometric and pisier sequences; for example32 an upper bound with a relative
        slack below 1e-8, from explicit summation over 2^20 further terms plus an integral remainder.
        """
        ks = np.arange(k_max + 1)
        if self.kind == "explicit":
            squares = self.table ** 2
            rev = np.concatenate([np.cumsum(squares[::-1])[::-1], [0.0]])
            return rev[np.minimum(ks, squares.size)]
        if self.kind == "geometric":
            c2 = self.ratio ** 2
            if c2 >= 1:
                return np.full(k_max + 1, math.inf)
            return c2 ** ks / (1 - c2)
        if self.kind == "pisier":
            if self.ratio is None:
                return np.full(k_max + 1, math.inf)
            c2 = self.ratio ** 2
            first = np.array([int(k).bit_length() for k in ks])
            return c2 ** first / (1 - c2)

        horizon = k_max + EXAMPLE32_HORIZON
        squares = self._example32_squares(horizon)
        remainder = 1.0 / ((horizon + 1) ** 3 * math.log(horizon + 1)) \
            + 1.0 / (2 * (horizon + 1) ** 2 * math.log(horizon + 1))
        return (np.cumsum(squares[::-1])[::-1] + remainder)[:k_max + 1]

    def tail(self, k):
        return float(self.tails(k)[k])

    def __repr__(self):
        return "AlphaSeq({})".format(self.to_spec())

    class KindError(ValueError):
        """Raised when a sequence spec is malformed"""


class BetaWeight:
    """Strictly positive weight function beta on the nonnegative integers"""
    KINDS = ("const", "sqrt", "table")

    def __init__(self, kind="const", value=1.0, table=None):
        if kind not in self.KINDS:
            raise BetaWeight.KindError("unknown weight kind '{}', expected one of {}".format(kind, self.KINDS))
        self.kind = kind
        self.value = float(value)
        self.table = None
        if kind == "table":
            if table is None or len(table) == 0:
                raise BetaWeight.KindError("table weights need a non-empty table")
            self.table = np.asarray(table, dtype=float).reshape(-1)
            if not np.all(np.isfinite(self.table)) or np.any(self.table <= 0):
                raise BetaWeight.NonPositiveError("beta(n) must be finite and > 0, got {}".format(list(self.table)))
        elif kind == "const" and not (math.isfinite(self.value) and self.value > 0):
            raise BetaWeight.NonPositiveError("beta(n) must be > 0, got {}".format(self.value))

    @classmethod
    def from_spec(cls, spec):
        """Build from a weight spec dict {"kind": "const"|"sqrt"|"table", "table": [...], "value": v}"""
        if spec is None:
            return cls()
        if isinstance(spec, str):
            kind, _, value = spec.partition(":")
            if kind == "dirichlet":
                return cls.dirichlet()
            spec = {"kind": kind, "value": float(value)} if value else {"kind": kind}
        if isinstance(spec, (int, float)):
            spec = {"kind": "const", "value": spec}
        if not isinstance(spec, dict) or "kind" not in spec:
            raise BetaWeight.KindError("weight spec must be a mapping with a 'kind' key")
        return cls(spec["kind"], value=spec.get("value", 1.0), table=spec.get("table"))

    @classmethod
    def dirichlet(cls):
        """beta(n) = sqrt(n+1)"""
        return cls("sqrt")

    def to_spec(self):
        if self.kind == "table":
            return {"kind": "table", "table": [float(v) for v in self.table]}
        if self.kind == "const":
            return {"kind": "const", "value": self.value}
        return {"kind": self.kind}

    def __call__(self, n):
        if n < 0:
            raise IndexError("negative index {}".format(n))
        if self.kind == "const":
            return self.value
        if self.kind == "sqrt":
            return math.sqrt(n + 1)
        if n >= self.table.size:
            raise BetaWeight.RangeError("beta({}) is beyond the weight table of length {}".format(n, self.table.size))
        return float(self.table[n])

    def values(self, count):
        """(beta(0), ..., beta(count-1))"""
        return np.array([self(n) for n in range(count)])

    def lower_bound_from(self, n):
        """inf_{k >= n} beta(k), or None when the weight is not defined that far"""
        if self.kind == "const":
            return self.value
        if self.kind == "sqrt":
            return math.sqrt(n + 1)
        return None

    def __repr__(self):
        return "BetaWeight({})".format(self.to_spec())

    class KindError(ValueError):
        """Raised when a weight spec is malformed"""

    class NonPositiveError(ValueError):
        """Raised when a weight value is not strictly positive"""

    class RangeError(ValueError):
        """Raised when a table weight is read beyond its table"""


def quantity_A(alpha, k_max):
    """A = sup_{k <= k_max} (k+1)^2 tail(k), with the decade-doubling divergence flag"""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    weighted = (np.arange(k_max + 1, dtype=float) + 1) ** 2 * alpha.tails(k_max)
    if not np.all(np.isfinite(weighted)):
        return QuantityA(math.inf, True, int(np.argmax(~np.isfinite(weighted))))
    sups = np.maximum.accumulate(weighted)
    return QuantityA(float(sups[-1]), decade_diverges(sups), int(np.argmax(weighted)))


def _geometric_remainder(first_term, ratio_bound):
    return first_term / (1 - ratio_bound)


def quantity_B(alpha, power, n_max):
    """
    B_power = sum_k (k+1)^power |alpha_k|^2: the partial sum to n_max, convergence of the full series and an
    upper bound on it when one is known (inf otherwise).
    """
    if power < 0:
        raise ValueError("power must be >= 0")
    ks = np.arange(n_max + 1, dtype=float)
    partial = math.fsum((ks + 1) ** power * alpha.values(n_max + 1) ** 2)

    if alpha.kind == "explicit":
        full = alpha.table.size
        total = math.fsum((np.arange(full, dtype=float) + 1) ** power * alpha.table ** 2)
        return QuantityB(partial, True, max(total, partial))

    if alpha.kind == "geometric":
        c2 = alpha.ratio ** 2
        if c2 >= 1:
            return QuantityB(partial, False, math.inf)
        start = n_max + 1
        while ((start + 2) / (start + 1)) ** power * c2 >= 1:
            start += 1
        middle = math.fsum((k + 1) ** power * c2 ** k for k in range(n_max + 1, start))
        first = (start + 1) ** power * c2 ** start
        q = ((start + 2) / (start + 1)) ** power * c2
        return QuantityB(partial, True, partial + middle + _geometric_remainder(first, q))

    if alpha.kind == "pisier":
        if alpha.ratio is None:
            return QuantityB(partial, False, math.inf)
        r = 2 ** power * alpha.ratio ** 2
        if r >= 1:
            return QuantityB(partial, False, math.inf)
        j1 = (n_max + 1).bit_length()
        return QuantityB(partial, True, partial + _geometric_remainder(r ** j1, r))

    # example32: terms (k+1)^{power-3} / log(k+1), summable iff power < 2
    if power >= 2:
        return QuantityB(partial, False, math.inf)
    u = n_max + 2
    remainder = u ** (power - 3) / math.log(u) + u ** (power - 2) / ((2 - power) * math.log(u))
    return QuantityB(partial, True, partial + remainder)


def abel_swap_check(alpha, n_terms=None):
    """
    Compare sum_n (n+1)^2 tail(n) with its Abel rearrangement sum_i [sum_{n<=i} (n+1)^2] alpha_i^2 on a
    finitely supported sequence.
    """
    if isinstance(alpha, AlphaSeq):
        if n_terms is None:
            if alpha.kind != "explicit":
                raise ValueError("rule sequences must be truncated: pass n_terms")
            n_terms = alpha.table.size
        values = alpha.values(n_terms)
    else:
        values = np.asarray(alpha, dtype=float).reshape(-1)
    squares = values ** 2
    count = squares.size
    lhs = math.fsum((n + 1) ** 2 * math.fsum(squares[n:]) for n in range(count))
    rhs = math.fsum((i + 1) * (i + 2) * (2 * i + 3) / 6 * squares[i] for i in range(count))
    return AbelCheck(lhs, rhs, abs(lhs - rhs))


def shift_weights(beta, count):
    """(w_0, ..., w_{count-1}) with w_n = beta(n+1)/beta(n)"""
    if count < 1:
        raise ValueError("need at least one weight")
    values = beta.values(count + 1)
    if np.any(values <= 0):
        raise BetaWeight.NonPositiveError("beta(n) must be > 0")
    return list(values[1:] / values[:-1])
