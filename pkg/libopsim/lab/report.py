"""
Run reports and verdicts

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

__all__ = ["Report", "Verdict", "PASS", "FAIL", "INCONCLUSIVE", "EXIT_OK", "EXIT_INPUT", "EXIT_FAIL"]

from dataclasses import dataclass, field

from libopsim.dilation import PASS, FAIL, INCONCLUSIVE

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAIL = 2


@dataclass
class Verdict:
    """Outcome of one numeric check; `params` records the value, the limit and the truncation used"""
    name: str
    status: str
    margin: object
    tolerance: float
    params: dict = field(default_factory=dict)

    @classmethod
    def at_most(cls, name, value, limit, tolerance, relative=False, **params):
        """value <= limit + tolerance (tolerance scaled by |limit| when relative)"""
        slack = tolerance * max(abs(limit), 1e-300) if relative else tolerance
        margin = limit + slack - value
        return cls(name, PASS if margin >= 0 else FAIL, margin, tolerance, dict(params, value=value, limit=limit))

    @classmethod
    def at_least(cls, name, value, limit, tolerance, relative=False, **params):
        """value >= limit - tolerance"""
        slack = tolerance * max(abs(limit), 1e-300) if relative else tolerance
        margin = value - limit + slack
        return cls(name, PASS if margin >= 0 else FAIL, margin, tolerance, dict(params, value=value, limit=limit))

    @classmethod
    def flag(cls, name, ok, margin=None, tolerance=0.0, **params):
        return cls(name, PASS if ok else FAIL, margin, tolerance, params)

    @classmethod
    def inconclusive(cls, name, reason, **params):
        return cls(name, INCONCLUSIVE, None, 0.0, dict(params, reason=reason))

    @property
    def failed(self):
        return self.status == FAIL


@dataclass
class Report:
    """
    Echoed configuration, operation results, verdicts and wall-clock timings. Tables (lists of records)
    are written as CSV next to the report; timings are left out of reproducibility comparisons.
    """
    config: dict
    results: dict
    verdicts: list
    timings: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict, repr=False)

    @property
    def exit_code(self):
        return EXIT_FAIL if any(v.failed for v in self.verdicts) else EXIT_OK

    def document(self):
        """The report body as written to JSON"""
        return {"config": self.config, "results": self.results, "verdicts": self.verdicts, "timings": self.timings}
