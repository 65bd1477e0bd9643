"""Check reports: uniform result records for every identity verification."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .qarith import format_rational

EXACT_PASS = "exact-pass"
FAIL = "fail"
UNTRUSTED = "untrusted-boundary"

MAX_FAILING = 20


@dataclass
class CheckReport:
    """Outcome of one exact identity check."""

    name: str
    params: dict
    status: str = EXACT_PASS
    max_discrepancy: Fraction = Fraction(0)
    failing: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == EXACT_PASS

    def record_failure(self, key, lhs: Fraction, rhs: Fraction):
        self.status = FAIL
        diff = abs(lhs - rhs)
        if diff > self.max_discrepancy:
            self.max_discrepancy = diff
        if len(self.failing) < MAX_FAILING:
            self.failing.append(
                {"entry": key, "lhs": format_rational(lhs), "rhs": format_rational(rhs)}
            )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "status": self.status,
            "max_discrepancy": format_rational(self.max_discrepancy),
            "failing": self.failing,
            "info": self.info,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), default=str, **kwargs)

    def summary(self) -> str:
        tail = "" if self.passed else f" max|lhs-rhs|={format_rational(self.max_discrepancy)}"
        return f"{self.name}: {self.status}{tail}"
