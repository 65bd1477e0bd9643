"""Stochastic vertex weights for one horizontal slot (l = 1).

A vertex at a site of capacity m takes an input pair (incoming horizontal
color j, vertical composition beta) to an output pair (outgoing horizontal
color k, vertical composition delta).  Only color-conserving transitions
have nonzero weight, and for every input pair the output weights sum to
exactly 1 (the input indexes the column of the one-step matrices built on
top of these weights).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .qarith import qpow
from .report import CheckReport, format_rational
from .state import enum_compositions, reverse_composition


@dataclass(frozen=True)
class ModelParams:
    """Species count and asymmetry parameter; the horizontal capacity is 1."""

    n: int
    q: Fraction
    l: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one species")
        if self.q == 0:
            raise ValueError("q must be nonzero")
        if self.l != 1:
            raise ValueError("only horizontal capacity 1 is implemented")


def unit_composition(j: int, n: int) -> tuple:
    """The horizontal state carrying one slot of color j (0 = empty)."""
    return tuple(1 if i == j else 0 for i in range(n + 1))


def check_pole(q: Fraction, z: Fraction, m: int):
    if qpow(q, m + 1) == z:
        raise ValueError(f"spectral parameter hits the weight pole: q^{m + 1} == z")


def s_entry(params: ModelParams, m: int, z: Fraction, j: int, beta: tuple,
            k: int, delta: tuple) -> Fraction:
    """Weight of the transition (j, beta) -> (k, delta) at capacity m."""
    n = params.n
    q = params.q
    if len(beta) != n + 1 or len(delta) != n + 1:
        raise ValueError("compositions must have n+1 entries")
    if sum(beta) != m or sum(delta) != m:
        raise ValueError("compositions must fill the site capacity")
    check_pole(q, z, m)
    # conservation: j + beta == k + delta color by color
    for i in range(n + 1):
        if beta[i] + (1 if i == j else 0) != delta[i] + (1 if i == k else 0):
            return Fraction(0)
    return _case_weight(n, q, z, m, j, beta, k)


@lru_cache(maxsize=None)
def _case_weight(n: int, q: Fraction, z: Fraction, m: int, j: int,
                 beta: tuple, k: int) -> Fraction:
    suffix = 0
    cum = [0] * (n + 2)      # cum[i] = beta_i + ... + beta_n
    for i in range(n, -1, -1):
        suffix += beta[i]
        cum[i] = suffix
    if k == j:
        num = qpow(q, 2 * cum[k] - m + 1) * (1 - qpow(q, -2 * beta[k] + m - 1) * z)
    elif k < j:
        num = -qpow(q, 2 * cum[k + 1] - m + 1) * (1 - qpow(q, 2 * beta[k]))
    else:
        num = -qpow(q, 2 * cum[k + 1]) * z * (1 - qpow(q, 2 * beta[k]))
    return num / (qpow(q, m + 1) - z)


@lru_cache(maxsize=None)
def vertex_outcomes(params: ModelParams, m: int, z: Fraction, j: int,
                    beta: tuple) -> tuple:
    """Nonzero outcomes ((k, delta, weight), ...) for one input pair.

    The output composition is forced by conservation once k is chosen, so
    at most n+1 branches exist; branches with zero weight are dropped.
    """
    n = params.n
    check_pole(params.q, z, m)
    out = []
    for k in range(n + 1):
        if k != j and beta[k] == 0:
            continue
        delta = list(beta)
        delta[j] += 1
        delta[k] -= 1
        w = _case_weight(n, params.q, z, m, j, beta, k)
        if w != 0:
            out.append((k, tuple(delta), w))
    return tuple(out)


class SMatrix:
    """Full vertex matrix at one capacity, with canonical index order."""

    def __init__(self, params: ModelParams, m: int, z: Fraction):
        self.params = params
        self.m = m
        self.z = z
        n = params.n
        self.h_states = [unit_composition(j, n) for j in range(n + 1)]
        self.v_states = list(enum_compositions(n, m))
        self.inputs = [(j, beta) for j in range(n + 1) for beta in self.v_states]
        self.rows = {}
        for j, beta in self.inputs:
            outcomes = vertex_outcomes(params, m, z, j, beta)
            total = sum(w for _, _, w in outcomes)
            if total != 1:
                raise AssertionError(
                    f"output weights for input ({j}, {beta}) sum to "
                    f"{format_rational(total)}, not 1"
                )
            self.rows[(j, beta)] = {(k, delta): w for k, delta, w in outcomes}

    def entry(self, j, beta, k, delta) -> Fraction:
        return self.rows[(j, beta)].get((k, delta), Fraction(0))

    def iter_entries(self):
        for (j, beta), outs in self.rows.items():
            for (k, delta), w in outs.items():
                yield j, beta, k, delta, w


def s_matrix(params: ModelParams, m: int, z: Fraction) -> SMatrix:
    return SMatrix(params, m, z)


def check_charge_reversal(params: ModelParams, m: int, z: Fraction) -> CheckReport:
    """Reversing all colors in both index pairs inverts q and z.

    Checked entrywise over the full input/output grid; the discrepancy is
    required to be exactly zero.
    """
    if z == 0:
        raise ValueError("z must be nonzero to invert")
    n = params.n
    inv = ModelParams(n, 1 / params.q)
    report = CheckReport(
        name="charge-reversal",
        params={"n": n, "m": m, "q": format_rational(params.q), "z": format_rational(z)},
    )
    for beta in enum_compositions(n, m):
        for j in range(n + 1):
            for k, delta, w in vertex_outcomes(params, m, z, j, beta):
                w_rev = s_entry(
                    inv, m, 1 / z,
                    n - j, reverse_composition(beta),
                    n - k, reverse_composition(delta),
                )
                if w_rev != w:
                    report.record_failure(
                        {"j": j, "beta": beta, "k": k, "delta": delta},
                        w, w_rev,
                    )
    return report


def nonnegative_regime(params: ModelParams, capacities, z_values) -> tuple:
    """Probe whether every vertex weight is >= 0 for the given capacities.

    Returns (ok, offenders), where offenders lists up to 10 negative
    entries.  Must pass before any Monte Carlo sampling.
    """
    offenders = []
    for m in sorted(set(capacities)):
        for z in set(z_values):
            for beta in enum_compositions(params.n, m):
                for j in range(params.n + 1):
                    for k, delta, w in vertex_outcomes(params, m, z, j, beta):
                        if w < 0 and len(offenders) < 10:
                            offenders.append((m, format_rational(z), j, beta, k, delta,
                                              format_rational(w)))
    return (not offenders), offenders
