"""Exact linear feasibility: phase-1 simplex over the rationals.

Variables are non-negative.  Bland's rule (lowest index enters, lowest
basic index leaves on ratio ties) guarantees termination on degenerate
problems; all arithmetic is ``Fraction`` so a returned witness satisfies
every constraint exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InputError
from .rational import parse_rational

SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class Constraint:
    coeffs: dict  # variable name -> coefficient
    sense: str
    rhs: Fraction

    def satisfied_by(self, x: dict) -> bool:
        lhs = sum((c * x.get(v, 0) for v, c in self.coeffs.items()), Fraction(0))
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class FeasibilityProblem:
    """``{x >= 0 : every constraint holds}``."""

    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)

    def add_variable(self, name: str) -> str:
        if name in self.variables:
            raise InputError(f"duplicate variable {name!r}")
        self.variables.append(name)
        return name

    def add(self, coeffs: dict, sense: str, rhs=0) -> None:
        if sense not in SENSES:
            raise InputError(f"constraint sense must be one of {SENSES}, got {sense!r}")
        unknown = set(coeffs) - set(self.variables)
        if unknown:
            raise InputError(f"constraint uses undeclared variables {sorted(unknown)}")
        clean = {v: parse_rational(c) for v, c in coeffs.items()}
        self.constraints.append(Constraint({v: c for v, c in clean.items() if c != 0}, sense, parse_rational(rhs)))

    def is_satisfied_by(self, x: dict) -> bool:
        return all(x.get(v, 0) >= 0 for v in self.variables) and all(c.satisfied_by(x) for c in self.constraints)


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    assignment: Optional[dict] = None
    pivots: int = 0

    def __bool__(self) -> bool:
        return self.feasible


def lp_feasible(problem: FeasibilityProblem, max_pivots: int = 100_000) -> LPResult:
    """Decide feasibility exactly; return a witness assignment when feasible."""
    names = list(problem.variables)
    col = {v: i for i, v in enumerate(names)}
    n = len(names)
    m = len(problem.constraints)

    # columns: originals | one slack/surplus per inequality | artificials
    rows, rhs, basis = [], [], []
    n_slack = sum(1 for c in problem.constraints if c.sense != "==")
    slack_at = n
    art_at = n + n_slack
    needs_art = []
    for con in problem.constraints:
        row = [Fraction(0)] * (n + n_slack)
        for v, c in con.coeffs.items():
            row[col[v]] = c
        b = con.rhs
        slack_col = None
        if con.sense != "==":
            slack_col = slack_at
            row[slack_col] = Fraction(1 if con.sense == "<=" else -1)
            slack_at += 1
        if b < 0:
            row = [-a for a in row]
            b = -b
        rows.append(row)
        rhs.append(b)
        if slack_col is not None and row[slack_col] == 1:
            basis.append(slack_col)
            needs_art.append(False)
        else:
            basis.append(None)
            needs_art.append(True)

    n_art = sum(needs_art)
    width = n + n_slack + n_art
    a = art_at
    for i in range(m):
        rows[i].extend([Fraction(0)] * n_art)
        if needs_art[i]:
            rows[i][a] = Fraction(1)
            basis[i] = a
            a += 1

    # phase-1 objective: minimise the sum of artificials; reduced costs
    cost = [Fraction(0)] * width
    obj = Fraction(0)
    for i in range(m):
        if needs_art[i]:
            for j in range(art_at):
                if rows[i][j]:
                    cost[j] -= rows[i][j]
            obj -= rhs[i]

    pivots = 0
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            aij = rows[i][enter]
            if aij > 0:
                ratio = rhs[i] / aij
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # cannot happen in phase 1 (objective bounded below by 0)
            raise RuntimeError("phase-1 simplex reported unbounded")
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("pivot limit exceeded")
        prow = rows[leave]
        piv = prow[enter]
        if piv != 1:
            prow = [v / piv for v in prow]
            rows[leave] = prow
            rhs[leave] = rhs[leave] / piv
        nz = [j for j, v in enumerate(prow) if v]
        for i in range(m):
            if i != leave:
                f = rows[i][enter]
                if f:
                    r = rows[i]
                    for j in nz:
                        r[j] -= f * prow[j]
                    rhs[i] -= f * rhs[leave]
        f = cost[enter]
        for j in nz:
            cost[j] -= f * prow[j]
        obj -= f * rhs[leave]
        basis[leave] = enter

    if obj != 0:  # obj holds -(sum of artificials)
        return LPResult(False, None, pivots)
    values = [Fraction(0)] * width
    for i, j in enumerate(basis):
        values[j] = rhs[i]
    assignment = {v: values[i] for i, v in enumerate(names)}
    return LPResult(True, assignment, pivots)
