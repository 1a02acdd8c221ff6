"""Certificate synthesis by bisection on lambda with an exact LP at each probe.

For a fixed lambda the polynomial inequality is linear in the coefficient
values, and the feasible set only grows with lambda, so the smallest
feasible lambda can be bracketed by bisection.  Each probe tries every
normalisation ``a_j* >= 1`` (``j* = 1..k``), which also supplies the lower
bound witness ``A_j* = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .contraction import (
    AlmostPolynomialCertificate,
    CoefficientFamily,
    PairTable,
    PolynomialCertificate,
    verify_almost_polynomial,
    verify_polynomial,
)
from .errors import InputError
from .lp import FeasibilityProblem, lp_feasible
from .mapping import TableMap
from .metricspace import FiniteMetricSpace, power_distance
from .rational import format_rational, parse_rational

DEFAULT_LAMBDA_TOL = Fraction(1, 2**20)

FOUND = "found"
INFEASIBLE = "infeasible-below-one"


@dataclass(frozen=True)
class SynthesisResult:
    status: str
    lam: Optional[Fraction]
    certificate: Optional[PolynomialCertificate]
    probes: tuple = field(default=())  # (lambda, feasible)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_dict(self) -> dict:
        cert = None
        if self.certificate is not None:
            c = self.certificate
            cert = {
                "lambda": format_rational(c.lam),
                "k": c.family.k,
                "a": c.family.describe(),
                "j": c.witness_j,
                "A_j": format_rational(c.witness_Aj),
            }
            if isinstance(c, AlmostPolynomialCertificate):
                cert["L"] = [format_rational(v) for v in c.L]
        return {
            "status": self.status,
            "lambda": None if self.lam is None else format_rational(self.lam),
            "certificate": cert,
            "probes": [{"lambda": format_rational(l), "feasible": ok} for l, ok in self.probes],
        }


def _require_finite(space, T):
    if not isinstance(space, FiniteMetricSpace) or not isinstance(T, TableMap):
        raise InputError("certificate synthesis is only supported on finite spaces")


def _bisect(probe, lambda_tol: Fraction):
    """Smallest feasible dyadic probe in (0, 1 - tol]; ``probe(lam)`` returns a witness or None."""
    if lambda_tol <= 0 or lambda_tol >= 1:
        raise InputError("lambda_tol must lie in (0, 1)")
    hi = 1 - lambda_tol
    history = []
    best = probe(hi)
    history.append((hi, best is not None))
    if best is None:
        return None, None, tuple(history)
    lo = Fraction(0)
    while hi - lo > lambda_tol:
        mid = (lo + hi) / 2
        w = probe(mid)
        history.append((mid, w is not None))
        if w is None:
            lo = mid
        else:
            hi, best = mid, w
    return hi, best, tuple(history)


def _poly_problem_full(space, T, k, lam, jstar):
    pts = space.points
    prob = FeasibilityProblem()
    var = {}
    for i in range(k + 1):
        for p in pts:
            for q in pts:
                var[i, p, q] = prob.add_variable(f"a{i}[{p},{q}]")
    for p in pts:
        for q in pts:
            tp, tq = T(p), T(q)
            row = {}
            for i in range(k + 1):
                v = var[i, tp, tq]
                row[v] = row.get(v, 0) + power_distance(space, i, tp, tq)
                v = var[i, p, q]
                row[v] = row.get(v, 0) - lam * power_distance(space, i, p, q)
            prob.add(row, "<=", 0)
            prob.add({var[jstar, p, q]: 1}, ">=", 1)
    return prob, var


def _poly_problem_constant(space, T, k, lam, jstar):
    pts = space.points
    prob = FeasibilityProblem()
    var = {i: prob.add_variable(f"a{i}") for i in range(1, k + 1)}
    rows = set()
    for p in pts:
        for q in pts:
            tp, tq = T(p), T(q)
            row = tuple(
                power_distance(space, i, tp, tq) - lam * power_distance(space, i, p, q) for i in range(1, k + 1)
            )
            rows.add(row)
    for row in sorted(rows):
        prob.add({var[i]: c for i, c in zip(range(1, k + 1), row)}, "<=", 0)
    prob.add({var[jstar]: 1}, ">=", 1)
    return prob, var


def synthesize_polynomial(
    space, T, k: int, mode: str = "full", lambda_tol=DEFAULT_LAMBDA_TOL
) -> SynthesisResult:
    """Search for a polynomial-contraction certificate of degree ``k``.

    ``mode="full"`` treats every ``a_i(p, q)`` as a free variable;
    ``mode="constant"`` uses constants ``a_1..a_k`` with ``a_0 = 0``.
    """
    _require_finite(space, T)
    if not isinstance(k, int) or k < 1:
        raise InputError(f"k must be an integer >= 1, got {k!r}")
    if mode not in ("full", "constant"):
        raise InputError(f"mode must be 'full' or 'constant', got {mode!r}")
    lambda_tol = parse_rational(lambda_tol)

    def probe(lam):
        for jstar in range(1, k + 1):
            if mode == "full":
                prob, var = _poly_problem_full(space, T, k, lam, jstar)
            else:
                prob, var = _poly_problem_constant(space, T, k, lam, jstar)
            res = lp_feasible(prob)
            if res.feasible:
                x = res.assignment
                if mode == "full":
                    coeffs = [
                        PairTable.from_matrix([[x[var[i, p, q]] for q in space.points] for p in space.points])
                        for i in range(k + 1)
                    ]
                else:
                    coeffs = [Fraction(0)] + [x[var[i]] for i in range(1, k + 1)]
                return jstar, CoefficientFamily(k, tuple(coeffs))
        return None

    lam, best, history = _bisect(probe, lambda_tol)
    if best is None:
        return SynthesisResult(INFEASIBLE, None, None, history)
    jstar, family = best
    cert = PolynomialCertificate(lam, family, jstar, Fraction(1))
    return SynthesisResult(FOUND, lam, cert, history)


def _almost_problem(space, T, k, lam, jstar, lambda_tol, bump=()):
    pts = space.points
    prob = FeasibilityProblem()
    a = {i: prob.add_variable(f"a{i}") for i in range(1, k + 1)}
    b = {i: prob.add_variable(f"b{i}") for i in range(1, k + 1)}
    rows = set()
    for p in pts:
        for q in pts:
            tp, tq = T(p), T(q)
            row = tuple(
                power_distance(space, i, tp, tq) - lam * power_distance(space, i, p, q) for i in range(1, k + 1)
            ) + tuple(-lam * power_distance(space, i, q, tp) for i in range(1, k + 1))
            rows.add(row)
    for row in sorted(rows):
        coeffs = {a[i]: row[i - 1] for i in range(1, k + 1)}
        coeffs.update({b[i]: row[k + i - 1] for i in range(1, k + 1)})
        prob.add(coeffs, "<=", 0)
    prob.add({a[jstar]: 1}, ">=", 1)
    for i in range(1, k + 1):
        prob.add({b[i]: 1}, ">=", lambda_tol)
    for i in bump:
        prob.add({a[i]: 1}, ">=", lambda_tol)
    return prob, a, b


def synthesize_almost(space, T, k: int, lambda_tol=DEFAULT_LAMBDA_TOL) -> SynthesisResult:
    """Search for constant ``a_1..a_k``, ``L_1..L_k`` (with ``a_0 = 0``) satisfying

    ``sum a_i d^i(Tx,Ty) <= lam * sum a_i [d^i(x,y) + L_i d^i(y,Tx)]``.

    The LP runs in ``(a_i, b_i = a_i L_i)``; ``L_i = b_i / a_i``.  A witness
    with some ``a_i = 0`` is re-solved once with ``a_i >= lambda_tol``.
    ``L_0`` is irrelevant because ``a_0 = 0``; it is reported as 1.
    """
    _require_finite(space, T)
    if not isinstance(k, int) or k < 1:
        raise InputError(f"k must be an integer >= 1, got {k!r}")
    lambda_tol = parse_rational(lambda_tol)

    def probe(lam):
        for jstar in range(1, k + 1):
            prob, a, b = _almost_problem(space, T, k, lam, jstar, lambda_tol)
            res = lp_feasible(prob)
            if not res.feasible:
                continue
            x = res.assignment
            zero = [i for i in a if x[a[i]] == 0]
            if zero:
                prob, a, b = _almost_problem(space, T, k, lam, jstar, lambda_tol, bump=zero)
                res = lp_feasible(prob)
                if not res.feasible:
                    continue
                x = res.assignment
            coeffs = (Fraction(0),) + tuple(x[a[i]] for i in range(1, k + 1))
            L = (Fraction(1),) + tuple(x[b[i]] / x[a[i]] for i in range(1, k + 1))
            return jstar, CoefficientFamily(k, coeffs), L
        return None

    lam, best, history = _bisect(probe, lambda_tol)
    if best is None:
        return SynthesisResult(INFEASIBLE, None, None, history)
    jstar, family, L = best
    cert = AlmostPolynomialCertificate(lam, family, jstar, Fraction(1), L)
    return SynthesisResult(FOUND, lam, cert, history)


def reverify(space, T, result: SynthesisResult):
    """Re-run the matching verifier on a synthesised certificate."""
    if not result.found:
        raise InputError("nothing to re-verify")
    if isinstance(result.certificate, AlmostPolynomialCertificate):
        return verify_almost_polynomial(space, T, result.certificate)
    return verify_polynomial(space, T, result.certificate)
