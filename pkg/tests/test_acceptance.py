"""Acceptance criteria, one test per criterion.

Every check is exact rational arithmetic with zero tolerance, except the
synthesis criterion, which allows the bisection tolerance 2^-20.  Each test
records a PASS/FAIL line; the lines are printed in the pytest terminal
summary, and ``python3 tests/test_acceptance.py`` prints them directly.
"""

from __future__ import annotations

import random
import sys
from fractions import Fraction

from oracles import brute_max_ratio, brute_orbit_limit, random_problem, vertex_feasible
from polycontract import (
    AlmostPolynomialCertificate,
    CoefficientFamily,
    PolynomialCertificate,
    fixed_points,
    is_picard_continuous,
    is_weakly_picard,
    iterate,
    lp_feasible,
    pair_values,
    sigma_j0,
    synthesize_almost,
    synthesize_polynomial,
    validate_metric,
    verify_almost_contraction,
    verify_almost_polynomial,
    verify_banach,
    verify_polynomial,
)
from polycontract.certsearch import reverify
from polycontract.demos import PUBLISHED_ALMOST_ROWS, PUBLISHED_POLYNOMIAL_ROWS, document
from polycontract.picard import check_bound_against_trace
from polycontract.rational import format_rational as fmt

LAMBDA_TOL = Fraction(1, 2**20)
RESULTS: list = []


def record(label: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    assert ok, detail


def test_criterion_01_polynomial_table():
    doc = document("ex2.7")
    vals = {(pv.x, pv.y): pv for pv in pair_values(doc.space, doc.T, doc.family)}
    rows_ok = all((vals[pair].lhs, vals[pair].rhs) == (lhs, rhs) for pair, lhs, rhs in PUBLISHED_POLYNOMIAL_ROWS)
    ratios = [vals[pair].lhs / vals[pair].rhs for pair, _, _ in PUBLISHED_POLYNOMIAL_ROWS]
    v = verify_polynomial(doc.space, doc.T, doc.certificate)
    ok = (
        rows_ok
        and ratios == [Fraction(3, 4), Fraction(2, 3), Fraction(3, 4), Fraction(3, 7), Fraction(2, 3)]
        and v.passed
        and v.min_feasible_lambda == Fraction(3, 4)
    )
    record("1 polynomial table", ok, f"ratios {[fmt(r) for r in ratios]}, worst {fmt(v.min_feasible_lambda)}, verify {v.status} at 3/4")


def test_criterion_02_banach_inapplicable():
    doc = document("ex2.7")
    v = verify_banach(doc.space, doc.T)
    ok = v.min_feasible_lambda == 1 and not v.passed
    record("2 Banach ratio", ok, f"ratio {fmt(v.min_feasible_lambda)} at {v.worst_pair}")


def test_criterion_03_non_metric_witness():
    doc = document("ex2.7")
    X = doc.space
    a0 = doc.family.coeffs[0].matrix
    D = [[X.dist[i][j] + a0[i][j] for j in range(len(X))] for i in range(len(X))]
    w = validate_metric(D, X.points).violation
    ok = w is not None and w.kind == "triangle" and w.witness == ("x2", "x1", "x4") and (w.left, w.right) == (7, 6)
    record("3 non-metric witness", ok, f"{w.kind} at {w.witness}: {w.left} > {w.right}" if w else "no violation")


def test_criterion_04_almost_table():
    doc = document("ex3.6")
    vals = {(pv.x, pv.y): pv for pv in pair_values(doc.space, doc.T, doc.family, L=doc.certificate.L)}
    rows_ok = all((vals[pair].lhs, vals[pair].rhs) == (lhs, rhs) for pair, lhs, rhs in PUBLISHED_ALMOST_ROWS)
    v = verify_almost_polynomial(doc.space, doc.T, doc.certificate)
    ok = rows_ok and v.passed and doc.certificate.lam == Fraction(2, 3)
    record("4 almost-polynomial table", ok, f"4 ordered pairs lhs 2 / rhs 3: {rows_ok}, verify {v.status} at 2/3")


def test_criterion_05_weakly_picard_two_limits():
    doc = document("ex3.6")
    X, T = doc.space, doc.T
    limits = {z: iterate(X, T, z).limit for z in ("x3", "x2")}
    ok = fixed_points(T) == {"x1", "x2"} and is_weakly_picard(T).passed and limits["x3"] != limits["x2"]
    record("5 weakly Picard", ok, f"fixed {sorted(fixed_points(T))}, limits x3->{limits['x3']}, x2->{limits['x2']}")


def test_criterion_06_unique_fixed_point_and_bound():
    doc = document("ex2.7")
    X, T, cert = doc.space, doc.T, doc.certificate
    traces = {z: iterate(X, T, z) for z in X.points}
    converge = all(t.limit == "x1" and t.steps <= 3 for t in traces.values())
    sigma = sigma_j0(X, T, doc.family, 1, 1, "x2")
    rep = check_bound_against_trace(traces["x2"], 1, Fraction(3, 4), sigma)
    bounds = [b for _, _, b in rep.rows]
    ok = converge and sigma == 4 and rep.ok and bounds[:3] == [16, 12, 9] and cert.lam == Fraction(3, 4)
    record("6 unique fixed point + bound", ok, f"all starts -> x1 in <= 3 steps: {converge}, sigma {fmt(sigma)}, bounds {[fmt(b) for b in bounds]}")


def test_criterion_07_grid_polynomial():
    doc = document("ex2.10")
    S, T = doc.space, doc.T
    v = verify_polynomial(S, T, doc.certificate)
    t = iterate(S, T, Fraction(1))
    ok = (
        S.grid_count == 1001
        and v.passed
        and v.pairs_checked == 1001**2
        and doc.certificate.lam == Fraction(1, 2)
        and t.limit == Fraction(1, 4)
        and t.steps <= 3
    )
    record("7 grid polynomial", ok, f"{v.pairs_checked} pairs {v.status} at 1/2, orbit from 1 -> {fmt(t.limit)} in {t.steps} steps")


def test_criterion_08_grid_almost_polynomial():
    doc = document("ex3.7")
    S, T, cert = doc.space, doc.T, doc.certificate
    v = verify_almost_polynomial(S, T, cert)
    one = Fraction(1)
    case2 = pair_values(S, T, doc.family, L=cert.L, pairs=[(x, one) for x in S.points[:-1]])
    tight = all(pv.lhs == Fraction(3, 4) == S.d(pv.y, T(pv.x)) for pv in case2)
    ok = v.passed and v.pairs_checked == 1001**2 and cert.L == (1, 1) and cert.lam == Fraction(1, 2) and tight
    record("8 grid almost-polynomial", ok, f"{v.pairs_checked} pairs {v.status} at 1/2; lhs = d(y,Tx) = 3/4 at all {len(case2)} pairs (x,1): {tight}")


def test_criterion_09_synthesis_round_trip():
    doc = document("ex2.7")
    full = synthesize_polynomial(doc.space, doc.T, 1, mode="full", lambda_tol=LAMBDA_TOL)
    const = synthesize_polynomial(doc.space, doc.T, 1, mode="constant", lambda_tol=LAMBDA_TOL)
    d36 = document("ex3.6")
    almost = synthesize_almost(d36.space, d36.T, 2, lambda_tol=LAMBDA_TOL)
    ok = (
        full.found
        and full.lam <= Fraction(3, 4) + LAMBDA_TOL
        and reverify(doc.space, doc.T, full).passed
        and const.status == "infeasible-below-one"
        and almost.found
        and almost.lam <= Fraction(2, 3) + LAMBDA_TOL
        and reverify(d36.space, d36.T, almost).passed
    )
    record(
        "9 synthesis round-trip",
        ok,
        f"full {full.status} lambda {fmt(full.lam)}, constant {const.status}, almost {almost.status} lambda {fmt(almost.lam)}",
    )


def test_criterion_10a_constant_family_is_banach():
    rng = random.Random(101)
    mismatches = 0
    for _ in range(200):
        X, T = random_problem(rng, 1, 6)
        brute, _ = brute_max_ratio((X.d(T(p), T(q)), X.d(p, q)) for p in X.points for q in X.points)
        brute = brute or Fraction(0)
        cert = PolynomialCertificate(Fraction(1, 2), CoefficientFamily.of(0, 1))
        poly = verify_polynomial(X, T, cert).min_feasible_lambda
        banach = verify_banach(X, T).min_feasible_lambda
        syn = synthesize_polynomial(X, T, 1, mode="constant", lambda_tol=LAMBDA_TOL)
        syn_ok = (syn.found and brute <= syn.lam <= brute + LAMBDA_TOL) if brute <= 1 - LAMBDA_TOL else not syn.found
        mismatches += not (poly == banach == brute and syn_ok)
    record("10a constant k=1 = Banach", mismatches == 0, f"{mismatches} mismatches in 200 random maps")


def test_criterion_10b_almost_reduces_to_berinde():
    rng = random.Random(102)
    mismatches = 0
    for _ in range(200):
        X, T = random_problem(rng, 1, 6)
        lam = Fraction(rng.randint(1, 19), 20)
        ell = Fraction(rng.randint(1, 12), rng.randint(1, 4))
        cert = AlmostPolynomialCertificate(lam, CoefficientFamily.of(0, 1), L=(1, ell / lam))
        mismatches += verify_almost_polynomial(X, T, cert).passed != verify_almost_contraction(X, T, lam, ell).passed
    record("10b almost k=1 = almost contraction", mismatches == 0, f"{mismatches} mismatches in 200 random instances")


def test_criterion_10c_finite_maps_are_picard_continuous():
    rng = random.Random(103)
    failures = 0
    for _ in range(500):
        X, T = random_problem(rng, 1, 8)
        v = is_picard_continuous(T)
        limits_ok = all(v.limits[z] == brute_orbit_limit(T, z, 4 * len(X)) for z in X.points)
        failures += not (v.passed and limits_ok)
    record("10c Picard-continuity of finite maps", failures == 0, f"{failures} failures in 500 random maps")


def test_criterion_10d_lp_matches_vertex_enumeration():
    from test_lp import random_system, to_problem

    rng = random.Random(104)
    mismatches = feasible = 0
    for _ in range(100):
        n, rows = random_system(rng)
        prob = to_problem(n, rows)
        res = lp_feasible(prob)
        feasible += res.feasible
        mismatches += res.feasible != vertex_feasible(n, rows) or (res.feasible and not prob.is_satisfied_by(res.assignment))
    record("10d LP vs vertex enumeration", mismatches == 0, f"{mismatches} mismatches in 100 systems ({feasible} feasible)")


def test_criterion_10e_monotone_in_lambda():
    from test_contraction import random_family

    rng = random.Random(105)
    lams = [Fraction(i, 16) for i in range(1, 16)]
    violations = 0
    for _ in range(60):
        X, T = random_problem(rng, 1, 5)
        fam = random_family(rng, X, rng.randint(1, 2))
        L = tuple(Fraction(rng.randint(1, 4)) for _ in range(fam.k + 1))
        ell = Fraction(rng.randint(1, 4), 4)
        for check in (
            lambda lam: verify_polynomial(X, T, PolynomialCertificate(lam, fam)).passed,
            lambda lam: verify_almost_polynomial(X, T, AlmostPolynomialCertificate(lam, fam, L=L)).passed,
            lambda lam: verify_almost_contraction(X, T, lam, ell).passed,
        ):
            results = [check(lam) for lam in lams]
            violations += results != sorted(results)
    record("10e monotone in lambda", violations == 0, f"{violations} non-monotone verdict sequences in 180")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    print("\n".join(RESULTS))
    sys.exit(1 if failed else 0)
