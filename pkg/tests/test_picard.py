import random
from fractions import Fraction

import mpmath
import pytest

from oracles import random_problem
from polycontract import (
    AlmostPolynomialCertificate,
    CoefficientFamily,
    InputError,
    TableMap,
    apriori_bound,
    check_bound_against_trace,
    check_lower_bound_condition,
    discrete_space,
    fixed_points,
    is_weakly_picard,
    iterate,
    sigma_j0,
    synthesize_almost,
    synthesize_polynomial,
    verify_almost_polynomial,
    verify_polynomial,
)
from polycontract.demos import document
from polycontract.picard import CONVERGED, CYCLE, MAX_ITER


def test_sigma_examples():
    doc = document("ex2.7")
    assert sigma_j0(doc.space, doc.T, doc.family, 1, 1, "x2") == 4
    assert sigma_j0(doc.space, doc.T, doc.family, 1, 1, "x1") == 0
    assert sigma_j0(doc.space, doc.T, doc.family, 1, 2, "x2") == 2
    with pytest.raises(InputError):
        sigma_j0(doc.space, doc.T, doc.family, 1, 0, "x2")


def test_iterate_examples():
    doc = document("ex2.7")
    t = iterate(doc.space, doc.T, "x2")
    assert t.iterates == ("x2", "x3", "x4", "x1", "x1") and t.limit == "x1" and t.steps == 3
    assert t.status == CONVERGED and t.dist_to_limit == (1, 1, 1, 0, 0)
    doc = document("ex2.10")
    t = iterate(doc.space, doc.T, Fraction(1))
    assert t.iterates == (1, 0, Fraction(1, 4), Fraction(1, 4)) and t.limit == Fraction(1, 4)
    t = iterate(doc.space, doc.T, Fraction(1, 4))
    assert t.iterates == (Fraction(1, 4), Fraction(1, 4)) and t.steps == 0


def test_iterate_trace_invariants():
    rng = random.Random(31)
    for _ in range(200):
        X, T = random_problem(rng, 1, 7)
        z0 = rng.choice(X.points)
        t = iterate(X, T, z0)
        assert all(T(a) == b for a, b in zip(t.iterates, t.iterates[1:]))
        assert t.step_dist == tuple(X.d(a, b) for a, b in zip(t.iterates, t.iterates[1:]))
        if t.converged:
            assert T(t.limit) == t.limit
        else:
            assert t.status == CYCLE and fixed_points(T) != {t.iterates[-1]}


def test_iterate_stops_on_cycle_and_max_iter():
    X = discrete_space(["x1", "x2"])
    swap = TableMap(X, {"x1": "x2", "x2": "x1"})
    assert iterate(X, swap, "x1").status == CYCLE
    doc = document("ex2.10")
    t = iterate(doc.space, doc.T, Fraction(1), max_iter=1)
    assert t.status == MAX_ITER and t.limit is None


def test_iterate_tolerance_on_grid():
    doc = document("ex2.10")
    t = iterate(doc.space, doc.T, Fraction(1), tolerance=Fraction(1))
    assert t.converged and t.iterates == (1, 0)
    with pytest.raises(InputError):
        iterate(doc.space, doc.T, Fraction(2))
    with pytest.raises(InputError):
        iterate(doc.space, doc.T, Fraction(1), tolerance=-1)


def test_apriori_bound_examples():
    assert apriori_bound(0, 1, Fraction(3, 4), 4) == 16
    assert apriori_bound(2, 1, Fraction(3, 4), 4) == 9
    assert all(apriori_bound(n, 1, Fraction(1, 2), 0) == 0 for n in range(5))
    b = apriori_bound(3, 2, Fraction(1, 2), 2)
    with mpmath.workprec(120):
        exact = mpmath.sqrt(mpmath.mpf(2) / mpmath.mpf(1 / 2) * mpmath.mpf(1) / 8)
    assert abs(b - exact) < mpmath.mpf(2) ** -80
    with pytest.raises(InputError):
        apriori_bound(0, 1, 1, 1)


def test_bound_check_examples():
    doc = document("ex2.7")
    t = iterate(doc.space, doc.T, "x2")
    rep = check_bound_against_trace(t, 1, Fraction(3, 4), 4)
    assert rep.ok and rep.hard
    assert [r[2] for r in rep.rows[:3]] == [16, 12, 9]
    assert [r[1] for r in rep.rows] == [1, 1, 1, 0, 0]
    t = iterate(doc.space, doc.T, "x1")
    assert check_bound_against_trace(t, 1, Fraction(3, 4), 0).ok
    doc = document("ex2.10")
    t = iterate(doc.space, doc.T, Fraction(1))
    sigma = sigma_j0(doc.space, doc.T, doc.family, 1, 1, Fraction(1))
    assert check_bound_against_trace(t, 1, Fraction(1, 2), sigma).ok


def test_bound_check_reports_violations_and_refuses_divergent_traces():
    doc = document("ex2.7")
    t = iterate(doc.space, doc.T, "x2")
    rep = check_bound_against_trace(t, 2, Fraction(1, 100), Fraction(1, 100))
    assert not rep.ok and not rep.hard and rep.violations
    X = discrete_space(["x1", "x2"])
    t = iterate(X, TableMap(X, {"x1": "x2", "x2": "x1"}), "x1")
    with pytest.raises(InputError):
        check_bound_against_trace(t, 1, Fraction(1, 2), 1)


def forest_problem(rng, n):
    """Random map whose orbits all end at x1 (a contraction candidate)."""
    X, _ = random_problem(rng, n, n)
    pts = X.points
    table = {pts[0]: pts[0]}
    for i in range(1, n):
        table[pts[i]] = pts[rng.randrange(i)]
    return X, TableMap(X, table)


def test_polynomial_contractions_have_a_unique_attracting_fixed_point():
    rng = random.Random(32)
    checked = 0
    for _ in range(25):
        n = rng.randint(1, 4)
        X, T = forest_problem(rng, n) if rng.random() < 0.7 else random_problem(rng, 1, 4)
        res = synthesize_polynomial(X, T, rng.randint(1, 2), mode=rng.choice(["full", "constant"]), lambda_tol=Fraction(1, 64))
        if not res.found:
            continue
        cert = res.certificate
        assert verify_polynomial(X, T, cert).passed
        A = check_lower_bound_condition(X, cert.family, cert.witness_j)
        assert A is not None and A >= cert.witness_Aj
        fixed = fixed_points(T)
        assert len(fixed) == 1
        for z in X.points:
            t = iterate(X, T, z)
            assert t.converged and {t.limit} == fixed
            j = cert.witness_j
            sigma = sigma_j0(X, T, cert.family, j, cert.witness_Aj, z)
            rep = check_bound_against_trace(t, j, cert.lam, sigma)
            assert not rep.step_violations
            if j == 1:
                assert rep.ok
        checked += 1
    assert checked >= 10


def test_almost_polynomial_contractions_with_zero_a0_are_weakly_picard():
    rng = random.Random(33)
    checked = 0
    for _ in range(200):
        X, T = random_problem(rng, 1, 5)
        k = rng.randint(1, 2)
        fam = CoefficientFamily(k, (Fraction(0),) + tuple(Fraction(rng.randint(0, 3)) for _ in range(k)))
        if all(c == 0 for c in fam.coeffs):
            continue
        L = tuple(Fraction(rng.randint(1, 8), 2) for _ in range(k + 1))
        cert = AlmostPolynomialCertificate(Fraction(rng.randint(1, 9), 10), fam, L=L)
        if verify_almost_polynomial(X, T, cert).passed:
            checked += 1
            assert is_weakly_picard(T).passed
            assert all(iterate(X, T, z).limit in fixed_points(T) for z in X.points)
    for _ in range(15):
        X, T = random_problem(rng, 1, 4)
        res = synthesize_almost(X, T, 1, lambda_tol=Fraction(1, 64))
        if res.found:
            checked += 1
            assert is_weakly_picard(T).passed
    assert checked >= 10


def test_positive_constant_a0_breaks_the_weakly_picard_conclusion():
    # with d^0 = 1 the a_0 L_0 term never vanishes along an orbit, so a map
    # with no fixed point can satisfy the almost-polynomial inequality
    X = discrete_space(["x1", "x2"])
    swap = TableMap(X, {"x1": "x2", "x2": "x1"})
    cert = AlmostPolynomialCertificate(Fraction(1, 2), CoefficientFamily.of(1, 1), L=(2, 1))
    assert verify_almost_polynomial(X, swap, cert).passed
    assert not is_weakly_picard(swap).passed
