"""Built-in worked examples: documents plus the published reference values.

Each runner executes validate -> verify -> iterate -> bound check and
returns the individual checks together with side-by-side tables of
computed against published values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .contraction import (
    check_lower_bound_condition,
    check_continuity_hypotheses,
    pair_values,
    verify_almost_contraction,
    verify_almost_polynomial,
    verify_banach,
    verify_polynomial,
)
from .document import FORMAT, VERSION, ProblemDocument, from_dict
from .mapping import discretize, fixed_points, is_picard_continuous, is_weakly_picard
from .metricspace import IntervalGridSpace, validate_metric
from .mapping import Branch, PiecewiseMap
from .picard import check_bound_against_trace, iterate, sigma_j0
from .rational import format_rational as fmt

_HEADER = {"format": FORMAT, "version": VERSION}

EX27_A0 = [
    ["x1", "x2", "3"],
    ["x2", "x3", "3"],
    ["x1", "x3", "2"],
    ["x3", "x4", "2"],
    ["x1", "x4", "1"],
    ["x2", "x4", "6"],
]

DOCUMENTS = {
    "ex2.7": {
        **_HEADER,
        "name": "ex2.7",
        "kind": "polynomial",
        "space": {"type": "finite", "points": ["x1", "x2", "x3", "x4"], "metric": "discrete"},
        "map": {"type": "table", "table": {"x1": "x1", "x2": "x3", "x3": "x4", "x4": "x1"}},
        "family": {"k": 1, "a": [{"table": EX27_A0, "symmetric": True}, "1"]},
        "certificate": {"lambda": "3/4", "j": 1, "A_j": "1"},
    },
    "ex2.9": {
        **_HEADER,
        "name": "ex2.9",
        "kind": "banach",
        "space": {"type": "interval", "lo": "0", "hi": "1", "grid": 11},
        "map": {"type": "piecewise", "branches": [{"on": "[0, 1)", "expr": "0"}, {"on": "[1, 1]", "expr": "1/2"}]},
    },
    "ex2.10": {
        **_HEADER,
        "name": "ex2.10",
        "kind": "polynomial",
        "space": {"type": "interval", "lo": "0", "hi": "1", "grid": 1001},
        "map": {"type": "piecewise", "branches": [{"on": "[0, 1)", "expr": "1/4"}, {"on": "[1, 1]", "expr": "0"}]},
        "family": {"k": 1, "a": ["(5/6)*(x*abs(x - 1/4) + y*abs(y - 1/4))", "1"]},
        "certificate": {"lambda": "1/2", "j": 1, "A_j": "1"},
    },
    "ex3.6": {
        **_HEADER,
        "name": "ex3.6",
        "kind": "almost-polynomial",
        "space": {"type": "finite", "points": ["x1", "x2", "x3"], "metric": "discrete"},
        "map": {"type": "table", "table": {"x1": "x1", "x2": "x2", "x3": "x1"}},
        "family": {"k": 2, "a": ["0", "1", "1"]},
        # a_0 = 0, so L_0 never enters; any positive value is admissible
        "certificate": {"lambda": "2/3", "j": 1, "A_j": "1", "L": ["1/2", "1/2", "1/2"]},
    },
    "ex3.7": {
        **_HEADER,
        "name": "ex3.7",
        "kind": "almost-polynomial",
        "space": {"type": "interval", "lo": "0", "hi": "1", "grid": 1001},
        "map": {"type": "piecewise", "branches": [{"on": "[0, 1)", "expr": "1/4"}, {"on": "[1, 1]", "expr": "0"}]},
        "family": {"k": 1, "a": ["abs(4*x^2 - 3*x + 1/2) + abs(4*y^2 - 3*y + 1/2)", "1"]},
        "certificate": {"lambda": "1/2", "j": 1, "A_j": "1", "L": ["1", "1"]},
    },
}

# published (pair, lhs, rhs) rows
PUBLISHED_POLYNOMIAL_ROWS = [(("x1", "x2"), 3, 4), (("x1", "x3"), 2, 3), (("x2", "x3"), 3, 4), (("x2", "x4"), 3, 7), (("x3", "x4"), 2, 3)]
PUBLISHED_ALMOST_ROWS = [(("x1", "x2"), 2, 3), (("x2", "x1"), 2, 3), (("x2", "x3"), 2, 3), (("x3", "x2"), 2, 3)]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class DemoResult:
    name: str
    checks: list = field(default_factory=list)
    tables: list = field(default_factory=list)  # (title, headers, rows)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return passed


def document(name: str) -> ProblemDocument:
    return from_dict(DOCUMENTS[name])


def _table_rows(computed, published):
    rows, ok = [], True
    lookup = {(pv.x, pv.y): pv for pv in computed}
    for pair, lhs, rhs in published:
        pv = lookup[pair]
        match = pv.lhs == lhs and pv.rhs == rhs
        ok &= match
        rows.append([f"({pair[0]},{pair[1]})", fmt(pv.lhs), str(lhs), fmt(pv.rhs), str(rhs), fmt(pv.lhs / pv.rhs), "ok" if match else "MISMATCH"])
    return rows, ok


def _trace_check(res: DemoResult, doc, start, expected_limit, max_steps=None):
    trace = iterate(doc.space, doc.T, start)
    ok = trace.converged and trace.limit == expected_limit and (max_steps is None or trace.steps <= max_steps)
    path = " -> ".join(str(z) if not isinstance(z, Fraction) else fmt(z) for z in trace.iterates)
    res.check(f"orbit from {start} reaches {expected_limit}", ok, f"{path} ({trace.steps} steps)")
    return trace


def run_ex27() -> DemoResult:
    res = DemoResult("ex2.7")
    doc = document("ex2.7")
    X, T, fam, cert = doc.space, doc.T, doc.family, doc.certificate
    res.check("discrete metric is valid", X.validate().valid)

    rows, ok = _table_rows(pair_values(X, T, fam), PUBLISHED_POLYNOMIAL_ROWS)
    res.tables.append(("a0(Tx,Ty)+d(Tx,Ty) vs a0(x,y)+d(x,y), computed and published", ["(i,j)", "lhs", "published", "rhs", "published", "ratio", ""], rows))
    res.check("published pair values reproduced exactly", ok)

    v = verify_polynomial(X, T, cert)
    res.data["verify"] = v.to_dict()
    res.check("polynomial contraction at lambda=3/4", v.passed and v.min_feasible_lambda == Fraction(3, 4),
              f"min feasible lambda {fmt(v.min_feasible_lambda)} at {v.worst_pair}")
    A1 = check_lower_bound_condition(X, fam, 1)
    res.check("lower bound a_1 >= A_1 = 1", A1 == 1, f"A_1 = {A1}")
    hyp = check_continuity_hypotheses(X, fam)
    res.check("continuity hypotheses fail (a_0 is not identically 0)", not hyp.a0_vanishes)

    b = verify_banach(X, T)
    res.check("Banach ratio is exactly 1 (no contraction)", b.min_feasible_lambda == 1 and not b.passed,
              f"ratio {fmt(b.min_feasible_lambda)} at {b.worst_pair}")

    a0 = fam.coeffs[0].matrix
    D = [[X.dist[i][j] + a0[i][j] for j in range(len(X))] for i in range(len(X))]
    mv = validate_metric(D, X.points)
    wit = mv.violation
    res.check("D = d + a_0 is not a metric", not mv.valid and wit.kind == "triangle"
              and wit.witness == ("x2", "x1", "x4") and (wit.left, wit.right) == (7, 6),
              f"D{wit.witness[0], wit.witness[2]} = {wit.left} > {wit.right} via {wit.witness[1]}" if wit else "")

    res.check("fixed points = {x1}", fixed_points(T) == {"x1"})
    for z in X.points:
        _trace_check(res, doc, z, "x1", max_steps=3)
    trace = iterate(X, T, "x2")
    sigma = sigma_j0(X, T, fam, 1, 1, "x2")
    rep = check_bound_against_trace(trace, 1, cert.lam, sigma)
    res.tables.append(("a-priori bound from z0 = x2", ["n", "d(z_n, x1)", "bound"],
                       [[n, fmt(o), fmt(bd)] for n, o, bd in rep.rows]))
    res.check("sigma_1,0 from x2 equals 4", sigma == 4, f"sigma = {fmt(sigma)}")
    res.check("observed distances within the a-priori bound", rep.ok)
    res.check("Picard-continuous", is_picard_continuous(T).passed)
    res.check("weakly Picard", is_weakly_picard(T).passed)
    return res


def run_ex29() -> DemoResult:
    res = DemoResult("ex2.9")
    doc = document("ex2.9")
    S, T = doc.space, doc.T
    finite = discretize(T)
    pc = is_picard_continuous(finite)
    res.check("grid discretisation is Picard-continuous", pc.passed, f"{len(finite.space)} grid points")
    twice = all(T(T(T(z))) == S.lo for z in S.points) and all(T(T(z)) == S.lo for z in S.points)
    res.check("T^n z = a for all n >= 2", twice)
    rows, jumps = [], []
    for n in (11, 101, 1001, 10001):
        g = IntervalGridSpace(S.lo, S.hi, n)
        Tg = PiecewiseMap(g, [Branch.parse(b.interval, b.expr) for b in T.branches])
        h = g.step
        jump = abs(Tg(g.hi) - Tg(g.hi - h))
        jumps.append(jump)
        rows.append([n, fmt(h), fmt(jump)])
    res.tables.append(("jump at b: |T(b) - T(b - h)| as h -> 0", ["grid", "h", "jump"], rows))
    res.check("discontinuous at b (jump does not shrink with h)", all(j == (S.hi - S.lo) / 2 for j in jumps))
    b = verify_banach(S, T)
    res.check("not a Banach contraction on the grid", not b.passed, f"Lipschitz ratio {fmt(b.min_feasible_lambda)}")
    return res


def run_ex210() -> DemoResult:
    res = DemoResult("ex2.10")
    doc = document("ex2.10")
    S, T, fam, cert = doc.space, doc.T, doc.family, doc.certificate
    v = verify_polynomial(S, T, cert)
    res.data["verify"] = v.to_dict()
    res.check(f"polynomial inequality at lambda=1/2 on all {v.pairs_checked} grid pairs", v.passed,
              f"grid-verified; min feasible lambda {fmt(v.min_feasible_lambda)} at ({fmt(v.worst_pair[0])}, {fmt(v.worst_pair[1])})")
    case2 = pair_values(S, T, fam, pairs=[(x, Fraction(1)) for x in (Fraction(0), Fraction(1, 4), Fraction(1, 2))])
    res.check("case x<1, y=1: lhs = 1/4", all(pv.lhs == Fraction(1, 4) for pv in case2))
    res.check("lower bound A_1 = 1", check_lower_bound_condition(S, fam, 1) == 1)
    trace = _trace_check(res, doc, Fraction(1), Fraction(1, 4), max_steps=3)
    sigma = sigma_j0(S, T, fam, 1, 1, Fraction(1))
    rep = check_bound_against_trace(trace, 1, cert.lam, sigma)
    res.tables.append(("a-priori bound from z0 = 1", ["n", "d(z_n, 1/4)", "bound"],
                       [[n, fmt(o), fmt(bd)] for n, o, bd in rep.rows]))
    res.check("observed distances within the a-priori bound", rep.ok, f"sigma = {fmt(sigma)}")
    coarse = PiecewiseMap(IntervalGridSpace(S.lo, S.hi, 101), [Branch.parse(b.interval, b.expr) for b in T.branches])
    res.check("Picard-continuous on a 101-point grid", is_picard_continuous(discretize(coarse)).passed)
    b = verify_banach(S, T)
    res.check("not a Banach contraction (T is discontinuous)", not b.passed, f"grid Lipschitz ratio {fmt(b.min_feasible_lambda)}")
    return res


def run_ex36() -> DemoResult:
    res = DemoResult("ex3.6")
    doc = document("ex3.6")
    X, T, fam, cert = doc.space, doc.T, doc.family, doc.certificate
    res.check("discrete metric is valid", X.validate().valid)
    rows, ok = _table_rows(pair_values(X, T, fam, L=cert.L), PUBLISHED_ALMOST_ROWS)
    res.tables.append(("d+d^2 at (Tx,Ty) vs bracketed right-hand side, computed and published", ["(i,j)", "lhs", "published", "rhs", "published", "ratio", ""], rows))
    res.check("published pair values reproduced exactly", ok)
    v = verify_almost_polynomial(X, T, cert)
    res.data["verify"] = v.to_dict()
    res.check("almost polynomial contraction at lambda=2/3", v.passed, f"min feasible lambda {fmt(v.min_feasible_lambda)}")
    res.check("almost contraction with lambda=2/3, ell=1/3", verify_almost_contraction(X, T, Fraction(2, 3), Fraction(1, 3)).passed)
    fp = fixed_points(T)
    res.check("fixed points = {x1, x2}", fp == {"x1", "x2"}, ", ".join(sorted(fp)))
    res.check("weakly Picard", is_weakly_picard(T).passed)
    t3 = _trace_check(res, doc, "x3", "x1")
    t2 = _trace_check(res, doc, "x2", "x2")
    res.check("two starts, two different limits", t3.limit != t2.limit)
    res.check("not a Banach contraction", not verify_banach(X, T).passed)
    return res


def run_ex37() -> DemoResult:
    res = DemoResult("ex3.7")
    doc = document("ex3.7")
    S, T, fam, cert = doc.space, doc.T, doc.family, doc.certificate
    v = verify_almost_polynomial(S, T, cert)
    res.data["verify"] = v.to_dict()
    res.check(f"almost polynomial inequality at lambda=1/2 on all {v.pairs_checked} grid pairs", v.passed,
              f"grid-verified; min feasible lambda {fmt(v.min_feasible_lambda)}")
    xs = [S.point(t) for t in (0, 250, 500, S.grid_count - 2)]
    case2 = pair_values(S, T, fam, L=cert.L, pairs=[(x, Fraction(1)) for x in xs])
    res.check("case x<1, y=1: lhs = d(y,Tx) = 3/4", all(pv.lhs == Fraction(3, 4) for pv in case2))
    case4 = pair_values(S, T, fam, L=cert.L, pairs=[(Fraction(1), Fraction(1))])[0]
    res.check("case x=y=1: lhs = 1", case4.lhs == 1, f"rhs bracket {fmt(case4.rhs)}")
    res.check("lower bound A_1 = 1", check_lower_bound_condition(S, fam, 1) == 1)
    _trace_check(res, doc, Fraction(1), Fraction(1, 4), max_steps=3)
    return res


RUNNERS = {
    "ex2.7": run_ex27,
    "ex2.9": run_ex29,
    "ex2.10": run_ex210,
    "ex3.6": run_ex36,
    "ex3.7": run_ex37,
}
