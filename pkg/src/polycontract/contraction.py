"""Contraction-class verification over all ordered pairs of a (grid) space.

Every check has the shape ``lhs(x, y) <= lambda * rhs(x, y)`` (or, for the
Berinde-style almost contraction, ``lhs <= lambda*d(x,y) + ell*d(y,Tx)``).
Pairs are scanned in row blocks with exact integer arithmetic; the reduction
(max ratio, first infeasible pair) does not depend on the block size.

Conventions:

* ``d**0 == 1`` for every pair, including ``x == y``.
* A pair with ``rhs == 0`` and ``lhs == 0`` holds for every lambda; a pair
  with ``rhs == 0 < lhs`` makes the inequality infeasible for every lambda.
* Diagonal pairs ``(x, x)`` are scanned: they constrain ``a_0``'s diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import InputError
from .exprlang import Expression, constant_value, evaluate, to_source
from .mapping import PiecewiseMap, TableMap
from .metricspace import K_MAX, FiniteMetricSpace, IntervalGridSpace, power_distance
from .rational import RatArray, format_rational, parse_rational

DEFAULT_BLOCK_ROWS = 64


# ---------------------------------------------------------------------------
# coefficient families and certificates


@dataclass(frozen=True)
class PairTable:
    """Coefficient values on ordered pairs of a finite space (row = x, column = y)."""

    matrix: tuple

    @classmethod
    def from_entries(cls, space: FiniteMetricSpace, entries, symmetric: bool = True, default=0) -> "PairTable":
        """Build from ``[(p, q, value), ...]`` or ``{p: {q: value}}``."""
        n = len(space)
        m = [[parse_rational(default)] * n for _ in range(n)]
        if isinstance(entries, dict):
            entries = [(p, q, v) for p, row in entries.items() for q, v in row.items()]
        for p, q, v in entries:
            v = parse_rational(v)
            i, j = space.index(p), space.index(q)
            m[i][j] = v
            if symmetric:
                m[j][i] = v
        return cls.from_matrix(m)

    @classmethod
    def from_matrix(cls, matrix) -> "PairTable":
        return cls(tuple(tuple(parse_rational(v) for v in row) for row in matrix))

    @cached_property
    def array(self) -> RatArray:
        return RatArray.from_fractions(self.matrix)


Coefficient = Union[Fraction, PairTable, Expression]


def _coerce_coefficient(c) -> Coefficient:
    if isinstance(c, (PairTable, Fraction)):
        return c
    if isinstance(c, (int, str)) and not isinstance(c, bool):
        return parse_rational(c)
    if isinstance(c, Expression.__args__):
        v = constant_value(c)
        return c if v is None else v
    raise InputError(f"unsupported coefficient {c!r}")


@dataclass(frozen=True)
class CoefficientFamily:
    """The coefficient functions ``a_0 .. a_k``."""

    k: int
    coeffs: tuple

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InputError(f"k must be an integer >= 1, got {self.k!r}")
        if self.k > K_MAX:
            raise InputError(f"k={self.k} exceeds K_MAX={K_MAX}")
        coeffs = tuple(_coerce_coefficient(c) for c in self.coeffs)
        if len(coeffs) != self.k + 1:
            raise InputError(f"family of degree k={self.k} needs {self.k + 1} coefficients, got {len(coeffs)}")
        for i, c in enumerate(coeffs):
            if isinstance(c, Fraction) and c < 0:
                raise InputError(f"a_{i} is negative: {c}")
            if isinstance(c, PairTable) and any(v < 0 for row in c.matrix for v in row):
                raise InputError(f"a_{i} has a negative table entry")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def of(cls, *coeffs) -> "CoefficientFamily":
        """``CoefficientFamily.of(a0, a1, ...)``."""
        return cls(len(coeffs) - 1, tuple(coeffs))

    def value(self, i: int, space, p, q) -> Fraction:
        """Scalar ``a_i(p, q)``."""
        c = self.coeffs[i]
        if isinstance(c, Fraction):
            return c
        if isinstance(c, PairTable):
            return c.matrix[space.index(p)][space.index(q)]
        if space.kind != "interval":
            raise InputError(f"a_{i} = {to_source(c)} uses x/y but the space is finite")
        v = evaluate(c, Fraction(p), Fraction(q))
        if v < 0:
            raise InputError(f"a_{i}({p}, {q}) = {v} is negative")
        return v

    def describe(self) -> list:
        out = []
        for c in self.coeffs:
            if isinstance(c, Fraction):
                out.append(format_rational(c))
            elif isinstance(c, PairTable):
                out.append([[format_rational(v) for v in row] for row in c.matrix])
            else:
                out.append(to_source(c))
        return out


def _check_lambda(lam) -> Fraction:
    lam = parse_rational(lam)
    if not 0 < lam < 1:
        raise InputError(f"lambda must lie in (0, 1), got {lam}")
    return lam


@dataclass(frozen=True)
class PolynomialCertificate:
    lam: Fraction
    family: CoefficientFamily
    witness_j: int = 1
    witness_Aj: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_lambda(self.lam))
        object.__setattr__(self, "witness_Aj", parse_rational(self.witness_Aj))
        if not 1 <= self.witness_j <= self.family.k:
            raise InputError(f"witness j={self.witness_j} outside 1..{self.family.k}")
        if self.witness_Aj <= 0:
            raise InputError(f"witness A_j must be positive, got {self.witness_Aj}")


@dataclass(frozen=True)
class AlmostPolynomialCertificate(PolynomialCertificate):
    L: tuple = ()

    def __post_init__(self):
        super().__post_init__()
        L = tuple(parse_rational(v) for v in self.L)
        if len(L) != self.family.k + 1:
            raise InputError(f"need L_0..L_{self.family.k} ({self.family.k + 1} values), got {len(L)}")
        if any(v <= 0 for v in L):
            raise InputError("every L_i must be positive")
        object.__setattr__(self, "L", L)


# ---------------------------------------------------------------------------
# geometry: index handles for finite spaces, rational values for grids


class _FiniteGeometry:
    def __init__(self, space: FiniteMetricSpace, T: TableMap):
        if not isinstance(T, TableMap) or T.space is not space and T.space.points != space.points:
            raise InputError("finite spaces need a table map over the same points")
        self.space = space
        self.n = len(space)
        self.D = space.dist_array
        self.img = np.array(T.image_index, dtype=np.intp)

    def handle(self, idx: np.ndarray, image: bool = False):
        return self.img[idx] if image else idx

    def dist(self, P, Q) -> RatArray:
        return RatArray(self.D.num[P, Q], self.D.den)

    def coef(self, family: CoefficientFamily, i: int, P, Q):
        c = family.coeffs[i]
        if isinstance(c, Fraction):
            return c
        if isinstance(c, PairTable):
            A = c.array
            if A.shape != (self.n, self.n):
                raise InputError(f"a_{i} table is {A.shape}, space has {self.n} points")
            return RatArray(A.num[P, Q], A.den)
        raise InputError(f"a_{i} = {to_source(c)} uses x/y but the space is finite")

    def label(self, i: int):
        return self.space.points[i]


class _GridGeometry:
    def __init__(self, space: IntervalGridSpace, T: PiecewiseMap):
        if not isinstance(T, PiecewiseMap):
            raise InputError("interval spaces need a piecewise map")
        bad = T.check_closure()
        if bad is not None:
            raise InputError(f"T({bad[0]}) = {bad[1]} leaves [{space.lo}, {space.hi}]")
        self.space = space
        self.n = space.grid_count
        self.vals = space.grid_array()
        self.imgs = T.grid_images_array()

    def handle(self, idx: np.ndarray, image: bool = False) -> RatArray:
        src = self.imgs if image else self.vals
        return RatArray(src.num[idx], src.den)

    def dist(self, P: RatArray, Q: RatArray) -> RatArray:
        return abs(P - Q)

    def coef(self, family: CoefficientFamily, i: int, P, Q):
        c = family.coeffs[i]
        if isinstance(c, Fraction):
            return c
        if isinstance(c, PairTable):
            raise InputError(f"a_{i} is a pair table but the space is an interval")
        v = evaluate(c, P, Q)
        if isinstance(v, RatArray):
            if np.asarray(v.num < 0, dtype=bool).any():
                raise InputError(f"a_{i} = {to_source(c)} is negative somewhere on the grid")
        elif v < 0:
            raise InputError(f"a_{i} = {to_source(c)} is negative")
        return v

    def label(self, i: int) -> Fraction:
        return self.space.point(i)


def _geometry(space, T):
    if isinstance(space, FiniteMetricSpace):
        return _FiniteGeometry(space, T)
    if isinstance(space, IntervalGridSpace):
        return _GridGeometry(space, T)
    raise InputError(f"unsupported space {space!r}")


class _Block:
    """Lazily computed distance/coefficient arrays for rows ``rows`` x all columns."""

    def __init__(self, geom, rows: np.ndarray):
        self.geom = geom
        self.shape = (len(rows), geom.n)
        r = rows[:, None]
        c = np.arange(geom.n)[None, :]
        self.X = geom.handle(r)
        self.Y = geom.handle(c)
        self.TX = geom.handle(r, image=True)
        self.TY = geom.handle(c, image=True)
        self._pow = {}

    @cached_property
    def d_xy(self):
        return self.geom.dist(self.X, self.Y)

    @cached_property
    def d_TxTy(self):
        return self.geom.dist(self.TX, self.TY)

    @cached_property
    def d_yTx(self):
        return self.geom.dist(self.Y, self.TX)

    @cached_property
    def d_xTx(self):
        return self.geom.dist(self.X, self.TX)

    @cached_property
    def d_yTy(self):
        return self.geom.dist(self.Y, self.TY)

    def power(self, name: str, i: int):
        if i == 0:
            return Fraction(1)
        key = (name, i)
        if key not in self._pow:
            self._pow[key] = getattr(self, name) ** i
        return self._pow[key]

    def a(self, family: CoefficientFamily, i: int, image: bool = False):
        if image:
            return self.geom.coef(family, i, self.TX, self.TY)
        return self.geom.coef(family, i, self.X, self.Y)


def _full(value, shape) -> RatArray:
    if isinstance(value, RatArray):
        return value.broadcast_to(shape)
    q = Fraction(value)
    return RatArray(np.full(shape, q.numerator, dtype=object), q.denominator)


@dataclass
class _ScanResult:
    n_pairs: int = 0
    max_ratio: Optional[Fraction] = None
    argmax: Optional[tuple] = None
    argmax_lhs: Optional[Fraction] = None
    argmax_rhs: Optional[Fraction] = None
    infeasible: Optional[tuple] = None
    infeasible_lhs: Optional[Fraction] = None


def _exact_argmax(p: np.ndarray, q: np.ndarray) -> int:
    """Index of the first maximum of ``p/q`` (``q > 0``), exactly."""
    best = 0
    while True:
        greater = np.asarray(p * q[best] > p[best] * q, dtype=bool)
        if not greater.any():
            break
        best = int(np.flatnonzero(greater)[0])
    ties = np.asarray(p * q[best] == p[best] * q, dtype=bool)
    return int(np.flatnonzero(ties)[0])


def _scan(geom, lhs_fn: Callable, rhs_fn: Callable, block_rows: int = DEFAULT_BLOCK_ROWS) -> _ScanResult:
    if block_rows < 1:
        raise InputError("block_rows must be >= 1")
    res = _ScanResult()
    for start in range(0, geom.n, block_rows):
        rows = np.arange(start, min(start + block_rows, geom.n))
        blk = _Block(geom, rows)
        lhs = _full(lhs_fn(blk), blk.shape)
        rhs = _full(rhs_fn(blk), blk.shape)
        res.n_pairs += lhs.shape[0] * lhs.shape[1]
        ln = np.ascontiguousarray(lhs.num).ravel()
        rn = np.ascontiguousarray(rhs.num).ravel()
        pos = np.asarray(rn > 0, dtype=bool)

        if res.infeasible is None:
            bad = np.flatnonzero(~pos & np.asarray(ln > 0, dtype=bool))
            if bad.size:
                b, col = divmod(int(bad[0]), geom.n)
                res.infeasible = (int(rows[b]), col)
                res.infeasible_lhs = Fraction(int(ln[bad[0]]), lhs.den)

        idx = np.flatnonzero(pos)
        if not idx.size:
            continue
        p = ln[idx] * rhs.den
        q = rn[idx] * lhs.den
        approx = (p / q).astype(float)  # int/int true division is correctly rounded
        top = np.flatnonzero(approx == approx.max())
        k = top[_exact_argmax(p[top], q[top])]
        ratio = Fraction(int(p[k]), int(q[k]))
        if res.max_ratio is None or ratio > res.max_ratio:
            b, col = divmod(int(idx[k]), geom.n)
            res.max_ratio = ratio
            res.argmax = (int(rows[b]), col)
            res.argmax_lhs = Fraction(int(ln[idx[k]]), lhs.den)
            res.argmax_rhs = Fraction(int(rn[idx[k]]), rhs.den)
    return res


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Verdict:
    """Outcome of one pair scan.

    ``lhs <= bound`` must hold at every pair.  For the lambda-homogeneous
    checks ``rhs`` is the lambda-free right-hand side and ``bound = lam*rhs``;
    ``min_feasible_lambda`` is the largest ``lhs/rhs`` over pairs with
    ``rhs > 0`` (None when some pair has ``rhs == 0 < lhs``).
    """

    kind: str
    status: str  # pass | fail | infeasible
    lam: Optional[Fraction]
    worst_pair: Optional[tuple]
    lhs: Optional[Fraction]
    rhs: Optional[Fraction]
    bound: Optional[Fraction]
    min_feasible_lambda: Optional[Fraction]
    pairs_checked: int
    grid_verified: bool = False

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        def fmt(v):
            return None if v is None else format_rational(Fraction(v))

        return {
            "kind": self.kind,
            "status": self.status,
            "lambda": fmt(self.lam),
            "worst_pair": None if self.worst_pair is None else [str(fmt(p) if isinstance(p, Fraction) else p) for p in self.worst_pair],
            "lhs": fmt(self.lhs),
            "rhs": fmt(self.rhs),
            "bound": fmt(self.bound),
            "min_feasible_lambda": fmt(self.min_feasible_lambda) if self.min_feasible_lambda is not None else "none",
            "pairs_checked": self.pairs_checked,
            "evidence": "grid-verified" if self.grid_verified else "exact",
        }


def _ratio_verdict(kind, geom, res: _ScanResult, lam: Optional[Fraction], passes: Callable) -> Verdict:
    grid = isinstance(geom, _GridGeometry)
    if res.infeasible is not None:
        i, j = res.infeasible
        return Verdict(
            kind, "infeasible", lam, (geom.label(i), geom.label(j)), res.infeasible_lhs, Fraction(0),
            Fraction(0), None, res.n_pairs, grid,
        )
    ratio = res.max_ratio if res.max_ratio is not None else Fraction(0)
    status = "pass" if passes(ratio) else "fail"
    pair = None if res.argmax is None else (geom.label(res.argmax[0]), geom.label(res.argmax[1]))
    bound = None if res.argmax_rhs is None or lam is None else lam * res.argmax_rhs
    return Verdict(kind, status, lam, pair, res.argmax_lhs, res.argmax_rhs, bound, ratio, res.n_pairs, grid)


def _check_family(space, family: CoefficientFamily):
    if isinstance(space, FiniteMetricSpace):
        for i, c in enumerate(family.coeffs):
            if isinstance(c, PairTable) and len(c.matrix) != len(space):
                raise InputError(f"a_{i} table has {len(c.matrix)} rows, space has {len(space)} points")


def _poly_lhs(family):
    def f(b: _Block):
        return sum(
            (b.a(family, i, image=True) * b.power("d_TxTy", i) for i in range(family.k + 1)), Fraction(0)
        )

    return f


def _poly_rhs(family):
    def f(b: _Block):
        return sum((b.a(family, i) * b.power("d_xy", i) for i in range(family.k + 1)), Fraction(0))

    return f


def _almost_rhs(family, L):
    def f(b: _Block):
        total = Fraction(0)
        for i in range(family.k + 1):
            total = total + b.a(family, i) * (b.power("d_xy", i) + L[i] * b.power("d_yTx", i))
        return total

    return f


def verify_polynomial(space, T, cert: PolynomialCertificate, block_rows: int = DEFAULT_BLOCK_ROWS) -> Verdict:
    """Check ``sum a_i(Tx,Ty) d^i(Tx,Ty) <= lam * sum a_i(x,y) d^i(x,y)`` at every ordered pair."""
    _check_family(space, cert.family)
    geom = _geometry(space, T)
    res = _scan(geom, _poly_lhs(cert.family), _poly_rhs(cert.family), block_rows)
    return _ratio_verdict("polynomial", geom, res, cert.lam, lambda r: r <= cert.lam)


def verify_almost_polynomial(
    space, T, cert: AlmostPolynomialCertificate, block_rows: int = DEFAULT_BLOCK_ROWS
) -> Verdict:
    """Check ``sum a_i(Tx,Ty) d^i(Tx,Ty) <= lam * sum a_i(x,y) [d^i(x,y) + L_i d^i(y,Tx)]``.

    Not symmetric in ``(x, y)``; all ordered pairs are scanned.
    """
    if not isinstance(cert, AlmostPolynomialCertificate):
        raise InputError("verify_almost_polynomial needs an AlmostPolynomialCertificate")
    _check_family(space, cert.family)
    geom = _geometry(space, T)
    res = _scan(geom, _poly_lhs(cert.family), _almost_rhs(cert.family, cert.L), block_rows)
    return _ratio_verdict("almost-polynomial", geom, res, cert.lam, lambda r: r <= cert.lam)


def verify_banach(space, T, block_rows: int = DEFAULT_BLOCK_ROWS) -> Verdict:
    """Smallest Lipschitz constant ``max d(Tp,Tq)/d(p,q)``; passes iff it is < 1."""
    geom = _geometry(space, T)
    res = _scan(geom, lambda b: b.d_TxTy, lambda b: b.d_xy, block_rows)
    return _ratio_verdict("banach", geom, res, None, lambda r: r < 1)


def verify_kannan(space, T, block_rows: int = DEFAULT_BLOCK_ROWS) -> Verdict:
    """Smallest ``lam`` with ``d(Tx,Ty) <= lam [d(x,Tx) + d(y,Ty)]``; passes iff it is < 1/2."""
    geom = _geometry(space, T)
    res = _scan(geom, lambda b: b.d_TxTy, lambda b: b.d_xTx + b.d_yTy, block_rows)
    return _ratio_verdict("kannan", geom, res, None, lambda r: r < Fraction(1, 2))


def verify_almost_contraction(space, T, lam, ell, block_rows: int = DEFAULT_BLOCK_ROWS) -> Verdict:
    """Check ``d(Tx,Ty) <= lam d(x,y) + ell d(y,Tx)`` over ordered pairs.

    Here ``rhs`` is ``d(x,y)`` and ``bound`` the full right-hand side at the
    worst pair; ``min_feasible_lambda`` is the least lambda for this ``ell``.
    """
    lam = _check_lambda(lam)
    ell = parse_rational(ell)
    if ell <= 0:
        raise InputError(f"ell must be positive, got {ell}")
    geom = _geometry(space, T)
    res = _scan(geom, lambda b: b.d_TxTy - ell * b.d_yTx, lambda b: b.d_xy, block_rows)
    grid = isinstance(geom, _GridGeometry)
    ratio = max(res.max_ratio, Fraction(0)) if res.max_ratio is not None else Fraction(0)
    # the diagonal never makes this infeasible: lhs there is -ell*d(x,Tx) <= 0
    status = "pass" if ratio <= lam else "fail"
    pair = lhs = rhs = bound = None
    if res.argmax is not None:
        i, j = res.argmax
        p, q = geom.label(i), geom.label(j)
        tp, tq = T(p), T(q)
        pair = (p, q)
        lhs = space.d(tp, tq)
        rhs = space.d(p, q)
        bound = lam * rhs + ell * space.d(q, tp)
    return Verdict("almost", status, lam, pair, lhs, rhs, bound, ratio, res.n_pairs, grid)


# ---------------------------------------------------------------------------
# side conditions


def _family_extrema(space, family: CoefficientFamily, i: int, T=None) -> tuple:
    """Exact (min, max) of ``a_i`` over all ordered pairs."""
    c = family.coeffs[i]
    if isinstance(c, Fraction):
        return c, c
    if isinstance(space, FiniteMetricSpace):
        vals = [v for row in family.coeffs[i].matrix for v in row] if isinstance(c, PairTable) else None
        if vals is None:
            raise InputError(f"a_{i} uses x/y but the space is finite")
        return min(vals), max(vals)
    vals = space.grid_array()
    lo = hi = None
    for start in range(0, space.grid_count, DEFAULT_BLOCK_ROWS):
        rows = np.arange(start, min(start + DEFAULT_BLOCK_ROWS, space.grid_count))
        X = RatArray(vals.num[rows][:, None], vals.den)
        Y = RatArray(vals.num[None, :], vals.den)
        v = _full(evaluate(c, X, Y), (len(rows), space.grid_count))
        bmin = Fraction(int(v.num.min()), v.den)
        bmax = Fraction(int(v.num.max()), v.den)
        lo = bmin if lo is None else min(lo, bmin)
        hi = bmax if hi is None else max(hi, bmax)
    if lo < 0:
        raise InputError(f"a_{i} is negative somewhere on the grid")
    return lo, hi


def check_lower_bound_condition(space, family: CoefficientFamily, j: int) -> Optional[Fraction]:
    """Largest ``A_j`` with ``a_j >= A_j`` on all pairs, or None when it is not positive.

    Exact on finite spaces; a grid minimum (evidence only) on intervals.
    """
    if not 1 <= j <= family.k:
        raise InputError(f"j={j} outside 1..{family.k}")
    lo, _ = _family_extrema(space, family, j)
    return lo if lo > 0 else None


@dataclass(frozen=True)
class ContinuityHypotheses:
    a0_vanishes: bool
    upper_bounds: tuple  # max of a_1..a_k
    lower_bounds: tuple  # min of a_1..a_k
    best_j: Optional[int]
    best_Aj: Optional[Fraction]
    grid_only: bool

    @property
    def continuity_guaranteed(self) -> bool:
        return self.a0_vanishes and self.best_j is not None

    def to_dict(self) -> dict:
        return {
            "a0_vanishes": self.a0_vanishes,
            "upper_bounds": [format_rational(v) for v in self.upper_bounds],
            "lower_bounds": [format_rational(v) for v in self.lower_bounds],
            "best_j": self.best_j,
            "best_Aj": None if self.best_Aj is None else format_rational(self.best_Aj),
            "continuity_guaranteed": self.continuity_guaranteed,
            "evidence": "grid-verified" if self.grid_only else "exact",
        }


def check_continuity_hypotheses(space, family: CoefficientFamily) -> ContinuityHypotheses:
    """Hypotheses that make a polynomial contraction continuous.

    ``a_0 == 0`` everywhere, every ``a_i`` bounded above (automatic on a
    finite set of pairs), and some ``a_j`` bounded below by a positive constant.
    """
    lo0, hi0 = _family_extrema(space, family, 0)
    ext = [_family_extrema(space, family, i) for i in range(1, family.k + 1)]
    lows = tuple(lo for lo, _ in ext)
    best_j, best = None, None
    for j, lo in enumerate(lows, start=1):
        if lo > 0 and (best is None or lo > best):
            best_j, best = j, lo
    return ContinuityHypotheses(
        hi0 == 0, tuple(hi for _, hi in ext), lows, best_j, best, isinstance(space, IntervalGridSpace)
    )


# name used by the operation contract
check_proposition_23_hypotheses = check_continuity_hypotheses


# ---------------------------------------------------------------------------
# scalar per-pair route (independent of the block scan)


@dataclass(frozen=True)
class PairValue:
    x: object
    y: object
    lhs: Fraction
    rhs: Fraction


def pair_values(space, T, family: CoefficientFamily, L: Optional[Sequence] = None, pairs=None) -> list:
    """``lhs``/``rhs`` of the polynomial (or, with ``L``, almost-polynomial) inequality per pair.

    Plain scalar arithmetic; used for table reproduction and as the
    brute-force oracle for the block scan.
    """
    if pairs is None:
        pts = list(space.points)
        pairs = [(p, q) for p in pts for q in pts]
    out = []
    for p, q in pairs:
        tp, tq = T(p), T(q)
        lhs = sum(
            (family.value(i, space, tp, tq) * power_distance(space, i, tp, tq) for i in range(family.k + 1)),
            Fraction(0),
        )
        rhs = Fraction(0)
        for i in range(family.k + 1):
            term = power_distance(space, i, p, q)
            if L is not None:
                term += Fraction(L[i]) * power_distance(space, i, q, tp)
            rhs += family.value(i, space, p, q) * term
        out.append(PairValue(p, q, lhs, rhs))
    return out
