"""Self-maps, orbits and the Picard-type properties decidable on finite spaces."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import InputError
from .exprlang import Expression, evaluate, parse, to_source, variables
from .metricspace import FiniteMetricSpace, IntervalGridSpace
from .rational import RatArray, format_rational, parse_rational


class TableMap:
    """A self-map of a finite space given pointwise."""

    def __init__(self, space: FiniteMetricSpace, table: dict):
        self.space = space
        missing = [p for p in space.points if p not in table]
        if missing:
            raise InputError(f"map has no image for {missing}")
        extra = [p for p in table if str(p) not in space.points]
        if extra:
            raise InputError(f"map table names unknown points {extra}")
        self.image_index = tuple(space.index(table[p]) for p in space.points)

    @classmethod
    def from_indices(cls, space: FiniteMetricSpace, images: Sequence[int]) -> "TableMap":
        return cls(space, {p: space.points[i] for p, i in zip(space.points, images)})

    def __call__(self, p):
        return self.space.points[self.image_index[self.space.index(p)]]

    @property
    def table(self) -> dict:
        return {p: self.space.points[i] for p, i in zip(self.space.points, self.image_index)}

    def __repr__(self) -> str:
        return f"TableMap({self.table})"


_INTERVAL = re.compile(r"^\s*([\[(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\])])\s*$")


@dataclass(frozen=True)
class Branch:
    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool
    expr: Expression

    @classmethod
    def parse(cls, interval: str, expr: Union[str, Expression]) -> "Branch":
        """``Branch.parse("[0, 1)", "1/4")``."""
        m = _INTERVAL.match(interval)
        if m is None:
            raise InputError(f"bad interval {interval!r}; expected e.g. '[0, 1)'")
        e = parse(expr) if isinstance(expr, str) else expr
        if variables(e) - {"x"}:
            raise InputError(f"map branch may only use x: {to_source(e)}")
        b = cls(parse_rational(m.group(2)), parse_rational(m.group(3)), m.group(1) == "[", m.group(4) == "]", e)
        if b.lo > b.hi or (b.lo == b.hi and not (b.lo_closed and b.hi_closed)):
            raise InputError(f"empty branch interval {interval!r}")
        return b

    def covers(self, x: Fraction) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    @property
    def interval(self) -> str:
        return (
            f"{'[' if self.lo_closed else '('}{format_rational(self.lo)}, "
            f"{format_rational(self.hi)}{']' if self.hi_closed else ')'}"
        )


class PiecewiseMap:
    """A self-map of an interval, one expression in ``x`` per sub-interval.

    Branches must be disjoint and cover ``[lo, hi]`` exactly; branch
    endpoints must be grid points so branch selection on the grid is exact.
    """

    def __init__(self, space: IntervalGridSpace, branches: Sequence[Branch]):
        self.space = space
        self.branches = tuple(sorted(branches, key=lambda b: (b.lo, not b.lo_closed)))
        self._check_partition()

    def _check_partition(self):
        bs = self.branches
        if not bs:
            raise InputError("piecewise map has no branches")
        lo, hi = self.space.lo, self.space.hi
        if bs[0].lo != lo or not bs[0].lo_closed:
            raise InputError(f"branches must start at [{lo}")
        if bs[-1].hi != hi or not bs[-1].hi_closed:
            raise InputError(f"branches must end at {hi}]")
        for a, b in zip(bs, bs[1:]):
            if a.hi != b.lo or a.hi_closed == b.lo_closed:
                raise InputError(f"branches {a.interval} and {b.interval} overlap or leave a gap")
        for b in bs:
            for end in (b.lo, b.hi):
                if not self.space.on_grid(end):
                    raise InputError(f"branch endpoint {end} is not a grid point")

    def __call__(self, x):
        x = Fraction(x)
        if not self.space.contains(x):
            raise InputError(f"{x} is outside [{self.space.lo}, {self.space.hi}]")
        for b in self.branches:
            if b.covers(x):
                return evaluate(b.expr, x)
        raise InputError(f"no branch covers {x}")

    def grid_images(self) -> list:
        return [self(x) for x in self.space.points]

    def grid_images_array(self) -> RatArray:
        return RatArray.from_fractions(self.grid_images())

    def check_closure(self) -> Optional[tuple]:
        """First grid point whose image leaves ``[lo, hi]``, as ``(x, Tx)``; else None."""
        for x in self.space.points:
            tx = self(x)
            if not self.space.contains(tx):
                return x, tx
        return None

    def __repr__(self) -> str:
        return "PiecewiseMap(" + "; ".join(f"{b.interval}: {to_source(b.expr)}" for b in self.branches) + ")"


SelfMap = Union[TableMap, PiecewiseMap]


def apply(T: SelfMap, p):
    return T(p)


@dataclass(frozen=True)
class OrbitDecomposition:
    start: object
    tail: tuple
    cycle: tuple

    @property
    def cycle_length(self) -> int:
        return len(self.cycle)

    @property
    def limit(self):
        """The fixed point the orbit settles on, or None for a proper cycle."""
        return self.cycle[0] if len(self.cycle) == 1 else None


def orbit(T: TableMap, z0) -> OrbitDecomposition:
    """Split the orbit of ``z0`` into its pre-periodic tail and its cycle."""
    if not isinstance(T, TableMap):
        raise InputError("orbit decomposition needs a finite space; use picard.iterate on intervals")
    seen = {}
    path = []
    z = T.space.points[T.space.index(z0)]
    while z not in seen:
        seen[z] = len(path)
        path.append(z)
        z = T(z)
    k = seen[z]
    return OrbitDecomposition(path[0], tuple(path[:k]), tuple(path[k:]))


def fixed_points(T: TableMap) -> frozenset:
    return frozenset(p for p in T.space.points if T(p) == p)


@dataclass(frozen=True)
class PicardContinuityVerdict:
    passed: bool
    limits: dict  # start -> limit point or None
    failures: tuple = field(default=())  # (z, w) pairs violating the implication

    def __bool__(self) -> bool:
        return self.passed


def is_picard_continuous(T: TableMap) -> PicardContinuityVerdict:
    """Check ``T^n z -> w  implies  T(T^n z) -> T w`` for every pair ``(z, w)``.

    On a finite space convergence means the orbit is eventually constant.
    """
    limits = {}
    failures = []
    for z in T.space.points:
        w_lim = orbit(T, z).limit
        limits[z] = w_lim
        shifted = orbit(T, T(z)).limit
        for w in T.space.points:
            if w_lim == w and shifted != T(w):
                failures.append((z, w))
    return PicardContinuityVerdict(not failures, limits, tuple(failures))


@dataclass(frozen=True)
class WeaklyPicardVerdict:
    passed: bool
    fixed_points: frozenset
    witness: Optional[str] = None  # start whose orbit does not reach a fixed point

    def __bool__(self) -> bool:
        return self.passed


def is_weakly_picard(T: TableMap) -> WeaklyPicardVerdict:
    fixed = fixed_points(T)
    for z in T.space.points:
        if orbit(T, z).cycle_length != 1:
            return WeaklyPicardVerdict(False, fixed, z)
    return WeaklyPicardVerdict(bool(fixed), fixed, None if fixed else T.space.points[0])


def discretize(T: PiecewiseMap) -> TableMap:
    """Restrict an interval map to its grid; every grid image must be a grid point."""
    space = T.space
    labels = [format_rational(x) for x in space.points]
    table = {}
    for x, lab in zip(space.points, labels):
        tx = T(x)
        if not space.on_grid(tx):
            raise InputError(f"T({x}) = {tx} is not a grid point; grid is not invariant")
        table[lab] = labels[space.grid_index(tx)]
    n = len(labels)
    pts = space.points
    finite = FiniteMetricSpace(labels, [[abs(pts[p] - pts[q]) for q in range(n)] for p in range(n)], check=False)
    return TableMap(finite, table)
