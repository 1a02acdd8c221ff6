"""Ground spaces: finite metric spaces and rational grids on an interval."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import InputError
from .rational import RatArray, parse_rational

VIOLATION_KINDS = ("asymmetry", "nonzero-diagonal", "indistinct-points", "triangle")

# Largest distance power accepted anywhere (degree k of a family).
K_MAX = 32


@dataclass(frozen=True)
class MetricViolation:
    """First failed metric axiom.

    For ``triangle`` the witness is the path ``(p, r, q)`` and
    ``left = d(p, q) > right = d(p, r) + d(r, q)``.
    """

    kind: str
    witness: tuple
    left: Fraction
    right: Fraction

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "witness": list(self.witness),
            "left": str(self.left),
            "right": str(self.right),
        }


@dataclass(frozen=True)
class MetricVerdict:
    valid: bool
    violation: Optional[MetricViolation] = None

    def __bool__(self) -> bool:
        return self.valid


def _coerce_matrix(matrix) -> list:
    rows = [list(r) for r in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError(f"distance matrix is not square ({n} rows)")
    out = []
    for p, row in enumerate(rows):
        conv = []
        for q, v in enumerate(row):
            v = parse_rational(v)
            if v < 0:
                raise InputError(f"negative distance at ({p}, {q}): {v}")
            conv.append(v)
        out.append(conv)
    return out


def validate_metric(matrix, labels: Optional[Sequence[str]] = None) -> MetricVerdict:
    """Check the four metric axioms; report the first violation.

    Axioms are checked in the order diagonal, symmetry, distinctness,
    triangle; each scan is lexicographic over index tuples.
    """
    d = _coerce_matrix(matrix)
    n = len(d)
    labels = list(labels) if labels is not None else [f"x{i + 1}" for i in range(n)]
    if len(labels) != n:
        raise InputError(f"{len(labels)} labels for a {n}x{n} matrix")

    for p in range(n):
        if d[p][p] != 0:
            return MetricVerdict(False, MetricViolation("nonzero-diagonal", (labels[p],), d[p][p], Fraction(0)))
    for p in range(n):
        for q in range(n):
            if d[p][q] != d[q][p]:
                return MetricVerdict(False, MetricViolation("asymmetry", (labels[p], labels[q]), d[p][q], d[q][p]))
    for p in range(n):
        for q in range(n):
            if p != q and d[p][q] == 0:
                return MetricVerdict(False, MetricViolation("indistinct-points", (labels[p], labels[q]), Fraction(0), Fraction(0)))
    for p in range(n):
        for q in range(n):
            for r in range(n):
                via = d[p][r] + d[r][q]
                if d[p][q] > via:
                    return MetricVerdict(
                        False, MetricViolation("triangle", (labels[p], labels[r], labels[q]), d[p][q], via)
                    )
    return MetricVerdict(True)


class FiniteMetricSpace:
    """Labelled finite metric space with an exact rational distance matrix."""

    kind = "finite"

    def __init__(self, points: Sequence[str], dist, check: bool = True):
        self.points = tuple(str(p) for p in points)
        if len(set(self.points)) != len(self.points):
            raise InputError("point labels must be distinct")
        self.dist = tuple(tuple(row) for row in _coerce_matrix(dist))
        if len(self.dist) != len(self.points):
            raise InputError(f"{len(self.points)} points but a {len(self.dist)}x{len(self.dist)} matrix")
        self._index = {p: i for i, p in enumerate(self.points)}
        if check:
            verdict = validate_metric(self.dist, self.points)
            if not verdict.valid:
                v = verdict.violation
                raise InputError(f"not a metric: {v.kind} at {v.witness} ({v.left} vs {v.right})")

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({len(self.points)} points)"

    def index(self, p) -> int:
        try:
            return self._index[str(p)]
        except KeyError:
            raise InputError(f"unknown point {p!r}") from None

    def d(self, p, q) -> Fraction:
        return self.dist[self.index(p)][self.index(q)]

    def validate(self) -> MetricVerdict:
        return validate_metric(self.dist, self.points)

    @cached_property
    def dist_array(self) -> RatArray:
        return RatArray.from_fractions(self.dist)


def discrete_space(points: Sequence[str]) -> FiniteMetricSpace:
    n = len(points)
    return FiniteMetricSpace(points, [[int(p != q) for q in range(n)] for p in range(n)])


@dataclass(frozen=True)
class IntervalGridSpace:
    """``[lo, hi]`` with ``d(x, y) = |x - y|``, sampled at ``grid_count`` equispaced rationals."""

    lo: Fraction
    hi: Fraction
    grid_count: int
    kind: str = field(default="interval", init=False)

    def __post_init__(self):
        object.__setattr__(self, "lo", parse_rational(self.lo))
        object.__setattr__(self, "hi", parse_rational(self.hi))
        if not self.lo < self.hi:
            raise InputError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")
        if not isinstance(self.grid_count, int) or self.grid_count < 2:
            raise InputError(f"grid_count must be an integer >= 2, got {self.grid_count!r}")

    def __len__(self) -> int:
        return self.grid_count

    @property
    def step(self) -> Fraction:
        return (self.hi - self.lo) / (self.grid_count - 1)

    def point(self, t: int) -> Fraction:
        return self.lo + t * self.step

    @property
    def points(self) -> list:
        return [self.point(t) for t in range(self.grid_count)]

    def grid_array(self) -> RatArray:
        # x_t = (lo*(N-1) + t*(hi-lo)) / (N-1), over one common denominator
        m = self.grid_count - 1
        den = self.lo.denominator * self.hi.denominator * m
        lo_n = self.lo.numerator * self.hi.denominator
        span_n = self.hi.numerator * self.lo.denominator - lo_n
        num = np.array([lo_n * m + t * span_n for t in range(self.grid_count)], dtype=object)
        return RatArray(num, den)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def on_grid(self, x: Fraction) -> bool:
        t = (Fraction(x) - self.lo) / self.step
        return t.denominator == 1 and 0 <= t < self.grid_count

    def grid_index(self, x: Fraction) -> int:
        if not self.on_grid(x):
            raise InputError(f"{x} is not a grid point of {self}")
        return int((Fraction(x) - self.lo) / self.step)

    def d(self, p, q) -> Fraction:
        return abs(Fraction(p) - Fraction(q))

    def validate(self) -> MetricVerdict:
        return MetricVerdict(True)


def power_distance(space, i: int, p, q) -> Fraction:
    """``d(p, q) ** i`` with ``d**0 == 1`` everywhere, including ``p == q``."""
    if not isinstance(i, int) or i < 0:
        raise InputError(f"distance power must be a non-negative integer, got {i!r}")
    if i > K_MAX:
        raise InputError(f"distance power {i} exceeds K_MAX={K_MAX}")
    if i == 0:
        return Fraction(1)
    return space.d(p, q) ** i
