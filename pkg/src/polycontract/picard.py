"""Picard iteration and the geometric a-priori error bound."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath

from .contraction import CoefficientFamily
from .errors import InputError
from .metricspace import FiniteMetricSpace, power_distance
from .rational import format_rational, parse_rational

CONVERGED = "converged-to-fixed-point"
CYCLE = "cycle-detected"
MAX_ITER = "max-iter"

# extra bits carried past double precision when a j-th root is needed
EXTRA_BITS = 40


def sigma_j0(space, T, family: CoefficientFamily, j: int, A_j, z0) -> Fraction:
    """``A_j**-1 * sum_i a_i(z0, z1) d^i(z0, z1)`` with ``z1 = T(z0)``."""
    A_j = parse_rational(A_j)
    if A_j <= 0:
        raise InputError(f"A_j must be positive, got {A_j}")
    if not 1 <= j <= family.k:
        raise InputError(f"j={j} outside 1..{family.k}")
    z1 = T(z0)
    total = sum(
        (family.value(i, space, z0, z1) * power_distance(space, i, z0, z1) for i in range(family.k + 1)),
        Fraction(0),
    )
    return total / A_j


@dataclass(frozen=True)
class PicardTrace:
    iterates: tuple
    step_dist: tuple
    status: str
    limit: object = None
    dist_to_limit: tuple = ()
    bound_params: Optional[tuple] = None  # (j, lam, sigma)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def steps(self) -> Optional[int]:
        """Index of the first iterate equal to the limit."""
        if not self.converged:
            return None
        return self.iterates.index(self.limit)

    def to_dict(self) -> dict:
        def fmt(v):
            return format_rational(v) if isinstance(v, Fraction) else v

        return {
            "status": self.status,
            "limit": None if self.limit is None else fmt(self.limit),
            "steps": self.steps,
            "iterates": [fmt(z) for z in self.iterates],
            "step_dist": [fmt(v) for v in self.step_dist],
            "dist_to_limit": [fmt(v) for v in self.dist_to_limit],
        }


def iterate(space, T, z0, tolerance=0, max_iter: int = 10_000) -> PicardTrace:
    """Run ``z_{n+1} = T(z_n)`` from ``z0``.

    Finite spaces stop at an exact fixed point or when a point repeats.
    Interval spaces stop once ``d(z_n, z_{n+1}) <= tolerance`` (exact
    rationals, so the default tolerance 0 means an exact fixed point).
    The final iterate recorded is ``T`` of the last one, so a fixed point
    appears twice at the end.
    """
    tolerance = parse_rational(tolerance)
    if tolerance < 0:
        raise InputError("tolerance must be >= 0")
    finite = isinstance(space, FiniteMetricSpace)
    if finite:
        z = space.points[space.index(z0)]
    else:
        z = parse_rational(z0)
        if not space.contains(z):
            raise InputError(f"start {z} is outside [{space.lo}, {space.hi}]")
    iterates = [z]
    steps = []
    seen = {z}
    status = MAX_ITER
    for _ in range(max_iter):
        nxt = T(z)
        step = space.d(z, nxt)
        iterates.append(nxt)
        steps.append(step)
        if (finite and nxt == z) or (not finite and step <= tolerance):
            status = CONVERGED
            break
        if finite and nxt in seen:
            status = CYCLE
            break
        seen.add(nxt)
        z = nxt
    limit = iterates[-1] if status == CONVERGED else None
    dists = tuple(space.d(w, limit) for w in iterates) if limit is not None else ()
    return PicardTrace(tuple(iterates), tuple(steps), status, limit, dists)


def apriori_bound(n: int, j: int, lam, sigma, extra_bits: int = EXTRA_BITS) -> Union[Fraction, mpmath.mpf]:
    """``(sigma/(1-lam))**(1/j) * lam**(n/j)``; exact for ``j == 1``."""
    lam = parse_rational(lam)
    sigma = parse_rational(sigma)
    if not 0 < lam < 1:
        raise InputError(f"lambda must lie in (0, 1), got {lam}")
    if sigma < 0 or j < 1 or n < 0:
        raise InputError("need sigma >= 0, j >= 1, n >= 0")
    base = sigma / (1 - lam) * lam**n
    if j == 1:
        return base
    with mpmath.workprec(53 + extra_bits):
        return mpmath.root(mpmath.mpf(base.numerator) / base.denominator, j)


@dataclass(frozen=True)
class BoundReport:
    j: int
    lam: Fraction
    sigma: Fraction
    rows: tuple  # (n, observed d(z_n, limit), bound)
    violations: tuple  # n with observed > bound
    step_violations: tuple  # n with d^j(z_n, z_{n+1}) > lam^n sigma
    hard: bool  # j == 1: the bound is a theorem, a violation is a bug

    @property
    def ok(self) -> bool:
        return not self.violations and not self.step_violations

    def to_dict(self) -> dict:
        def fmt(v):
            return format_rational(v) if isinstance(v, Fraction) else mpmath.nstr(v, 20)

        return {
            "j": self.j,
            "lambda": format_rational(self.lam),
            "sigma": format_rational(self.sigma),
            "rows": [{"n": n, "observed": fmt(o), "bound": fmt(b)} for n, o, b in self.rows],
            "violations": list(self.violations),
            "step_violations": list(self.step_violations),
            "assertion": "hard" if self.hard else "empirical",
        }


def check_bound_against_trace(trace: PicardTrace, j: int, lam, sigma) -> BoundReport:
    """Compare every observed ``d(z_n, limit)`` with the a-priori bound.

    The comparison is exact for all ``j``: ``d <= (s/(1-lam))^(1/j) lam^(n/j)``
    is checked as ``d^j <= s lam^n / (1-lam)``.  Only ``j == 1`` is a
    guaranteed bound (the argument needs the triangle inequality for
    ``d^j``); for ``j >= 2`` violations are reported, not asserted.
    """
    if not trace.converged:
        raise InputError(f"trace did not converge ({trace.status})")
    lam = parse_rational(lam)
    sigma = parse_rational(sigma)
    rows, bad = [], []
    for n, observed in enumerate(trace.dist_to_limit):
        rows.append((n, observed, apriori_bound(n, j, lam, sigma)))
        if observed**j > sigma * lam**n / (1 - lam):
            bad.append(n)
    step_bad = [n for n, s in enumerate(trace.step_dist) if s**j > lam**n * sigma]
    return BoundReport(j, lam, sigma, tuple(rows), tuple(bad), tuple(step_bad), j == 1)
