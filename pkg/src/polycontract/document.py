"""Problem documents: a versioned JSON format describing space, map, family and certificate.

Example::

    {
      "format": "polycontract-problem", "version": 1,
      "name": "ex2.7", "kind": "polynomial",
      "space": {"type": "finite", "points": ["x1", "x2"], "metric": "discrete"},
      "map": {"type": "table", "table": {"x1": "x1", "x2": "x1"}},
      "family": {"k": 1, "a": [{"table": [["x1", "x2", "3"]]}, "1"]},
      "certificate": {"lambda": "3/4", "j": 1, "A_j": "1"}
    }

Rationals are integers, ``"p/q"`` strings or exact decimals.  Interval
spaces use ``{"type": "interval", "lo": "0", "hi": "1", "grid": 1001}`` and
piecewise maps ``{"type": "piecewise", "branches": [{"on": "[0, 1)", "expr": "1/4"}]}``.
Coefficients may be constants, expressions in ``x``/``y`` (intervals) or
pair tables (finite spaces).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .contraction import (
    AlmostPolynomialCertificate,
    CoefficientFamily,
    PairTable,
    PolynomialCertificate,
)
from .errors import InputError
from .exprlang import parse
from .mapping import Branch, PiecewiseMap, TableMap
from .metricspace import FiniteMetricSpace, IntervalGridSpace
from .rational import parse_rational

FORMAT = "polycontract-problem"
VERSION = 1
KINDS = ("banach", "kannan", "almost", "polynomial", "almost-polynomial")


@dataclass
class ProblemDocument:
    name: str
    kind: str
    space: Any
    T: Any
    family: Optional[CoefficientFamily]
    certificate: Optional[Any]  # PolynomialCertificate, AlmostPolynomialCertificate or (lam, ell)
    raw: dict

    @property
    def digest(self) -> str:
        return digest(self.raw)


def digest(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"), default=str)
    return "sha256:" + hashlib.sha256(canon.encode()).hexdigest()


def _get(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise InputError(f"{where}: expected an object")
    if key not in d:
        raise InputError(f"{where}: missing field {key!r}")
    return d[key]


def _space(spec: dict):
    kind = _get(spec, "type", "space")
    if kind == "finite":
        points = _get(spec, "points", "space")
        if not isinstance(points, list) or not points:
            raise InputError("space.points must be a non-empty list")
        if "dist" in spec:
            dist = spec["dist"]
        elif spec.get("metric") == "discrete":
            n = len(points)
            dist = [[int(i != j) for j in range(n)] for i in range(n)]
        else:
            raise InputError("finite space needs 'dist' or \"metric\": \"discrete\"")
        # axioms are checked by the commands so a bad metric is a finding, not a parse error
        return FiniteMetricSpace(points, dist, check=False)
    if kind == "interval":
        grid = _get(spec, "grid", "space")
        if isinstance(grid, bool) or not isinstance(grid, int):
            raise InputError("space.grid must be an integer")
        return IntervalGridSpace(
            parse_rational(_get(spec, "lo", "space")), parse_rational(_get(spec, "hi", "space")), grid
        )
    raise InputError(f"space.type must be 'finite' or 'interval', got {kind!r}")


def _map(spec: dict, space):
    kind = _get(spec, "type", "map")
    if kind == "table":
        if space.kind != "finite":
            raise InputError("table maps need a finite space")
        table = _get(spec, "table", "map")
        if not isinstance(table, dict):
            raise InputError("map.table must be an object")
        return TableMap(space, {str(k): str(v) for k, v in table.items()})
    if kind == "piecewise":
        if space.kind != "interval":
            raise InputError("piecewise maps need an interval space")
        branches = _get(spec, "branches", "map")
        if not isinstance(branches, list):
            raise InputError("map.branches must be a list")
        return PiecewiseMap(
            space, [Branch.parse(_get(b, "on", "branch"), str(_get(b, "expr", "branch"))) for b in branches]
        )
    raise InputError(f"map.type must be 'table' or 'piecewise', got {kind!r}")


def _coefficient(entry, space, i: int):
    if isinstance(entry, bool):
        raise InputError(f"a_{i}: booleans are not coefficients")
    if isinstance(entry, (int, Fraction)):
        return Fraction(entry)
    if isinstance(entry, str):
        return parse(entry)
    if isinstance(entry, dict):
        if space.kind != "finite":
            raise InputError(f"a_{i}: pair tables need a finite space")
        if "matrix" in entry:
            return PairTable.from_matrix(entry["matrix"])
        rows = _get(entry, "table", f"a_{i}")
        if not isinstance(rows, list) or any(not isinstance(r, list) or len(r) != 3 for r in rows):
            raise InputError(f"a_{i}.table must be a list of [p, q, value] triples")
        return PairTable.from_entries(
            space, [tuple(r) for r in rows], symmetric=entry.get("symmetric", True), default=entry.get("default", 0)
        )
    raise InputError(f"a_{i}: unsupported coefficient {entry!r}")


def _family(spec: dict, space) -> CoefficientFamily:
    k = _get(spec, "k", "family")
    a = _get(spec, "a", "family")
    if not isinstance(a, list):
        raise InputError("family.a must be a list")
    return CoefficientFamily(k, tuple(_coefficient(e, space, i) for i, e in enumerate(a)))


def _certificate(kind: str, spec: Optional[dict], family: Optional[CoefficientFamily]):
    if kind in ("banach", "kannan"):
        return None
    if spec is None:
        raise InputError(f"kind {kind!r} needs a certificate")
    lam = parse_rational(_get(spec, "lambda", "certificate"))
    if kind == "almost":
        return lam, parse_rational(_get(spec, "ell", "certificate"))
    if family is None:
        raise InputError(f"kind {kind!r} needs a family")
    j = spec.get("j", 1)
    A_j = parse_rational(spec.get("A_j", 1))
    if kind == "polynomial":
        if "L" in spec:
            raise InputError("kind 'polynomial' takes no L list; use 'almost-polynomial'")
        return PolynomialCertificate(lam, family, j, A_j)
    return AlmostPolynomialCertificate(lam, family, j, A_j, tuple(_get(spec, "L", "certificate")))


def from_dict(raw: dict) -> ProblemDocument:
    if not isinstance(raw, dict):
        raise InputError("document must be a JSON object")
    if raw.get("format") != FORMAT:
        raise InputError(f"not a {FORMAT} document (format={raw.get('format')!r})")
    if raw.get("version") != VERSION:
        raise InputError(f"unsupported document version {raw.get('version')!r}; expected {VERSION}")
    kind = raw.get("kind", "polynomial")
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}, got {kind!r}")
    space = _space(_get(raw, "space", "document"))
    T = _map(_get(raw, "map", "document"), space)
    family = _family(raw["family"], space) if "family" in raw else None
    cert = _certificate(kind, raw.get("certificate"), family)
    return ProblemDocument(str(raw.get("name", "")), kind, space, T, family, cert, raw)


def loads(text: str) -> ProblemDocument:
    try:
        raw = json.loads(text, parse_float=Fraction)  # JSON decimals stay exact
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno} (offset {exc.pos}): {exc.msg}") from None
    return from_dict(raw)


def load(path: str) -> ProblemDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)
