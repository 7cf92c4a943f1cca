"""JSON document formats for bodies, valuations and component families.

Bodies::

    {"polygon": [[x, y], ...]}            {"disk": {"c": [x, y], "r": r}}
    {"sum": [body, body]}                 {"clip": {"body": body, "u": [ux, uy], "t": t}}
    {"box": [["lo", "hi"], ...]}          {"segment": [[x, y], [x, y]]}
    {"point": [x, y]}

Valuations::

    {"vol": {}}  {"euler": {}}  {"perimeter": {}}  {"phi_sing": {}}
    {"phi_l": 0.5}
    {"phi_f": {"piecewise": [[t0, t1, v], ...]}}
    {"phi_f": {"trig": {"a": [...], "b": [...]}}}
    {"composite": <component family document or path>}
    {"combo": [[coef, valuation], ...]}
    {"box_poly": {"n": 2, "expr": "a1*a2 + 7"}}
    {"endpoint_poly": {"n": 1, "expr": "lo1**2 + hi1**3"}}

Scalars may be numbers or strings such as ``"1/3"``, ``"-2.5"`` or angle
expressions like ``"pi/2"`` and ``"3*pi/4"``.
"""

from __future__ import annotations

import ast
import hashlib
import json
import math
import os
import re
from fractions import Fraction
from typing import Any

from . import arcgon as ag
from .boxes import Box, box_from_doc, box_to_doc
from .core import MalformedDocument, ValuationLabError, as_fraction
from .decomposition import (
    endpoint_polynomial_oracle,
    family_from_doc,
    side_polynomial_oracle,
)
from .valuations import (
    BoxFunction,
    Combination,
    Composite,
    Euler,
    Perimeter,
    PhiF,
    PhiL,
    PhiSing,
    PiecewiseConstant,
    TrigPolynomial,
    Vol,
)

_PI_RE = re.compile(r"^\s*([+-]?\s*\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_real(x) -> float:
    """Number, rational string or simple multiple of pi."""
    if isinstance(x, bool):
        raise MalformedDocument(f"not a number: {x!r}")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        m = _PI_RE.match(x)
        if m:
            coef = m.group(1).replace(" ", "")
            c = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
            d = float(m.group(2)) if m.group(2) else 1.0
            return c * math.pi / d
        try:
            return float(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise MalformedDocument(f"not a number: {x!r}")


def parse_exact(x):
    """Exact rational when possible, float otherwise."""
    try:
        return as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        return parse_real(x)


def _point(p) -> tuple[float, float]:
    if not isinstance(p, (list, tuple)) or len(p) != 2:
        raise MalformedDocument(f"expected a 2D point, got {p!r}")
    return parse_real(p[0]), parse_real(p[1])


def _planar(body):
    if isinstance(body, Box):
        if body.n != 2:
            raise MalformedDocument("only planar boxes combine with other bodies")
        return ag.from_box(body)
    return body


def parse_body(doc):
    """Evaluate a body document tree into an ArcGon, Box or EMPTY."""
    if not isinstance(doc, dict) or len(doc) != 1:
        raise MalformedDocument(f"a body document has exactly one key, got {doc!r}")
    (key, val), = doc.items()
    try:
        if key == "polygon":
            return ag.from_polygon([_point(p) for p in val])
        if key == "disk":
            return ag.disk(_point(val["c"]), parse_real(val["r"]))
        if key == "segment":
            p, q = val
            return ag.segment(_point(p), _point(q))
        if key == "point":
            return ag.point(_point(val))
        if key == "box":
            return box_from_doc(doc)
        if key == "sum":
            a, b = val
            A, B = _planar(parse_body(a)), _planar(parse_body(b))
            return ag.minkowski_sum(A, B)
        if key == "clip":
            body = _planar(parse_body(val["body"]))
            u = _point(val["u"])
            norm = math.hypot(*u)
            if norm == 0:
                raise MalformedDocument("clip normal is zero")
            return ag.clip_halfplane(body, (u[0] / norm, u[1] / norm), parse_real(val["t"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValuationLabError):
            raise
        raise MalformedDocument(f"bad {key!r} body: {exc}") from exc
    raise MalformedDocument(f"unknown body kind {key!r}")


def body_to_doc(K) -> dict:
    """Document for a body; curved bodies are not expressible and raise."""
    if isinstance(K, Box):
        return box_to_doc(K)
    if K.arcs:
        raise MalformedDocument("bodies with arcs have no flat document form")
    pts = K.vertices
    if K.kind == "point":
        return {"point": list(pts[0])}
    if K.kind == "segment":
        return {"segment": [list(pts[0]), list(pts[-1])]}
    return {"polygon": [list(p) for p in pts]}


# --------------------------------------------------------------------------
# polynomial expressions


_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name,
                  ast.Add, ast.Sub, ast.Mult, ast.Pow, ast.Div, ast.USub, ast.UAdd, ast.Load)


def _polynomial_terms(expr: str, names: list[str]) -> dict[tuple[int, ...], Fraction]:
    """Parse a polynomial with rational coefficients into ``{exponents: coef}``."""
    import sympy

    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise MalformedDocument(f"cannot parse {expr!r}: {exc}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise MalformedDocument(f"unsupported syntax {type(node).__name__} in {expr!r}")
        if isinstance(node, ast.Name) and node.id not in names:
            raise MalformedDocument(f"unknown variable {node.id!r}; expected {names}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise MalformedDocument(f"bad constant {node.value!r}")
    syms = sympy.symbols(names)
    local = dict(zip(names, syms))
    parsed = sympy.sympify(ast.unparse(tree), locals=local, rational=True)
    try:
        poly = sympy.Poly(sympy.expand(parsed), *syms)
    except sympy.PolynomialError as exc:
        raise MalformedDocument(f"{expr!r} is not a polynomial") from exc
    return {tuple(monom): Fraction(int(c.p), int(c.q)) for monom, c in poly.terms()}


def _dim(val) -> int:
    n = val.get("n")
    if not isinstance(n, int) or n < 1:
        raise MalformedDocument(f"bad dimension {n!r}")
    return n


# --------------------------------------------------------------------------
# valuations


def _sphere_function(val):
    if "piecewise" in val:
        try:
            return PiecewiseConstant(tuple(
                (parse_real(a), parse_real(b), parse_real(v)) for a, b, v in val["piecewise"]))
        except ValueError as exc:
            if isinstance(exc, ValuationLabError):
                raise
            raise MalformedDocument(str(exc)) from exc
    if "trig" in val:
        t = val["trig"]
        return TrigPolynomial(tuple(parse_real(x) for x in t.get("a", [])),
                              tuple(parse_real(x) for x in t.get("b", [])))
    raise MalformedDocument(f"phi_f needs 'piecewise' or 'trig', got {val!r}")


def parse_valuation(doc, base_dir: str | None = None):
    if not isinstance(doc, dict) or len(doc) != 1:
        raise MalformedDocument(f"a valuation document has exactly one key, got {doc!r}")
    (key, val), = doc.items()
    try:
        if key == "vol":
            return Vol()
        if key == "euler":
            return Euler()
        if key == "perimeter":
            return Perimeter()
        if key == "phi_sing":
            return PhiSing()
        if key == "phi_l":
            return PhiL(parse_real(val))
        if key == "phi_f":
            return PhiF(_sphere_function(val))
        if key == "composite":
            if isinstance(val, str):
                val = load_document(val if base_dir is None else os.path.join(base_dir, val))
            return Composite(family_from_doc(val))
        if key == "combo":
            return Combination(tuple((parse_exact(c), parse_valuation(v, base_dir))
                                     for c, v in val))
        if key == "box_poly":
            n = _dim(val)
            names = [f"a{i}" for i in range(1, n + 1)]
            return BoxFunction(side_polynomial_oracle(_polynomial_terms(val["expr"], names),
                                                      n, val["expr"]))
        if key == "endpoint_poly":
            n = _dim(val)
            names = [f"{e}{i}" for i in range(1, n + 1) for e in ("lo", "hi")]
            return BoxFunction(endpoint_polynomial_oracle(
                _polynomial_terms(val["expr"], names), n, val["expr"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValuationLabError):
            raise
        raise MalformedDocument(f"bad {key!r} valuation: {exc}") from exc
    raise MalformedDocument(f"unknown valuation kind {key!r}")


# --------------------------------------------------------------------------
# loading


def load_document(arg: str) -> Any:
    """Inline JSON, or a path to a JSON file."""
    text = arg.strip()
    if text.startswith(("{", "[")):
        source = text
    else:
        try:
            with open(arg, encoding="utf-8") as fh:
                source = fh.read()
        except OSError as exc:
            raise MalformedDocument(f"cannot read {arg!r}: {exc}") from exc
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON in {arg!r}: {exc}") from exc


def document_hash(doc) -> str:
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
