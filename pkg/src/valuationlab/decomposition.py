"""Structure theory of valuations on axis-parallel boxes.

A translation-invariant valuation on boxes is determined by the function
``F(a) = V([0, a_1] x ... x [0, a_n])`` and splits uniquely into separately
additive components ``G_I`` indexed by coordinate subsets ``I``:

    V(box) = sum over I of G_I(side lengths on I)

This module extracts that family from an oracle, rebuilds oracles from a
family, certifies the components as multilinear monomials with exact
arithmetic, fits the homogeneity polynomial ``lambda -> V(lambda K)``, and
computes the endpoint decomposition of valuations that are *not*
translation invariant.

Subsets use 1-based axis labels, matching :mod:`valuationlab.boxes`.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

from .boxes import Box, box_intersection, box_union, make_box, origin_box, scale_translate
from .core import (
    EMPTY,
    ComponentUndefinedAt,
    CoordinateOutOfRange,
    InsufficientSamples,
    MalformedDocument,
    as_fraction,
    rat_str,
)

DEFAULT_GRID = tuple(Fraction(k, 8) for k in range(33))


# --------------------------------------------------------------------------
# oracles


@dataclass(frozen=True)
class BoxValuationOracle:
    """A set function on n-dimensional boxes, with ``V(EMPTY) = 0``."""

    fn: Callable[[Box], Any]
    n: int
    translation_invariant: bool = True
    name: str = "V"

    def __call__(self, K) -> Any:
        if K is EMPTY:
            return 0
        return self.fn(K)


def volume_oracle(n: int) -> BoxValuationOracle:
    return BoxValuationOracle(lambda K: K.volume(), n, True, "vol")


def euler_oracle(n: int) -> BoxValuationOracle:
    return BoxValuationOracle(lambda K: 1, n, True, "euler")


def side_polynomial_oracle(terms: Mapping[tuple[int, ...], Any], n: int,
                           name: str = "poly") -> BoxValuationOracle:
    """``V(box) = sum c * prod(side_i ** e_i)`` for ``{(e_1..e_n): c}``."""
    terms = {tuple(e): as_fraction(c) for e, c in terms.items()}

    def fn(K: Box):
        sides = K.sides
        return sum(
            (c * math.prod((s ** e for s, e in zip(sides, exps)), start=Fraction(1))
             for exps, c in terms.items()),
            Fraction(0),
        )

    return BoxValuationOracle(fn, n, True, name)


def endpoint_polynomial_oracle(terms: Mapping[tuple[int, ...], Any], n: int,
                               name: str = "endpoint-poly") -> BoxValuationOracle:
    """Polynomial in the endpoints ``(lo_1, hi_1, ..., lo_n, hi_n)``.

    Not translation invariant in general, and a valuation only when every
    monomial uses at most one endpoint per axis.
    """
    terms = {tuple(e): as_fraction(c) for e, c in terms.items()}

    def fn(K: Box):
        coords = [x for pair in K.intervals for x in pair]
        return sum(
            (c * math.prod((x ** e for x, e in zip(coords, exps)), start=Fraction(1))
             for exps, c in terms.items()),
            Fraction(0),
        )

    return BoxValuationOracle(fn, n, False, name)


# --------------------------------------------------------------------------
# random sampling helpers


def random_rational(rng: random.Random, lo: int, hi: int,
                    denominators: Sequence[int] = (1, 2, 3, 4, 8)) -> Fraction:
    q = rng.choice(denominators)
    return Fraction(rng.randint(lo * q, hi * q), q)


def random_box(rng: random.Random, n: int, lo: int = -4, hi: int = 4) -> Box:
    pairs = []
    for _ in range(n):
        a, b = random_rational(rng, lo, hi), random_rational(rng, lo, hi)
        pairs.append((min(a, b), max(a, b)))
    return make_box(pairs)


def random_one_axis_pair(rng: random.Random, n: int, lo: int = -4,
                         hi: int = 4) -> tuple[Box, Box, int]:
    """Two boxes agreeing off one axis, overlapping without nesting on it.

    Returns the pair and the 0-based axis. On that axis the intervals are
    ``[a1, b1]`` and ``[a2, b2]`` with ``a1 < a2 <= b1 < b2``.
    """
    base = random_box(rng, n, lo, hi)
    k = rng.randrange(n)
    while True:
        pts = sorted(random_rational(rng, lo, hi) for _ in range(4))
        a1, a2, b1, b2 = pts
        if a1 < a2 <= b1 < b2:
            break
        if rng.random() < 0.3 and pts[0] < pts[1] < pts[3]:
            a1, a2, b1, b2 = pts[0], pts[1], pts[1], pts[3]
            break
    first = list(base.intervals)
    second = list(base.intervals)
    first[k] = (a1, b1)
    second[k] = (a2, b2)
    K, L = Box(tuple(first)), Box(tuple(second))
    if rng.random() < 0.5:
        K, L = L, K
    return K, L, k


# --------------------------------------------------------------------------
# valuation checks


@dataclass
class ValuationCheckReport:
    samples: int
    violations: list = field(default_factory=list)
    affine_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.affine_violations


def valuation_defect(V, K: Box, L: Box):
    """``V(K) + V(L) - V(K u L) - V(K n L)`` for a compatible pair."""
    return V(K) + V(L) - V(box_union(K, L)) - V(box_intersection(K, L))


def check_valuation(V: BoxValuationOracle, samples: int = 1000, seed: int = 0,
                    tol=0) -> ValuationCheckReport:
    """Sample OneAxis-compatible pairs and test the valuation identity.

    Nested pairs satisfy the identity trivially, so only pairs that differ on
    exactly one axis are drawn. When the oracle claims translation
    invariance, ``F(a) = V(box [0, a])`` is also tested for affine
    additivity ``f(x + y) = f(x) + f(y) - f(0)`` along each axis. Violations
    are collected, never raised.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    report = ValuationCheckReport(samples)
    for _ in range(samples):
        K, L, _ = random_one_axis_pair(rng, V.n)
        d = valuation_defect(V, K, L)
        if abs(d) > tol:
            report.violations.append((K, L, d))
    if V.translation_invariant:
        for _ in range(samples):
            a = [random_rational(rng, 0, 4) for _ in range(V.n)]
            j = rng.randrange(V.n)
            x, y = random_rational(rng, 0, 4), random_rational(rng, 0, 4)

            def F(t):
                pt = list(a)
                pt[j] = t
                return V(origin_box(pt))

            d = F(x + y) - F(x) - F(y) + F(0)
            if abs(d) > tol:
                report.affine_violations.append((tuple(a), j + 1, x, y, d))
    return report


def alternating_top(F: Callable[[tuple], Any], a: Sequence) -> Any:
    """Top separately additive part of ``F`` at ``a``.

    ``sum over I of (-1)**(n - |I|) * F(a^I)`` where ``a^I`` zeroes the
    coordinates outside ``I``. With this sign it is a projection: a
    separately additive ``F`` is returned unchanged.
    """
    n = len(a)
    zero = type(a[0])(0) if n else 0
    total = 0
    for mask in range(1 << n):
        pt = tuple(a[i] if mask >> i & 1 else zero for i in range(n))
        sign = -1 if (n - bin(mask).count("1")) % 2 else 1
        total += sign * F(pt)
    return total


# --------------------------------------------------------------------------
# component families


def subsets(n: int) -> list[frozenset[int]]:
    """All subsets of ``{1..n}`` ordered by size, then lexicographically."""
    out = []
    for k in range(n + 1):
        out.extend(frozenset(c) for c in itertools.combinations(range(1, n + 1), k))
    return out


@dataclass
class Component:
    """One separately additive ``G_I``: samples plus an optional closed form.

    ``coefficient`` ``c`` means ``G_I(a) = c * prod(a)`` has been certified
    (or was given). For ``I`` empty the component is the constant ``c``.
    """

    arity: int
    samples: dict = field(default_factory=dict)
    coefficient: Any = None

    def __call__(self, args: Sequence) -> Any:
        args = tuple(args)
        if len(args) != self.arity:
            raise ValueError(f"component of arity {self.arity} called with {len(args)} args")
        if args in self.samples:
            return self.samples[args]
        if self.coefficient is not None:
            return self.coefficient * math.prod(args, start=Fraction(1))
        raise ComponentUndefinedAt(args)

    @classmethod
    def monomial(cls, c, arity: int) -> "Component":
        return cls(arity, {}, as_fraction(c) if not isinstance(c, float) else c)


@dataclass
class ComponentFamily:
    n: int
    components: dict = field(default_factory=dict)

    def __getitem__(self, I) -> Component:
        return self.components[frozenset(I)]

    def value(self, I, args: Sequence) -> Any:
        return self[I](args)

    @classmethod
    def from_coefficients(cls, n: int, coefficients: Mapping) -> "ComponentFamily":
        """Closed-form family; subsets missing from ``coefficients`` are zero."""
        comps = {}
        for I in subsets(n):
            c = coefficients.get(I, coefficients.get(tuple(sorted(I)), 0))
            comps[I] = Component.monomial(c, len(I))
        return cls(n, comps)

    def degree_contributions(self, sides: Sequence) -> list:
        """``c_j = sum over |I| = j of G_I(sides on I)`` for ``j = 0..n``."""
        out = [Fraction(0)] * (self.n + 1)
        for I, comp in self.components.items():
            out[len(I)] += comp(_restrict(sides, I))
        return out


def _restrict(point: Sequence, I: Iterable[int]) -> tuple:
    return tuple(point[i - 1] for i in sorted(I))


def _embed(n: int, I: frozenset[int], args: Sequence) -> tuple:
    out = [Fraction(0)] * n
    for i, a in zip(sorted(I), args):
        out[i - 1] = a
    return tuple(out)


def reconstruct(C: ComponentFamily) -> BoxValuationOracle:
    """The translation-invariant valuation with component family ``C``."""
    items = sorted(C.components.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))

    def fn(K: Box):
        sides = K.sides
        total = Fraction(0)
        for I, comp in items:
            total += comp(_restrict(sides, I))
        return total

    return BoxValuationOracle(fn, C.n, True, "reconstructed")


def extract_components(V: BoxValuationOracle, sample_grid: Sequence | None = None,
                       certify: bool = True, probe_count: int = 16) -> ComponentFamily:
    """Recover the unique component family of a translation-invariant ``V``.

    ``G_empty = V({0})`` and, by recursion on ``|I|``,
    ``G_I(a) = V(box [0, a] on I) - sum over proper J of G_J(a on J)``,
    sampled on ``sample_grid ** |I|``. With ``certify`` each component is
    passed through :func:`certify_linearity` and keeps its coefficient when
    the fit is exact.
    """
    grid = tuple(as_fraction(g) for g in (sample_grid or DEFAULT_GRID))
    n = V.n
    F_cache: dict[tuple, Any] = {}

    def F(pt: tuple):
        if pt not in F_cache:
            F_cache[pt] = V(origin_box(pt))
        return F_cache[pt]

    comps: dict[frozenset[int], Component] = {}
    for I in subsets(n):
        k = len(I)
        comp = Component(k)
        proper = [J for J in comps if J < I]
        labels = sorted(I)
        for args in itertools.product(grid, repeat=k):
            value = F(_embed(n, I, args))
            for J in proper:
                sub = tuple(a for lab, a in zip(labels, args) if lab in J)
                value -= comps[J].samples[sub]
            comp.samples[args] = value
        comps[I] = comp
    family = ComponentFamily(n, comps)
    if certify:
        for I, comp in comps.items():
            cert = certify_linearity(comp, probe_count)
            if cert.certified:
                comp.coefficient = cert.coefficient
    return family


@dataclass(frozen=True)
class LinearityCertificate:
    coefficient: Any
    defect: Any
    certified: bool
    probes: int


def _minimax_coefficient(pairs: list[tuple[Any, Any]]):
    """Minimise ``max |g - c p|`` over ``c`` exactly (1-D Chebyshev fit)."""
    candidates = set()
    for g, p in pairs:
        if p != 0:
            candidates.add(g / p)
    for (g1, p1), (g2, p2) in itertools.combinations(pairs, 2):
        if p1 != p2:
            candidates.add((g1 - g2) / (p1 - p2))
        if p1 != -p2:
            candidates.add((g1 + g2) / (p1 + p2))
    if not candidates:
        candidates.add(Fraction(0))

    def err(c):
        return max(abs(g - c * p) for g, p in pairs)

    best = min(sorted(candidates), key=err)
    return best, err(best)


def certify_linearity(G: Component, probe_count: int = 16) -> LinearityCertificate:
    """Fit ``G(a) = c * prod(a)`` and report the worst defect on the probes.

    Probes are spread deterministically over the sampled points. The fit
    minimises the maximum defect; certification means that defect is exactly
    zero. Rational samples of a separately additive function always lie on
    such a form, so a nonzero defect points at a non-additive component.
    """
    if G.arity == 0:
        if G.samples:
            (value,) = G.samples.values()
        else:
            value = G.coefficient
        return LinearityCertificate(value, Fraction(0), True, 1)
    keys = sorted(G.samples)
    if not keys:
        return LinearityCertificate(None, None, False, 0)
    nonzero = [k for k in keys if all(x != 0 for x in k)]
    zero = [k for k in keys if k not in set(nonzero)]
    chosen = _spread(nonzero, max(probe_count - 2, 1)) + _spread(zero, 2)
    pairs = [(G.samples[k], math.prod(k, start=Fraction(1))) for k in chosen]
    if all(p == 0 for _, p in pairs):
        return LinearityCertificate(None, None, False, len(pairs))
    c, defect = _minimax_coefficient(pairs)
    return LinearityCertificate(c, defect, defect == 0, len(pairs))


def _spread(items: list, count: int) -> list:
    if len(items) <= count:
        return list(items)
    step = (len(items) - 1) / (count - 1) if count > 1 else 0
    return [items[round(i * step)] for i in range(count)]


# --------------------------------------------------------------------------
# homogeneity


@dataclass(frozen=True)
class HomogeneityFit:
    coefficients: tuple
    residual: Any

    @property
    def degrees(self) -> list[int]:
        return [j for j, c in enumerate(self.coefficients) if c != 0]


def _solve_exact(A: list[list], b: list) -> list:
    """Gaussian elimination over the rationals."""
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def homogeneity_fit(V: BoxValuationOracle, K: Box, lambdas: Sequence) -> HomogeneityFit:
    """Fit ``lambda -> V(lambda K)`` by a polynomial of degree ``n``.

    The first ``n + 1`` distinct samples determine the coefficients exactly
    (Vandermonde solve); the residual is the worst defect on the remaining,
    held-out samples.
    """
    lams = []
    for lam in lambdas:
        lam = as_fraction(lam)
        if lam > 0 and lam not in lams:
            lams.append(lam)
    n = K.n
    if len(lams) < n + 2:
        raise InsufficientSamples(
            f"need at least {n + 2} distinct positive scale factors, got {len(lams)}")
    fit_l, held = lams[: n + 1], lams[n + 1:]
    A = [[lam ** j for j in range(n + 1)] for lam in fit_l]
    b = [V(scale_translate(K, lam)) for lam in fit_l]
    coeffs = _solve_exact(A, b)
    residual = max(
        abs(V(scale_translate(K, lam)) - sum(c * lam ** j for j, c in enumerate(coeffs)))
        for lam in held
    )
    return HomogeneityFit(tuple(coeffs), residual)


# --------------------------------------------------------------------------
# endpoint decomposition (no translation invariance)


@dataclass
class EndpointFamily:
    """Functions ``F_idx`` with ``V(box) = sum F_idx(a_1^(i_1), ..., a_n^(i_n))``.

    ``idx`` ranges over ``{1, 2}**n``; index 1 picks the lower endpoint and
    2 the upper one. Only reconstructed values are meaningful: the family
    itself is not unique.
    """

    n: int
    terms: dict
    bound: Any = None

    def _check(self, coords: Iterable) -> None:
        if self.bound is None:
            return
        for x in coords:
            if abs(x) > self.bound:
                raise CoordinateOutOfRange(f"coordinate {x} exceeds bound {self.bound}")

    def term(self, idx: tuple[int, ...], point: Sequence) -> Any:
        point = tuple(as_fraction(x) for x in point)
        self._check(point)
        return self.terms[tuple(idx)](point)

    def __call__(self, K: Box) -> Any:
        if K is EMPTY:
            return 0
        self._check(x for pair in K.intervals for x in pair)
        total = 0
        for idx, fn in self.terms.items():
            total += fn(tuple(K.intervals[j][i - 1] for j, i in enumerate(idx)))
        return total

    def samples(self) -> dict:
        """Every value computed so far, per term."""
        out = {}
        for idx, fn in self.terms.items():
            cache = getattr(fn, "cache", None)
            out[idx] = dict(cache) if cache is not None else {}
        return out


class _Memo:
    def __init__(self, fn):
        self.fn = fn
        self.cache = {}

    def __call__(self, point):
        if point not in self.cache:
            self.cache[point] = self.fn(point)
        return self.cache[point]


def _interval_endpoint_pair(v: Callable[[Any, Any], Any]):
    """Working definitions for a valuation ``v(a, b)`` on intervals.

    ``v(a, b) = f(a) + g(b)`` with the constant ``v(0, 0)`` folded into g.
    """
    v0 = v(0, 0)

    def f(a):
        if a < 0:
            return v(a, 0) - v0
        if a == 0:
            return 0 * v0
        return -v(0, a) + v(a, a)

    def g(b):
        if b < 0:
            return -v(b, 0) + v(b, b) + v0
        if b == 0:
            return v0
        return v(0, b)

    return f, g


def endpoint_decompose_1d(V) -> EndpointFamily:
    """Split a valuation on intervals as ``V[a, b] = f(a) + g(b)``."""
    cache: dict = {}

    def v(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = V(make_box([(a, b)]))
        return cache[key]

    f, g = _interval_endpoint_pair(v)
    return EndpointFamily(1, {
        (1,): _Memo(lambda p: f(p[0])),
        (2,): _Memo(lambda p: g(p[0])),
    })


def _decompose(v: Callable[[tuple], Any], n: int, m: Fraction) -> dict:
    """Endpoint terms for ``v`` acting on tuples of n intervals."""
    if n == 1:
        f, g = _interval_endpoint_pair(lambda a, b: v(((a, b),)))
        return {(1,): lambda p: f(p[0]), (2,): lambda p: g(p[0])}

    zero = Fraction(0)

    @lru_cache(maxsize=None)
    def lower_part(a):
        return _decompose(_cached(lambda P: v(P + ((a, m),)) - v(P + ((zero, m),))), n - 1, m)

    @lru_cache(maxsize=None)
    def upper_part(b):
        return _decompose(_cached(lambda P: v(P + ((-m, b),)) - v(P + ((-m, zero),))), n - 1, m)

    flat = _decompose(_cached(lambda P: v(P + ((zero, zero),))), n - 1, m)

    terms = {}
    for idx in itertools.product((1, 2), repeat=n - 1):
        terms[idx + (1,)] = (lambda idx: lambda p: lower_part(p[-1])[idx](p[:-1]))(idx)
        terms[idx + (2,)] = (lambda idx: lambda p: upper_part(p[-1])[idx](p[:-1])
                             + flat[idx](p[:-1]))(idx)
    return terms


def _cached(fn):
    cache = {}

    def wrapped(P):
        if P not in cache:
            cache[P] = fn(P)
        return cache[P]

    return wrapped


def endpoint_decompose_nd(V, M) -> EndpointFamily:
    """Endpoint decomposition of a valuation on n-boxes inside ``[-M, M]^n``.

    The last axis is peeled with the interval lemma using the cut-off
    ``m = M + 1``: ``V(P + [a, b]) = F(P; a) + G(P; b) + V(P + {0})`` with
    ``F(P; a) = V(P + [a, m]) - V(P + [0, m])`` and
    ``G(P; b) = V(P + [-m, b]) - V(P + [-m, 0])``. Each of ``F(.; a)``,
    ``G(.; b)`` and ``V(. + {0})`` is a valuation in the remaining axes and is
    decomposed recursively. The differences do not depend on ``m`` once it
    exceeds every coordinate, so the finite cut-off is exact.
    """
    M = as_fraction(M)
    m = M + 1
    n = V.n

    @lru_cache(maxsize=None)
    def v(intervals: tuple):
        return V(Box(intervals))

    terms = _decompose(v, n, m)
    return EndpointFamily(n, {idx: _Memo(fn) for idx, fn in terms.items()}, M)


# --------------------------------------------------------------------------
# documents


def _subset_key(I: frozenset[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(I)) + "}"


def _parse_subset_key(key: str) -> frozenset[int]:
    key = key.strip()
    if not (key.startswith("{") and key.endswith("}")):
        raise MalformedDocument(f"bad subset key {key!r}")
    inner = key[1:-1].strip()
    return frozenset(int(x) for x in inner.split(",")) if inner else frozenset()


def _closed_form_str(c, I: frozenset[int]) -> str:
    c_s = rat_str(c) if isinstance(c, (int, Fraction)) else repr(c)
    return "*".join([c_s] + [f"a{i}" for i in sorted(I)])


def _parse_closed_form(text: str, I: frozenset[int]):
    parts = [p.strip() for p in text.split("*")]
    expected = [f"a{i}" for i in sorted(I)]
    if parts[1:] != expected:
        raise MalformedDocument(f"closed form {text!r} does not match subset {sorted(I)}")
    return as_fraction(parts[0])


def _value_str(x):
    return rat_str(x) if isinstance(x, (int, Fraction)) else x


def family_to_doc(C: ComponentFamily) -> dict:
    comps = {}
    for I in subsets(C.n):
        comp = C.components.get(I)
        if comp is None:
            continue
        entry = {"samples": [[[rat_str(a) for a in k], _value_str(v)]
                             for k, v in sorted(comp.samples.items())]}
        if comp.coefficient is not None:
            entry["certified"] = _closed_form_str(comp.coefficient, I)
        comps[_subset_key(I)] = entry
    return {"n": C.n, "components": comps}


def family_from_doc(doc) -> ComponentFamily:
    try:
        raw = doc["components"]
        parsed = {_parse_subset_key(k): v for k, v in raw.items()}
        n = doc.get("n") or max((max(I) for I in parsed if I), default=0)
        comps = {}
        for I, entry in parsed.items():
            comp = Component(len(I))
            for args, value in entry.get("samples", []):
                comp.samples[tuple(as_fraction(a) for a in args)] = (
                    as_fraction(value) if isinstance(value, (str, int)) else value)
            if "certified" in entry:
                comp.coefficient = _parse_closed_form(entry["certified"], I)
            comps[I] = comp
        for I in subsets(n):
            comps.setdefault(I, Component.monomial(0, len(I)))
        return ComponentFamily(n, comps)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, MalformedDocument):
            raise
        raise MalformedDocument(f"bad component family document: {exc}") from exc


def endpoint_family_to_doc(E: EndpointFamily) -> dict:
    terms = {}
    for idx, values in E.samples().items():
        terms[",".join(map(str, idx))] = {
            "samples": [[[rat_str(a) for a in k], _value_str(v)]
                        for k, v in sorted(values.items())]}
    return {"endpoint_family": {"n": E.n,
                                "bound": None if E.bound is None else rat_str(E.bound),
                                "terms": terms}}
