"""Concrete valuations on planar bodies and boxes.

Each valuation is a small immutable spec object with ``on_body`` (ArcGon)
and ``on_box`` (Box) methods; :func:`evaluate` dispatches and maps the empty
set to 0. Values on boxes are exact rationals whenever the valuation allows.

Curvature-power valuations integrate ``kappa ** l`` over the boundary. On an
ArcGon the curvature is ``1 / r`` on arcs and 0 on edges, so the integral is
the finite sum ``sum r ** (1 - l) * dtheta`` over arcs, with ``0 ** 0 = 0``
on edges.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from . import arcgon as ag
from .boxes import Box, scale_translate
from .core import EMPTY, TAU, UnsupportedBody, ZeroBaseValue
from .decomposition import BoxValuationOracle, ComponentFamily, reconstruct

# --------------------------------------------------------------------------
# functions on the circle


@dataclass(frozen=True)
class PiecewiseConstant:
    """Piecewise constant function on ``[0, 2*pi)`` with left-closed pieces."""

    pieces: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        ps = sorted((float(a), float(b), float(v)) for a, b, v in self.pieces)
        if not ps or abs(ps[0][0]) > 1e-12 or abs(ps[-1][1] - TAU) > 1e-12:
            raise ValueError("pieces must tile [0, 2*pi)")
        for (_, b, _), (a, _, _) in zip(ps, ps[1:]):
            if abs(a - b) > 1e-12:
                raise ValueError("pieces must be contiguous")
        object.__setattr__(self, "pieces", tuple(ps))

    @property
    def continuous(self) -> bool:
        return len({v for _, _, v in self.pieces}) == 1

    def __call__(self, theta: float) -> float:
        theta = theta % TAU
        for a, b, v in self.pieces:
            if a <= theta < b:
                return v
        return self.pieces[-1][2]

    def integral(self, a: float, b: float) -> float:
        """``int_a^b f`` for ``0 <= a <= b <= 2*pi``."""
        return math.fsum(v * max(0.0, min(b, pb) - max(a, pa)) for pa, pb, v in self.pieces)


@dataclass(frozen=True)
class TrigPolynomial:
    """``a[0] + sum_k (a[k] cos(k t) + b[k] sin(k t))``; ``b[0]`` is ignored."""

    a: tuple[float, ...]
    b: tuple[float, ...] = ()

    continuous = True

    def _coeffs(self):
        deg = max(len(self.a), len(self.b))
        a = list(self.a) + [0.0] * (deg - len(self.a))
        b = list(self.b) + [0.0] * (deg - len(self.b))
        return a, b

    def __call__(self, theta: float) -> float:
        a, b = self._coeffs()
        out = a[0] if a else 0.0
        for k in range(1, len(a)):
            out += a[k] * math.cos(k * theta) + b[k] * math.sin(k * theta)
        return out

    def integral(self, lo: float, hi: float) -> float:
        a, b = self._coeffs()
        out = (a[0] if a else 0.0) * (hi - lo)
        for k in range(1, len(a)):
            out += (a[k] * (math.sin(k * hi) - math.sin(k * lo))
                    - b[k] * (math.cos(k * hi) - math.cos(k * lo))) / k
        return out


SphereFunction = PiecewiseConstant | TrigPolynomial


def integrate_measure(mu: ag.SphereMeasure, f) -> float:
    atoms = [m * f(theta) for theta, m in mu.atoms]
    dens = [r * f.integral(a, b) for a, b, r in mu.density]
    return math.fsum(atoms + dens)


# --------------------------------------------------------------------------
# valuation specs


def _surface_area(K: Box) -> Fraction:
    sides = K.sides
    return 2 * sum(
        (math.prod((s for j, s in enumerate(sides) if j != i), start=Fraction(1))
         for i in range(len(sides))),
        Fraction(0),
    )


def _planar(K: Box, what: str) -> ag.ArcGon:
    if K.n != 2:
        raise UnsupportedBody(f"{what} is only implemented on planar boxes, got n={K.n}")
    return ag.from_box(K)


@dataclass(frozen=True)
class Vol:
    degree = 2

    def on_body(self, K) -> float:
        return ag.area(K)

    def on_box(self, K: Box) -> Fraction:
        return K.volume()


@dataclass(frozen=True)
class Euler:
    degree = 0

    def on_body(self, K) -> int:
        return 1

    def on_box(self, K: Box) -> int:
        return 1


@dataclass(frozen=True)
class Perimeter:
    """Boundary length; lower-dimensional bodies count both sides."""

    degree = 1

    def on_body(self, K) -> float:
        return ag.perimeter(K)

    def on_box(self, K: Box) -> Fraction:
        return _surface_area(K)


@dataclass(frozen=True)
class PhiL:
    """Curvature power ``int kappa ** l``; bounded on the unit disk for ``0 <= l <= 1``."""

    l: float

    @property
    def degree(self) -> float:
        return 1 - self.l

    @property
    def bounded(self) -> bool:
        return 0 <= self.l <= 1

    def on_body(self, K) -> float:
        if K.kind != "body":
            return 0.0
        if self.l < 0 and K.edges():
            return math.inf
        e = 1 - self.l
        return math.fsum(f.r ** e * f.width for f in K.arcs)

    def on_box(self, K: Box):
        if K.n != 2:
            raise UnsupportedBody("curvature powers are only implemented in the plane")
        if self.l < 0 and K.dimension == 2:
            return math.inf
        return Fraction(0)


@dataclass(frozen=True)
class PhiF:
    """``int f dS`` against the surface area measure."""

    f: Any
    degree = 1

    def on_body(self, K) -> float:
        if K.kind == "point":
            return 0.0
        return integrate_measure(ag.surface_measure(K), self.f)

    def on_box(self, K: Box) -> float:
        return self.on_body(_planar(K, "phi_f"))


@dataclass(frozen=True)
class PhiSing:
    """Total mass of the atomic part of the surface area measure."""

    degree = 1

    def on_body(self, K) -> float:
        if K.kind == "point":
            return 0.0
        return ag.surface_measure(K).singular_mass()

    def on_box(self, K: Box):
        if K.n == 2:
            return _surface_area(K)
        raise UnsupportedBody("singular part is only implemented in the plane")


@dataclass(frozen=True)
class Composite:
    """The box valuation with a given component family."""

    family: ComponentFamily = field(compare=False)
    degree = None

    def on_body(self, K):
        raise UnsupportedBody("a component family only defines a valuation on boxes")

    def on_box(self, K: Box):
        return reconstruct(self.family)(K)


@dataclass(frozen=True)
class Combination:
    """Finite linear combination ``sum coef * V``."""

    terms: tuple[tuple[Any, Any], ...]

    @property
    def degree(self):
        degs = {V.degree for c, V in self.terms if c != 0}
        return degs.pop() if len(degs) == 1 else None

    def on_body(self, K):
        return sum(_mul(c, V.on_body(K)) for c, V in self.terms)

    def on_box(self, K: Box):
        return sum(_mul(c, V.on_box(K)) for c, V in self.terms)


def _mul(c, x):
    if isinstance(c, Fraction) and isinstance(x, float):
        return float(c) * x
    return c * x


@dataclass(frozen=True)
class BoxFunction:
    """A user-supplied set function on boxes, not necessarily a valuation."""

    oracle: BoxValuationOracle = field(compare=False)
    degree = None

    def on_body(self, K):
        raise UnsupportedBody("this valuation is only defined on boxes")

    def on_box(self, K: Box):
        return self.oracle(K)


def evaluate(V, K):
    if K is EMPTY:
        return 0
    if isinstance(K, Box):
        return V.on_box(K)
    return V.on_body(K)


def box_oracle(V, n: int = 2) -> BoxValuationOracle:
    """Restriction of ``V`` to n-dimensional boxes."""
    if isinstance(V, BoxFunction):
        return V.oracle
    return BoxValuationOracle(V.on_box, n, True, type(V).__name__)


# --------------------------------------------------------------------------
# generic body helpers


def scale_body(K, lam):
    if K is EMPTY:
        return EMPTY
    if isinstance(K, Box):
        return scale_translate(K, lam)
    return ag.scale(K, float(lam))


def translate_body(K, v: Sequence):
    if K is EMPTY:
        return EMPTY
    if isinstance(K, Box):
        return scale_translate(K, 1, v)
    return ag.translate(K, v)


# --------------------------------------------------------------------------
# probes


def weak_additivity_check(V, K, u: Sequence[float], t: float) -> float:
    """``|V(K) + V(K n H) - V(K n H+) - V(K n H-)|`` for ``H = {<x, u> = t}``."""
    lower = ag.clip_halfplane(K, u, t)
    upper = ag.clip_halfplane(K, (-u[0], -u[1]), -t)
    chord = ag.clip_halfplane(lower, (-u[0], -u[1]), -t)
    return abs(evaluate(V, K) + evaluate(V, chord) - evaluate(V, lower) - evaluate(V, upper))


@dataclass(frozen=True)
class HomogeneityProbe:
    degree: float
    defect: float


def homogeneity_probe(V, K, lambdas: Iterable) -> HomogeneityProbe:
    """Degree estimate: the median of ``log(V(lam K) / V(K)) / log(lam)``."""
    base = float(evaluate(V, K))
    if base == 0 or not math.isfinite(base):
        raise ZeroBaseValue(f"V(K) = {base}; degree cannot be probed")
    ratios = []
    for lam in lambdas:
        if lam <= 0:
            raise ValueError("scale factors must be positive")
        if lam == 1:
            continue
        ratios.append((float(lam), float(evaluate(V, scale_body(K, lam))) / base))
    if not ratios:
        raise ValueError("need a scale factor different from 1")
    degs = [math.log(r) / math.log(lam) if r > 0 else math.nan for lam, r in ratios]
    m = statistics.median(degs)
    defect = max(abs(r - lam ** m) for lam, r in ratios)
    return HomogeneityProbe(m, defect)


@dataclass(frozen=True)
class BoundednessReport:
    sup: float
    bound: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.sup <= self.bound


def boundedness_probe(V, bodies: Iterable, bound: float = TAU + 1e-9) -> BoundednessReport:
    vals = [abs(float(evaluate(V, K))) for K in bodies]
    return BoundednessReport(max(vals, default=0.0), bound, len(vals))


def vanishes_on_boxes(V, cells: Iterable[Box], tol: float = 1e-12) -> bool:
    return all(abs(float(evaluate(V, ag.from_box(c)))) <= tol for c in cells)


def weak_additivity_sweep(V, bodies: Iterable, cuts_per_body: int = 1,
                          seed: int = 0) -> list[float]:
    """Weak-additivity defects for random lines through each body."""
    import random

    rng = random.Random(seed)
    out = []
    for K in bodies:
        for _ in range(cuts_per_body):
            th = rng.uniform(0, TAU)
            u = (math.cos(th), math.sin(th))
            hi, lo = K.support(th), -K.support(th + math.pi)
            t = lo + rng.uniform(-0.1, 1.1) * (hi - lo)
            out.append(weak_additivity_check(V, K, u, t))
    return out
