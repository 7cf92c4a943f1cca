"""Planar convex bodies bounded by segments and circular arcs.

A body is stored in normal-fan form: a list of features tiling the normal
circle ``[0, 2*pi)``. Each feature is a circle ``(cx, cy, r)`` held over an
interval of outer-normal angles; ``r == 0`` is a vertex. Edges are implicit:
where one feature ends and the next starts, the boundary runs straight from
the end point of the first to the start point of the second, with outer
normal equal to the breakpoint angle.

On a feature the support function is ``h(theta) = <c, u(theta)> + r``, which
makes Minkowski sums a merge-and-add over the two fans. Points and segments
use the same representation (a segment is two vertices, each covering half
the circle) so that every operation handles degenerate inputs without special
cases. The empty set is :data:`~valuationlab.core.EMPTY`.

Scalars are floats. Geometric comparisons use ``TOL_GEOM`` and feature
bookkeeping uses ``TOL_ALG``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

from .core import (
    EMPTY,
    TAU,
    DegeneratePoint,
    DuplicatePoint,
    EmptyBody,
    NonpositiveRadius,
    NotConvex,
)

TOL_GEOM = 1e-9
TOL_ALG = 1e-12


class Feature(NamedTuple):
    start: float
    end: float
    cx: float
    cy: float
    r: float = 0.0

    @property
    def width(self) -> float:
        return self.end - self.start

    def point_at(self, theta: float) -> tuple[float, float]:
        return (self.cx + self.r * math.cos(theta), self.cy + self.r * math.sin(theta))

    @property
    def start_point(self) -> tuple[float, float]:
        return self.point_at(self.start)

    @property
    def end_point(self) -> tuple[float, float]:
        return self.point_at(self.end)

    def support(self, theta: float) -> float:
        return self.cx * math.cos(theta) + self.cy * math.sin(theta) + self.r

    def moved(self, start: float, end: float) -> "Feature":
        return Feature(start, end, self.cx, self.cy, self.r)


def _same_circle(f: Feature, g: Feature) -> bool:
    return (abs(f.cx - g.cx) <= TOL_ALG and abs(f.cy - g.cy) <= TOL_ALG
            and abs(f.r - g.r) <= TOL_ALG)


def _cross(p, q) -> float:
    return p[0] * q[1] - p[1] * q[0]


def _dist(p, q) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def _normalize(feats: Sequence[Feature], origin: float = 0.0,
               merge: bool = True) -> tuple[Feature, ...]:
    """Re-express contiguous features spanning one turn in a canonical frame.

    Angles are shifted by ``-origin`` and wrapped into ``[0, 2*pi]``, the
    feature straddling the wrap point is split, identical neighbours are
    merged (never across the wrap point) and features narrower than
    ``TOL_ALG`` are absorbed into a neighbour.
    """
    if not feats:
        return ()
    s = feats[0].start - origin
    shift = s - math.floor(s / TAU) * TAU - s
    pieces: list[Feature] = []
    for f in feats:
        a, b = f.start - origin + shift, f.end - origin + shift
        if b <= TAU:
            pieces.append(f.moved(a, b))
        elif a >= TAU:
            pieces.append(f.moved(a - TAU, b - TAU))
        else:
            pieces.append(f.moved(a, TAU))
            pieces.append(f.moved(0.0, b - TAU))
    pieces.sort(key=lambda f: f.start)
    out: list[Feature] = []
    for f in pieces:
        if out and f.width < TOL_ALG:
            out[-1] = out[-1].moved(out[-1].start, f.end)
            continue
        if out and merge and _same_circle(out[-1], f):
            out[-1] = out[-1].moved(out[-1].start, f.end)
            continue
        if out and out[-1].width < TOL_ALG:
            out[-1] = f.moved(out[-1].start, f.end)
            continue
        out.append(f)
    out[0] = out[0].moved(0.0, out[0].end)
    out[-1] = out[-1].moved(out[-1].start, TAU)
    return tuple(out)


@dataclass(frozen=True)
class ArcGon:
    """A nonempty planar convex body in normal-fan form."""

    features: tuple[Feature, ...]

    # -- structure ---------------------------------------------------------

    @property
    def arcs(self) -> list[Feature]:
        return [f for f in self.features if f.r > 0]

    @property
    def vertices(self) -> list[tuple[float, float]]:
        """Distinct vertex points in boundary order."""
        pts: list[tuple[float, float]] = []
        for f in self.features:
            if f.r == 0:
                p = (f.cx, f.cy)
                if not pts or _dist(pts[-1], p) > TOL_ALG:
                    pts.append(p)
        if len(pts) > 1 and _dist(pts[0], pts[-1]) <= TOL_ALG:
            pts.pop()
        return pts

    def edges(self) -> list[tuple[float, tuple, tuple]]:
        """Straight pieces ``(normal angle, start, end)``, zero-length ones dropped."""
        out = []
        feats = self.features
        for i, g in enumerate(feats):
            f = feats[i - 1]
            P, Q = f.end_point, g.start_point
            if _dist(P, Q) > TOL_ALG:
                out.append((g.start, P, Q))
        return out

    @property
    def kind(self) -> str:
        """``"body"``, ``"segment"`` or ``"point"``."""
        if any(f.r > 0 for f in self.features):
            return "body"
        pts = self.vertices
        if len(pts) == 1:
            return "point"
        p0 = pts[0]
        far = max(pts, key=lambda p: _dist(p0, p))
        d = (far[0] - p0[0], far[1] - p0[1])
        norm = math.hypot(*d)
        scale = max(1.0, max(abs(c) for p in pts for c in p))
        for p in pts:
            if abs(_cross(d, (p[0] - p0[0], p[1] - p0[1]))) / norm > TOL_GEOM * scale:
                return "body"
        return "segment"

    @property
    def dimension(self) -> int:
        return {"body": 2, "segment": 1, "point": 0}[self.kind]

    @cached_property
    def _starts(self) -> list[float]:
        return [f.start for f in self.features]

    def feature_at(self, theta: float) -> Feature:
        theta = theta % TAU
        i = bisect.bisect_right(self._starts, theta) - 1
        return self.features[max(i, 0)]

    def support(self, theta: float) -> float:
        return self.feature_at(theta).support(theta)

    def __repr__(self) -> str:
        return f"ArcGon({self.kind}, {len(self.features)} features)"


# --------------------------------------------------------------------------
# constructors


def from_features(feats: Sequence[Feature]) -> ArcGon:
    return ArcGon(_normalize(feats))


def point(p: Sequence[float]) -> ArcGon:
    return ArcGon((Feature(0.0, TAU, float(p[0]), float(p[1]), 0.0),))


def segment(p: Sequence[float], q: Sequence[float]) -> ArcGon:
    """The segment ``[p, q]``; collapses to a point when ``p == q``."""
    p = (float(p[0]), float(p[1]))
    q = (float(q[0]), float(q[1]))
    if _dist(p, q) <= TOL_ALG:
        return point(p)
    th = math.atan2(q[1] - p[1], q[0] - p[0])
    return from_features([
        Feature(th - math.pi / 2, th + math.pi / 2, q[0], q[1]),
        Feature(th + math.pi / 2, th + 3 * math.pi / 2, p[0], p[1]),
    ])


def disk(center: Sequence[float], r: float) -> ArcGon:
    r = float(r)
    if not r > 0:
        raise NonpositiveRadius(f"radius {r} is not positive")
    return ArcGon((Feature(0.0, TAU, float(center[0]), float(center[1]), r),))


def from_polygon(vertices: Sequence[Sequence[float]]) -> ArcGon:
    """Convex polygon from its vertices in counter-clockwise order.

    Clockwise input is reversed. Repeated points raise
    :class:`DuplicatePoint`; collinear triples, reflex corners and
    self-overlapping windings raise :class:`NotConvex`.
    """
    pts = [(float(x), float(y)) for x, y in vertices]
    if len(pts) < 3:
        raise NotConvex("a polygon needs at least 3 vertices")
    scale = max(1.0, max(abs(c) for p in pts for c in p))
    by_x = sorted(pts)
    for i, p in enumerate(by_x):
        for q in by_x[i + 1:]:
            if q[0] - p[0] > TOL_ALG * scale:
                break
            if _dist(p, q) <= TOL_ALG * scale:
                raise DuplicatePoint(f"repeated vertex {p}")
    n = len(pts)
    edges = [(pts[(i + 1) % n][0] - pts[i][0], pts[(i + 1) % n][1] - pts[i][1])
             for i in range(n)]
    turns = [_cross(edges[i - 1], edges[i]) / (math.hypot(*edges[i - 1]) * math.hypot(*edges[i]))
             for i in range(n)]
    if all(t < 0 for t in turns):
        return from_polygon(pts[::-1])
    if any(t <= TOL_ALG for t in turns):
        raise NotConvex("polygon has a collinear or reflex corner")
    normals = [math.atan2(-dx, dy) for dx, dy in edges]
    total = 0.0
    feats = []
    angle = normals[0]
    for i in range(n):
        step = (normals[(i + 1) % n] - normals[i]) % TAU
        feats.append(Feature(angle, angle + step, *pts[(i + 1) % n]))
        angle += step
        total += step
    if abs(total - TAU) > 1e-6:
        raise NotConvex("polygon winds more than once")
    return from_features(feats)


def from_box(K) -> ArcGon:
    """A 2-dimensional :class:`~valuationlab.boxes.Box` as an ArcGon."""
    (x0, x1), (y0, y1) = [(float(lo), float(hi)) for lo, hi in K.intervals]
    if x0 == x1 or y0 == y1:
        return segment((x0, y0), (x1, y1))
    return from_polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


# --------------------------------------------------------------------------
# transformations


def _nonempty(K) -> ArcGon:
    if K is EMPTY:
        raise EmptyBody("operation undefined on the empty set")
    return K


def translate(K, v: Sequence[float]):
    if K is EMPTY:
        return EMPTY
    return ArcGon(tuple(Feature(f.start, f.end, f.cx + v[0], f.cy + v[1], f.r)
                        for f in K.features))


def scale(K, lam: float):
    if K is EMPTY:
        return EMPTY
    if lam < 0:
        raise ValueError("negative scale")
    if lam == 0:
        return point((0.0, 0.0))
    return ArcGon(tuple(Feature(f.start, f.end, lam * f.cx, lam * f.cy, lam * f.r)
                        for f in K.features))


def _merged_breaks(K: ArcGon, L: ArcGon) -> list[float]:
    return sorted({f.start for f in K.features} | {f.start for f in L.features} | {TAU})


def minkowski_sum(K, L):
    K, L = _nonempty(K), _nonempty(L)
    breaks = _merged_breaks(K, L)
    feats = []
    for a, b in zip(breaks, breaks[1:]):
        if b - a <= 0:
            continue
        mid = 0.5 * (a + b)
        f, g = K.feature_at(mid), L.feature_at(mid)
        feats.append(Feature(a, b, f.cx + g.cx, f.cy + g.cy, f.r + g.r))
    return from_features(feats)


# --------------------------------------------------------------------------
# sinusoid extremisation


def _sinusoid_range(dx: float, dy: float, c: float, a: float, b: float) -> tuple[float, float]:
    """Min and max of ``dx cos(t) + dy sin(t) + c`` over ``t`` in ``[a, b]``."""
    vals = [dx * math.cos(a) + dy * math.sin(a), dx * math.cos(b) + dy * math.sin(b)]
    R = math.hypot(dx, dy)
    if R > 0:
        psi = math.atan2(dy, dx)
        for crit, val in ((psi, R), (psi + math.pi, -R)):
            k = math.ceil((a - crit) / TAU)
            if crit + k * TAU <= b:
                vals.append(val)
    return min(vals) + c, max(vals) + c


def hausdorff(K, L) -> float:
    """``sup |h_K - h_L|`` over the circle, maximised in closed form per interval."""
    K, L = _nonempty(K), _nonempty(L)
    breaks = _merged_breaks(K, L)
    best = 0.0
    for a, b in zip(breaks, breaks[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        f, g = K.feature_at(mid), L.feature_at(mid)
        lo, hi = _sinusoid_range(f.cx - g.cx, f.cy - g.cy, f.r - g.r, a, b)
        best = max(best, abs(lo), abs(hi))
    return best


def contains(K, p: Sequence[float], tol: float | None = None) -> bool:
    """Whether ``p`` lies in ``K`` up to ``tol`` (default ``TOL_GEOM``)."""
    tol = TOL_GEOM if tol is None else tol
    if K is EMPTY:
        return False
    for f in K.features:
        lo, _ = _sinusoid_range(f.cx - p[0], f.cy - p[1], f.r, f.start, f.end)
        if lo < -tol:
            return False
    return True


def max_norm(K) -> float:
    """``max |x|`` over ``x`` in ``K``, i.e. the maximum of the support function."""
    K = _nonempty(K)
    return max(_sinusoid_range(f.cx, f.cy, f.r, f.start, f.end)[1] for f in K.features)


# --------------------------------------------------------------------------
# measurements


def area(K) -> float:
    if K is EMPTY:
        return 0.0
    total = 0.0
    for f in K.features:
        if f.r > 0:
            a, b, r = f.start, f.end, f.r
            total += (r * f.cx * (math.sin(b) - math.sin(a))
                      - r * f.cy * (math.cos(b) - math.cos(a))
                      + r * r * (b - a))
    for _, P, Q in K.edges():
        total += _cross(P, Q)
    return 0.5 * total


def perimeter(K) -> float:
    if K is EMPTY:
        return 0.0
    arc = math.fsum(f.r * f.width for f in K.features)
    return arc + math.fsum(_dist(P, Q) for _, P, Q in K.edges())


@dataclass(frozen=True)
class SphereMeasure:
    """Atoms ``(angle, mass)`` plus a density given by ``(start, end, r)`` pieces."""

    atoms: tuple[tuple[float, float], ...]
    density: tuple[tuple[float, float, float], ...]

    def total_mass(self) -> float:
        return math.fsum([m for _, m in self.atoms] + [r * (b - a) for a, b, r in self.density])

    def singular_mass(self) -> float:
        return math.fsum(m for _, m in self.atoms)


def surface_measure(K) -> SphereMeasure:
    if K is EMPTY or K.kind == "point":
        raise DegeneratePoint("surface measure of a point or the empty set")
    atoms = tuple(sorted((theta % TAU, _dist(P, Q)) for theta, P, Q in K.edges()))
    density = tuple((f.start, f.end, f.r) for f in K.features if f.r > 0)
    return SphereMeasure(atoms, density)


def check_closure(K, tol: float | None = None) -> bool:
    """Each implicit edge must be perpendicular to its normal and run counter-clockwise."""
    tol = TOL_GEOM if tol is None else tol
    if K is EMPTY:
        return True
    feats = K.features
    if abs(feats[0].start) > TOL_ALG or abs(feats[-1].end - TAU) > TOL_ALG:
        return False
    for i, g in enumerate(feats):
        f = feats[i - 1]
        if i and abs(f.end - g.start) > TOL_ALG:
            return False
        if f.r < 0 or g.width < 0:
            return False
        P, Q = f.end_point, g.start_point
        E = (Q[0] - P[0], Q[1] - P[1])
        th = g.start
        if abs(E[0] * math.cos(th) + E[1] * math.sin(th)) > tol:
            return False
        if -E[0] * math.sin(th) + E[1] * math.cos(th) < -tol:
            return False
    return True


# --------------------------------------------------------------------------
# clipping


def face(K, theta: float):
    """The face of ``K`` with outer normal ``theta`` (a point or a segment)."""
    K = _nonempty(K)
    h = K.support(theta)
    u = (math.cos(theta), math.sin(theta))
    tangent = (-u[1], u[0])
    cands = []
    for f in K.features:
        cands.extend([f.start_point, f.end_point])
    cands.append(K.feature_at(theta).point_at(theta))
    scale_ = max(1.0, abs(h))
    on = [p for p in cands if p[0] * u[0] + p[1] * u[1] >= h - TOL_GEOM * scale_]
    lo = min(on, key=lambda p: p[0] * tangent[0] + p[1] * tangent[1])
    hi = max(on, key=lambda p: p[0] * tangent[0] + p[1] * tangent[1])
    return segment(lo, hi)


def _split_at(feats: list[Feature], angle: float) -> list[Feature]:
    out = []
    for f in feats:
        if f.start < angle < f.end:
            out.append(f.moved(f.start, angle))
            out.append(f.moved(angle, f.end))
        else:
            out.append(f)
    return out


def clip_halfplane(K, u: Sequence[float], t: float, tol: float | None = None):
    """``K`` intersected with ``{x : <x, u> <= t}`` for a unit vector ``u``.

    The boundary is walked from the lowest point (normal ``-u``) towards the
    highest one on both sides; the first crossing of the line on each side is
    inserted as a new vertex and everything beyond is replaced by the chord,
    whose normal is ``u``.
    """
    if K is EMPTY:
        return EMPTY
    tol = TOL_ALG if tol is None else tol
    ux, uy = float(u[0]), float(u[1])
    th_u = math.atan2(uy, ux) % TAU
    hmax = K.support(th_u)
    hmin = -K.support(th_u + math.pi)
    scale_ = max(1.0, abs(hmax), abs(hmin))
    if hmax <= t + tol * scale_:
        return K
    if hmin > t + tol * scale_:
        return EMPTY
    if abs(hmin - t) <= tol * scale_:
        return face(K, th_u + math.pi)

    origin = th_u + math.pi
    feats = _split_at(list(_normalize(K.features, origin, merge=False)), math.pi)

    def sp(f: Feature):
        return f.point_at(f.start + origin)

    def ep(f: Feature):
        return f.point_at(f.end + origin)

    def val(p):
        return p[0] * ux + p[1] * uy

    def solve(f: Feature, upper: bool) -> float:
        w = (t - (f.cx * ux + f.cy * uy)) / f.r
        w = min(1.0, max(-1.0, w))
        return math.pi + math.acos(w) if upper else math.pi - math.acos(w)

    side1 = [f for f in feats if f.end <= math.pi + 1e-15]
    side2 = [f for f in feats if f.start >= math.pi - 1e-15]

    kept1: list[Feature] = []
    x1 = phi1 = None
    prev_end = ep(side2[-1]) if side2 else sp(side1[0])
    for f in side1:
        s, e = sp(f), ep(f)
        if val(prev_end) <= t < val(s):
            lam = (t - val(prev_end)) / (val(s) - val(prev_end))
            x1 = (prev_end[0] + lam * (s[0] - prev_end[0]), prev_end[1] + lam * (s[1] - prev_end[1]))
            phi1 = f.start
            break
        if f.r > 0 and val(s) <= t < val(e):
            rho = min(max(solve(f, False), f.start), f.end)
            kept1.append(f.moved(f.start, rho))
            x1, phi1 = f.point_at(rho + origin), rho
            break
        kept1.append(f)
        prev_end = e
    if x1 is None:  # crossing lies on the edge at rho = pi
        e = prev_end
        s = sp(side2[0])
        lam = (t - val(e)) / (val(s) - val(e)) if val(s) != val(e) else 0.0
        x1 = (e[0] + lam * (s[0] - e[0]), e[1] + lam * (s[1] - e[1]))
        phi1 = math.pi

    kept2: list[Feature] = []
    x2 = phi2 = None
    next_start = sp(side1[0]) if side1 else ep(side2[-1])
    for f in reversed(side2):
        s, e = sp(f), ep(f)
        if val(next_start) <= t < val(e):
            lam = (t - val(next_start)) / (val(e) - val(next_start))
            x2 = (next_start[0] + lam * (e[0] - next_start[0]),
                  next_start[1] + lam * (e[1] - next_start[1]))
            phi2 = f.end
            break
        if f.r > 0 and val(e) <= t < val(s):
            rho = min(max(solve(f, True), f.start), f.end)
            kept2.append(f.moved(rho, f.end))
            x2, phi2 = f.point_at(rho + origin), rho
            break
        kept2.append(f)
        next_start = s
    if x2 is None:
        s = next_start
        e = ep(side1[-1])
        lam = (t - val(s)) / (val(e) - val(s)) if val(e) != val(s) else 0.0
        x2 = (s[0] + lam * (e[0] - s[0]), s[1] + lam * (e[1] - s[1]))
        phi2 = math.pi
    kept2.reverse()

    new = kept1 + [Feature(phi1, math.pi, x1[0], x1[1]), Feature(math.pi, phi2, x2[0], x2[1])] + kept2
    new = [f.moved(f.start + origin, f.end + origin) for f in new if f.end >= f.start]
    return from_features(new)


def clip_box(K, x0: float, x1: float, y0: float, y1: float):
    """``K`` intersected with the rectangle ``[x0, x1] x [y0, y1]``."""
    for u, t in (((1.0, 0.0), x1), ((-1.0, 0.0), -x0), ((0.0, 1.0), y1), ((0.0, -1.0), -y0)):
        K = clip_halfplane(K, u, t)
        if K is EMPTY:
            return EMPTY
    return K


# --------------------------------------------------------------------------
# parallel bodies and sampling


def inner_parallel_area(K, s: float):
    """Area of ``K`` eroded by a disk of radius ``s``, or ``None`` if unsupported.

    Exact for disks and for polygons (intersection of inward-shifted edge
    half-planes). Bodies mixing arcs and edges return ``None``.
    """
    if K is EMPTY:
        return 0.0
    arcs = K.arcs
    if arcs:
        if all(_same_circle(arcs[0], f) for f in K.features):
            r = arcs[0].r
            return math.pi * max(r - s, 0.0) ** 2
        return None
    if K.kind != "body":
        return 0.0
    E = K
    for theta, _, _ in K.edges():
        u = (math.cos(theta), math.sin(theta))
        E = clip_halfplane(E, u, K.support(theta) - s)
        if E is EMPTY:
            return 0.0
    return area(E)


def boundary_points(K, spacing: float) -> list[tuple[float, float]]:
    """Points along the boundary at most ``spacing`` apart."""
    K = _nonempty(K)
    pts = []
    for f in K.features:
        if f.r > 0:
            k = max(1, math.ceil(f.r * f.width / spacing))
            pts.extend(f.point_at(f.start + f.width * i / k) for i in range(k + 1))
        else:
            pts.append((f.cx, f.cy))
    for _, P, Q in K.edges():
        k = max(1, math.ceil(_dist(P, Q) / spacing))
        pts.extend((P[0] + (Q[0] - P[0]) * i / k, P[1] + (Q[1] - P[1]) * i / k)
                   for i in range(k + 1))
    return pts


def contains_many(K, xs, ys, tol: float | None = None):
    """Vectorised :func:`contains` over coordinate arrays."""
    import numpy as np

    tol = TOL_GEOM if tol is None else tol
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    inside = np.ones(xs.shape, dtype=bool)
    if K is EMPTY:
        return ~inside
    for f in K.features:
        dx, dy = f.cx - xs, f.cy - ys
        lo = np.minimum(dx * math.cos(f.start) + dy * math.sin(f.start),
                        dx * math.cos(f.end) + dy * math.sin(f.end))
        # interior minimum sits at psi + pi where psi = atan2(dy, dx)
        crit = np.arctan2(dy, dx) + math.pi
        k = np.ceil((f.start - crit) / TAU)
        hit = crit + k * TAU <= f.end
        lo = np.where(hit, -np.hypot(dx, dy), lo)
        inside &= lo + f.r >= -tol
    return inside
