"""Grid cutting, boundary-cell counting and the experiments built on them.

A body ``K`` inside the disk of radius ``M`` is cut by the lines
``x = -M + l * eps`` one at a time: each cut splits the remaining piece into
a lower part, an upper part and the chord between them, and weak additivity
gives ``V(rest) = V(lower) + V(upper) - V(chord)``. The x-slabs are then cut
the same way along y. Cells carry sign +1 and every chord carries sign -1,
so for a weakly additive ``V`` the signed sum over all pieces equals
``V(K)`` exactly.

Cells meeting ``K`` in positive area without lying inside it form the
boundary set ``J``. They all lie in the annulus between the outer and inner
parallel bodies at distance ``sqrt(2) * eps``, which bounds ``|J| * eps**2``.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from . import arcgon as ag
from .core import (
    EMPTY,
    TAU,
    BodyExceedsM,
    EpsilonTooLarge,
    NotVanishingOnBoxes,
    SequenceNotConverging,
    ZeroBaseValue,
)
from .corpus import random_bodies
from .decomposition import certify_linearity, extract_components
from .valuations import (
    BoundednessReport,
    Combination,
    PiecewiseConstant,
    Vol,
    box_oracle,
    boundedness_probe,
    evaluate,
    homogeneity_probe,
    translate_body,
)

AREA_TOL = 1e-12


@dataclass(frozen=True)
class Piece:
    body: Any
    sign: int
    tag: str  # "cell" or "slice"
    index: tuple


@dataclass
class SignedPieces:
    pieces: list
    M: float
    eps: float
    cells_per_axis: int

    def signed_sum(self, V, threads: int | None = None) -> float:
        def term(p: Piece) -> float:
            return p.sign * float(evaluate(V, p.body))

        return math.fsum(_map(term, self.pieces, threads))

    @property
    def cells(self) -> list:
        return [p for p in self.pieces if p.tag == "cell"]


def _map(fn, items, threads: int | None):
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _check_grid(K, eps: float, M: float) -> int:
    if not eps > 0:
        raise ValueError("eps must be positive")
    if eps >= M:
        raise EpsilonTooLarge(f"eps={eps} is not below M={M}")
    if K is not EMPTY and ag.max_norm(K) > M * (1 + 1e-12):
        raise BodyExceedsM(f"body reaches {ag.max_norm(K)}, beyond M={M}")
    return math.ceil(2 * M / eps - 1e-9)


def _sweep(K, u: tuple[float, float], cuts: Sequence[float]):
    """Cut ``K`` by ``<x, u> = c`` for increasing ``c``; returns (parts, chords)."""
    neg = (-u[0], -u[1])
    parts, chords = [], []
    rest = K
    for l, c in enumerate(cuts, start=1):
        if rest is EMPTY:
            break
        lower = ag.clip_halfplane(rest, u, c)
        if lower is EMPTY:
            continue
        upper = ag.clip_halfplane(rest, neg, -c)
        parts.append((l - 1, lower))
        if upper is not EMPTY:
            chord = ag.clip_halfplane(lower, neg, -c)
            if chord is not EMPTY:
                chords.append((l, chord))
        rest = upper
    if rest is not EMPTY:
        parts.append((len(cuts), rest))
    return parts, chords


def grid_decompose(K, eps: float, M: float = 2.0, threads: int | None = None) -> SignedPieces:
    n_cells = _check_grid(K, eps, M)
    cuts = [-M + l * eps for l in range(1, n_cells)]
    if K is EMPTY:
        return SignedPieces([], M, eps, n_cells)
    slabs, xchords = _sweep(K, (1.0, 0.0), cuts)

    def cut_slab(item):
        i, slab = item
        cells, ychords = _sweep(slab, (0.0, 1.0), cuts)
        return ([Piece(b, 1, "cell", (i, j)) for j, b in cells]
                + [Piece(b, -1, "slice", (i, "y", l)) for l, b in ychords])

    pieces = [p for group in _map(cut_slab, slabs, threads) for p in group]
    pieces += [Piece(b, -1, "slice", ("x", l)) for l, b in xchords]
    return SignedPieces(pieces, M, eps, n_cells)


# --------------------------------------------------------------------------
# boundary census


def cell_bounds(index: tuple[int, int], eps: float, M: float) -> tuple[float, float, float, float]:
    i, j = index
    return (-M + i * eps, -M + (i + 1) * eps, -M + j * eps, -M + (j + 1) * eps)


def _candidate_cells(K, eps: float, M: float, n_cells: int):
    xmin, xmax = -K.support(math.pi), K.support(0.0)
    ymin, ymax = -K.support(1.5 * math.pi), K.support(0.5 * math.pi)

    def span(lo, hi):
        a = max(0, math.floor((lo + M) / eps) - 1)
        b = min(n_cells - 1, math.floor((hi + M) / eps) + 1)
        return range(a, b + 1)

    return [(i, j) for i in span(xmin, xmax) for j in span(ymin, ymax)]


def annulus_bound(K, eps: float) -> tuple[float, bool]:
    """``area(K + sB) - area(K eroded by sB)`` at ``s = sqrt(2) * eps``.

    Returns the bound and whether the erosion was exact; when it is not, the
    inner area is taken as 0 and the bound is only an upper estimate.
    """
    s = math.sqrt(2) * eps
    outer = ag.area(K) + ag.perimeter(K) * s + math.pi * s * s
    inner = ag.inner_parallel_area(K, s)
    if inner is None:
        return outer, False
    return outer - inner, True


@dataclass
class CensusReport:
    eps: float
    M: float
    J: int
    contained: int
    annulus_bound: float
    erosion_exact: bool
    classes: dict = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.J * self.eps ** 2 <= self.annulus_bound + 1e-6


def classify_cell(K, bounds: tuple[float, float, float, float], eps: float) -> str:
    x0, x1, y0, y1 = bounds
    if all(ag.contains(K, p) for p in ((x0, y0), (x1, y0), (x1, y1), (x0, y1))):
        return "contained"  # convexity: the whole cell lies in K
    piece = ag.clip_box(K, x0, x1, y0, y1)
    if piece is EMPTY:
        return "outside"
    a = ag.area(piece)
    if a <= AREA_TOL * eps * eps:
        return "outside"  # meets K in measure zero
    return "partial"


def boundary_census(K, eps: float, M: float = 2.0, threads: int | None = None) -> CensusReport:
    n_cells = _check_grid(K, eps, M)
    cells = _candidate_cells(K, eps, M, n_cells)
    labels = _map(lambda c: classify_cell(K, cell_bounds(c, eps, M), eps), cells, threads)
    classes = {c: lab for c, lab in zip(cells, labels) if lab != "outside"}
    J = sum(1 for lab in labels if lab == "partial")
    contained = sum(1 for lab in labels if lab == "contained")
    bound, exact = annulus_bound(K, eps)
    return CensusReport(eps, M, J, contained, bound, exact, classes)


def brute_force_census(K, eps: float, M: float = 2.0, k: int = 10,
                       spacing: float | None = None) -> dict:
    """Independent cell classification from point membership.

    A cell is partial when a densely sampled boundary point lies strictly
    inside it. Otherwise its interior is either inside or outside ``K`` and a
    ``(k + 1) ** 2`` lattice decides which. Returns the non-outside cells.
    """
    n_cells = _check_grid(K, eps, M)
    cells = _candidate_cells(K, eps, M, n_cells)
    bpts = np.array(ag.boundary_points(K, spacing or eps / 100))
    touched = set()
    fi = (bpts[:, 0] + M) / eps
    fj = (bpts[:, 1] + M) / eps
    ii, jj = np.floor(fi).astype(int), np.floor(fj).astype(int)
    strict = ((fi - ii) * eps > 1e-12) & ((ii + 1 - fi) * eps > 1e-12) \
        & ((fj - jj) * eps > 1e-12) & ((jj + 1 - fj) * eps > 1e-12)
    touched.update(zip(ii[strict].tolist(), jj[strict].tolist()))

    t = np.linspace(0.0, 1.0, k + 1)
    gx, gy = np.meshgrid(t, t)
    gx, gy = gx.ravel(), gy.ravel()
    idx = np.array(cells, dtype=float)
    xs = (-M + (idx[:, :1] + gx[None, :]) * eps)
    ys = (-M + (idx[:, 1:] + gy[None, :]) * eps)
    closed = ag.contains_many(K, xs, ys, tol=1e-12)
    opened = ag.contains_many(K, xs, ys, tol=-1e-12)
    out = {}
    for n, c in enumerate(cells):
        if c in touched:
            out[c] = "partial"
        elif closed[n].all():
            out[c] = "contained"
        elif opened[n].any():
            out[c] = "partial"
    return out


# --------------------------------------------------------------------------
# decay report


@dataclass
class GridReport:
    eps: float
    J: int
    signed_sum: float | None
    value: float | None
    annulus_bound: float
    per_cell_bound: float | None
    apriori: float | None
    census_passed: bool
    erosion_exact: bool
    degree: float | None
    norm_estimate: float | None

    def row(self) -> dict:
        return {"eps": self.eps, "J": self.J, "signed_sum": self.signed_sum,
                "value": self.value, "annulus_bound": self.annulus_bound,
                "apriori": self.apriori}


def norm_estimate(V, samples: int = 1000, seed: int = 0) -> float:
    """``max |V|`` over random bodies in the unit disk (an estimate, not a bound)."""
    return max(abs(float(evaluate(V, K))) for K in random_bodies(samples, seed))


def _box_of(index, eps, M):
    x0, x1, y0, y1 = cell_bounds(index, eps, M)
    return ag.from_polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def decay_report(V, K, eps_list: Iterable[float], M: float = 2.0, degree: float | None = None,
                 norm: float | None = None, samples: int = 1000, seed: int = 0,
                 threads: int | None = None, box_checks: int = 100,
                 require_vanishing: bool = True) -> list[GridReport]:
    """Signed grid sums next to the counting bound ``|J| * ||V|| * (sqrt(2) eps / 2) ** m``.

    ``V`` must vanish on boxes; this is checked on up to ``box_checks`` cells
    lying inside ``K``. With ``V = None`` only the bound is computed (``degree``
    required, ``norm`` defaults to 1). With ``require_vanishing=False`` a
    valuation that does not vanish on boxes still gets its signed sums, but
    the per-cell and a-priori fields are ``None``.
    """
    eps_list = list(eps_list)
    censuses = [boundary_census(K, e, M, threads) for e in eps_list]
    if V is None:
        if degree is None:
            raise ValueError("bound-only mode needs an explicit degree")
        norm = 1.0 if norm is None else norm
    else:
        inside = [(c, e) for cen, e in zip(censuses, eps_list)
                  for c, lab in cen.classes.items() if lab == "contained"]
        if not inside:
            e = min(eps_list)
            inside = [((0, 0), e)]
        step = max(1, len(inside) // box_checks)
        vanishing = True
        for c, e in inside[::step][:box_checks]:
            cell = _box_of(c, e, M)
            if abs(float(evaluate(V, cell))) > 1e-12:
                if require_vanishing:
                    raise NotVanishingOnBoxes(f"V = {evaluate(V, cell)} on cell {c} at eps={e}")
                vanishing = False
                break
        if not vanishing:
            norm = None
        else:
            if degree is None:
                degree = getattr(V, "degree", None)
            if degree is None:
                degree = homogeneity_probe(V, K, (0.5, 2.0, 3.0)).degree
            if norm is None:
                norm = norm_estimate(V, samples, seed)
    reports = []
    for e, cen in zip(eps_list, censuses):
        if V is None:
            signed = value = None
        else:
            signed = grid_decompose(K, e, M, threads).signed_sum(V, threads)
            value = float(evaluate(V, K))
        if norm is None:
            per_cell = apriori = None
        else:
            per_cell = norm * (math.sqrt(2) * e / 2) ** degree
            apriori = cen.J * per_cell
        reports.append(GridReport(e, cen.J, signed, value, cen.annulus_bound, per_cell,
                                  apriori, cen.passed, cen.erosion_exact, degree, norm))
    return reports


# --------------------------------------------------------------------------
# volume characterization


@dataclass
class VolumeCharacterization:
    c: Any
    certified: bool
    translation_invariant: bool
    homogeneity: dict
    two_homogeneous: bool
    boundedness: BoundednessReport
    residuals: dict
    decay: dict


def volume_characterization(V, bodies: dict, eps_list: Sequence[float] = (0.25, 0.125),
                            M: float = 2.0, seed: int = 0, samples: int = 200,
                            sample_grid: Sequence | None = None,
                            threads: int | None = None) -> VolumeCharacterization:
    """Extract ``c`` from the top box component, then study ``W = V - c Vol``.

    Translation invariance, 2-homogeneity and boundedness are probed and
    reported; a failed probe does not stop the experiment.
    """
    rng = random.Random(seed)
    trans_ok = True
    for K in bodies.values():
        x = (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        a, b = float(evaluate(V, K)), float(evaluate(V, translate_body(K, x)))
        if not abs(a - b) <= 1e-9 * max(1.0, abs(a)):
            trans_ok = False
    homog = {}
    for name, K in bodies.items():
        try:
            homog[name] = homogeneity_probe(V, K, (0.5, 2.0, 3.0))
        except ZeroBaseValue:
            continue
    two_hom = bool(homog) and all(abs(p.degree - 2) <= 1e-9 and p.defect <= 1e-9
                                  for p in homog.values())
    bounded = boundedness_probe(V, random_bodies(samples, seed), bound=math.inf)

    grid = sample_grid or [Fraction(k, 2) for k in range(5)]
    family = extract_components(box_oracle(V, 2), grid, certify=False)
    cert = certify_linearity(family[{1, 2}])
    c = cert.coefficient if cert.coefficient is not None else 0

    W = Combination(((1, V), (-c, Vol())))
    residuals = {name: abs(float(evaluate(W, K))) for name, K in bodies.items()}
    decay = {}
    for name, K in bodies.items():
        try:
            decay[name] = decay_report(W, K, eps_list, M, samples=samples, seed=seed,
                                       threads=threads)
        except NotVanishingOnBoxes as exc:
            decay[name] = f"decay report skipped: {exc}"
    return VolumeCharacterization(c, cert.certified, trans_ok, homog, two_hom, bounded,
                                  residuals, decay)


# --------------------------------------------------------------------------
# continuity probes


@dataclass
class ContinuityReport:
    rows: list  # (d_H, |V(K_j) - V(K)|)
    floor: float

    @property
    def verdict(self) -> str:
        tail = [gap for _, gap in self.rows[-3:]]
        if len(tail) == 3 and all(g >= self.floor for g in tail):
            return "discontinuous"
        return "no discontinuity detected"


def continuity_probe(V, sequence: Sequence, limit, floor: float = 1e-3) -> ContinuityReport:
    value = float(evaluate(V, limit))
    rows = []
    for K in sequence:
        rows.append((ag.hausdorff(K, limit), abs(float(evaluate(V, K)) - value)))
    dists = [d for d, _ in rows]
    if any(b >= a for a, b in zip(dists, dists[1:])):
        raise SequenceNotConverging(f"Hausdorff distances {dists} are not decreasing")
    return ContinuityReport(rows, floor)


def regular_polygon(k: int, radius: float = 1.0, phase: float = 0.0) -> ag.ArcGon:
    return ag.from_polygon([(radius * math.cos(phase + TAU * i / k),
                             radius * math.sin(phase + TAU * i / k)) for i in range(k)])


def ngon_sequence(exponents: Iterable[int] = range(3, 11)) -> tuple[list, ag.ArcGon]:
    """Inscribed regular ``2**j``-gons and their limit, the unit disk."""
    return [regular_polygon(2 ** j) for j in exponents], ag.disk((0.0, 0.0), 1.0)


def inscribed_triangle(delta: float) -> ag.ArcGon:
    """Triangle in the unit circle with edge normals ``-delta``, ``2pi/3``, ``4pi/3``."""
    angles = (-math.pi / 3 - delta, math.pi / 3 - delta, math.pi + delta)
    return ag.from_polygon([(math.cos(a), math.sin(a)) for a in angles])


def triangle_sequence(exponents: Iterable[int] = range(3, 11)) -> tuple[list, ag.ArcGon]:
    """Triangles whose first edge normal approaches 0 from below."""
    return [inscribed_triangle(2.0 ** -j) for j in exponents], inscribed_triangle(0.0)


UPPER_HALF_INDICATOR = PiecewiseConstant(((0.0, math.pi, 1.0), (math.pi, TAU, 0.0)))


def steiner_check(K, ts: Iterable[float]) -> list[tuple[float, float]]:
    """Relative error of ``area(K + tB)`` against ``A + P t + pi t**2``."""
    A, P = ag.area(K), ag.perimeter(K)
    out = []
    for t in ts:
        got = ag.area(ag.minkowski_sum(K, ag.disk((0.0, 0.0), t)))
        want = A + P * t + math.pi * t * t
        out.append((t, abs(got - want) / want))
    return out

