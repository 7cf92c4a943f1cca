import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from valuationlab import arcgon as ag
from valuationlab.core import (
    EMPTY,
    TAU,
    DegeneratePoint,
    DuplicatePoint,
    EmptyBody,
    NonpositiveRadius,
    NotConvex,
)
from valuationlab.corpus import random_body, random_convex_polygon

from oracles import (
    circular_segment_area,
    polygon_perimeter,
    sampled_support_hausdorff,
    shoelace,
    sutherland_hodgman,
)

seeds = st.integers(0, 10_000)
angles = st.floats(0, TAU, allow_nan=False)
UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def support_fn(K):
    return np.vectorize(K.support)


def test_unit_square_measurements():
    K = ag.from_polygon(UNIT_SQUARE)
    assert K.kind == "body" and K.dimension == 2
    assert math.isclose(ag.area(K), 1.0)
    assert math.isclose(ag.perimeter(K), 4.0)
    assert sorted(K.vertices) == sorted((float(x), float(y)) for x, y in UNIT_SQUARE)
    assert ag.check_closure(K)


def test_triangle_edge_normals():
    T = ag.from_polygon([(0, 0), (1, 0), (0, 1)])
    normals = sorted(theta for theta, _, _ in T.edges())
    assert all(math.isclose(a, b) for a, b in zip(normals, [math.pi / 4, math.pi, 1.5 * math.pi]))


def test_simple_sums_and_distances():
    D = ag.minkowski_sum(ag.disk((0, 0), 1), ag.disk((0, 0), 2))
    assert D.features == ag.disk((0, 0), 3).features
    K = random_body(random.Random(4))
    moved = ag.minkowski_sum(K, ag.point((0.25, -0.5)))
    assert ag.hausdorff(moved, ag.translate(K, (0.25, -0.5))) <= 1e-12
    assert math.isclose(ag.hausdorff(ag.disk((0, 0), 1), ag.disk((0, 0), 2)), 1.0)
    assert math.isclose(ag.from_polygon(UNIT_SQUARE).support(math.pi / 4), math.sqrt(2))


def test_clockwise_polygon_is_reversed():
    K = ag.from_polygon(UNIT_SQUARE[::-1])
    assert math.isclose(ag.area(K), 1.0)


def test_polygon_validation():
    with pytest.raises(NotConvex):
        ag.from_polygon([(0, 0), (1, 0), (2, 0)])
    with pytest.raises(NotConvex):
        ag.from_polygon([(0, 0), (2, 0), (1, 0.2), (1, 2)])
    with pytest.raises(DuplicatePoint):
        ag.from_polygon([(0, 0), (1, 0), (1, 0), (0, 1)])
    with pytest.raises(NonpositiveRadius):
        ag.disk((0, 0), 0)


def test_disk_measurements():
    D = ag.disk((1, 2), 3)
    assert math.isclose(ag.area(D), 9 * math.pi)
    assert math.isclose(ag.perimeter(D), 6 * math.pi)
    assert math.isclose(D.support(0.0), 4.0)
    assert ag.contains(D, (1, 5)) and not ag.contains(D, (1, 5.01))


def test_point_and_segment_kinds():
    assert ag.point((1, 1)).kind == "point"
    S = ag.segment((0, 0), (2, 0))
    assert S.kind == "segment" and S.dimension == 1
    assert ag.area(S) == 0 and math.isclose(ag.perimeter(S), 4.0)
    assert ag.segment((1, 1), (1, 1)).kind == "point"


def test_segment_plus_segment_is_a_parallelogram():
    P = ag.minkowski_sum(ag.segment((0, 0), (1, 0)), ag.segment((0, 0), (1, 2)))
    assert math.isclose(ag.area(P), 2.0)
    assert len(P.vertices) == 4


def test_square_plus_disk_is_rounded_square():
    R = ag.minkowski_sum(ag.from_polygon(UNIT_SQUARE), ag.disk((0, 0), 0.5))
    assert math.isclose(ag.area(R), 1 + 4 * 0.5 + math.pi * 0.25)
    assert math.isclose(ag.perimeter(R), 4 + math.pi)
    assert len(R.arcs) == 4


def test_half_disk_by_clipping():
    H = ag.clip_halfplane(ag.disk((0, 0), 1), (0, 1), 0)
    assert math.isclose(ag.area(H), math.pi / 2)
    assert math.isclose(ag.perimeter(H), math.pi + 2)
    assert ag.check_closure(H)


def test_clip_everything_or_nothing():
    D = ag.disk((0, 0), 1)
    assert ag.clip_halfplane(D, (1, 0), -2) is EMPTY
    assert ag.clip_halfplane(D, (1, 0), 5) == D


def test_clip_to_tangent_line_gives_a_point():
    D = ag.disk((0, 0), 1)
    P = ag.clip_halfplane(D, (-1, 0), -1)
    assert P is not EMPTY and P.kind == "point"


def test_clip_box_on_square():
    K = ag.clip_box(ag.from_polygon(UNIT_SQUARE), 0.25, 0.5, -1, 0.5)
    assert math.isclose(ag.area(K), 0.125)
    assert ag.clip_box(ag.from_polygon(UNIT_SQUARE), 2, 3, 0, 1) is EMPTY


def test_hausdorff_square_and_inscribed_disk():
    # frozen from support-function sampling: sqrt(2)/2 - 1/2 at the corners
    S = ag.from_polygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)])
    D = ag.disk((0, 0), 0.5)
    expected = math.sqrt(2) / 2 - 0.5
    assert math.isclose(sampled_support_hausdorff(support_fn(S), support_fn(D)), expected,
                        rel_tol=1e-6)
    assert math.isclose(ag.hausdorff(S, D), expected, rel_tol=1e-12)


def test_surface_measure_of_triangle():
    T = ag.from_polygon([(0, 0), (3, 0), (0, 4)])
    mu = ag.surface_measure(T)
    assert sorted(round(m, 12) for _, m in mu.atoms) == [3, 4, 5]
    assert math.isclose(mu.total_mass(), 12) and mu.density == ()
    with pytest.raises(DegeneratePoint):
        ag.surface_measure(ag.point((0, 0)))


def test_surface_measure_of_half_disk():
    H = ag.clip_halfplane(ag.disk((0, 0), 1), (1, 0), 0)
    mu = ag.surface_measure(H)
    assert len(mu.atoms) == 1
    assert math.isclose(mu.atoms[0][0] % TAU, 0, abs_tol=1e-12) or math.isclose(mu.atoms[0][0], TAU)
    assert math.isclose(mu.atoms[0][1], 2)
    ((a, b, r),) = mu.density
    assert math.isclose(a, math.pi / 2) and math.isclose(b, 1.5 * math.pi) and r == 1


def test_face_of_square_is_top_edge():
    F = ag.face(ag.from_polygon(UNIT_SQUARE), math.pi / 2)
    assert F.kind == "segment"
    assert sorted(F.vertices) == [(0.0, 1.0), (1.0, 1.0)]
    assert ag.face(ag.disk((0, 0), 1), 0.3).kind == "point"


def test_inner_parallel_area():
    assert math.isclose(ag.inner_parallel_area(ag.disk((0, 0), 1), 0.25), math.pi * 0.5625)
    assert math.isclose(ag.inner_parallel_area(ag.from_polygon(UNIT_SQUARE), 0.25), 0.25)
    R = ag.minkowski_sum(ag.from_polygon(UNIT_SQUARE), ag.disk((0, 0), 0.5))
    assert ag.inner_parallel_area(R, 0.1) is None


def test_operations_on_empty():
    assert ag.area(EMPTY) == 0 and ag.translate(EMPTY, (1, 1)) is EMPTY
    with pytest.raises(EmptyBody):
        ag.minkowski_sum(EMPTY, ag.disk((0, 0), 1))


def test_contains_many_agrees_with_contains():
    rng = random.Random(0)
    K = random_body(rng, "rounded")
    xs = np.array([rng.uniform(-1, 1) for _ in range(400)])
    ys = np.array([rng.uniform(-1, 1) for _ in range(400)])
    vec = ag.contains_many(K, xs, ys)
    assert list(vec) == [ag.contains(K, (x, y)) for x, y in zip(xs, ys)]


@given(seeds)
@settings(max_examples=60)
def test_polygon_area_and_perimeter_match_shoelace(seed):
    K = random_convex_polygon(random.Random(seed))
    pts = K.vertices
    assert math.isclose(ag.area(K), shoelace(pts), rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(ag.perimeter(K), polygon_perimeter(pts), rel_tol=1e-12)


@given(seeds, angles, st.floats(0.05, 0.95))
@settings(max_examples=80)
def test_polygon_clip_matches_sutherland_hodgman(seed, theta, frac):
    K = random_convex_polygon(random.Random(seed))
    u = (math.cos(theta), math.sin(theta))
    hi, lo = K.support(theta), -K.support(theta + math.pi)
    t = lo + frac * (hi - lo)
    C = ag.clip_halfplane(K, u, t)
    expected = sutherland_hodgman(K.vertices, u, t)
    assert math.isclose(ag.area(C), shoelace(expected), rel_tol=1e-9, abs_tol=1e-12)
    assert ag.check_closure(C)


@given(st.floats(0.2, 3), st.floats(-0.99, 0.99), angles)
def test_disk_clip_matches_circular_segment(r, frac, theta):
    D = ag.disk((0.3, -0.2), r)
    u = (math.cos(theta), math.sin(theta))
    d = frac * r
    t = 0.3 * u[0] - 0.2 * u[1] + d
    C = ag.clip_halfplane(D, u, t)
    assert math.isclose(ag.area(C), math.pi * r * r - circular_segment_area(r, d),
                        rel_tol=1e-9)


@given(seeds, seeds, angles)
@settings(max_examples=60)
def test_support_is_additive_under_minkowski_sum(s1, s2, theta):
    K, L = random_body(random.Random(s1)), random_body(random.Random(s2))
    S = ag.minkowski_sum(K, L)
    for th in np.linspace(0, TAU, 1000, endpoint=False).tolist() + [theta]:
        assert abs(S.support(th) - K.support(th) - L.support(th)) <= 1e-12
    assert ag.check_closure(S)


@given(seeds, st.floats(0, 3))
@settings(max_examples=60)
def test_steiner_formula(seed, t):
    K = random_convex_polygon(random.Random(seed))
    A, P = ag.area(K), ag.perimeter(K)
    Kt = ag.minkowski_sum(K, ag.disk((0, 0), t)) if t > 0 else K
    assert math.isclose(ag.area(Kt), A + P * t + math.pi * t * t, rel_tol=1e-9)


@given(seeds)
@settings(max_examples=60)
def test_total_surface_measure_is_perimeter(seed):
    K = random_body(random.Random(seed))
    assert abs(ag.surface_measure(K).total_mass() - ag.perimeter(K)) <= 1e-12


@given(seeds, seeds)
@settings(max_examples=40)
def test_hausdorff_matches_support_sampling(s1, s2):
    K, L = random_body(random.Random(s1)), random_body(random.Random(s2))
    exact = ag.hausdorff(K, L)
    sampled = sampled_support_hausdorff(support_fn(K), support_fn(L), 20_000)
    assert sampled <= exact + 1e-9
    assert exact - sampled <= 1e-3


@given(seeds, angles, st.floats(0.1, 0.9))
@settings(max_examples=60)
def test_clipping_never_adds_area(seed, theta, frac):
    K = random_body(random.Random(seed))
    hi, lo = K.support(theta), -K.support(theta + math.pi)
    C = ag.clip_halfplane(K, (math.cos(theta), math.sin(theta)), lo + frac * (hi - lo))
    assert ag.area(C) <= ag.area(K) + 1e-12
    assert ag.check_closure(C)
    assert C.support(theta) <= lo + frac * (hi - lo) + 1e-9


@given(seeds, st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3))
@settings(max_examples=40)
def test_translation_and_scaling(seed, dx, dy, lam):
    K = random_body(random.Random(seed))
    T = ag.scale(ag.translate(K, (dx, dy)), lam)
    assert math.isclose(ag.area(T), lam * lam * ag.area(K), rel_tol=1e-9)
    assert math.isclose(ag.perimeter(T), lam * ag.perimeter(K), rel_tol=1e-9)


@given(seeds)
@settings(max_examples=30)
def test_boundary_points_lie_on_boundary(seed):
    K = random_body(random.Random(seed))
    th = np.linspace(0, TAU, 20_000, endpoint=False)
    th = np.concatenate([th, [f.start for f in K.features]])
    h = support_fn(K)(th)
    for p in ag.boundary_points(K, 0.1)[::7]:
        assert ag.contains(K, p, 1e-9)
        # some supporting line passes through p
        gap = h - (p[0] * np.cos(th) + p[1] * np.sin(th))
        assert gap.min() <= 1e-6
