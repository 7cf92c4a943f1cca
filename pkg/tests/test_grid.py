import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from valuationlab import arcgon as ag
from valuationlab.core import (
    EMPTY,
    TAU,
    BodyExceedsM,
    EpsilonTooLarge,
    NotVanishingOnBoxes,
    SequenceNotConverging,
)
from valuationlab.corpus import random_body, standard_bodies
from valuationlab.grid import (
    UPPER_HALF_INDICATOR,
    annulus_bound,
    boundary_census,
    brute_force_census,
    continuity_probe,
    decay_report,
    grid_decompose,
    inscribed_triangle,
    ngon_sequence,
    regular_polygon,
    steiner_check,
    triangle_sequence,
    volume_characterization,
)
from valuationlab.valuations import (
    Combination,
    Euler,
    Perimeter,
    PhiF,
    PhiL,
    PhiSing,
    Vol,
    evaluate,
)

from oracles import disk_boundary_cells

UNIT_DISK = ag.disk((0, 0), 1)
SIX = [Vol(), Euler(), Perimeter(), PhiL(0.5), PhiF(UPPER_HALF_INDICATOR), PhiSing()]


def test_grid_pieces_of_a_centered_square():
    S = ag.from_polygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)])
    pieces = grid_decompose(S, 0.5, M=1.0)
    assert pieces.cells_per_axis == 4
    # cells touching the square only along its boundary are kept as points and segments
    assert sum(1 for p in pieces.cells if p.body.dimension == 2) == 4
    assert all(p.body.dimension < 2 for p in pieces.pieces if p.sign == -1)
    assert math.isclose(pieces.signed_sum(Vol()), 1.0)
    assert math.isclose(pieces.signed_sum(Euler()), 1.0)
    assert math.isclose(pieces.signed_sum(Perimeter()), 4.0)


def test_grid_input_validation():
    with pytest.raises(EpsilonTooLarge):
        grid_decompose(UNIT_DISK, 2.0, M=2.0)
    with pytest.raises(BodyExceedsM):
        grid_decompose(ag.disk((0, 0), 3), 0.5, M=2.0)
    with pytest.raises(ValueError):
        grid_decompose(UNIT_DISK, 0.0)
    assert grid_decompose(EMPTY, 0.5).pieces == []


@pytest.mark.parametrize("name", sorted(standard_bodies()))
def test_signed_sum_is_exact_on_standard_bodies(name):
    K = standard_bodies()[name]
    pieces = grid_decompose(K, 0.25)
    for V in SIX:
        assert abs(pieces.signed_sum(V) - float(evaluate(V, K))) <= 1e-9


def test_threads_do_not_change_the_sum():
    K = standard_bodies()["rounded_square"]
    a = grid_decompose(K, 0.125).signed_sum(Perimeter())
    b = grid_decompose(K, 0.125, threads=4).signed_sum(Perimeter(), threads=4)
    assert math.isclose(a, b, rel_tol=1e-12)


@given(st.integers(0, 10_000), st.sampled_from([0.5, 0.3, 0.2]))
@settings(max_examples=15)
def test_signed_sum_is_exact_on_random_bodies(seed, eps):
    K = random_body(random.Random(seed))
    pieces = grid_decompose(K, eps, M=1.0)
    for V in (Vol(), PhiSing(), PhiL(0)):
        assert abs(pieces.signed_sum(V) - float(evaluate(V, K))) <= 1e-9


@pytest.mark.parametrize("eps, expected", [(0.25, 28), (0.1, 68), (0.05, 148), (0.02, 380),
                                           (0.01, 780)])
def test_disk_census_matches_exact_oracle(eps, expected):
    # the counts were produced by the rational-arithmetic oracle and frozen
    rep = boundary_census(UNIT_DISK, eps)
    assert rep.J == expected
    assert rep.passed and rep.erosion_exact


def test_exact_oracle_reproduces_frozen_counts():
    assert [disk_boundary_cells(1, e, 2) for e in ("1/4", "1/10", "1/20")] == [28, 68, 148]


@pytest.mark.parametrize("name", sorted(standard_bodies()))
def test_census_matches_brute_force(name):
    K = standard_bodies()[name]
    for eps in (0.25, 0.1):
        rep = boundary_census(K, eps)
        brute = brute_force_census(K, eps)
        assert rep.classes == brute
        assert rep.passed


@given(st.integers(0, 10_000))
@settings(max_examples=15)
def test_census_matches_brute_force_on_random_bodies(seed):
    K = random_body(random.Random(seed))
    assert boundary_census(K, 0.2, M=1.0).classes == brute_force_census(K, 0.2, M=1.0)


def test_aligned_square_has_no_boundary_cells():
    S = ag.from_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    rep = boundary_census(S, 0.5)
    assert rep.J == 0 and rep.contained == 4


def test_annulus_bound_for_disk():
    s = math.sqrt(2) * 0.1
    bound, exact = annulus_bound(UNIT_DISK, 0.1)
    assert exact and math.isclose(bound, math.pi * ((1 + s) ** 2 - (1 - s) ** 2))
    assert math.isclose(bound, 4 * math.sqrt(2) * math.pi * 0.1)


def test_decay_report_for_phi_l_zero_does_not_decay():
    rows = decay_report(PhiL(0), UNIT_DISK, [0.5, 0.25], samples=50)
    for r in rows:
        assert math.isclose(r.signed_sum, TAU, rel_tol=1e-9)
        assert r.degree == 1 and r.apriori >= r.J * r.per_cell_bound - 1e-12


def test_decay_report_requires_vanishing_on_boxes():
    with pytest.raises(NotVanishingOnBoxes):
        decay_report(Vol(), UNIT_DISK, [0.5], samples=10)
    rows = decay_report(Vol(), UNIT_DISK, [0.5], samples=10, require_vanishing=False)
    assert rows[0].apriori is None and math.isclose(rows[0].signed_sum, math.pi)


def test_decay_report_bound_only():
    rows = decay_report(None, UNIT_DISK, [0.1], degree=1, norm=2.0)
    assert rows[0].signed_sum is None
    assert math.isclose(rows[0].apriori, 68 * 2.0 * math.sqrt(2) * 0.1 / 2)
    with pytest.raises(ValueError):
        decay_report(None, UNIT_DISK, [0.1])


def test_bound_only_decay_above_degree_one():
    eps_list = [0.1, 0.05, 0.02, 0.01]
    rows = decay_report(None, UNIT_DISK, eps_list, degree=1.5)
    bounds = [r.apriori for r in rows]
    assert all(b > a for a, b in zip(bounds[1:], bounds))
    assert bounds[-1] < 0.5 * bounds[0]


def test_volume_characterization_recovers_coefficient():
    bodies = {"disk": UNIT_DISK, "square": standard_bodies()["square"]}
    V = Combination(((3, Vol()),))
    rep = volume_characterization(V, bodies, eps_list=[0.5], samples=20)
    assert rep.c == 3 and rep.certified and rep.two_homogeneous and rep.translation_invariant
    assert max(rep.residuals.values()) <= 1e-12


def test_volume_characterization_sees_curvature_term():
    V = Combination(((1, Vol()), (1, PhiL(0))))
    rep = volume_characterization(V, {"disk": UNIT_DISK}, eps_list=[0.5], samples=20)
    assert rep.c == 1
    assert math.isclose(rep.residuals["disk"], TAU)
    assert not rep.two_homogeneous


def test_volume_plus_perimeter_leaves_the_perimeter():
    bodies = {"disk": UNIT_DISK, "triangle": standard_bodies()["triangle"]}
    V = Combination(((1, Vol()), (1, Perimeter())))
    rep = volume_characterization(V, bodies, eps_list=[0.5], samples=20)
    assert rep.c == 1 and not rep.two_homogeneous
    for name, K in bodies.items():
        assert math.isclose(rep.residuals[name], ag.perimeter(K), rel_tol=1e-12)


def test_ngon_sequence_witnesses_phi_sing_discontinuity():
    seq, limit = ngon_sequence(range(3, 11))
    rep = continuity_probe(PhiSing(), seq, limit)
    for j, (d, gap) in zip(range(3, 11), rep.rows):
        assert math.isclose(d, 1 - math.cos(math.pi / 2 ** j), rel_tol=1e-6)
        assert math.isclose(gap, 2 * 2 ** j * math.sin(math.pi / 2 ** j), rel_tol=1e-9)
    assert rep.verdict == "discontinuous"


@pytest.mark.parametrize("V", [Vol(), Perimeter()])
def test_continuous_valuations_along_ngons(V):
    seq, limit = ngon_sequence(range(3, 11))
    rep = continuity_probe(V, seq, limit, floor=1e-3)
    assert rep.verdict == "no discontinuity detected"
    assert rep.rows[-1][1] < 1e-3


def test_triangle_sequence_witnesses_indicator_discontinuity():
    seq, limit = triangle_sequence(range(3, 11))
    rep = continuity_probe(PhiF(UPPER_HALF_INDICATOR), seq, limit)
    assert rep.verdict == "discontinuous"
    # the first edge leaves the indicator's support; the gap tends to its length sqrt(3)
    assert all(gap >= math.sqrt(3) / 2 for _, gap in rep.rows)
    assert abs(rep.rows[-1][1] - math.sqrt(3)) <= 1e-3
    assert rep.rows[-1][0] < 1e-3


def test_non_converging_sequence_is_rejected():
    with pytest.raises(SequenceNotConverging):
        continuity_probe(Vol(), [regular_polygon(8), regular_polygon(4)], UNIT_DISK)


def test_inscribed_triangle_shape():
    T = inscribed_triangle(0.0)
    assert math.isclose(ag.area(T), 3 * math.sqrt(3) / 4)
    assert math.isclose(T.support(0.0), 0.5)


def test_steiner_check_on_triangle():
    errs = steiner_check(standard_bodies()["triangle"], [0.1, 1.0, 5.0])
    assert max(e for _, e in errs) <= 1e-12
