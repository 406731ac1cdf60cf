# tests/test_geodesic.py

"""
Unit tests for the geodesic module.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coarsedecomp.errors import ComplexError
from coarsedecomp.geodesic import (
    ceil_sqrt_ticks, cone_coordinates, cone_distance, distance_to_subcomplex, geodesic_lower,
    geodesic_lower_sets, geodesic_upper, standard_distance, subdivision_graph, TICKS,
    vertex_distances)
from coarsedecomp.metric import INF, FiniteMetricSpace
from coarsedecomp.rips import build_rips, build_scaled_rips


def interval(n):
    """The integers 0..n-1 with the usual distance."""
    return FiniteMetricSpace.from_function(range(n), lambda a, b: abs(a - b))


def glued_triangles():
    """Two unit triangles ABC and BCD sharing the edge BC."""
    table = {(0, 1): 1, (0, 2): 1, (1, 2): 1, (1, 3): 1, (2, 3): 1, (0, 3): 2}
    space = FiniteMetricSpace.from_table("ABCD", table, name="glued")
    return build_rips(space, 1)


def triangle_space(side):
    """Three points pairwise at distance ``side``."""
    return FiniteMetricSpace.from_table(range(3), {(0, 1): side, (0, 2): side, (1, 2): side})


PATH = build_rips(interval(8), 1)
STRIP = build_rips(interval(10), 2)


def test_ceil_sqrt_ticks():
    """
    Test exact square roots and rounding up.
    """
    assert ceil_sqrt_ticks(1) == TICKS
    assert ceil_sqrt_ticks(Fraction(1, 4)) == TICKS // 2
    root = ceil_sqrt_ticks(2)
    assert (root - 1) ** 2 < 2 * TICKS ** 2 <= root ** 2


def test_standard_distance_is_unit_on_edges():
    """
    Test that vertices of the standard simplex are 1 apart and the centroid is 1/sqrt(3) away.
    """
    assert standard_distance((1, 0, 0), (0, 1, 0)) == 1
    third = Fraction(1, 3)
    assert standard_distance((1, 0, 0), (third, third, third)) == Fraction(1, 3)


def test_single_simplex_vertices_are_one_apart():
    """
    Test that two vertices of one 2-simplex are exactly 1 apart at every level.
    """
    complex_ = build_rips(interval(3), 2)
    for level in (1, 2, 3):
        assert geodesic_upper(complex_, 0, 1, level) == 1


def test_path_endpoints():
    """
    Test P_1({0..7}): upper bound exactly 7 and lower bound 5.
    """
    assert geodesic_upper(PATH, 0, 7) == 7
    assert geodesic_lower(PATH, 0, 7) == 5
    assert vertex_distances(PATH, 0)[7] == 7


def test_glued_triangles_opposite_vertices():
    """
    Test that opposite vertices of two glued triangles are within [sqrt(3), 1.80] at L = 3.
    """
    complex_ = glued_triangles()
    upper = geodesic_upper(complex_, "A", "D", 3)
    assert Fraction(17320, 10000) <= upper <= Fraction(18, 10)
    assert geodesic_lower(complex_, "A", "D") == 0


def test_upper_bound_is_nonincreasing_in_level():
    """
    Test that refining the subdivision never increases the bound.
    """
    complex_ = glued_triangles()
    bounds = [geodesic_upper(complex_, "A", "D", level) for level in (1, 2, 3, 4)]
    assert bounds[0] == 2
    assert all(finer <= coarser for coarser, finer in zip(bounds, bounds[1:]))


def test_upper_bound_is_symmetric():
    """
    Test symmetry of the upper bound.
    """
    complex_ = glued_triangles()
    assert geodesic_upper(complex_, "A", "D") == geodesic_upper(complex_, "D", "A")


def test_disconnected_points_are_infinitely_far():
    """
    Test INF between components, for both bounds.
    """
    space = FiniteMetricSpace.from_function([0, 1, 5, 6], lambda a, b: abs(a - b))
    complex_ = build_rips(space, 1)
    assert geodesic_upper(complex_, 0, 6) == INF
    assert geodesic_lower(complex_, 0, 6) == INF


def test_barycentric_query_point():
    """
    Test that the midpoint of an edge is 1/2 from either end.
    """
    midpoint = {3: Fraction(1, 2), 4: Fraction(1, 2)}
    assert geodesic_upper(PATH, midpoint, 3) == Fraction(1, 2)
    assert geodesic_upper(PATH, {3: Fraction(1, 4), 4: Fraction(3, 4)}, 7) == Fraction(13, 4)


def test_bad_query_points():
    """
    Test BAD_POINT for weights not summing to 1 and NOT_IN_COMPLEX for a non-simplex.
    """
    with pytest.raises(ComplexError) as exc_info:
        geodesic_upper(PATH, {0: Fraction(1, 2)}, 1)
    assert exc_info.value.code == "BAD_POINT"
    with pytest.raises(ComplexError) as exc_info:
        geodesic_upper(PATH, {0: Fraction(1, 2), 5: Fraction(1, 2)}, 1)
    assert exc_info.value.code == "NOT_IN_COMPLEX"


def test_level_must_be_positive():
    """
    Test that level 0 is rejected.
    """
    with pytest.raises(ComplexError):
        geodesic_upper(PATH, 0, 1, 0)


def test_scaled_edge_is_cone_over_two_points():
    """
    Test that a scaled edge with m = 3 joins its ends by a path of length 2m.
    """
    complex_ = build_scaled_rips(interval(2), [], 1, 1, 1)
    assert geodesic_upper(complex_, 0, 1) == 1
    scaled = build_scaled_rips(FiniteMetricSpace.from_function([0, 2], lambda a, b: abs(a - b)),
                               [], 1, 2, 3)
    assert geodesic_upper(scaled, 0, 2) == 6
    assert geodesic_upper(scaled, 0, {0: Fraction(1, 2), 2: Fraction(1, 2)}) == 3


def test_fully_marked_scaled_complex_matches_rips():
    """
    Test m = 1, W = X, a = b: distances of P_a are recovered.
    """
    scaled = build_scaled_rips(interval(8), range(8), 1, 1, 1)
    assert geodesic_upper(scaled, 0, 7) == geodesic_upper(PATH, 0, 7)


def test_scaled_triangle_apex_to_base():
    """
    Test that the apex of a scaled triangle with m = 4 is within [4, 4 + 1e-9] of an edge.
    """
    complex_ = build_scaled_rips(triangle_space(2), [], 1, 2, 4)
    third = Fraction(1, 3)
    apex = {0: third, 1: third, 2: third}
    edge = complex_.full_subcomplex([0, 1])
    distance = distance_to_subcomplex(complex_, apex, edge)
    assert 4 <= distance <= 4 + Fraction(1, 10 ** 9)


def test_scaled_tetrahedron_is_unsupported():
    """
    Test UNSUPPORTED_DIMENSION for a scaled 3-simplex.
    """
    space = FiniteMetricSpace.from_function(range(4), lambda a, b: 0 if a == b else 2)
    complex_ = build_scaled_rips(space, [], 1, 2, 2)
    with pytest.raises(ComplexError) as exc_info:
        subdivision_graph(complex_)
    assert exc_info.value.code == "UNSUPPORTED_DIMENSION"


def test_cone_coordinates_and_distance():
    """
    Test polar coordinates on a cone and the distance through the apex at angle >= pi.
    """
    lengths = (Fraction(2), Fraction(2), Fraction(2))
    assert cone_coordinates((1, 0, 0), lengths, 1) == (1, 0)
    assert cone_coordinates((0, 1, 0), lengths, 1) == (1, 2)
    assert cone_coordinates((Fraction(1, 3),) * 3, lengths, 1) == (0, 0)
    through_apex = cone_distance(1, 0, 1, Fraction(7, 2), 8, 1)
    assert through_apex.lo <= 2 <= through_apex.hi


def test_cone_distance_on_one_ray_is_exact():
    """
    Test that two points at arc distance 0 are |s1 - s2| apart exactly at the lower end.
    """
    same_ray = cone_distance(1, Fraction(1, 3), 2, Fraction(1, 3), 6, 1)
    assert same_ray.lo == 1
    assert same_ray.hi - same_ray.lo < Fraction(1, 10 ** 12)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=3, max_denominator=64),
       st.fractions(min_value=0, max_value=3, max_denominator=64),
       st.fractions(min_value=0, max_value=6, max_denominator=64),
       st.fractions(min_value=0, max_value=6, max_denominator=64))
def test_cone_distance_encloses_law_of_cosines(s1, s2, u1, u2):
    """
    Test that the enclosure is tight, outward and contains the float law of cosines.
    """
    total, m = 6, 3
    result = cone_distance(s1, u1, s2, u2, total, m)
    gap = abs(float(u1) - float(u2)) / m
    angle = min(gap, total / m - gap)
    expected = math.sqrt((float(s1) - float(s2)) ** 2
                         + 4 * float(s1) * float(s2) * math.sin(angle / 2) ** 2)
    assert result.lo <= result.hi
    assert result.hi - result.lo < Fraction(1, 10 ** 9)
    assert float(result.lo) - 1e-12 <= expected <= float(result.hi) + 1e-12
    assert result.lo <= s1 + s2 and result.lo >= abs(s1 - s2) - Fraction(1, 10 ** 12)


def test_distance_to_subcomplex_is_zero_inside():
    """
    Test that a vertex of the subcomplex is at distance 0.
    """
    sub = PATH.full_subcomplex([2, 3])
    assert distance_to_subcomplex(PATH, 3, sub) == 0
    assert distance_to_subcomplex(PATH, 7, sub) == 4


def test_lower_bound_between_sets():
    """
    Test the hop bound between {0..1} and {6..7} on the path.
    """
    assert geodesic_lower_sets(PATH, [0, 1], [6, 7]) == 3
    assert geodesic_lower_sets(PATH, [0, 1], [1, 2]) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=9), st.integers(min_value=0, max_value=9))
def test_lower_bound_never_exceeds_upper(i, j):
    """
    Test lower <= upper on vertex pairs of a 2-dimensional strip.
    """
    assert geodesic_lower(STRIP, i, j) <= geodesic_upper(STRIP, i, j)
