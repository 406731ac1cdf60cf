# tests/test_lemmas.py

"""
Unit tests for the lemmas module.
"""

from fractions import Fraction

import pytest

from coarsedecomp.constants import DimensionConstants, derive_dimension_constants
from coarsedecomp.errors import ComplexError
from coarsedecomp.lemmas import smallest_passing_m, verify_lemma
from coarsedecomp.metric import INF, FiniteMetricSpace
from coarsedecomp.rips import build_rips, build_scaled_rips


def interval(n):
    """The integers 0..n-1 with the usual distance."""
    return FiniteMetricSpace.from_function(range(n), lambda a, b: abs(a - b))


def triangle_space(side):
    """Three points pairwise at distance ``side``."""
    return FiniteMetricSpace.from_table(range(3), {(0, 1): side, (0, 2): side, (1, 2): side})


@pytest.fixture(scope="module")
def path():
    """
    Fixture providing P_1({0..7}).
    """
    return build_rips(interval(8), 1)


@pytest.fixture(scope="module")
def strip():
    """
    Fixture providing P_2({0..9}), a strip of triangles.
    """
    return build_rips(interval(10), 2)


def test_comparison_on_path(path):
    """
    Test that every vertex pair of the path passes with alpha_1 = 1 exactly.
    """
    report = verify_lemma(path, "comparison", {"a": 1})
    assert report.passed
    assert report.constant == 1
    assert report.checked == 28
    assert report.worst_ratio == 1
    assert report.offending == 0


def test_comparison_on_strip_with_workers(strip):
    """
    Test the comparison lemma on a 2-dimensional complex, serial and threaded.
    """
    serial = verify_lemma(strip, "comparison", {"a": 2})
    threaded = verify_lemma(strip, "comparison", {"a": 2}, workers=4)
    assert serial.passed
    assert serial.constant == derive_dimension_constants(2).alpha
    assert serial.to_json() == threaded.to_json()


def test_comparison_inconclusive_with_small_constant(path):
    """
    Test that ratios above a too-small constant are reported, not refuted.
    """
    tight = DimensionConstants(1, Fraction(1, 2), Fraction(1), Fraction(1))
    report = verify_lemma(path, "comparison", {"a": 1}, constants=tight)
    assert report.status == "INCONCLUSIVE"
    assert report.offending == 28
    assert len(report.to_json()["pairs"]) == 20


def test_separation_of_interval_blocks():
    """
    Test C = {0..3}, D = {10..13}, eps = 7, a = 1: certified separation 5 >= 7 / beta_1.
    """
    complex_ = build_rips(interval(14), 1)
    family = [[0, 1, 2, 3], [10, 11, 12, 13]]
    report = verify_lemma(complex_, "separation", {"a": 1, "eps": 7, "family": family})
    assert report.passed
    assert report.worst_ratio == Fraction(7, 5)
    assert report.constant == Fraction(3, 2)
    assert report.worst_pair == family


def test_separation_requires_separated_family():
    """
    Test BAD_PARAMS when the family is closer than eps.
    """
    complex_ = build_rips(interval(14), 1)
    with pytest.raises(ComplexError) as exc_info:
        verify_lemma(complex_, "separation",
                     {"a": 1, "eps": 8, "family": [[0, 1, 2, 3], [10, 11, 12, 13]]})
    assert exc_info.value.code == "BAD_PARAMS"


def test_neighborhood_on_strip(strip):
    """
    Test eps = 2, a = 2 around C = {0, 1}: vertices 0..5 are certified, the worst is 5.
    """
    report = verify_lemma(strip, "neighborhood", {"a": 2, "eps": 2, "C": [0, 1]})
    assert report.passed
    assert report.checked == 6
    assert report.worst_ratio == 1
    assert report.worst_pair == [5]


def test_neighborhood_needs_eps(path):
    """
    Test that a missing eps is BAD_PARAMS.
    """
    with pytest.raises(ComplexError) as exc_info:
        verify_lemma(path, "neighborhood", {"a": 1, "C": [0]})
    assert exc_info.value.code == "BAD_PARAMS"


def test_scaled_comparison_on_scaled_strip():
    """
    Test the scaled comparison lemma with C = W on a scaled strip.
    """
    complex_ = build_scaled_rips(interval(6), [0, 1, 2], 1, 2, 2)
    report = verify_lemma(complex_, "scaled_comparison", {"a": 1})
    assert report.passed
    assert report.constant_name == "beta"
    assert report.checked == 3
    assert report.params["C"] == [0, 1, 2]


def test_scaled_checks_above_dimension_two():
    """
    Test UNSUPPORTED_DIMENSION for a scaled complex of dimension 3.
    """
    complex_ = build_scaled_rips(interval(6), [0], 1, 3, 2)
    assert complex_.dimension == 3
    with pytest.raises(ComplexError) as exc_info:
        verify_lemma(complex_, "scaled_comparison", {"a": 1})
    assert exc_info.value.code == "UNSUPPORTED_DIMENSION"


def test_cone_retraction_needs_scaled_complex(path):
    """
    Test that the collapse check rejects an unscaled complex.
    """
    with pytest.raises(ComplexError) as exc_info:
        verify_lemma(path, "cone_retraction", {"eps": 1})
    assert exc_info.value.code == "BAD_PARAMS"


def test_smallest_passing_m():
    """
    Test that with eps = 1 the collapse map is 2-Lipschitz from m = 2 on.
    """
    sweep = smallest_passing_m(triangle_space(2), [0], 1, 2, 1, [3, 1, 2])
    assert sweep.m == 2
    assert sorted(sweep.reports) == [1, 2]
    assert sweep.reports[1].worst_ratio == INF
    assert sweep.reports[2].worst_ratio <= 2
    assert sweep.to_json()["m"] == 2


def test_cone_retraction_without_marked_triangles():
    """
    Test that scaled triangles away from W give an empty passing check.
    """
    complex_ = build_scaled_rips(triangle_space(2), [], 1, 2, 4)
    report = verify_lemma(complex_, "cone_retraction", {"eps": 1})
    assert report.passed
    assert report.checked == 0


def test_unknown_lemma(path):
    """
    Test UNKNOWN_LEMMA.
    """
    with pytest.raises(ComplexError) as exc_info:
        verify_lemma(path, "homotopy", {})
    assert exc_info.value.code == "UNKNOWN_LEMMA"


def test_report_json_carries_constants(path):
    """
    Test that a report exports the constants and their derivation.
    """
    exported = verify_lemma([path, path], "comparison", {"a": 1}).to_json()
    assert exported["status"] == "PASS"
    assert exported["checked"] == 56
    assert exported["constant"] == {"name": "alpha", "value": "1/1"}
    assert exported["constants"]["derivation"]["method"] == "exact"
    assert exported["params"]["a"] == "1/1"
