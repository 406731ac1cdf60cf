# tests/test_asdim.py

"""
Unit tests for the asdim module.
"""

import pytest

from coarsedecomp.asdim import asdim_decomposition, carve_pieces, verify_asdim
from coarsedecomp.errors import DecompositionError, SearchBudgetExceededError
from coarsedecomp.groups import FreeAbelian, ball
from coarsedecomp.metric import FiniteMetricSpace, diameter


def interval(n):
    """The integers 0..n-1 with the usual distance."""
    return FiniteMetricSpace.from_function(range(n), lambda a, b: abs(a - b))


@pytest.fixture(scope="module")
def long_interval():
    """
    Fixture providing the integers {0..99}.
    """
    return interval(100)


def test_interval_has_alternating_decomposition(long_interval):
    """
    Test d = 1, r = 5, B = 10 on {0..99}: two families of alternating intervals.
    """
    result = asdim_decomposition(long_interval, 1, 5, 10)
    assert result.success
    assert result.method == "pieces"
    assert len(result.parts) == 2
    assert verify_asdim(long_interval, result.parts, 5, 10)
    assert result.parts[0][0].points == list(range(0, 6))
    assert result.parts[1][0].points == list(range(6, 12))


def test_single_family_fails_on_interval(long_interval):
    """
    Test d = 0, r = 5, B = 10: the interval is one 5-component, so failure is proven.
    """
    result = asdim_decomposition(long_interval, 0, 5, 10)
    assert not result.success
    assert result.proven
    assert result.parts == ()


def test_single_bounded_piece():
    """
    Test that a bounded ball is its own decomposition for any r once B is its diameter.
    """
    space = ball(FreeAbelian(2), 3)
    result = asdim_decomposition(space, 0, 1000, diameter(space))
    assert result.success
    assert [len(piece) for piece in result.parts[0]] == [len(space)]


def test_small_spaces_are_searched_point_by_point():
    """
    Test {0..11} with d = 1, r = 3: pairs fit B = 1, single points cannot fit B = 0.
    """
    space = interval(12)
    found = asdim_decomposition(space, 1, 3, 1)
    assert found.success and found.method == "points"
    assert verify_asdim(space, found.parts, 3, 1)
    failed = asdim_decomposition(space, 1, 3, 0)
    assert not failed.success
    assert failed.proven


def test_failure_over_carved_pieces_is_not_proven(long_interval):
    """
    Test that a failure found over carved pieces is reported as unproven.
    """
    result = asdim_decomposition(long_interval, 1, 20, 10)
    assert not result.success
    assert result.method == "pieces"
    assert not result.proven


def test_many_pieces_fall_back_to_greedy():
    """
    Test that {0..399} carves into more pieces than the exact search takes.
    """
    space = interval(400)
    result = asdim_decomposition(space, 1, 5, 10)
    assert result.success
    assert result.method == "greedy"
    assert verify_asdim(space, result.parts, 5, 10)


def test_budget_exceeded():
    """
    Test that a search cut short raises SEARCH_BUDGET_EXCEEDED with exit code 5.
    """
    with pytest.raises(SearchBudgetExceededError) as exc_info:
        asdim_decomposition(interval(12), 1, 3, 1, budget=1)
    assert exc_info.value.exit_code == 5


def test_negative_d_rejected():
    """
    Test that d must be nonnegative.
    """
    with pytest.raises(DecompositionError):
        asdim_decomposition(interval(3), -1, 1, 1)


def test_carved_pieces_are_bounded(long_interval):
    """
    Test that carving covers the space with pieces of diameter at most B.
    """
    pieces = carve_pieces(long_interval.whole(), 7)
    assert sum(len(piece) for piece in pieces) == 100
    assert max(diameter(piece) for piece in pieces) <= 7


def test_verify_asdim_rejects_close_pieces(long_interval):
    """
    Test that two pieces 1 apart in one family fail at r = 5.
    """
    parts = ((long_interval.subspace(range(0, 50)), long_interval.subspace(range(50, 100))),)
    assert not verify_asdim(long_interval, parts, 5, 100)
    assert verify_asdim(long_interval, parts, 1, 49)
