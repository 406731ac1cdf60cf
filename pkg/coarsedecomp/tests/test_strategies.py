# tests/test_strategies.py

"""
Unit tests for the strategies module.
"""

from fractions import Fraction

import pytest

from coarsedecomp.coarse_map import check_coarse_map
from coarsedecomp.decomposition import play_game, verify_certificate
from coarsedecomp.errors import DecompositionError, GroupError, NormError
from coarsedecomp.groups import FreeAbelian, Lamplighter, MatrixGroup, WeightedDirectSum, ball
from coarsedecomp.matrices import unipotent_generators
from coarsedecomp.metric import FiniteMetricSpace, MetricFamily, is_r_disjoint
from coarsedecomp.norms import DegreeNorm
from coarsedecomp.rings import Domain, Poly
from coarsedecomp.strategies import (
    Coordinate, Coset, FiniteUnion, GreedyComponents, IntervalSlabs, UnipotentCosets,
    coset_rank, position_fibering, slab_product, strategy_interval_slabs,
    strategy_unipotent_cosets, unipotent_coset_level)

X = Poly.variable(0, Domain(2), 1)


def interval(n):
    """The integers 0..n-1 with the usual distance."""
    return FiniteMetricSpace.from_function(range(n), lambda a, b: abs(a - b), name=f"Z[0..{n - 1}]")


@pytest.fixture
def unipotent_ball():
    """
    Fixture providing the length <= 4 ball of 2x2 unipotent matrices over F2(X).
    """
    gens = unipotent_generators(2, [X ** k for k in range(4)])
    spec = MatrixGroup(tuple(gens), (DegreeNorm(),), name="U2(F2(X))")
    return ball(spec, 4)


def test_interval_slabs_example():
    """
    Test slabs of width 3 on {0..11}.
    """
    space = interval(12)
    step = strategy_interval_slabs(space.whole(), Coordinate(), 3)
    assert [piece.points for piece in step.part0] == [[0, 1, 2], [6, 7, 8]]
    assert [piece.points for piece in step.part1] == [[3, 4, 5], [9, 10, 11]]


def test_slabs_round_up_fractional_challenges():
    """
    Test that r = 5/2 uses width 3.
    """
    step = strategy_interval_slabs(interval(12).whole(), Coordinate(), Fraction(5, 2))
    assert [piece.points for piece in step.part0] == [[0, 1, 2], [6, 7, 8]]


def test_slabs_on_z2_are_strips():
    """
    Test y-slabs of a Z^2 ball: each piece is a horizontal strip, each part 2-disjoint.
    """
    space = ball(FreeAbelian(2), 6)
    step = strategy_interval_slabs(space.whole(), Coordinate(1), 2)
    for part in (step.part0, step.part1):
        assert is_r_disjoint(MetricFamily(part), 2)
        for piece in part:
            assert len({point[1] // 2 for point in piece.points}) == 1


def test_constant_height_gives_one_piece():
    """
    Test a constant height: one piece in X_0 and an empty X_1.
    """
    space = ball(FreeAbelian(2), 3)
    row = space.subspace([p for p in space.points if p[1] == 0])
    step = strategy_interval_slabs(row, Coordinate(1), 5)
    assert step.part0 == (row,) and step.part1 == ()
    assert IntervalSlabs(Coordinate(1)).is_terminal(row, None, 5)


def test_slabs_need_lipschitz_height():
    """
    Test that h(x) = 2x raises NOT_LIPSCHITZ.
    """
    with pytest.raises(DecompositionError) as exc_info:
        strategy_interval_slabs(interval(5).whole(), lambda p: 2 * p, 2)
    assert exc_info.value.code == "NOT_LIPSCHITZ"


def test_product_of_slabs_on_z2():
    """
    Test y-then-x slabs on the radius 8 ball in Z^2 at (3, 3): depth 2, verified.
    """
    space = ball(FreeAbelian(2), 8)
    cert = play_game(space.whole(), slab_product(2), [3, 3])
    assert cert.depth == 2
    assert verify_certificate(cert).valid
    first = cert.rounds[0].steps[0]
    assert all(len({p[1] // 3 for p in piece.points}) == 1 for piece in first.pieces())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_slab_depth_is_at_most_rank(n):
    """
    Test that Z^n balls need at most n rounds of slabs.
    """
    space = ball(FreeAbelian(n), 4)
    cert = play_game(space.whole(), slab_product(n), [2] * n)
    assert cert.depth <= n
    assert verify_certificate(cert).valid


def test_lamplighter_fibering():
    """
    Test the position fibering of the radius 6 lamplighter ball at (2, 2).
    """
    spec = Lamplighter(2)
    space = ball(spec, 6)
    strategy = position_fibering(space, spec)
    assert check_coarse_map(strategy.witness).expansive
    cert = play_game(space.whole(), strategy, [2, 2])
    assert cert.depth == 2
    assert verify_certificate(cert).valid
    for piece in cert.final_family():
        assert len({g[0] // 2 for g in piece.points}) == 1


def test_weighted_sum_cosets_then_slabs():
    """
    Test cosets of Z^3 at r = 3 in the weighted direct sum, then slabs on Z^3.
    """
    spec = WeightedDirectSum(cutoff=8)
    space = ball(spec, 6)
    cert = play_game(space.whole(), Coset(spec), [3, 3, 3, 3])
    assert verify_certificate(cert).valid
    assert cert.depth <= 4
    first = cert.rounds[0].steps[0]
    assert first.part1 == ()
    assert len(first.part0) > 1
    for piece in first.part0:
        assert len({g[3:] for g in piece.points}) == 1


@pytest.mark.parametrize("spec, r, expected", [
    (WeightedDirectSum(cutoff=8), 3, 3),
    (WeightedDirectSum(cutoff=8), Fraction(5, 2), 3),
    (WeightedDirectSum(cutoff=8), 20, 8),
    (FreeAbelian(2), 1, 0),
    (FreeAbelian(2), 2, 2),
    (FreeAbelian(2, (1, 3)), 2, 1),
])
def test_coset_rank(spec, r, expected):
    """
    Test the subgroup rank chosen for a challenge.
    """
    assert coset_rank(spec, r) == expected


def test_lamplighter_cosets():
    """
    Test kernel cosets grouped into position slabs in the lamplighter ball.
    """
    spec = Lamplighter(2)
    space = ball(spec, 4)
    cert = play_game(space.whole(), Coset(spec), [2, 2])
    assert verify_certificate(cert).valid
    for piece in cert.rounds[0].steps[0].pieces():
        assert len({g[0] // 2 for g in piece.points}) == 1


def test_coset_strategy_rejects_matrix_groups():
    """
    Test that matrix groups have no coset strategy.
    """
    spec = MatrixGroup(tuple(unipotent_generators(2, [X])), (DegreeNorm(),))
    with pytest.raises(GroupError) as exc_info:
        Coset(spec)
    assert exc_info.value.code == "UNSUPPORTED_SUBGROUP"


@pytest.mark.parametrize("r, level", [(2, 3), (Fraction(1, 2), 1), (1, 2)])
def test_unipotent_coset_level(r, level):
    """
    Test the least k with k log gamma(X) > r.
    """
    assert unipotent_coset_level(X, DegreeNorm(), r) == level


def test_unipotent_cosets_at_r2(unipotent_ball):
    """
    Test that r = 2 uses U_3, which holds the whole ball, and the certificate verifies.
    """
    step = strategy_unipotent_cosets(unipotent_ball.whole(), X, DegreeNorm(), 2)
    assert len(step.part0) == 1 and step.part1 == ()
    cert = play_game(unipotent_ball.whole(), UnipotentCosets(X, DegreeNorm()), [2])
    assert cert.depth == 1
    assert verify_certificate(cert).valid


def test_unipotent_cosets_at_small_r(unipotent_ball):
    """
    Test that r = 1/2 uses U_1: four cosets of four, diameter <= 1, pairwise >= 1/2 apart.
    """
    step = strategy_unipotent_cosets(unipotent_ball.whole(), X, DegreeNorm(), Fraction(1, 2))
    family = MetricFamily(step.part0)
    assert sorted(len(piece) for piece in family) == [4, 4, 4, 4]
    assert family.max_diameter() <= 1
    assert is_r_disjoint(family, Fraction(1, 2))


def test_unipotent_cosets_need_expanding_theta():
    """
    Test that theta = X^-1 raises THETA_NOT_EXPANDING.
    """
    with pytest.raises(NormError) as exc_info:
        UnipotentCosets(X ** -1, DegreeNorm())
    assert exc_info.value.code == "THETA_NOT_EXPANDING"


def test_greedy_with_bound_gets_stuck():
    """
    Test that a bound the r-components cannot meet raises STRATEGY_STUCK.
    """
    with pytest.raises(DecompositionError) as exc_info:
        play_game(interval(10).whole(), GreedyComponents(bound=1), [2])
    assert exc_info.value.code == "STRATEGY_STUCK"


def test_finite_union_peels_cover():
    """
    Test the cover {0..5}, {4..9}: one peeling round, then both pieces are 2-connected.
    """
    space = interval(10)
    cover = [space.subspace(range(0, 6)), space.subspace(range(4, 10))]
    cert = play_game(space.whole(), FiniteUnion(cover, GreedyComponents()), [1, 2])
    assert cert.depth == 1
    assert cert.bound == 5
    step = cert.rounds[0].steps[0]
    assert step.part0[0].points == [0, 1, 2, 3, 4, 5]
    assert step.part1[0].points == [6, 7, 8, 9]
    assert verify_certificate(cert).valid


def test_finite_union_needs_a_cover():
    """
    Test that a cover missing points makes the strategy stuck.
    """
    space = interval(10)
    strategy = FiniteUnion([space.subspace(range(0, 4))], GreedyComponents())
    with pytest.raises(DecompositionError) as exc_info:
        play_game(space.whole(), strategy, [1, 2])
    assert exc_info.value.code == "STRATEGY_STUCK"
