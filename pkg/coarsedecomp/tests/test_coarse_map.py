# tests/test_coarse_map.py

"""
Unit tests for coarse-map witnesses.
"""

import random
from fractions import Fraction

import pytest

from coarsedecomp.coarse_map import (
    CoarseMapWitness, MapMember, StepFunction, check_coarse_map,
    compose_witnesses, preimage_family, properness_bound)
from coarsedecomp.errors import MetricError
from coarsedecomp.metric import FiniteMetricSpace, MetricFamily


def interval(values, name="interval"):
    """Returns a set of integers with the usual distance."""
    return FiniteMetricSpace.from_function(values, lambda x, y: abs(x - y), name=name)


def witness_for(source, target, fn, rho, delta):
    """Builds a single-member witness for x -> fn(x)."""
    member = MapMember(source.whole(), target, {x: fn(x) for x in source.points})
    return CoarseMapWitness((member,), rho, delta)


def test_step_function_lookup_is_right_continuous():
    """
    Test evaluation at and between breakpoints.
    """
    rho = StepFunction(((0, 0), (1, 2), (3, 5)))
    assert rho(0) == 0
    assert rho(Fraction(1, 2)) == 0
    assert rho(1) == 2
    assert rho(2) == 2
    assert rho(3) == 5
    assert rho(100) == 5


@pytest.mark.parametrize("breakpoints", [
    ((0, 2), (1, 1)),
    ((1, 0), (2, 1)),
    ((0, 0), (0, 1)),
])
def test_step_function_rejects_bad_breakpoints(breakpoints):
    """
    Test that decreasing values, a missing 0 and repeated arguments are rejected.
    """
    with pytest.raises(MetricError):
        StepFunction(breakpoints)


def test_identity_map_is_coarse():
    """
    Test the identity on an interval with rho(t) = delta(t) = t.
    """
    space = interval(range(10))
    witness = witness_for(space, space, lambda x: x,
                          StepFunction.identity(9), StepFunction.identity(9))
    report = check_coarse_map(witness)
    assert report.expansive and report.proper
    assert report.violations == []


def test_doubling_fails_unit_expansion():
    """
    Test that x -> 2x is not expansive with rho(t) = t; (0, 1) is reported.
    """
    source = interval(range(9), name="source")
    target = interval(range(17), name="target")
    witness = witness_for(source, target, lambda x: 2 * x,
                          StepFunction.identity(16), StepFunction.identity(16))
    report = check_coarse_map(witness)
    assert not report.expansive
    assert report.proper
    assert report.violations[0]["pair"] == [0, 1]
    assert report.violations[0]["kind"] == "expansive"


def test_doubling_passes_with_doubled_modulus():
    """
    Test that x -> 2x passes with rho(t) = 2t and delta(t) = t.
    """
    source = interval(range(9), name="source")
    target = interval(range(17), name="target")
    witness = witness_for(source, target, lambda x: 2 * x,
                          StepFunction.linear(2, 16), StepFunction.identity(16))
    report = check_coarse_map(witness)
    assert report.expansive and report.proper


def test_compose_with_composed_moduli():
    """
    Test that composites of random passing maps pass with composed moduli.
    """
    rng = random.Random(7)
    for _ in range(10):
        a = interval(range(8), name="a")
        b = interval(range(0, 40), name="b")
        c = interval(range(0, 200), name="c")
        s, u = rng.randint(1, 3), rng.randint(1, 3)
        inner = witness_for(a, b, lambda x: s * x,
                            StepFunction.linear(s, 40), StepFunction.identity(40))
        outer = witness_for(b, c, lambda y: u * y,
                            StepFunction.linear(u, 200), StepFunction.identity(200))
        assert check_coarse_map(inner).expansive
        assert check_coarse_map(outer).expansive
        composite = compose_witnesses(outer, inner)
        report = check_coarse_map(composite)
        assert report.expansive and report.proper, \
            f"Composite of scalings {s} and {u} failed: {report.violations}"


def test_preimage_family():
    """
    Test pulling target pieces back through a projection.
    """
    source = FiniteMetricSpace.from_function(
        [(x, y) for x in range(3) for y in range(3)],
        lambda p, q: abs(p[0] - q[0]) + abs(p[1] - q[1]), name="grid")
    target = interval(range(3), name="x-axis")
    witness = witness_for(source, target, lambda p: p[0],
                          StepFunction.identity(4), StepFunction(((0, 0),)))
    family = MetricFamily([target.subspace([0]), target.subspace([2])])
    preimages = preimage_family(witness, family)
    assert [sorted(piece.points) for piece in preimages] == [
        [(0, 0), (0, 1), (0, 2)], [(2, 0), (2, 1), (2, 2)]]


def test_properness_bound():
    """
    Test the effective properness bound of a step modulus.
    """
    delta = StepFunction(((0, 0), (2, 1), (4, 3)))
    assert properness_bound(delta, 1) == 4
    assert properness_bound(delta, 0) == 2
    with pytest.raises(MetricError) as exc_info:
        properness_bound(delta, 3)
    assert exc_info.value.code == "NOT_PROPER"
