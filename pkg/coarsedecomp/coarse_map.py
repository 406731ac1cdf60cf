# coarsedecomp/coarse_map.py

"""
coarse_map.py

Witnesses for uniformly expansive and effectively proper maps between
finite metric spaces, and the exact all-pairs check of both conditions.

Classes:
    StepFunction: Nondecreasing right-continuous step function on [0, inf).
    MapMember: One source subspace with its map into a target space.
    CoarseMapWitness: A family of member maps with shared moduli rho, delta.
    CoarseMapReport: Result of check_coarse_map.
"""

import logging
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import MetricError
from .metric import INF, INF_CODE, MetricFamily, Subspace, format_rational, to_rational

logger = logging.getLogger(__name__)

MAX_REPORTED_VIOLATIONS = 20


@dataclass(frozen=True)
class StepFunction:
    """
    A nondecreasing step function given by breakpoints (t_k, v_k).

    The value at t is v_k for the last breakpoint with t_k <= t; past the last
    breakpoint the last value extends. The first breakpoint must sit at 0.

    Attributes:
        breakpoints (tuple): ((t_0, v_0), (t_1, v_1), ...) with t_0 = 0,
            strictly increasing t and nondecreasing v.
    """

    breakpoints: tuple

    def __post_init__(self):
        points = tuple((to_rational(t), to_rational(v)) for t, v in self.breakpoints)
        if not points:
            raise MetricError("NOT_MONOTONE", "a step function needs at least one breakpoint")
        if points[0][0] != 0:
            raise MetricError("NOT_MONOTONE", "the first breakpoint must be at 0")
        for (t0, v0), (t1, v1) in zip(points, points[1:]):
            if not t0 < t1:
                raise MetricError("NOT_MONOTONE",
                                  f"breakpoints must increase, got {t0} then {t1}")
            if v1 < v0:
                raise MetricError("NOT_MONOTONE",
                                  f"values must not decrease, got {v0} then {v1}")
        object.__setattr__(self, "breakpoints", points)
        object.__setattr__(self, "_ts", [t for t, _ in points])

    def __call__(self, t):
        t = to_rational(t)
        if t == INF:
            return INF
        if t < 0:
            raise ValueError(f"step functions are defined on [0, inf), got {t}")
        return self.breakpoints[bisect_right(self._ts, t) - 1][1]

    def below(self, t):
        """The supremum of the function on [0, t); the value at 0 when t = 0."""
        t = to_rational(t)
        if t == INF:
            return self.breakpoints[-1][1]
        k = max(bisect_left(self._ts, t) - 1, 0)
        return self.breakpoints[k][1]

    @classmethod
    def from_function(cls, fn, at):
        """
        Samples a nondecreasing function at the given arguments.

        Args:
            fn (callable): The function to sample.
            at (iterable): Arguments; 0 is always added.

        Returns:
            StepFunction: Breakpoints (t, fn(t)) for every sampled t.
        """
        ts = sorted({Fraction(0)} | {to_rational(t) for t in at if to_rational(t) != INF})
        return cls(tuple((t, fn(t)) for t in ts))

    @classmethod
    def linear(cls, slope, up_to, offset=0):
        """
        Returns t -> slope * t + offset sampled at the integers 0..up_to.

        Exact on integer arguments, which covers word metrics with unit weights.
        """
        slope, offset = to_rational(slope), to_rational(offset)
        return cls(tuple((k, slope * k + offset) for k in range(int(up_to) + 1)))

    @classmethod
    def identity(cls, up_to):
        """Returns t -> t sampled at the integers 0..up_to."""
        return cls.linear(1, up_to)

    def compose(self, inner):
        """
        Returns self ∘ inner, exact for right-continuous step functions.

        Args:
            inner (StepFunction): The function applied first.

        Returns:
            StepFunction: Breakpoints of ``inner`` with values passed through self.
        """
        return StepFunction(tuple((t, self(v)) for t, v in inner.breakpoints))

    def to_json(self):
        """Returns the breakpoints as a list of ["p/q", "p/q"] pairs."""
        return [[format_rational(t), format_rational(v)] for t, v in self.breakpoints]


@dataclass(eq=False)
class MapMember:
    """
    A map from a subspace into a target space.

    Attributes:
        source (Subspace): Domain of the map.
        target (FiniteMetricSpace): Codomain of the map.
        mapping (dict): Source point -> target point; total on ``source``.
    """

    source: Subspace
    target: object
    mapping: dict = field(default_factory=dict)

    def image_index(self, i):
        """Returns the target index of the image of source point index ``i``."""
        point = self.source.ambient.points[i]
        try:
            return self.target.index(self.mapping[point])
        except KeyError as e:
            raise MetricError("MAP_NOT_TOTAL",
                              f"the map is undefined at {point!r}") from e


@dataclass(frozen=True)
class CoarseMapWitness:
    """
    A family of maps with shared expansion and properness moduli.

    Attributes:
        members (tuple): MapMember per family member.
        rho (StepFunction): Expansion modulus, d(f x, f y) <= rho(d(x, y)).
        delta (StepFunction): Properness modulus, delta(d(x, y)) <= d(f x, f y).
    """

    members: tuple
    rho: StepFunction
    delta: StepFunction


@dataclass
class CoarseMapReport:
    """
    Result of check_coarse_map.

    Attributes:
        expansive (bool): The rho condition holds on every pair.
        proper (bool): The delta condition holds on every pair.
        violations (list): Up to MAX_REPORTED_VIOLATIONS offending pairs.
    """

    expansive: bool = True
    proper: bool = True
    violations: list = field(default_factory=list)


def _modulus_codes(modulus, codes, source, target, upper):
    """Thresholds in target code units for each source distance code."""
    out = np.empty(codes.shape, dtype=np.int64)
    for k, code in enumerate(codes):
        value = modulus(source.decode(code))
        if value == INF:
            out[k] = INF_CODE
            continue
        scaled = value * target.denominator
        out[k] = math.floor(scaled) if upper else math.ceil(scaled)
    return out


def check_coarse_map(witness, max_violations=MAX_REPORTED_VIOLATIONS):
    """
    Checks the expansion and properness conditions on every pair of every member.

    Args:
        witness (CoarseMapWitness): The maps and moduli to check.
        max_violations (int): How many offending pairs to record.

    Returns:
        CoarseMapReport: Which conditions hold, with example violations.
    """
    report = CoarseMapReport()
    for k, member in enumerate(witness.members):
        source = member.source.ambient
        target = member.target
        idx = member.source.index_array
        if idx.size < 2:
            continue
        images = np.array([member.image_index(int(i)) for i in idx], dtype=np.intp)
        d_source = source.block(idx, idx)
        d_target = target.block(images, images)
        codes, inverse = np.unique(d_source, return_inverse=True)
        inverse = inverse.reshape(d_source.shape)
        upper = _modulus_codes(witness.rho, codes, source, target, upper=True)[inverse]
        lower = _modulus_codes(witness.delta, codes, source, target, upper=False)[inverse]
        for kind, bad in (("expansive", d_target > upper), ("proper", d_target < lower)):
            bad = np.triu(bad, k=1)
            if not bad.any():
                continue
            setattr(report, kind, False)
            for a, b in np.argwhere(bad):
                if len(report.violations) >= max_violations:
                    break
                report.violations.append({
                    "kind": kind,
                    "member": k,
                    "pair": [source.points[idx[a]], source.points[idx[b]]],
                    "source_distance": format_rational(source.decode(d_source[a, b])),
                    "image_distance": format_rational(target.decode(d_target[a, b])),
                })
    logger.debug("Coarse map check: expansive=%s proper=%s",
                 report.expansive, report.proper)
    return report


def compose_witnesses(outer, inner):
    """
    Composes two witnesses, outer ∘ inner.

    Every inner member's image must lie inside the source of some outer member.

    Args:
        outer (CoarseMapWitness): The map applied second.
        inner (CoarseMapWitness): The map applied first.

    Returns:
        CoarseMapWitness: The composite with moduli composed.

    Raises:
        MetricError: AMBIENT_MISMATCH if an image is not covered.
    """
    members = []
    for member in inner.members:
        image = {member.mapping[p] for p in member.source.points}
        host = next((m for m in outer.members
                     if m.source.ambient is member.target
                     and image <= set(m.source.points)), None)
        if host is None:
            raise MetricError("AMBIENT_MISMATCH",
                              "no outer member contains the image of an inner member")
        mapping = {p: host.mapping[member.mapping[p]] for p in member.source.points}
        members.append(MapMember(member.source, host.target, mapping))
    return CoarseMapWitness(tuple(members),
                            outer.rho.compose(inner.rho),
                            outer.delta.compose(inner.delta))


def preimage_family(witness, family):
    """
    Pulls a family of target subsets back through every member map.

    Args:
        witness (CoarseMapWitness): The maps.
        family (MetricFamily): Subspaces of the members' target spaces.

    Returns:
        MetricFamily: Nonempty preimages, ordered by member then target piece.
    """
    pieces = []
    for member in witness.members:
        source = member.source.ambient
        for piece in family:
            if piece.ambient is not member.target:
                continue
            wanted = set(piece.points)
            found = [i for i in member.source.indices
                     if member.mapping[source.points[i]] in wanted]
            if found:
                pieces.append(Subspace(source, found))
    return MetricFamily(pieces)


def properness_bound(delta, bound):
    """
    Returns A such that d(f x, f y) <= bound forces d(x, y) < A.

    A is the first breakpoint where delta exceeds ``bound``.

    Args:
        delta (StepFunction): Properness modulus.
        bound: Nonnegative rational.

    Returns:
        Fraction: The effective properness bound.

    Raises:
        MetricError: NOT_PROPER if delta never exceeds ``bound``.
    """
    bound = to_rational(bound)
    for t, v in delta.breakpoints:
        if v > bound:
            return t
    raise MetricError("NOT_PROPER", f"delta never exceeds {format_rational(bound)}")
