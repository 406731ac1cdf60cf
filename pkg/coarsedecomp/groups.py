# coarsedecomp/groups.py

"""
groups.py

Finite balls in the word metrics of the catalog groups: free abelian groups
with weighted generators, the weighted direct sum of countably many copies
of Z, lamplighter groups over Z, and matrix groups whose metric is the sum
of norm-induced lengths.

Word lengths of the abelian and lamplighter groups have closed forms, used
for all pairwise distances; Dijkstra from the identity over the weighted
Cayley graph lists the ball and doubles as an oracle for the closed forms.

Classes:
    GroupSpec: Base class of the catalog.
    FreeAbelian, WeightedDirectSum, Lamplighter, MatrixGroup: The catalog.
    FirstCoordinates, PositionKernel, UnipotentLevel: Subgroup selectors.
"""

import logging
import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from heapq import heappop, heappush
from itertools import count

import numpy as np

from .config import BALL_CAP
from .errors import GroupError
from .matrices import MatrixOverRing, combined_length, unipotent_level
from .metric import FiniteMetricSpace, MetricFamily, Subspace, to_rational

logger = logging.getLogger(__name__)


class GroupSpec(ABC):
    """
    A finitely generated group with a weighted symmetric generating set.

    Subclasses provide the group law, the generators with their weights and
    a closed-form word length.
    """

    kind = "group"

    @abstractmethod
    def identity(self):
        """The identity element."""

    @abstractmethod
    def generators(self):
        """List of (generator, weight) pairs, closed under inverses."""

    @abstractmethod
    def multiply(self, g, h):
        """The product gh."""

    @abstractmethod
    def inverse(self, g):
        """The inverse of g."""

    @abstractmethod
    def length(self, g):
        """The word length of g (closed form)."""

    def distance(self, g, h):
        """d(g, h) = length(g^-1 h)."""
        return self.length(self.multiply(self.inverse(g), h))

    def sort_key(self, g):
        """Key ordering elements of equal length."""
        return g

    def distance_rows(self, elements):
        """
        Row function and common denominator for the distance matrix of a list of elements.

        Returns:
            tuple: (row_fn(i) -> int64 codes, denominator).
        """
        elements = list(elements)

        def row(i):
            return np.array([self.distance(elements[i], h) for h in elements], dtype=np.int64)
        return row, 1

    @abstractmethod
    def to_json(self):
        """The JSON description of the group."""


@dataclass(frozen=True)
class FreeAbelian(GroupSpec):
    """
    Z^n with generators +-e_i of weight w_i.

    Attributes:
        n (int): Rank.
        weights (tuple): Positive rational weight of each basis generator.
    """

    n: int = 1
    weights: tuple = None
    kind = "free_abelian"

    def __post_init__(self):
        if self.n < 1:
            raise GroupError("BAD_GROUP_SPEC", f"rank must be positive, got {self.n}")
        weights = tuple(to_rational(w) for w in (self.weights or (1,) * self.n))
        if len(weights) != self.n or any(w <= 0 for w in weights):
            raise GroupError("BAD_GROUP_SPEC", f"need {self.n} strictly positive weights, got {weights}")
        object.__setattr__(self, "weights", weights)

    def identity(self):
        return (0,) * self.n

    def generators(self):
        result = []
        for i, w in enumerate(self.weights):
            for sign in (1, -1):
                g = [0] * self.n
                g[i] = sign
                result.append((tuple(g), w))
        return result

    def multiply(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def length(self, g):
        return sum((w * abs(a) for w, a in zip(self.weights, g)), Fraction(0))

    def sort_key(self, g):
        return tuple(g)

    def distance_rows(self, elements):
        denominator = reduce(math.lcm, (w.denominator for w in self.weights), 1)
        scaled = np.array([int(w * denominator) for w in self.weights], dtype=np.int64)
        coords = np.array(list(elements), dtype=np.int64).reshape(-1, self.n)

        def row(i):
            return np.abs(coords - coords[i]) @ scaled
        return row, denominator

    def to_json(self):
        return {"type": "free_abelian", "n": self.n,
                "weights": [str(w) for w in self.weights]}


@dataclass(frozen=True, init=False)
class WeightedDirectSum(FreeAbelian):
    """
    The direct sum of copies of Z where the i-th generator has weight i,
    truncated to the first ``cutoff`` coordinates.

    Attributes:
        cutoff (int): Number of coordinates carried.
    """

    cutoff: int = 8
    kind = "weighted_direct_sum"

    def __init__(self, cutoff=8):
        object.__setattr__(self, "cutoff", int(cutoff))
        object.__setattr__(self, "n", int(cutoff))
        object.__setattr__(self, "weights", tuple(range(1, int(cutoff) + 1)))
        self.__post_init__()

    def to_json(self):
        return {"type": "weighted_direct_sum", "cutoff": self.cutoff}


def weighted_abelian_length(element):
    """
    Sum over i of i * |a_i| for a finitely supported vector.

    Args:
        element: Sequence (a_1, a_2, ...) or dict {i: a_i} with 1-based keys.

    Returns:
        int: The length.
    """
    items = element.items() if isinstance(element, dict) else enumerate(element, start=1)
    return sum(int(i) * abs(int(a)) for i, a in items)


@dataclass(frozen=True)
class Lamplighter(GroupSpec):
    """
    The lamplighter group L wr Z with lamps L = Z/p (p >= 2) or Z (p = 0).

    Elements are (cursor, lamps) with lamps a sorted tuple of (position,
    value) pairs with nonzero values. Generators are t^+-1 moving the cursor
    and a^+-1 changing the lamp under it, deduplicated when a = a^-1.

    Attributes:
        lamp (int): p for Z/p lamps, 0 for Z lamps.
    """

    lamp: int = 2
    kind = "lamplighter"

    def __post_init__(self):
        if self.lamp == 1 or self.lamp < 0:
            raise GroupError("BAD_GROUP_SPEC", f"lamp group Z/{self.lamp} is not supported")

    def _reduce(self, value):
        return value % self.lamp if self.lamp else value

    def identity(self):
        return (0, ())

    def generators(self):
        gens = [(1, ()), (-1, ()), (0, ((0, 1),)), (0, ((0, self._reduce(-1)),))]
        unique = list(dict.fromkeys(gens))
        return [(g, Fraction(1)) for g in unique]

    def multiply(self, g, h):
        cursor, lamps = g
        shift, other = h
        state = dict(lamps)
        for position, value in other:
            key = position + cursor
            total = self._reduce(state.get(key, 0) + value)
            if total:
                state[key] = total
            else:
                state.pop(key, None)
        return (cursor + shift, tuple(sorted(state.items())))

    def inverse(self, g):
        cursor, lamps = g
        return (-cursor, tuple(sorted((position - cursor, self._reduce(-value))
                                      for position, value in lamps)))

    def lamp_cost(self, value):
        """Generator count needed to set a lamp to ``value``."""
        if self.lamp == 2:
            return 1
        if self.lamp:
            return min(value, self.lamp - value)
        return abs(value)

    def length(self, g):
        cursor, lamps = g
        positions = [position for position, _ in lamps]
        left = min([0, cursor] + positions)
        right = max([0, cursor] + positions)
        tour = 2 * (right - left) - abs(cursor)
        return Fraction(sum(self.lamp_cost(value) for _, value in lamps) + tour)

    def sort_key(self, g):
        return (g[0], g[1])

    def position(self, g):
        """The image of g under the position homomorphism to Z."""
        return g[0]

    def to_json(self):
        return {"type": "lamplighter", "lamp": f"z{self.lamp}" if self.lamp else "z"}


@dataclass(frozen=True, eq=False)
class MatrixGroup(GroupSpec):
    """
    The subgroup of GL(n, K) generated by the given matrices, with the metric
    d(g, h) = sum over ``norms`` of l(g^-1 h).

    Attributes:
        matrix_generators (tuple): MatrixOverRing generators.
        norms (tuple): Discrete norms whose lengths are summed.
        name (str): Label.
        ring (str): Ring name the entries were read in.
    """

    matrix_generators: tuple = ()
    norms: tuple = ()
    name: str = "matrix group"
    ring: str = "f2x"
    sources: list = field(default_factory=list)
    kind = "matrix"

    def __post_init__(self):
        if not self.matrix_generators:
            raise GroupError("BAD_GROUP_SPEC", "a matrix group needs generators")
        if not self.norms:
            raise GroupError("BAD_GROUP_SPEC", "a matrix group needs a length function")

    def identity(self):
        n = self.matrix_generators[0].n
        return MatrixOverRing.identity(n, like=self.matrix_generators[0][0, 0])

    def generators(self):
        gens = []
        for g in self.matrix_generators:
            gens.append(g)
            gens.append(g.inverse())
        return [(g, Fraction(1)) for g in dict.fromkeys(gens)]

    def multiply(self, g, h):
        return g * h

    def inverse(self, g):
        return g.inverse()

    def length(self, g):
        return combined_length(self.norms, g)

    def sort_key(self, g):
        return repr(g)

    def distance_rows(self, elements):
        elements = list(elements)
        inverses = [g.inverse() for g in elements]
        denominator = reduce(math.lcm, (Fraction(n.scale).denominator for n in self.norms), 1)

        def row(i):
            return np.array([int(self.length(inverses[i] * h) * denominator) for h in elements],
                            dtype=np.int64)
        return row, denominator

    def to_json(self):
        return {"type": "matrix", "ring": self.ring, "name": self.name,
                "generators": self.sources,
                "length": [norm.to_json() for norm in self.norms]}


def word_length(spec, g):
    """The closed-form length of g in the catalog group ``spec``."""
    return spec.length(g)


def dijkstra_lengths(spec, radius, cap=BALL_CAP):
    """
    Word lengths of every element within ``radius`` of the identity.

    Args:
        spec (GroupSpec): Group with weighted symmetric generators.
        radius: Nonnegative rational.
        cap (int): Largest number of settled elements allowed.

    Returns:
        dict: Element -> word length, for lengths <= radius.

    Raises:
        GroupError: BALL_TOO_LARGE once more than ``cap`` elements are settled.
    """
    radius = to_rational(radius)
    start = spec.identity()
    generators = spec.generators()
    distances = {start: Fraction(0)}
    settled = {}
    counter = count()
    to_explore = [(Fraction(0), next(counter), start)]

    while to_explore:
        current, _, element = heappop(to_explore)
        if element in settled:
            continue
        settled[element] = current
        if len(settled) > cap:
            raise GroupError("BALL_TOO_LARGE",
                             f"ball of radius {radius} in {spec.kind} exceeds {cap} elements")
        for generator, weight in generators:
            new_distance = current + weight
            if new_distance > radius:
                continue
            neighbor = spec.multiply(element, generator)
            if new_distance < distances.get(neighbor, math.inf):
                distances[neighbor] = new_distance
                heappush(to_explore, (new_distance, next(counter), neighbor))
    return settled


def _matrix_closure(spec, radius, cap):
    """Closure of the identity under the generators, pruning elements longer than ``radius``."""
    start = spec.identity()
    found = {start: Fraction(0)}
    queue = deque([start])
    generators = [g for g, _ in spec.generators()]
    while queue:
        element = queue.popleft()
        for generator in generators:
            candidate = element * generator
            if candidate in found:
                continue
            length = spec.length(candidate)
            if length > radius:
                continue
            found[candidate] = length
            if len(found) > cap:
                raise GroupError("BALL_TOO_LARGE",
                                 f"ball of radius {radius} in {spec.name} exceeds {cap} elements")
            queue.append(candidate)
    return found


def ball_elements(spec, radius, cap=BALL_CAP):
    """
    The elements of length <= radius, with their lengths.

    Word-metric groups use Dijkstra from the identity; matrix groups use the
    pruned closure under the generators.
    """
    radius = to_rational(radius)
    if radius < 0:
        raise GroupError("BAD_GROUP_SPEC", f"radius must be nonnegative, got {radius}")
    if isinstance(spec, MatrixGroup):
        return _matrix_closure(spec, radius, cap)
    return dijkstra_lengths(spec, radius, cap)


def ball(spec, radius, cap=BALL_CAP):
    """
    The ball of the given radius as a finite metric space.

    Points are ordered by length, then by the group's sort key; distances are
    d(g, h) = length(g^-1 h) computed exactly.

    Args:
        spec (GroupSpec): The group.
        radius: Nonnegative rational.
        cap (int): Largest allowed ball size.

    Returns:
        FiniteMetricSpace: The ball, with ``source`` = (spec, radius).

    Raises:
        GroupError: BALL_TOO_LARGE if the ball has more than ``cap`` elements.
    """
    lengths = ball_elements(spec, radius, cap)
    elements = sorted(lengths, key=lambda g: (lengths[g], spec.sort_key(g)))
    row, denominator = spec.distance_rows(elements)
    logger.info("Ball of radius %s in %s: %d elements", radius, spec.kind, len(elements))
    return FiniteMetricSpace(elements, row_fn=row, denominator=denominator,
                             name=f"{spec.kind} ball r={radius}",
                             source=(spec, to_rational(radius)))


@dataclass(frozen=True)
class FirstCoordinates:
    """The subgroup Z^n on the first n coordinates of an abelian group."""

    n: int


@dataclass(frozen=True)
class PositionKernel:
    """The kernel of the position homomorphism of a lamplighter group."""


@dataclass(frozen=True)
class UnipotentLevel:
    """
    The subgroup U_k of the upper unipotent group.

    Attributes:
        level (int): k.
        theta: Expanding field element.
        norm (Norm): Discrete norm with gamma(theta) > 1.
    """

    level: int
    theta: object
    norm: object


def _coset_keys(points, spec, selector):
    if isinstance(selector, FirstCoordinates) and isinstance(spec, FreeAbelian):
        if not 0 <= selector.n <= spec.n:
            raise GroupError("UNSUPPORTED_SUBGROUP",
                             f"Z^{selector.n} is not a coordinate subgroup of Z^{spec.n}")
        return [tuple(g[selector.n:]) for g in points]
    if isinstance(selector, PositionKernel) and isinstance(spec, Lamplighter):
        return [spec.position(g) for g in points]
    if isinstance(selector, UnipotentLevel) and isinstance(spec, MatrixGroup):
        keys = []
        representatives = []
        for g in points:
            for k, rep in enumerate(representatives):
                if unipotent_level(rep.inverse() * g, selector.theta, selector.norm) <= selector.level:
                    keys.append(k)
                    break
            else:
                keys.append(len(representatives))
                representatives.append(g)
        return keys
    raise GroupError("UNSUPPORTED_SUBGROUP",
                     f"selector {selector!r} is not available for {spec.kind}")


def coset_partition(space, spec, selector):
    """
    Partitions a ball, or a subset of one, into its intersections with the
    left cosets of a subgroup.

    Args:
        space (FiniteMetricSpace or Subspace): A ball of ``spec`` or part of one.
        spec (GroupSpec): The group.
        selector: FirstCoordinates, PositionKernel or UnipotentLevel.

    Returns:
        MetricFamily: One member per coset met, ordered by first point.

    Raises:
        GroupError: UNSUPPORTED_SUBGROUP for other selectors.
    """
    member = space if isinstance(space, Subspace) else space.whole()
    keys = _coset_keys(member.points, spec, selector)
    classes = {}
    for i, key in zip(member.indices, keys):
        classes.setdefault(key, []).append(i)
    members = sorted(classes.values(), key=lambda indices: indices[0])
    logger.debug("Coset partition of %s: %d cosets", member.ambient.name, len(members))
    return MetricFamily(Subspace(member.ambient, indices) for indices in members)


def group_from_json(data):
    """
    Builds a GroupSpec from its JSON description.

    Matrix groups are read by serialization.group_spec_from_json, which
    knows the ring and norm formats.
    """
    kind = data.get("type")
    if kind == "free_abelian":
        return FreeAbelian(int(data["n"]), tuple(data["weights"]) if "weights" in data else None)
    if kind == "weighted_direct_sum":
        return WeightedDirectSum(cutoff=int(data["cutoff"]))
    if kind == "lamplighter":
        lamp = str(data.get("lamp", "z2")).lower()
        return Lamplighter(0 if lamp == "z" else int(lamp.lstrip("z")))
    raise GroupError("BAD_GROUP_SPEC", f"unknown group type '{kind}'")
