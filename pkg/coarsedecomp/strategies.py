# coarsedecomp/strategies.py

"""
strategies.py

Strategies for the first player of the decomposition game. A strategy keeps
a small state per family member, says when a member needs no further
rounds, and produces the r-decomposition of a member at a challenge r
together with the states of the resulting pieces.

Classes:
    Strategy: Base class.
    GreedyComponents: Split into r-components.
    IntervalSlabs: Slabs of a 1-Lipschitz integer height function.
    Product: Run component strategies one after another.
    Coset: Cosets of a challenge-dependent subgroup, then a fiber strategy.
    UnipotentCosets: Cosets of the dilated unipotent subgroup U_k.
    Fibering: Decompose the image under a map, then the fibers.
    FiniteUnion: Peel a finite cover one set per round.
    Coordinate: Height function reading one coordinate of a point.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coarse_map import CoarseMapWitness, MapMember, StepFunction
from .decomposition import DecompositionStep, pull_back_step, pullback_challenge
from .errors import DecompositionError, GroupError, MetricError
from .groups import (FirstCoordinates, FreeAbelian, Lamplighter, PositionKernel, WeightedDirectSum,
                     coset_partition)
from .matrices import theta_exponent, unipotent_level
from .metric import FiniteMetricSpace, Subspace, diameter, r_components, to_rational

logger = logging.getLogger(__name__)

DONE = "done"


@dataclass(frozen=True)
class Coordinate:
    """
    Height function returning one coordinate of a point.

    Attributes:
        index (int or None): Coordinate read; None returns the point itself.
    """

    index: int = None

    def __call__(self, point):
        return point if self.index is None else point[self.index]

    def __str__(self):
        return "identity" if self.index is None else f"x{self.index}"


class Strategy(ABC):
    """
    A deterministic rule for decomposing family members.

    States are opaque to the game; DONE marks a member that needs no more rounds.
    """

    def initial_state(self, member):
        """The state of a member entering this strategy."""
        return None

    def is_terminal(self, member, state, r_next):
        """
        Whether the member needs no further round.

        Args:
            member (Subspace): The member.
            state: Its state.
            r_next: The next challenge, or None if none is left.
        """
        return state == DONE

    @abstractmethod
    def step(self, member, state, r):
        """
        Decomposes a member at challenge r.

        Returns:
            tuple: (DecompositionStep, child states in piece order).
        """

    def __repr__(self):
        return type(self).__name__


class GreedyComponents(Strategy):
    """
    Splits a member into its r-components, all in X_0.

    Attributes:
        bound: Optional diameter every component must respect.
    """

    def __init__(self, bound=None):
        self.bound = None if bound is None else to_rational(bound)

    def is_terminal(self, member, state, r_next):
        if state == DONE:
            return True
        if self.bound is not None:
            try:
                return diameter(member) <= self.bound
            except MetricError:
                return False
        return r_next is not None and len(r_components(member, r_next)) == 1

    def step(self, member, state, r):
        pieces = r_components(member, r)
        if self.bound is not None:
            for piece in pieces:
                try:
                    size = diameter(piece)
                except MetricError as e:
                    raise DecompositionError("STRATEGY_STUCK",
                                             f"an {r}-component is unbounded") from e
                if size > self.bound:
                    raise DecompositionError(
                        "STRATEGY_STUCK",
                        f"an {r}-component has diameter {size} above {self.bound}")
        return DecompositionStep(member, r, tuple(pieces), ()), [DONE] * len(pieces)


def _heights(member, height):
    values = []
    for point in member.points:
        value = height(point)
        if int(value) != value:
            raise DecompositionError("NOT_LIPSCHITZ",
                                     f"height {value} at {point!r} is not an integer")
        values.append(int(value))
    return np.array(values, dtype=np.int64)


def _check_lipschitz(member, heights):
    ambient = member.ambient
    idx = member.index_array
    gaps = np.abs(heights[:, None] - heights[None, :]) * ambient.denominator
    bad = gaps > ambient.block(idx, idx)
    if bad.any():
        a, b = np.argwhere(bad)[0]
        raise DecompositionError(
            "NOT_LIPSCHITZ",
            f"height changes by {abs(int(heights[a] - heights[b]))} between "
            f"{ambient.points[idx[a]]!r} and {ambient.points[idx[b]]!r}, "
            f"which are {ambient.distance_at(int(idx[a]), int(idx[b]))} apart")


def strategy_interval_slabs(member, height, r):
    """
    Cuts a member into preimages of width-R integer slabs, R = ceil(r).

    Slab k holds the points with k R <= h(x) < (k + 1) R. Even slabs form X_0
    and odd slabs X_1, so two slabs of one part differ in height by at least
    R and, h being 1-Lipschitz, are at least R >= r apart.

    Args:
        member (Subspace): The set to cut.
        height (callable): Integer-valued 1-Lipschitz function on points.
        r: Positive rational challenge.

    Returns:
        DecompositionStep: The slab decomposition.

    Raises:
        DecompositionError: NOT_LIPSCHITZ if h is not 1-Lipschitz on the member.
    """
    r = to_rational(r)
    if r <= 0:
        raise DecompositionError("BAD_CHALLENGE", f"challenges must be positive, got {r}")
    width = math.ceil(r)
    heights = _heights(member, height)
    _check_lipschitz(member, heights)
    slabs = {}
    for i, h in zip(member.indices, heights):
        slabs.setdefault(int(h) // width, []).append(i)
    parts = ([], [])
    for k in sorted(slabs):
        parts[k % 2].append(Subspace(member.ambient, slabs[k]))
    return DecompositionStep(member, r, tuple(parts[0]), tuple(parts[1]))


class IntervalSlabs(Strategy):
    """
    One round of slabs along a height function.

    Attributes:
        height (callable): Integer-valued 1-Lipschitz function.
        name (str): Label used in logs and trees.
    """

    def __init__(self, height, name=None):
        self.height = height
        self.name = name or str(height)

    def is_terminal(self, member, state, r_next):
        if state == DONE:
            return True
        return len({self.height(point) for point in member.points}) <= 1

    def step(self, member, state, r):
        result = strategy_interval_slabs(member, self.height, r)
        return result, [DONE] * len(result.pieces())

    def __repr__(self):
        return f"IntervalSlabs({self.name})"


class Product(Strategy):
    """
    Runs component strategies in order; each piece moves on to the next
    component once the current one is finished with it.

    Attributes:
        components (tuple): The strategies.
    """

    def __init__(self, components):
        self.components = tuple(components)

    def _advance(self, member, state, r_next):
        index, inner = state
        while index < len(self.components) and \
                self.components[index].is_terminal(member, inner, r_next):
            index += 1
            if index < len(self.components):
                inner = self.components[index].initial_state(member)
        return index, inner

    def initial_state(self, member):
        return 0, self.components[0].initial_state(member) if self.components else None

    def is_terminal(self, member, state, r_next):
        index, _ = self._advance(member, state, r_next)
        return index == len(self.components)

    def step(self, member, state, r):
        index, inner = self._advance(member, state, r)
        if index == len(self.components):
            return DecompositionStep.trivial(member, r), [(index, inner)]
        result, children = self.components[index].step(member, inner, r)
        return result, [(index, child) for child in children]

    def __repr__(self):
        return f"Product({', '.join(map(repr, self.components))})"


def slab_product(n):
    """Slabs along coordinates n-1, ..., 0 in turn."""
    return Product([IntervalSlabs(Coordinate(i)) for i in reversed(range(n))])


def coset_rank(spec, r):
    """
    The rank n of the coordinate subgroup Z^n whose cosets are used at challenge r.

    The weighted direct sum takes Z^ceil(r) (capped at the cutoff); other
    abelian groups take the least n whose remaining generators all weigh at
    least r. Either way distinct cosets are at least r apart.
    """
    r = to_rational(r)
    if isinstance(spec, WeightedDirectSum):
        return min(math.ceil(r), spec.n)
    for n in range(spec.n + 1):
        if all(w >= r for w in spec.weights[n:]):
            return n
    return spec.n


class Coset(Strategy):
    """
    Decomposes a group ball along the cosets of a subgroup chosen from the
    challenge, then hands each piece to a fiber strategy.

    For abelian groups the subgroup is Z^n on the first n coordinates with
    n = coset_rank(spec, r); cosets of it are r-disjoint, so they all go to X_0.
    For the weighted direct sum this is Z^ceil(r) or smaller. For
    lamplighter groups the kernel cosets of the position map are grouped
    into position slabs of width ceil(r), split by parity.

    Attributes:
        spec (GroupSpec): The group the ball lives in.
        fiber_factory (callable): Maps (piece, subgroup rank) to a strategy;
            defaults to slabs on the free coordinates, or r-components for
            lamplighters.
    """

    def __init__(self, spec, fiber_factory=None):
        if not isinstance(spec, (FreeAbelian, Lamplighter)):
            raise GroupError("UNSUPPORTED_SUBGROUP",
                             f"no coset strategy for {spec.kind}")
        self.spec = spec
        self.fiber_factory = fiber_factory or self._default_fiber

    def _default_fiber(self, piece, rank):
        if isinstance(self.spec, Lamplighter):
            return GreedyComponents()
        return slab_product(rank)

    def is_terminal(self, member, state, r_next):
        if state is None:
            return len(member) <= 1
        _, fiber, inner = state
        return fiber.is_terminal(member, inner, r_next)

    def _cosets(self, member, r):
        if isinstance(self.spec, FreeAbelian):
            rank = coset_rank(self.spec, r)
            family = coset_partition(member, self.spec, FirstCoordinates(rank))
            return (tuple(family), ()), rank
        width = math.ceil(r)
        slabs = {}
        for coset in coset_partition(member, self.spec, PositionKernel()):
            key = self.spec.position(coset.points[0]) // width
            slabs.setdefault(key, set()).update(coset.indices)
        parts = ([], [])
        for k in sorted(slabs):
            parts[k % 2].append(Subspace(member.ambient, slabs[k]))
        return (tuple(parts[0]), tuple(parts[1])), 1

    def step(self, member, state, r):
        if state is not None:
            _, fiber, inner = state
            result, children = fiber.step(member, inner, r)
            return result, [("fiber", fiber, child) for child in children]
        (part0, part1), rank = self._cosets(member, to_rational(r))
        result = DecompositionStep(member, r, part0, part1)
        children = []
        for piece in result.pieces():
            fiber = self.fiber_factory(piece, rank)
            children.append(("fiber", fiber, fiber.initial_state(piece)))
        logger.debug("Coset step at r=%s: %d pieces, subgroup rank %d",
                     r, len(children), rank)
        return result, children

    def __repr__(self):
        return f"Coset({self.spec.kind})"


def unipotent_coset_level(theta, norm, r):
    """The least k with k log gamma(theta) > r, in length units."""
    unit = theta_exponent(theta, norm) * Fraction(norm.scale)
    return math.floor(to_rational(r) / unit) + 1


def strategy_unipotent_cosets(member, theta, norm, r):
    """
    Splits a ball of upper unipotent matrices into its intersections with
    the cosets of U_k, k minimal with k log gamma(theta) > r.

    Elements of different cosets differ by a matrix outside U_k, whose
    length exceeds r; elements of one coset are within k (n - 1) log gamma(theta).

    Args:
        member (Subspace): Part of a unipotent matrix-group ball.
        theta: Field element with gamma(theta) > 1.
        norm (Norm): Discrete norm measuring the ball.
        r: Positive rational challenge.

    Returns:
        DecompositionStep: All cosets in X_0.

    Raises:
        NormError: THETA_NOT_EXPANDING.
    """
    level = unipotent_coset_level(theta, norm, r)
    representatives = []
    classes = []
    ambient = member.ambient
    for i in member.indices:
        g = ambient.points[i]
        for k, rep in enumerate(representatives):
            if unipotent_level(rep.inverse() * g, theta, norm) <= level:
                classes[k].append(i)
                break
        else:
            representatives.append(g)
            classes.append([i])
    logger.debug("Unipotent cosets at r=%s: level %d, %d cosets", r, level, len(classes))
    return DecompositionStep(member, r, tuple(Subspace(ambient, c) for c in classes), ())


class UnipotentCosets(Strategy):
    """
    One round of U_k cosets.

    Attributes:
        theta: Expanding field element.
        norm (Norm): Discrete norm with gamma(theta) > 1.
    """

    def __init__(self, theta, norm):
        theta_exponent(theta, norm)
        self.theta = theta
        self.norm = norm

    def is_terminal(self, member, state, r_next):
        return state == DONE or len(member) <= 1

    def step(self, member, state, r):
        result = strategy_unipotent_cosets(member, self.theta, self.norm, r)
        return result, [DONE] * len(result.pieces())


class Fibering(Strategy):
    """
    Decomposes along a uniformly expansive map first, then the fibers.

    A member is carried to the target by the witness map; the base strategy
    plays on its image at the challenge pullback_challenge(rho, r) and each
    step is pulled back. Once the base strategy is finished with an image
    piece, its preimage gets a strategy from ``fiber_factory``.

    Attributes:
        witness (CoarseMapWitness): Map into the base space with modulus rho.
        base_strategy (Strategy): Plays on the base space.
        fiber_factory (callable): Maps a preimage piece to its strategy.
    """

    def __init__(self, witness, base_strategy, fiber_factory):
        self.witness = witness
        self.target = witness.members[0].target
        self.mapping = {}
        for member in witness.members:
            if member.target is not self.target:
                raise MetricError("AMBIENT_MISMATCH", "fibering needs a single base space")
            self.mapping.update(member.mapping)
        self.base_strategy = base_strategy
        self.fiber_factory = fiber_factory

    def _image(self, member):
        return Subspace(self.target,
                        {self.target.index(self.mapping[point]) for point in member.points})

    def _base_challenge(self, r):
        return None if r is None else pullback_challenge(self.witness.rho, r)

    def initial_state(self, member):
        image = self._image(member)
        return "base", image, self.base_strategy.initial_state(image)

    def _resolve(self, member, state, r):
        if state[0] == "base":
            _, image, inner = state
            if self.base_strategy.is_terminal(image, inner, self._base_challenge(r)):
                fiber = self.fiber_factory(member)
                return "fiber", fiber, fiber.initial_state(member)
        return state

    def is_terminal(self, member, state, r_next):
        kind, strategy, inner = self._resolve(member, state, r_next)
        return kind == "fiber" and strategy.is_terminal(member, inner, r_next)

    def step(self, member, state, r):
        kind, first, inner = self._resolve(member, state, r)
        if kind == "fiber":
            result, children = first.step(member, inner, r)
            return result, [("fiber", first, child) for child in children]
        s = self._base_challenge(r)
        base_step, base_children = self.base_strategy.step(first, inner, s)
        result = pull_back_step(base_step, MapMember(member, self.target, self.mapping), r)
        if len(result.pieces()) != len(base_step.pieces()):
            raise DecompositionError("STRATEGY_STUCK",
                                     "a base piece leaves the image of the member")
        logger.debug("Fibering step at r=%s (base s=%s): %d pieces",
                     r, s, len(base_children))
        return result, [("base", piece, child)
                        for piece, child in zip(base_step.pieces(), base_children)]

    def __repr__(self):
        return f"Fibering({self.base_strategy!r})"


def position_fibering(space, spec, fiber_factory=None):
    """
    The fibering of a lamplighter ball over the position map to Z.

    The base is the interval of cursor positions met by the ball with its
    usual metric, decomposed by identity slabs; the map is 1-Lipschitz, so
    rho is the identity. Fibers default to r-components.

    Args:
        space (FiniteMetricSpace): A lamplighter ball.
        spec (Lamplighter): The group.
        fiber_factory (callable): Strategy for each preimage piece.

    Returns:
        Fibering: The strategy, with its witness.
    """
    positions = sorted({spec.position(g) for g in space.points})
    base = FiniteMetricSpace.from_function(positions, lambda a, b: abs(a - b),
                                           name="positions", check=False)
    mapping = {g: spec.position(g) for g in space.points}
    reach = max(positions) - min(positions) if positions else 0
    witness = CoarseMapWitness((MapMember(space.whole(), base, mapping),),
                               StepFunction.identity(reach + 1),
                               StepFunction(((0, 0),)))
    return Fibering(witness, IntervalSlabs(Coordinate(), name="position"),
                    fiber_factory or (lambda piece: GreedyComponents()))


class FiniteUnion(Strategy):
    """
    Decomposes a member covered by finitely many sets A_1, ..., A_m.

    Each round peels one cover set: X_0 = (X ∩ A_j,) and X_1 = (X minus A_j,),
    so no disjointness is needed between them. Peeled pieces continue with
    ``piece_strategy``; the rest moves on to the next cover set.

    Attributes:
        cover (tuple): Subspaces whose union contains every member played.
        piece_strategy (Strategy): Strategy for the peeled pieces.
    """

    def __init__(self, cover, piece_strategy):
        self.cover = tuple(cover)
        self.piece_strategy = piece_strategy

    def initial_state(self, member):
        return self._enter(member, 0)

    def _enter(self, member, j):
        indices = set(member.indices)
        while j < len(self.cover) and not indices & set(self.cover[j].indices):
            j += 1
        if j >= len(self.cover):
            raise DecompositionError("STRATEGY_STUCK", "the cover does not contain the member")
        if indices <= set(self.cover[j].indices):
            return "piece", self.piece_strategy.initial_state(member)
        return "peel", j

    def is_terminal(self, member, state, r_next):
        kind, inner = state
        return kind == "piece" and self.piece_strategy.is_terminal(member, inner, r_next)

    def step(self, member, state, r):
        kind, inner = state
        if kind == "piece":
            result, children = self.piece_strategy.step(member, inner, r)
            return result, [("piece", child) for child in children]
        ambient = member.ambient
        inside = set(member.indices) & set(self.cover[inner].indices)
        peeled = Subspace(ambient, inside)
        rest = Subspace(ambient, set(member.indices) - inside)
        result = DecompositionStep(member, r, (peeled,), (rest,))
        return result, [("piece", self.piece_strategy.initial_state(peeled)),
                        self._enter(rest, inner + 1)]
