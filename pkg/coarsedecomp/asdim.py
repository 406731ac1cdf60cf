# coarsedecomp/asdim.py

"""
asdim.py

Search for (d, r)-decompositions: d + 1 collections covering a space, each
r-disjoint, with every piece of diameter at most B.

A point colouring with d + 1 colours gives a decomposition exactly when the
r-components of every colour class have diameter at most B, so the search
assigns colours to units (single points, or carved balls of
radius B/2) and prunes as soon as a merged component grows too wide.

Classes:
    AsdimResult: Outcome of asdim_decomposition.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .config import EXACT_SEARCH_PIECES, SEARCH_BUDGET
from .errors import DecompositionError, MetricError, SearchBudgetExceededError
from .metric import (MetricFamily, Subspace, diameter, first_close_pair, format_rational,
                     r_components, to_rational)

logger = logging.getLogger(__name__)

METHOD_COMPONENTS = "components"
METHOD_POINTS = "points"
METHOD_PIECES = "pieces"
METHOD_GREEDY = "greedy"


@dataclass
class AsdimResult:
    """
    Outcome of a (d, r)-decomposition search.

    Attributes:
        success (bool): A decomposition was found.
        parts (tuple): On success, d + 1 tuples of Subspaces.
        proven (bool): On failure, whether no decomposition exists at all.
            False means only the carved pieces were searched, or the greedy
            pass failed.
        method (str): One of components, points, pieces, greedy.
        nodes (int): Search nodes visited.
    """

    success: bool
    parts: tuple = ()
    proven: bool = False
    method: str = METHOD_COMPONENTS
    nodes: int = 0

    def to_json(self):
        """The result as a JSON-ready dict."""
        return {
            "success": self.success,
            "proven": self.proven,
            "method": self.method,
            "nodes": self.nodes,
            "parts": [[piece.points for piece in part] for part in self.parts],
        }


def verify_asdim(space, parts, r, bound):
    """
    Checks a (d, r)-decomposition: cover, r-disjoint parts, bounded pieces.

    Args:
        space (FiniteMetricSpace or Subspace): The decomposed set.
        parts (iterable): Collections of Subspaces.
        r: Separation.
        bound: Piece diameter bound.

    Returns:
        bool: True iff every condition holds.
    """
    member = space if isinstance(space, Subspace) else space.whole()
    bound = to_rational(bound)
    covered = set()
    for part in parts:
        pieces = list(part)
        if first_close_pair(member.ambient, pieces, r) is not None:
            return False
        for piece in pieces:
            try:
                if diameter(piece) > bound:
                    return False
            except MetricError:
                return False
            covered.update(piece.indices)
    return set(member.indices) <= covered


def carve_pieces(member, bound):
    """
    Greedy carving into pieces of diameter at most ``bound``.

    The first uncarved point takes every uncarved point within bound/2.
    """
    ambient = member.ambient
    radius = ambient.closed_threshold(to_rational(bound) / 2)
    left = member.index_array
    pieces = []
    while left.size:
        near = ambient.block(left[:1], left)[0] <= radius
        pieces.append(Subspace(ambient, left[near]))
        left = left[~near]
    return pieces


class _Search:
    """Backtracking over unit colourings with incremental component merging."""

    def __init__(self, ambient, units, colours, r, bound, budget):
        self.ambient = ambient
        self.units = units
        self.colours = colours
        self.limit = ambient.closed_threshold(bound)
        self.budget = budget
        self.nodes = 0
        arrays = [unit.index_array for unit in units]
        threshold = ambient.strict_threshold(r)
        self.conflicts = [
            {b for b in range(len(units))
             if b != a and bool((ambient.block(arrays[a], arrays[b]) < threshold).any())}
            for a in range(len(units))
        ]
        self.arrays = arrays

    def _fits(self, members):
        idx = np.concatenate([self.arrays[u] for u in members])
        return int(self.ambient.block(idx, idx).max()) <= self.limit

    def _place(self, classes, unit, colour):
        """The components of ``colour`` after adding ``unit``, or None if one is too wide."""
        touching = [comp for comp in classes[colour] if comp & self.conflicts[unit]]
        merged = frozenset().union(*touching) | {unit}
        if len(merged) > 1 and not self._fits(merged):
            return None
        kept = [comp for comp in classes[colour] if comp not in touching]
        return kept + [merged]

    def exact(self):
        return self._extend([[] for _ in range(self.colours)], 0, 0)

    def _extend(self, classes, unit, used):
        if unit == len(self.units):
            return classes
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceededError(
                f"search visited more than {self.budget} nodes without an answer")
        for colour in range(min(used + 1, self.colours)):
            placed = self._place(classes, unit, colour)
            if placed is None:
                continue
            trial = list(classes)
            trial[colour] = placed
            found = self._extend(trial, unit + 1, max(used, colour + 1))
            if found is not None:
                return found
        return None

    def greedy(self):
        classes = [[] for _ in range(self.colours)]
        for unit in range(len(self.units)):
            self.nodes += 1
            for colour in range(self.colours):
                placed = self._place(classes, unit, colour)
                if placed is not None:
                    classes[colour] = placed
                    break
            else:
                return None
        return classes

    def to_parts(self, classes):
        parts = []
        for comps in classes:
            pieces = [Subspace(self.ambient, np.concatenate([self.arrays[u] for u in comp]))
                      for comp in comps]
            parts.append(tuple(sorted(pieces, key=lambda p: p.indices[0])))
        return tuple(parts)


def asdim_decomposition(space, d, r, bound, budget=SEARCH_BUDGET):
    """
    Searches for d + 1 r-disjoint collections of pieces of diameter <= bound
    covering ``space``.

    For d = 0 the answer is exact: the pieces must be unions of r-components.
    Spaces of at most EXACT_SEARCH_PIECES points are searched point by point,
    so a failure is proven. Larger spaces are carved into pieces first, then
    searched exactly when few pieces result and greedily otherwise.

    Args:
        space (FiniteMetricSpace or Subspace): The set to decompose.
        d (int): Number of collections minus one.
        r: Positive separation.
        bound: Diameter bound B.
        budget (int): Cap on search nodes.

    Returns:
        AsdimResult: The decomposition, or the kind of failure.

    Raises:
        SearchBudgetExceededError: The exact search ran out of nodes.
    """
    member = space if isinstance(space, Subspace) else space.whole()
    r, bound = to_rational(r), to_rational(bound)
    if d < 0:
        raise DecompositionError("BAD_PARAMETER", f"d must be nonnegative, got {d}")
    if d == 0:
        components = list(r_components(member, r))
        try:
            ok = MetricFamily(components).max_diameter() <= bound
        except MetricError:
            ok = False
        logger.info("asdim d=0 at r=%s: %d components, %s", format_rational(r),
                    len(components), "fits" if ok else "too wide")
        parts = (tuple(components),) if ok else ()
        return AsdimResult(ok, parts, proven=True, method=METHOD_COMPONENTS)

    if len(member) <= EXACT_SEARCH_PIECES:
        units, method = [Subspace(member.ambient, (i,)) for i in member.indices], METHOD_POINTS
    else:
        units = carve_pieces(member, bound)
        method = METHOD_PIECES if len(units) <= EXACT_SEARCH_PIECES else METHOD_GREEDY
    search = _Search(member.ambient, units, d + 1, r, bound, budget)
    classes = search.greedy() if method == METHOD_GREEDY else search.exact()
    logger.info("asdim d=%d at r=%s over %d %s units: %s after %d nodes", d,
                format_rational(r), len(units), method,
                "found" if classes is not None else "none", search.nodes)
    if classes is None:
        return AsdimResult(False, proven=method == METHOD_POINTS, method=method,
                           nodes=search.nodes)
    return AsdimResult(True, search.to_parts(classes), method=method, nodes=search.nodes)
