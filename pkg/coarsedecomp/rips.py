# coarsedecomp/rips.py

"""
rips.py

Rips complexes over finite metric spaces: the plain complex P_d, the
relative complex P_ab(X, S) and the scaled complex P_abm(X, W).

A complex is stored as its sorted maximal simplices, each a sorted tuple
of vertex indices of the underlying space. Faces are implied. For the
scaled complex a simplex carries the standard simplicial metric when it
belongs to P_ab(X, W) and a cone metric with factor m otherwise.

Classes:
    MetricSimplicialComplex: Vertices, maximal simplices and metric tags.
"""

import logging
from itertools import combinations

import networkx as nx

from .config import CLIQUE_CAP
from .errors import ComplexError
from .metric import Subspace, format_rational, to_rational

logger = logging.getLogger(__name__)

KIND_RIPS = "rips"
KIND_RELATIVE = "relative"
KIND_SCALED = "scaled"


def _maximal_only(simplices):
    """Drops simplices contained in another one and sorts the rest."""
    ordered = sorted({tuple(sorted(s)) for s in simplices}, key=lambda s: (-len(s), s))
    kept = []
    for simplex in ordered:
        as_set = set(simplex)
        if not any(as_set <= set(other) for other in kept):
            kept.append(simplex)
    return tuple(sorted(kept))


class MetricSimplicialComplex:
    """
    A simplicial complex on the points of a finite metric space.

    Attributes:
        space (FiniteMetricSpace): The vertex set with its metric.
        maximal (tuple): Sorted maximal simplices as sorted index tuples.
        kind (str): rips, relative or scaled.
        a, b (Fraction): Scales. For a plain complex both equal d.
        marked (frozenset): Indices of S (relative) or W (scaled).
        m (int): Cone factor of the scaled complex, None otherwise.
    """

    def __init__(self, space, maximal, kind=KIND_RIPS, a=None, b=None, marked=(), m=None):
        self.space = space
        self.maximal = _maximal_only(maximal)
        self.kind = kind
        self.a = None if a is None else to_rational(a)
        self.b = self.a if b is None else to_rational(b)
        self.marked = frozenset(int(i) for i in marked)
        self.m = m
        self._graphs = {}

    def __repr__(self):
        return (f"MetricSimplicialComplex(kind={self.kind!r}, vertices={len(self.space)}, "
                f"maximal={len(self.maximal)}, dimension={self.dimension})")

    def __eq__(self, other):
        if not isinstance(other, MetricSimplicialComplex):
            return NotImplemented
        return self.space is other.space and self.maximal == other.maximal

    def __hash__(self):
        return hash((id(self.space), self.maximal))

    @property
    def dimension(self):
        """Largest simplex dimension, -1 for the empty complex."""
        return max((len(s) for s in self.maximal), default=0) - 1

    @property
    def vertices(self):
        """Indices of the vertices that lie in some simplex."""
        return sorted({v for s in self.maximal for v in s})

    def contains(self, simplex):
        """True if ``simplex`` (vertex indices) is a face of some maximal simplex."""
        simplex = set(simplex)
        return any(simplex <= set(s) for s in self.maximal)

    def simplices(self, k):
        """All k-dimensional faces, sorted."""
        faces = set()
        for simplex in self.maximal:
            faces.update(combinations(simplex, k + 1))
        return sorted(faces)

    def skeleton_graph(self):
        """The 1-skeleton as a networkx graph on vertex indices."""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for simplex in self.maximal:
            graph.add_edges_from(combinations(simplex, 2))
        return graph

    def _pairwise_within(self, simplex, scale):
        ambient = self.space
        threshold = ambient.closed_threshold(scale)
        idx = list(simplex)
        return bool((ambient.block(idx, idx) <= threshold).all())

    def is_standard(self, simplex):
        """
        Whether ``simplex`` carries the standard simplicial metric.

        Plain and relative complexes are standard throughout. In the scaled
        complex a simplex is standard when its vertices are pairwise within
        a, or pairwise within b and all marked.
        """
        if self.kind != KIND_SCALED:
            return True
        if self._pairwise_within(simplex, self.a):
            return True
        return set(simplex) <= self.marked and self._pairwise_within(simplex, self.b)

    def relative_only(self):
        """Maximal simplices that satisfy only the marked-set condition."""
        if self.kind != KIND_RELATIVE:
            return []
        return [s for s in self.maximal if not self._pairwise_within(s, self.a)]

    def scaled_simplices(self):
        """Maximal simplices carrying a cone metric."""
        return [s for s in self.maximal if not self.is_standard(s)]

    def full_subcomplex(self, points):
        """
        The subcomplex spanned by a vertex set, keeping this complex's metric tags.

        Args:
            points: A Subspace of ``space`` or an iterable of its points.

        Returns:
            MetricSimplicialComplex: Faces of this complex with all vertices in the set.
        """
        if isinstance(points, Subspace):
            keep = set(points.indices)
        else:
            keep = {self.space.index(p) for p in points}
        faces = [tuple(v for v in s if v in keep) for s in self.maximal]
        return MetricSimplicialComplex(self.space, [f for f in faces if f], self.kind,
                                       self.a, self.b, self.marked, self.m)

    def tags(self):
        """Metric tags of the complex, ready for JSON."""
        tags = {"kind": self.kind}
        if self.a is not None:
            tags["a"] = format_rational(self.a)
            tags["b"] = format_rational(self.b)
        if self.kind != KIND_RIPS:
            tags["marked"] = [self.space.points[i] for i in sorted(self.marked)]
        if self.kind == KIND_SCALED:
            tags["m"] = self.m
            tags["scaled"] = [[self.space.points[v] for v in s] for s in self.scaled_simplices()]
        if self.kind == KIND_RELATIVE:
            tags["relative_only"] = [[self.space.points[v] for v in s]
                                     for s in self.relative_only()]
        return tags


def _check_params(a, b):
    if a < 1 or a > b:
        raise ComplexError("BAD_PARAMS", f"need 1 <= a <= b, got a={a}, b={b}")


def _cliques(space, graph):
    cliques = []
    for clique in nx.find_cliques(graph):
        if len(clique) > CLIQUE_CAP:
            raise ComplexError("DIMENSION_CAP_EXCEEDED",
                               f"a simplex of {len(clique)} vertices exceeds the cap of "
                               f"{CLIQUE_CAP} in '{space.name}'")
        cliques.append(clique)
    return cliques


def proximity_graph(space, scale, indices=None):
    """
    The graph joining points at distance <= scale.

    Args:
        space (FiniteMetricSpace): The points.
        scale: Nonnegative rational.
        indices (iterable): Restrict to these point indices; all points by default.

    Returns:
        networkx.Graph: Nodes are point indices.
    """
    idx = sorted(range(len(space)) if indices is None else set(indices))
    graph = nx.Graph()
    graph.add_nodes_from(idx)
    if not idx:
        return graph
    threshold = space.closed_threshold(scale)
    close = space.block(idx, idx) <= threshold
    for a, row in enumerate(close):
        for b in range(a + 1, len(idx)):
            if row[b]:
                graph.add_edge(idx[a], idx[b])
    return graph


def build_rips(space, d):
    """
    Builds P_d: the clique complex of the d-proximity graph.

    Args:
        space (FiniteMetricSpace): The vertex set.
        d: Nonnegative rational scale.

    Returns:
        MetricSimplicialComplex: The Rips complex.

    Raises:
        ComplexError: DIMENSION_CAP_EXCEEDED if a clique exceeds the cap.
    """
    d = to_rational(d)
    if d < 0:
        raise ComplexError("BAD_PARAMS", f"the Rips scale must be nonnegative, got {d}")
    complex_ = MetricSimplicialComplex(space, _cliques(space, proximity_graph(space, d)),
                                       KIND_RIPS, d, d)
    logger.info("Built P_%s(%s): %d maximal simplices, dimension %d",
                format_rational(d), space.name, len(complex_.maximal), complex_.dimension)
    return complex_


def _marked_indices(space, subset):
    if isinstance(subset, Subspace):
        return set(subset.indices)
    return {space.index(p) for p in subset}


def build_relative_rips(space, sigma, a, b):
    """
    Builds P_ab(X, S): simplices pairwise within a, or pairwise within b
    with every vertex in S.

    Args:
        space (FiniteMetricSpace): The vertex set.
        sigma: Subspace or point iterable S.
        a, b: Scales with 1 <= a <= b.

    Returns:
        MetricSimplicialComplex: The relative complex; relative_only() lists
        the simplices present through S alone.

    Raises:
        ComplexError: BAD_PARAMS if a > b.
    """
    a, b = to_rational(a), to_rational(b)
    _check_params(a, b)
    marked = _marked_indices(space, sigma)
    simplices = _cliques(space, proximity_graph(space, a))
    if marked and b > a:
        simplices += _cliques(space, proximity_graph(space, b, marked))
    complex_ = MetricSimplicialComplex(space, simplices, KIND_RELATIVE, a, b, marked)
    logger.info("Built P_%s,%s(%s) relative to %d points: %d maximal simplices",
                format_rational(a), format_rational(b), space.name, len(marked),
                len(complex_.maximal))
    return complex_


def build_scaled_rips(space, w, a, b, m):
    """
    Builds P_abm(X, W): the simplices of P_b, where those outside P_ab(X, W)
    carry the cone metric m^2 dt^2 + t^2 g on the cone over their boundary.

    Args:
        space (FiniteMetricSpace): The vertex set.
        w: Subspace or point iterable W.
        a, b: Scales with 1 <= a <= b.
        m (int): Cone factor, at least 1.

    Returns:
        MetricSimplicialComplex: The scaled complex.

    Raises:
        ComplexError: BAD_PARAMS for a > b or m < 1.
    """
    a, b = to_rational(a), to_rational(b)
    _check_params(a, b)
    if int(m) != m or m < 1:
        raise ComplexError("BAD_PARAMS", f"the cone factor must be a positive integer, got {m}")
    marked = _marked_indices(space, w)
    simplices = _cliques(space, proximity_graph(space, b))
    complex_ = MetricSimplicialComplex(space, simplices, KIND_SCALED, a, b, marked, int(m))
    logger.info("Built P_%s,%s,%d(%s): %d maximal simplices, %d scaled",
                format_rational(a), format_rational(b), m, space.name,
                len(complex_.maximal), len(complex_.scaled_simplices()))
    return complex_
