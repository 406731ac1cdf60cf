# coarsedecomp/geodesic.py

"""
geodesic.py

Bounds on the intrinsic metric of a Rips complex.

The upper bound is a shortest path in the subdivision graph: the nodes of a
simplex are its barycentric points with denominators 1..L, and any two
nodes of one simplex are joined by the length of the straight segment
between them, which is a genuine path in the complex. Lengths are rounded
up to integer ticks of 2**-40, so path sums stay exact upper bounds.
Since the node set at level L contains every lower level, the bound never
increases with L.

Standard simplices are regular with unit edges. A scaled edge is the cone
over its two endpoints, of total length 2m. A scaled triangle is the cone
over its boundary loop, which unfolds to a flat sector of radius m.

The lower bound counts 1-skeleton hops between nearest vertices:
max(0, (hops - 2) / c_n).
"""

import hashlib
import logging
import math
import pickle
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import networkx as nx

from .config import SUBDIVISION_LEVEL, cache_dir
from .constants import derive_dimension_constants
from .errors import ComplexError
from .interval import Interval, sin_interval, sqrt_interval
from .metric import INF

logger = logging.getLogger(__name__)

TICKS = 2 ** 40


def ceil_sqrt_ticks(value):
    """Smallest integer k with k / TICKS >= sqrt(value), for a nonnegative rational."""
    value = Fraction(value)
    num = value.numerator * TICKS * TICKS
    den = value.denominator
    k = math.isqrt(num // den)
    while k * k * den < num:
        k += 1
    return k


def _ticks(value):
    return math.ceil(Fraction(value) * TICKS)


def standard_distance(p, q):
    """
    Exact squared length of the segment p-q in a regular simplex with unit edges.

    Args:
        p, q: Barycentric coordinate tuples of equal length.

    Returns:
        Fraction: The squared distance, half the squared coordinate difference.
    """
    return sum(((Fraction(x) - Fraction(y)) ** 2 for x, y in zip(p, q)), Fraction(0)) / 2


def cone_coordinates(point, lengths, m):
    """
    Polar coordinates of a point of a scaled triangle.

    Args:
        point: Barycentric coordinates (p0, p1, p2).
        lengths: Boundary edge lengths (l01, l12, l20).
        m (int): Cone factor.

    Returns:
        tuple: (s, u): radius s = m t in [0, m] and arc position u along the
        boundary loop v0 -> v1 -> v2 -> v0.
    """
    p = [Fraction(x) for x in point]
    low = min(p)
    t = 1 - 3 * low
    if t == 0:
        return Fraction(0), Fraction(0)
    y = [(x - low) / t for x in p]
    l01, l12, l20 = lengths
    if y[2] == 0:
        u = l01 * y[1]
    elif y[0] == 0:
        u = l01 + l12 * y[2]
    else:
        u = l01 + l12 + l20 * y[0]
    return m * t, u


def cone_distance(s1, u1, s2, u2, total, m):
    """
    Intrinsic distance between two points of a scaled triangle.

    The cone over a boundary loop of length ``total`` with metric
    m^2 dt^2 + t^2 du^2 is flat with cone angle total/m; unfolding it into a
    sector gives the law of cosines, or the path through the apex when the
    angle between the points is at least pi. The squared distance
    (s1 - s2)^2 + 4 s1 s2 sin^2(angle / 2) is formed exactly from an
    enclosure of the sine.

    Returns:
        Interval: Encloses the distance.
    """
    s1, s2 = Fraction(s1), Fraction(s2)
    gap = abs(Fraction(u1) - Fraction(u2)) / m
    angle = min(gap, Fraction(total) / m - gap)
    if angle >= Fraction(math.nextafter(math.pi, math.inf)):
        half = Interval.exact(1)
    else:
        half = sin_interval(angle / 2)
    base, cross = (s1 - s2) ** 2, 4 * s1 * s2
    low = sqrt_interval(base + cross * max(half.lo, Fraction(0)) ** 2).lo
    high = sqrt_interval(base + cross * half.hi ** 2).hi
    estimate = math.sqrt(float(base) + float(cross) * half.estimate ** 2)
    return Interval(low, high, estimate)


def _local_nodes(k, level):
    """Barycentric points of a k-simplex with denominators 1..level."""
    nodes = set()
    for denominator in range(1, level + 1):
        for bars in combinations(range(denominator + k), k):
            parts, previous = [], -1
            for bar in bars + (denominator + k,):
                parts.append(bar - previous - 1)
                previous = bar
            nodes.add(tuple(Fraction(c, denominator) for c in parts))
    return sorted(nodes)


@lru_cache(maxsize=None)
def _standard_template(k, level):
    nodes = _local_nodes(k, level)
    pairs = [(i, j, ceil_sqrt_ticks(standard_distance(nodes[i], nodes[j])))
             for i, j in combinations(range(len(nodes)), 2)]
    return nodes, pairs


def _node_key(simplex, local):
    return tuple((v, w) for v, w in zip(simplex, local) if w)


def _metric(complex_, simplex):
    """Tick distance between two local points of a maximal simplex, or None if standard."""
    if complex_.is_standard(simplex):
        return None
    k = len(simplex) - 1
    m = complex_.m
    if k == 1:
        return lambda p, q: _ticks(2 * m * abs(p[1] - q[1]))
    if k == 2:
        edges = ((simplex[0], simplex[1]), (simplex[1], simplex[2]), (simplex[2], simplex[0]))
        lengths = tuple(Fraction(1) if complex_.is_standard(e) else Fraction(2 * m)
                        for e in edges)
        total = sum(lengths)

        def distance(p, q):
            s1, u1 = cone_coordinates(p, lengths, m)
            s2, u2 = cone_coordinates(q, lengths, m)
            return _ticks(cone_distance(s1, u1, s2, u2, total, m).hi)
        return distance
    raise ComplexError("UNSUPPORTED_DIMENSION",
                       f"scaled simplices of dimension {k} are not supported (at most 2)")


def _pair_ticks(complex_, simplex, p, q):
    metric = _metric(complex_, simplex)
    if metric is None:
        return ceil_sqrt_ticks(standard_distance(p, q))
    return metric(p, q)


def _cache_file(complex_, level):
    directory = cache_dir()
    space = complex_.space
    if directory is None or not space.is_dense:
        return None
    digest = hashlib.sha256()
    digest.update(space.matrix.tobytes())
    digest.update(repr((complex_.maximal, complex_.kind, complex_.a, complex_.b,
                        sorted(complex_.marked), complex_.m, level)).encode())
    return directory / f"subdivision-{digest.hexdigest()[:32]}.pickle"


def subdivision_graph(complex_, level=SUBDIVISION_LEVEL):
    """
    The weighted subdivision graph of a complex at a level.

    Nodes are tuples of (vertex index, barycentric weight) pairs with
    positive weights; edge attribute ``w`` holds integer ticks. Graphs are
    memoised on the complex and pickled to COARSE_DECOMP_CACHE when set.

    Raises:
        ComplexError: UNSUPPORTED_DIMENSION for scaled simplices above dimension 2.
    """
    if level in complex_._graphs:
        return complex_._graphs[level]
    path = _cache_file(complex_, level)
    if path is not None and path.exists():
        with open(path, "rb") as handle:
            graph = pickle.load(handle)
        logger.debug("Loaded subdivision graph from %s", path)
        complex_._graphs[level] = graph
        return graph
    graph = nx.Graph()
    for simplex in complex_.maximal:
        k = len(simplex) - 1
        metric = _metric(complex_, simplex)
        if metric is None:
            nodes, pairs = _standard_template(k, level)
        else:
            nodes = _local_nodes(k, level)
            pairs = [(i, j, metric(nodes[i], nodes[j]))
                     for i, j in combinations(range(len(nodes)), 2)]
        keys = [_node_key(simplex, node) for node in nodes]
        graph.add_nodes_from(keys)
        for i, j, weight in pairs:
            current = graph.get_edge_data(keys[i], keys[j])
            if current is None or current["w"] > weight:
                graph.add_edge(keys[i], keys[j], w=weight)
    logger.info("Subdivision graph at level %d: %d nodes, %d edges", level,
                graph.number_of_nodes(), graph.number_of_edges())
    complex_._graphs[level] = graph
    if path is not None:
        with open(path, "wb") as handle:
            pickle.dump(graph, handle)
    return graph


def _vertex_key(index):
    return ((index, Fraction(1)),)


def _resolve(complex_, point):
    """Barycentric dict {vertex index: weight} for a point id or a {point: weight} dict."""
    space = complex_.space
    if isinstance(point, dict):
        weights = {space.index(p): Fraction(w) for p, w in point.items() if w}
        if sum(weights.values()) != 1 or any(w < 0 for w in weights.values()):
            raise ComplexError("BAD_POINT", f"barycentric weights must be >= 0 and sum to 1: {point}")
        return weights
    return {space.index(point): Fraction(1)}


def _attach(complex_, graph, weights, copied, level):
    """Returns the node for a point, adding it to a copy of the graph when needed."""
    key = tuple(sorted(weights.items()))
    if key in graph:
        return key, graph, copied
    carriers = [s for s in complex_.maximal if set(weights) <= set(s)]
    if not carriers:
        raise ComplexError("NOT_IN_COMPLEX", f"no simplex carries the point {key}")
    if not copied:
        graph, copied = graph.copy(), True
    graph.add_node(key)
    for simplex in carriers:
        local = tuple(weights.get(v, Fraction(0)) for v in simplex)
        for node in _local_nodes(len(simplex) - 1, level):
            other = _node_key(simplex, node)
            if other in graph and other != key:
                weight = _pair_ticks(complex_, simplex, local, node)
                current = graph.get_edge_data(key, other)
                if current is None or current["w"] > weight:
                    graph.add_edge(key, other, w=weight)
    return key, graph, copied


def _check_level(level):
    if level < 1:
        raise ComplexError("BAD_PARAMS", f"subdivision level must be at least 1, got {level}")


def geodesic_upper(complex_, p, q, level=SUBDIVISION_LEVEL):
    """
    Upper bound on the intrinsic distance between two points of a complex.

    Args:
        complex_ (MetricSimplicialComplex): The complex.
        p, q: Point ids of the space (vertices) or {point: weight} dicts.
        level (int): Subdivision level L.

    Returns:
        Fraction or INF: INF when no path exists.
    """
    _check_level(level)
    graph = subdivision_graph(complex_, level)
    source, graph, copied = _attach(complex_, graph, _resolve(complex_, p), False, level)
    target, graph, _ = _attach(complex_, graph, _resolve(complex_, q), copied, level)
    try:
        ticks = nx.dijkstra_path_length(graph, source, target, weight="w")
    except nx.NetworkXNoPath:
        return INF
    return Fraction(ticks, TICKS)


def vertex_distances(complex_, index, level=SUBDIVISION_LEVEL):
    """
    Upper bounds from one vertex to every vertex.

    Args:
        complex_ (MetricSimplicialComplex): The complex.
        index (int): Source vertex index.
        level (int): Subdivision level.

    Returns:
        dict: vertex index -> Fraction; unreachable vertices are absent.
    """
    _check_level(level)
    graph = subdivision_graph(complex_, level)
    lengths = nx.single_source_dijkstra_path_length(graph, _vertex_key(index), weight="w")
    return {key[0][0]: Fraction(ticks, TICKS) for key, ticks in lengths.items() if len(key) == 1}


def distances_to_subcomplex(complex_, sub, level=SUBDIVISION_LEVEL):
    """
    Upper bounds on the distance from every vertex to a subcomplex.

    A multi-source search from every subdivision node lying in ``sub``.

    Returns:
        dict: vertex index -> Fraction; unreachable vertices are absent.
    """
    _check_level(level)
    graph = subdivision_graph(complex_, level)
    sources = [node for node in graph if sub.contains(v for v, _ in node)]
    if not sources:
        return {}
    lengths = nx.multi_source_dijkstra_path_length(graph, sources, weight="w")
    return {key[0][0]: Fraction(ticks, TICKS) for key, ticks in lengths.items() if len(key) == 1}


def distance_to_subcomplex(complex_, p, sub, level=SUBDIVISION_LEVEL):
    """
    Upper bound on the distance from a point to a subcomplex.

    Args:
        complex_ (MetricSimplicialComplex): The complex.
        p: Point id or {point: weight} dict.
        sub (MetricSimplicialComplex): A subcomplex on the same space.
        level (int): Subdivision level.

    Returns:
        Fraction or INF.
    """
    _check_level(level)
    graph = subdivision_graph(complex_, level)
    source, graph, _ = _attach(complex_, graph, _resolve(complex_, p), False, level)
    if sub.contains(v for v, _ in source):
        return Fraction(0)
    sources = [node for node in graph if sub.contains(v for v, _ in node)]
    if not sources:
        return INF
    lengths = nx.multi_source_dijkstra_path_length(graph, sources, weight="w")
    if source not in lengths:
        return INF
    return Fraction(lengths[source], TICKS)


def _skeleton(complex_):
    if "skeleton" not in complex_._graphs:
        complex_._graphs["skeleton"] = complex_.skeleton_graph()
    return complex_._graphs["skeleton"]


def _constants_for(complex_, constants):
    return constants or derive_dimension_constants(max(complex_.dimension, 1))


def _nearest_vertex(weights):
    return min(weights, key=lambda v: (-weights[v], v))


def geodesic_lower(complex_, p, q, constants=None):
    """
    Lower bound max(0, (hops - 2) / c_n) on the intrinsic distance.

    Args:
        complex_ (MetricSimplicialComplex): The complex.
        p, q: Point ids or {point: weight} dicts; each is replaced by its
            nearest vertex.
        constants (DimensionConstants): Defaults to the oracle constants of
            the complex's dimension.

    Returns:
        Fraction or INF: INF when the vertices are in different components.
    """
    u = _nearest_vertex(_resolve(complex_, p))
    v = _nearest_vertex(_resolve(complex_, q))
    try:
        hops = nx.shortest_path_length(_skeleton(complex_), u, v)
    except nx.NetworkXNoPath:
        return INF
    return _hop_bound(hops, _constants_for(complex_, constants))


def _hop_bound(hops, constants):
    return max(Fraction(0), Fraction(hops - 2) / constants.c)


def geodesic_lower_sets(complex_, first, second, constants=None):
    """
    Lower bound on the distance between the subcomplexes spanned by two vertex sets.

    Args:
        first, second: Iterables of vertex indices.

    Returns:
        Fraction or INF.
    """
    first, second = set(first), set(second)
    if first & second:
        return Fraction(0)
    lengths = nx.multi_source_dijkstra_path_length(_skeleton(complex_), first)
    hops = min((lengths[v] for v in second if v in lengths), default=None)
    if hops is None:
        return INF
    return _hop_bound(hops, _constants_for(complex_, constants))
