# coarsedecomp/metric.py

"""
metric.py

Finite metric spaces with exact rational distances, subspaces, metric
families, and the set-level operations the decomposition machinery is built
on: r-disjointness, diameters, neighborhoods, enlarged intersections,
r-components and bounded-geometry profiles.

Distances are stored as an int64 matrix of numerators over a common
denominator, so every comparison is exact. The infinite distance between
points in different components is the sentinel ``INF`` (``math.inf``), which
orders above every rational.

Classes:
    FiniteMetricSpace: A finite point set with an exact metric.
    Subspace: A subset of a FiniteMetricSpace.
    MetricFamily: An ordered collection of subspaces.
    EnlargedIntersection: Result of enlarged_intersection.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import networkx as nx
import numpy as np

from .config import DENSE_LIMIT, TRIANGLE_FULL_CHECK_LIMIT, TRIANGLE_SAMPLES
from .errors import MetricError

logger = logging.getLogger(__name__)

INF = math.inf
INF_CODE = np.iinfo(np.int64).max
# Stand-in for INF_CODE when sums are formed; keeps additions inside int64.
_SATURATED = 2 ** 61


def to_rational(value):
    """
    Converts a number or a "p/q" / "inf" string to a Fraction or INF.

    Args:
        value: int, Fraction, float or str.

    Returns:
        Fraction or float: The exact value, or INF.

    Raises:
        ValueError: If the value cannot be parsed.
    """
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞"):
            return INF
        return Fraction(text)
    if isinstance(value, float) and math.isinf(value):
        return INF
    return Fraction(value)


def format_rational(value):
    """Formats a Fraction as "p/q" and INF as "inf"."""
    if value == INF:
        return "inf"
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class FiniteMetricSpace:
    """
    A finite set of hashable points with an exact metric.

    Distances are integers over ``denominator`` held in a dense int64 matrix,
    or produced row by row by ``row_fn`` for spaces larger than DENSE_LIMIT.

    Attributes:
        points (tuple): Point identifiers in canonical order.
        denominator (int): Common denominator of all distances.
        name (str): Human-readable label.
        source: Optional generator description (group spec and radius).
    """

    def __init__(self, points, matrix=None, row_fn=None, denominator=1,
                 name="space", source=None):
        self.points = tuple(points)
        self._index = {point: i for i, point in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise MetricError("NOT_A_METRIC",
                              f"space '{name}' lists a point twice")
        self.denominator = int(denominator)
        self.name = name
        self.source = source
        self._row_fn = row_fn
        self._matrix = None
        if matrix is not None:
            self._matrix = np.asarray(matrix, dtype=np.int64)
        elif row_fn is not None and len(self.points) <= DENSE_LIMIT:
            if self.points:
                self._matrix = np.vstack(
                    [row_fn(i) for i in range(len(self.points))]).astype(np.int64)
            else:
                self._matrix = np.zeros((0, 0), dtype=np.int64)
        elif row_fn is None:
            raise MetricError("NOT_A_METRIC",
                              f"space '{name}' has neither a matrix nor a row function")

    @classmethod
    def from_function(cls, points, dist, name="space", source=None, check=True):
        """
        Builds a space by evaluating ``dist`` on every pair of points.

        Args:
            points (iterable): Point identifiers.
            dist (callable): dist(x, y) returning a rational or INF.
            name (str): Label of the space.
            source: Optional generator description.
            check (bool): Whether to verify the metric axioms.

        Returns:
            FiniteMetricSpace: The space.
        """
        points = tuple(points)
        n = len(points)
        values = {}
        for i in range(n):
            for j in range(i + 1, n):
                values[(i, j)] = to_rational(dist(points[i], points[j]))
        return cls.from_table(points, values, name=name, source=source, check=check)

    @classmethod
    def from_table(cls, points, table, name="space", source=None, check=True):
        """
        Builds a space from a table of distances keyed by index pairs.

        Args:
            points (iterable): Point identifiers.
            table (dict): Maps (i, j) with i < j to a rational or INF.
            name (str): Label of the space.
            source: Optional generator description.
            check (bool): Whether to verify the metric axioms.

        Returns:
            FiniteMetricSpace: The space.

        Raises:
            MetricError: If a pair is missing or the axioms fail.
        """
        points = tuple(points)
        n = len(points)
        finite = [v for v in table.values() if v != INF]
        denominator = reduce(math.lcm, (Fraction(v).denominator for v in finite), 1)
        matrix = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                key = (i, j) if (i, j) in table else (j, i)
                if key not in table:
                    raise MetricError("NOT_A_METRIC",
                                      f"no distance given for points {points[i]!r}, {points[j]!r}")
                value = table[key]
                code = INF_CODE if value == INF else int(Fraction(value) * denominator)
                matrix[i, j] = matrix[j, i] = code
        space = cls(points, matrix=matrix, denominator=denominator, name=name, source=source)
        if check:
            space.check_metric()
        return space

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, point):
        return point in self._index

    def __repr__(self):
        return f"FiniteMetricSpace(name={self.name!r}, size={len(self.points)})"

    @property
    def is_dense(self):
        """True if the full distance matrix is held in memory."""
        return self._matrix is not None

    @property
    def matrix(self):
        """
        The dense int64 distance matrix (numerators over ``denominator``).

        Raises:
            MetricError: If the space is too large to hold densely.
        """
        if self._matrix is None:
            raise MetricError("NOT_DENSE",
                              f"space '{self.name}' has {len(self)} points; use row access")
        return self._matrix

    def index(self, point):
        """
        Returns the position of a point in canonical order.

        Raises:
            MetricError: If the point is not in the space.
        """
        try:
            return self._index[point]
        except KeyError as e:
            raise MetricError("NOT_IN_AMBIENT",
                              f"point {point!r} is not in space '{self.name}'") from e

    def row(self, i):
        """Returns the distance codes from point index ``i`` to every point."""
        if self._matrix is not None:
            return self._matrix[i]
        return np.asarray(self._row_fn(i), dtype=np.int64)

    def rows(self, indices):
        """Returns the distance codes from each listed index to every point, as a 2-D array."""
        indices = np.asarray(indices, dtype=np.intp)
        if self._matrix is not None:
            return self._matrix[indices]
        if indices.size == 0:
            return np.zeros((0, len(self.points)), dtype=np.int64)
        return np.vstack([self.row(i) for i in indices])

    def block(self, rows, cols):
        """Returns the distance codes between two index sets."""
        cols = np.asarray(cols, dtype=np.intp)
        return self.rows(rows)[:, cols]

    def decode(self, code):
        """Turns a stored distance code into a Fraction or INF."""
        code = int(code)
        if code == INF_CODE:
            return INF
        return Fraction(code, self.denominator)

    def dist(self, x, y):
        """
        Returns the exact distance between two points.

        Args:
            x: A point of the space.
            y: A point of the space.

        Returns:
            Fraction or float: The distance, or INF.
        """
        return self.distance_at(self.index(x), self.index(y))

    def distance_at(self, i, j):
        """Returns the exact distance between the points at two indices."""
        return self.decode(self.row(i)[j])

    def strict_threshold(self, r):
        """Code c such that a distance code is < c exactly when the distance is < r."""
        r = to_rational(r)
        if r == INF:
            return INF_CODE
        return math.ceil(r * self.denominator)

    def closed_threshold(self, t):
        """Code c such that a distance code is <= c exactly when the distance is <= t."""
        t = to_rational(t)
        if t == INF:
            return INF_CODE
        return math.floor(t * self.denominator)

    def distance_values(self):
        """Returns the sorted distinct finite distances occurring in the space."""
        if self._matrix is not None:
            codes = np.unique(self._matrix)
        else:
            codes = np.unique(np.concatenate([np.unique(self.row(i)) for i in range(len(self))]))
        return [self.decode(c) for c in codes if int(c) != INF_CODE]

    def subspace(self, points):
        """Returns the Subspace on the given points."""
        return Subspace(self, [self.index(point) for point in points])

    def subspace_at(self, indices):
        """Returns the Subspace on the given point indices."""
        return Subspace(self, indices)

    def whole(self):
        """Returns the Subspace containing every point."""
        return Subspace(self, range(len(self.points)))

    def check_metric(self, samples=TRIANGLE_SAMPLES, seed=0):
        """
        Verifies the metric axioms.

        The triangle inequality is checked on every triple for spaces of at
        most TRIANGLE_FULL_CHECK_LIMIT points and on ``samples`` seeded random
        triples above that.

        Raises:
            MetricError: NOT_A_METRIC naming the first failing points.
        """
        n = len(self.points)
        if n == 0:
            return
        if self._matrix is None:
            self._check_sampled(samples, seed)
            return
        m = self._matrix
        if np.any(np.diag(m) != 0):
            raise MetricError("NOT_A_METRIC", f"space '{self.name}' has a nonzero self-distance")
        if not np.array_equal(m, m.T):
            i, j = np.argwhere(m != m.T)[0]
            raise MetricError("NOT_A_METRIC",
                              f"distance is not symmetric at {self.points[i]!r}, {self.points[j]!r}")
        off = m + np.eye(n, dtype=np.int64)
        if np.any(off <= 0):
            i, j = np.argwhere(off <= 0)[0]
            raise MetricError("NOT_A_METRIC",
                              f"distinct points {self.points[i]!r}, {self.points[j]!r} "
                              "are at distance <= 0")
        if n > TRIANGLE_FULL_CHECK_LIMIT:
            self._check_sampled(samples, seed)
            return
        saturated = np.where(m == INF_CODE, _SATURATED, m)
        for k in range(n):
            through = saturated[:, k][:, None] + saturated[k, :][None, :]
            bad = saturated > through
            if bad.any():
                i, j = np.argwhere(bad)[0]
                raise MetricError(
                    "NOT_A_METRIC",
                    f"triangle inequality fails for {self.points[i]!r}, "
                    f"{self.points[k]!r}, {self.points[j]!r}")

    def _check_sampled(self, samples, seed):
        rng = np.random.default_rng(seed)
        n = len(self.points)
        for i, j, k in rng.integers(0, n, size=(samples, 3)).tolist():
            rows = self.rows([i, k])
            d_ij = min(int(rows[0][j]), _SATURATED)
            d_ik = min(int(rows[0][k]), _SATURATED)
            d_kj = min(int(rows[1][j]), _SATURATED)
            if d_ij > d_ik + d_kj:
                raise MetricError(
                    "NOT_A_METRIC",
                    f"triangle inequality fails for {self.points[i]!r}, "
                    f"{self.points[k]!r}, {self.points[j]!r}")
        logger.debug("Sampled %d triangles in '%s'", samples, self.name)


class Subspace:
    """
    A subset of a FiniteMetricSpace, kept as sorted point indices.

    Attributes:
        ambient (FiniteMetricSpace): The space the points live in.
        indices (tuple): Sorted distinct point indices.
    """

    __slots__ = ("ambient", "indices", "_array")

    def __init__(self, ambient, indices):
        self.ambient = ambient
        self.indices = tuple(sorted({int(i) for i in indices}))
        n = len(ambient)
        if self.indices and (self.indices[0] < 0 or self.indices[-1] >= n):
            raise MetricError("NOT_IN_AMBIENT",
                              f"index out of range for space '{ambient.name}'")
        self._array = np.asarray(self.indices, dtype=np.intp)

    @property
    def index_array(self):
        """The indices as a numpy array."""
        return self._array

    @property
    def points(self):
        """The point identifiers of the subspace."""
        return [self.ambient.points[i] for i in self.indices]

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, point):
        return point in self.ambient and self.ambient.index(point) in set(self.indices)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient is other.ambient and self.indices == other.indices

    def __hash__(self):
        return hash((id(self.ambient), self.indices))

    def __repr__(self):
        return f"Subspace(size={len(self.indices)}, ambient={self.ambient.name!r})"

    def diameter(self):
        """Returns the exact diameter of the subspace."""
        return diameter(self)

    def as_space(self, name=None):
        """Returns the subspace as a standalone FiniteMetricSpace with the restricted metric."""
        block = self.ambient.block(self._array, self._array)
        return FiniteMetricSpace(self.points, matrix=block,
                                 denominator=self.ambient.denominator,
                                 name=name or f"{self.ambient.name}[sub]")


class MetricFamily:
    """
    An ordered collection of subspaces.

    Attributes:
        members (tuple): The member subspaces.
    """

    def __init__(self, members):
        self.members = tuple(members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, index):
        return self.members[index]

    def __repr__(self):
        return f"MetricFamily(members={len(self.members)})"

    @property
    def ambient(self):
        """
        The single ambient space shared by all members.

        Raises:
            MetricError: AMBIENT_MISMATCH if members live in different spaces.
        """
        ambients = {id(member.ambient): member.ambient for member in self.members}
        if len(ambients) > 1:
            raise MetricError("AMBIENT_MISMATCH",
                              "family members live in different ambient spaces")
        if not ambients:
            return None
        return next(iter(ambients.values()))

    def union(self):
        """Returns the union of all members as one Subspace."""
        ambient = self.ambient
        indices = set()
        for member in self.members:
            indices.update(member.indices)
        return Subspace(ambient, indices)

    def max_diameter(self):
        """Returns the largest member diameter (0 for an empty family)."""
        return max((diameter(member) for member in self.members), default=Fraction(0))


@dataclass(frozen=True)
class EnlargedIntersection:
    """
    The set N_t(C) ∩ N_t(D) ∩ Z and its per-(i, j) pieces.

    Attributes:
        union (Subspace): The whole intersection.
        pieces (dict): Maps (i, j) to the piece built from C_i and D_j.
    """

    union: Subspace
    pieces: dict

    def family(self):
        """Returns the nonempty pieces, ordered by (i, j), as a MetricFamily."""
        return MetricFamily(self.pieces[key] for key in sorted(self.pieces)
                            if len(self.pieces[key]))


def _as_subspace(ambient, subset):
    if isinstance(subset, Subspace):
        if ambient is not None and subset.ambient is not ambient:
            raise MetricError("AMBIENT_MISMATCH", "subset lives in a different space")
        return subset
    return ambient.subspace(subset)


def first_close_pair(ambient, pieces, r):
    """
    Finds two distinct pieces at distance < r.

    Args:
        ambient (FiniteMetricSpace): Space containing every piece.
        pieces (list): Subspaces of ``ambient``.
        r: Nonnegative rational.

    Returns:
        tuple or None: (piece_a, piece_b, index_a, index_b, distance) for the
        first offending pair in piece order, or None if the pieces are
        r-disjoint.
    """
    r = to_rational(r)
    if r <= 0 or len(pieces) < 2:
        return None
    threshold = ambient.strict_threshold(r)
    owner = np.full(len(ambient), -1, dtype=np.int64)
    for k, piece in enumerate(pieces):
        idx = piece.index_array
        shared = idx[owner[idx] >= 0]
        if shared.size:
            i = int(shared[0])
            return int(owner[i]), k, i, i, Fraction(0)
        owner[idx] = k
    for k, piece in enumerate(pieces):
        idx = piece.index_array
        if idx.size == 0:
            continue
        others = (owner >= 0) & (owner != k)
        close = (ambient.rows(idx) < threshold) & others[None, :]
        if close.any():
            a, b = np.argwhere(close)[0]
            i, j = int(idx[a]), int(b)
            return k, int(owner[j]), i, j, ambient.distance_at(i, j)
    return None


def is_r_disjoint(family, r):
    """
    Checks that every pair of distinct members is at distance >= r.

    Args:
        family (MetricFamily): Members sharing one ambient space.
        r: Nonnegative rational.

    Returns:
        bool: True iff the family is r-disjoint.

    Raises:
        MetricError: AMBIENT_MISMATCH if the members live in different spaces.
    """
    ambient = family.ambient
    if ambient is None:
        return True
    return first_close_pair(ambient, list(family.members), r) is None


def diameter(space):
    """
    Returns the exact diameter of a space or subspace.

    Args:
        space (FiniteMetricSpace or Subspace): The set to measure.

    Returns:
        Fraction: The largest pairwise distance, 0 for at most one point.

    Raises:
        MetricError: INFINITE_DIAMETER if two points are at distance INF.
    """
    if isinstance(space, FiniteMetricSpace):
        space = space.whole()
    if len(space) <= 1:
        return Fraction(0)
    ambient = space.ambient
    largest = int(ambient.block(space.index_array, space.index_array).max())
    if largest == INF_CODE:
        raise MetricError("INFINITE_DIAMETER",
                          f"a subset of '{ambient.name}' meets two components")
    return Fraction(largest, ambient.denominator)


def is_bounded(family, bound):
    """
    Checks that every member's diameter is at most ``bound``.

    Args:
        family (MetricFamily): The family.
        bound: Nonnegative rational.

    Returns:
        bool: True iff the family is bounded by ``bound``.
    """
    bound = to_rational(bound)
    return all(diameter(member) <= bound for member in family)


def neighborhood(ambient, subset, t):
    """
    Returns N_t(X): the points at distance <= t from X.

    Args:
        ambient (FiniteMetricSpace): The space.
        subset: A Subspace of ``ambient`` or an iterable of its points.
        t: Nonnegative rational.

    Returns:
        Subspace: The neighborhood.
    """
    sub = _as_subspace(ambient, subset)
    if len(sub) == 0:
        return Subspace(ambient, ())
    threshold = ambient.closed_threshold(t)
    near = (ambient.rows(sub.index_array) <= threshold).any(axis=0)
    return Subspace(ambient, np.nonzero(near)[0])


def enlarged_intersection(c_sets, d_sets, z_set, t):
    """
    Computes N_t(C) ∩ N_t(D) ∩ Z, split into pieces per (C_i, D_j).

    Args:
        c_sets: A Subspace, a point iterable, or a MetricFamily of pieces C_i.
        d_sets: Same forms as ``c_sets`` for the pieces D_j.
        z_set: A Subspace or point iterable Z.
        t: Nonnegative rational enlargement.

    Returns:
        EnlargedIntersection: The union and its (i, j) pieces.
    """
    c_family = c_sets if isinstance(c_sets, MetricFamily) else None
    d_family = d_sets if isinstance(d_sets, MetricFamily) else None
    ambient = None
    for candidate in (c_family, d_family):
        if candidate is not None and len(candidate):
            ambient = candidate.ambient
            break
    if ambient is None:
        for candidate in (c_sets, d_sets, z_set):
            if isinstance(candidate, Subspace):
                ambient = candidate.ambient
                break
    if ambient is None:
        raise MetricError("AMBIENT_MISMATCH", "no ambient space can be inferred")
    if c_family is None:
        c_family = MetricFamily([_as_subspace(ambient, c_sets)])
    if d_family is None:
        d_family = MetricFamily([_as_subspace(ambient, d_sets)])
    z = set(_as_subspace(ambient, z_set).indices)
    c_hoods = [set(neighborhood(ambient, c, t).indices) for c in c_family]
    d_hoods = [set(neighborhood(ambient, d, t).indices) for d in d_family]
    pieces = {}
    total = set()
    for i, c_hood in enumerate(c_hoods):
        for j, d_hood in enumerate(d_hoods):
            common = c_hood & d_hood & z
            pieces[(i, j)] = Subspace(ambient, common)
            total |= common
    return EnlargedIntersection(Subspace(ambient, total), pieces)


def bounded_geometry_profile(space, r):
    """
    Returns N(r), the largest number of points in a closed r-ball.

    Args:
        space (FiniteMetricSpace): The space.
        r: Nonnegative rational radius.

    Returns:
        int: The maximum ball cardinality over all centers.
    """
    if len(space) == 0:
        return 0
    threshold = space.closed_threshold(r)
    if space.is_dense:
        return int((space.matrix <= threshold).sum(axis=1).max())
    return max(int((space.row(i) <= threshold).sum()) for i in range(len(space)))


def r_components(subspace, r):
    """
    Splits a subspace into the components of the graph joining points at distance < r.

    Args:
        subspace (Subspace): The set to split.
        r: Positive rational.

    Returns:
        MetricFamily: The components, ordered by their smallest index.
    """
    ambient = subspace.ambient
    idx = subspace.index_array
    graph = nx.Graph()
    graph.add_nodes_from(int(i) for i in idx)
    if idx.size:
        threshold = ambient.strict_threshold(r)
        close = ambient.block(idx, idx) < threshold
        for a, b in np.argwhere(np.triu(close, k=1)):
            graph.add_edge(int(idx[a]), int(idx[b]))
    components = sorted((sorted(c) for c in nx.connected_components(graph)),
                        key=lambda c: c[0])
    return MetricFamily(Subspace(ambient, c) for c in components)
