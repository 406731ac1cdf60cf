# coarsedecomp/constants.py

"""
constants.py

Per-dimension constants for the Rips lemma checks, derived by a seeded
sampling oracle on regular simplices with unit edges:

- alpha_n: path-length comparison constant. A chord of an n-simplex
  between two boundary points is replaced by a path through the boundary;
  alpha_n is alpha_{n-1} times the largest sampled detour ratio.
- c_n: hop-count constant. The largest ratio of 1-skeleton hops to
  distance between vertices of two n-simplices glued along a facet.
- beta_n: neighborhood constant, alpha_n times one plus the largest
  sampled distance from a point of an n-simplex to its nearest vertex.

Sampled maxima are rounded up to a multiple of 1e-6 and inflated by the
safety factor. In dimension 1 every constant is exact.

Classes:
    DimensionConstants: The constants of one dimension and their provenance.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .config import DEFAULT_SEED, MAX_CONSTANT_DIMENSION, ORACLE_SAMPLES, SAFETY_FACTOR
from .errors import ComplexError
from .metric import format_rational

logger = logging.getLogger(__name__)

ROUNDING = 10 ** 6
BATCH = 10_000
RIDGE_STEPS = 33


@dataclass(frozen=True)
class DimensionConstants:
    """
    Constants for complexes of one dimension.

    Attributes:
        n (int): Dimension.
        alpha (Fraction): Comparison constant.
        c (Fraction): Hop-count constant used by the lower estimate.
        beta (Fraction): Neighborhood constant.
        derivation (dict): Sample count, seed and the rounded maxima.
    """

    n: int
    alpha: Fraction
    c: Fraction
    beta: Fraction
    derivation: dict = field(default_factory=dict, compare=False)

    def to_json(self):
        """The constants and their derivation as a JSON-ready dict."""
        return {
            "n": self.n,
            "alpha": format_rational(self.alpha),
            "c": format_rational(self.c),
            "beta": format_rational(self.beta),
            "derivation": self.derivation,
        }


def round_up(value):
    """Smallest multiple of 1e-6 that is >= value."""
    return Fraction(math.ceil(value * ROUNDING), ROUNDING)


def _norm(vectors):
    """Euclidean lengths of barycentric difference vectors in a unit-edge simplex."""
    return np.sqrt(0.5 * np.sum(vectors * vectors, axis=-1))


def _facet_points(rng, n, size, facet):
    points = rng.dirichlet(np.full(n + 1, 0.5), size=size)
    points[np.arange(size), facet] = 0
    return points / points.sum(axis=1, keepdims=True)


def _drop(points, column):
    """Moves the weight of ``column`` onto the other coordinates proportionally."""
    moved = points.copy()
    moved[np.arange(len(points)), column] = 0
    return moved / moved.sum(axis=1, keepdims=True)


def sample_detour_ratio(n, samples, rng):
    """
    Largest sampled ratio of a boundary path to the chord it replaces.

    Pairs p, q lie on distinct facets F_i, F_j; the path runs p -> x -> q
    through the common ridge, with x on the segment between the ridge
    projections of p and q. Every path is a genuine boundary path, so the
    ratio only errs upward.
    """
    worst = 1.0
    lambdas = np.linspace(0.0, 1.0, RIDGE_STEPS)[None, :, None]
    done = 0
    while done < samples:
        size = min(BATCH, samples - done)
        i = rng.integers(0, n + 1, size=size)
        j = (i + rng.integers(1, n + 1, size=size)) % (n + 1)
        p = _facet_points(rng, n, size, i)
        q = _facet_points(rng, n, size, j)
        x = (1 - lambdas) * _drop(p, j)[:, None, :] + lambdas * _drop(q, i)[:, None, :]
        path = (_norm(p[:, None, :] - x) + _norm(x - q[:, None, :])).min(axis=1)
        chord = _norm(p - q)
        keep = chord > 1e-9
        if keep.any():
            worst = max(worst, float((path[keep] / chord[keep]).max()))
        done += size
    return worst


def sample_vertex_radius(n, samples, rng):
    """Largest sampled distance from a point of the n-simplex to its nearest vertex."""
    worst = 0.0
    done = 0
    while done < samples:
        size = min(BATCH, samples - done)
        p = rng.dirichlet(np.ones(n + 1), size=size)
        squares = np.sum(p * p, axis=1, keepdims=True)
        to_vertex = np.sqrt(np.maximum(0.5 * (squares - 2 * p + 1), 0))
        worst = max(worst, float(to_vertex.min(axis=1).max()))
        done += size
    return worst


def glued_hop_ratio(n):
    """
    Largest hops/distance over vertex pairs of two n-simplices glued along a facet.

    Vertices 0..n span the first simplex; the second apex is the reflection
    of vertex 0 through the opposite facet.
    """
    corners = np.eye(n + 1)
    apex = np.full(n + 1, 2.0 / n)
    apex[0] = -1.0
    points = np.vstack([corners, apex])
    worst = 1.0
    for u in range(n + 2):
        for v in range(u + 1, n + 2):
            hops = 2 if (u, v) == (0, n + 1) else 1
            worst = max(worst, hops / float(_norm(points[u] - points[v])))
    return worst


@lru_cache(maxsize=None)
def derive_dimension_constants(n, samples=ORACLE_SAMPLES, seed=DEFAULT_SEED):
    """
    Derives alpha_n, c_n and beta_n.

    Args:
        n (int): Dimension, at most MAX_CONSTANT_DIMENSION.
        samples (int): Samples per sampled quantity.
        seed (int): Seed of the oracle's generator.

    Returns:
        DimensionConstants: The constants with their derivation record.

    Raises:
        ComplexError: DIMENSION_CAP_EXCEEDED above the cap.
    """
    if n > MAX_CONSTANT_DIMENSION:
        raise ComplexError("DIMENSION_CAP_EXCEEDED",
                           f"constants are derived up to dimension {MAX_CONSTANT_DIMENSION}, "
                           f"got {n}")
    if n <= 1:
        return DimensionConstants(1, Fraction(1), Fraction(1), Fraction(3, 2),
                                  {"method": "exact", "samples": 0, "seed": seed})
    below = derive_dimension_constants(n - 1, samples, seed)
    rng = np.random.default_rng([seed, n])
    detour = round_up(sample_detour_ratio(n, samples, rng))
    radius = round_up(sample_vertex_radius(n, samples, rng))
    hops = round_up(glued_hop_ratio(n))
    alpha = below.alpha * detour * SAFETY_FACTOR
    c = max(below.c, hops * SAFETY_FACTOR)
    beta = alpha * (1 + radius * SAFETY_FACTOR)
    derivation = {
        "method": "sampled",
        "samples": samples,
        "seed": seed,
        "max_detour_ratio": format_rational(detour),
        "max_vertex_radius": format_rational(radius),
        "max_glued_hop_ratio": format_rational(hops),
        "safety_factor": format_rational(SAFETY_FACTOR),
    }
    logger.info("Dimension %d constants: alpha=%s c=%s beta=%s", n, float(alpha), float(c),
                float(beta))
    return DimensionConstants(n, alpha, c, beta, derivation)
