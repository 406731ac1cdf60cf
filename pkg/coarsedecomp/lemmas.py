# coarsedecomp/lemmas.py

"""
lemmas.py

Checks the quantitative comparison lemmas on concrete Rips complexes.

Every check computes a ratio for each vertex, pair or sample and compares
the largest ratio with a constant: alpha_n, beta_n, or 2 for the collapse
map. The ratios are built from the certified bounds of geodesic.py, so a
PASS is a verified instance of the inequality. A ratio above the constant
only shows that the bounds were too loose to decide, and is reported as
INCONCLUSIVE with the offending pairs.

Classes:
    LemmaReport: Outcome of one lemma check.
    RetractionSweep: Outcome of a search for the smallest passing cone factor.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import DEFAULT_SEED, SUBDIVISION_LEVEL
from .constants import derive_dimension_constants
from .errors import ComplexError
from .geodesic import (cone_distance, distances_to_subcomplex, geodesic_lower_sets,
                       subdivision_graph, vertex_distances)
from .metric import INF, format_rational, to_rational
from .rips import KIND_SCALED, build_scaled_rips

logger = logging.getLogger(__name__)

PASS = "PASS"
INCONCLUSIVE = "INCONCLUSIVE"

LEMMAS = ("comparison", "scaled_comparison", "neighborhood", "separation", "cone_retraction")

MAX_LISTED = 20
RETRACTION_SAMPLES = 2_000
MIN_SAMPLES_PER_SIMPLEX = 50
# Sample pairs closer than this are skipped; their ratio is all rounding.
MIN_SEPARATION = Fraction(1, 10 ** 9)


@dataclass
class LemmaReport:
    """
    Outcome of one lemma check.

    Attributes:
        lemma (str): The lemma checked.
        status (str): PASS or INCONCLUSIVE.
        constant_name (str): alpha, beta or lipschitz.
        constant (Fraction): The constant the ratios are compared with.
        checked (int): Number of ratios computed.
        worst_ratio (Fraction): Largest ratio seen, INF if a bound was infinite.
        worst_pair (list): Points realising the worst ratio.
        listed (list): The largest ratios, as (points, ratio) pairs.
        offending (int): Number of ratios above the constant.
        constants (DimensionConstants): The constants used.
        params (dict): The parameters of the check.
    """

    lemma: str
    status: str
    constant_name: str
    constant: Fraction
    checked: int = 0
    worst_ratio: Fraction = Fraction(0)
    worst_pair: list = field(default_factory=list)
    listed: list = field(default_factory=list)
    offending: int = 0
    constants: object = None
    params: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS

    def to_json(self):
        """The report as a JSON-ready dict."""
        return {
            "lemma": self.lemma,
            "status": self.status,
            "constant": {"name": self.constant_name, "value": format_rational(self.constant)},
            "checked": self.checked,
            "worst_ratio": format_rational(self.worst_ratio),
            "worst_pair": self.worst_pair,
            "pairs": [{"points": points, "ratio": format_rational(ratio)}
                      for points, ratio in self.listed],
            "offending": self.offending,
            "constants": None if self.constants is None else self.constants.to_json(),
            "params": self.params,
        }


@dataclass
class RetractionSweep:
    """
    Result of smallest_passing_m.

    Attributes:
        m (int): Smallest tested cone factor whose check passed, None if none did.
        reports (dict): Cone factor -> LemmaReport, for every factor tried.
    """

    m: int
    reports: dict

    def to_json(self):
        return {"m": self.m,
                "reports": {str(m): report.to_json() for m, report in self.reports.items()}}


class _Tally:
    """Collects (points, ratio) observations against a constant."""

    def __init__(self, constant):
        self.constant = constant
        self.checked = 0
        self.offending = 0
        self.observed = []

    def add(self, points, ratio):
        self.checked += 1
        if ratio > self.constant:
            self.offending += 1
        self.observed.append((points, ratio))

    def merge(self, other):
        self.checked += other.checked
        self.offending += other.offending
        self.observed.extend(other.observed)

    def report(self, lemma, constant_name, constants, params):
        ranked = sorted(self.observed, key=lambda item: item[1], reverse=True)
        worst_pair, worst = (ranked[0] if ranked else ([], Fraction(0)))
        return LemmaReport(
            lemma=lemma,
            status=PASS if self.offending == 0 else INCONCLUSIVE,
            constant_name=constant_name,
            constant=self.constant,
            checked=self.checked,
            worst_ratio=worst,
            worst_pair=worst_pair,
            listed=ranked[:MAX_LISTED],
            offending=self.offending,
            constants=constants,
            params=params,
        )


def _ratio(numerator, denominator):
    if denominator == INF:
        return Fraction(0)
    if denominator == 0:
        return Fraction(0) if numerator == 0 else INF
    return Fraction(numerator) / Fraction(denominator)


def _run(tasks, work, workers):
    """Runs ``work`` over ``tasks``, keeping task order in the results."""
    if workers <= 1 or len(tasks) <= 1:
        return [work(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, tasks))


def _points(complex_, indices):
    return [complex_.space.points[i] for i in indices]


def _indices(space, points):
    return sorted({space.index(p) for p in points})


def _distance_to_set(space, index, targets):
    row = space.block([index], targets)[0]
    return space.decode(int(row.min()))


def _require_dimension(complex_, lemma):
    if complex_.dimension > 2:
        raise ComplexError("UNSUPPORTED_DIMENSION",
                           f"{lemma} supports complexes of dimension at most 2, "
                           f"got {complex_.dimension}")


def _require_scaled(complex_, lemma):
    if complex_.kind != KIND_SCALED:
        raise ComplexError("BAD_PARAMS", f"{lemma} needs a scaled complex, got {complex_.kind}")


def _check_comparison(complex_, params, constants, level, workers):
    space = complex_.space
    a = params["a"]
    tally = _Tally(constants.alpha)
    vertices = complex_.vertices
    subdivision_graph(complex_, level)

    def work(u):
        local = _Tally(constants.alpha)
        upper = vertex_distances(complex_, u, level)
        for v in vertices:
            if v <= u or v not in upper:
                continue
            local.add(_points(complex_, (u, v)),
                      _ratio(space.distance_at(u, v), a * upper[v]))
        return local

    for local in _run(vertices, work, workers):
        tally.merge(local)
    return tally, "alpha"


def _check_scaled_comparison(complex_, params, constants, level, workers):
    _require_scaled(complex_, "scaled_comparison")
    _require_dimension(complex_, "scaled_comparison")
    space = complex_.space
    a = params["a"]
    targets = _indices(space, params["C"])
    upper = distances_to_subcomplex(complex_, complex_.full_subcomplex(params["C"]), level)
    tally = _Tally(constants.beta)
    for x in complex_.vertices:
        if x in targets or x not in upper:
            continue
        tally.add(_points(complex_, (x,)),
                  _ratio(_distance_to_set(space, x, targets), a * upper[x]))
    return tally, "beta"


def _check_neighborhood(complex_, params, constants, level, workers):
    space = complex_.space
    a, eps = params["a"], params["eps"]
    if eps <= 0:
        raise ComplexError("BAD_PARAMS", f"eps must be positive, got {eps}")
    targets = _indices(space, params["C"])
    upper = distances_to_subcomplex(complex_, complex_.full_subcomplex(params["C"]), level)
    tally = _Tally(constants.beta)
    for x in complex_.vertices:
        if x not in upper or upper[x] > eps:
            continue
        tally.add(_points(complex_, (x,)), _ratio(_distance_to_set(space, x, targets), a * eps))
    return tally, "beta"


def _check_separation(complex_, params, constants, level, workers):
    space = complex_.space
    a, eps = params["a"], params["eps"]
    family = [_indices(space, member) for member in params["family"]]
    tally = _Tally(constants.beta)
    for i, first in enumerate(family):
        for j in range(i + 1, len(family)):
            second = family[j]
            gap = space.decode(int(space.block(first, second).min()))
            if gap < eps:
                raise ComplexError("BAD_PARAMS",
                                   f"family members {i} and {j} are {format_rational(gap)} "
                                   f"apart, less than eps={format_rational(eps)}")
            lower = geodesic_lower_sets(complex_, first, second, constants)
            if lower == INF:
                ratio = Fraction(0)
            elif lower == 0:
                ratio = INF
            else:
                ratio = eps / (a * lower)
            tally.add([_points(complex_, first), _points(complex_, second)], ratio)
    return tally, "beta"


def _triangle_lengths(complex_, simplex):
    edges = ((simplex[0], simplex[1]), (simplex[1], simplex[2]), (simplex[2], simplex[0]))
    return tuple(Fraction(1) if complex_.is_standard(e) else Fraction(2 * complex_.m)
                 for e in edges)


def _check_cone_retraction(complex_, params, constants, level, workers):
    """
    Samples pairs in the collar s in [m - eps, m] of each scaled triangle
    touching W and compares the distance after pushing both points out to
    the boundary loop with the distance before.
    """
    _require_scaled(complex_, "cone_retraction")
    _require_dimension(complex_, "cone_retraction")
    eps = params["eps"]
    m = complex_.m
    samples = int(params.get("samples", RETRACTION_SAMPLES))
    rng = np.random.default_rng(int(params.get("seed", DEFAULT_SEED)))
    tally = _Tally(Fraction(2))
    triangles = [s for s in complex_.scaled_simplices()
                 if len(s) == 3 and complex_.marked & set(s)]
    if not triangles:
        return tally, "lipschitz"
    inner = m - eps
    per_triangle = max(MIN_SAMPLES_PER_SIMPLEX, samples // len(triangles))
    for simplex in triangles:
        points = _points(complex_, simplex)
        if inner <= 0:
            tally.add(points, INF)
            continue
        lengths = _triangle_lengths(complex_, simplex)
        total = sum(lengths)
        radii = rng.uniform(float(inner), float(m), size=(per_triangle, 2))
        arcs = rng.uniform(0.0, float(total), size=(per_triangle, 2))
        worst = Fraction(0)
        for (s1, s2), (u1, u2) in zip(radii, arcs):
            before = cone_distance(s1, u1, s2, u2, total, m)
            if before.lo < MIN_SEPARATION:
                continue
            after = cone_distance(m, u1, m, u2, total, m)
            worst = max(worst, after.hi / before.lo)
        tally.add(points, worst)
    return tally, "lipschitz"


_CHECKS = {
    "comparison": _check_comparison,
    "scaled_comparison": _check_scaled_comparison,
    "neighborhood": _check_neighborhood,
    "separation": _check_separation,
    "cone_retraction": _check_cone_retraction,
}

_REQUIRED = {
    "eps": ("neighborhood", "separation", "cone_retraction"),
    "C": ("scaled_comparison", "neighborhood"),
    "family": ("separation",),
}


def _normalise(complex_, params):
    normal = dict(params)
    normal["a"] = to_rational(params.get("a", complex_.a if complex_.a is not None else 1))
    if normal["a"] <= 0:
        raise ComplexError("BAD_PARAMS", f"a must be positive, got {normal['a']}")
    if "eps" in params:
        normal["eps"] = to_rational(params["eps"])
    if "C" not in params and complex_.marked:
        normal["C"] = _points(complex_, sorted(complex_.marked))
    return normal


def _json_params(params):
    return {key: format_rational(value) if isinstance(value, Fraction) else value
            for key, value in params.items()}


def verify_lemma(complexes, lemma, params, constants=None, level=SUBDIVISION_LEVEL, workers=1):
    """
    Checks one lemma on a complex or a family of complexes.

    Args:
        complexes: A MetricSimplicialComplex or a list of them.
        lemma (str): One of LEMMAS.
        params (dict): a, eps, C (point ids), family (lists of point ids),
            and for cone_retraction samples and seed. a defaults to the
            complex's scale and C to its marked set.
        constants (DimensionConstants): Defaults to the oracle constants of
            the largest dimension in the family.
        level (int): Subdivision level for upper bounds.
        workers (int): Threads for the per-vertex sweep of comparison.

    Returns:
        LemmaReport: The aggregated report.

    Raises:
        ComplexError: BAD_PARAMS, UNKNOWN_LEMMA or UNSUPPORTED_DIMENSION.
    """
    if lemma not in _CHECKS:
        raise ComplexError("UNKNOWN_LEMMA", f"unknown lemma '{lemma}', expected one of {LEMMAS}")
    family = [complexes] if not isinstance(complexes, (list, tuple)) else list(complexes)
    if not family:
        raise ComplexError("BAD_PARAMS", "no complex to check")
    if constants is None:
        constants = derive_dimension_constants(max(max(c.dimension for c in family), 1))
    tally, name = None, None
    for complex_ in family:
        normal = _normalise(complex_, params)
        for key in ("eps", "C", "family"):
            if lemma in _REQUIRED[key] and key not in normal:
                raise ComplexError("BAD_PARAMS", f"{lemma} needs the parameter '{key}'")
        local, name = _CHECKS[lemma](complex_, normal, constants, level, workers)
        if tally is None:
            tally = local
        else:
            tally.merge(local)
    report = tally.report(lemma, name, constants, _json_params(normal))
    logger.info("%s: %s over %d ratios, worst %s against %s=%s", lemma, report.status,
                report.checked, format_rational(report.worst_ratio), name,
                format_rational(report.constant))
    return report


def smallest_passing_m(space, w, a, b, eps, candidates, samples=RETRACTION_SAMPLES,
                       seed=DEFAULT_SEED):
    """
    Tries cone factors in increasing order until the collapse check passes.

    Args:
        space (FiniteMetricSpace): The vertex set.
        w: Points of W.
        a, b: Scales of the scaled complex.
        eps: Collar width.
        candidates (iterable): Cone factors to try.
        samples (int): Sample budget per factor.
        seed (int): Sampling seed, reused for every factor.

    Returns:
        RetractionSweep: The smallest passing factor and every report made.
    """
    reports = {}
    for m in sorted(set(int(c) for c in candidates)):
        complex_ = build_scaled_rips(space, w, a, b, m)
        report = verify_lemma(complex_, "cone_retraction",
                              {"eps": eps, "samples": samples, "seed": seed})
        reports[m] = report
        if report.passed:
            logger.info("Collapse map is 2-Lipschitz from m=%d at eps=%s", m,
                        format_rational(to_rational(eps)))
            return RetractionSweep(m, reports)
    return RetractionSweep(None, reports)
