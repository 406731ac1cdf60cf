# coarsedecomp/property_a.py

"""
property_a.py

Exactness witnesses: partitions of unity with exact rational values,
subordinate to a bounded cover, whose variation between R-close points is
at most eps. Witnesses are built from decomposition certificates with
normalised distance tents and checked pair by pair.

Classes:
    ExactnessWitness: Cover, functions and parameters.
    WitnessReport: Result of verify_witness and verify_family.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DecompositionError, MetricError
from .metric import INF, Subspace, diameter, format_rational, to_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExactnessWitness:
    """
    A partition of unity subordinate to a bounded cover.

    Attributes:
        cover (tuple): Subspaces U of one ambient space.
        phi (tuple): Per cover set, a dict ambient index -> Fraction holding
            the nonzero values of phi_U.
        R (Fraction): Scale at which variation is measured.
        eps (Fraction): Allowed variation.
        B (Fraction): Bound on the cover diameters.
    """

    cover: tuple
    phi: tuple
    R: Fraction
    eps: Fraction
    B: Fraction

    def __post_init__(self):
        object.__setattr__(self, "cover", tuple(self.cover))
        object.__setattr__(self, "phi", tuple(dict(values) for values in self.phi))
        for name in ("R", "eps", "B"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))

    def values_at(self, i):
        """The nonzero values phi_U(x) at ambient index i, as {cover index: value}."""
        return {k: values[i] for k, values in enumerate(self.phi) if i in values}


@dataclass
class WitnessReport:
    """
    Result of verify_witness.

    Attributes:
        valid (bool): All conditions hold.
        worst_variation (Fraction): Largest variation over R-close pairs.
        worst_pair (list): The points attaining it.
        violations (list): One dict per failed condition.
    """

    valid: bool = True
    worst_variation: Fraction = Fraction(0)
    worst_pair: list = None
    violations: list = field(default_factory=list)

    def add(self, code, **details):
        """Records a violation."""
        self.valid = False
        self.violations.append({"code": code, **details})

    def to_json(self):
        """The report as a JSON-ready dict."""
        return {"valid": self.valid,
                "worst_variation": format_rational(self.worst_variation),
                "worst_pair": self.worst_pair,
                "violations": self.violations}


def _variation(a, b):
    keys = a.keys() | b.keys()
    return sum((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), Fraction(0))


def verify_witness(space, witness):
    """
    Checks subordination, exact unit sums, the cover bound and the variation
    over every pair at distance <= R.

    Args:
        space (Subspace or FiniteMetricSpace): The points the partition lives on.
        witness (ExactnessWitness): The witness.

    Returns:
        WitnessReport: Validity, worst variation and worst pair.
    """
    member = space if isinstance(space, Subspace) else space.whole()
    ambient = member.ambient
    report = WitnessReport()
    for k, (piece, values) in enumerate(zip(witness.cover, witness.phi)):
        outside = set(values) - set(piece.indices)
        if outside:
            report.add("NOT_SUBORDINATE", piece=k, point=ambient.points[min(outside)])
        bad = [i for i, v in values.items() if not 0 <= v <= 1]
        if bad:
            report.add("VALUE_OUT_OF_RANGE", piece=k, point=ambient.points[bad[0]])
        try:
            size = diameter(piece)
        except MetricError:
            size = INF
        if size > witness.B:
            report.add("COVER_UNBOUNDED", piece=k, diameter=format_rational(size),
                       bound=format_rational(witness.B))
    at = {i: witness.values_at(i) for i in member.indices}
    for i, values in at.items():
        total = sum(values.values(), Fraction(0))
        if total != 1:
            report.add("UNIT_SUM", point=ambient.points[i], sum=format_rational(total))
    idx = member.index_array
    if idx.size:
        close = ambient.block(idx, idx) <= ambient.closed_threshold(witness.R)
        for a, b in np.argwhere(np.triu(close, k=1)):
            i, j = int(idx[a]), int(idx[b])
            variation = _variation(at[i], at[j])
            if variation > report.worst_variation:
                report.worst_variation = variation
                report.worst_pair = [ambient.points[i], ambient.points[j]]
    if report.worst_variation > witness.eps:
        report.add("VARIATION", variation=format_rational(report.worst_variation),
                   eps=format_rational(witness.eps), pair=report.worst_pair)
    logger.debug("Witness on %d points: worst variation %s", len(member), report.worst_variation)
    return report


def constant_witness(member, R, eps, bound=None):
    """The partition made of the constant function 1 on the whole member."""
    bound = diameter(member) if bound is None else bound
    return ExactnessWitness((member,), ({i: Fraction(1) for i in member.indices},), R, eps, bound)


def tent_witness(member, cores, r, R, eps, bound):
    """
    Normalised tents max(0, 1 - 2 d(x, U) / r) around each core U.

    Every point lying in a core gets a positive sum, so the normalisation
    is exact. Each tent is supported on the points closer than r/2 to its
    core, which is its cover set.

    Args:
        member (Subspace): The points of the partition.
        cores (list): Subspaces covering ``member``.
        r: Tent radius, twice the support radius.
        R, eps: Witness parameters.
        bound: Largest core diameter.

    Returns:
        ExactnessWitness: Cover diameters are at most bound + r.
    """
    ambient = member.ambient
    idx = member.index_array
    r = to_rational(r)
    scale = r * ambient.denominator
    tents = []
    for core in cores:
        distances = ambient.block(core.index_array, idx).min(axis=0)
        values = {}
        for i, code in zip(member.indices, distances):
            value = (scale - 2 * int(code)) / scale
            if value > 0:
                values[i] = value
        tents.append(values)
    totals = {i: sum((t.get(i, 0) for t in tents), Fraction(0)) for i in member.indices}
    phi = [{i: v / totals[i] for i, v in tent.items()} for tent in tents]
    cover = [Subspace(ambient, tent) for tent in tents]
    return ExactnessWitness(cover, phi, R, eps, to_rational(bound) + r)


def pou_from_certificate(cert, R, eps, member=0):
    """
    Builds an exactness witness on one initial member from a certificate.

    The cores are the final pieces descending from the member. Rounds whose
    challenge r is at least 4R/eps are tried from the largest r down, with
    tents of radius r; the first witness that verifies is returned. A
    certificate without rounds gives the constant function 1.

    Args:
        cert (DecompositionCertificate): A valid certificate.
        R: Scale.
        eps: Allowed variation.
        member (int): Index of the initial member.

    Returns:
        ExactnessWitness: A witness passing verify_witness.

    Raises:
        DecompositionError: NO_SUITABLE_STEP if no round is large enough or
            no candidate verifies.
    """
    R, eps = to_rational(R), to_rational(eps)
    space = cert.initial[member]
    if cert.depth == 0:
        return constant_witness(space, R, eps, cert.bound)
    final = cert.final_family()
    cores = [final[k] for k in cert.descendants(member)]
    threshold = 4 * R / eps
    candidates = sorted({round_.r for round_ in cert.rounds if round_.r >= threshold}, reverse=True)
    if not candidates:
        raise DecompositionError("NO_SUITABLE_STEP",
                                 f"no round has a challenge of at least 4R/eps = {threshold}")
    for r in candidates:
        witness = tent_witness(space, cores, r, R, eps, cert.bound)
        report = verify_witness(space, witness)
        if report.valid:
            logger.info("Tent witness at r=%s: worst variation %s", r, report.worst_variation)
            return witness
        logger.debug("Tents at r=%s fail: %s", r, report.violations[:1])
    raise DecompositionError("NO_SUITABLE_STEP",
                             f"no tent witness at r in {[str(r) for r in candidates]} "
                             f"reaches variation {eps}")


def verify_family(spaces, witnesses):
    """
    Checks witnesses on several spaces against one shared (R, eps, B).

    Args:
        spaces (list): Subspaces or spaces.
        witnesses (list): One ExactnessWitness per space.

    Returns:
        WitnessReport: Valid iff every witness is and the parameters agree;
        the worst variation is the largest over the family.
    """
    report = WitnessReport()
    witnesses = list(witnesses)
    if len(witnesses) != len(spaces):
        report.add("PARAMETER_MISMATCH", detail="one witness per space is required")
        return report
    params = {(w.R, w.eps, w.B) for w in witnesses}
    if len(params) > 1:
        report.add("PARAMETER_MISMATCH", detail="witnesses use different (R, eps, B)")
    for k, (space, witness) in enumerate(zip(spaces, witnesses)):
        single = verify_witness(space, witness)
        for violation in single.violations:
            report.add(violation.pop("code"), member=k, **violation)
        if single.worst_variation > report.worst_variation or report.worst_pair is None:
            report.worst_variation = single.worst_variation
            report.worst_pair = single.worst_pair
    return report
