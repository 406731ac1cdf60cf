# coarsedecomp/decomposition.py

"""
decomposition.py

The metric decomposition game. In each round the adversary issues a
challenge r and every member X of the current family is split as
X = X_0 u X_1 with each part an r-disjoint union of pieces; the pieces form
the next family. The game ends when the family is bounded.

Classes:
    DecompositionStep: One member's r-decomposition.
    GameRound: The steps of one round, one per family member.
    DecompositionCertificate: The transcript of a finished game.
    VerificationReport: Result of verify_certificate.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DecompositionError, MalformedCertificateError, MetricError
from .metric import (INF, MetricFamily, Subspace, diameter, first_close_pair, format_rational,
                     to_rational)

logger = logging.getLogger(__name__)

COVER_VIOLATION = "COVER_VIOLATION"
OVERLAP_VIOLATION = "OVERLAP_VIOLATION"
R_DISJOINT_VIOLATION = "R_DISJOINT_VIOLATION"
BOUND_VIOLATION = "BOUND_VIOLATION"


@dataclass(frozen=True)
class DecompositionStep:
    """
    An r-decomposition member = (union of part0) u (union of part1).

    Attributes:
        member (Subspace): The decomposed set.
        r (Fraction): The challenge.
        part0 (tuple): Pieces of X_0, pairwise r-disjoint.
        part1 (tuple): Pieces of X_1, pairwise r-disjoint.
    """

    member: Subspace
    r: object
    part0: tuple = ()
    part1: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "r", to_rational(self.r))
        object.__setattr__(self, "part0", tuple(self.part0))
        object.__setattr__(self, "part1", tuple(self.part1))

    @classmethod
    def trivial(cls, member, r):
        """The step keeping the member whole in X_0."""
        return cls(member, r, (member,), ())

    def pieces(self):
        """part0 followed by part1: the members this step contributes to the next family."""
        return self.part0 + self.part1


@dataclass(frozen=True)
class GameRound:
    """
    One round of the game.

    Attributes:
        r (Fraction): The challenge.
        steps (tuple): One DecompositionStep per member, in family order.
    """

    r: object
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", to_rational(self.r))
        object.__setattr__(self, "steps", tuple(self.steps))

    def next_family(self):
        """The pieces of all steps, member by member, part0 before part1."""
        return MetricFamily(piece for step in self.steps for piece in step.pieces())


@dataclass(frozen=True)
class DecompositionCertificate:
    """
    Transcript of a completed decomposition game.

    Attributes:
        initial (MetricFamily): The family the game starts from.
        rounds (tuple): GameRounds in play order.
        bound (Fraction): Claimed bound on the diameters of the final family.
    """

    initial: MetricFamily
    rounds: tuple
    bound: object

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(self.rounds))
        object.__setattr__(self, "bound", to_rational(self.bound))

    @property
    def depth(self):
        """Number of rounds."""
        return len(self.rounds)

    @property
    def challenges(self):
        """The challenges played."""
        return [round_.r for round_ in self.rounds]

    @property
    def ambient(self):
        """The ambient space of the initial family."""
        return self.initial.ambient

    def families(self):
        """The families Y_0, ..., Y_n."""
        result = [self.initial]
        for round_ in self.rounds:
            result.append(round_.next_family())
        return result

    def final_family(self):
        """Y_n."""
        return self.rounds[-1].next_family() if self.rounds else self.initial

    def descendants(self, member_index):
        """
        Positions in the final family of the pieces descending from one initial member.

        Args:
            member_index (int): Index in the initial family.

        Returns:
            list: Indices into the final family.
        """
        current = [member_index]
        for round_ in self.rounds:
            offsets = np.cumsum([0] + [len(step.pieces()) for step in round_.steps])
            current = [k for i in current for k in range(offsets[i], offsets[i + 1])]
        return current


@dataclass
class VerificationReport:
    """
    Result of verify_certificate.

    Attributes:
        valid (bool): True if no violation was found.
        depth (int): Number of rounds.
        violations (list): One dict per violation with its code and location.
    """

    valid: bool = True
    depth: int = 0
    violations: list = field(default_factory=list)

    def add(self, code, **location):
        """Records a violation."""
        self.valid = False
        self.violations.append({"code": code, **location})

    def to_json(self):
        """The report as a JSON-ready dict."""
        return {"valid": self.valid, "depth": self.depth, "violations": self.violations}


def _check_step(report, step, round_index, member_index):
    member = set(step.member.indices)
    ambient = step.member.ambient
    covered = set()
    for part_name, part in (("part0", step.part0), ("part1", step.part1)):
        seen = {}
        for k, piece in enumerate(part):
            if piece.ambient is not ambient:
                raise MalformedCertificateError(
                    f"round {round_index} member {member_index}: a piece lives outside the ambient space")
            outside = set(piece.indices) - member
            if outside:
                report.add(COVER_VIOLATION, round=round_index, member=member_index, part=part_name,
                           piece=k, point=ambient.points[min(outside)],
                           detail="piece leaves the member")
            for i in piece.indices:
                if i in seen:
                    report.add(OVERLAP_VIOLATION, round=round_index, member=member_index,
                               part=part_name, pieces=[seen[i], k], point=ambient.points[i])
                    break
                seen[i] = k
            covered.update(piece.indices)
        close = first_close_pair(ambient, [p for p in part if len(p)], step.r)
        if close is not None:
            a, b, i, j, distance = close
            if i != j:
                report.add(R_DISJOINT_VIOLATION, round=round_index, member=member_index,
                           part=part_name, pieces=[a, b],
                           points=[ambient.points[i], ambient.points[j]],
                           distance=format_rational(distance), r=format_rational(step.r))
    missing = member - covered
    if missing:
        report.add(COVER_VIOLATION, round=round_index, member=member_index,
                   point=ambient.points[min(missing)], detail="point not covered")


def verify_certificate(cert):
    """
    Re-checks every round and the terminal bound of a certificate.

    Args:
        cert (DecompositionCertificate): The transcript.

    Returns:
        VerificationReport: Validity, depth and violations.

    Raises:
        MalformedCertificateError: If a round does not match the family it
            claims to decompose.
    """
    report = VerificationReport(depth=cert.depth)
    family = cert.initial
    for round_index, round_ in enumerate(cert.rounds):
        if len(round_.steps) != len(family):
            raise MalformedCertificateError(
                f"round {round_index} has {len(round_.steps)} steps for {len(family)} members")
        for member_index, (step, member) in enumerate(zip(round_.steps, family)):
            if step.member != member:
                raise MalformedCertificateError(
                    f"round {round_index} step {member_index} decomposes a different set")
            if step.r != round_.r:
                raise MalformedCertificateError(
                    f"round {round_index} step {member_index} answers challenge "
                    f"{step.r} instead of {round_.r}")
            _check_step(report, step, round_index, member_index)
        family = round_.next_family()
    for member_index, member in enumerate(family):
        try:
            size = diameter(member)
        except MetricError:
            size = INF
        if size > cert.bound:
            report.add(BOUND_VIOLATION, member=member_index,
                       diameter=format_rational(size), bound=format_rational(cert.bound))
    logger.info("Certificate of depth %d: %s (%d violations)",
                cert.depth, "valid" if report.valid else "invalid", len(report.violations))
    return report


def with_challenges(cert, challenges):
    """Returns the certificate with its challenges replaced, round by round."""
    challenges = [to_rational(r) for r in challenges]
    if len(challenges) != cert.depth:
        raise DecompositionError("CHALLENGES_EXHAUSTED",
                                 f"need {cert.depth} challenges, got {len(challenges)}")
    rounds = tuple(GameRound(r, tuple(replace(step, r=r) for step in round_.steps))
                   for r, round_ in zip(challenges, cert.rounds))
    return replace(cert, rounds=rounds)


def play_game(family, strategy, challenges):
    """
    Plays the decomposition game with a strategy against a challenge list.

    Before every round each member is asked whether it is terminal for the
    next challenge; the game stops once all members are. Terminal members
    take the trivial step in rounds that others still need.

    Args:
        family (MetricFamily or Subspace): The initial family.
        strategy (Strategy): Decides every step.
        challenges (list): Positive rationals consumed in order.

    Returns:
        DecompositionCertificate: The transcript with bound = largest final diameter.

    Raises:
        DecompositionError: CHALLENGES_EXHAUSTED if the list runs out before
            the strategy finishes; STRATEGY_STUCK from the strategy.
    """
    if isinstance(family, Subspace):
        family = MetricFamily([family])
    challenges = [to_rational(r) for r in challenges]
    if any(r <= 0 for r in challenges):
        raise DecompositionError("BAD_CHALLENGE", "challenges must be positive")
    initial = family
    states = [strategy.initial_state(member) for member in family]
    rounds = []
    while True:
        index = len(rounds)
        r = challenges[index] if index < len(challenges) else None
        terminal = [strategy.is_terminal(member, state, r) for member, state in zip(family, states)]
        if all(terminal):
            break
        if r is None:
            raise DecompositionError("CHALLENGES_EXHAUSTED",
                                     f"{terminal.count(False)} members still need a round "
                                     f"after {len(challenges)} challenges")
        steps, next_states = [], []
        for member, state, done in zip(family, states, terminal):
            if done:
                step, children = DecompositionStep.trivial(member, r), [state]
            else:
                step, children = strategy.step(member, state, r)
            if len(children) != len(step.pieces()):
                raise DecompositionError("STRATEGY_STUCK",
                                         f"{strategy!r} returned {len(children)} states "
                                         f"for {len(step.pieces())} pieces")
            steps.append(step)
            next_states.extend(children)
        round_ = GameRound(r, steps)
        rounds.append(round_)
        family, states = round_.next_family(), next_states
        logger.debug("Round %d at r=%s: %d members", index + 1, r, len(family))
    bound = family.max_diameter()
    logger.info("Game finished: depth %d, bound %s", len(rounds), bound)
    return DecompositionCertificate(initial, tuple(rounds), bound)


def pullback_challenge(rho, r):
    """
    The challenge s to play on the image so that pulled-back pieces are r-disjoint.

    Pairs closer than r map to pairs at most rho.below(r) apart, so any s above
    that value works; rho(r) is used when it is larger, the next integer otherwise.
    """
    r = to_rational(r)
    below = rho.below(r)
    at = rho(r)
    return at if at > below else below + 1


def pull_back_step(step, map_member, r):
    """
    Pulls a step on the image of a map back to the map's source.

    With a uniformly expansive map of modulus rho and s =
    pullback_challenge(rho, r), an s-step on the image pulls back to an r-step.

    Args:
        step (DecompositionStep): Step whose member contains the image of
            ``map_member.source``.
        map_member (MapMember): The map.
        r: The challenge the pulled-back step answers.

    Returns:
        DecompositionStep: Preimages of the pieces; empty preimages dropped.
    """
    source = map_member.source
    ambient = source.ambient
    images = {i: map_member.image_index(i) for i in source.indices}

    def preimages(part):
        result = []
        for piece in part:
            wanted = set(piece.indices)
            found = [i for i in source.indices if images[i] in wanted]
            if found:
                result.append(Subspace(ambient, found))
        return tuple(result)

    return DecompositionStep(source, r, preimages(step.part0), preimages(step.part1))


def verify_union(space, pieces, core, r):
    """
    Checks a union decomposition X = Y u X_1 u ... u X_k in which the sets
    X_i minus the core Y are pairwise r-disjoint, and returns it as an r-step.

    Args:
        space (Subspace or FiniteMetricSpace): X.
        pieces (list): Subspaces X_i.
        core (Subspace): Y.
        r: The challenge.

    Returns:
        DecompositionStep: part0 = the X_i minus Y, part1 = (Y,).

    Raises:
        DecompositionError: COVER_VIOLATION or R_DISJOINT_VIOLATION.
    """
    member = space if isinstance(space, Subspace) else space.whole()
    ambient = member.ambient
    core_set = set(core.indices)
    trimmed = [Subspace(ambient, set(p.indices) - core_set) for p in pieces]
    trimmed = [p for p in trimmed if len(p)]
    covered = core_set.union(*(set(p.indices) for p in trimmed))
    if covered != set(member.indices):
        raise DecompositionError(COVER_VIOLATION, "the core and the pieces do not cover the space exactly")
    close = first_close_pair(ambient, trimmed, r)
    if close is not None:
        a, b, _, _, distance = close
        raise DecompositionError(R_DISJOINT_VIOLATION,
                                 f"pieces {a} and {b} are {format_rational(distance)} apart, "
                                 f"below r = {format_rational(to_rational(r))}")
    return DecompositionStep(member, r, tuple(trimmed), (core,) if len(core) else ())
