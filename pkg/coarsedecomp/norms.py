# coarsedecomp/norms.py

"""
norms.py

Exact norms on the catalog rings and enumeration of the finite sets

    B_A(k, s) = {a in A : gamma(a) <= e^k for gamma in N_A, |a|_F <= s for F}.

Discrete norm values are kept as integer exponents (gamma = base^exponent)
with a symbolic ZERO for gamma(0); no logarithm is ever taken in a
comparison. Archimedean evaluation norms return exact rational magnitudes.

Classes:
    NormValue: Exponent, exact magnitude, or ZERO.
    Norm: Base class of the norm catalog.
    DegreeNorm, PAdicNorm, OrderAtNorm, GaussNorm, EvalNorm: The catalog.
"""

import itertools
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .config import ENUMERATION_CAP
from .errors import NormError
from .rings import (Domain, Poly, RationalFunction, RingSpec, parse_element, poly_divmod,
                    prime_factors, variable_names)

logger = logging.getLogger(__name__)


@total_ordering
@dataclass(frozen=True)
class NormValue:
    """
    The value of a norm on one element.

    Attributes:
        kind (str): "zero", "discrete" or "archimedean".
        exponent (int): gamma = base^exponent for discrete values.
        magnitude (Fraction): Exact absolute value for archimedean values.
    """

    kind: str
    exponent: int = 0
    magnitude: Fraction = Fraction(0)

    @property
    def is_zero(self):
        """True for gamma(0)."""
        return self.kind == "zero"

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return ZERO
        self._same_kind(other)
        if self.kind == "discrete":
            return NormValue("discrete", self.exponent + other.exponent)
        return NormValue("archimedean", magnitude=self.magnitude * other.magnitude)

    def __lt__(self, other):
        if self.is_zero:
            return not other.is_zero
        if other.is_zero:
            return False
        self._same_kind(other)
        if self.kind == "discrete":
            return self.exponent < other.exponent
        return self.magnitude < other.magnitude

    def _same_kind(self, other):
        if self.kind != other.kind:
            raise NormError("DOMAIN_MISMATCH",
                            f"cannot compare {self.kind} and {other.kind} norm values")

    def at_most(self, k):
        """
        gamma <= e^k, compared in exponent units as exponent <= floor(k).

        Archimedean values compare their magnitude with ``k`` directly.
        """
        if self.is_zero:
            return True
        if self.kind == "discrete":
            return self.exponent <= math.floor(Fraction(k))
        return self.magnitude <= Fraction(k)

    def __str__(self):
        if self.is_zero:
            return "0"
        if self.kind == "discrete":
            return f"e^{self.exponent}"
        return str(self.magnitude)


ZERO = NormValue("zero")


def discrete(exponent):
    """Shorthand for a discrete NormValue."""
    return NormValue("discrete", int(exponent))


def _parts(x):
    """Splits an element into (numerator, denominator) polynomials, or None for numbers."""
    if isinstance(x, RationalFunction):
        return x.num, x.den
    if isinstance(x, Poly):
        return x, None
    return None


def _as_number(x):
    """Returns a rational for numbers and constant polynomials, else None."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, RationalFunction) and x.num.is_constant() and x.den.is_constant():
        if x.domain.characteristic:
            return None
        return Fraction(x.num.constant_term()) / Fraction(x.den.constant_term())
    if isinstance(x, Poly) and x.is_constant() and not x.domain.characteristic:
        return Fraction(x.constant_term())
    return None


def _is_zero(x):
    if isinstance(x, (Poly, RationalFunction)):
        return x.is_zero()
    return x == 0


def padic_valuation(x, p):
    """v_p of a nonzero rational."""
    x = Fraction(x)
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class Norm(ABC):
    """
    A multiplicative norm on a fraction field.

    Subclasses are frozen dataclasses carrying a ``scale`` (the log-base
    factor applied to lengths) and report whether they are discrete.
    """

    discrete = True

    @abstractmethod
    def evaluate(self, x):
        """Returns the NormValue of a ring or field element."""

    def __call__(self, x):
        return self.evaluate(x)

    def uniformizer_exponent(self):
        """|exponent of gamma(pi)| for the uniformizer pi."""
        return 1

    @abstractmethod
    def to_json(self):
        """Returns the JSON description of the norm."""


@dataclass(frozen=True)
class DegreeNorm(Norm):
    """
    gamma(P/Q) = e^(deg P - deg Q) in one variable.

    Attributes:
        var (int): Index of the variable.
        scale (Fraction): Log-base factor.
    """

    var: int = 0
    scale: Fraction = Fraction(1)

    def evaluate(self, x):
        if _is_zero(x):
            return ZERO
        parts = _parts(x)
        if parts is None:
            return discrete(0)
        num, den = parts
        if self.var >= num.nvars:
            raise NormError("DOMAIN_MISMATCH",
                            f"degree in variable {self.var} of an element in {num.nvars} variables")
        exponent = num.degree(self.var) - (den.degree(self.var) if den is not None else 0)
        return discrete(exponent)

    def to_json(self):
        names = variable_names(max(self.var + 1, 1))
        return {"type": "degree", "var": names[self.var]}


@dataclass(frozen=True)
class PAdicNorm(Norm):
    """
    gamma(x) = p^(-v_p(x)) on Q, or on the coefficients of a polynomial via GaussNorm.

    Attributes:
        p (int): The prime.
        scale (Fraction): Log-base factor.
    """

    p: int = 2
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if not prime_factors(self.p) == [self.p]:
            raise NormError("DOMAIN_MISMATCH", f"p-adic norm needs a prime, got {self.p}")

    def evaluate(self, x):
        if _is_zero(x):
            return ZERO
        value = _as_number(x)
        if value is None:
            raise NormError("DOMAIN_MISMATCH",
                            f"the {self.p}-adic norm is defined on rationals, got {x}")
        return discrete(-padic_valuation(value, self.p))

    def to_json(self):
        return {"type": "padic", "p": self.p}


def _order_at(poly, prime):
    """Multiplicity of ``prime`` in a univariate polynomial with arbitrary exponents."""
    low = poly.order()
    if low < 0:
        poly = poly.shift((-low,))
    v = 0
    while True:
        quotient, remainder = poly_divmod(poly, prime)
        if not remainder.is_zero():
            return v
        poly = quotient
        v += 1


@dataclass(frozen=True)
class OrderAtNorm(Norm):
    """
    gamma(x) = e^(-v_Q(x)) for a prime polynomial Q.

    The monomial Q = X_i is handled directly through the order in X_i, which
    also covers Laurent polynomials in several variables.

    Attributes:
        q (Poly): The prime polynomial.
        scale (Fraction): Log-base factor.
    """

    q: Poly = None
    scale: Fraction = Fraction(1)

    def _variable(self):
        if self.q.is_monomial():
            (exps, coeff), = self.q.terms.items()
            if coeff == 1 and sorted(exps)[-1] == 1 and sum(exps) == 1:
                return exps.index(1)
        return None

    def evaluate(self, x):
        if _is_zero(x):
            return ZERO
        parts = _parts(x)
        if parts is None:
            return discrete(0)
        num, den = parts
        var = self._variable()
        if var is not None:
            order = num.order(var) - (den.order(var) if den is not None else 0)
            return discrete(-order)
        if num.nvars != 1:
            raise NormError("DOMAIN_MISMATCH",
                            "order at a non-monomial prime needs a univariate element")
        order = _order_at(num, self.q) - (_order_at(den, self.q) if den is not None else 0)
        return discrete(-order)

    def to_json(self):
        return {"type": "order_at", "q": str(self.q)}


@dataclass(frozen=True)
class GaussNorm(Norm):
    """
    Extension of a norm on the coefficients: gamma(P) = max over coefficients of base(a).

    Attributes:
        base (Norm): Discrete norm applied to each coefficient.
        scale (Fraction): Log-base factor.
    """

    base: Norm = None
    scale: Fraction = Fraction(1)

    def _on_poly(self, poly):
        return max(self.base(c) for c in poly.terms.values())

    def evaluate(self, x):
        if _is_zero(x):
            return ZERO
        parts = _parts(x)
        if parts is None:
            return self.base(x)
        num, den = parts
        value = self._on_poly(num)
        if den is not None:
            value = discrete(value.exponent - self._on_poly(den).exponent)
        return value

    def to_json(self):
        return {"type": "gauss", "base": self.base.to_json()}


@dataclass(frozen=True)
class EvalNorm(Norm):
    """
    |x(t)| at a rational point t.

    Evaluation at a rational point is a seminorm (it vanishes at polynomials
    with a root at t) that stands in for evaluation at a transcendental.

    Attributes:
        t (tuple): One rational per variable.
    """

    t: tuple = (Fraction(0),)
    scale: Fraction = Fraction(1)
    discrete = False

    def evaluate(self, x):
        if _is_zero(x):
            return ZERO
        try:
            if isinstance(x, (Poly, RationalFunction)):
                value = x.evaluate(self.t)
            else:
                value = Fraction(x)
        except ZeroDivisionError as e:
            raise NormError("DOMAIN_MISMATCH", f"{x} has a pole at {self.t}") from e
        return NormValue("archimedean", magnitude=abs(value))

    def to_json(self):
        if len(self.t) == 1:
            return {"type": "eval", "t": str(Fraction(self.t[0]))}
        return {"type": "eval", "t": [str(Fraction(v)) for v in self.t]}


def norm_eval(norm, x):
    """
    Evaluates a norm exactly.

    Args:
        norm (Norm): The norm.
        x: Number, Poly or RationalFunction in the norm's domain.

    Returns:
        NormValue: ZERO for x = 0, otherwise the exponent or magnitude.

    Raises:
        NormError: DOMAIN_MISMATCH if x is outside the norm's domain.
    """
    return norm.evaluate(x)


def norm_from_json(data, ring=None):
    """
    Builds a Norm from its JSON description.

    Args:
        data (dict): {"type": "degree"|"padic"|"order_at"|"gauss"|"eval", ...}.
        ring (RingSpec): Ring used to read polynomial parameters.

    Returns:
        Norm: The norm.
    """
    ring = ring or RingSpec("poly", 0, 1)
    kind = data.get("type")
    scale = Fraction(data.get("scale", 1))
    if kind == "degree":
        var = data.get("var", "X")
        names = variable_names(max(ring.nvars, 1))
        if var not in names:
            raise NormError("DOMAIN_MISMATCH", f"unknown variable '{var}'")
        return DegreeNorm(names.index(var), scale)
    if kind == "padic":
        return PAdicNorm(int(data["p"]), scale)
    if kind == "order_at":
        return OrderAtNorm(parse_element(str(data.get("q", "X")), ring), scale)
    if kind == "gauss":
        return GaussNorm(norm_from_json(data["base"], ring), scale)
    if kind == "eval":
        t = data.get("t", "0")
        t = tuple(Fraction(v) for v in (t if isinstance(t, list) else [t]))
        return EvalNorm(t, scale)
    raise NormError("DOMAIN_MISMATCH", f"unknown norm type '{kind}'")


def _discrete_bound(norms, predicate):
    """Smallest exponent bound among norms satisfying ``predicate``, or None."""
    bounds = [b for norm in norms for b in [predicate(norm)] if b is not None]
    return min(bounds) if bounds else None


def _check_budget(count, budget, what):
    if count > budget:
        raise NormError("ENUMERATION_BUDGET_EXCEEDED",
                        f"{what} has {count} candidates, above the budget of {budget}")


def _vandermonde_bound(points, degree, s):
    """Coefficient bound for integer polynomials of the given degree with |P(t)| <= s at every point."""
    size = degree + 1
    matrix = [[Fraction(t) ** j for j in range(size)] + [Fraction(int(i == r)) for i in range(size)]
              for r, t in enumerate(points[:size])]
    for col in range(size):
        pivot = next(r for r in range(col, size) if matrix[r][col] != 0)
        matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
        lead = matrix[col][col]
        matrix[col] = [v / lead for v in matrix[col]]
        for r in range(size):
            if r != col and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [a - factor * b for a, b in zip(matrix[r], matrix[col])]
    inverse = [row[size:] for row in matrix]
    return math.floor(Fraction(s) * max(sum(abs(v) for v in row) for row in inverse))


def enumerate_ball_ba(ring, norms, k, archimedean=(), s=None, budget=ENUMERATION_CAP):
    """
    Enumerates B_A(k, s) for one of the catalog rings.

    A coefficient box is derived from the discrete constraints (and, for
    Z[X] and Z[1/n], from the archimedean ones); every candidate in the box
    is then filtered by all constraints.

    Args:
        ring (RingSpec or str): F_q[X..], F_q[X, X^-1], Z[X] or Z[1/n].
        norms (list): Discrete norms N_A.
        k: Rational exponent bound; gamma(a) <= e^k means exponent <= floor(k).
        archimedean (list): EvalNorms F.
        s: Bound on every archimedean value.
        budget (int): Cap on the candidate box.

    Returns:
        list: The elements (Poly or Fraction) in a deterministic order.

    Raises:
        NormError: ENUMERATION_BUDGET_EXCEEDED if the constraints do not
            bound the box within ``budget``; DOMAIN_MISMATCH for unsupported rings.
    """
    if isinstance(ring, str):
        ring = RingSpec.parse(ring)
    k = Fraction(k)
    top = math.floor(k)
    archimedean = list(archimedean)
    if archimedean and s is None:
        raise NormError("DOMAIN_MISMATCH", "archimedean constraints need a bound s")
    if ring.kind in ("poly", "laurent"):
        candidates = _polynomial_box(ring, norms, top, archimedean, s, budget)
    elif ring.kind == "localized":
        candidates = _localized_box(ring, norms, top, archimedean, s, budget)
    else:
        raise NormError("DOMAIN_MISMATCH", f"B_A is not enumerable over ring kind '{ring.kind}'")
    result = [a for a in candidates
              if all(norm(a).at_most(k) for norm in norms)
              and all(norm(a).at_most(s) for norm in archimedean)]
    logger.info("B_A(%s, %s) over %s: %d elements", k, s, ring.kind, len(result))
    return result


def _polynomial_box(ring, norms, top, archimedean, s, budget):
    domain = Domain(ring.characteristic)
    nvars = ring.nvars
    highs, lows = [], []
    for var in range(nvars):
        degree_bound = _discrete_bound(
            norms, lambda n: top if isinstance(n, DegreeNorm) and n.var == var else None)
        if degree_bound is None:
            raise NormError("ENUMERATION_BUDGET_EXCEEDED",
                            f"no degree constraint bounds variable {variable_names(nvars)[var]}")
        highs.append(degree_bound)
        if ring.kind == "laurent":
            order_bound = _discrete_bound(
                norms, lambda n: -top if isinstance(n, OrderAtNorm) and n._variable() == var else None)
            if order_bound is None:
                raise NormError("ENUMERATION_BUDGET_EXCEEDED",
                                f"no order constraint bounds negative powers of "
                                f"{variable_names(nvars)[var]}")
            lows.append(order_bound)
        else:
            lows.append(0)
    if any(h < lo for h, lo in zip(highs, lows)):
        return [Poly.constant(0, domain, nvars)]
    exponents = list(itertools.product(*(range(lo, h + 1) for lo, h in zip(lows, highs))))
    if ring.characteristic:
        values = range(ring.characteristic)
    else:
        if len(exponents) and nvars != 1:
            raise NormError("DOMAIN_MISMATCH", "integer polynomial balls are enumerated in one variable")
        if not archimedean or len({n.t for n in archimedean}) < len(exponents):
            raise NormError("ENUMERATION_BUDGET_EXCEEDED",
                            f"integer coefficients need {len(exponents)} distinct evaluation points")
        points = sorted({n.t[0] for n in archimedean})
        bound = _vandermonde_bound(points, highs[0], s)
        values = range(-bound, bound + 1)
    _check_budget(len(values) ** len(exponents), budget, "the coefficient box")
    elements = []
    for coeffs in itertools.product(values, repeat=len(exponents)):
        elements.append(Poly(dict(zip(exponents, coeffs)), domain, nvars))
    elements.sort(key=Poly.sort_key)
    return elements


def _localized_box(ring, norms, top, archimedean, s, budget):
    denominator = 1
    for p in prime_factors(ring.inverted):
        bound = _discrete_bound(norms, lambda n: top if isinstance(n, PAdicNorm) and n.p == p else None)
        if bound is None:
            raise NormError("ENUMERATION_BUDGET_EXCEEDED",
                            f"no {p}-adic constraint bounds the denominators")
        denominator *= p ** max(bound, 0)
    if s is None:
        raise NormError("ENUMERATION_BUDGET_EXCEEDED", "Z[1/n] balls need an archimedean bound")
    reach = math.floor(Fraction(s) * denominator)
    _check_budget(2 * reach + 1, budget, "the numerator range")
    return [Fraction(m, denominator) for m in range(-reach, reach + 1)]
