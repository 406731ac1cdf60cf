# coarsedecomp/rings.py

"""
rings.py

Exact arithmetic for the coefficient rings used by the norm and matrix
modules: (Laurent) polynomials in several variables over F_p or Q, rational
functions, and the catalog of rings whose norm balls can be enumerated.

Polynomials keep a dict from exponent tuples to coefficients; exponents may
be negative, which is how Laurent polynomials are represented. Coefficients
are ints reduced mod p in characteristic p and Fractions in characteristic 0
(integer-coefficient rings are the characteristic-0 case restricted by the
ring spec).

Classes:
    Domain: Coefficient field F_p or Q.
    Poly: Sparse multivariate Laurent polynomial.
    RationalFunction: Quotient of two polynomials in canonical form.
    RingSpec: One of the catalog rings (F_p[X..], F_p[X, X^-1], Z[X], Z[1/n], Q).
"""

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NormError

VARIABLE_NAMES = ("X", "Y", "Z", "W")


def variable_names(nvars):
    """Returns the printed names of the first ``nvars`` variables."""
    if nvars <= len(VARIABLE_NAMES):
        return VARIABLE_NAMES[:nvars]
    return tuple(f"X{i + 1}" for i in range(nvars))


def _is_prime(n):
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def prime_factors(n):
    """Returns the sorted distinct prime factors of a positive integer."""
    n = abs(int(n))
    factors = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            factors.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        factors.append(n)
    return factors


@dataclass(frozen=True)
class Domain:
    """
    A coefficient field: F_p for a prime p, or Q for characteristic 0.

    Attributes:
        characteristic (int): 0 or a prime.
    """

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or (p > 0 and not _is_prime(p)):
            raise NormError("DOMAIN_MISMATCH",
                            f"coefficient characteristic must be 0 or a prime, got {p}")

    @property
    def name(self):
        """'Q' or 'F<p>'."""
        return f"F{self.characteristic}" if self.characteristic else "Q"

    def coerce(self, value):
        """Maps an int or Fraction into the field."""
        p = self.characteristic
        if p:
            if isinstance(value, Fraction):
                return (value.numerator * pow(value.denominator, -1, p)) % p
            return int(value) % p
        return Fraction(value)

    def inverse(self, value):
        """Returns the multiplicative inverse of a nonzero field element."""
        if not value:
            raise ZeroDivisionError("zero has no inverse")
        if self.characteristic:
            return pow(int(value), -1, self.characteristic)
        return 1 / Fraction(value)


class Poly:
    """
    A sparse Laurent polynomial in ``nvars`` variables over a Domain.

    Attributes:
        terms (dict): Exponent tuple -> nonzero coefficient.
        domain (Domain): Coefficient field.
        nvars (int): Number of variables.
    """

    __slots__ = ("terms", "domain", "nvars", "_hash")

    def __init__(self, terms=None, domain=Domain(0), nvars=1):
        clean = {}
        for exps, coeff in (terms or {}).items():
            if isinstance(exps, int):
                exps = (exps,)
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise NormError("DOMAIN_MISMATCH",
                                f"exponent {exps} does not have {nvars} entries")
            clean[exps] = clean.get(exps, 0) + domain.coerce(coeff)
        self.terms = {e: domain.coerce(c) for e, c in clean.items() if domain.coerce(c)}
        self.domain = domain
        self.nvars = nvars
        self._hash = None

    @classmethod
    def _raw(cls, terms, domain, nvars):
        poly = cls.__new__(cls)
        poly.terms = terms
        poly.domain = domain
        poly.nvars = nvars
        poly._hash = None
        return poly

    @classmethod
    def constant(cls, value, domain=Domain(0), nvars=1):
        """Returns the constant polynomial ``value``."""
        return cls({(0,) * nvars: value}, domain, nvars)

    @classmethod
    def monomial(cls, exps, coeff=1, domain=Domain(0), nvars=None):
        """Returns coeff * X^exps."""
        if isinstance(exps, int):
            exps = (exps,)
        return cls({tuple(exps): coeff}, domain, nvars or len(exps))

    @classmethod
    def variable(cls, index=0, domain=Domain(0), nvars=1):
        """Returns the polynomial X_index."""
        exps = [0] * nvars
        exps[index] = 1
        return cls({tuple(exps): 1}, domain, nvars)

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.domain != self.domain or other.nvars != self.nvars:
                raise NormError("DOMAIN_MISMATCH",
                                f"cannot combine polynomials over {self.domain.name}[{self.nvars}] "
                                f"and {other.domain.name}[{other.nvars}]")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(other, self.domain, self.nvars)
        return NotImplemented

    def is_zero(self):
        """True for the zero polynomial."""
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        """True if only the exponent (0, ..., 0) occurs."""
        return all(not any(e) for e in self.terms)

    def is_monomial(self):
        """True if exactly one term is present."""
        return len(self.terms) == 1

    def constant_term(self):
        """Returns the coefficient of X^0."""
        return self.terms.get((0,) * self.nvars, self.domain.coerce(0))

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.domain.characteristic
        terms = dict(self.terms)
        for e, c in other.terms.items():
            value = terms.get(e, 0) + c
            if p:
                value %= p
            if value:
                terms[e] = value
            else:
                terms.pop(e, None)
        return Poly._raw(terms, self.domain, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        p = self.domain.characteristic
        return Poly._raw({e: (-c) % p if p else -c for e, c in self.terms.items()},
                         self.domain, self.nvars)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.domain.characteristic
        terms = {}
        if self.nvars == 1:
            for (e1,), c1 in self.terms.items():
                for (e2,), c2 in other.terms.items():
                    key = (e1 + e2,)
                    terms[key] = terms.get(key, 0) + c1 * c2
        else:
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    key = tuple(a + b for a, b in zip(e1, e2))
                    terms[key] = terms.get(key, 0) + c1 * c2
        if p:
            terms = {e: c % p for e, c in terms.items() if c % p}
        else:
            terms = {e: c for e, c in terms.items() if c}
        return Poly._raw(terms, self.domain, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            if self.is_monomial():
                (exps, coeff), = self.terms.items()
                inv = self.domain.inverse(coeff)
                return Poly({tuple(-e * -k for e in exps): inv ** -k}, self.domain, self.nvars)
            return RationalFunction(self.one(), self ** -k)
        result = self.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * self.domain.inverse(self.domain.coerce(other))
        return RationalFunction(self) / other

    def __rtruediv__(self, other):
        return RationalFunction(self._lift(other)) / self

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        try:
            other = self._lift(other)
        except NormError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_term())
            else:
                self._hash = hash((frozenset(self.terms.items()), self.nvars,
                                   self.domain.characteristic))
        return self._hash

    def one(self):
        """Returns the constant 1 of the same ring."""
        return Poly.constant(1, self.domain, self.nvars)

    def zero(self):
        """Returns the zero polynomial of the same ring."""
        return Poly._raw({}, self.domain, self.nvars)

    def degree(self, var=0):
        """Largest exponent of variable ``var``; None for the zero polynomial."""
        if not self.terms:
            return None
        return max(e[var] for e in self.terms)

    def order(self, var=0):
        """Smallest exponent of variable ``var``; None for the zero polynomial."""
        if not self.terms:
            return None
        return min(e[var] for e in self.terms)

    def shift(self, exps):
        """Multiplies by the monomial X^exps."""
        exps = tuple(exps)
        return Poly._raw({tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()},
                         self.domain, self.nvars)

    def leading_exponents(self):
        """Lexicographically largest exponent tuple."""
        return max(self.terms)

    def monic(self):
        """Divides by the coefficient of the lexicographically leading term."""
        lead = self.terms[self.leading_exponents()]
        return self * self.domain.inverse(lead)

    def coefficients(self):
        """The nonzero coefficients, in exponent order."""
        return [self.terms[e] for e in sorted(self.terms)]

    def evaluate(self, point):
        """
        Evaluates at a rational point (characteristic 0 only).

        Args:
            point (tuple): One rational per variable.

        Returns:
            Fraction: The value.
        """
        if self.domain.characteristic:
            raise NormError("DOMAIN_MISMATCH", "evaluation needs characteristic 0 coefficients")
        point = tuple(Fraction(t) for t in point)
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            value = Fraction(coeff)
            for t, e in zip(point, exps):
                value *= t ** e
            total += value
        return total

    def sort_key(self):
        """A total order key used to list elements deterministically."""
        return (len(self.terms), sorted(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        names = variable_names(self.nvars)
        parts = []
        for exps in sorted(self.terms, reverse=True):
            coeff = self.terms[exps]
            factors = []
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            negative = not self.domain.characteristic and coeff < 0
            magnitude = -coeff if negative else coeff
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)
            parts.append(("- " if negative else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self):
        return f"Poly({self}, {self.domain.name})"


def poly_divmod(a, b):
    """
    Long division of univariate polynomials with nonnegative exponents.

    Returns:
        tuple: (quotient, remainder) with deg(remainder) < deg(b).
    """
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    domain = a.domain
    p = domain.characteristic
    remainder = dict(a.terms)
    quotient = {}
    db = b.degree()
    lead_inv = domain.inverse(b.terms[(db,)])
    while remainder:
        dr = max(e for (e,) in remainder)
        if dr < db:
            break
        factor = remainder[(dr,)] * lead_inv
        if p:
            factor %= p
        shift = dr - db
        quotient[(shift,)] = factor
        for (e,), c in b.terms.items():
            key = (e + shift,)
            value = remainder.get(key, 0) - factor * c
            if p:
                value %= p
            if value:
                remainder[key] = value
            else:
                remainder.pop(key, None)
    return Poly._raw(quotient, domain, 1), Poly._raw(remainder, domain, 1)


def poly_gcd(a, b):
    """Monic greatest common divisor of univariate polynomials."""
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    if a.is_zero():
        return a
    return a.monic()


class RationalFunction:
    """
    A quotient num/den of polynomials in canonical form.

    Denominators that are monomials are folded into the numerator, so Laurent
    polynomials always have den == 1. Univariate quotients are fully reduced
    with a monic denominator; multivariate quotients only cancel common
    monomials and normalize the leading coefficient.

    Attributes:
        num (Poly): Numerator.
        den (Poly): Denominator.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        if isinstance(num, RationalFunction):
            if den is None:
                self.num, self.den, self._hash = num.num, num.den, None
                return
            num, den = num.num * den.den, num.den * den.num
        if den is None:
            den = num.one()
        elif isinstance(den, (int, Fraction)):
            den = Poly.constant(den, num.domain, num.nvars)
        self.num, self.den = _canonical(num, den)
        self._hash = None

    @classmethod
    def _laurent(cls, num):
        rf = cls.__new__(cls)
        rf.num, rf.den, rf._hash = num, num.one(), None
        return rf

    @property
    def domain(self):
        """Coefficient field."""
        return self.num.domain

    @property
    def nvars(self):
        """Number of variables."""
        return self.num.nvars

    def is_zero(self):
        """True for the zero function."""
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_laurent(self):
        """True if the denominator is 1."""
        return self.den.is_constant() and self.den.constant_term() == 1

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction._laurent(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction._laurent(Poly.constant(other, self.domain, self.nvars))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_laurent() and other.is_laurent():
            return RationalFunction._laurent(self.num + other.num)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        rf = RationalFunction.__new__(RationalFunction)
        rf.num, rf.den, rf._hash = -self.num, self.den, None
        return rf

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_laurent() and other.is_laurent():
            return RationalFunction._laurent(self.num * other.num)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        """Returns 1/self."""
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** -k
        if self.is_laurent():
            return RationalFunction._laurent(self.num ** k)
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        try:
            other = self._lift(other)
        except NormError:
            return False
        if other is NotImplemented:
            return NotImplemented
        if self.domain != other.domain or self.nvars != other.nvars:
            return False
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.num) if self.is_laurent() else hash((self.num, self.den))
        return self._hash

    def degree(self, var=0):
        """deg(num) - deg(den) in variable ``var``; None for zero."""
        if self.is_zero():
            return None
        return self.num.degree(var) - self.den.degree(var)

    def order(self, var=0):
        """ord(num) - ord(den) in variable ``var``; None for zero."""
        if self.is_zero():
            return None
        return self.num.order(var) - self.den.order(var)

    def evaluate(self, point):
        """Evaluates at a rational point; raises ZeroDivisionError at a pole."""
        den = self.den.evaluate(point)
        if den == 0:
            raise ZeroDivisionError(f"{self} has a pole at {point}")
        return self.num.evaluate(point) / den

    def sort_key(self):
        """A total order key used to list elements deterministically."""
        return (self.num.sort_key(), self.den.sort_key())

    def __str__(self):
        if self.is_laurent():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self}, {self.domain.name})"


def _canonical(num, den):
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return num.zero(), num.one()
    if den.is_monomial():
        (exps, coeff), = den.terms.items()
        return num.shift(tuple(-e for e in exps)) * num.domain.inverse(coeff), num.one()
    lows = tuple(min(min(e[i] for e in num.terms), min(e[i] for e in den.terms))
                 for i in range(num.nvars))
    num = num.shift(tuple(-e for e in lows))
    den = den.shift(tuple(-e for e in lows))
    if num.nvars == 1:
        common = poly_gcd(num, den)
        if not common.is_constant():
            num = poly_divmod(num, common)[0]
            den = poly_divmod(den, common)[0]
    lead_inv = den.domain.inverse(den.terms[den.leading_exponents()])
    num, den = num * lead_inv, den * lead_inv
    if den.is_monomial():
        (exps, _), = den.terms.items()
        return num.shift(tuple(-e for e in exps)), num.one()
    return num, den


def is_zero(value):
    """True if a field element (number, Poly or RationalFunction) is zero."""
    if isinstance(value, (Poly, RationalFunction)):
        return value.is_zero()
    return value == 0


def as_field_element(value, like=None):
    """
    Lifts a ring element into its fraction field.

    Args:
        value: int, Fraction, Poly or RationalFunction.
        like: An element fixing the field for plain numbers.

    Returns:
        Fraction or RationalFunction: The field element.
    """
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Poly):
        return RationalFunction._laurent(value)
    if isinstance(like, (Poly, RationalFunction)):
        domain, nvars = like.domain, like.nvars
        return RationalFunction._laurent(Poly.constant(value, domain, nvars))
    return Fraction(value)


_RING_PATTERN = re.compile(
    r"^(?:f(?P<p>\d+)x(?P<m>\d*)(?P<laurent>_laurent)?|(?P<zx>z|q)x|z\[?1/(?P<n>\d+)\]?|(?P<q>q))$")


@dataclass(frozen=True)
class RingSpec:
    """
    One of the catalog rings.

    Attributes:
        kind (str): "poly", "laurent", "localized" (Z[1/n]) or "rationals".
        characteristic (int): 0 or a prime p.
        nvars (int): Number of polynomial variables.
        inverted (int): n for Z[1/n].
        integral (bool): Coefficients restricted to Z (characteristic 0 polys).
    """

    kind: str
    characteristic: int = 0
    nvars: int = 1
    inverted: int = 1
    integral: bool = False

    @classmethod
    def parse(cls, text):
        """
        Parses names such as "f2x", "f3x2", "f2x_laurent", "zx", "qx", "z[1/6]", "q".

        Raises:
            NormError: DOMAIN_MISMATCH for unknown names.
        """
        match = _RING_PATTERN.match(text.strip().lower())
        if not match:
            raise NormError("DOMAIN_MISMATCH", f"unknown ring '{text}'")
        if match.group("p"):
            kind = "laurent" if match.group("laurent") else "poly"
            nvars = int(match.group("m") or 1)
            Domain(int(match.group("p")))
            return cls(kind, int(match.group("p")), nvars)
        if match.group("zx"):
            return cls("poly", 0, 1, integral=match.group("zx") == "z")
        if match.group("n"):
            return cls("localized", 0, 0, inverted=int(match.group("n")), integral=True)
        return cls("rationals", 0, 0)

    @property
    def domain(self):
        """The coefficient field."""
        return Domain(self.characteristic)

    def variable(self, index=0):
        """Returns the polynomial X_index of this ring."""
        return Poly.variable(index, self.domain, self.nvars)

    def to_json(self):
        """Returns the JSON description of the ring."""
        return {"kind": self.kind, "characteristic": self.characteristic,
                "nvars": self.nvars, "inverted": self.inverted, "integral": self.integral}


def _split_terms(text):
    terms, start, depth = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and i > start and depth == 0 and text[i - 1] not in "^*(":
            terms.append(text[start:i])
            start = i
    terms.append(text[start:])
    return [t for t in terms if t]


def _parse_poly(text, ring):
    names = variable_names(max(ring.nvars, 1))
    domain = ring.domain
    nvars = max(ring.nvars, 1)
    total = Poly._raw({}, domain, nvars)
    for term in _split_terms(text):
        sign = 1
        if term[0] in "+-":
            sign = -1 if term[0] == "-" else 1
            term = term[1:]
        coeff = Fraction(sign)
        exps = [0] * nvars
        for factor in term.split("*"):
            if not factor:
                continue
            name, _, power = factor.partition("^")
            if name in names:
                exps[names.index(name)] += int(power.strip("()")) if power else 1
            else:
                try:
                    coeff *= Fraction(factor)
                except ValueError as e:
                    raise NormError("DOMAIN_MISMATCH",
                                    f"cannot read '{factor}' as a coefficient or variable") from e
        total = total + Poly({tuple(exps): coeff}, domain, nvars)
    return total


def parse_element(text, ring):
    """
    Reads a ring element from text such as "X^2+X+1", "X^-1", "3/7" or "(1)/(X+1)".

    Args:
        text (str): The element.
        ring (RingSpec or str): The ring it belongs to.

    Returns:
        Poly, RationalFunction or Fraction: The element.

    Raises:
        NormError: DOMAIN_MISMATCH if the text cannot be read in this ring.
    """
    if isinstance(ring, str):
        ring = RingSpec.parse(ring)
    text = text.replace(" ", "")
    quotient = re.fullmatch(r"\((.+)\)/\((.+)\)", text)
    if ring.kind in ("localized", "rationals"):
        try:
            return Fraction(text)
        except ValueError as e:
            raise NormError("DOMAIN_MISMATCH", f"'{text}' is not a rational number") from e
    if quotient:
        return RationalFunction(_parse_poly(quotient.group(1), ring),
                                _parse_poly(quotient.group(2), ring))
    return _parse_poly(text, ring)
