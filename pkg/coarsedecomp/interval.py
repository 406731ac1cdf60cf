# coarsedecomp/interval.py

"""
interval.py

Closed intervals with exact rational endpoints, used wherever a float
computation (square roots, sines, logarithms, power iteration) has to be reported
with a guaranteed enclosure.

Classes:
    Interval: [lo, hi] with Fraction endpoints.
"""

import math
from dataclasses import dataclass
from fractions import Fraction


def _down(x):
    return Fraction(math.nextafter(x, -math.inf))


def _up(x):
    return Fraction(math.nextafter(x, math.inf))


@dataclass(frozen=True)
class Interval:
    """
    A closed interval [lo, hi] of rationals.

    Attributes:
        lo (Fraction): Lower endpoint.
        hi (Fraction): Upper endpoint.
        estimate (float): Best point estimate inside the interval.
    """

    lo: Fraction
    hi: Fraction
    estimate: float = None

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.estimate is None:
            object.__setattr__(self, "estimate", float((lo + hi) / 2))

    @classmethod
    def exact(cls, value):
        """The degenerate interval [value, value]."""
        return cls(Fraction(value), Fraction(value))

    @classmethod
    def around(cls, value):
        """The smallest float-representable interval one ulp either side of ``value``."""
        return cls(_down(value), _up(value), value)

    def __add__(self, other):
        if not isinstance(other, Interval):
            other = Interval.exact(other)
        return Interval(self.lo + other.lo, self.hi + other.hi, self.estimate + other.estimate)

    __radd__ = __add__

    def scale(self, factor):
        """Multiplies by a nonnegative rational."""
        factor = Fraction(factor)
        if factor < 0:
            raise ValueError("interval scale factor must be nonnegative")
        return Interval(self.lo * factor, self.hi * factor, self.estimate * float(factor))

    def max(self, other):
        """Enclosure of max(x, y) for x in self and y in other."""
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi),
                        max(self.estimate, other.estimate))

    def clamp_below(self, floor=0):
        """Enclosure of max(x, floor)."""
        floor = Fraction(floor)
        return Interval(max(self.lo, floor), max(self.hi, floor), max(self.estimate, float(floor)))

    def __contains__(self, value):
        return self.lo <= Fraction(value) <= self.hi

    @property
    def width(self):
        """hi - lo."""
        return self.hi - self.lo

    @property
    def midpoint(self):
        """(lo + hi) / 2."""
        return (self.lo + self.hi) / 2

    def __str__(self):
        return f"[{float(self.lo):.9g}, {float(self.hi):.9g}]"


def sqrt_interval(value):
    """
    Encloses the square root of a nonnegative rational.

    Perfect squares give a degenerate interval; otherwise the float square
    root is widened until squaring both endpoints brackets ``value`` exactly.

    Args:
        value: Nonnegative int or Fraction.

    Returns:
        Interval: Contains sqrt(value).
    """
    value = Fraction(value)
    if value < 0:
        raise ValueError(f"square root of negative value {value}")
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Interval.exact(Fraction(num, den))
    guess = math.sqrt(value)
    lo, hi = _down(guess), _up(guess)
    while lo > 0 and lo * lo > value:
        lo = _down(float(lo))
    while hi * hi < value:
        hi = _up(float(hi))
    return Interval(max(lo, Fraction(0)), hi, guess)


def sin_interval(angle):
    """
    Encloses the sine of a rational angle.

    The float sine is widened by two ulps each way and by the distance
    between the angle and its float, since |sin'| <= 1.

    Args:
        angle: int or Fraction, in radians.

    Returns:
        Interval: Contains sin(angle), clipped to [-1, 1].
    """
    angle = Fraction(angle)
    approx = float(angle)
    drift = abs(Fraction(approx) - angle)
    value = math.sin(approx)
    lo = _down(float(_down(value))) - drift
    hi = _up(float(_up(value))) + drift
    return Interval(max(lo, Fraction(-1)), min(hi, Fraction(1)), value)


def sqrt_upper(value):
    """Returns a rational upper bound for sqrt(value)."""
    return sqrt_interval(value).hi


def log_interval(lo, hi):
    """
    Encloses log(x) for x in [lo, hi] with lo > 0.

    Returns:
        Interval: Outward-rounded bounds on the logarithm.
    """
    lo_f, hi_f = float(lo), float(hi)
    if lo_f <= 0:
        raise ValueError("logarithm needs a positive lower bound")
    low = math.log(lo_f)
    high = math.log(hi_f)
    return Interval(_down(_down(low)), _up(_up(high)), (low + high) / 2)
