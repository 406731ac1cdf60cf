# coarsedecomp/matrices.py

"""
matrices.py

Invertible matrices over the catalog fields and the length functions they
carry:

    l(g) = log max_ij {gamma(g_ij), gamma(g^ij)}      (discrete norms)
    l(g) = log max {||g||, ||g^-1||}                   (archimedean norms)

together with the dilation automorphism of the upper unipotent group, the
level of a unipotent matrix in the filtration U_0 c U_1 c ..., the diagonal
length formula and an exhaustive check of the nesting
B(1, k log gamma(theta)) c U_k c B(1, k(n-1) log gamma(theta)).

Classes:
    MatrixOverRing: Square matrix with an exact cached inverse.
    NestingReport: Result of verify_nesting.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import POWER_MAX_ITERATIONS, POWER_TOLERANCE
from .errors import NormError
from .interval import log_interval
from .norms import DegreeNorm
from .rings import Domain, Poly, RationalFunction, as_field_element, is_zero

logger = logging.getLogger(__name__)


class MatrixOverRing:
    """
    An n x n matrix with entries in Q or a rational function field.

    Attributes:
        rows (tuple): Tuple of row tuples of field elements.
        n (int): Size.
    """

    __slots__ = ("rows", "n", "_inverse", "_hash")

    def __init__(self, rows):
        rows = [list(row) for row in rows]
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise NormError("SINGULAR_MATRIX", "matrices must be square")
        like = next((v for row in rows for v in row if isinstance(v, (Poly, RationalFunction))), None)
        self.rows = tuple(tuple(as_field_element(v, like) for v in row) for row in rows)
        self.n = n
        self._inverse = None
        self._hash = None

    @classmethod
    def identity(cls, n, like=None):
        """The n x n identity, over the field of ``like``."""
        return cls([[as_field_element(int(i == j), like) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries):
        """diag(entries)."""
        entries = list(entries)
        like = next((v for v in entries if isinstance(v, (Poly, RationalFunction))), None)
        zero = as_field_element(0, like)
        return cls([[entries[i] if i == j else zero for j in range(len(entries))]
                    for i in range(len(entries))])

    def __getitem__(self, key):
        i, j = key
        return self.rows[i][j]

    def entries(self):
        """Yields (i, j, value) for every entry."""
        for i, row in enumerate(self.rows):
            for j, value in enumerate(row):
                yield i, j, value

    def __mul__(self, other):
        if not isinstance(other, MatrixOverRing):
            return NotImplemented
        if other.n != self.n:
            raise NormError("DOMAIN_MISMATCH", f"cannot multiply {self.n}x{self.n} by {other.n}x{other.n}")
        n = self.n
        columns = list(zip(*other.rows))
        rows = []
        for row in self.rows:
            out = []
            for col in columns:
                total = None
                for a, b in zip(row, col):
                    if is_zero(a) or is_zero(b):
                        continue
                    term = a * b
                    total = term if total is None else total + term
                out.append(total if total is not None else row[0] * 0)
            rows.append(out)
        result = MatrixOverRing.__new__(MatrixOverRing)
        result.rows = tuple(tuple(r) for r in rows)
        result.n = n
        result._inverse = None
        result._hash = None
        return result

    def __eq__(self, other):
        if not isinstance(other, MatrixOverRing):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        body = "; ".join(", ".join(str(v) for v in row) for row in self.rows)
        return f"MatrixOverRing([{body}])"

    def is_upper_triangular(self):
        """True if every entry below the diagonal is zero."""
        return all(is_zero(v) for i, j, v in self.entries() if i > j)

    def is_unipotent_upper(self):
        """True if upper triangular with ones on the diagonal."""
        return self.is_upper_triangular() and all(self.rows[i][i] == 1 for i in range(self.n))

    def inverse(self):
        """
        Exact inverse over the fraction field, cached.

        Raises:
            NormError: SINGULAR_MATRIX if the matrix is not invertible.
        """
        if self._inverse is None:
            if self.is_unipotent_upper():
                self._inverse = self._unipotent_inverse()
            else:
                self._inverse = self._gauss_jordan_inverse()
            self._inverse._inverse = self
        return self._inverse

    def _unipotent_inverse(self):
        n = self.n
        zero = self.rows[0][0] * 0
        one = self.rows[0][0]
        inv = [[one if i == j else zero for j in range(n)] for i in range(n)]
        for j in range(n):
            for i in range(j - 1, -1, -1):
                total = zero
                for m in range(i + 1, j + 1):
                    if not is_zero(self.rows[i][m]) and not is_zero(inv[m][j]):
                        total = total + self.rows[i][m] * inv[m][j]
                inv[i][j] = -total
        return MatrixOverRing(inv)

    def _gauss_jordan_inverse(self):
        n = self.n
        like = next((v for _, _, v in self.entries() if isinstance(v, RationalFunction)), None)
        one = as_field_element(1, like)
        zero = one * 0
        work = [list(row) + [one if i == j else zero for j in range(n)]
                for i, row in enumerate(self.rows)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if not is_zero(work[r][col])), None)
            if pivot is None:
                raise NormError("SINGULAR_MATRIX", f"{self!r} is not invertible")
            work[col], work[pivot] = work[pivot], work[col]
            lead = work[col][col]
            work[col] = [v / lead for v in work[col]]
            for r in range(n):
                if r != col and not is_zero(work[r][col]):
                    factor = work[r][col]
                    work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
        return MatrixOverRing([row[n:] for row in work])

    def diagonal_part(self):
        """
        The diagonal projection of an upper triangular matrix.

        Raises:
            NormError: DOMAIN_MISMATCH if the matrix is not upper triangular.
        """
        if not self.is_upper_triangular():
            raise NormError("DOMAIN_MISMATCH", "diagonal projection needs an upper triangular matrix")
        return MatrixOverRing.diagonal(self.rows[i][i] for i in range(self.n))


def _max_exponent(norm, matrix):
    best = None
    for _, _, value in matrix.entries():
        if is_zero(value):
            continue
        exponent = norm(value).exponent
        if best is None or exponent > best:
            best = exponent
    return best


def _to_float_matrix(norm, g):
    values = np.empty((g.n, g.n), dtype=float)
    for i, j, v in g.entries():
        values[i, j] = 0.0 if is_zero(v) else float(
            v.evaluate(norm.t) if isinstance(v, RationalFunction) else v)
    return values


def _spectral_bounds(matrix, tolerance, max_iterations):
    """
    Bounds on the squared largest singular value of a real matrix.

    The lower bound is the Rayleigh quotient of the power iteration on the
    Gram matrix. The upper bound is the SVD norm widened by its backward
    error, clamped by the Frobenius and induced 1/inf bounds. Iteration
    stops once the two agree to ``tolerance`` relative to max(1, upper).
    """
    n = matrix.shape[0]
    eps = np.finfo(float).eps
    gram = matrix.T @ matrix
    widen = 1 + 4 * n * n * eps
    frobenius = float((matrix ** 2).sum())
    induced = float(np.abs(matrix).sum(axis=0).max() * np.abs(matrix).sum(axis=1).max())
    # rounding in the SVD and in the Gram products is below this
    slack = 8 * n * eps * math.sqrt(frobenius)
    top = float(np.linalg.norm(matrix, 2)) + slack
    upper = math.nextafter(min(top * top, frobenius * widen, induced * widen), math.inf)
    rayleigh_slack = slack * math.sqrt(frobenius)

    rng = np.random.default_rng(0)
    vector = rng.standard_normal(matrix.shape[1])
    vector /= np.linalg.norm(vector)
    estimate = 0.0
    for _ in range(max_iterations):
        image = gram @ vector
        size = np.linalg.norm(image)
        if size == 0:
            break
        vector = image / size
        estimate = float(vector @ gram @ vector)
        if upper - (estimate - rayleigh_slack) <= tolerance * max(1.0, upper):
            break
    else:
        logger.debug("Power iteration hit %d steps; gap %.3g", max_iterations, upper - estimate)
    lower = max(math.nextafter(estimate - rayleigh_slack, 0.0), 0.0)
    return lower, max(upper, lower)


def length_gl(norm, g, tolerance=POWER_TOLERANCE, max_iterations=POWER_MAX_ITERATIONS):
    """
    The length of g in GL(n, K) induced by one norm.

    Args:
        norm (Norm): Discrete norm, or an EvalNorm for the archimedean case.
        g (MatrixOverRing): Invertible matrix.
        tolerance (float): Power-iteration tolerance (archimedean only).
        max_iterations (int): Power-iteration cap (archimedean only).

    Returns:
        Fraction for discrete norms: max entry exponent of g and g^-1,
        clamped at 0, times the norm scale. Interval for archimedean norms:
        an enclosure of log max(||g||, ||g^-1||) with the operator 2-norm.

    Raises:
        NormError: SINGULAR_MATRIX if g is not invertible.
    """
    inverse = g.inverse()
    if norm.discrete:
        exponent = max(_max_exponent(norm, g) or 0, _max_exponent(norm, inverse) or 0, 0)
        return Fraction(exponent) * norm.scale
    bounds = []
    for matrix in (g, inverse):
        lower, upper = _spectral_bounds(_to_float_matrix(norm, matrix), tolerance, max_iterations)
        bounds.append(log_interval(max(lower, 1e-300), upper).scale(Fraction(1, 2)))
    length = bounds[0].max(bounds[1]).clamp_below(0)
    return length.scale(norm.scale)


def combined_length(norms, g):
    """
    The sum of the per-norm lengths of g over a list of discrete norms.

    This is the metric put on matrix-group balls.
    """
    return sum((length_gl(norm, g) for norm in norms), Fraction(0))


def dilation(theta, u):
    """
    The automorphism Theta(u)_ij = theta^(j - i) u_ij of the upper unipotent group.

    Args:
        theta: Nonzero field element.
        u (MatrixOverRing): Unipotent upper triangular matrix.

    Returns:
        MatrixOverRing: The dilated matrix.

    Raises:
        NormError: NOT_UNIPOTENT if u is not unipotent upper triangular.
    """
    if not u.is_unipotent_upper():
        raise NormError("NOT_UNIPOTENT", f"{u!r} is not unipotent upper triangular")
    theta = as_field_element(theta, u.rows[0][0])
    if is_zero(theta):
        raise NormError("DOMAIN_MISMATCH", "theta must be nonzero")
    powers = [as_field_element(1, theta)]
    for _ in range(1, u.n):
        powers.append(powers[-1] * theta)
    return MatrixOverRing([[u.rows[i][j] * powers[j - i] if j > i else u.rows[i][j]
                            for j in range(u.n)] for i in range(u.n)])


def theta_exponent(theta, norm):
    """The exponent e(theta) of an expanding element; raises THETA_NOT_EXPANDING otherwise."""
    value = norm(theta)
    if value.is_zero or value.exponent <= 0:
        raise NormError("THETA_NOT_EXPANDING", f"gamma({theta}) must exceed 1")
    return value.exponent


def unipotent_level(u, theta, norm):
    """
    The smallest k >= 0 with u in U_k = Theta^k(U_0).

    U_0 holds the unipotent matrices of length 0, so the level is the largest
    ceil(e(u_ij) / ((j - i) e(theta))) over the superdiagonal entries of u and
    u^-1, clamped at 0.

    Raises:
        NormError: NOT_UNIPOTENT, THETA_NOT_EXPANDING.
    """
    if not u.is_unipotent_upper():
        raise NormError("NOT_UNIPOTENT", f"{u!r} is not unipotent upper triangular")
    step = theta_exponent(theta, norm)
    level = 0
    for matrix in (u, u.inverse()):
        for i, j, value in matrix.entries():
            if j > i and not is_zero(value):
                level = max(level, -(-norm(value).exponent // ((j - i) * step)))
    return level


def diagonal_length(norm, exponents, uniformizer=None):
    """
    The length of diag(pi^k_1, ..., pi^k_n): max |k_i| times |e(pi)| times the scale.

    Args:
        norm (Norm): Discrete norm.
        exponents (iterable): The k_i.
        uniformizer: Optional element pi; its exponent replaces the default 1.
    """
    unit = abs(norm(uniformizer).exponent) if uniformizer is not None else norm.uniformizer_exponent()
    return Fraction(max((abs(int(k)) for k in exponents), default=0) * unit) * norm.scale


def unipotent_generators(n, values, like=None):
    """
    Elementary unipotent matrices E_ij(x) = 1 + x e_ij for i < j and every value x.

    Args:
        n (int): Size.
        values (iterable): Field elements placed above the diagonal.
        like: Field element fixing the field of the identity entries.

    Returns:
        list: The matrices, ordered by (i, j) then value order.
    """
    values = list(values)
    like = like if like is not None else next(iter(values), None)
    one = as_field_element(1, like)
    zero = one * 0
    result = []
    for i, j in itertools.combinations(range(n), 2):
        for value in values:
            rows = [[one if a == b else zero for b in range(n)] for a in range(n)]
            rows[i][j] = as_field_element(value, like)
            result.append(MatrixOverRing(rows))
    return result


def wreath_matrix(n, p):
    """
    The element (X^n, p; 0, X^-n) of SL(2, Z[X, X^-1]) realising Z wr Z.

    Args:
        n (int): Cursor position.
        p: Laurent polynomial over Q (integer coefficients) in the corner.
    """
    x = Poly.variable(0, Domain(0), 1)
    return MatrixOverRing([[x ** n, p], [0, x ** -n]])


def wreath_generators():
    """The generators t = diag(X, X^-1) and a = (1, 1; 0, 1) of Z wr Z."""
    return [wreath_matrix(1, 0), wreath_matrix(0, 1)]


@dataclass
class NestingReport:
    """
    Result of verify_nesting.

    Attributes:
        n (int): Matrix size.
        max_degree (int): Entry degree bound.
        checked (int): Number of matrices examined.
        violations (list): (entries, level, length) for every failure.
    """

    n: int
    max_degree: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def holds(self):
        """True if no violation was found."""
        return not self.violations


def _polynomials(max_degree, q):
    domain = Domain(q)
    polys = []
    for coeffs in itertools.product(range(q), repeat=max_degree + 1):
        polys.append(Poly({(e,): c for e, c in enumerate(coeffs)}, domain, 1))
    return polys


def _ceil_div(a, b):
    return -(-a // b)


def verify_nesting(n, max_degree, q=2, theta=None, norm=None):
    """
    Checks B(1, k e) c U_k c B(1, k (n - 1) e) for every unipotent n x n matrix
    over F_q(X) whose superdiagonal entries are polynomials of degree <= max_degree.

    In exponent units with e = e(theta), the left inclusion says
    level(u) <= ceil(l(u) / e) and the right one says l(u) <= level(u) (n - 1) e.

    Args:
        n (int): 2 or more.
        max_degree (int): Entry degree bound.
        q (int): Prime field size.
        theta: Expanding element; default X.
        norm (Norm): Discrete norm; default the degree norm.

    Returns:
        NestingReport: Count and violations.
    """
    norm = norm or DegreeNorm()
    x = Poly.variable(0, Domain(q), 1)
    theta = theta if theta is not None else x
    step = theta_exponent(theta, norm)
    polys = _polynomials(max_degree, q)
    exponents = [None if p.is_zero() else norm(p).exponent for p in polys]
    report = NestingReport(n, max_degree)

    def record(entries, level, length):
        report.checked += 1
        if level > _ceil_div(length, step) or length > level * (n - 1) * step:
            report.violations.append((entries, level, length))

    if n == 2:
        for p, e in zip(polys, exponents):
            top = 0 if e is None else max(e, 0)
            level = 0 if e is None else max(0, _ceil_div(e, step))
            record((str(p),), level, top)
    elif n == 3:
        for (a, ea), (c, ec) in itertools.product(zip(polys, exponents), repeat=2):
            ac = a * c
            eac = None if ac.is_zero() else norm(ac).exponent
            near = [e for e in (ea, ec) if e is not None]
            for b, eb in zip(polys, exponents):
                if eb is None or eac is None or eb != eac:
                    corner = max((v for v in (eb, eac) if v is not None), default=None)
                else:
                    difference = ac - b
                    corner = None if difference.is_zero() else norm(difference).exponent
                far = [v for v in (eb, corner) if v is not None]
                length = max([0] + near + far)
                level = max([0] + [_ceil_div(v, step) for v in near]
                            + [_ceil_div(v, 2 * step) for v in far])
                record((str(a), str(b), str(c)), level, length)
    else:
        pairs = list(itertools.combinations(range(n), 2))
        for choice in itertools.product(polys, repeat=len(pairs)):
            rows = [[x ** 0 if i == j else x * 0 for j in range(n)] for i in range(n)]
            for (i, j), value in zip(pairs, choice):
                rows[i][j] = value
            u = MatrixOverRing(rows)
            record(tuple(str(v) for v in choice), unipotent_level(u, theta, norm),
                   int(length_gl(norm, u) / norm.scale))
    logger.info("Nesting check n=%d degree<=%d: %d matrices, %d violations",
                n, max_degree, report.checked, len(report.violations))
    return report
