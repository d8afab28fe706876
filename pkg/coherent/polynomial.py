# polynomial.py
# Dense univariate polynomials over a scalar backend, and square polynomial matrices
# with a fraction-free determinant.
# Author: The Coherent Pairs Team

import math
from itertools import permutations
from typing import Iterable, List, Sequence, Tuple

from .errors import BackendMismatchError, PreconditionError
from .scalars import EXACT


class Polynomial:
    """
    Dense polynomial stored as ascending coefficients.

    Trailing zero coefficients are stripped on construction, so the zero polynomial has
    no coefficients and degree -1. Instances are immutable.
    """

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs: Iterable = (), field=EXACT):
        values = [field.coerce(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        self.coeffs = tuple(values)
        self.field = field

    @classmethod
    def _trusted(cls, values, field) -> "Polynomial":
        values = list(values)
        while values and values[-1] == 0:
            values.pop()
        poly = cls.__new__(cls)
        poly.coeffs = tuple(values)
        poly.field = field
        return poly

    @classmethod
    def constant(cls, value, field=EXACT) -> "Polynomial":
        return cls([value], field)

    @classmethod
    def x(cls, field=EXACT) -> "Polynomial":
        return cls([0, 1], field)

    @classmethod
    def monomial(cls, n: int, field=EXACT) -> "Polynomial":
        return cls([0] * n + [1], field)

    @classmethod
    def from_strings(cls, values: Sequence[str], field=EXACT) -> "Polynomial":
        return cls([field.coerce(v) for v in values], field)

    # ------------------------------------------------------------------
    # Shape
    # ------------------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coefficient(self, j: int):
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return self.field.zero

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.field != self.field:
                raise BackendMismatchError(
                    f"polynomials on different backends: {self.field!r} vs {other.field!r}"
                )
            return other
        return Polynomial.constant(other, self.field)

    def __add__(self, other):
        other = self._lift(other)
        size = max(len(self.coeffs), len(other.coeffs))
        zero = self.field.zero
        values = [
            (self.coeffs[i] if i < len(self.coeffs) else zero)
            + (other.coeffs[i] if i < len(other.coeffs) else zero)
            for i in range(size)
        ]
        return Polynomial._trusted(values, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._trusted([-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return Polynomial._trusted([], self.field)
        values = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                values[i + j] += a * b
        return Polynomial._trusted(values, self.field)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, factor) -> "Polynomial":
        factor = self.field.coerce(factor)
        return Polynomial._trusted([c * factor for c in self.coeffs], self.field)

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise PreconditionError("negative polynomial powers are not polynomials")
        result = Polynomial.constant(1, self.field)
        for _ in range(exponent):
            result = result * self
        return result

    def derivative(self, order: int = 1) -> "Polynomial":
        """Formal derivative of the given order; order > degree gives the zero polynomial."""
        if order < 0:
            raise PreconditionError(f"derivative order must be non-negative, got {order}")
        if order == 0:
            return self
        values = [c * math.perm(j, order) for j, c in enumerate(self.coeffs) if j >= order]
        return Polynomial._trusted(values, self.field)

    def __call__(self, point):
        point = self.field.coerce(point)
        result = self.field.zero
        for c in reversed(self.coeffs):
            result = result * point + c
        return result

    def dilate(self, s, monic: bool = False) -> "Polynomial":
        """
        Returns x -> p(s x), or x -> s^(-deg p) p(s x) in monic-preserving mode.
        """
        s = self.field.coerce(s)
        if s == 0:
            raise PreconditionError("dilation factor must be nonzero")
        values = []
        power = self.field.one
        for c in self.coeffs:
            values.append(c * power)
            power = power * s
        result = Polynomial._trusted(values, self.field)
        if monic and not result.is_zero():
            result = result.scale(self.field.one / s ** result.degree)
        return result

    def divmod(self, divisor: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        divisor = self._lift(divisor)
        if divisor.is_zero():
            raise PreconditionError("polynomial division by zero")
        remainder = list(self.coeffs)
        quotient = [self.field.zero] * max(0, len(remainder) - divisor.degree)
        lead = divisor.leading
        for shift in range(len(remainder) - len(divisor.coeffs), -1, -1):
            factor = remainder[shift + divisor.degree] / lead
            quotient[shift] = factor
            if factor == 0:
                continue
            for i, c in enumerate(divisor.coeffs):
                remainder[shift + i] -= factor * c
        remainder = remainder[: divisor.degree]
        return Polynomial._trusted(quotient, self.field), Polynomial._trusted(remainder, self.field)

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        """Quotient of a division known to be exact; a nonzero remainder is an error on the exact backend."""
        quotient, remainder = self.divmod(divisor)
        if self.field.is_exact and not remainder.is_zero():
            raise PreconditionError("polynomial division left a remainder")
        return quotient

    # ------------------------------------------------------------------
    # Comparison and serialization
    # ------------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if self.degree <= 0:
                try:
                    return self.coefficient(0) == self.field.coerce(other)
                except BackendMismatchError:
                    return False
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def almost_equal(self, other: "Polynomial") -> bool:
        """Coefficientwise comparison through the backend tolerance."""
        other = self._lift(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return all(self.field.equal(self.coefficient(i), other.coefficient(i)) for i in range(size))

    def to_strings(self) -> List[str]:
        return [self.field.to_text(c) for c in self.coeffs]

    def __repr__(self):
        if self.is_zero():
            return "Polynomial(0)"
        terms = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            text = self.field.to_text(c) if not self.field.is_exact else str(c)
            terms.append(text if j == 0 else f"{text}*x^{j}")
        return "Polynomial(" + " + ".join(terms) + ")"


class PolyMatrix:
    """Rectangular matrix of polynomials over one backend."""

    def __init__(self, rows: Sequence[Sequence[Polynomial]]):
        rows = [tuple(row) for row in rows]
        if not rows or not rows[0]:
            raise PreconditionError("a polynomial matrix needs at least one entry")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise PreconditionError("polynomial matrix rows have different lengths")
        fields = {entry.field for row in rows for entry in row}
        if len(fields) != 1:
            raise BackendMismatchError("polynomial matrix entries live on different backends")
        self.rows = tuple(rows)
        self.field = fields.pop()

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def is_square(self) -> bool:
        nrows, ncols = self.shape
        return nrows == ncols

    def __getitem__(self, key: Tuple[int, int]) -> Polynomial:
        i, j = key
        return self.rows[i][j]

    def with_column(self, j: int, column: Sequence[Polynomial]) -> "PolyMatrix":
        """Copy of the matrix with column j replaced."""
        if len(column) != self.shape[0]:
            raise PreconditionError("replacement column has the wrong length")
        return PolyMatrix([row[:j] + (column[i],) + row[j + 1:] for i, row in enumerate(self.rows)])

    def degree_bound(self) -> int:
        """Sum over rows of the largest entry degree; bounds the determinant degree."""
        return sum(max(entry.degree for entry in row) for row in self.rows)

    def det(self) -> Polynomial:
        """Determinant by Bareiss fraction-free elimination with exact polynomial division."""
        if not self.is_square():
            raise PreconditionError(f"determinant of a non-square {self.shape} matrix")
        dim = self.shape[0]
        if dim == 1:
            return self.rows[0][0]
        if dim == 2:
            return self[0, 0] * self[1, 1] - self[1, 0] * self[0, 1]
        mat = [list(row) for row in self.rows]
        prev_pivot = Polynomial.constant(1, self.field)
        sign = 1
        for k in range(dim - 1):
            pivot_row = k
            while mat[pivot_row][k].is_zero():
                pivot_row += 1
                if pivot_row == dim:
                    return Polynomial([], self.field)
            if pivot_row != k:
                mat[pivot_row], mat[k] = mat[k], mat[pivot_row]
                sign = -sign
            pivot = mat[k][k]
            for i in range(k + 1, dim):
                for j in range(k + 1, dim):
                    num = pivot * mat[i][j] - mat[i][k] * mat[k][j]
                    mat[i][j] = num.exact_div(prev_pivot)
                mat[i][k] = Polynomial([], self.field)
            prev_pivot = pivot
        return mat[dim - 1][dim - 1].scale(sign)

    def cofactor_det(self) -> Polynomial:
        """Leibniz expansion; only for small matrices (used as a cross-check)."""
        if not self.is_square():
            raise PreconditionError(f"determinant of a non-square {self.shape} matrix")
        dim = self.shape[0]
        total = Polynomial([], self.field)
        for perm in permutations(range(dim)):
            inversions = sum(1 for a in range(dim) for b in range(a + 1, dim) if perm[a] > perm[b])
            term = Polynomial.constant(-1 if inversions % 2 else 1, self.field)
            for i, j in enumerate(perm):
                term = term * self.rows[i][j]
            total = total + term
        return total

    def to_strings(self) -> List[List[List[str]]]:
        return [[entry.to_strings() for entry in row] for row in self.rows]
