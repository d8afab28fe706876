# scalars.py
# Scalar backends. Exact rationals use fractions.Fraction; the float backend is an
# mpmath context with its own precision and a comparison tolerance.
# Author: The Coherent Pairs Team

import math
from fractions import Fraction
from numbers import Rational
from typing import Optional

from mpmath.ctx_mp import MPContext

from .errors import BackendMismatchError, PreconditionError


class ExactField:
    """Exact rational arithmetic. Comparisons are exact; there is no tolerance."""

    name = "exact"
    is_exact = True

    def coerce(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, str):
            try:
                return Fraction(value.strip())
            except ValueError as e:
                raise BackendMismatchError(f"not a rational literal: {value!r}") from e
        raise BackendMismatchError(
            f"the exact backend only accepts rationals, got {type(value).__name__} {value!r}"
        )

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def is_zero(self, value, scale=None) -> bool:
        return value == 0

    def equal(self, a, b) -> bool:
        return a == b

    def sqrt(self, value) -> Optional[Fraction]:
        """Exact square root of a non-negative rational, or None when it is irrational."""
        value = self.coerce(value)
        if value < 0:
            return None
        num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if num * num == value.numerator and den * den == value.denominator:
            return Fraction(num, den)
        return None

    def to_text(self, value) -> str:
        value = self.coerce(value)
        return f"{value.numerator}/{value.denominator}"

    def describe(self) -> dict:
        return {"backend": "exact"}

    def __eq__(self, other):
        return isinstance(other, ExactField)

    def __hash__(self):
        return hash("exact")

    def __repr__(self):
        return "ExactField()"


EXACT = ExactField()


class FloatField:
    """
    High-precision binary floats. Every comparison goes through the carried tolerance,
    scaled by a reference magnitude when the caller supplies one.
    """

    name = "float"
    is_exact = False

    def __init__(self, precision_bits: int = 128, tolerance="1e-15"):
        if int(precision_bits) < 16:
            raise PreconditionError(f"precision_bits must be at least 16, got {precision_bits}")
        self.precision_bits = int(precision_bits)
        self.ctx = MPContext()
        self.ctx.prec = self.precision_bits
        self.tolerance_text = str(tolerance)
        self.tolerance = self.coerce(tolerance)
        if self.tolerance < 0:
            raise PreconditionError("tolerance must be non-negative")

    def coerce(self, value):
        if isinstance(value, str):
            text = value.strip()
            if "/" not in text:
                return self.ctx.mpf(text)
            value = Fraction(text)
        if isinstance(value, Rational) and not isinstance(value, int):
            return self.ctx.convert(Fraction(value))
        try:
            return self.ctx.mpf(value)
        except (TypeError, ValueError) as e:
            raise BackendMismatchError(f"cannot convert {value!r} to a float scalar") from e

    @property
    def zero(self):
        return self.ctx.mpf(0)

    @property
    def one(self):
        return self.ctx.mpf(1)

    @property
    def digits(self) -> int:
        return max(1, int(self.precision_bits * math.log10(2)))

    def is_zero(self, value, scale=None) -> bool:
        bound = self.tolerance
        if scale is not None and scale != 0:
            bound = bound * abs(scale)
        return abs(value) <= bound

    def equal(self, a, b) -> bool:
        return self.is_zero(a - b, scale=max(abs(a), abs(b), self.one))

    def sqrt(self, value):
        value = self.coerce(value)
        if value < 0:
            return None
        return self.ctx.sqrt(value)

    def to_text(self, value) -> str:
        return self.ctx.nstr(self.coerce(value), self.digits)

    def describe(self) -> dict:
        return {
            "backend": "float",
            "precision_bits": self.precision_bits,
            "tolerance": self.tolerance_text,
        }

    def __eq__(self, other):
        return (
            isinstance(other, FloatField)
            and other.precision_bits == self.precision_bits
            and other.tolerance_text == self.tolerance_text
        )

    def __hash__(self):
        return hash(("float", self.precision_bits, self.tolerance_text))

    def __repr__(self):
        return f"FloatField(precision_bits={self.precision_bits}, tolerance={self.tolerance_text!r})"


def make_field(backend: str = "exact", precision_bits: int = 128, tolerance="1e-15"):
    """Returns the scalar field for a backend name."""
    if backend == "exact":
        return EXACT
    if backend == "float":
        return FloatField(precision_bits, tolerance)
    raise BackendMismatchError(f"unknown backend: {backend!r} (expected 'exact' or 'float')")


def pochhammer(alpha, n: int):
    """Rising factorial (alpha)_n = alpha (alpha+1) ... (alpha+n-1), with (alpha)_0 = 1."""
    if n < 0:
        raise PreconditionError(f"pochhammer order must be non-negative, got {n}")
    result = 1
    for i in range(n):
        result = result * (alpha + i)
    return result
