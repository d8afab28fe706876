# functional.py
# Moment functionals as truncated moment sequences, with the functional calculus
# (bracket, left product, distributional derivative, dilation) and Hankel regularity.
# Author: The Coherent Pairs Team

from typing import List, Optional, Sequence

from . import audit
from .errors import BudgetError, PreconditionError, RegularityError
from .polynomial import Polynomial, PolyMatrix
from .scalars import EXACT, pochhammer


class MomentFunctional:
    """
    A linear functional known through its moments w_0..w_d.

    Every operation reports the exact degree up to which its result is known: the left
    product by a polynomial of degree r loses r moments, a derivative gains one.
    """

    __slots__ = ("moments", "field")

    def __init__(self, moments: Sequence, field=EXACT):
        values = tuple(field.coerce(w) for w in moments)
        if not values:
            raise PreconditionError("a moment functional needs at least w_0")
        self.moments = values
        self.field = field

    @classmethod
    def _trusted(cls, values, field) -> "MomentFunctional":
        functional = cls.__new__(cls)
        functional.moments = tuple(values)
        functional.field = field
        return functional

    @property
    def max_degree(self) -> int:
        return len(self.moments) - 1

    def moment(self, n: int):
        if n > self.max_degree:
            raise BudgetError(f"moment {n} requested, only {self.max_degree} available")
        return self.moments[n]

    def bracket(self, p: Polynomial):
        """<w, p> = sum_j p_j w_j."""
        if p.degree > self.max_degree:
            raise BudgetError(
                f"<w, p> needs moments up to {p.degree}, only {self.max_degree} available"
            )
        total = self.field.zero
        for c, w in zip(p.coeffs, self.moments):
            total += c * w
        return total

    def left_multiply(self, phi: Polynomial) -> "MomentFunctional":
        """(phi w)_n = <w, phi x^n>."""
        if phi.degree > self.max_degree:
            raise BudgetError(
                f"left product by a degree {phi.degree} polynomial exceeds the budget {self.max_degree}"
            )
        if phi.is_zero():
            return MomentFunctional._trusted([self.field.zero] * len(self.moments), self.field)
        values = []
        for n in range(self.max_degree - phi.degree + 1):
            total = self.field.zero
            for i, c in enumerate(phi.coeffs):
                total += c * self.moments[n + i]
            values.append(total)
        return MomentFunctional._trusted(values, self.field)

    def derivative(self, order: int = 1) -> "MomentFunctional":
        """(Dw)_n = -n w_{n-1}, iterated."""
        if order < 0:
            raise PreconditionError(f"derivative order must be non-negative, got {order}")
        values = list(self.moments)
        for _ in range(order):
            values = [self.field.zero] + [-n * values[n - 1] for n in range(1, len(values) + 1)]
        return MomentFunctional._trusted(values, self.field)

    def dilate(self, s) -> "MomentFunctional":
        """Moments w_n -> s^n w_n, i.e. <h_s w, p> = <w, p(s x)>."""
        s = self.field.coerce(s)
        if s == 0:
            raise PreconditionError("dilation factor must be nonzero")
        values = []
        power = self.field.one
        for w in self.moments:
            values.append(power * w)
            power = power * s
        return MomentFunctional._trusted(values, self.field)

    def scale(self, factor) -> "MomentFunctional":
        factor = self.field.coerce(factor)
        return MomentFunctional._trusted([factor * w for w in self.moments], self.field)

    def truncated(self, degree: int) -> "MomentFunctional":
        if degree > self.max_degree:
            raise BudgetError(f"cannot extend a functional from degree {self.max_degree} to {degree}")
        return MomentFunctional._trusted(self.moments[: degree + 1], self.field)

    def normalized(self) -> "MomentFunctional":
        if self.field.is_zero(self.moments[0]):
            raise RegularityError(0, "cannot normalize a functional with w_0 = 0")
        return self.scale(self.field.one / self.moments[0])

    def __add__(self, other: "MomentFunctional") -> "MomentFunctional":
        size = min(len(self.moments), len(other.moments))
        return MomentFunctional._trusted(
            [self.moments[i] + other.moments[i] for i in range(size)], self.field
        )

    def __sub__(self, other: "MomentFunctional") -> "MomentFunctional":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    # ------------------------------------------------------------------
    # Comparison
    # ------------------------------------------------------------------

    def residuals(self, other: "MomentFunctional", degree: Optional[int] = None) -> list:
        """Momentwise differences self_n - other_n for n <= degree."""
        shared = min(self.max_degree, other.max_degree)
        degree = shared if degree is None else degree
        if degree > shared:
            raise BudgetError(f"comparison up to {degree} but only {shared} moments are shared")
        return [self.moments[n] - other.moments[n] for n in range(degree + 1)]

    def equals_up_to(self, other: "MomentFunctional", degree: Optional[int] = None,
                     scale_free: bool = False) -> bool:
        """
        True iff the moments agree for n <= degree. With scale_free, agreement up to a
        common nonzero factor is enough.
        """
        shared = min(self.max_degree, other.max_degree)
        degree = shared if degree is None else min(degree, shared)
        left = self.moments[: degree + 1]
        right = other.moments[: degree + 1]
        if scale_free:
            pivot = max(range(len(left)), key=lambda n: abs(left[n]))
            if self.field.is_zero(left[pivot]):
                return all(self.field.is_zero(w) for w in right)
            ratio = right[pivot] / left[pivot]
            if self.field.is_zero(ratio):
                return False
            left = [ratio * w for w in left]
        return all(self.field.equal(a, b) for a, b in zip(left, right))

    # ------------------------------------------------------------------
    # Regularity
    # ------------------------------------------------------------------

    def hankel_determinant(self, k: int):
        """Delta_k = det[w_{i+j}]_{i,j=0..k}."""
        if 2 * k > self.max_degree:
            raise BudgetError(f"Delta_{k} needs moments up to {2 * k}, only {self.max_degree} available")
        rows = [
            [Polynomial.constant(self.moments[i + j], self.field) for j in range(k + 1)]
            for i in range(k + 1)
        ]
        return PolyMatrix(rows).det().coefficient(0)

    def hankel_regular(self, n: int) -> bool:
        """True iff Delta_k != 0 for every k <= n."""
        for k in range(n + 1):
            if self.field.is_zero(self.hankel_determinant(k)):
                audit.log_info(f"Hankel determinant Delta_{k} vanishes")
                return False
        return True

    def to_strings(self) -> List[str]:
        return [self.field.to_text(w) for w in self.moments]

    def __repr__(self):
        head = ", ".join(self.field.to_text(w) for w in self.moments[:6])
        tail = ", ..." if len(self.moments) > 6 else ""
        return f"MomentFunctional([{head}{tail}], max_degree={self.max_degree})"


# ----------------------------------------------------------------------
# Classical functionals, normalized to w_0 = 1
# ----------------------------------------------------------------------

def hermite_functional(degree: int, field=EXACT) -> MomentFunctional:
    """Moments of e^{-x^2}: u_{2k} = (1/2)_k, odd moments vanish."""
    half = field.coerce("1/2")
    values = [pochhammer(half, n // 2) if n % 2 == 0 else field.zero for n in range(degree + 1)]
    return MomentFunctional(values, field)


def laguerre_functional(alpha, degree: int, field=EXACT) -> MomentFunctional:
    """Moments of x^alpha e^{-x} on (0, inf): u_n = (alpha+1)_n."""
    alpha = field.coerce(alpha)
    return MomentFunctional([pochhammer(alpha + 1, n) for n in range(degree + 1)], field)


def jacobi_functional(alpha, beta, degree: int, field=EXACT) -> MomentFunctional:
    """
    Moments of (1-x)^alpha (1+x)^beta on [-1, 1], from the Pearson equation
    (n+alpha+beta+2) u_{n+1} = (beta-alpha) u_n + n u_{n-1}.
    """
    alpha, beta = field.coerce(alpha), field.coerce(beta)
    values = [field.one]
    for n in range(degree):
        denominator = n + alpha + beta + 2
        if denominator == 0:
            raise PreconditionError(f"Jacobi moments undefined for alpha+beta = {-(n + 2)}")
        previous = values[n - 1] if n >= 1 else field.zero
        values.append(((beta - alpha) * values[n] + n * previous) / denominator)
    return MomentFunctional(values, field)
