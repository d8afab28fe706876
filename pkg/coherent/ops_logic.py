# ops_logic.py
# Monic orthogonal polynomial sequences: the Stieltjes procedure on a moment functional,
# the three-term recurrence, classical closed forms, normalized derivatives and
# back-substitution in graded monic bases.
# Author: The Coherent Pairs Team

from typing import List, Optional, Sequence

from . import audit
from .errors import BudgetError, CacheDepthError, PreconditionError, RegularityError
from .functional import MomentFunctional
from .polynomial import Polynomial
from .scalars import EXACT, pochhammer


class MonicOPS:
    """
    Monic OPS given by recurrence coefficients beta_0..beta_{K-1} and gamma_1..gamma_{K-1}.

    Polynomials P_0..P_K are built eagerly from
        x P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1},   P_{-1} = 0, gamma_0 = 0,
    and norms h_n = gamma_1 ... gamma_n h_0 are kept for n < K.
    """

    def __init__(self, beta: Sequence, gamma: Sequence, h0=1, field=EXACT,
                 source: Optional[MomentFunctional] = None):
        self.field = field
        self.beta = tuple(field.coerce(b) for b in beta)
        if not self.beta:
            raise PreconditionError("an OPS needs at least beta_0")
        gamma = tuple(field.coerce(g) for g in gamma)
        if len(gamma) < len(self.beta) - 1:
            raise PreconditionError(
                f"{len(self.beta)} beta values need {len(self.beta) - 1} gamma values, got {len(gamma)}"
            )
        self.gamma = (field.zero,) + gamma[: len(self.beta) - 1]
        for n, g in enumerate(self.gamma[1:], start=1):
            if field.is_zero(g):
                raise RegularityError(n, f"gamma_{n} = 0: the recurrence does not define an OPS")
        h0 = field.coerce(h0)
        if field.is_zero(h0):
            raise RegularityError(0, "h_0 = 0")
        self.source = source

        x = Polynomial.x(field)
        polys = [Polynomial.constant(1, field)]
        previous = Polynomial([], field)
        for n, b in enumerate(self.beta):
            following = (x - b) * polys[n] - previous.scale(self.gamma[n])
            previous = polys[n]
            polys.append(following)
        self.polys = tuple(polys)

        norms = [h0]
        for g in self.gamma[1:]:
            norms.append(norms[-1] * g)
        self.norms = tuple(norms)

    @property
    def depth(self) -> int:
        """Index of the deepest cached polynomial."""
        return len(self.polys) - 1

    def poly(self, n: int) -> Polynomial:
        if not 0 <= n < len(self.polys):
            raise CacheDepthError(f"P_{n} requested, cache holds P_0..P_{self.depth}")
        return self.polys[n]

    def norm(self, n: int):
        if not 0 <= n < len(self.norms):
            raise CacheDepthError(f"h_{n} requested, norms known for n < {len(self.norms)}")
        return self.norms[n]

    def normalized_derivative(self, m: int, n: int) -> Polynomial:
        """P_n^[m] = P_{n+m}^{(m)} / (n+1)_m, monic of degree n."""
        if m < 0 or n < 0:
            raise PreconditionError(f"P_n^[m] needs m, n >= 0, got m={m}, n={n}")
        if m == 0:
            return self.poly(n)
        return self.poly(n + m).derivative(m).scale(self.field.one / pochhammer(n + 1, m))

    @property
    def positive_definite(self) -> bool:
        return self.norms[0] > 0 and all(g > 0 for g in self.gamma[1:])

    def table(self) -> List[dict]:
        return [
            {
                "n": n,
                "beta": self.field.to_text(self.beta[n]),
                "gamma": self.field.to_text(self.gamma[n]),
                "norm": self.field.to_text(self.norms[n]),
            }
            for n in range(len(self.beta))
        ]

    def __repr__(self):
        return f"MonicOPS(depth={self.depth}, field={self.field!r})"


def normalized_derivative(ops: MonicOPS, m: int, n: int) -> Polynomial:
    return ops.normalized_derivative(m, n)


def ops_from_functional(u: MomentFunctional, n_max: int) -> MonicOPS:
    """
    Stieltjes procedure: beta_n = <u, x P_n^2>/h_n and gamma_{n+1} = h_{n+1}/h_n, for
    n = 0..n_max. Needs moments up to 2 n_max + 1.
    """
    if u.max_degree < 2 * n_max + 1:
        raise BudgetError(
            f"an OPS to n={n_max} needs moments up to {2 * n_max + 1}, only {u.max_degree} available"
        )
    field = u.field
    x = Polynomial.x(field)
    current = Polynomial.constant(1, field)
    previous = Polynomial([], field)
    h = u.bracket(current * current)
    if field.is_zero(h):
        raise RegularityError(0, "h_0 = <u, 1> vanishes")
    h0 = h
    betas, gammas = [], []
    gamma = field.zero
    for n in range(n_max + 1):
        beta = u.bracket(x * current * current) / h
        betas.append(beta)
        if n == n_max:
            break
        following = (x - beta) * current - previous.scale(gamma)
        h_next = u.bracket(following * following)
        gamma = h_next / h
        if field.is_zero(gamma):
            audit.log_warning(f"Stieltjes procedure: h_{n + 1} vanishes")
            raise RegularityError(n + 1)
        gammas.append(gamma)
        previous, current, h = current, following, h_next
    return MonicOPS(betas, gammas, h0=h0, field=field, source=u)


def ops_from_recurrence(beta: Sequence, gamma: Sequence, field=EXACT, h0=1) -> MonicOPS:
    """Builds the OPS from beta_0..beta_{K-1} and gamma_1..gamma_{K-1}."""
    return MonicOPS(beta, gamma, h0=h0, field=field)


def hermite_ops(n_max: int, field=EXACT) -> MonicOPS:
    """Monic Hermite polynomials (weight e^{-x^2}): beta_n = 0, gamma_n = n/2."""
    half = field.coerce("1/2")
    return MonicOPS([0] * (n_max + 1), [n * half for n in range(1, n_max + 1)], field=field)


def laguerre_ops(alpha, n_max: int, field=EXACT) -> MonicOPS:
    """Monic Laguerre polynomials: beta_n = 2n+alpha+1, gamma_n = n(n+alpha)."""
    alpha = field.coerce(alpha)
    return MonicOPS(
        [2 * n + alpha + 1 for n in range(n_max + 1)],
        [n * (n + alpha) for n in range(1, n_max + 1)],
        field=field,
    )


def jacobi_ops(alpha, beta, n_max: int, field=EXACT) -> MonicOPS:
    """Monic Jacobi polynomials for (1-x)^alpha (1+x)^beta, normalized so that h_0 = 1."""
    a, b = field.coerce(alpha), field.coerce(beta)
    betas = []
    for n in range(n_max + 1):
        if n == 0:
            betas.append((b - a) / (a + b + 2))
        else:
            betas.append((b * b - a * a) / ((2 * n + a + b) * (2 * n + a + b + 2)))
    gammas = []
    for n in range(1, n_max + 1):
        if n == 1:
            gammas.append(4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b)))
        else:
            s = 2 * n + a + b
            gammas.append(4 * n * (n + a) * (n + b) * (n + a + b) / (s * s * (s + 1) * (s - 1)))
    return MonicOPS(betas, gammas, field=field)


def expand_in_basis(p: Polynomial, basis: Sequence[Polynomial]) -> list:
    """
    Coefficients c_j with p = sum_j c_j basis_j, by back-substitution through a graded
    monic basis. The result has one entry per basis element.
    """
    field = p.field
    if p.degree >= len(basis):
        raise CacheDepthError(f"basis stops at degree {len(basis) - 1}, polynomial has degree {p.degree}")
    for d in range(p.degree + 1):
        if basis[d].degree != d or not field.equal(basis[d].leading, field.one):
            raise PreconditionError(f"basis element {d} is not monic of degree {d}")
    remainder = list(p.coeffs)
    coefficients = [field.zero] * len(basis)
    for d in range(p.degree, -1, -1):
        c = remainder[d] / basis[d].leading
        coefficients[d] = c
        if c == 0:
            continue
        for i, b in enumerate(basis[d].coeffs):
            remainder[i] -= c * b
    return coefficients


def moments_from_ops(ops: MonicOPS, degree: int) -> MomentFunctional:
    """
    Moments of the functional an OPS is orthogonal to: <u, P_n> = h_0 delta_{n0}, so
    u_n is h_0 times the P_0 coefficient of x^n.
    """
    if degree > ops.depth:
        raise CacheDepthError(f"moments to degree {degree} need P_0..P_{degree}, cache holds {ops.depth}")
    field = ops.field
    basis = ops.polys[: degree + 1]
    values = [
        ops.norm(0) * expand_in_basis(Polynomial.monomial(n, field), basis[: n + 1])[0]
        for n in range(degree + 1)
    ]
    return MomentFunctional(values, field)
