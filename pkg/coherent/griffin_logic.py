# griffin_logic.py
# OPS satisfying x P'_{n+1}/(n+1) = P_{n+1} + r_n P_n + s_n P_{n-1}: from the four numbers
# (r_0, r_1, s_1, s_2) to the weight M|x|^c e^{-x^2+tx} / |x|^c e^{-x^2+tx}, its moments,
# its OPS, and a round trip back to the structure relation.
# Author: The Coherent Pairs Team

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from numbers import Rational
from typing import List, Optional, Tuple

from mpmath.ctx_mp import MPContext

from . import audit
from .coherence_logic import compute_band, verify_coherence, pair_from_ops
from .errors import ParameterGateError, PreconditionError, QuadratureError
from .functional import MomentFunctional
from .ops_logic import MonicOPS, ops_from_functional
from .polynomial import Polynomial
from .scalars import EXACT, FloatField
from .semiclassical import IdentityCheck, check_identity, derive_kzero


@dataclass(frozen=True)
class GriffinInput:
    """Structure-relation coefficients at n = 0, 1, 2."""

    r0: object
    r1: object
    s1: object
    s2: object
    field: object = EXACT

    @classmethod
    def parse(cls, r0, r1, s1, s2, field=EXACT) -> "GriffinInput":
        return cls(*(field.coerce(value) for value in (r0, r1, s1, s2)), field)

    def validate(self):
        if not self.s1 > 0:
            raise ParameterGateError(f"s_1 must be positive, got {self.field.to_text(self.s1)}")
        if self.field.is_zero(self.s2):
            raise ParameterGateError("s_2 must be nonzero")
        if self.field.is_zero(2 * self.s1 + self.r0 * self.r1):
            raise ParameterGateError("2 s_1 + r_0 r_1 vanishes")

    def to_dict(self) -> dict:
        return {name: self.field.to_text(getattr(self, name)) for name in ("r0", "r1", "s1", "s2")}


@dataclass
class GriffinParams:
    a: object
    b: object
    c: object
    beta0: object
    beta1: object
    gamma1: object
    gamma2: object
    sqrt_a: object = None
    t: object = None
    M: object = None
    field: object = EXACT

    def to_dict(self) -> dict:
        text = self.field.to_text
        result = {
            name: text(getattr(self, name))
            for name in ("a", "b", "c", "beta0", "beta1", "gamma1", "gamma2")
        }
        for name in ("sqrt_a", "t", "M"):
            value = getattr(self, name)
            result[name] = None if value is None else _to_text(value)
        return result


@dataclass(frozen=True)
class WeightSpec:
    """w(x) = M|x|^c e^{-x^2+tx} for x < 0 and |x|^c e^{-x^2+tx} for x >= 0."""

    M: object
    t: object
    c: object

    def validate(self):
        if not self.c > -1:
            raise ParameterGateError(f"|x|^c is not integrable at 0 for c={self.c}")
        if self.M < 0:
            raise ParameterGateError(f"M={self.M} gives a weight that changes sign")


def _to_text(value) -> str:
    if isinstance(value, Fraction):
        return EXACT.to_text(value)
    return str(value)


# ==============================================================================
# Parameter maps
# ==============================================================================

def recurrence_from_structure(inp: GriffinInput) -> Tuple[object, object, object, object]:
    """(r_0, r_1, s_1, s_2) -> (beta_0, beta_1, gamma_1, gamma_2)."""
    inp.validate()
    r0, r1, s1, s2 = inp.r0, inp.r1, inp.s1, inp.s2
    beta0 = r0
    beta1 = 2 * r1 - r0
    gamma1 = s1 - r0 * (r0 - r1)
    gamma2 = (s1 * (3 * s2 - 2 * s1) + 2 * r1 * (s1 * (2 * r0 - r1) - r0 * r1 * (r0 - r1))) / (2 * s1 + r0 * r1)
    if not gamma1 > 0 or not gamma2 > 0:
        raise ParameterGateError(
            f"gamma_1={inp.field.to_text(gamma1)}, gamma_2={inp.field.to_text(gamma2)}: "
            "no positive-definite OPS has this structure relation"
        )
    return beta0, beta1, gamma1, gamma2


def beta2_from_structure(inp: GriffinInput, beta0, beta1, gamma1, gamma2):
    """beta_2 from the n = 2 relations; uses the s_2 formula unless beta_0 + beta_1 = 0."""
    if not inp.field.is_zero(inp.r1):
        return (beta0 ** 2 + beta1 ** 2 + 2 * gamma1 + 2 * gamma2 - 3 * inp.s2) / (2 * inp.r1)
    return (beta0 + beta1) / 2 - 3 * beta0 * (inp.s2 - gamma2) / (2 * (beta0 * beta1 - gamma1))


def structure_from_recurrence(beta0, beta1, beta2, gamma1, gamma2, field=EXACT) -> dict:
    """
    (beta_0, beta_1, beta_2, gamma_1, gamma_2) -> (r_0, r_1, r_2, s_1, s_2), plus the
    compatibility residual beta_0 (s_2 - gamma_2) - (beta_0 beta_1 - gamma_1)(r_2 - beta_2).
    """
    beta0, beta1, beta2, gamma1, gamma2 = (field.coerce(v) for v in (beta0, beta1, beta2, gamma1, gamma2))
    r0 = beta0
    r1 = (beta0 + beta1) / 2
    r2 = (beta0 + beta1 + beta2) / 3
    s1 = gamma1 + beta0 * (beta0 - beta1) / 2
    s2 = (beta0 ** 2 + beta1 ** 2 - (beta0 + beta1) * beta2 + 2 * (gamma1 + gamma2)) / 3
    residual = beta0 * (s2 - gamma2) - (beta0 * beta1 - gamma1) * (r2 - beta2)
    compatible = field.is_zero(residual, scale=max(abs(s2), abs(gamma2), field.one))
    if not compatible:
        audit.log_warning(f"compatibility constraint fails, residual {field.to_text(residual)}")
    return {"r0": r0, "r1": r1, "r2": r2, "s1": s1, "s2": s2,
            "compatibility_residual": residual, "compatible": compatible}


def params_from_recurrence(beta0, beta1, gamma1, gamma2, field=EXACT, check_gate: bool = True):
    """(beta_0, beta_1, gamma_1, gamma_2) -> (a, b, c) of D(xu) = (-2ax^2 + bx + c + 1)u."""
    if field.is_zero(gamma1 * gamma2):
        raise PreconditionError("gamma_1 gamma_2 vanishes")
    head = 2 * gamma1 + (beta0 - beta1) * beta0
    product = gamma1 * gamma2
    a = head / (2 * product)
    b = (head * (beta0 + beta1) - beta0 * gamma2) / product
    c = (beta0 ** 2 * gamma2 - head * (beta0 * beta1 - gamma1)) / product - 1
    if check_gate:
        check_integrability(a, c, field)
    return a, b, c


def check_integrability(a, c, field=EXACT):
    if not a > 0:
        raise ParameterGateError(f"a={field.to_text(a)} must be positive")
    if not c > -1:
        raise ParameterGateError(f"c={field.to_text(c)} must exceed -1")


def griffin_params(inp: GriffinInput, numeric: Optional[FloatField] = None) -> GriffinParams:
    """
    Parameters in the input's field. sqrt(a) and t = b/sqrt(a) stay exact when a is a
    rational square; otherwise they are computed on the numeric backend.
    """
    beta0, beta1, gamma1, gamma2 = recurrence_from_structure(inp)
    a, b, c = params_from_recurrence(beta0, beta1, gamma1, gamma2, inp.field)
    params = GriffinParams(a, b, c, beta0, beta1, gamma1, gamma2, field=inp.field)
    root = inp.field.sqrt(a)
    if root is None:
        if numeric is None:
            raise PreconditionError("sqrt(a) is irrational; a float backend is needed for t")
        root = numeric.sqrt(a)
        params.t = numeric.coerce(b) / root
    else:
        params.t = b / root
    params.sqrt_a = root
    return params


# ==============================================================================
# Quadrature
# ==============================================================================

def _lift(ctx, value):
    if isinstance(value, Rational):
        return ctx.convert(Fraction(value))
    return ctx.mpf(value)


def working_context(numeric: FloatField) -> MPContext:
    """A private context at twice the target precision."""
    ctx = MPContext()
    ctx.prec = 2 * numeric.precision_bits
    return ctx


def half_line_integral(power, t, ctx: MPContext, tolerance=None):
    """
    int_0^inf x^power e^{-x^2 + t x} dx by tanh-sinh quadrature, split at 1 and at the
    maximizer of the integrand so the endpoint singularity and the peak are both resolved.
    """
    power, t = _lift(ctx, power), _lift(ctx, t)
    if not power > -1:
        raise QuadratureError(f"x^{power} is not integrable at 0")
    peak = (t + ctx.sqrt(t * t + 8 * ctx.mpf(max(power, 0)))) / 4
    points = [ctx.zero, ctx.one]
    if peak > 1:
        points.append(peak)
    points.append(ctx.inf)

    def integrand(x):
        return ctx.power(x, power) * ctx.exp(-x * x + t * x)

    value, error = ctx.quad(integrand, points, method="tanh-sinh", error=True)
    bound = ctx.mpf(tolerance) if tolerance is not None else ctx.eps ** 0.5
    if error > bound * abs(value):
        raise QuadratureError(f"half-line integral for power {power}: error estimate {error}")
    return value


def compute_M(rho, t, c, numeric: FloatField):
    """
    M = int_0^inf (x - rho) x^c e^{-x^2+tx} dx / int_0^inf (x + rho) x^c e^{-x^2-tx} dx,
    with rho = sqrt(a) r_0.
    """
    ctx = working_context(numeric)
    rho, t, c = _lift(ctx, rho), _lift(ctx, t), _lift(ctx, c)
    if not c > -1:
        raise ParameterGateError(f"c={c} must exceed -1")
    audit.log_info(f"quadrature for M at {ctx.prec} bits")
    tolerance = numeric.tolerance
    numerator = (half_line_integral(c + 1, t, ctx, tolerance)
                 - rho * half_line_integral(c, t, ctx, tolerance))
    denominator = (half_line_integral(c + 1, -t, ctx, tolerance)
                   + rho * half_line_integral(c, -t, ctx, tolerance))
    if not denominator > 0:
        raise ParameterGateError("the denominator of M is not positive")
    M = numerator / denominator
    if M < 0:
        raise ParameterGateError(f"M={ctx.nstr(M, 20)} < 0: no positive weight of this form")
    return numeric.coerce(M)


def moments_by_quadrature(spec: WeightSpec, n_max: int, numeric: FloatField,
                          normalize: bool = True) -> MomentFunctional:
    """
    w_n = int_0^inf x^{n+c} e^{-x^2+tx} dx + (-1)^n M int_0^inf x^{n+c} e^{-x^2-tx} dx,
    computed at twice the target precision and normalized to w_0 = 1.
    """
    spec.validate()
    ctx = working_context(numeric)
    M, t, c = _lift(ctx, spec.M), _lift(ctx, spec.t), _lift(ctx, spec.c)
    audit.log_info(f"quadrature for {n_max + 1} moments at {ctx.prec} bits")
    values = []
    for n in range(n_max + 1):
        right = half_line_integral(c + n, t, ctx, numeric.tolerance)
        left = half_line_integral(c + n, -t, ctx, numeric.tolerance) if M != 0 else ctx.zero
        values.append(right + (-1) ** n * M * left)
    if normalize:
        values = [w / values[0] for w in values]
    return MomentFunctional([numeric.coerce(w) for w in values], numeric)


def moments_by_recurrence(a, b, c, v0, v1, n_max: int, field=EXACT) -> MomentFunctional:
    """v_{n+2} = (b v_{n+1} + (n+c+1) v_n) / (2a), from bracketing D(xu) = (-2ax^2+bx+c+1)u with x^n."""
    a, b, c = field.coerce(a), field.coerce(b), field.coerce(c)
    if field.is_zero(a):
        raise PreconditionError("a must be nonzero")
    values = [field.coerce(v0), field.coerce(v1)]
    for n in range(n_max - 1):
        values.append((b * values[n + 1] + (n + c + 1) * values[n]) / (2 * a))
    return MomentFunctional(values[: n_max + 1], field)


def moments_by_displayed_recurrence(a, b, c, v0, v1, n_max: int, field=EXACT) -> MomentFunctional:
    """The form -2a v_{n+2} + (n+b) v_{n+1} + (c+1) v_n = 0, kept for comparison."""
    a, b, c = field.coerce(a), field.coerce(b), field.coerce(c)
    values = [field.coerce(v0), field.coerce(v1)]
    for n in range(n_max - 1):
        values.append(((n + b) * values[n + 1] + (c + 1) * values[n]) / (2 * a))
    return MomentFunctional(values[: n_max + 1], field)


def functional_equation_check(u: MomentFunctional, a, b, c, name: str = "D(xu) = (-2ax^2+bx+c+1)u") -> IdentityCheck:
    field = u.field
    x = Polynomial.x(field)
    rhs = Polynomial([field.coerce(c) + 1, field.coerce(b), -2 * field.coerce(a)], field)
    return check_identity(name, u.left_multiply(x).derivative(), u.left_multiply(rhs))


# ==============================================================================
# End-to-end verification
# ==============================================================================

@dataclass
class GriffinReport:
    inp: GriffinInput
    params: GriffinParams
    n_max: int
    weight_moments: Optional[MomentFunctional] = None
    moments: Optional[MomentFunctional] = None
    ops: Optional[MonicOPS] = None
    structure: List[dict] = dataclass_field(default_factory=list)
    checks: List[dict] = dataclass_field(default_factory=list)
    identities: List[IdentityCheck] = dataclass_field(default_factory=list)
    displayed_recurrence: List[str] = dataclass_field(default_factory=list)

    def add_check(self, name: str, passed: bool, detail: str = ""):
        if not passed:
            audit.log_warning(f"griffin check failed: {name} {detail}".strip())
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks) and all(i.holds for i in self.identities)

    def failures(self) -> List[str]:
        return [c["name"] for c in self.checks if not c["passed"]] + [
            i.name for i in self.identities if not i.holds
        ]

    def to_dict(self) -> dict:
        field = self.moments.field if self.moments is not None else self.params.field
        return {
            "input": self.inp.to_dict(),
            "params": self.params.to_dict(),
            "backend": field.describe(),
            "weight_moments": self.weight_moments.to_strings() if self.weight_moments else [],
            "moments": self.moments.to_strings() if self.moments else [],
            "displayed_recurrence_moments": self.displayed_recurrence,
            "recurrence": self.ops.table() if self.ops else [],
            "structure_relation": self.structure,
            "checks": self.checks,
            "identities": [i.to_dict() for i in self.identities],
            "passed": self.passed,
        }


def end_to_end_verify(inp: GriffinInput, n_max: int, numeric: FloatField) -> GriffinReport:
    """
    Runs the whole reconstruction and records every check; gate failures raise
    ParameterGateError, residual failures are recorded in the report.
    """
    if n_max < 2:
        raise PreconditionError("recovering s_2 needs band rows up to n = 2")
    params = griffin_params(inp, numeric)
    to_float = numeric.coerce
    a, b, c = to_float(params.a), to_float(params.b), to_float(params.c)
    sqrt_a, t = to_float(params.sqrt_a), to_float(params.t)
    rho = sqrt_a * to_float(inp.r0)
    params.M = compute_M(rho, t, c, numeric)
    report = GriffinReport(inp, params, n_max)

    degree = 2 * n_max + 8
    weight = WeightSpec(params.M, t, c)
    weight_moments = moments_by_quadrature(weight, degree, numeric)
    report.weight_moments = weight_moments

    by_recurrence = moments_by_recurrence(1, t, c, weight_moments.moment(0), weight_moments.moment(1),
                                          degree, numeric)
    agree = weight_moments.equals_up_to(by_recurrence)
    report.add_check("moment recurrence matches quadrature", agree)
    displayed = moments_by_displayed_recurrence(1, t, c, weight_moments.moment(0),
                                                weight_moments.moment(1), min(degree, 6), numeric)
    report.displayed_recurrence = displayed.to_strings()
    report.identities.append(functional_equation_check(weight_moments, 1, t, c, "D(xu) = (-2x^2+tx+c+1)u on the weight"))

    u = weight_moments.dilate(numeric.one / sqrt_a)
    report.moments = u
    P = ops_from_functional(u, n_max + 1)
    report.ops = P
    report.add_check("gamma_n > 0", P.positive_definite)
    report.identities.append(functional_equation_check(u, a, b, c))

    band = compute_band(P, P, Polynomial.x(numeric), 1, 0, n_max)
    verdict = verify_coherence(band, 1)
    report.add_check("structure relation has index 1", verdict.holds, verdict.reason)
    for n in range(n_max + 1):
        r_n = band.coefficient(n, n)
        s_n = band.coefficient(n, n - 1) if n >= 1 else numeric.zero
        report.structure.append({"n": n, "r": numeric.to_text(r_n), "s": numeric.to_text(s_n)})
        if n >= 1 and band.is_zero(n, n - 1):
            report.add_check(f"s_{n} != 0", False)
    recovered = {
        "r0": band.coefficient(0, 0), "r1": band.coefficient(1, 1),
        "s1": band.coefficient(1, 0), "s2": band.coefficient(2, 1),
    }
    for name, value in recovered.items():
        expected = to_float(getattr(inp, name))
        report.add_check(f"{name} recovered", numeric.equal(value, expected),
                         f"{numeric.to_text(value)} vs {numeric.to_text(expected)}")

    weight_ops = ops_from_functional(weight_moments, n_max + 1)
    dilated = all(
        P.poly(n).almost_equal(weight_ops.poly(n).dilate(sqrt_a, monic=True))
        for n in range(n_max + 2)
    )
    report.add_check("P_n(x) = a^{-n/2} P^(M,t,c)_n(sqrt(a) x)", dilated)

    pair = pair_from_ops(u, u, P, P, Polynomial.x(numeric), 1, 1, 0, n_max)
    chain = derive_kzero(pair).chain
    expected_phi0 = Polynomial([c + 1, b, -2 * a], numeric)
    report.add_check("Phi(x;1) = x", chain[1].almost_equal(Polynomial.x(numeric)))
    report.add_check("Phi(x;0) = -2ax^2 + bx + c + 1", chain[0].almost_equal(expected_phi0))
    return report
