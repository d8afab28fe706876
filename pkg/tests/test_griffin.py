# test_griffin.py

from fractions import Fraction

import pytest

from coherent.errors import ParameterGateError, PreconditionError
from coherent.griffin_logic import (GriffinInput, WeightSpec, beta2_from_structure, compute_M,
                                    end_to_end_verify, griffin_params, half_line_integral,
                                    moments_by_displayed_recurrence, moments_by_quadrature,
                                    moments_by_recurrence, params_from_recurrence,
                                    recurrence_from_structure, structure_from_recurrence,
                                    working_context)
from coherent.ops_logic import ops_from_functional
from coherent.scalars import FloatField

HERMITE_INPUT = ("0", "0", "1/2", "1")

ADMISSIBLE = [
    (("1/4", "0", "1/2", "1"), (Fraction(8, 7), Fraction(-4, 7), Fraction(2, 7))),
    (("0", "1/4", "1/2", "1"), (Fraction(16, 15), Fraction(16, 15), Fraction(1, 15))),
    (("0", "0", "1", "1"), (Fraction(2), Fraction(0), Fraction(3))),
    (("1/2", "1/2", "1", "2"), (Fraction(1, 2), Fraction(1, 2), Fraction(0))),
    (("0", "0", "1/2", "3/2"), (Fraction(4, 7), Fraction(0), Fraction(-3, 7))),
]


@pytest.fixture(scope="module")
def numeric():
    return FloatField(128, "1e-15")


# ------------------------------------------------------------------
# Parameter maps (exact)
# ------------------------------------------------------------------

def test_hermite_recurrence_and_params():
    inp = GriffinInput.parse(*HERMITE_INPUT)
    beta0, beta1, gamma1, gamma2 = recurrence_from_structure(inp)
    assert (beta0, beta1, gamma1, gamma2) == (0, 0, Fraction(1, 2), 1)
    assert params_from_recurrence(beta0, beta1, gamma1, gamma2) == (1, 0, 0)
    params = griffin_params(inp)
    assert (params.sqrt_a, params.t) == (1, 0)


def test_equal_r_gives_gamma1_equal_s1():
    inp = GriffinInput.parse("1/3", "1/3", "2", "3")
    assert recurrence_from_structure(inp)[2] == 2


@pytest.mark.parametrize("values,abc", ADMISSIBLE)
def test_admissible_params(values, abc):
    inp = GriffinInput.parse(*values)
    beta0, beta1, gamma1, gamma2 = recurrence_from_structure(inp)
    assert params_from_recurrence(beta0, beta1, gamma1, gamma2) == abc
    # a = s_1 / (gamma_1 gamma_2)
    assert abc[0] == inp.s1 / (gamma1 * gamma2)


@pytest.mark.parametrize("values", [v for v, _ in ADMISSIBLE] + [HERMITE_INPUT])
def test_structure_round_trip(values):
    inp = GriffinInput.parse(*values)
    beta0, beta1, gamma1, gamma2 = recurrence_from_structure(inp)
    beta2 = beta2_from_structure(inp, beta0, beta1, gamma1, gamma2)
    structure = structure_from_recurrence(beta0, beta1, beta2, gamma1, gamma2)
    assert structure["compatible"]
    assert (structure["r0"], structure["r1"], structure["s1"], structure["s2"]) == (
        inp.r0, inp.r1, inp.s1, inp.s2)


def test_hermite_structure_from_recurrence():
    structure = structure_from_recurrence(0, 0, 0, Fraction(1, 2), 1)
    assert structure["r0"] == structure["r1"] == structure["r2"] == 0
    assert (structure["s1"], structure["s2"]) == (Fraction(1, 2), 1)
    assert structure["compatible"]


def test_incompatible_recurrence_is_flagged():
    structure = structure_from_recurrence(1, 2, 3, Fraction(1, 2), 1)
    assert not structure["compatible"]


def test_symmetric_input_has_b_zero():
    for gamma1, gamma2 in [(Fraction(1, 3), 2), (5, Fraction(7, 2))]:
        assert params_from_recurrence(0, 0, gamma1, gamma2)[1] == 0


@pytest.mark.parametrize("values", [("0", "0", "-1", "1"), ("1", "1", "1/4", "1/8")])
def test_parameter_gate(values):
    with pytest.raises(ParameterGateError):
        griffin_params(GriffinInput.parse(*values))


def test_irrational_sqrt_needs_float(numeric):
    inp = GriffinInput.parse("0", "1/4", "1/2", "1")
    with pytest.raises(PreconditionError):
        griffin_params(inp)
    params = griffin_params(inp, numeric)
    assert numeric.equal(params.sqrt_a ** 2, numeric.coerce(Fraction(16, 15)))


# ------------------------------------------------------------------
# Moment recurrences
# ------------------------------------------------------------------

def test_derived_recurrence_reproduces_gaussian_moments():
    v = moments_by_recurrence(1, 0, 0, 1, 0, 6)
    assert v.moments == (1, 0, Fraction(1, 2), 0, Fraction(3, 4), 0, Fraction(15, 8))


def test_displayed_recurrence_breaks_parity():
    v = moments_by_displayed_recurrence(1, 0, 0, 1, 0, 4)
    assert v.moments[2] == Fraction(1, 2)
    assert v.moments[3] == Fraction(1, 4)


def test_odd_moments_vanish_when_b_is_zero():
    v = moments_by_recurrence(Fraction(4, 7), 0, Fraction(-3, 7), 1, 0, 15)
    assert all(v.moments[n] == 0 for n in range(1, 16, 2))


# ------------------------------------------------------------------
# Quadrature
# ------------------------------------------------------------------

def test_half_line_gaussian(numeric):
    ctx = working_context(numeric)
    value = half_line_integral(0, 0, ctx)
    assert abs(value - ctx.sqrt(ctx.pi) / 2) < ctx.mpf("1e-40")
    singular = half_line_integral(Fraction(-1, 2), 0, ctx)
    assert abs(singular - ctx.gamma(ctx.mpf(1) / 4) / 2) < ctx.mpf("1e-30")


def test_M_is_one_for_hermite(numeric):
    M = compute_M(0, 0, 0, numeric)
    assert abs(M - 1) < numeric.coerce("1e-20")


def test_M_regression_t_one(numeric):
    ctx = working_context(numeric)
    expected = half_line_integral(1, 1, ctx) / half_line_integral(1, -1, ctx)
    M = compute_M(0, 1, 0, numeric)
    assert numeric.equal(M, numeric.coerce(expected))
    assert M > 1


def test_negative_M_is_rejected(numeric):
    with pytest.raises(ParameterGateError):
        compute_M(10, 0, 0, numeric)


def test_gaussian_moments_by_quadrature(numeric):
    bound = numeric.coerce("1e-25")
    w = moments_by_quadrature(WeightSpec(1, 0, 0), 20, numeric)
    by_recurrence = moments_by_recurrence(1, 0, 0, w.moment(0), w.moment(1), 20, numeric)
    exact = moments_by_recurrence(1, 0, 0, 1, 0, 20)
    for n in range(21):
        assert abs(w.moment(n) - by_recurrence.moment(n)) < bound
        assert abs(w.moment(n) - numeric.coerce(exact.moments[n])) < bound


def test_gaussian_recurrence_from_quadrature(numeric):
    bound = numeric.coerce("1e-18")
    w = moments_by_quadrature(WeightSpec(1, 0, 0), 21, numeric)
    ops = ops_from_functional(w, 10)
    for n in range(11):
        assert abs(ops.beta[n]) < bound
        if n >= 1:
            assert abs(ops.gamma[n] - numeric.coerce(Fraction(n, 2))) < bound


def test_singular_weight_moments_cross_oracle(numeric):
    c = Fraction(-1, 2)
    w = moments_by_quadrature(WeightSpec(1, 0, c), 20, numeric)
    by_recurrence = moments_by_recurrence(1, 0, c, w.moment(0), w.moment(1), 20, numeric)
    assert w.equals_up_to(by_recurrence)
    # Gamma(5/4) / Gamma(1/4)
    assert numeric.equal(w.moment(2), numeric.coerce(Fraction(1, 4)))


def test_asymmetric_weight_cross_oracle(numeric):
    spec = WeightSpec(numeric.coerce("0.75"), 1, Fraction(1, 2))
    w = moments_by_quadrature(spec, 20, numeric)
    by_recurrence = moments_by_recurrence(1, 1, Fraction(1, 2), w.moment(0), w.moment(1), 20, numeric)
    assert w.equals_up_to(by_recurrence)


def test_weight_spec_gate():
    with pytest.raises(ParameterGateError):
        WeightSpec(1, 0, -1).validate()
    with pytest.raises(ParameterGateError):
        WeightSpec(-1, 0, 0).validate()


# ------------------------------------------------------------------
# End to end
# ------------------------------------------------------------------

def test_end_to_end_hermite(numeric):
    report = end_to_end_verify(GriffinInput.parse(*HERMITE_INPUT), 10, numeric)
    assert report.passed, report.failures()
    ops = report.ops
    bound = numeric.coerce("1e-18")
    assert abs(report.params.M - 1) < numeric.coerce("1e-20")
    for n in range(11):
        assert abs(ops.beta[n]) < bound
        if n >= 1:
            assert abs(ops.gamma[n] - numeric.coerce(Fraction(n, 2))) < bound
    data = report.to_dict()
    assert data["params"]["a"] == "1/1"
    assert data["displayed_recurrence_moments"][3] != data["weight_moments"][3]


@pytest.mark.parametrize("values,abc", ADMISSIBLE)
def test_end_to_end_admissible(values, abc, numeric):
    report = end_to_end_verify(GriffinInput.parse(*values), 10, numeric)
    assert report.passed, report.failures()
    assert len(report.structure) == 11
    assert all(check["passed"] for check in report.checks)


def test_end_to_end_rejects_gate(numeric):
    with pytest.raises(ParameterGateError):
        end_to_end_verify(GriffinInput.parse("1", "1", "1/4", "1/8"), 10, numeric)
