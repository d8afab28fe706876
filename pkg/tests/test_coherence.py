# test_coherence.py

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coherent.coherence_logic import (build_pair, compute_band, discover_index, pair_from_ops,
                                      verify_coherence)
from coherent.errors import CacheDepthError, PreconditionError
from coherent.functional import hermite_functional, laguerre_functional
from coherent.ops_logic import laguerre_ops
from coherent.polynomial import Polynomial

X = Polynomial.x()
ONE = Polynomial.constant(1)


def test_hermite_with_pi_x_has_index_one(hermite_P):
    band = compute_band(hermite_P, hermite_P, X, 1, 0, 10)
    for n in range(11):
        assert band.coefficient(n, n + 1) == 1
        assert band.coefficient(n, n) == 0
        if n >= 1:
            assert band.coefficient(n, n - 1) == Fraction(n, 2)
    assert verify_coherence(band, 1).holds
    assert discover_index(band) == {"M": 1, "N": 1}


def test_index_zero_fails_first_at_row_zero(hermite_P):
    band = compute_band(hermite_P, hermite_P, X, 1, 0, 6)
    verdict = verify_coherence(band, 0)
    assert not verdict.holds
    assert (verdict.n, verdict.j) == (0, 0)


def test_appell_pair_holds(hermite_P):
    band = compute_band(hermite_P, hermite_P, ONE, 1, 0, 10)
    assert verify_coherence(band, 0).holds


def test_hermite_against_laguerre_is_violated(hermite_P, laguerre0_P):
    band = compute_band(hermite_P, laguerre0_P, ONE, 1, 0, 8)
    verdict = verify_coherence(band, 0)
    assert not verdict.holds
    assert verdict.n == 1


def test_laguerre_first_kind_coherence():
    # P = Laguerre(alpha+1) and Q = Laguerre(alpha): P_n = Q_n^[1]
    alpha = Fraction(1, 2)
    band = compute_band(laguerre_ops(alpha + 1, 10), laguerre_ops(alpha, 12), ONE, 0, 1, 9)
    assert verify_coherence(band, 0).holds
    assert all(band.coefficient(n, n) == 1 for n in range(10))


def test_corrupted_band_is_detected(hermite_P):
    band = compute_band(hermite_P, hermite_P, X, 1, 0, 6)
    corrupted = band.with_entry(4, 1, 1)
    verdict = verify_coherence(corrupted, 1)
    assert not verdict.holds
    assert (verdict.n, verdict.j) == (4, 1)
    vanished = band.with_entry(3, 2, 0)
    assert verify_coherence(vanished, 1).reason == "c_{n,n-M} vanishes"


def test_preconditions(hermite_P):
    with pytest.raises(PreconditionError):
        compute_band(hermite_P, hermite_P, Polynomial([0, 2]), 1, 0, 4)
    with pytest.raises(CacheDepthError):
        compute_band(hermite_P, hermite_P, X, 1, 0, 40)
    band = compute_band(hermite_P, hermite_P, X, 1, 0, 4)
    with pytest.raises(CacheDepthError):
        band.coefficient(5, 0)
    with pytest.raises(PreconditionError):
        verify_coherence(band, 1, N=2)


def test_build_pair_from_moments():
    u = hermite_functional(40)
    pair = build_pair(u, u, X, 1, 1, 0, 8)
    assert pair.verdict.holds
    assert pair.N == 1
    assert pair.P.depth >= 9
    assert pair.band.n_max == 8


def test_pair_from_ops_reports_violation(hermite_P, laguerre0_P):
    u = hermite_functional(40)
    v = laguerre_functional(0, 40)
    pair = pair_from_ops(u, v, hermite_P, laguerre0_P, ONE, 0, 1, 0, 6)
    assert not pair.verdict.holds


def test_float_band_uses_row_relative_tolerance(float128):
    u = hermite_functional(40, float128)
    pair = build_pair(u, u, Polynomial.x(float128), 1, 1, 0, 8)
    assert pair.verdict.holds
    assert discover_index(pair.band) == {"M": 1, "N": 1}


def test_band_dump_trims_support(hermite_P):
    band = compute_band(hermite_P, hermite_P, X, 1, 0, 3)
    rows = band.to_rows()
    assert rows[0] == {"n": 0, "j_min": 1, "coefficients": ["1/1"]}
    assert rows[2]["j_min"] == 1
    assert rows[2]["coefficients"] == ["1/1", "0/1", "1/1"]


ALPHA = Fraction(1, 2)
LAGUERRE = laguerre_ops(ALPHA, 10)
LAGUERRE_SHIFTED = laguerre_ops(ALPHA + 1, 10)

# (band, M): x P_n^[1] over Laguerre(alpha+1), and the Christoffel link P_n = Q_n + n Q_{n-1}
# between Laguerre(alpha) and Laguerre(alpha+1).
CORRUPTION_BANDS = {
    "laguerre_pi_x": (compute_band(LAGUERRE, LAGUERRE_SHIFTED, X, 1, 0, 7), 1),
    "christoffel": (compute_band(LAGUERRE, LAGUERRE_SHIFTED, ONE, 0, 0, 7), 1),
}


def test_christoffel_link_coefficients():
    band, M = CORRUPTION_BANDS["christoffel"]
    assert verify_coherence(band, M).holds
    for n in range(1, 8):
        assert band.coefficient(n, n) == 1
        assert band.coefficient(n, n - 1) == n


@st.composite
def corruptions(draw):
    name = draw(st.sampled_from(sorted(CORRUPTION_BANDS)))
    band, _ = CORRUPTION_BANDS[name]
    n = draw(st.integers(0, band.n_max))
    j = draw(st.integers(0, n + band.N))
    delta = draw(st.fractions(min_value=-3, max_value=3, max_denominator=6).filter(lambda d: d != 0))
    return name, n, j, delta


@given(corruptions())
def test_single_corruption_is_located(corruption):
    name, n, j, delta = corruption
    band, M = CORRUPTION_BANDS[name]
    assert verify_coherence(band, M).holds
    value = band.coefficient(n, j) + delta
    verdict = verify_coherence(band.with_entry(n, j, value), M)
    visible = j == n + band.N or j < n - M or (j == n - M and value == 0)
    if visible:
        assert not verdict.holds
        assert (verdict.n, verdict.j) == (n, j)
    else:
        assert verdict.holds
