from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from wigzero.laguerre import (
    check_interlacing,
    divides,
    laguerre_coeffs,
    laguerre_eval,
    laguerre_eval_exact,
    laguerre_zeros,
    oscillatory_bound,
    sturm_count,
    sturm_no_roots,
)

X = sympy.Symbol("x")


def sympy_coeffs(n, alpha):
    poly = sympy.Poly(sympy.assoc_laguerre(n, alpha, X), X)
    return [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]


@pytest.mark.parametrize("n,alpha,expected", [(0, 0, [1]), (1, 0, [1, -1]), (2, 0, [1, -2, Fraction(1, 2)])])
def test_coefficient_examples(n, alpha, expected):
    assert laguerre_coeffs(n, alpha).coeffs == [Fraction(v) for v in expected]


@given(st.integers(0, 25), st.integers(0, 10))
def test_coefficients_match_sympy(n, alpha):
    assert laguerre_coeffs(n, alpha).coeffs == sympy_coeffs(n, alpha)


@given(st.integers(0, 30), st.integers(0, 10))
def test_constant_and_leading_terms(n, alpha):
    c = laguerre_coeffs(n, alpha).coeffs
    assert len(c) == n + 1
    assert c[0] == sympy.binomial(n + alpha, n)
    assert c[-1] == Fraction((-1) ** n, sympy.factorial(n))


def test_exact_evaluation_examples():
    assert laguerre_eval_exact(laguerre_coeffs(1, 0), 1) == 0
    assert laguerre_eval_exact(laguerre_coeffs(3, 2), 0) == 10
    assert laguerre_eval_exact(laguerre_coeffs(2, 0), 2) == -1


@given(st.integers(0, 60))
def test_value_at_zero_is_one(n):
    assert laguerre_eval_exact(laguerre_coeffs(n, 0), 0) == 1


@given(st.integers(0, 20), st.integers(0, 6), st.fractions(min_value=-5, max_value=40, max_denominator=50))
def test_exact_evaluation_matches_sympy(n, alpha, x):
    ref = sympy.assoc_laguerre(n, alpha, sympy.Rational(x.numerator, x.denominator))
    assert laguerre_eval_exact(laguerre_coeffs(n, alpha), x) == Fraction(int(ref.p), int(ref.q))


@given(st.integers(0, 40), st.integers(0, 10), st.floats(0.0, 60.0))
def test_float_evaluation_matches_mpmath(n, alpha, x):
    ref = float(sympy.assoc_laguerre(n, alpha, sympy.Rational(*Fraction(x).as_integer_ratio())))
    assert laguerre_eval(n, alpha, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1.0, abs(ref)))


def test_zero_examples():
    assert laguerre_zeros(1, 0).values == (1.0,)
    z2 = laguerre_zeros(2, 0).values
    assert z2[0] == pytest.approx(2 - np.sqrt(2), rel=1e-14)
    assert z2[1] == pytest.approx(2 + np.sqrt(2), rel=1e-14)


def test_largest_cubic_zero_matches_radical_and_companion_matrix():
    top = laguerre_zeros(3, 0).values[-1]
    radical = 3 + 2 * complex(3 * (1 - 1j * np.sqrt(2))) ** (1 / 3)
    companion = max(np.linalg.eigvals(np.polynomial.laguerre.lagcompanion([0, 0, 0, 1])).real)
    assert top == pytest.approx(radical.real, rel=1e-13)
    assert top == pytest.approx(companion, rel=1e-12)


@given(st.integers(1, 30), st.integers(0, 8))
def test_zeros_match_mpmath_polyroots(n, alpha):
    with mpmath.workdps(80):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(laguerre_coeffs(n, alpha).coeffs)]
        ref = sorted(float(mpmath.re(r)) for r in mpmath.polyroots(coeffs, maxsteps=400, extraprec=400))
    got = laguerre_zeros(n, alpha).values
    assert np.allclose(got, ref, rtol=1e-13, atol=0)


@given(st.integers(1, 50), st.integers(0, 10))
def test_brackets_isolate_with_opposite_signs(n, alpha):
    p = laguerre_coeffs(n, alpha)
    zl = laguerre_zeros(n, alpha)
    for v, (lo, hi) in zip(zl.values, zl.brackets):
        assert lo < Fraction(v) < hi or lo <= Fraction(v) <= hi
        assert laguerre_eval_exact(p, lo) * laguerre_eval_exact(p, hi) < 0
        assert sturm_count(n, alpha, lo, hi) == 1


def test_structure_exhaustively():
    for n in range(1, 51):
        for alpha in range(11):
            zl = laguerre_zeros(n, alpha)
            assert len(zl) == n
            assert all(0 < v < oscillatory_bound(n, alpha) for v in zl.values)
            assert all(a < b for a, b in zip(zl.values, zl.values[1:]))
            assert check_interlacing(n, alpha)


def test_oscillatory_bound_formula():
    assert oscillatory_bound(5, 3) == 4 * 5 + 2 * 3 + 2


@pytest.mark.parametrize("k,n,m,expected", [(1, 1, 0, True), (2, 2, 0, True), (1, 3, 2, False), (2, 4, 0, False)])
def test_divides_examples(k, n, m, expected):
    assert divides(k, n, m) is expected


@given(st.integers(1, 8), st.integers(1, 12), st.integers(0, 6))
def test_divides_agrees_with_float_zeros(k, n, m):
    hit = divides(k, n, m)
    vals = [laguerre_eval(n, m, r) for r in laguerre_zeros(k, 0).values]
    if hit:
        assert max(abs(v) for v in vals) <= 1e-10
    rem = sympy.rem(sympy.assoc_laguerre(n, m, X), sympy.assoc_laguerre(k, 0, X), X)
    assert hit == (sympy.simplify(rem) == 0)


def test_sturm_examples():
    assert sturm_no_roots(2, 1, (0, 1), closed=(True, False))
    assert not sturm_no_roots(1, 0, (0, 1), closed=(True, True))
    assert sturm_no_roots(5, 4, (0, 1), closed=(True, True))


@given(st.integers(1, 15), st.integers(0, 6), st.fractions(0, 30, max_denominator=20), st.fractions(0, 30, max_denominator=20))
def test_sturm_count_matches_zero_list(n, alpha, a, b):
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        return
    expected = sum(1 for v in laguerre_zeros(n, alpha).values if float(lo) < v <= float(hi))
    got = sturm_count(n, alpha, lo, hi)
    # a float zero within rounding of an endpoint could flip the comparison
    near = any(abs(v - float(e)) < 1e-12 for v in laguerre_zeros(n, alpha).values for e in (lo, hi))
    assert got == expected or near
