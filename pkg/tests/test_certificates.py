import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wigzero.certificates import (
    Certificate,
    IntSeqState,
    a_row,
    ab_pair,
    abc_sums,
    abc_triple,
    admissible_rank,
    certify,
    scan_conjecture_A1,
    u_value,
    v_value,
    verify_A1,
    verify_A2,
    verify_A3,
    verify_A4,
    verify_A5,
    xy_values,
)
from wigzero.laguerre import laguerre_coeffs, laguerre_eval_exact, laguerre_zeros


def test_u_examples():
    assert u_value(1, 0) == 0
    assert u_value(2, 0) == -1
    assert all(u_value(1, m) == m for m in range(10))


@given(st.integers(1, 40), st.integers(0, 40))
def test_u_is_factorial_times_value_at_one(n, m):
    assert u_value(n, m) == math.factorial(n) * laguerre_eval_exact(laguerre_coeffs(n, m), 1)


def test_u_congruence_full_range():
    for n in range(1, 101):
        for m in range(101):
            assert (u_value(n, m) - (-1) ** n) % n == 0


def test_v_examples():
    assert v_value(1, 0, 1) == 0
    assert v_value(2, 0, 2) == -2


@given(st.integers(1, 25), st.integers(0, 10), st.integers(1, 12))
def test_v_matches_exact_evaluation_and_congruence(n, m, x):
    v = v_value(n, m, x)
    assert v == math.factorial(n) * laguerre_eval_exact(laguerre_coeffs(n, m), x)
    assert (v - (-1) ** n * x**n) % n == 0


@pytest.mark.parametrize("x,n,expected", [(4, 8, True), (1, 2, False), (6, 10, False), (6, 12, True), (5, 1, True)])
def test_admissible_rank(x, n, expected):
    assert admissible_rank(x, n) is expected


def test_ab_examples():
    assert [ab_pair(j) for j in range(3)] == [(1, 0), (2, 1), (6, 4)]


def test_ab_matches_floating_power_and_recurrences():
    for j in range(31):
        a, b = ab_pair(j)
        ref = (2 - math.sqrt(2)) ** j
        assert abs(a - b * math.sqrt(2) - ref) <= 1e-9 * max(1.0, a)
        if j:
            pa, pb = ab_pair(j - 1)
            assert (pa, pb) == (a - b, b - a // 2) and a % 2 == 0
            assert IntSeqState("ab", j - 1, (pa, pb)).step().values == (a, b)


def test_abc_seeds_and_recurrence():
    assert abc_triple(0) == (1, 0, 0)
    assert abc_triple(1) == (3, 1, 0)
    # A_3 = 78 would contradict the recurrence, which gives 87
    assert abc_triple(3) == (87, 36, 9)
    for j in range(2, 30):
        assert IntSeqState("abc", j, abc_triple(j)).step().values == abc_triple(j + 1)


def test_abc_matches_floating_power():
    x1 = laguerre_zeros(3, 0).values[-1]
    u = x1 - 3
    v = u * u - 6
    for j in range(31):
        a, b, c = abc_triple(j)
        assert a + b * u + c * v == pytest.approx(x1**j, rel=1e-9)


def test_abc_divisible_by_three():
    for j in range(3, 60):
        assert all(t % 3 == 0 for t in abc_triple(j))


def test_xy_and_abc_examples():
    assert xy_values(2, 0) == (0, 0)
    assert xy_values(1, 0) == (-1, -1)
    assert abc_sums(3, 0) == (0, 0, 0)
    assert abc_sums(1, 0) != (0, 0, 0)
    assert abc_sums(3, 1) != (0, 0, 0)


@given(st.integers(1, 12), st.integers(0, 8))
def test_xy_matches_floating_value(n, m):
    x, y = xy_values(n, m)
    p = laguerre_coeffs(n, m)
    ref = math.factorial(n) * sum(float(c) * (2 - math.sqrt(2)) ** j for j, c in enumerate(p.coeffs))
    assert x - y * math.sqrt(2) == pytest.approx(ref, abs=1e-6 * max(1.0, abs(x)))


def test_a_row_is_factorial_scaled_coefficients():
    for n, m in [(3, 0), (4, 2), (6, 5)]:
        row = a_row(n, m)
        coeffs = laguerre_coeffs(n, m).coeffs
        assert [abs(c) * math.factorial(n) for c in coeffs] == list(row)


def test_small_certificates():
    c = verify_A2(2, 2)
    assert c.verdict == "pass" and any(w.get("u") == -1 for w in c.witnesses)
    assert {"n": 1, "m": 0, "u": 0} in c.witnesses or any(w.get("n") == 1 and w.get("m") == 0 for w in c.witnesses)
    assert verify_A1(10, 10).passed
    assert verify_A3(10, 10).passed
    assert verify_A4(10, 10).passed
    assert verify_A5(8, 4, x_max=8).passed


def test_conjecture_scan_small():
    cert = scan_conjecture_A1(5, 5, 5)
    assert cert.passed
    assert sorted((w["k"], w["n"], w["m"]) for w in cert.witnesses) == [(k, k, 0) for k in range(1, 6)]


def test_certificate_roundtrip_and_determinism():
    a = certify("A3", 12, 12, n_jobs=1)
    b = certify("A3", 12, 12, n_jobs=2)
    assert a.to_json(timing=False) == b.to_json(timing=False)
    back = Certificate.from_json(a.to_json())
    assert back.verdict == a.verdict and back.witnesses == json.loads(a.to_json())["witnesses"]


def test_certificate_verdict_consistency():
    bad = {"proposition": "A2", "range": {}, "verdict": "pass", "failures": [{"n": 1}], "witnesses": []}
    with pytest.raises(ValueError):
        Certificate.from_dict(bad)
    assert Certificate("A2", {}, failures=[{"n": 3}]).verdict == "fail"


def test_unknown_proposition():
    with pytest.raises(ValueError):
        certify("A9", 3, 3)
