"""Exact generalized Laguerre polynomials L_n^(alpha) for integer alpha >= 0.

Polynomials are stored with a shared denominator: ``n! * L_n^(alpha)(x)`` has
integer coefficients ``(-1)^j * n!/j! * C(n+alpha, n-j)``, so every exact
computation here runs on Python integers.

Sign counting uses the three-term recurrence

    (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1},

which makes ``((-1)^n L_n, ..., -L_1, L_0)`` a Sturm sequence up to positive
factors.  Evaluated at ``x = a/b`` with the scaling ``P_k = k! b^k L_k(a/b)``
the recurrence stays in the integers:

    P_{k+1} = ((2k+1+alpha) b - a) P_k - k (k+alpha) b^2 P_{k-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

__all__ = [
    "LaguerrePoly",
    "ZeroList",
    "laguerre_coeffs",
    "laguerre_eval_exact",
    "laguerre_eval",
    "laguerre_zeros",
    "divides",
    "sturm_count",
    "sturm_no_roots",
    "check_interlacing",
    "oscillatory_bound",
]


def _check_indices(n, alpha):
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")
    if int(alpha) != alpha or alpha < 0:
        raise ValueError(f"alpha must be a non-negative integer, got {alpha!r}")
    return int(n), int(alpha)


@dataclass(frozen=True)
class LaguerrePoly:
    """``L_n^(alpha)`` as ``numerators / n!``.

    ``numerators[j]`` is the integer ``(-1)^j n!/j! C(n+alpha, n-j)``; the
    ``coeffs`` property gives the reduced rationals.
    """

    n: int
    alpha: int
    numerators: tuple[int, ...]

    @property
    def denominator(self) -> int:
        return math.factorial(self.n)

    @property
    def coeffs(self) -> list[Fraction]:
        d = self.denominator
        return [Fraction(a, d) for a in self.numerators]

    def __call__(self, x):
        return laguerre_eval_exact(self, x)


@dataclass(frozen=True)
class ZeroList:
    """Increasing zeros of ``L_n^(alpha)`` with exact isolating brackets.

    ``brackets[i] = (lo, hi)`` are rationals with ``lo < values[i] < hi`` and
    ``L(lo) * L(hi) < 0``; no other zero lies in ``[lo, hi]``.
    """

    n: int
    alpha: int
    values: tuple[float, ...]
    brackets: tuple[tuple[Fraction, Fraction], ...]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@lru_cache(maxsize=4096)
def laguerre_coeffs(n: int, alpha: int = 0) -> LaguerrePoly:
    n, alpha = _check_indices(n, alpha)
    nums = []
    # a_j = n!/j! C(n+alpha, n-j); a_0 = (n+alpha)!/alpha!, ratio (n-j)/((j+1)(alpha+j+1))
    a = math.perm(n + alpha, n)
    for j in range(n + 1):
        nums.append(-a if j % 2 else a)
        if j < n:
            a = a * (n - j) // ((j + 1) * (alpha + j + 1))
    return LaguerrePoly(n, alpha, tuple(nums))


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _scaled_value(p: LaguerrePoly, x: Fraction) -> int:
    """``n! b^n L(a/b)`` as an integer (Horner in homogeneous form)."""
    a, b = x.numerator, x.denominator
    acc = 0
    bpow = 1
    for c in reversed(p.numerators):
        acc = acc * a + c * bpow
        bpow *= b
    return acc


def laguerre_eval_exact(p: LaguerrePoly, x) -> Fraction:
    x = _as_fraction(x)
    return Fraction(_scaled_value(p, x), p.denominator * x.denominator**p.n)


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def _chain_signs(n: int, alpha: int, x: Fraction) -> list[int]:
    """Signs of ``(-1)^k L_k(x)``, k = 0..n, from the integer recurrence.

    The ``(-1)^k`` makes every leading coefficient positive, which is the
    orientation the Sturm count needs.
    """
    a, b = x.numerator, x.denominator
    signs = [1]
    if n == 0:
        return signs
    prev, cur = 1, (1 + alpha) * b - a
    signs.append(-_sign(cur))
    b2 = b * b
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha) * b - a) * cur - k * (k + alpha) * b2 * prev
        signs.append(_sign(cur) if k % 2 else -_sign(cur))
    return signs


def _variations(signs) -> int:
    nz = [s for s in signs if s]
    return sum(1 for u, v in zip(nz, nz[1:]) if u != v)


def sturm_count(n: int, alpha: int, lo, hi) -> int:
    """Number of distinct zeros of ``L_n^(alpha)`` in the half-open ``(lo, hi]``."""
    n, alpha = _check_indices(n, alpha)
    lo, hi = _as_fraction(lo), _as_fraction(hi)
    if lo >= hi:
        raise ValueError("need lo < hi")
    if n == 0:
        return 0
    return _variations(_chain_signs(n, alpha, lo)) - _variations(_chain_signs(n, alpha, hi))


def sturm_no_roots(n: int, m: int, interval, closed=(True, True)) -> bool:
    """True iff ``L_n^(m)`` has no zero in the interval.

    ``closed`` gives the (left, right) endpoint inclusion flags.
    """
    lo, hi = (_as_fraction(v) for v in interval)
    if lo >= hi:
        raise ValueError("interval endpoints must satisfy lower < upper")
    p = laguerre_coeffs(n, m)
    count = sturm_count(n, m, lo, hi)
    if not closed[1] and _scaled_value(p, hi) == 0:
        count -= 1
    if closed[0] and _scaled_value(p, lo) == 0:
        count += 1
    return count == 0


def oscillatory_bound(n: int, alpha: int) -> int:
    """All zeros of ``L_n^(alpha)`` lie in ``(0, 4n + 2 alpha + 2)``."""
    return 4 * n + 2 * alpha + 2


def laguerre_eval(n: int, alpha, x):
    """Float ``L_n^(alpha)(x)`` by the forward recurrence (vectorised over x)."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def _value_and_derivative(n: int, alpha: int, x: float):
    prev, cur = 1.0, 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    # x L_n' = n L_n - (n + alpha) L_{n-1}
    return cur, (n * cur - (n + alpha) * prev) / x


def _isolate(n, alpha, lo: Fraction, hi: Fraction, count: int, out: list):
    """Bisect ``(lo, hi]`` until each piece holds exactly one zero."""
    if count == 0:
        return
    if count == 1:
        out.append((lo, hi))
        return
    mid = (lo + hi) / 2
    left = sturm_count(n, alpha, lo, mid)
    _isolate(n, alpha, lo, mid, left, out)
    _isolate(n, alpha, mid, hi, count - left, out)


def _open_bracket(p, n, alpha, lo: Fraction, hi: Fraction):
    """Turn a half-open isolating ``(lo, hi]`` into ``[lo', hi']`` with a strict sign change."""
    s_hi = _sign(_scaled_value(p, hi))
    if s_hi == 0:
        # rational zero sitting on the right end: pinch it from both sides
        w = (hi - lo) / 2
        while True:
            right = hi + w
            if _sign(_scaled_value(p, right)) != 0 and sturm_count(n, alpha, hi, right) == 0:
                break
            w /= 2
        return hi - w, right
    # lo is not a zero of this piece, but may be a zero of the previous one
    while _sign(_scaled_value(p, lo)) == 0 or _sign(_scaled_value(p, lo)) == s_hi:
        mid = (lo + hi) / 2
        s_mid = _sign(_scaled_value(p, mid))
        if s_mid == 0:
            return _open_bracket(p, n, alpha, lo, mid)
        if s_mid == s_hi:
            hi = mid
            s_hi = s_mid
        else:
            lo = mid
    return lo, hi


def _polish(n, alpha, lo: Fraction, hi: Fraction, sign_lo: int) -> float:
    a, b = float(lo), float(hi)
    x = 0.5 * (a + b)
    for _ in range(100):
        fx, dfx = _value_and_derivative(n, alpha, x)
        if fx == 0.0:
            return x
        if (fx > 0) == (sign_lo > 0):
            a = x
        else:
            b = x
        step = fx / dfx if dfx != 0.0 else math.inf
        nxt = x - step
        if not (a < nxt < b):
            nxt = 0.5 * (a + b)
        if abs(nxt - x) <= 4e-16 * abs(x) or b - a <= 4e-16 * abs(x):
            return nxt
        x = nxt
    return x


@lru_cache(maxsize=None)
def laguerre_zeros(n: int, alpha: int = 0) -> ZeroList:
    """Zeros of ``L_n^(alpha)``, isolated exactly and polished in floating point.

    Brackets for degree ``n`` start from the zeros of degree ``n-1``
    (interlacing); exact Sturm counts confirm or split each piece.
    """
    n, alpha = _check_indices(n, alpha)
    if n < 1:
        raise ValueError("laguerre_zeros needs n >= 1")
    p = laguerre_coeffs(n, alpha)
    nu = Fraction(oscillatory_bound(n, alpha))
    if n == 1:
        seps = [Fraction(0), nu]
    else:
        prev = laguerre_zeros(n - 1, alpha)
        seps = [Fraction(0)] + [Fraction(v) for v in prev.values] + [nu]
    pieces: list[tuple[Fraction, Fraction]] = []
    for lo, hi in zip(seps, seps[1:]):
        if lo < hi:
            _isolate(n, alpha, lo, hi, sturm_count(n, alpha, lo, hi), pieces)
    if len(pieces) != n:
        raise ArithmeticError(f"isolated {len(pieces)} zeros of L_{n}^({alpha}), expected {n}")
    values, brackets = [], []
    for lo, hi in pieces:
        lo, hi = _open_bracket(p, n, alpha, lo, hi)
        s_lo = _sign(_scaled_value(p, lo))
        x = _polish(n, alpha, lo, hi, s_lo)
        values.append(x)
        brackets.append(_tighten(p, lo, hi, s_lo, x))
    return ZeroList(n, alpha, tuple(values), tuple(brackets))


def _tighten(p, lo: Fraction, hi: Fraction, s_lo: int, x: float):
    """Shrink ``[lo, hi]`` to a narrow rational window around the polished zero."""
    fx = Fraction(x)
    delta = Fraction(max(abs(x), 1.0)) / 2**40
    while True:
        a, b = max(lo, fx - delta), min(hi, fx + delta)
        if (a, b) == (lo, hi):
            return lo, hi
        sa, sb = _sign(_scaled_value(p, a)), _sign(_scaled_value(p, b))
        if sa == s_lo and sb == -s_lo:
            return a, b
        delta *= 16


def check_interlacing(n: int, alpha: int = 0) -> bool:
    """Exact strict interlacing of the zeros of ``L_n`` and ``L_{n-1}``.

    Between consecutive isolating brackets of ``L_n`` there is exactly one zero
    of ``L_{n-1}`` and no zero of ``L_{n-1}`` sits inside a bracket.
    """
    if n < 2:
        return True
    br = laguerre_zeros(n, alpha).brackets
    for lo, hi in br:
        if sturm_count(n - 1, alpha, lo, hi) != 0 or _scaled_value(laguerre_coeffs(n - 1, alpha), lo) == 0:
            return False
    for (_, hi), (lo, _) in zip(br, br[1:]):
        if sturm_count(n - 1, alpha, hi, lo) != 1:
            return False
    if sturm_count(n - 1, alpha, 0, br[0][0]) != 0:
        return False
    return sturm_count(n - 1, alpha, br[-1][1], oscillatory_bound(n, alpha)) == 0


def _pseudo_remainder_vanishes(num: list[int], den: list[int]) -> bool:
    """Content-normalized pseudo-division over Z; True iff the remainder is zero.

    Coefficients are highest-degree first.
    """
    num = list(num)
    lead = den[0]
    dd = len(den) - 1
    while len(num) - 1 >= dd:
        q = num[0]
        num = [lead * c for c in num]
        for i, d in enumerate(den):
            num[i] -= q * d
        num.pop(0)
        g = 0
        for c in num:
            g = math.gcd(g, c)
        if g > 1:
            num = [c // g for c in num]
    return not any(num)


def divides(k: int, n: int, m: int = 0) -> bool:
    """True iff ``L_k`` divides ``L_n^(m)`` over the rationals."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    if n < k:
        return False
    num = list(reversed(laguerre_coeffs(n, m).numerators))
    den = list(reversed(laguerre_coeffs(k, 0).numerators))
    return _pseudo_remainder_vanishes(num, den)
