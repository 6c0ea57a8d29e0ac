"""Exact integer certificates for the non-vanishing of Laguerre polynomials.

Every quantity here is a Python integer.  The building block is the row

    a_{n,j}^{(m)} = n!/j! * C(n+m, n-j),   j = 0..n,

whose alternating sum against powers of an algebraic number x decides whether
``L_n^(m)(x) = 0``.  For x = 1 the sum is ``u``; for an integer x it is ``v``;
for x = 2 - sqrt2 and for the largest zero of ``L_3`` the powers of x are
expanded in integer bases (``ab_pair`` and ``abc_triple``) and the sum splits
into independent integer components.

Scans run in partitions over n and are merged by sorting, so a certificate does
not depend on how the work was split.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from joblib import Parallel, delayed

from .laguerre import divides, sturm_no_roots

__all__ = [
    "Certificate",
    "IntSeqState",
    "PROPOSITIONS",
    "a_row",
    "u_value",
    "v_value",
    "ab_pair",
    "abc_triple",
    "xy_values",
    "abc_sums",
    "admissible_rank",
    "verify_A1",
    "verify_A2",
    "verify_A3",
    "verify_A4",
    "verify_A5",
    "scan_conjecture_A1",
    "certify",
    "worker_count",
]

PROPOSITIONS = ("A1", "A2", "A3", "A4", "A5", "ConjA1-scan")


def worker_count(requested: int | None = None) -> int:
    """Worker count, capped by ``WIGZERO_THREADS`` when it is set."""
    cap = os.environ.get("WIGZERO_THREADS")
    n = requested if requested is not None else (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, n)


@dataclass
class Certificate:
    proposition: str
    range: dict
    witnesses: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    runtime_ms: float | None = None

    @property
    def verdict(self) -> str:
        return "pass" if not self.failures else "fail"

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "proposition": self.proposition,
            "range": dict(self.range),
            "verdict": self.verdict,
            "failures": [_jsonable(f) for f in self.failures],
            "witnesses": [_jsonable(w) for w in self.witnesses],
            "runtime_ms": self.runtime_ms if timing else None,
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        cert = cls(d["proposition"], dict(d["range"]), list(d["witnesses"]), list(d["failures"]), d.get("runtime_ms"))
        if cert.verdict != d["verdict"]:
            raise ValueError("verdict field disagrees with the failure list")
        return cert

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))


def _jsonable(obj):
    # big integers survive JSON as ints; tuples become lists
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


@dataclass(frozen=True)
class IntSeqState:
    """One term of an integer sequence; ``step`` applies the forward recurrence."""

    kind: str
    j: int
    values: tuple[int, ...]

    def step(self) -> "IntSeqState":
        if self.kind == "ab":
            a, b = self.values
            return IntSeqState("ab", self.j + 1, (2 * (a + b), a + 2 * b))
        if self.kind == "abc":
            a, b, c = self.values
            return IntSeqState("abc", self.j + 1, (3 * (a + 2 * b + 2 * c), a + 3 * (b + c), b + 3 * c))
        raise ValueError(f"no recurrence for kind {self.kind!r}")


# ---------------------------------------------------------------- sequences


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return math.factorial(n)


def a_row(n: int, m: int) -> tuple[int, ...]:
    """``(a_{n,0}, ..., a_{n,n})`` with ``a_{n,j} = n!/j! C(n+m, n-j)``."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    row = []
    a = _factorial(n + m) // _factorial(m)
    for j in range(n + 1):
        row.append(a)
        if j < n:
            a = a * (n - j) // ((j + 1) * (m + j + 1))
    return tuple(row)


def _alternating(row, powers) -> int:
    return sum(a * w if j % 2 == 0 else -a * w for j, (a, w) in enumerate(zip(row, powers)))


def u_value(n: int, m: int) -> int:
    """``n! L_n^(m)(1)``."""
    return sum(a if j % 2 == 0 else -a for j, a in enumerate(a_row(n, m)))


def v_value(n: int, m: int, xbar) -> int:
    """``n! b^n L_n^(m)(a/b)`` for ``xbar = a/b``; for integers this is ``n! L_n^(m)(xbar)``."""
    x = Fraction(xbar)
    a, b = x.numerator, x.denominator
    powers = [a**j * b ** (n - j) for j in range(n + 1)]
    return _alternating(a_row(n, m), powers)


@lru_cache(maxsize=None)
def _ab_table(j: int) -> tuple[tuple[int, int], ...]:
    state = IntSeqState("ab", 0, (1, 0))
    out = [state.values]
    for _ in range(j):
        state = state.step()
        out.append(state.values)
    return tuple(out)


def ab_pair(j: int) -> tuple[int, int]:
    """``(A_j, B_j)`` with ``A_j - B_j sqrt2 = (2 - sqrt2)^j``."""
    if j < 0:
        raise ValueError("j must be non-negative")
    return _ab_table(j)[j]


@lru_cache(maxsize=None)
def _abc_table(j: int) -> tuple[tuple[int, int, int], ...]:
    out = [(1, 0, 0)]
    state = IntSeqState("abc", 1, (3, 1, 0))
    if j >= 1:
        out.append(state.values)
    for _ in range(j - 1):
        state = state.step()
        out.append(state.values)
    return tuple(out)


def abc_triple(j: int) -> tuple[int, int, int]:
    """``x1^j = A_j + B_j u + C_j v`` where x1 is the largest zero of ``L_3``.

    With ``c = cbrt(3(1 - i sqrt2))``: ``u = c + conj(c)`` (so ``x1 = 3 + u``)
    and ``v = c^2 + conj(c)^2 = u^2 - 6``.
    """
    if j < 0:
        raise ValueError("j must be non-negative")
    return _abc_table(j)[j]


def xy_values(n: int, m: int) -> tuple[int, int]:
    """``(X, Y)`` with ``n! L_n^(m)(2 - sqrt2) = X - Y sqrt2``."""
    row = a_row(n, m)
    pairs = _ab_table(n)
    return _alternating(row, [p[0] for p in pairs]), _alternating(row, [p[1] for p in pairs])


def abc_sums(n: int, m: int) -> tuple[int, int, int]:
    """Components of ``n! L_n^(m)(x1)`` in the basis ``(1, u, v)``."""
    row = a_row(n, m)
    trip = _abc_table(n)
    return tuple(_alternating(row, [t[i] for t in trip]) for i in range(3))


def _prime_factors(n: int) -> set[int]:
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def admissible_rank(xbar: int, n: int) -> bool:
    """True iff every prime factor of ``n`` divides ``xbar``."""
    if xbar < 1 or n < 1:
        raise ValueError("xbar and n must be positive")
    return all(xbar % p == 0 for p in _prime_factors(n))


# ---------------------------------------------------------------- scans


def _partitions(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, hi - lo + 1))
    edges = [lo + (hi - lo + 1) * i // parts for i in range(parts + 1)]
    return [(a, b - 1) for a, b in zip(edges, edges[1:]) if b > a]


def _run_partitioned(worker, lo: int, hi: int, n_jobs: int | None, *args):
    jobs = worker_count(n_jobs)
    chunks = _partitions(lo, hi, jobs * 4 if jobs > 1 else 1)
    if jobs == 1:
        results = [worker(a, b, *args) for a, b in chunks]
    else:
        results = Parallel(n_jobs=jobs)(delayed(worker)(a, b, *args) for a, b in chunks)
    witnesses, failures = [], []
    for w, f in results:
        witnesses.extend(w)
        failures.extend(f)
    key = lambda item: json.dumps(_jsonable(item), sort_keys=True)  # noqa: E731
    return sorted(witnesses, key=key), sorted(failures, key=key)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        cert = fn(*args, **kwargs)
        cert.runtime_ms = round((time.perf_counter() - t0) * 1000.0, 3)
        return cert

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


def _check_bounds(*bounds):
    for b in bounds:
        if int(b) != b or b < 1:
            raise ValueError(f"scan bounds must be positive integers, got {b!r}")


def _a1_chunk(n_lo, n_hi, m_max):
    wit, fail = [], []
    for n in range(n_lo, n_hi + 1):
        for m in range(max(n - 1, 0), m_max + 1):
            open_ok = sturm_no_roots(n, m, (0, 1), closed=(True, False))
            closed_ok = sturm_no_roots(n, m, (0, 1), closed=(True, True))
            if not open_ok:
                fail.append({"n": n, "m": m, "interval": "[0,1)"})
            if (n, m) == (1, 0):
                if closed_ok:
                    fail.append({"n": 1, "m": 0, "interval": "[0,1]", "reason": "expected root at 1"})
                wit.append({"n": 1, "m": 0, "root_at_1": True})
            elif not closed_ok:
                fail.append({"n": n, "m": m, "interval": "[0,1]"})
    return wit, fail


@_timed
def verify_A1(n_max: int, m_max: int, n_jobs: int | None = None) -> Certificate:
    """Positivity of ``L_n^(m)`` on ``[0, 1)`` for ``m >= n - 1``, and at 1 unless ``(n, m) = (1, 0)``."""
    _check_bounds(n_max, m_max)
    wit, fail = _run_partitioned(_a1_chunk, 1, n_max, n_jobs, m_max)
    return Certificate("A1", {"n": [1, n_max], "m": [0, m_max], "condition": "m >= n-1"}, wit, fail)


def _a2_chunk(n_lo, n_hi, m_max, small):
    wit, fail = [], []
    for n in range(n_lo, n_hi + 1):
        sign = 1 if n % 2 == 0 else -1
        for m in range(m_max + 1):
            u = u_value(n, m)
            if u == 0:
                if (n, m) == (1, 0):
                    wit.append({"n": 1, "m": 0, "u": 0, "note": "designated zero"})
                else:
                    fail.append({"n": n, "m": m, "u": 0})
            elif (n, m) == (1, 0):
                fail.append({"n": 1, "m": 0, "u": u, "reason": "expected zero"})
            elif (u - sign) % n != 0:
                fail.append({"n": n, "m": m, "u": u, "reason": "congruence"})
            elif n <= small and m <= small:
                wit.append({"n": n, "m": m, "u": u})
    return wit, fail


@_timed
def verify_A2(n_max: int, m_max: int, n_jobs: int | None = None, witness_span: int = 2) -> Certificate:
    """``u_n^(m) != 0`` away from ``(1, 0)`` and ``u_n^(m) = (-1)^n (mod n)``."""
    _check_bounds(n_max, m_max)
    wit, fail = _run_partitioned(_a2_chunk, 1, n_max, n_jobs, m_max, witness_span)
    return Certificate("A2", {"n": [1, n_max], "m": [0, m_max]}, wit, fail)


def _a3_chunk(n_lo, n_hi, m_max, small):
    wit, fail = [], []
    for n in range(n_lo, n_hi + 1):
        for m in range(m_max + 1):
            x, y = xy_values(n, m)
            a, b = ab_pair(n)
            sign = 1 if n % 2 == 0 else -1
            if (x - sign * a) % n or (y - sign * b) % n:
                fail.append({"n": n, "m": m, "X": x, "Y": y, "reason": "congruence"})
            zero = x == 0 and y == 0
            if (n, m) == (2, 0):
                (wit if zero else fail).append({"n": 2, "m": 0, "X": x, "Y": y})
            elif zero:
                fail.append({"n": n, "m": m, "X": 0, "Y": 0})
            elif n <= small and m <= small:
                wit.append({"n": n, "m": m, "X": x, "Y": y})
    return wit, fail


@_timed
def verify_A3(n_max: int, m_max: int, n_jobs: int | None = None, witness_span: int = 2) -> Certificate:
    """``L_n^(m)(2 - sqrt2) = 0`` only at ``(2, 0)``, through the integer pair ``(X, Y)``."""
    _check_bounds(n_max, m_max)
    wit, fail = _run_partitioned(_a3_chunk, 1, n_max, n_jobs, m_max, witness_span)
    return Certificate("A3", {"n": [1, n_max], "m": [0, m_max]}, wit, fail)


def _a4_chunk(n_lo, n_hi, m_max, small):
    wit, fail = [], []
    for n in range(n_lo, n_hi + 1):
        for m in range(m_max + 1):
            s = abc_sums(n, m)
            zero = not any(s)
            if (n, m) == (3, 0):
                (wit if zero else fail).append({"n": 3, "m": 0, "sums": list(s)})
            elif zero:
                fail.append({"n": n, "m": m, "sums": [0, 0, 0]})
            elif n <= small and m <= small:
                wit.append({"n": n, "m": m, "sums": list(s)})
    return wit, fail


@_timed
def verify_A4(n_max: int, m_max: int, n_jobs: int | None = None, witness_span: int = 1) -> Certificate:
    """The largest zero of ``L_3`` is a zero of ``L_n^(m)`` only at ``(3, 0)``."""
    _check_bounds(n_max, m_max)
    wit, fail = _run_partitioned(_a4_chunk, 1, n_max, n_jobs, m_max, witness_span)
    return Certificate("A4", {"n": [1, n_max], "m": [0, m_max]}, wit, fail)


def _a5_chunk(n_lo, n_hi, m_max, x_max, denominators):
    wit, fail = [], []
    for n in range(n_lo, n_hi + 1):
        sign = 1 if n % 2 == 0 else -1
        for m in range(m_max + 1):
            for x in range(1, x_max + 1):
                v = v_value(n, m, x)
                if (v - sign * x**n) % n:
                    fail.append({"n": n, "m": m, "xbar": x, "reason": "congruence"})
                if v == 0:
                    entry = {"n": n, "m": m, "xbar": x}
                    (wit if admissible_rank(x, n) else fail).append(entry)
            for b in range(2, denominators + 1):
                for a in range(1, b * x_max):
                    if math.gcd(a, b) == 1 and v_value(n, m, Fraction(a, b)) == 0:
                        fail.append({"n": n, "m": m, "xbar": f"{a}/{b}", "reason": "rational root"})
    return wit, fail


@_timed
def verify_A5(n_max: int, m_max: int, x_max: int = 20, denominators: int = 4, n_jobs: int | None = None) -> Certificate:
    """Rational zeros are integers whose prime support contains that of ``n``.

    Integer candidates ``1..x_max`` and fractions with denominator up to
    ``denominators`` below ``x_max`` are tried; integer zeros found are the
    witnesses.
    """
    _check_bounds(n_max, m_max, x_max)
    wit, fail = _run_partitioned(_a5_chunk, 1, n_max, n_jobs, m_max, x_max, denominators)
    rng = {"n": [1, n_max], "m": [0, m_max], "xbar": [1, x_max], "denominators": [2, denominators]}
    return Certificate("A5", rng, wit, fail)


def _conj_chunk(k_lo, k_hi, n_max, m_max):
    wit, fail = [], []
    for k in range(k_lo, k_hi + 1):
        for n in range(1, n_max + 1):
            for m in range(m_max + 1):
                if divides(k, n, m):
                    hit = {"k": k, "n": n, "m": m}
                    (wit if (n, m) == (k, 0) else fail).append(hit)
    return wit, fail


@_timed
def scan_conjecture_A1(k_max: int, n_max: int, m_max: int, n_jobs: int | None = None) -> Certificate:
    """Every division ``L_k | L_n^(m)`` in range; only ``(k, k, 0)`` may occur."""
    _check_bounds(k_max, n_max)
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    wit, fail = _run_partitioned(_conj_chunk, 1, k_max, n_jobs, n_max, m_max)
    return Certificate("ConjA1-scan", {"k": [1, k_max], "n": [1, n_max], "m": [0, m_max]}, wit, fail)


def certify(prop: str, n_max: int, m_max: int, k_max: int | None = None, n_jobs: int | None = None) -> Certificate:
    """Dispatch by proposition id."""
    table = {"A1": verify_A1, "A2": verify_A2, "A3": verify_A3, "A4": verify_A4, "A5": verify_A5}
    if prop in table:
        return table[prop](n_max, m_max, n_jobs=n_jobs)
    if prop == "ConjA1-scan":
        return scan_conjecture_A1(k_max if k_max is not None else n_max, n_max, m_max, n_jobs=n_jobs)
    raise ValueError(f"unknown proposition {prop!r}; expected one of {', '.join(PROPOSITIONS)}")
