"""Nodal sets of Wigner functions and the inverse problem from nodal circles.

A state centered at the origin vanishes on ``|zeta|^2 = s`` exactly when every
Fourier mode of the Gaussian-free polynomial on that circle vanishes:

    row_m(c) = sum_{n=0}^{N-m} c_n conj(c_{n+m}) (-1)^n sqrt(n!/(n+m)!) L_n^(m)(s) = 0,

for m = 0..N.  ``inverse_from_circles`` solves these bilinear equations by
multistart least squares and verifies every solution it returns.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from joblib import Parallel, delayed
from numpy.polynomial import Polynomial
from scipy import ndimage
from scipy.optimize import brentq
from scipy.spatial import ConvexHull, QhullError
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .certificates import Certificate, verify_A2, verify_A3, verify_A4, worker_count
from .laguerre import laguerre_eval, laguerre_zeros
from .phase_space import HermiteState, PhasePoint, SymplecticMat2, rotate_coeffs
from .wigner_engine import PolyanalyticForm, PreconditionError, polyanalytic_form, wigner_eval

__all__ = [
    "CircleConstraintSystem",
    "circle_residuals",
    "admissible_values",
    "admissible_radii",
    "rank_lower_bound",
    "Parity",
    "parity_constraint",
    "line_restriction",
    "sign_up_bound",
    "fourier_sign_constant",
    "SignUPResult",
    "GridResolutionError",
    "negative_region_radius",
    "ProbeResult",
    "symmetric_zero_probe",
    "RankDeficientError",
    "PatchFit",
    "fit_from_patch",
    "PatchWignerRegressor",
    "CircleSolution",
    "InverseResult",
    "inverse_from_circles",
    "CircleInverseSolver",
    "DetectedCircle",
    "NodalReport",
    "nodal_scan",
    "default_grid",
]


class GridResolutionError(RuntimeError):
    """The sampling grid cannot support the requested conclusion."""


class RankDeficientError(np.linalg.LinAlgError):
    """The patch samples do not determine the polyanalytic coefficients."""


def _sqrt_fact_ratio(n: int, k: int) -> float:
    return math.exp(0.5 * (math.lgamma(n + 1) - math.lgamma(n + k + 1)))


# ------------------------------------------------------------ circle system


@dataclass(frozen=True)
class CircleConstraintSystem:
    """The rows ``m = 0..N`` at one squared radius ``s = 2R^2/hbar``.

    ``weights[m, n] = (-1)^n sqrt(n!/(n+m)!) L_n^(m)(s)`` for ``n <= N - m``
    (zero elsewhere).
    """

    N: int
    s: float
    weights: np.ndarray

    @classmethod
    def build(cls, N: int, s: float) -> "CircleConstraintSystem":
        if s <= 0:
            raise ValueError("s must be positive")
        w = np.zeros((N + 1, N + 1))
        for m in range(N + 1):
            for n in range(N + 1 - m):
                w[m, n] = (-1) ** n * _sqrt_fact_ratio(n, m) * float(laguerre_eval(n, m, s))
        w.setflags(write=False)
        return cls(N, float(s), w)

    def residuals(self, coeffs) -> np.ndarray:
        # real arithmetic only: numpy's complex multiply may use FMA on some
        # array alignments and not others, which breaks run-to-run determinism
        c = np.asarray(coeffs, dtype=complex)
        cr, ci = c.real.copy(), c.imag.copy()
        N = self.N
        out = np.zeros(N + 1, dtype=complex)
        for m in range(N + 1):
            w = self.weights[m, : N + 1 - m]
            ar, ai, br, bi = cr[: N + 1 - m], ci[: N + 1 - m], cr[m:], ci[m:]
            re = w * (ar * br + ai * bi)
            im = w * (ai * br - ar * bi)
            out[m] = complex(math.fsum(re), math.fsum(im))
        out[0] = out[0].real
        return out

    def jacobian(self, coeffs) -> tuple[np.ndarray, np.ndarray]:
        """Complex derivatives of each row with respect to Re c_j and Im c_j."""
        c = np.asarray(coeffs, dtype=complex)
        N = self.N
        jx = np.zeros((N + 1, N + 1), dtype=complex)
        jy = np.zeros((N + 1, N + 1), dtype=complex)
        for m in range(N + 1):
            for j in range(N + 1):
                # a = w c̄_{j+m}, b = w c_{j-m}
                ar = ai = br = bi = 0.0
                if j + m <= N:
                    w = float(self.weights[m, j])
                    ar, ai = w * c[j + m].real, -(w * c[j + m].imag)
                if j >= m:
                    w = float(self.weights[m, j - m])
                    br, bi = w * c[j - m].real, w * c[j - m].imag
                jx[m, j] = complex(ar + br, ai + bi)
                jy[m, j] = complex(-(ai - bi), ar - br)
        return jx, jy


def circle_residuals(coeffs, s: float) -> np.ndarray:
    """Rows ``m = 0..N``; all zero iff ``W`` vanishes on ``|z| = sqrt(hbar s / 2)``."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    return CircleConstraintSystem.build(c.size - 1, s).residuals(c)


# ------------------------------------------------------------ radii and bounds


def admissible_values(N_max: int, tol: float = 1e-10) -> list[tuple[float, list[tuple[int, int]]]]:
    """Zeros ``p`` of ``L_n^(k)``, ``1 <= n <= N_max``, ``k <= N_max - n``, with their sources."""
    if N_max < 1:
        raise ValueError("N_max must be at least 1")
    found = []
    for n in range(1, N_max + 1):
        for k in range(N_max - n + 1):
            for p in laguerre_zeros(n, k).values:
                found.append((p, (n, k)))
    found.sort()
    merged: list[tuple[float, list]] = []
    for p, src in found:
        if merged and abs(p - merged[-1][0]) <= tol * max(1.0, p):
            merged[-1][1].append(src)
        else:
            merged.append((p, [src]))
    return merged


def admissible_radii(N_max: int, hbar: float = 1.0) -> list[float]:
    """Radii ``sqrt(hbar p / 2)`` of circles a rank-``<= N_max`` centered state can vanish on."""
    return [math.sqrt(hbar * p / 2.0) for p, _ in admissible_values(N_max)]


def rank_lower_bound(R: float, hbar: float = 1.0) -> int:
    """``max(0, ceil((R^2/hbar - 1)/2))``."""
    if R <= 0:
        raise ValueError("R must be positive")
    x = 0.5 * (R * R / hbar - 1.0)
    return max(0, math.ceil(x - 1e-12 * max(1.0, abs(x))))


class Parity(enum.Enum):
    PLUS = 1
    MINUS = -1
    UNCONSTRAINED = "unconstrained"
    IMPOSSIBLE = "impossible"


def parity_constraint(p) -> Parity:
    """Sign of ``W(0)`` forced by a nodal circle at rational ``s = p``.

    Non-integers cannot occur; ``p = 2^k`` (``k >= 1``) forces ``+1``; odd ``p``
    forces ``-1``; anything else is unconstrained.
    """
    q = Fraction(p) if not isinstance(p, float) else Fraction(p).limit_denominator(10**12)
    if q <= 0:
        raise ValueError("p must be positive")
    if q.denominator != 1:
        return Parity.IMPOSSIBLE
    n = q.numerator
    if n % 2 == 1:
        return Parity.MINUS
    if n & (n - 1) == 0:
        return Parity.PLUS
    return Parity.UNCONSTRAINED


def line_restriction(state: HermiteState, angle: float = 0.0, offset: float = 0.0) -> Polynomial:
    """Gaussian-free restriction of ``pi hbar W`` to a line, as a real polynomial in ``xi``.

    The line is ``zeta(xi) = e^{i angle} (xi + i offset)`` in frame coordinates
    ``zeta = sqrt(2/hbar) S (z - z1)`` (unit speed in ``zeta``).  The
    ``xi^{2N}`` coefficient is ``|b_N|^2 / N!``, never zero.
    """
    C = polyanalytic_form(state).coeffs
    u = complex(math.cos(angle), math.sin(angle))
    z0 = u * 1j * offset
    lin = Polynomial([z0, u])
    lin_bar = Polynomial([np.conj(z0), np.conj(u)])
    n = C.shape[0]
    pows = [Polynomial([1.0 + 0j])]
    pows_bar = [Polynomial([1.0 + 0j])]
    for _ in range(n - 1):
        pows.append(pows[-1] * lin)
        pows_bar.append(pows_bar[-1] * lin_bar)
    total = Polynomial([0j])
    for a in range(n):
        for b in range(n):
            if C[a, b] != 0:
                total = total + C[a, b] * pows[a] * pows_bar[b]
    coef = np.zeros(2 * n - 1, dtype=complex)
    coef[: total.coef.size] = total.coef
    if np.max(np.abs(coef.imag)) > 1e-9 * max(1.0, np.max(np.abs(coef))):
        raise ArithmeticError("line restriction is not real")
    poly = Polynomial(coef.real)
    lead = abs(state.coeffs[-1]) ** 2 / math.factorial(state.N)
    assert poly.coef[-1] != 0 and abs(poly.coef[-1] - lead) <= 1e-9 * max(1.0, lead)
    return poly


def sign_up_bound(n: int = 1, hbar: float = 1.0) -> float:
    """``(1/2) sqrt((hbar/2) (n!/2)^{1/n})``: the negative part needs a ball at least this large."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return 0.5 * math.sqrt(0.5 * hbar * (math.factorial(n) / 2.0) ** (1.0 / n))


def fourier_sign_constant(d: int) -> float:
    """``(1/pi) (Gamma(d/2 + 1)/2)^{2/d}``, the lower bound on ``A(f) A(Ff)`` in dimension ``d``."""
    return (0.5 * math.gamma(0.5 * d + 1.0)) ** (2.0 / d) / math.pi


# ------------------------------------------------------------ grids


def default_grid(state: HermiteState, size: int = 512, radius: float | None = None):
    """Square grid centered at the state's center, half-width ``4 sqrt(hbar (2N+1))`` by default."""
    if size < 16:
        raise ValueError("grid size must be at least 16")
    if radius is None:
        radius = 4.0 * math.sqrt(state.hbar * (2 * state.N + 1))
    cx, cp = state.center
    xs = cx + np.linspace(-radius, radius, size)
    ps = cp + np.linspace(-radius, radius, size)
    return xs, ps


def _grid_values(state, xs, ps):
    gx, gp = np.meshgrid(xs, ps, indexing="ij")
    return gx, gp, wigner_eval(state, np.stack([gx, gp], axis=-1))


# ------------------------------------------------------------ sign uncertainty


def _circle_two(a, b):
    c = 0.5 * (a + b)
    return c, float(np.linalg.norm(a - c))


def _circle_three(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-300:
        pairs = [_circle_two(a, b), _circle_two(a, c), _circle_two(b, c)]
        return max(pairs, key=lambda t: t[1])
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    center = np.array([ux, uy])
    return center, float(np.linalg.norm(a - center))


def _min_enclosing_circle(points: np.ndarray):
    """Welzl's algorithm (iterative form) on the convex hull of ``points``."""
    pts = np.asarray(points, dtype=float)
    if len(pts) >= 3:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            pass
    pts = pts[np.random.default_rng(0).permutation(len(pts))]
    eps = 1e-12

    def inside(circ, q):
        return np.linalg.norm(q - circ[0]) <= circ[1] * (1 + eps) + eps

    circ = (pts[0], 0.0)
    for i in range(1, len(pts)):
        if inside(circ, pts[i]):
            continue
        circ = (pts[i], 0.0)
        for j in range(i):
            if inside(circ, pts[j]):
                continue
            circ = _circle_two(pts[i], pts[j])
            for k in range(j):
                if not inside(circ, pts[k]):
                    circ = _circle_three(pts[i], pts[j], pts[k])
    return circ


@dataclass(frozen=True)
class SignUPResult:
    dimension: int
    bound: float
    radius: float
    center: PhasePoint | None
    resolution: float
    conjectured_optimal: float
    negative_points: int

    @property
    def verdict(self) -> str:
        return "pass" if self.radius >= self.bound - 1e-9 or self.negative_points == 0 else "fail"

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "bound": self.bound,
            "radius": self.radius,
            "center": None if self.center is None else [self.center.x, self.center.p],
            "resolution": self.resolution,
            "conjectured_optimal": self.conjectured_optimal,
            "negative_points": self.negative_points,
            "verdict": self.verdict,
        }


def negative_region_radius(state: HermiteState, grid_size: int = 512, grid_radius: float | None = None) -> SignUPResult:
    """Smallest disc holding every grid point where ``W < 0``, compared with ``sign_up_bound(1)``.

    ``resolution`` is the grid cell diagonal; the measured radius
    underestimates the true one by at most that much.
    """
    xs, ps = default_grid(state, grid_size, grid_radius)
    gx, gp, vals = _grid_values(state, xs, ps)
    h = xs[1] - xs[0]
    res = math.hypot(h, ps[1] - ps[0])
    bound = sign_up_bound(1, state.hbar)
    optimal = math.sqrt(state.hbar / 2.0)
    neg = vals < -1e-14 / state.hbar
    if not neg.any():
        return SignUPResult(1, bound, 0.0, None, res, optimal, 0)
    if neg[0, :].any() or neg[-1, :].any() or neg[:, 0].any() or neg[:, -1].any():
        raise GridResolutionError("negative region reaches the grid boundary; enlarge the grid radius")
    pts = np.stack([gx[neg], gp[neg]], axis=-1)
    center, radius = _min_enclosing_circle(pts)
    if radius < bound - 1e-9 and radius + res >= bound - 1e-9:
        raise GridResolutionError(f"measured radius {radius:.6g} is within one cell ({res:.3g}) of the bound; refine the grid")
    return SignUPResult(1, bound, float(radius), PhasePoint(*center), res, optimal, int(neg.sum()))


@dataclass(frozen=True)
class ProbeResult:
    verdict: str
    positive: int
    negative: int
    samples: int

    @property
    def flagged(self) -> bool:
        return self.verdict == "constant_sign"


def symmetric_zero_probe(target, z1, samples: int = 2000, seed: int = 0, radius: float | None = None,
                         hbar: float = 1.0, tol: float = 1e-9) -> ProbeResult:
    """Sample ``W(z1 + z) W(z1 - z)``; a Wigner function must show both signs.

    ``target`` is a ``HermiteState`` or a callable on points ``(..., 2)``.
    A constant sign is reported as ``"constant_sign"`` (the flagged outcome);
    ``"inconclusive"`` means no sampled product cleared the rounding floor,
    as happens at points deep in the Gaussian tail.
    """
    if isinstance(target, HermiteState):
        hbar = target.hbar

        def W(z):
            return wigner_eval(target, z)

        if radius is None:
            radius = 4.0 * math.sqrt(hbar * (2 * target.N + 1))
    else:
        W = target
        if radius is None:
            radius = 4.0 * math.sqrt(hbar)
    z1 = np.asarray(PhasePoint.of(z1), dtype=float)
    v0 = float(np.asarray(W(z1)))
    if abs(v0) > tol:
        raise PreconditionError(f"W(z1) = {v0:.3e} is not zero")
    rng = np.random.default_rng(seed)
    # half uniform on the disc, half log-spaced in radius: near z = 0 the product
    # is -(grad W . z)^2, which small negative regions only show at small scales
    half = samples // 2
    r = np.concatenate([radius * np.sqrt(rng.random(samples - half)),
                        radius * 10.0 ** (-6.0 * rng.random(half))])
    th = 2.0 * np.pi * rng.random(samples)
    d = np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)
    a, b = np.asarray(W(z1 + d), dtype=float), np.asarray(W(z1 - d), dtype=float)
    # a sign counts only when both factors clear rounding relative to the largest value seen
    floor = 1e-14 * max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
    resolved = (np.abs(a) > floor) & (np.abs(b) > floor)
    prod = np.sign(a) * np.sign(b)
    pos, neg = int(np.sum(resolved & (prod > 0))), int(np.sum(resolved & (prod < 0)))
    if pos == 0 and neg == 0:
        return ProbeResult("inconclusive", 0, 0, samples)
    return ProbeResult("both_signs" if pos and neg else "constant_sign", pos, neg, samples)


# ------------------------------------------------------------ patch fit


def _basis_indices(N: int):
    diag = [(a, a) for a in range(N + 1)]
    off = [(a, b) for a in range(N + 1) for b in range(a + 1, N + 1)]
    return diag, off


def _design(zeta: np.ndarray, N: int) -> np.ndarray:
    diag, off = _basis_indices(N)
    s = np.abs(zeta) ** 2
    cols = [s**a for a, _ in diag]
    for a, b in off:
        m = zeta**a * np.conj(zeta) ** b
        cols.append(2.0 * m.real)
        cols.append(-2.0 * m.imag)
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class PatchFit:
    form: PolyanalyticForm
    residual: float
    rank: int
    condition: float

    def predict(self, z):
        return self.form.evaluate(z)


def fit_from_patch(samples, N_max: int, hbar: float = 1.0, center=(0.0, 0.0), frame=None, rcond: float = 1e-11) -> PatchFit:
    """Least-squares polyanalytic coefficients from Wigner samples on a small patch.

    ``samples`` is an array ``(n, 3)`` of ``(x, p, W)`` or a list of
    ``(PhasePoint, value)``.  The Gaussian center and frame are taken as known;
    the ``(N_max+1)^2`` real unknowns are the Hermitian coefficients of ``P``.
    """
    if isinstance(samples, np.ndarray):
        arr = np.asarray(samples, dtype=float)
    else:
        arr = np.array([[*PhasePoint.of(z), v] for z, v in samples], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("samples must be (x, p, value) triples")
    unknowns = (N_max + 1) ** 2
    if arr.shape[0] < unknowns:
        raise RankDeficientError(f"{arr.shape[0]} samples cannot determine {unknowns} unknowns")
    frame = frame if isinstance(frame, SymplecticMat2) else (SymplecticMat2() if frame is None else SymplecticMat2.from_array(frame))
    center = PhasePoint.of(center)
    shell = PolyanalyticForm(hbar, np.zeros((N_max + 1, N_max + 1), dtype=complex), center, frame)
    zeta = shell.zeta(arr[:, :2])
    target = arr[:, 2] * math.pi * hbar * np.exp(0.5 * np.abs(zeta) ** 2)
    rho = float(np.max(np.abs(zeta)))
    if rho == 0.0:
        raise RankDeficientError("all samples sit at the Gaussian center")
    A = _design(zeta / rho, N_max)
    U, sv, Vt = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(sv > rcond * sv[0]))
    if rank < unknowns:
        raise RankDeficientError(f"sample geometry gives rank {rank} < {unknowns}; spread samples over an open disc")
    x = Vt.T @ ((U.T @ target) / sv)
    diag, off = _basis_indices(N_max)
    C = np.zeros((N_max + 1, N_max + 1), dtype=complex)
    for i, (a, _) in enumerate(diag):
        C[a, a] = x[i] / rho ** (2 * a)
    for i, (a, b) in enumerate(off):
        v = complex(x[len(diag) + 2 * i], x[len(diag) + 2 * i + 1]) / rho ** (a + b)
        C[a, b] = v
        C[b, a] = np.conj(v)
    C.setflags(write=False)
    form = PolyanalyticForm(hbar, C, center, frame)
    resid = float(np.max(np.abs(form.evaluate(arr[:, :2]) - arr[:, 2])))
    return PatchFit(form, resid, rank, float(sv[0] / sv[-1]))


class PatchWignerRegressor(RegressorMixin, BaseEstimator):
    """Fit a polyanalytic Wigner model on patch samples ``X[:, (x, p)]``, ``y = W``; predict anywhere."""

    def __init__(self, n_max: int = 2, hbar: float = 1.0, center=(0.0, 0.0), frame=None):
        self.n_max = n_max
        self.hbar = hbar
        self.center = center
        self.frame = frame

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        if X.shape[1] != 2:
            raise ValueError("X must have two columns (x, p)")
        fit = fit_from_patch(np.column_stack([X, y]), self.n_max, self.hbar, self.center, self.frame)
        self.fit_ = fit
        self.form_ = fit.form
        self.residual_ = fit.residual
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        check_is_fitted(self, "form_")
        X = check_array(X, dtype=float)
        return np.atleast_1d(self.form_.evaluate(X))


# ------------------------------------------------------------ inverse problem


@dataclass(frozen=True)
class CircleSolution:
    coeffs: np.ndarray
    residual: float
    sigma: int
    circle_max: float
    exact_witnesses: tuple = ()

    @property
    def rank(self) -> int:
        return int(np.flatnonzero(self.coeffs)[-1])

    def state(self, hbar: float = 1.0) -> HermiteState:
        return HermiteState(self.coeffs, hbar=hbar, renormalize=True)

    def to_dict(self) -> dict:
        return {
            "coeffs": [{"re": float(c.real), "im": float(c.imag)} for c in self.coeffs],
            "residual": self.residual,
            "sigma": self.sigma,
            "circle_max": self.circle_max,
            "exact_witnesses": list(self.exact_witnesses),
        }


@dataclass
class InverseResult:
    radii: list
    s_values: list
    sigma: int
    N_max: int
    solutions: list = field(default_factory=list)
    starts: int = 0
    converged: int = 0
    classes: list = field(default_factory=list)
    certificate: Certificate | None = None

    @property
    def unique(self) -> bool:
        return len(self.solutions) == 1

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "s": list(self.s_values),
            "sigma": self.sigma,
            "N_max": self.N_max,
            "starts": self.starts,
            "converged": self.converged,
            "orbits": len(self.solutions),
            "rotation_classes": [{"re": c.real.tolist(), "im": c.imag.tolist()} for c in self.classes],
            "unique": self.unique,
            "solutions": [s.to_dict() for s in self.solutions],
            "certificate": None if self.certificate is None else self.certificate.to_dict(timing=False),
        }


def _make_problem(systems, sigma: int, n: int, support: np.ndarray):
    sign = (-1.0) ** np.arange(n)

    def full(x):
        c = np.zeros(n, dtype=complex)
        c[support] = x[: support.size] + 1j * x[support.size :]
        return c

    def fun(x):
        c = full(x)
        parts = []
        for sys in systems:
            r = sys.residuals(c)
            parts.append([r[0].real])
            parts.append(r[1:].real)
            parts.append(r[1:].imag)
        a2 = c.real * c.real + c.imag * c.imag
        parts.append([math.fsum(a2) - 1.0, math.fsum(sign * a2) - sigma])
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    def jac(x):
        c = full(x)
        rows = []
        for sys in systems:
            jx, jy = sys.jacobian(c)
            jx, jy = jx[:, support], jy[:, support]
            blk = np.hstack([jx, jy])
            rows.append(blk[:1].real)
            rows.append(blk[1:].real)
            rows.append(blk[1:].imag)
        cs = c[support]
        rows.append(np.concatenate([2 * cs.real, 2 * cs.imag])[None, :])
        rows.append(np.concatenate([2 * sign[support] * cs.real, 2 * sign[support] * cs.imag])[None, :])
        return np.vstack(rows)

    return fun, jac, full


def _cholesky_solve(A: list[list[float]], b: list[float]) -> list[float] | None:
    n = len(b)
    L = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = A[i][j] - math.fsum(L[i][k] * L[j][k] for k in range(j))
            if i == j:
                if s <= 0.0:
                    return None
                L[i][i] = math.sqrt(s)
            else:
                L[i][j] = s / L[j][j]
    y = [0.0] * n
    for i in range(n):
        y[i] = (b[i] - math.fsum(L[i][k] * y[k] for k in range(i))) / L[i][i]
    x = [0.0] * n
    for i in reversed(range(n)):
        x[i] = (y[i] - math.fsum(L[k][i] * x[k] for k in range(i + 1, n))) / L[i][i]
    return x


def _levenberg_marquardt(fun, jac, x0: np.ndarray, max_iter: int = 2000, tol: float = 1e-15) -> np.ndarray:
    """Levenberg-Marquardt with Nielsen's damping update.

    Small dense problems only.  Every reduction goes through ``math.fsum`` so
    the iterates are bit-identical from run to run; compiled solvers are not,
    because their vectorised reductions follow work-array alignment.
    """
    x = np.array(x0, dtype=float)
    r = fun(x)
    cost = math.fsum(r * r)
    J = jac(x)
    cols = [J[:, i].copy() for i in range(x.size)]
    mu, nu = None, 2.0
    for _ in range(max_iter):
        if cost == 0.0:
            break
        A = [[math.fsum(ci * cj) for cj in cols] for ci in cols]
        g = [math.fsum(ci * r) for ci in cols]
        if max(abs(v) for v in g) <= tol * tol:
            break
        if mu is None:
            mu = 1e-3 * max(A[i][i] for i in range(x.size))
        while True:
            damped = [[A[i][j] + (mu if i == j else 0.0) for j in range(x.size)] for i in range(x.size)]
            h = _cholesky_solve(damped, [-v for v in g])
            if h is None:
                mu *= nu
                nu *= 2.0
                continue
            h = np.array(h)
            step = math.sqrt(math.fsum(h * h))
            if step <= tol * (math.sqrt(math.fsum(x * x)) + tol):
                return x
            x_new = x + h
            r_new = fun(x_new)
            cost_new = math.fsum(r_new * r_new)
            predicted = math.fsum(h * (mu * h - np.array(g)))
            rho = (cost - cost_new) / predicted if predicted > 0 else -1.0
            if rho > 0:
                x, r, cost = x_new, r_new, cost_new
                J = jac(x)
                cols = [J[:, i].copy() for i in range(x.size)]
                mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
                nu = 2.0
                break
            mu *= nu
            nu *= 2.0
            if mu > 1e30:
                return x
    return x


def _solve_from(x0: np.ndarray, systems, sigma: int, n: int):
    full_support = np.arange(n)
    fun, jac, full = _make_problem(systems, sigma, n, full_support)
    c = full(_levenberg_marquardt(fun, jac, x0))
    best = (float(np.max(np.abs(fun(np.concatenate([c.real, c.imag]))))), c)
    # small coefficients are fixed only to sqrt(precision); retry with them pinned to zero
    mags = np.sqrt(c.real * c.real + c.imag * c.imag)
    support = np.flatnonzero(mags > 1e-5 * mags.max())
    if support.size < n:
        fun2, jac2, full2 = _make_problem(systems, sigma, n, support)
        x1 = np.concatenate([c[support].real, c[support].imag])
        c2 = full2(_levenberg_marquardt(fun2, jac2, x1))
        r2 = float(np.max(np.abs(fun(np.concatenate([c2.real, c2.imag])))))
        if r2 <= best[0] or r2 <= 1e-13:
            best = (r2, c2)
    return best


def _phase_mul(c: np.ndarray, angles) -> np.ndarray:
    """``c * exp(i angles)`` in real arithmetic, bit-stable across array alignments."""
    ang = np.broadcast_to(np.asarray(angles, dtype=float), c.shape)
    cs = np.array([math.cos(a) for a in ang.ravel()]).reshape(c.shape)
    sn = np.array([math.sin(a) for a in ang.ravel()]).reshape(c.shape)
    re = c.real * cs - c.imag * sn
    im = c.real * sn + c.imag * cs
    return re + 1j * im


def _unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    sq = math.fsum(v.real * v.real)
    if np.iscomplexobj(v):
        sq += math.fsum(v.imag * v.imag)
    return v / math.sqrt(sq)


def _canonical(c: np.ndarray) -> np.ndarray:
    c = np.array(c, dtype=complex)
    c[np.abs(c) < 1e-14] = 0.0
    last = np.flatnonzero(c)[-1]
    c = _phase_mul(c, -float(np.angle(c[last])))
    c[last] = abs(c[last])
    # drop signed zeros so serialized output does not depend on them
    return (c.real + 0.0) + 1j * (c.imag + 0.0)


def _canonical_rotation(c: np.ndarray) -> np.ndarray:
    """Representative of ``{e^{i theta} rotate_coeffs(c, alpha)}``: first and last nonzero coefficients real positive."""
    c = _canonical(c)
    sup = np.flatnonzero(c)
    if sup.size < 2:
        return c
    first, last = sup[0], sup[-1]
    gap = last - first
    best = None
    for branch in range(gap):
        alpha = (2 * math.pi * branch + np.angle(c[first])) / gap
        cand = _canonical(_phase_mul(c, alpha * np.arange(c.size)))
        key = tuple(np.round(np.concatenate([cand.real, cand.imag]), 8))
        if best is None or key > best[0]:
            best = (key, cand)
    return best[1]


def _same_rotation_class(c1: np.ndarray, c2: np.ndarray, tol: float = 1e-6) -> bool:
    """True iff ``c2 = e^{i theta} rotate_coeffs(c1, alpha)`` for some ``theta, alpha``."""
    if c1.size != c2.size or np.max(np.abs(np.abs(c1) - np.abs(c2))) > tol:
        return False
    sup = np.flatnonzero(np.abs(c1) > tol)
    if sup.size <= 1:
        return True
    n0, n1 = sup[0], sup[1]
    d0 = np.angle(c2[n0]) - np.angle(c1[n0])
    d1 = np.angle(c2[n1]) - np.angle(c1[n1])
    gap = n1 - n0
    for branch in range(gap):
        alpha = (d1 - d0 + 2 * math.pi * branch) / gap
        theta = d0 - alpha * n0
        trial = np.exp(1j * theta) * rotate_coeffs(c1, alpha)
        if np.max(np.abs(trial - c2)) <= 10 * tol:
            return True
    return False


def _exact_witnesses(c: np.ndarray, s_values, tol: float = 1e-10) -> tuple:
    """Exact Laguerre zeros pinning the prescribed circles for a single-Hermite solution."""
    sup = np.flatnonzero(np.abs(c) > 1e-12)
    if sup.size != 1 or sup[0] == 0:
        return ()
    k = int(sup[0])
    out = []
    zeros = laguerre_zeros(k, 0)
    for s in s_values:
        fs = Fraction(s)
        for i, (lo, hi) in enumerate(zeros.brackets):
            # s must lie in (or float-adjacent to) the isolating bracket of the i-th zero
            if lo - Fraction(tol) <= fs <= hi + Fraction(tol):
                out.append({"n": k, "alpha": 0, "zero_index": i, "bracket": [str(lo), str(hi)], "s": s})
                break
    return tuple(out)


_CERTIFIERS = {1: verify_A2, 2: verify_A3, 3: verify_A4}


def inverse_from_circles(radii, sigma: int, N_max: int, hbar: float = 1.0, starts: int = 64, seed: int = 0,
                         tol: float = 1e-10, n_jobs: int | None = None, certify: bool = True) -> InverseResult:
    """States centered at the origin with ``W(0) = sigma/(pi hbar)`` vanishing on every given circle.

    Solutions are returned one per global-phase orbit (last nonzero
    coefficient real positive), each verified on 128 points of every circle.
    Rotations about the origin preserve centered circles, so a solution with
    two or more nonzero coefficients comes in a continuous family;
    ``classes`` holds one representative per rotation class, with the first
    and last nonzero coefficients real positive.  An empty list means no solution of rank ``<= N_max`` was
    found.
    """
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    radii = [float(r) for r in np.atleast_1d(radii)]
    if not radii or min(radii) <= 0:
        raise ValueError("radii must be positive")
    s_values = [2.0 * r * r / hbar for r in radii]
    n = N_max + 1
    systems = [CircleConstraintSystem.build(N_max, s) for s in s_values]
    seeds = np.random.SeedSequence(seed).spawn(starts)
    x0s = []
    for ss in seeds:
        x = np.random.default_rng(ss).normal(size=2 * n)
        x0s.append(_unit(x))
    jobs = worker_count(n_jobs)
    if jobs == 1:
        runs = [_solve_from(x0, systems, sigma, n) for x0 in x0s]
    else:
        runs = Parallel(n_jobs=jobs)(delayed(_solve_from)(x0, systems, sigma, n) for x0 in x0s)
    good = [(r, _canonical(c)) for r, c in runs if r <= tol]
    good.sort(key=lambda t: (round(t[0], 14), tuple(np.round(np.concatenate([t[1].real, t[1].imag]), 10))))
    orbits: list[tuple[float, np.ndarray]] = []
    for r, c in good:
        if all(np.max(np.abs(c - oc)) > 1e-6 for _, oc in orbits):
            orbits.append((r, c))
    th = 2.0 * np.pi * np.arange(128) / 128
    ring = np.stack([np.cos(th), np.sin(th)], axis=-1)
    sols = []
    for r, c in orbits:
        c = _unit(c)
        st = HermiteState(c, hbar=hbar, renormalize=True)
        w0 = wigner_eval(st, (0.0, 0.0)) * math.pi * hbar
        circ = max(float(np.max(np.abs(wigner_eval(st, rad * ring)))) for rad in radii)
        if circ > 1e-9 or abs(w0 - sigma) > 1e-9:
            continue
        sols.append(CircleSolution(c, r, sigma, circ, _exact_witnesses(c, s_values)))
    classes: list[np.ndarray] = []
    for sol in sols:
        rep = _canonical_rotation(sol.coeffs)
        if not any(_same_rotation_class(oc, rep) for oc in classes):
            classes.append(rep)
    result = InverseResult(radii, s_values, sigma, N_max, sols, starts, len(good), classes)
    if certify and len(sols) == 1 and sols[0].exact_witnesses:
        k = sols[0].exact_witnesses[0]["n"]
        if k in _CERTIFIERS:
            result.certificate = _CERTIFIERS[k](max(N_max, k), max(N_max, 1))
    return result


class CircleInverseSolver(BaseEstimator):
    """Estimator wrapper: ``fit(radii)`` runs ``inverse_from_circles``; ``predict(X)`` evaluates the solutions."""

    def __init__(self, sigma: int = -1, n_max: int = 3, hbar: float = 1.0, starts: int = 64, seed: int = 0, tol: float = 1e-10):
        self.sigma = sigma
        self.n_max = n_max
        self.hbar = hbar
        self.starts = starts
        self.seed = seed
        self.tol = tol

    def fit(self, radii, y=None):
        self.result_ = inverse_from_circles(radii, self.sigma, self.n_max, self.hbar, self.starts, self.seed, self.tol)
        self.solutions_ = [s.coeffs for s in self.result_.solutions]
        return self

    def predict(self, X):
        """Wigner values of each solution at ``X[:, (x, p)]``; shape ``(n_points, n_solutions)``."""
        check_is_fitted(self, "result_")
        X = check_array(X, dtype=float)
        cols = [wigner_eval(HermiteState(c, hbar=self.hbar, renormalize=True), X) for c in self.solutions_]
        return np.stack(cols, axis=-1) if cols else np.zeros((X.shape[0], 0))


# ------------------------------------------------------------ nodal scan


@dataclass(frozen=True)
class DetectedCircle:
    center: PhasePoint
    radius: float
    max_residual: float

    def to_dict(self) -> dict:
        return {"center": [self.center.x, self.center.p], "radius": self.radius, "max_residual": self.max_residual}


@dataclass
class NodalReport:
    grid: dict
    sign_change_cells: np.ndarray
    components: int
    circles: list
    boundedness_radius: float
    oscillatory_radius: float
    frame: SymplecticMat2
    inside: bool

    @property
    def empty(self) -> bool:
        return self.sign_change_cells.shape[0] == 0

    def to_dict(self) -> dict:
        return {
            "grid": dict(self.grid),
            "sign_change_cells": int(self.sign_change_cells.shape[0]),
            "components": self.components,
            "circles": [c.to_dict() for c in self.circles],
            "boundedness_radius": self.boundedness_radius,
            "oscillatory_radius": self.oscillatory_radius,
            "frame": self.frame.as_array().tolist(),
            "inside": self.inside,
        }


def _cauchy_radius(C: np.ndarray) -> float:
    """Every zero of ``P`` has ``|zeta|`` at most the positive root of ``|C_NN| r^{2N} = sum_{d<2N} M_d r^d``."""
    N = C.shape[0] - 1
    if N == 0:
        return 0.0
    mags = np.zeros(2 * N + 1)
    for a in range(N + 1):
        for b in range(N + 1):
            mags[a + b] += abs(C[a, b])
    lead = abs(C[N, N])
    coef = -mags.copy()
    coef[2 * N] = lead
    roots = Polynomial(coef).roots()
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots))].real
    return float(max(real.max(initial=0.0), 0.0))


def _ray_crossings(state, direction_z, rmax, step):
    r = np.arange(0.0, rmax + step, step)
    base = state.center.as_array()
    vals = wigner_eval(state, base + np.outer(r, direction_z))
    out = []
    sg = np.sign(vals)
    for i in np.flatnonzero(sg[:-1] * sg[1:] < 0):
        out.append(brentq(lambda q: wigner_eval(state, base + q * direction_z), r[i], r[i + 1], xtol=1e-14, rtol=1e-15))
    return np.array(out)


def nodal_scan(state: HermiteState, grid_size: int = 512, grid_radius: float | None = None, rays: int = 90,
               circle_tol: float = 1e-9) -> NodalReport:
    """Sign-change cells on a grid, nodal circles around the center, and a radius bounding the nodal set.

    Circles are looked for in frame coordinates: a zero radius must recur on at
    least half the rays within two grid cells, and ``|W|`` on each candidate
    circle must stay below ``circle_tol``.  For non-rotation frames the reported circle is
    ``|S (z - z1)| = radius``.
    """
    xs, ps = default_grid(state, grid_size, grid_radius)
    gx, gp, vals = _grid_values(state, xs, ps)
    sg = np.sign(vals)
    corners = np.stack([sg[:-1, :-1], sg[1:, :-1], sg[:-1, 1:], sg[1:, 1:]])
    cells = (corners.min(axis=0) < 0) & (corners.max(axis=0) > 0) | (corners == 0).any(axis=0)
    idx = np.argwhere(cells)
    components = int(ndimage.label(cells, structure=np.ones((3, 3)))[1]) if idx.size else 0
    h = float(xs[1] - xs[0])
    form = polyanalytic_form(state)
    scale = math.sqrt(state.hbar / 2.0)
    osc = math.sqrt(state.hbar * (4 * state.N + 2) / 2.0)
    bound = max(_cauchy_radius(form.coeffs) * scale, osc)
    inside = True
    if idx.size:
        mids = np.stack([0.5 * (xs[idx[:, 0]] + xs[idx[:, 0] + 1]), 0.5 * (ps[idx[:, 1]] + ps[idx[:, 1] + 1])], axis=-1)
        red = np.linalg.norm(state.reduced(mids), axis=-1)
        norm_s = np.linalg.norm(state.frame.as_array(), 2)
        inside = bool(np.all(red <= bound + norm_s * math.sqrt(2) * h))
        if not inside:
            raise AssertionError("nodal set found outside the boundedness radius")
    circles = []
    if idx.size:
        sinv = state.frame.inverse().as_array()
        thetas = 2.0 * np.pi * np.arange(rays) / rays
        dirs = [sinv @ np.array([math.cos(t), math.sin(t)]) for t in thetas]
        # step in frame coordinates matching the grid cell
        step = h / max(np.linalg.norm(sinv, 2), 1e-12) / 2.0
        cross = [_ray_crossings(state, d, bound * np.linalg.norm(sinv, 2) * 1.05, step) for d in dirs]
        tol_r = 2.0 * h * np.linalg.norm(state.frame.as_array(), 2)
        ring = np.stack([np.cos(np.linspace(0, 2 * np.pi, 256, endpoint=False)),
                         np.sin(np.linspace(0, 2 * np.pi, 256, endpoint=False))], axis=-1)
        pooled = np.unique(np.concatenate(cross))
        support = np.zeros(pooled.size, dtype=int)
        for cr in cross:
            if cr.size:
                support += np.min(np.abs(pooled[:, None] - cr[None, :]), axis=1) <= tol_r
        # tangential touches give no sign change on some rays; a majority suffices here
        for radius in pooled[np.argsort(-support, kind="stable")][: int(np.sum(support >= rays // 2))]:
            if any(abs(radius - c.radius) <= tol_r for c in circles):
                continue
            pts = state.center.as_array() + (radius * ring) @ sinv.T
            resid = float(np.max(np.abs(wigner_eval(state, pts))))
            if resid <= circle_tol:
                circles.append(DetectedCircle(state.center, float(radius), resid))
        circles.sort(key=lambda c: c.radius)
    grid = {"size": grid_size, "radius": float(xs[-1] - state.center.x), "center": [state.center.x, state.center.p]}
    return NodalReport(grid, idx, components, circles, bound, osc, state.frame, inside)
