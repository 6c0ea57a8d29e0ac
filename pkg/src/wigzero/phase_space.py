"""Phase-space points, 2x2 symplectic matrices and finite Hermite states.

A ``HermiteState`` stores ``b_0..b_N``, a center ``z1`` and a frame ``S``.  Its
Wigner function is ``W(z) = Wg(S (z - z1))`` with ``g = sum b_n h_n``; nothing
here builds the corresponding function on the line except the factorization
``S = R T`` that the quadrature oracle needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PhasePoint",
    "SymplecticMat2",
    "HermiteState",
    "EllipseSpec",
    "williamson_factor",
    "rotate_coeffs",
    "translate_state",
    "is_centered_at_origin",
    "frame_factorization",
    "HBAR_TIME_FREQUENCY",
]

# hbar = 1/(2 pi) turns the phase-space conventions into the time-frequency ones
HBAR_TIME_FREQUENCY = 1.0 / (2.0 * math.pi)

_DET_TOL = 1e-12
_NORM_TOL = 1e-12


@dataclass(frozen=True)
class PhasePoint:
    x: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "p", float(self.p))
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ValueError("phase-space point must be finite")

    @classmethod
    def of(cls, z) -> "PhasePoint":
        if isinstance(z, PhasePoint):
            return z
        x, p = z
        return cls(x, p)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p])

    def __add__(self, other):
        other = PhasePoint.of(other)
        return PhasePoint(self.x + other.x, self.p + other.p)

    def __neg__(self):
        return PhasePoint(-self.x, -self.p)

    def __sub__(self, other):
        return self + (-PhasePoint.of(other))

    def __iter__(self):
        yield self.x
        yield self.p

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.p], dtype=dtype)


@dataclass(frozen=True)
class SymplecticMat2:
    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)))
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > _DET_TOL:
            raise ValueError(f"symplectic 2x2 matrix needs unit determinant, got {det!r}")

    @classmethod
    def from_array(cls, m) -> "SymplecticMat2":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "SymplecticMat2":
        return cls()

    @classmethod
    def rotation(cls, alpha: float) -> "SymplecticMat2":
        """``[[cos, sin], [-sin, cos]]``: acts on ``x + i p`` as multiplication by ``exp(-i alpha)``."""
        c, s = math.cos(alpha), math.sin(alpha)
        return cls(c, s, -s, c)

    @classmethod
    def squeeze(cls, r: float) -> "SymplecticMat2":
        return cls(r, 0.0, 0.0, 1.0 / r)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other):
        if isinstance(other, SymplecticMat2):
            return SymplecticMat2.from_array(self.as_array() @ other.as_array())
        return self.as_array() @ np.asarray(other, dtype=float)

    def inverse(self) -> "SymplecticMat2":
        return SymplecticMat2(self.d, -self.b, -self.c, self.a)

    def is_identity(self, tol: float = 0.0) -> bool:
        return np.max(np.abs(self.as_array() - np.eye(2))) <= tol

    def is_rotation(self, tol: float = 1e-12) -> bool:
        m = self.as_array()
        return np.max(np.abs(m.T @ m - np.eye(2))) <= tol

    def rotation_angle(self) -> float:
        """Angle alpha with ``self == rotation(alpha)`` (meaningful for rotations only)."""
        return math.atan2(self.b, self.a)


def frame_factorization(frame: SymplecticMat2) -> tuple[float, float, float]:
    """``(alpha, s, xi)`` with ``S = rotation(alpha) @ [[s, 0], [xi/s, 1/s]]``.

    The lower-triangular factor is a dilation composed with a chirp:
    ``(x, p) -> (s x, (p + xi x)/s)``.
    """
    a, b, c, d = frame.a, frame.b, frame.c, frame.d
    r2 = b * b + d * d
    alpha = math.atan2(b, d)
    return alpha, 1.0 / math.sqrt(r2), (a * b + c * d) / r2


def _as_coeffs(coeffs) -> np.ndarray:
    arr = np.asarray(coeffs, dtype=complex).ravel()
    if arr.size == 0:
        raise ValueError("coefficient list is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        raise ValueError("all coefficients are zero")
    return arr[: nz[-1] + 1].copy()


@dataclass(frozen=True)
class HermiteState:
    """Finite Hermite expansion with a center and a symplectic frame.

    Trailing zero coefficients are dropped.  ``renormalize=True`` rescales to
    unit norm; otherwise a norm off by more than 1e-12 is rejected.
    """

    coeffs: np.ndarray
    hbar: float = 1.0
    center: PhasePoint = field(default_factory=PhasePoint)
    frame: SymplecticMat2 = field(default_factory=SymplecticMat2)

    def __init__(self, coeffs, hbar: float = 1.0, center=(0.0, 0.0), frame=None, renormalize: bool = False):
        c = _as_coeffs(coeffs)
        norm = float(np.sqrt(np.sum(np.abs(c) ** 2)))
        if renormalize:
            c = c / norm
        elif abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"coefficients have norm {norm!r}; pass renormalize=True to rescale")
        if not (hbar > 0 and math.isfinite(hbar)):
            raise ValueError("hbar must be a positive finite number")
        c.setflags(write=False)
        if frame is None:
            frame = SymplecticMat2()
        elif not isinstance(frame, SymplecticMat2):
            frame = SymplecticMat2.from_array(frame)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "hbar", float(hbar))
        object.__setattr__(self, "center", PhasePoint.of(center))
        object.__setattr__(self, "frame", frame)

    @classmethod
    def hermite(cls, n: int, hbar: float = 1.0, **kw) -> "HermiteState":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c, hbar=hbar, **kw)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def replace(self, **kw) -> "HermiteState":
        args = {"coeffs": self.coeffs, "hbar": self.hbar, "center": self.center, "frame": self.frame}
        args.update(kw)
        return HermiteState(**args)

    def reduced(self, z) -> np.ndarray:
        """Frame coordinates ``S (z - z1)`` for points of shape ``(..., 2)``."""
        z = np.asarray(z, dtype=float)
        w = z - self.center.as_array()
        return w @ self.frame.as_array().T

    def rotation_reduced(self) -> tuple["HermiteState", np.ndarray]:
        """Push the rotation part of the frame into the coefficients.

        Returns the state with frame ``T`` (lower triangular) and coefficients
        ``b_n e^{i alpha n}``, plus ``T`` as an array.
        """
        alpha, s, xi = frame_factorization(self.frame)
        t = np.array([[s, 0.0], [xi / s, 1.0 / s]])
        st = HermiteState(rotate_coeffs(self.coeffs, alpha), self.hbar, self.center, SymplecticMat2.from_array(t))
        return st, t

    def to_dict(self) -> dict:
        return {
            "hbar": self.hbar,
            "coeffs": [{"re": float(v.real), "im": float(v.imag)} for v in self.coeffs],
            "center": [self.center.x, self.center.p],
            "frame": self.frame.as_array().tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict, renormalize: bool = False) -> "HermiteState":
        try:
            raw = d["coeffs"]
            coeffs = [complex(float(c.get("re", 0.0)), float(c.get("im", 0.0))) if isinstance(c, dict) else complex(c) for c in raw]
            hbar = float(d.get("hbar", 1.0))
            center = d.get("center", [0.0, 0.0])
            frame = d.get("frame", [[1.0, 0.0], [0.0, 1.0]])
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed state record: {exc}") from exc
        return cls(coeffs, hbar=hbar, center=center, frame=frame, renormalize=renormalize)

    def __eq__(self, other):
        if not isinstance(other, HermiteState):
            return NotImplemented
        return (
            self.hbar == other.hbar
            and self.center == other.center
            and self.frame == other.frame
            and self.coeffs.shape == other.coeffs.shape
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __hash__(self):
        return hash((self.hbar, self.center, self.frame, self.coeffs.tobytes()))


@dataclass(frozen=True)
class EllipseSpec:
    """The ellipse ``(z - z0) . M (z - z0) = 1``."""

    M: np.ndarray
    center: PhasePoint = field(default_factory=PhasePoint)

    def __init__(self, M, center=(0.0, 0.0)):
        m = _check_spd(M)
        m.setflags(write=False)
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "center", PhasePoint.of(center))

    def points(self, count: int = 64) -> np.ndarray:
        """Points on the ellipse, shape ``(count, 2)``."""
        vals, vecs = np.linalg.eigh(self.M)
        th = 2 * np.pi * np.arange(count) / count
        unit = np.stack([np.cos(th) / np.sqrt(vals[0]), np.sin(th) / np.sqrt(vals[1])], axis=-1)
        return unit @ vecs.T + self.center.as_array()


def _check_spd(M) -> np.ndarray:
    m = np.array(M, dtype=float)
    if m.shape != (2, 2):
        raise ValueError("ellipse matrix must be 2x2")
    if abs(m[0, 1] - m[1, 0]) > 1e-12:
        raise ValueError("ellipse matrix must be symmetric")
    if not np.all(np.linalg.eigvalsh(m) > 0):
        raise ValueError("ellipse matrix must be positive definite")
    return m


def williamson_factor(M) -> SymplecticMat2:
    """Symplectic ``S`` with ``M = sqrt(det M) S^T S``.

    ``S`` is defined up to a left rotation; the symmetric positive-definite
    square root of ``M / sqrt(det M)`` is returned, which has no rotation part
    and a positive first entry.
    """
    m = _check_spd(M.M if isinstance(M, EllipseSpec) else M)
    m = m / math.sqrt(np.linalg.det(m))
    vals, vecs = np.linalg.eigh(m)
    root = (vecs * np.sqrt(vals)) @ vecs.T
    root = 0.5 * (root + root.T)
    root /= math.sqrt(np.linalg.det(root))
    return SymplecticMat2.from_array(root)


def rotate_coeffs(coeffs, alpha: float) -> np.ndarray:
    """``c_n = b_n e^{i alpha n}``; then ``W_c(z) = W_b(rotation(alpha) z)``."""
    b = np.asarray(coeffs, dtype=complex)
    return b * np.exp(1j * alpha * np.arange(b.size))


def translate_state(state: HermiteState, dz) -> HermiteState:
    dz = PhasePoint.of(dz)
    return state.replace(center=state.center + dz)


def is_centered_at_origin(state: HermiteState, point=(0.0, 0.0), tol: float = 1e-9) -> tuple[bool, int]:
    """Pointwise centering test ``|W(point)| = 1/(pi hbar)``.

    Returns ``(centered, sigma)`` with ``sigma`` the sign of ``W(point)``.
    """
    from .wigner_engine import wigner_eval

    value = wigner_eval(state, point)
    peak = 1.0 / (math.pi * state.hbar)
    sigma = 1 if value > 0 else (-1 if value < 0 else 0)
    return abs(abs(value) - peak) <= tol * max(1.0, peak), sigma
