import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_state
from wigzero.phase_space import (
    EllipseSpec,
    HermiteState,
    PhasePoint,
    SymplecticMat2,
    frame_factorization,
    is_centered_at_origin,
    rotate_coeffs,
    translate_state,
    williamson_factor,
)
from wigzero.wigner_engine import wigner_eval

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def grid(radius=3.0, n=20):
    x = np.linspace(-radius, radius, n)
    gx, gp = np.meshgrid(x, x, indexing="ij")
    return np.stack([gx.ravel(), gp.ravel()], axis=-1)


@st.composite
def spd(draw):
    a = draw(st.floats(0.2, 5.0))
    c = draw(st.floats(0.2, 5.0))
    b = draw(st.floats(-0.9, 0.9)) * math.sqrt(a * c)
    return np.array([[a, b], [b, c]])


def test_symplectic_determinant_enforced():
    with pytest.raises(ValueError):
        SymplecticMat2(2.0, 0.0, 0.0, 1.0)
    s = SymplecticMat2.squeeze(0.3) @ SymplecticMat2.rotation(0.4)
    assert abs(np.linalg.det(s.as_array()) - 1) < 1e-12
    J = np.array([[0, 1], [-1, 0]])
    assert np.allclose(s.as_array() @ J @ s.as_array().T, J, atol=1e-12)


def test_williamson_identity_and_diagonal():
    assert williamson_factor(np.eye(2)).is_identity(1e-12)
    S = williamson_factor(np.diag([2.0, 0.5])).as_array()
    assert np.allclose(S, np.diag([math.sqrt(2), 1 / math.sqrt(2)]), atol=1e-12)


@given(spd())
def test_williamson_reconstruction(M):
    S = williamson_factor(M)
    A = S.as_array()
    assert abs(np.linalg.det(A) - 1) <= 1e-12
    assert np.allclose(math.sqrt(np.linalg.det(M)) * A.T @ A, M, atol=1e-10)
    assert A[0, 0] >= 0 and np.allclose(A, A.T, atol=1e-12)


def test_williamson_rejects_non_spd():
    with pytest.raises(ValueError):
        williamson_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError):
        EllipseSpec(np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_ellipse_points_lie_on_ellipse():
    e = EllipseSpec(np.array([[2.0, 0.3], [0.3, 1.0]]), center=(0.5, -1))
    pts = e.points(50) - np.array([0.5, -1])
    assert np.allclose(np.einsum("ij,jk,ik->i", pts, e.M, pts), 1.0)


def test_rotate_examples():
    b = np.array([0.6, 0.8j])
    assert np.array_equal(rotate_coeffs(b, 0.0), b)
    assert np.allclose(rotate_coeffs(b, math.pi), [0.6, -0.8j])


def test_rotation_realizes_wigner_rotation():
    st_ = random_state(3, 4)
    alpha = math.pi / 3
    rot = HermiteState(rotate_coeffs(st_.coeffs, alpha))
    R = SymplecticMat2.rotation(alpha).as_array()
    pts = grid()
    assert np.max(np.abs(wigner_eval(rot, pts) - wigner_eval(st_, pts @ R.T))) <= 1e-10


@given(angles, angles, st.integers(0, 50))
def test_rotation_composes(a, b, seed):
    c = random_state(seed, 5).coeffs
    assert np.allclose(rotate_coeffs(rotate_coeffs(c, a), b), rotate_coeffs(c, a + b), atol=1e-14)


@given(st.integers(0, 50), st.floats(-2, 2), st.floats(-2, 2))
def test_translation_shifts_rigidly(seed, dx, dp):
    s = random_state(seed, 3)
    t = translate_state(s, (dx, dp))
    pts = grid(2.5, 8)
    assert np.max(np.abs(wigner_eval(t, pts + [dx, dp]) - wigner_eval(s, pts))) <= 1e-12
    assert translate_state(t, (-dx, -dp)).center == s.center or np.allclose(
        translate_state(t, (-dx, -dp)).center.as_array(), s.center.as_array()
    )


def test_translation_examples():
    h1 = HermiteState.hermite(1)
    assert translate_state(h1, (0, 0)) == h1
    moved = translate_state(h1, (1, 0))
    assert np.max(np.abs(wigner_eval(moved, np.array([1.0, 0.0]) + np.array([[math.sqrt(0.5), 0], [0, math.sqrt(0.5)]])))) < 1e-15


def test_centered_examples():
    assert is_centered_at_origin(HermiteState.hermite(1)) == (True, -1)
    f1 = HermiteState([0, 0, 0.5, 0, math.sqrt(3) / 2])
    assert is_centered_at_origin(f1) == (True, 1)
    ok, _ = is_centered_at_origin(translate_state(HermiteState.hermite(0), (1, 0)))
    assert not ok


@given(st.integers(0, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_centered_test_follows_translation(n, dx, dp):
    s = HermiteState.hermite(n)
    assert is_centered_at_origin(translate_state(s, (dx, dp)), point=(dx, dp)) == is_centered_at_origin(s)


def test_state_validation_and_canonical_degree():
    with pytest.raises(ValueError):
        HermiteState([])
    with pytest.raises(ValueError):
        HermiteState([1.0, 1.0])
    s = HermiteState([1.0, 1.0, 0.0, 0.0], renormalize=True)
    assert s.N == 1 and abs(s.norm() - 1) < 1e-15
    with pytest.raises(ValueError):
        HermiteState([1.0], hbar=-1)


def test_state_json_roundtrip():
    s = random_state(7, 3, hbar=0.5, center=(0.2, -0.1), frame=SymplecticMat2.squeeze(0.2))
    assert HermiteState.from_dict(s.to_dict()) == s
    with pytest.raises(ValueError):
        HermiteState.from_dict({"coefficients": [1]})


def test_frame_factorization_reconstructs():
    S = (SymplecticMat2.squeeze(0.4) @ SymplecticMat2.rotation(0.7)).as_array()
    alpha, s, xi = frame_factorization(SymplecticMat2.from_array(S))
    R = SymplecticMat2.rotation(alpha).as_array()
    assert np.allclose(R @ np.array([[s, 0], [xi / s, 1 / s]]), S, atol=1e-12)


def test_phase_point_arithmetic():
    a, b = PhasePoint(1, 2), PhasePoint(0.5, -1)
    assert a + b == PhasePoint(1.5, 1) and a - b == PhasePoint(0.5, 3)
    with pytest.raises(ValueError):
        PhasePoint(float("nan"), 0)
