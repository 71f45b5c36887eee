"""Cable-geometry invariants and finite-difference oracles."""

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from tethersim import geometry

angles = st.floats(-np.pi, np.pi, allow_nan=False)
polar = st.floats(0.05, np.pi - 0.05, allow_nan=False)
rates = st.floats(-3.0, 3.0, allow_nan=False)
vec3 = st.lists(st.floats(-5.0, 5.0, allow_nan=False), min_size=3, max_size=3)


@given(vec3, vec3)
def test_skew_matches_cross(v, w):
    v, w = np.array(v), np.array(w)
    assert np.allclose(geometry.skew(v) @ w, np.cross(v, w), atol=1e-12)


@given(vec3)
def test_unskew_inverts_skew(v):
    v = np.array(v)
    assert np.array_equal(geometry.unskew(geometry.skew(v)), v)


@given(angles, polar)
def test_cable_direction_unit_and_downward_at_zero(alpha, beta):
    e = geometry.cable_direction(alpha, beta)
    assert abs(np.linalg.norm(e) - 1.0) < 1e-12
    straight_down = geometry.cable_direction(alpha, 0.0)
    assert np.allclose(straight_down, [0.0, 0.0, -1.0], atol=1e-12)


@given(angles, polar)
def test_polar_tangent_is_beta_derivative(alpha, beta):
    h = 1e-6
    fd = (
        geometry.cable_direction(alpha, beta + h)
        - geometry.cable_direction(alpha, beta - h)
    ) / (2.0 * h)
    t = geometry.polar_tangent(alpha, beta)
    assert np.allclose(t, fd, atol=1e-8)
    assert abs(np.linalg.norm(t) - 1.0) < 1e-12
    assert abs(t @ geometry.cable_direction(alpha, beta)) < 1e-12


@given(angles)
def test_frame_orthogonality(alpha):
    n = geometry.plane_normal(alpha)
    b = geometry.beta_axis(alpha)
    assert np.allclose(b, -n, atol=1e-15)
    for beta in (0.3, 1.2):
        e = geometry.cable_direction(alpha, beta)
        t = geometry.polar_tangent(alpha, beta)
        assert abs(n @ e) < 1e-12
        assert abs(n @ t) < 1e-12


@given(angles, polar)
def test_angle_rate_map_columns(alpha, beta):
    """Columns of E are e x d(e)/d(alpha) and e x d(e)/d(beta)."""
    h = 1e-6
    e = geometry.cable_direction(alpha, beta)
    de_da = (
        geometry.cable_direction(alpha + h, beta)
        - geometry.cable_direction(alpha - h, beta)
    ) / (2.0 * h)
    de_db = (
        geometry.cable_direction(alpha, beta + h)
        - geometry.cable_direction(alpha, beta - h)
    ) / (2.0 * h)
    E = geometry.angle_rate_map(alpha, beta)
    assert np.allclose(E[:, 0], np.cross(e, de_da), atol=1e-8)
    assert np.allclose(E[:, 1], np.cross(e, de_db), atol=1e-8)


@given(angles, polar, rates, rates)
def test_angular_velocity_moves_direction(alpha, beta, ad, bd):
    """d(e)/dt equals omega_l x e along any angle trajectory."""
    h = 1e-6
    fd = (
        geometry.cable_direction(alpha + h * ad, beta + h * bd)
        - geometry.cable_direction(alpha - h * ad, beta - h * bd)
    ) / (2.0 * h)
    wl = geometry.angular_velocity(alpha, beta, ad, bd)
    e = geometry.cable_direction(alpha, beta)
    assert np.allclose(np.cross(wl, e), fd, atol=1e-6)


@given(angles, polar, rates, rates)
def test_angle_rate_map_dot_is_time_derivative(alpha, beta, ad, bd):
    h = 1e-6
    fd = (
        geometry.angle_rate_map(alpha + h * ad, beta + h * bd)
        - geometry.angle_rate_map(alpha - h * ad, beta - h * bd)
    ) / (2.0 * h)
    Edot = geometry.angle_rate_map_dot(alpha, beta, ad, bd)
    assert np.allclose(Edot, fd, atol=1e-5)


@given(angles, polar)
def test_angles_from_direction_inverts(alpha, beta):
    e = geometry.cable_direction(alpha, beta)
    a, b = geometry.angles_from_direction(e)
    assert abs(b - beta) < 1e-9
    # Azimuth is defined modulo 2 pi.
    assert abs((a - alpha + np.pi) % (2.0 * np.pi) - np.pi) < 1e-9


def test_angles_from_direction_vertical_fallback():
    a, b = geometry.angles_from_direction(
        np.array([0.0, 0.0, -1.0]), fallback_alpha=1.23
    )
    assert a == 1.23
    assert b == 0.0
