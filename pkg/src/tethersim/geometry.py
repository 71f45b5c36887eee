"""Cable geometry: spherical-angle parametrization of the cable direction.

The cable hangs below the vehicle; its direction is parametrized by azimuth
alpha and polar angle beta measured from straight down,

    e_l(alpha, beta) = [sin(beta) cos(alpha), sin(beta) sin(alpha), -cos(beta)]

so beta = 0 is a vertical cable.  The cable angular velocity lives in the
tangent plane of the unit sphere and maps from the angle rates through
E = [e_l x d(e_l)/d(alpha), e_l x d(e_l)/d(beta)].
"""

import numpy as np


def skew(v):
    """Skew-symmetric matrix such that skew(v) @ w == cross(v, w)."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def unskew(m):
    """Inverse of skew for a skew-symmetric matrix (the vee map)."""
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def cable_direction(alpha, beta):
    """Unit vector from the vehicle toward the hook."""
    sb = np.sin(beta)
    return np.array([sb * np.cos(alpha), sb * np.sin(alpha), -np.cos(beta)])


def polar_tangent(alpha, beta):
    """Unit tangent d(e_l)/d(beta); points away from vertical."""
    cb = np.cos(beta)
    return np.array([cb * np.cos(alpha), cb * np.sin(alpha), np.sin(beta)])


def plane_normal(alpha):
    """Unit normal of the vertical plane containing the cable."""
    return np.array([-np.sin(alpha), np.cos(alpha), 0.0])


def beta_axis(alpha):
    """Rotation axis of a pure polar-angle swing (equals -plane_normal).

    omega_l = beta_dot * beta_axis for a swing at fixed azimuth; this is the
    second column of angle_rate_map.
    """
    return np.array([np.sin(alpha), -np.cos(alpha), 0.0])


def angle_rate_map(alpha, beta):
    """3x2 map E from angle rates to cable angular velocity.

    omega_l = E @ [alpha_dot, beta_dot]; columns are e_l x d(e_l)/d(alpha)
    = sin(beta) * polar_tangent and e_l x d(e_l)/d(beta) = beta_axis.
    """
    E = np.empty((3, 2))
    E[:, 0] = np.sin(beta) * polar_tangent(alpha, beta)
    E[:, 1] = beta_axis(alpha)
    return E


def angle_rate_map_dot(alpha, beta, alpha_dot, beta_dot):
    """Time derivative of angle_rate_map along (alpha_dot, beta_dot)."""
    sb = np.sin(beta)
    cb = np.cos(beta)
    e = cable_direction(alpha, beta)
    t = polar_tangent(alpha, beta)
    b = beta_axis(alpha)
    Edot = np.empty((3, 2))
    Edot[:, 0] = beta_dot * cb * t - alpha_dot * sb * cb * b - beta_dot * sb * e
    Edot[:, 1] = alpha_dot * (cb * t + sb * e)
    return Edot


def angles_from_direction(e_l, fallback_alpha=0.0):
    """Recover (alpha, beta) from a downward-pointing unit vector.

    beta = atan2(|horizontal part|, -z) is always in [0, pi); when the
    horizontal part vanishes the azimuth is undefined and fallback_alpha is
    returned.
    """
    horiz = np.hypot(e_l[0], e_l[1])
    beta = np.arctan2(horiz, -e_l[2])
    if horiz < 1e-12:
        return float(fallback_alpha), float(beta)
    return float(np.arctan2(e_l[1], e_l[0])), float(beta)


def angular_velocity(alpha, beta, alpha_dot, beta_dot):
    """Cable angular velocity omega_l = E @ [alpha_dot, beta_dot]."""
    return angle_rate_map(alpha, beta) @ np.array([alpha_dot, beta_dot])
