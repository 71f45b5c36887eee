"""Virtual impedance models and command shaping.

Two admittance schemes turn the sensed interaction into reference
adjustments:

* Coupled model (cable-frame): a 2-DOF mass-spring-damper in the deviations
  zeta = [delta_beta, delta_L] from the virtual reference,

      M zeta_dd + B zeta_d + K zeta = tau_c,
      M = diag(M_q M_h (L^v)^2, M_h),
      tau_c = [M_q L n . (e_l x F_c), F_c . e_l],

  with n the in-plane swing axis.  M (and the critically damped B =
  2 sqrt(M K)) follow the time-varying virtual length L^v and are held over
  each integration step.

* Separate model (world-frame): a 4-DOF diagonal system in
  zeta' = [delta_x (3), delta_L'] driven by the total cable tension,
  tau'_c = [f_T e_l, -f_T], M' = diag(M_q, M_q, M_q, M_h).  Because f_T
  includes the hook weight, this model carries a small constant rest offset
  by construction.

The impedance outputs pass through first-order command shaping with an
exponentially discounted integral (discount gamma per second),

    delta_x_q = xi_1 p + xi_2 I[p],   I[p](t) = int_0^t gamma^(t-s) p(s) ds,

discretized as I <- gamma^dt I + dt p, and the shaped adjustments offset the
virtual reference (the cable-length command is clamped to the winch range).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry


@dataclass
class CvimParams:
    """Cable-frame impedance gains and shaping gains."""

    K_beta: float = 10.0
    K_l: float = 10.0
    xi1: np.ndarray = field(default_factory=lambda: np.array([3.0, 3.0, 0.2]))
    xi2: np.ndarray = field(default_factory=lambda: np.array([0.05, 0.05, 0.002]))
    xi3: float = 1.0
    xi4: float = 0.02
    gamma: float = 0.95


@dataclass
class SvimParams:
    """World-frame impedance gains and shaping gains.

    B_diag is derived from the critical-damping rule 2 sqrt(M' K') unless
    given explicitly.
    """

    K_diag: np.ndarray = field(default_factory=lambda: np.full(4, 10.0))
    B_diag: np.ndarray | None = None
    xi1: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0, 0.1]))
    xi2: np.ndarray = field(default_factory=lambda: np.array([0.05, 0.05, 0.005]))
    xi3: float = 1.0
    xi4: float = 0.02
    gamma: float = 0.95


@dataclass
class ImpedanceState:
    """Second-order impedance state (deviation and its rate)."""

    zeta: np.ndarray
    zeta_dot: np.ndarray

    @classmethod
    def zeros(cls, n):
        return cls(zeta=np.zeros(n), zeta_dot=np.zeros(n))


@dataclass
class ShapingState:
    """Discounted integrals of the shaping inputs (vector + scalar channel)."""

    acc_vec: np.ndarray = field(default_factory=lambda: np.zeros(3))
    acc_scalar: float = 0.0


def cvim_matrices(params, plant_params, L_v):
    """Diagonals (M, B, K) of the cable-frame impedance at virtual length L_v."""
    M = np.array(
        [plant_params.M_q * plant_params.M_h * L_v**2, plant_params.M_h]
    )
    K = np.array([params.K_beta, params.K_l])
    B = 2.0 * np.sqrt(M * K)
    return M, B, K


def cvim_forcing(hook_force, e_l, length, n_beta, M_q):
    """Impedance forcing [M_q L n . (e_l x F_c), F_c . e_l].

    n_beta is the axis the swing deviation rotates about; pass the in-plane
    swing axis (geometry.beta_axis) so a force that pushes the hook away from
    vertical produces a positive swing channel.
    """
    F_c = np.asarray(hook_force, dtype=float)
    return np.array(
        [
            M_q * length * float(np.dot(n_beta, np.cross(e_l, F_c))),
            float(np.dot(F_c, e_l)),
        ]
    )


def svim_matrices(params, plant_params):
    """Diagonals (M', B', K') of the world-frame impedance."""
    M = np.array(
        [plant_params.M_q, plant_params.M_q, plant_params.M_q, plant_params.M_h]
    )
    K = np.asarray(params.K_diag, dtype=float)
    B = (
        np.asarray(params.B_diag, dtype=float)
        if params.B_diag is not None
        else 2.0 * np.sqrt(M * K)
    )
    return M, B, K


def svim_forcing(tension, e_l):
    """World-frame forcing [f_T e_l, f_T] from the measured cable tension.

    The translational channels are pushed along the cable direction, and the
    length channel is pushed positive, so that excess tension pays cable out
    (compliance) rather than reeling it in against the load.
    """
    return np.array(
        [tension * e_l[0], tension * e_l[1], tension * e_l[2], tension]
    )


def impedance_step(state, M, B, K, tau, dt):
    """Classical 4th-order step of M z_dd + B z_d + K z = tau (diagonals).

    The coefficient diagonals and forcing are held over the step.
    """
    M = np.asarray(M, dtype=float)

    def f(z, zd):
        return zd, (tau - B * zd - K * z) / M

    z, zd = state.zeta, state.zeta_dot
    k1z, k1v = f(z, zd)
    k2z, k2v = f(z + 0.5 * dt * k1z, zd + 0.5 * dt * k1v)
    k3z, k3v = f(z + 0.5 * dt * k2z, zd + 0.5 * dt * k2v)
    k4z, k4v = f(z + dt * k3z, zd + dt * k3v)
    return ImpedanceState(
        zeta=z + dt / 6.0 * (k1z + 2.0 * (k2z + k3z) + k4z),
        zeta_dot=zd + dt / 6.0 * (k1v + 2.0 * (k2v + k3v) + k4v),
    )


def cvim_step(state, forcing, params, plant_params, L_v, dt):
    M, B, K = cvim_matrices(params, plant_params, L_v)
    return impedance_step(state, M, B, K, np.asarray(forcing, dtype=float), dt)


def svim_step(state, forcing, params, plant_params, dt):
    M, B, K = svim_matrices(params, plant_params)
    return impedance_step(state, M, B, K, np.asarray(forcing, dtype=float), dt)


def discounted_update(acc, value, gamma, dt):
    """One step of I <- gamma^dt I + dt value (discount gamma per second)."""
    return gamma**dt * acc + dt * value


def shape_commands(vec_input, scalar_input, state, xi1, xi2, xi3, xi4, gamma, dt):
    """Apply proportional + discounted-integral shaping to both channels.

    Returns (delta_x (3,), delta_L_bar, new ShapingState).  For the coupled
    model vec_input is the admittance error e_ac and scalar_input the length
    deviation delta_L; for the separate model they are delta_x' and delta_L'.
    """
    vec_input = np.asarray(vec_input, dtype=float)
    acc_vec = discounted_update(state.acc_vec, vec_input, gamma, dt)
    acc_scalar = discounted_update(state.acc_scalar, scalar_input, gamma, dt)
    delta_x = np.asarray(xi1, dtype=float) * vec_input + np.asarray(
        xi2, dtype=float
    ) * acc_vec
    delta_L = xi3 * scalar_input + xi4 * acc_scalar
    return delta_x, float(delta_L), ShapingState(acc_vec=acc_vec, acc_scalar=acc_scalar)


def admittance_error(beta_v, delta_beta, alpha_c, L_v):
    """Cartesian admittance error e_ac = L^v (e_l^d - e_l^v).

    Both directions are evaluated at the current azimuth alpha_c; the desired
    polar angle is beta^d = beta^v + delta_beta.
    """
    e_d = geometry.cable_direction(alpha_c, beta_v + delta_beta)
    e_v = geometry.cable_direction(alpha_c, beta_v)
    return L_v * (e_d - e_v)


def desired_motion(x_q_v, delta_x, L_v, delta_L_bar, L_min, L_max):
    """Offset the virtual reference by the shaped adjustments.

    The desired cable length is clamped to the winch range.
    """
    x_d = np.asarray(x_q_v, dtype=float) + np.asarray(delta_x, dtype=float)
    L_d = float(np.clip(L_v + delta_L_bar, L_min, L_max))
    return x_d, L_d


def nominal_residual(
    alpha_v,
    beta_v,
    alpha_dot_v,
    beta_dot_v,
    beta_ddot_v,
    L_v,
    L_dot_v,
    L_ddot_v,
    thrust_vec_v,
    tension_v,
    plant_params,
):
    """Residuals of the contact-free nominal cable/winch dynamics.

    Returns (swing residual, length residual); both vanish when the virtual
    reference satisfies

        M_q M_h (L^v)^2 beta_dd^v = ((-M_q M_h (L^v)^2 Edot^v
            - 2 M_q M_h L^v Ldot^v E^v) eta_dot^v - M_h L^v hat(e^v) F_t^v) . n
        M_h Lddot^v = M_h g . e_l^v - f_T^v.
    """
    mq, mh = plant_params.M_q, plant_params.M_h
    e = geometry.cable_direction(alpha_v, beta_v)
    n = geometry.beta_axis(alpha_v)
    E = geometry.angle_rate_map(alpha_v, beta_v)
    Edot = geometry.angle_rate_map_dot(alpha_v, beta_v, alpha_dot_v, beta_dot_v)
    eta_dot = np.array([alpha_dot_v, beta_dot_v])
    F_t = np.asarray(thrust_vec_v, dtype=float)
    forcing = (
        (-mq * mh * L_v**2 * Edot - 2.0 * mq * mh * L_v * L_dot_v * E) @ eta_dot
        - mh * L_v * np.cross(e, F_t)
    )
    r_swing = mq * mh * L_v**2 * beta_ddot_v - float(forcing @ n)
    g = np.asarray(plant_params.g, dtype=float)
    r_length = mh * L_ddot_v - (mh * float(g @ e) - tension_v)
    return r_swing, r_length


def stiffness_preset(params, factor):
    """Scaled-stiffness copy of an impedance parameter set.

    Only the swing (coupled model) / translational (separate model) channels
    scale; the cable-length channel keeps its gain so the winch response is
    identical at every stiffness level.  Damping re-derives critically unless
    explicitly set.
    """
    if isinstance(params, CvimParams):
        return replace(params, K_beta=params.K_beta * factor)
    K = np.asarray(params.K_diag, dtype=float).copy()
    K[:3] *= factor
    return replace(params, K_diag=K)
