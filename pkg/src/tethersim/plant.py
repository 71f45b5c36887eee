"""Coupled vehicle-winch-cable plant.

The simulated truth is a quadrotor of mass M_q rigidly attached to a winch
paying out a massless, inextensible, taut cable of controlled length L with a
point-mass hook M_h at its end.  External interaction enters as a force F_c
applied at the hook.  The translational dynamics of the vehicle include the
full cable coupling:

    (M_q+M_h) xq_dd = (M_q+M_h) g + (I - (M_h/M_q) hat(e)^2) T R e_z
                      - M_h Lddot e + (I + hat(e)^2) F_c
                      + M_h L omega_l x (omega_l x e)

with e the cable direction and omega_l its angular velocity; the attitude
follows rigid-body dynamics J Omega_dot = -Omega x J Omega + tau, and the
cable direction follows

    M_q L^2 omega_l_dot = -2 M_q L Ldot omega_l - L e x (T R e_z)
                          + (M_q/M_h) L e x F_c.

The winch tracks a commanded length acceleration directly (the length and its
rate are plant states, clamped at hard stops).  Cable tension is not a state:
it is recovered exactly from the hook force balance
M_h xh_dd = F_c + M_h g - f_T e and clamped at zero when the massless cable
would have to push (slack).

Numerical integration is a classical fixed-step 4th-order scheme with
rotation-matrix re-orthonormalization after every step.  The hot scalar core
lives in tethersim._kernels (compiled when available).
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import geometry
from ._kernels import COMPILED, core as _core

SingularConfigurationError = _core.SingularConfigurationError

STATE_SIZE = _core.STATE_SIZE

# Flat-state indices (see tethersim._kernels._core for the full layout).
IX_POS = slice(0, 3)
IX_VEL = slice(3, 6)
IX_ROT = slice(6, 15)
IX_OMEGA = slice(15, 18)
IX_ALPHA = 18
IX_BETA = 19
IX_ALPHA_DOT = 20
IX_BETA_DOT = 21
IX_LENGTH = 22
IX_LENGTH_RATE = 23


@dataclass
class PlantParams:
    """Physical parameters of the vehicle-winch-cable assembly."""

    M_q: float = 2.1
    M_h: float = 0.012
    J: np.ndarray = field(default_factory=lambda: np.diag([0.03, 0.03, 0.05]))
    g: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))
    L_min: float = 0.1
    L_max: float = 1.0

    def to_tuple(self):
        """Flat parameter tuple consumed by the scalar kernel."""
        J = np.asarray(self.J, dtype=float)
        Jinv = np.linalg.inv(J)
        g = np.asarray(self.g, dtype=float)
        return (
            float(self.M_q),
            float(self.M_h),
            *(float(x) for x in J.ravel()),
            *(float(x) for x in Jinv.ravel()),
            float(g[0]),
            float(g[1]),
            float(g[2]),
            float(self.L_min),
            float(self.L_max),
        )


@dataclass
class CableState:
    """Cable attitude (azimuth/polar angles), rates, length and length rate."""

    alpha: float = 0.0
    beta: float = 0.0
    alpha_dot: float = 0.0
    beta_dot: float = 0.0
    length: float = 0.5
    length_rate: float = 0.0

    def direction(self):
        return geometry.cable_direction(self.alpha, self.beta)

    def angular_velocity(self):
        return geometry.angular_velocity(
            self.alpha, self.beta, self.alpha_dot, self.beta_dot
        )


@dataclass
class PlantState:
    """Full simulated truth: vehicle pose/twist plus cable state."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    omega: np.ndarray = field(default_factory=lambda: np.zeros(3))
    cable: CableState = field(default_factory=CableState)

    def to_flat(self):
        out = np.empty(STATE_SIZE)
        out[IX_POS] = self.position
        out[IX_VEL] = self.velocity
        out[IX_ROT] = np.asarray(self.rotation).ravel()
        out[IX_OMEGA] = self.omega
        out[IX_ALPHA] = self.cable.alpha
        out[IX_BETA] = self.cable.beta
        out[IX_ALPHA_DOT] = self.cable.alpha_dot
        out[IX_BETA_DOT] = self.cable.beta_dot
        out[IX_LENGTH] = self.cable.length
        out[IX_LENGTH_RATE] = self.cable.length_rate
        return out

    @classmethod
    def from_flat(cls, flat):
        flat = np.asarray(flat, dtype=float)
        return cls(
            position=flat[IX_POS].copy(),
            velocity=flat[IX_VEL].copy(),
            rotation=flat[IX_ROT].reshape(3, 3).copy(),
            omega=flat[IX_OMEGA].copy(),
            cable=CableState(
                alpha=float(flat[IX_ALPHA]),
                beta=float(flat[IX_BETA]),
                alpha_dot=float(flat[IX_ALPHA_DOT]),
                beta_dot=float(flat[IX_BETA_DOT]),
                length=float(flat[IX_LENGTH]),
                length_rate=float(flat[IX_LENGTH_RATE]),
            ),
        )

    def hook_position(self):
        return self.position + self.cable.length * self.cable.direction()

    def hook_velocity(self):
        e = self.cable.direction()
        wl = self.cable.angular_velocity()
        return (
            self.velocity
            + self.cable.length_rate * e
            + self.cable.length * np.cross(wl, e)
        )


@dataclass
class PlantInputs:
    """Actuation and external interaction applied over one step."""

    thrust: float = 0.0
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))
    winch_accel: float = 0.0
    hook_force: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def to_tuple(self):
        return (
            float(self.thrust),
            float(self.torque[0]),
            float(self.torque[1]),
            float(self.torque[2]),
            float(self.winch_accel),
            float(self.hook_force[0]),
            float(self.hook_force[1]),
            float(self.hook_force[2]),
        )


class TensionResult(NamedTuple):
    value: float  # clamped at zero
    raw: float  # signed value from the force balance
    slack: bool  # True when the raw value was negative


def hover_thrust(params):
    """Thrust that balances the total weight with a vertical cable."""
    return (params.M_q + params.M_h) * float(np.linalg.norm(params.g))


def hover_state(params=None, length=0.5, position=(0.0, 0.0, 1.5), alpha=0.0):
    """Equilibrium state: level vehicle, vertical cable at rest."""
    state = PlantState(position=np.array(position, dtype=float))
    state.cable.length = float(length)
    state.cable.alpha = float(alpha)
    return state


def hover_inputs(params, tension_free=True):
    """Inputs that hold hover_state stationary (no interaction force)."""
    return PlantInputs(thrust=hover_thrust(params))


def coupled_derivative(state, inputs, params):
    """Time derivative of the flat plant state (layout per to_flat).

    Raises SingularConfigurationError when the cable is vertical (sin beta <
    1e-6) while the dynamics demand a significant azimuth acceleration.
    """
    d = _core.deriv(
        tuple(state.to_flat()), inputs.to_tuple(), params.to_tuple()
    )
    return np.array(d)


def integrate_step(state, inputs, params, dt):
    """One fixed-step 4th-order integration step; returns the new state."""
    flat = _core.rk4_step(
        tuple(state.to_flat()), inputs.to_tuple(), params.to_tuple(), float(dt)
    )
    return PlantState.from_flat(flat)


def cable_tension(state, inputs, params):
    """Cable tension from the hook force balance (clamped, raw, slack flag)."""
    value, raw = _core.cable_tension(
        tuple(state.to_flat()), inputs.to_tuple(), params.to_tuple()
    )
    return TensionResult(value=value, raw=raw, slack=raw < 0.0)


def hook_dynamics_residual(state, inputs, params, hook_accel=None):
    """Residual of the hook force balance M_h xh_dd - F_c - M_h g + f_T e.

    hook_accel may come from an independent source (e.g. finite differences
    of a logged hook trajectory); if omitted, the plant's own consistent hook
    acceleration is used and the residual is zero to rounding.
    """
    su = (tuple(state.to_flat()), inputs.to_tuple(), params.to_tuple())
    e = state.cable.direction()
    f_T, _ = _core.cable_tension(*su)
    if hook_accel is None:
        d = coupled_derivative(state, inputs, params)
        a_q = d[IX_VEL]
        wl = state.cable.angular_velocity()
        wl_dot = geometry.angle_rate_map(
            state.cable.alpha, state.cable.beta
        ) @ d[[IX_ALPHA_DOT, IX_BETA_DOT]] + geometry.angle_rate_map_dot(
            state.cable.alpha,
            state.cable.beta,
            state.cable.alpha_dot,
            state.cable.beta_dot,
        ) @ np.array([state.cable.alpha_dot, state.cable.beta_dot])
        L = state.cable.length
        Ld = state.cable.length_rate
        Ldd = d[IX_LENGTH_RATE]
        hook_accel = (
            a_q
            + Ldd * e
            + 2.0 * Ld * np.cross(wl, e)
            + L * np.cross(wl_dot, e)
            + L * np.cross(wl, np.cross(wl, e))
        )
    g = np.asarray(params.g, dtype=float)
    return (
        params.M_h * np.asarray(hook_accel, dtype=float)
        - np.asarray(inputs.hook_force, dtype=float)
        - params.M_h * g
        + f_T * e
    )


def cable_subsystem_accel(state, inputs, params, tension):
    """Cable-frame accelerations from the reduced cable/winch equations.

    Returns (beta_dd, axial_accel) where beta_dd comes from the projected
    swing equation

        M_q M_h L^2 beta_dd = ((-M_q M_h L^2 Edot - 2 M_q M_h L Ldot E) eta_dot
                               - M_h L hat(e) F_t + M_q L hat(e) F_c) . n

    (n the in-plane swing axis) and axial_accel is the hook acceleration
    along the cable from its axial force balance,

        M_h axial = M_h g . e - f_T + F_c . e.

    For a stationary vehicle and non-rotating cable, axial_accel equals the
    length acceleration Lddot.  This is an independent cross-check of
    coupled_derivative, not the simulated truth.
    """
    cab = state.cable
    L = cab.length
    mq, mh = params.M_q, params.M_h
    e = cab.direction()
    n = geometry.beta_axis(cab.alpha)
    E = geometry.angle_rate_map(cab.alpha, cab.beta)
    Edot = geometry.angle_rate_map_dot(
        cab.alpha, cab.beta, cab.alpha_dot, cab.beta_dot
    )
    eta_dot = np.array([cab.alpha_dot, cab.beta_dot])
    F_t = float(inputs.thrust) * np.asarray(state.rotation)[:, 2]
    F_c = np.asarray(inputs.hook_force, dtype=float)
    forcing = (
        (-mq * mh * L**2 * Edot - 2.0 * mq * mh * L * cab.length_rate * E) @ eta_dot
        - mh * L * np.cross(e, F_t)
        + mq * L * np.cross(e, F_c)
    )
    beta_dd = float(forcing @ n) / (mq * mh * L**2)
    g = np.asarray(params.g, dtype=float)
    axial = float(g @ e) - float(tension) / mh + float(F_c @ e) / mh
    return beta_dd, axial


def default_params():
    return PlantParams()
