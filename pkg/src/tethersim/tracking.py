"""Vehicle tracking controller and winch length controller.

The vehicle controller is a geometric position/attitude cascade.  The
position loop computes a commanded acceleration, then feedback-linearizes the
vehicle translational dynamics (including the cable coupling terms, treated
as measured feedforward) to obtain a desired thrust vector:

    A F_t_des = (M_q+M_h)(a_cmd - g) + M_h Lddot e - e (e . F_c) + M_h L |w|^2 e,
    A = I - (M_h/M_q) hat(e)^2  (always invertible; closed-form inverse).

Thrust is the projection of the desired thrust vector on the current body z
axis; the desired attitude aligns body z with the desired thrust direction,
and the attitude loop is a standard SO(3) proportional-derivative law with
gyroscopic compensation.

The winch runs an anti-windup PID on the cable-length error whose closed-loop
error dynamics are

    e_dd + K_D e_d + K_P e + K_I int(e) = 0,

stable iff K_P, K_I, K_D > 0 and K_D K_P > K_I (third-order
Routh-Hurwitz condition).
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry


@dataclass
class TrackingParams:
    k_x: float = 16.0
    k_v: float = 8.0
    k_R: float = 30.0
    k_Omega: float = 5.0
    T_max: float = 40.0
    yaw_ref: float = 0.0


@dataclass
class WinchPidParams:
    K_P: float = 25.0
    K_I: float = 10.0
    K_D: float = 10.0
    accel_max: float = 6.0


@dataclass
class TrackingTarget:
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    accel: np.ndarray = field(default_factory=lambda: np.zeros(3))


def thrust_matrix_inverse(e_l, mass_ratio):
    """Closed-form inverse of A = I - r hat(e)^2 = (1+r) I - r e e^T.

    For unit e the inverse is (1/(1+r)) I + (r/(1+r)) e e^T.
    """
    r = mass_ratio
    return (np.eye(3) + r * np.outer(e_l, e_l)) / (1.0 + r)


def quad_tracking_control(
    state,
    target,
    hook_force,
    winch_accel_cmd,
    plant_params,
    params,
):
    """Thrust, body torque, and a saturation flag for one control tick.

    state is the current PlantState (vehicle pose/twist plus cable state,
    mocap-grade); hook_force is the interaction force fed forward (estimate
    or truth); winch_accel_cmd is the commanded cable-length acceleration.
    """
    mq, mh = plant_params.M_q, plant_params.M_h
    g = np.asarray(plant_params.g, dtype=float)
    cab = state.cable
    e = cab.direction()
    w2 = float(cab.angular_velocity() @ cab.angular_velocity())
    F_c = np.asarray(hook_force, dtype=float)

    e_q = state.position - np.asarray(target.position, dtype=float)
    e_v = state.velocity - np.asarray(target.velocity, dtype=float)
    a_cmd = np.asarray(target.accel, dtype=float) - params.k_x * e_q - params.k_v * e_v

    rhs = (
        (mq + mh) * (a_cmd - g)
        + (mh * winch_accel_cmd - float(e @ F_c) + mh * cab.length * w2) * e
    )
    F_t_des = thrust_matrix_inverse(e, mh / mq) @ rhs

    R = np.asarray(state.rotation)
    thrust = float(F_t_des @ R[:, 2])
    saturated = False
    if thrust < 0.0:
        thrust = 0.0
        saturated = True
    elif thrust > params.T_max:
        thrust = params.T_max
        saturated = True

    norm_des = float(np.linalg.norm(F_t_des))
    if norm_des < 1e-9:
        b3 = np.array([0.0, 0.0, 1.0])
    else:
        b3 = F_t_des / norm_des
    c1 = np.array([np.cos(params.yaw_ref), np.sin(params.yaw_ref), 0.0])
    b2 = np.cross(b3, c1)
    n2 = float(np.linalg.norm(b2))
    if n2 < 1e-9:
        # Desired thrust parallel to the yaw reference: fall back to world y.
        b2 = np.array([0.0, 1.0, 0.0])
        n2 = 1.0
    b2 = b2 / n2
    b1 = np.cross(b2, b3)
    R_d = np.column_stack([b1, b2, b3])

    e_R = 0.5 * geometry.unskew(R_d.T @ R - R.T @ R_d)
    e_W = state.omega  # desired body rate is zero
    J = np.asarray(plant_params.J, dtype=float)
    torque = (
        -params.k_R * e_R
        - params.k_Omega * e_W
        + np.cross(state.omega, J @ state.omega)
    )
    return thrust, torque, saturated


class WinchPid:
    """Length-tracking PID with output limiting and integrator freeze.

    The integral term is frozen whenever the output saturates or the length
    sits at a winch hard stop, so the integrator cannot wind up against the
    actuator limits.
    """

    def __init__(self, params):
        self.params = params
        self._integral = 0.0

    def reset(self):
        self._integral = 0.0

    def update(self, e_L, e_L_dot, dt, feedforward=0.0, at_limit=False):
        p = self.params
        raw = (
            feedforward
            - p.K_P * e_L
            - p.K_I * self._integral
            - p.K_D * e_L_dot
        )
        out = float(np.clip(raw, -p.accel_max, p.accel_max))
        if out == raw and not at_limit:
            self._integral += dt * e_L
        return out


def routh_hurwitz_check(K_P, K_I, K_D):
    """(stable, margin) for s^3 + K_D s^2 + K_P s + K_I.

    Stable iff all gains are positive and K_D K_P > K_I; margin is the
    first-column slack K_D K_P - K_I (negative or zero when unstable or
    marginal).
    """
    margin = K_D * K_P - K_I
    stable = K_P > 0.0 and K_I > 0.0 and K_D > 0.0 and margin > 0.0
    return stable, margin


def winch_error_response(K_P, K_I, K_D, e0=0.1, duration=30.0, dt=0.001):
    """Simulated closed-loop length-error response (t, e arrays).

    Integrates e_dd = -K_D e_d - K_P e - K_I int(e) from a step error with a
    classical 4th-order scheme; used to compare the gain classifier against
    the actual transient.
    """
    n = int(round(duration / dt))
    t = np.arange(n + 1) * dt

    def f(y):
        e, ed, ei = y
        return np.array([ed, -K_D * ed - K_P * e - K_I * ei, e])

    y = np.array([e0, 0.0, 0.0])
    out = np.empty(n + 1)
    out[0] = e0
    for k in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
        out[k + 1] = y[0]
    return t, out
