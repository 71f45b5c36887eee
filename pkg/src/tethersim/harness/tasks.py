"""Task definitions: virtual references and scripted operator force profiles.

Two interaction tasks are provided:

* loading_unloading_in_place: the vehicle holds a hover pose while the
  operator pulls the hook toward a fixed target (a C1 spring force smoothly
  saturated at F_max, gated by a raised-cosine on/off window).

* transporting: the vehicle carries the hanging hook along a straight,
  constant-speed line while the operator applies a steady guidance hold force
  plus a compactly-supported lateral bump that steers the load around an
  obstacle placed on the path midpoint.

All operator force profiles are C1 in time along trajectories.  Scalar
profile parameters receive a seeded +-10 % jitter so repeated seeds explore
slightly different interactions while staying reproducible.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class ReferenceSample:
    position: np.ndarray
    velocity: np.ndarray
    accel: np.ndarray
    length: float
    length_rate: float
    length_accel: float
    beta: float = 0.0


class HoverReference:
    """Stationary virtual reference at a fixed pose and cable length."""

    def __init__(self, position, length):
        self.position = np.asarray(position, dtype=float)
        self.length = float(length)

    def sample(self, t):
        return ReferenceSample(
            position=self.position.copy(),
            velocity=np.zeros(3),
            accel=np.zeros(3),
            length=self.length,
            length_rate=0.0,
            length_accel=0.0,
        )


class LineReference:
    """Straight line at constant cruise speed with cosine speed ramps.

    The profile is stationary for pre_roll seconds, ramps to the cruise
    speed over ramp_time with a raised-cosine velocity (continuous
    acceleration), cruises, and mirrors the ramp at the end.
    """

    def __init__(self, start, direction, distance, speed, ramp_time, pre_roll, length):
        self.start = np.asarray(start, dtype=float)
        d = np.asarray(direction, dtype=float)
        self.direction = d / np.linalg.norm(d)
        self.distance = float(distance)
        self.speed = float(speed)
        self.ramp = float(ramp_time)
        self.pre_roll = float(pre_roll)
        self.length = float(length)
        self.cruise_time = self.distance / self.speed - self.ramp
        if self.cruise_time < 0.0:
            raise ValueError("line too short for the requested speed/ramp")
        self.move_time = self.cruise_time + 2.0 * self.ramp

    def _profile(self, tau):
        """(arc length, speed, acceleration) at time tau past pre_roll."""
        vc, tr = self.speed, self.ramp
        if tau <= 0.0:
            return 0.0, 0.0, 0.0
        if tau < tr:
            s = 0.5 * vc * (tau - (tr / np.pi) * np.sin(np.pi * tau / tr))
            v = 0.5 * vc * (1.0 - np.cos(np.pi * tau / tr))
            a = 0.5 * vc * np.pi / tr * np.sin(np.pi * tau / tr)
            return s, v, a
        s_ramp = 0.5 * vc * tr
        if tau < tr + self.cruise_time:
            return s_ramp + vc * (tau - tr), vc, 0.0
        sig = tau - tr - self.cruise_time
        if sig < tr:
            s = (
                s_ramp
                + vc * self.cruise_time
                + 0.5 * vc * (sig + (tr / np.pi) * np.sin(np.pi * sig / tr))
            )
            v = 0.5 * vc * (1.0 + np.cos(np.pi * sig / tr))
            a = -0.5 * vc * np.pi / tr * np.sin(np.pi * sig / tr)
            return s, v, a
        return self.distance, 0.0, 0.0

    def sample(self, t):
        s, v, a = self._profile(t - self.pre_roll)
        return ReferenceSample(
            position=self.start + s * self.direction,
            velocity=v * self.direction,
            accel=a * self.direction,
            length=self.length,
            length_rate=0.0,
            length_accel=0.0,
        )


def _window(t, t_on, t_off, ramp):
    """Raised-cosine on/off gate: 0 outside [t_on, t_off], C1 ramps inside."""
    if t <= t_on or t >= t_off:
        return 0.0
    if t < t_on + ramp:
        return 0.5 * (1.0 - np.cos(np.pi * (t - t_on) / ramp))
    if t > t_off - ramp:
        return 0.5 * (1.0 - np.cos(np.pi * (t_off - t) / ramp))
    return 1.0


class PullToTarget:
    """Hand pulling the hook toward a fixed point.

    Spring toward the target with magnitude min(k_op * dist, F_max), gated
    by the on/off window, plus an always-on viscous term for the grip (the
    hand stays in contact with the hook for the whole run; a hand is an
    impedance, not a force source, and without the viscous term the light
    hook is an undamped pendulum).

    The tremor models the hand's wavering, and its amplitude scales with the
    remaining fraction of the pull (vigor): the closer the hook gets to the
    target, the calmer the hand.  A vehicle that cooperates with the pull
    therefore experiences a gentler interaction than one that resists.

    The waver is elliptical, not a straight line: a quadrature component
    perpendicular to the pull gives the hand's wobble a rotating part, the
    way a real wrist traces a small loop.  (It also keeps the swing
    precessing, so the hanging load never passes exactly through the
    straight-down pole.)
    """

    def __init__(self, target, F_max, k_op, t_on, t_off, ramp,
                 hand_damping=0.35, tremor_ratio=0.0, tremor_freq=0.65,
                 rest_point=None, vigor_dist=0.0):
        self.target = np.asarray(target, dtype=float)
        self.F_max = float(F_max)
        self.k_op = float(k_op)
        self.t_on = float(t_on)
        self.t_off = float(t_off)
        self.ramp = float(ramp)
        self.hand_damping = float(hand_damping)
        self.tremor_ratio = float(tremor_ratio)
        self.tremor_freq = float(tremor_freq)
        self.vigor_dist = float(vigor_dist)
        self.rest_point = (
            np.asarray(rest_point, dtype=float) if rest_point is not None else None
        )

    def _vigor(self, dist):
        if self.vigor_dist > 0.0:
            return min(1.0, dist / self.vigor_dist)
        return 1.0

    def force(self, t, hook_position, hook_velocity=None):
        w = _window(t, self.t_on, self.t_off, self.ramp)
        out = np.zeros(3)
        if w > 0.0 and self.F_max > 0.0:
            d = self.target - np.asarray(hook_position, dtype=float)
            dist = float(np.linalg.norm(d))
            if dist >= 1e-9:
                base = min(self.k_op * dist, self.F_max)
                wave = self.tremor_ratio * self._vigor(dist)
                phase = 2.0 * np.pi * self.tremor_freq * (t - self.t_on)
                mag = w * (1.0 + wave * np.sin(phase)) * base
                out = (mag / dist) * d
                perp = np.array([-d[1], d[0], 0.0])
                n = float(np.linalg.norm(perp))
                if n >= 1e-9:
                    out = out + (w * wave * base * np.cos(phase) / n) * perp
        if hook_velocity is not None:
            out = out - self.hand_damping * np.asarray(hook_velocity, dtype=float)
        return out

    def azimuth(self):
        d = self.target
        if self.rest_point is not None:
            d = self.target - self.rest_point
        return float(np.arctan2(d[1], d[0]))


class GuidanceWithAvoidance:
    """Hand guiding the hook along the transport: constant hold force plus a
    wide steering bias and a narrow obstacle-avoidance push.

    Both lateral terms are compactly supported bumps,
    F * (1 - (d/d0)^2)^2 for horizontal hook-to-obstacle distance d < d0
    and zero otherwise (C1).  The wide, weak bias represents the hand
    steering the load to one side for the whole pass; the narrow, strong
    push is the operator actively shoving the load around the obstacle.
    Because the push collapses with clearance, a vehicle that yields to it
    quickly escapes the shoving; one that resists keeps getting shoved at
    full amplitude.  The hand's wavering (tremor) rides on the whole active
    force -- lean and push alike wobble together.  The grip stays in
    contact for the whole run and damps hook motion relative to the
    intended transport velocity; only the active terms are windowed.
    """

    def __init__(
        self,
        hold_force,
        bump_F,
        bump_radius,
        obstacle_center,
        side,
        t_on,
        t_off,
        ramp,
        bias_F=0.0,
        bias_radius=1.0,
        hand_damping=0.35,
        tremor_ratio=0.0,
        tremor_freq=0.65,
        ref_velocity=None,
    ):
        self.hold_force = np.asarray(hold_force, dtype=float)
        self.bump_F = float(bump_F)
        self.bump_radius = float(bump_radius)
        self.bias_F = float(bias_F)
        self.bias_radius = float(bias_radius)
        self.obstacle_center = np.asarray(obstacle_center, dtype=float)
        self.side = np.asarray(side, dtype=float)
        self.t_on = float(t_on)
        self.t_off = float(t_off)
        self.ramp = float(ramp)
        self.hand_damping = float(hand_damping)
        self.tremor_ratio = float(tremor_ratio)
        self.tremor_freq = float(tremor_freq)
        self.ref_velocity = ref_velocity

    def _tremor(self, t):
        if self.tremor_ratio == 0.0:
            return 1.0
        return 1.0 + self.tremor_ratio * np.sin(
            2.0 * np.pi * self.tremor_freq * (t - self.t_on)
        )

    @staticmethod
    def _envelope(dx, dy, radius):
        d2 = (dx * dx + dy * dy) / (radius * radius)
        return (1.0 - d2) ** 2 if d2 < 1.0 else 0.0

    def force(self, t, hook_position, hook_velocity=None):
        w = _window(t, self.t_on, self.t_off, self.ramp)
        out = np.zeros(3)
        if w > 0.0:
            dx = hook_position[0] - self.obstacle_center[0]
            dy = hook_position[1] - self.obstacle_center[1]
            lateral = self.bias_F * self._envelope(dx, dy, self.bias_radius)
            lateral += self.bump_F * self._envelope(dx, dy, self.bump_radius)
            out = (w * self._tremor(t)) * (self.hold_force + lateral * self.side)
        if hook_velocity is not None:
            v_rel = np.asarray(hook_velocity, dtype=float)
            if self.ref_velocity is not None:
                v_rel = v_rel - self.ref_velocity(t)
            out = out - self.hand_damping * v_rel
        return out

    def azimuth(self):
        if np.hypot(self.hold_force[0], self.hold_force[1]) > 1e-9:
            return float(np.arctan2(self.hold_force[1], self.hold_force[0]))
        return float(np.arctan2(self.side[1], self.side[0]))


class PayloadEvents:
    """Weight hung on the hook and later removed.

    Each transition is a smoothstep over `rise` seconds: brisk, as a real
    hang-on is, but with continuous force.  Between the transitions the
    payload weight rides on the hook; a controller that pays out line
    spreads the landing over its own compliance, while a fixed-length
    cable hands the step straight to the vehicle.
    """

    def __init__(self, weight, t_load, t_unload, rise=0.12):
        self.weight = float(weight)
        self.t_load = float(t_load)
        self.t_unload = float(t_unload)
        self.rise = float(rise)

    def _step(self, t, t0):
        u = (t - t0) / self.rise
        if u <= 0.0:
            return 0.0
        if u >= 1.0:
            return 1.0
        return u * u * (3.0 - 2.0 * u)

    def force(self, t, hook_position, hook_velocity=None):
        carried = self._step(t, self.t_load) - self._step(t, self.t_unload)
        return np.array([0.0, 0.0, -self.weight * carried])

    def azimuth(self):
        return 0.0


class CompositeOperator:
    """Sum of hook-force sources; the first part sets the azimuth."""

    def __init__(self, *parts):
        self.parts = parts

    def force(self, t, hook_position, hook_velocity=None):
        out = np.zeros(3)
        for part in self.parts:
            out = out + part.force(t, hook_position, hook_velocity)
        return out

    def azimuth(self):
        return self.parts[0].azimuth()


def _jitter(rng, jitter):
    return 1.0 + jitter * float(rng.uniform(-1.0, 1.0))


def build_task(cfg, rng):
    """(reference, operator, duration, hover_position) for a scenario config.

    rng drives the +-10 % parameter jitter (pass a fresh seeded generator).
    """
    ref_cfg = cfg.reference
    op = cfg.operator
    L_v = cfg.virtual_length()
    j = op.jitter
    if cfg.task == "loading_unloading_in_place":
        hover = np.array([0.0, 0.0, ref_cfg.hover_height])
        reference = HoverReference(hover, L_v)
        hook_rest = hover + np.array([0.0, 0.0, -L_v])
        target = hook_rest + _jitter(rng, j) * np.array(op.target_offset, dtype=float)
        duration = cfg.duration if cfg.duration > 0 else op.t_off + 4.0
        operator = PullToTarget(
            target=target,
            F_max=op.F_max * _jitter(rng, j),
            k_op=op.k_op * _jitter(rng, j),
            t_on=op.t_on,
            # The hand stays on the hook for the whole run: the task is
            # loading in place, and the steady pull keeps the hanging load
            # biased away from the vertical where its azimuth degenerates.
            t_off=duration + 1.0,
            ramp=op.ramp,
            hand_damping=op.hand_damping * _jitter(rng, j),
            tremor_ratio=op.tremor_ratio,
            tremor_freq=op.tremor_freq * _jitter(rng, j),
            rest_point=hook_rest,
            vigor_dist=op.vigor_fraction
            * float(np.linalg.norm(target - hook_rest)),
        )
        if op.payload_weight > 0.0:
            span = op.t_off - op.t_on
            payload = PayloadEvents(
                weight=op.payload_weight * _jitter(rng, j),
                t_load=op.t_on + 0.35 * span * _jitter(rng, j),
                t_unload=op.t_on + 0.85 * span * _jitter(rng, j),
                rise=op.payload_rise,
            )
            operator = CompositeOperator(operator, payload)
        return reference, operator, duration, hover

    if cfg.task != "transporting":
        raise ValueError(f"unknown task {cfg.task!r}")
    start = np.array([-0.5 * ref_cfg.distance, 0.0, ref_cfg.hover_height])
    reference = LineReference(
        start=start,
        direction=[1.0, 0.0, 0.0],
        distance=ref_cfg.distance,
        speed=ref_cfg.speed,
        ramp_time=ref_cfg.ramp_time,
        pre_roll=ref_cfg.pre_roll,
        length=L_v,
    )
    move_end = ref_cfg.pre_roll + reference.move_time
    duration = cfg.duration if cfg.duration > 0 else move_end + ref_cfg.post_roll
    operator = GuidanceWithAvoidance(
        hold_force=_jitter(rng, j) * np.array(op.hold_force, dtype=float),
        bump_F=op.bump_F * _jitter(rng, j),
        bump_radius=op.bump_radius,
        bias_F=op.bias_F * _jitter(rng, j),
        bias_radius=op.bias_radius,
        obstacle_center=np.array([0.0, 0.0, ref_cfg.hover_height - L_v]),
        side=np.array([0.0, 1.0, 0.0]),
        t_on=1.0,
        # The hand stays on the hook through set-down: a freely released load
        # hangs at the exact vertical where its azimuth degenerates.
        t_off=duration + 1.0,
        ramp=1.0,
        hand_damping=op.hand_damping * _jitter(rng, j),
        tremor_ratio=op.tremor_ratio,
        tremor_freq=op.tremor_freq * _jitter(rng, j),
        ref_velocity=lambda t: reference.sample(t).velocity,
    )
    return reference, operator, duration, start
