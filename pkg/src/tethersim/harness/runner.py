"""Closed-loop scenario runner.

Multi-rate loop: the plant integrates at dt (default 1 ms) while sensing,
estimation, admittance, shaping, and tracking all run at the control rate
(default 100 Hz).  The operator force is evaluated at every plant substep
from the true hook position; actuator commands are held over the control
period.  The log holds one row per control tick.

Sensor samples take the left-limit truth (actuators still at the previous
tick's command) so the load cell never sees a command that has not acted
yet; the logged truth tension is the same left-limit value.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import admittance, estimation, geometry, plant, tracking
from .._kernels import core as _core
from . import config, tasks
from .metrics import compute_metrics


class DivergenceError(RuntimeError):
    """State left ten times the workspace extent; the run is not salvageable."""


@dataclass
class RunResult:
    config: object
    log: dict
    metrics: dict
    summary: dict
    events: dict = field(default_factory=dict)


LOG_COLUMNS = [
    "t",
    "xq_x",
    "xq_y",
    "xq_z",
    "vq_x",
    "vq_y",
    "vq_z",
    "alpha",
    "beta",
    "L",
    "L_dot",
    "Fc_x",
    "Fc_y",
    "Fc_z",
    "Fc_hat_x",
    "Fc_hat_y",
    "Fc_hat_z",
    "f_T",
    "f_T_hat",
    "xqd_x",
    "xqd_y",
    "xqd_z",
    "L_d",
    "e_ac_norm",
    "dzeta_beta",
    "dzeta_L",
    "T_thrust",
]

EXTRA_COLUMNS = [
    "est_valid",
    "est_eval_time",
    "est_tension_age",
    "slack",
    "thrust_saturated",
    "rot_drift",
    "winch_cmd",
]


def _hook_kinematics(flat):
    """Truth hook position and velocity from the flat state."""
    alpha = flat[plant.IX_ALPHA]
    beta = flat[plant.IX_BETA]
    ad = flat[plant.IX_ALPHA_DOT]
    bd = flat[plant.IX_BETA_DOT]
    L = flat[plant.IX_LENGTH]
    Ld = flat[plant.IX_LENGTH_RATE]
    sa, ca = np.sin(alpha), np.cos(alpha)
    sb, cb = np.sin(beta), np.cos(beta)
    e = np.array([sb * ca, sb * sa, -cb])
    e_dot = ad * sb * np.array([-sa, ca, 0.0]) + bd * np.array([cb * ca, cb * sa, sb])
    x_h = np.asarray(flat[plant.IX_POS]) + L * e
    v_h = np.asarray(flat[plant.IX_VEL]) + Ld * e + L * e_dot
    return x_h, v_h


def run_scenario(cfg):
    """Simulate one scenario; returns a RunResult (raises DivergenceError)."""
    config.validate(cfg)
    noise_rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 29)))
    jitter_rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 17)))
    reference, operator, duration, start_pos = tasks.build_task(cfg, jitter_rng)

    pp = cfg.as_plant_params()
    p_tup = pp.to_tuple()
    cvp = cfg.as_cvim_params()
    svp = cfg.as_svim_params()
    tp = cfg.as_tracking_params()
    pid = tracking.WinchPid(cfg.as_winch_pid_params())
    use_estimate = cfg.use_force_estimate
    is_cvim = cfg.controller == "CVIM"

    dtc = 1.0 / cfg.control_rate
    substeps = int(round(1.0 / (cfg.control_rate * cfg.dt)))
    n_ticks = int(round(duration * cfg.control_rate))

    streams = estimation.SensorStreams(
        control_rate=cfg.control_rate,
        mocap_rate=cfg.sensors.mocap_rate,
        loadcell_rate=cfg.sensors.loadcell_rate,
        mocap_sigma=cfg.sensors.mocap_sigma,
        loadcell_sigma=cfg.sensors.loadcell_sigma,
        encoder_sigma=cfg.sensors.encoder_sigma,
        rng=noise_rng,
    )
    estimator = estimation.HookForceEstimator(
        M_h=pp.M_h, g=pp.g, window=cfg.sensors.spline_window
    )

    state0 = plant.hover_state(
        pp,
        length=reference.sample(0.0).length,
        position=start_pos,
        alpha=operator.azimuth(),
    )
    # A real load never hangs at the exact mathematical vertical; start it
    # on a small conical orbit (lean plus the azimuth rate that balances
    # it), the steady residual sway of a hanging hook.  A plain lean would
    # swing straight back through the vertical, where the azimuth chart
    # degenerates.
    if cfg.start_lean > 0.0:
        state0.cable.beta = cfg.start_lean
        g_mag = float(np.linalg.norm(pp.g))
        L0 = state0.cable.length
        state0.cable.alpha_dot = np.sqrt(
            g_mag / (L0 * np.cos(cfg.start_lean))
        )
    flat = tuple(state0.to_flat())

    imp_state = admittance.ImpedanceState.zeros(2 if is_cvim else 4)
    shaping = admittance.ShapingState()
    alpha_c = state0.cable.alpha
    prev_inputs_tuple = plant.hover_inputs(pp).to_tuple()

    # Two cascaded one-pole low-passes on the estimated interaction signals
    # entering the admittance and the thrust feedforward.  The
    # spline-differentiated force is broadband noisy and a single pole leaks
    # enough of it into the thrust command to dominate the jerk metric.
    f_c = cfg.sensors.force_filter_cutoff
    lp_gain = 1.0 - np.exp(-2.0 * np.pi * f_c * dtc) if f_c > 0.0 else 1.0
    F_stage = np.zeros(3)
    F_filt = np.zeros(3)
    f_ff = cfg.sensors.ff_filter_cutoff
    ff_gain = 1.0 - np.exp(-2.0 * np.pi * f_ff * dtc) if f_ff > 0.0 else 1.0
    F_ff_stage = np.zeros(3)
    F_ff_filt = np.zeros(3)
    f_ten = cfg.sensors.tension_filter_cutoff
    ten_gain = 1.0 - np.exp(-2.0 * np.pi * f_ten * dtc) if f_ten > 0.0 else 1.0
    tension_stage = None
    tension_filt = None
    hook_weight = pp.M_h * float(np.linalg.norm(pp.g))

    half = 0.5 * np.array(cfg.workspace, dtype=float)
    center = np.array([0.0, 0.0, half[2]])

    cols = {name: [] for name in LOG_COLUMNS + EXTRA_COLUMNS}
    slack_events = 0
    thrust_sat_events = 0
    workspace_exceeded = False
    max_rot_drift = 0.0
    min_sin_beta = np.inf

    for k in range(n_ticks + 1):
        t = k * dtc
        state = plant.PlantState.from_flat(flat)
        e_truth = state.cable.direction()
        x_h, v_h = _hook_kinematics(flat)
        F_c_now = operator.force(t, x_h, v_h)

        # Left-limit truth tension: previous actuator command, current force.
        u_sense = prev_inputs_tuple[:5] + (
            float(F_c_now[0]),
            float(F_c_now[1]),
            float(F_c_now[2]),
        )
        f_T_truth, f_T_raw = _core.cable_tension(flat, u_sense, p_tup)
        slack = f_T_raw < 0.0
        slack_events += int(slack)

        streams.sample(
            k, t, state.position, x_h, f_T_truth, state.cable.length
        )
        est = estimator.update(streams, t)

        ref = reference.sample(t)
        if use_estimate:
            F_est_now = est.force if est.valid else np.zeros(3)
            F_stage = F_stage + lp_gain * (F_est_now - F_stage)
            F_filt = F_filt + lp_gain * (F_stage - F_filt)
            F_ff_stage = F_ff_stage + ff_gain * (F_est_now - F_ff_stage)
            F_ff_filt = F_ff_filt + ff_gain * (F_ff_stage - F_ff_filt)
            # Ramp the spline-differentiated force in from zero: its first
            # valid samples carry a window-edge transient, and feeding that
            # to the admittance lurches the vehicle and swings the load.
            t_arm = cfg.sensors.force_arm_time
            if t_arm > 0.0 and t < t_arm:
                arm = 0.5 - 0.5 * np.cos(np.pi * t / t_arm)
            else:
                arm = 1.0
            F_used = arm * F_filt
            F_ff_use = arm * F_ff_filt
            # The cable direction fed to the admittance comes from the same
            # smoothed window as the force estimate, so force and direction
            # refer to the same instant; the raw per-sample direction would
            # inject broadband angle noise straight into the forcing.
            e_l_fb = est.cable_direction if est.valid else e_truth
            # The load-cell sample train is a staircase (zero-order hold at
            # one tenth the control rate); conditioning it with the same
            # two-pole filter as the force estimate keeps its steps out of
            # the acceleration-level forcing.
            lc = streams.latest_tension()
            if lc is not None:
                if tension_stage is None:
                    tension_stage = tension_filt = float(lc)
                tension_stage += ten_gain * (float(lc) - tension_stage)
                tension_filt += ten_gain * (tension_stage - tension_filt)
            tension_fb = tension_filt if tension_filt is not None else 0.0
            e_l_sv = e_l_fb
            L_fb = streams.encoder_length
            if streams.encoder_prev is None:
                L_rate_fb = 0.0
            else:
                L_rate_fb = (streams.encoder_length - streams.encoder_prev) / dtc
        else:
            F_used = F_c_now
            F_ff_use = F_c_now
            e_l_fb = e_truth
            tension_fb = f_T_truth
            e_l_sv = e_truth
            L_fb = state.cable.length
            L_rate_fb = state.cable.length_rate

        if is_cvim:
            # Hold the azimuth when the measured direction is near vertical:
            # there the azimuth of a noisy direction is meaningless and would
            # spin the admittance-error plane tick to tick.
            if np.hypot(e_l_fb[0], e_l_fb[1]) > 0.035:
                alpha_c, _ = geometry.angles_from_direction(
                    e_l_fb, fallback_alpha=alpha_c
                )
            tau_c = admittance.cvim_forcing(
                F_used, e_l_fb, L_fb, geometry.beta_axis(alpha_c), pp.M_q
            )
            imp_state = admittance.cvim_step(
                imp_state, tau_c, cvp, pp, ref.length, dtc
            )
            delta_beta = float(imp_state.zeta[0])
            delta_L = float(imp_state.zeta[1])
            e_ac = admittance.admittance_error(ref.beta, delta_beta, alpha_c, ref.length)
            delta_x, delta_Lbar, shaping = admittance.shape_commands(
                e_ac, delta_L, shaping,
                cvp.xi1, cvp.xi2, cvp.xi3, cvp.xi4, cvp.gamma, dtc,
            )
            e_ac_norm = float(np.linalg.norm(e_ac))
            dzeta_beta = delta_beta
            dzeta_L = delta_L
        else:
            # The translational channels take the full tension vector: its
            # lean component is what lets the vehicle give way to a swinging
            # load.  The length channel is tared by the standing hook weight:
            # yielding cable to a load that is always there just parks the
            # winch against a travel stop.
            tension_dev = tension_fb - hook_weight if tension_filt is not None else 0.0
            tau_p = admittance.svim_forcing(tension_fb, e_l_sv)
            tau_p[3] = tension_dev
            imp_state = admittance.svim_step(imp_state, tau_p, svp, pp, dtc)
            delta_x_raw = imp_state.zeta[:3]
            delta_Lp = float(imp_state.zeta[3])
            delta_x, delta_Lbar, shaping = admittance.shape_commands(
                delta_x_raw, delta_Lp, shaping,
                svp.xi1, svp.xi2, svp.xi3, svp.xi4, svp.gamma, dtc,
            )
            e_ac_norm = 0.0
            dzeta_beta = 0.0
            dzeta_L = delta_Lp

        if cfg.cable_mode == "CCL":
            delta_Lbar = 0.0
        x_d, L_d = admittance.desired_motion(
            ref.position, delta_x, ref.length, delta_Lbar, pp.L_min, pp.L_max
        )

        # Rate target for the winch: the task reference only.  The shaped
        # length shift is a position-level signal; differencing it at the
        # control rate would turn every ripple on the forcing into winch
        # acceleration (and, through the thrust feedforward, vehicle jerk).
        at_limit = L_fb <= pp.L_min + 1e-3 or L_fb >= pp.L_max - 1e-3
        winch_cmd = pid.update(
            L_fb - L_d,
            L_rate_fb - ref.length_rate,
            dtc,
            feedforward=ref.length_accel,
            at_limit=at_limit,
        )

        # The shaping output is a position shift; differentiating it into a
        # velocity reference would amplify every ripple on the estimated
        # force by the control rate, so the velocity target stays the task
        # reference.
        target = tracking.TrackingTarget(
            position=x_d,
            velocity=ref.velocity,
            accel=ref.accel,
        )
        # The coupled controller feeds the estimated interaction force
        # forward; the separate-model controller has no hook-force estimate
        # (its only interaction sensor is the load cell) and compensates the
        # cable coupling reactively.
        F_ff = F_ff_use if is_cvim else np.zeros(3)
        thrust, torque, sat = tracking.quad_tracking_control(
            state, target, F_ff, winch_cmd, pp, tp
        )
        thrust_sat_events += int(sat)

        R = state.rotation
        rot_drift = float(np.max(np.abs(R.T @ R - np.eye(3))))
        max_rot_drift = max(max_rot_drift, rot_drift)
        min_sin_beta = min(min_sin_beta, float(np.sin(state.cable.beta)))

        row = (
            t,
            *state.position,
            *state.velocity,
            state.cable.alpha,
            state.cable.beta,
            state.cable.length,
            state.cable.length_rate,
            *F_c_now,
            *(est.force if est.valid else np.zeros(3)),
            f_T_truth,
            est.tension if est.valid else 0.0,
            *x_d,
            L_d,
            e_ac_norm,
            dzeta_beta,
            dzeta_L,
            thrust,
        )
        for name, value in zip(LOG_COLUMNS, row):
            cols[name].append(float(value))
        cols["est_valid"].append(float(est.valid))
        cols["est_eval_time"].append(float(est.eval_time))
        cols["est_tension_age"].append(
            float(est.tension_age) if np.isfinite(est.tension_age) else -1.0
        )
        cols["slack"].append(float(slack))
        cols["thrust_saturated"].append(float(sat))
        cols["rot_drift"].append(rot_drift)
        cols["winch_cmd"].append(float(winch_cmd))

        prev_inputs_tuple = (
            thrust,
            float(torque[0]),
            float(torque[1]),
            float(torque[2]),
            winch_cmd,
            0.0,
            0.0,
            0.0,
        )

        if k == n_ticks:
            break
        for i in range(substeps):
            t_sub = t + i * cfg.dt
            F_sub = operator.force(t_sub, *_hook_kinematics(flat))
            u = (
                thrust,
                float(torque[0]),
                float(torque[1]),
                float(torque[2]),
                winch_cmd,
                float(F_sub[0]),
                float(F_sub[1]),
                float(F_sub[2]),
            )
            flat = _core.rk4_step(flat, u, p_tup, cfg.dt)
        pos = np.asarray(flat[:3])
        offset = np.abs(pos - center)
        if np.any(offset > 10.0 * half):
            raise DivergenceError(
                f"state left 10x the workspace at t={t + dtc:.3f}s (pos={pos})"
            )
        if np.any(offset > half):
            workspace_exceeded = True

    log = {name: np.array(vals) for name, vals in cols.items()}
    metrics = compute_metrics(log, task=cfg.task, path_length=cfg.reference.distance)
    summary = {
        "duration": duration,
        "ticks": n_ticks + 1,
        "slack_events": slack_events,
        "thrust_saturation_events": thrust_sat_events,
        "workspace_exceeded": workspace_exceeded,
        "max_rotation_drift": max_rot_drift,
        "min_sin_beta": min_sin_beta,
        "max_tracking_error": float(
            np.max(
                np.linalg.norm(
                    np.stack(
                        [log["xq_x"] - log["xqd_x"], log["xq_y"] - log["xqd_y"], log["xq_z"] - log["xqd_z"]],
                        axis=1,
                    ),
                    axis=1,
                )
            )
        ),
    }
    return RunResult(config=cfg, log=log, metrics=metrics, summary=summary)
