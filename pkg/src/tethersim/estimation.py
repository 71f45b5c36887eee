"""Interaction-force estimation from motion capture, load cell, and encoder.

The interaction force at the hook is recovered from the hook force balance:

    F_c_hat = M_h xh_dd_hat - M_h g + f_T_hat e_l_hat.

The hook acceleration is the second derivative of a cubic spline
(not-a-knot) fit to a sliding window of motion-capture hook positions,
evaluated at the window center: the window is 25 samples (0.25 s at 100 Hz),
so the estimate refers to a time 12 mocap periods (0.12 s) in the past.
Centered evaluation keeps the spline's boundary error away from the
evaluation point, which is what makes the noiseless estimate sub-mN for
band-limited motion.

The cable tension sample is the load-cell reading closest in time to the
spline evaluation point (always causal because the evaluation point lags by
more than one load-cell period); its distance to the evaluation point is
reported as tension_age so consumers can tell exactly-aligned estimates
(tension_age == 0 at 10 Hz instants) from ones bridged by the zero-order
hold.  The pipeline latency is therefore bounded by
2 mocap periods + 1 load-cell period (0.12 s at the default rates).
"""

from collections import deque
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline


class SensorStreams:
    """Rate-decimated, optionally noisy sensor buffers.

    The simulation calls sample() once per control tick; each channel keeps
    its own decimation relative to the control rate (mocap every tick at the
    defaults, load cell every tenth tick).  Noise is drawn from the supplied
    generator, so runs are reproducible per seed.
    """

    def __init__(
        self,
        control_rate=100.0,
        mocap_rate=100.0,
        loadcell_rate=10.0,
        mocap_sigma=0.0005,
        loadcell_sigma=0.02,
        encoder_sigma=0.0001,
        rng=None,
        maxlen=64,
    ):
        self.mocap_every = max(1, int(round(control_rate / mocap_rate)))
        self.loadcell_every = max(1, int(round(control_rate / loadcell_rate)))
        self.mocap_period = self.mocap_every / control_rate
        self.loadcell_period = self.loadcell_every / control_rate
        self.mocap_sigma = mocap_sigma
        self.loadcell_sigma = loadcell_sigma
        self.encoder_sigma = encoder_sigma
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.mocap = deque(maxlen=maxlen)  # (t, x_q, x_h)
        self.loadcell = deque(maxlen=maxlen)  # (t, f_T)
        self.encoder_length = None
        self.encoder_prev = None

    def sample(self, tick, t, x_q, x_h, f_T, length):
        """Feed the truth at one control tick; channels fire per their rates."""
        if tick % self.mocap_every == 0:
            xq = np.asarray(x_q, dtype=float) + self.mocap_sigma * self.rng.standard_normal(3)
            xh = np.asarray(x_h, dtype=float) + self.mocap_sigma * self.rng.standard_normal(3)
            self.mocap.append((t, xq, xh))
        if tick % self.loadcell_every == 0:
            self.loadcell.append(
                (t, float(f_T) + self.loadcell_sigma * float(self.rng.standard_normal()))
            )
        self.encoder_prev = self.encoder_length
        self.encoder_length = float(length) + self.encoder_sigma * float(
            self.rng.standard_normal()
        )

    def latest_direction(self, fallback=None):
        """Unit vehicle-to-hook direction from the newest mocap pair."""
        if not self.mocap:
            return fallback
        _, xq, xh = self.mocap[-1]
        d = xh - xq
        n = float(np.linalg.norm(d))
        if n < 1e-9:
            return fallback
        return d / n

    def latest_tension(self):
        return self.loadcell[-1][1] if self.loadcell else None


class ForceEstimate(NamedTuple):
    force: np.ndarray  # estimated interaction force at the hook
    tension: float  # load-cell sample used
    cable_direction: np.ndarray  # unit direction at the evaluation time
    eval_time: float  # time the estimate refers to
    latency: float  # now - eval_time
    tension_age: float  # |load-cell sample time - eval_time|
    valid: bool  # False until the spline window is full


def _invalid(now):
    return ForceEstimate(
        force=np.zeros(3),
        tension=0.0,
        cable_direction=np.array([0.0, 0.0, -1.0]),
        eval_time=now,
        latency=0.0,
        tension_age=np.inf,
        valid=False,
    )


class HookForceEstimator:
    """Sliding-window spline estimator of the hook interaction force."""

    def __init__(self, M_h, g, window=25):
        if window < 5 or window % 2 == 0:
            raise ValueError("spline window must be odd and at least 5")
        self.M_h = M_h
        self.g = np.asarray(g, dtype=float)
        self.window = window

    @property
    def eval_offset(self):
        """Samples between the evaluation point and the newest sample."""
        return self.window // 2

    def update(self, streams, now):
        if len(streams.mocap) < self.window or not streams.loadcell:
            return _invalid(now)
        recent = list(streams.mocap)[-self.window :]
        times = np.array([r[0] for r in recent])
        xh = np.array([r[2] for r in recent])
        mid = self.window // 2
        t_e = times[mid]
        accel = CubicSpline(times, xh, axis=0)(t_e, nu=2)
        d = recent[mid][2] - recent[mid][1]
        nd = float(np.linalg.norm(d))
        e_l = d / nd if nd > 1e-9 else np.array([0.0, 0.0, -1.0])
        lc_t, lc_f = min(
            streams.loadcell, key=lambda s: abs(s[0] - t_e)
        )
        force = self.M_h * accel - self.M_h * self.g + lc_f * e_l
        return ForceEstimate(
            force=force,
            tension=float(lc_f),
            cable_direction=e_l,
            eval_time=float(t_e),
            latency=float(now - t_e),
            tension_age=float(abs(lc_t - t_e)),
            valid=True,
        )
