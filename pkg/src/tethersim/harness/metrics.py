"""Run metrics: path length, mean swing, mean tension, mean jerk.

All integrals are trapezoidal over the logged control ticks.  Jerk is the
norm of the second central difference of the logged velocity divided by the
squared tick period, averaged over the run (the boundary samples have no
centered difference and are excluded).
"""

import numpy as np


def path_length(t, v):
    """Integral of the speed over the run."""
    speed = np.linalg.norm(np.asarray(v), axis=1)
    return float(np.trapz(speed, np.asarray(t)))


def time_mean(t, x):
    t = np.asarray(t, dtype=float)
    span = t[-1] - t[0]
    if span <= 0.0:
        return float(np.asarray(x)[0])
    return float(np.trapz(np.asarray(x, dtype=float), t) / span)


def mean_jerk(t, v):
    """Mean norm of the second central difference of velocity / h^2."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    if len(t) < 3:
        return 0.0
    h = t[1] - t[0]
    d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    norms = np.linalg.norm(d2, axis=1)
    return float(np.trapz(norms, t[1:-1]) / (t[-2] - t[1]))


def compute_metrics(log, task, path_length_ref=None, path_length_nominal=None, **kw):
    """Metric dict from a run log (keys per runner.LOG_COLUMNS)."""
    # accept the keyword used by the runner
    nominal = kw.get("path_length", path_length_nominal)
    t = log["t"]
    v = np.stack([log["vq_x"], log["vq_y"], log["vq_z"]], axis=1)
    d = path_length(t, v)
    out = {
        "path_length": d,
        "mean_beta": time_mean(t, log["beta"]),
        "mean_tension": time_mean(t, log["f_T"]),
        "mean_jerk": mean_jerk(t, v),
    }
    if task == "transporting" and nominal:
        out["normalized_path_length"] = d / float(nominal)
    return out
