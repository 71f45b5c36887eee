"""Input-to-state stability certification of the cable-frame impedance.

The time-varying impedance M(t) zeta_dd + B(t) zeta_d + K zeta = tau_c with
critically damped B = 2 sqrt(M K) admits the Lyapunov function

    V = 1/2 zeta^T K zeta + 1/2 zeta_d^T M(t) zeta_d + eps zeta^T K zeta_d,

which is positive definite iff the quadratic forms

    Q_beta = [[K_beta, eps K_beta], [eps K_beta, M_q M_h (L^v)^2]],
    Q_L    = [[K_L,    eps K_L],    [eps K_L,    M_h]]

stay positive definite over the virtual-length range, i.e. for

    eps < min( sqrt(M_q M_h Lv_min^2 / K_beta), sqrt(M_h / K_L) ).

With Young-inequality parameters eta_1..eta_3 the derivative bound yields

    mu_2 = b_min - mdot_max/2 - eps k_max - eps/(2 eta_1) - eta_2/2,
    mu_1 = eps k_min^2 / m_max - 2 eps eta_1 k_max^3 / m_min - eta_3/2,
    Gamma = 1/(2 eta_2) + eps^2 k_max^2 / (2 eta_3 m_min^2),

and whenever mu_1, mu_2 > 0 the squared state z = (zeta, zeta_d) satisfies

    |z(t)|^2 <= (c2/c1) e^(-lambda_1 t) |z(0)|^2
                + Gamma/(lambda_1 c1) sup_(s<=t) |tau_c(s)|^2

with c1 = min_t lambda_min(Q)/2, c2 = max_t lambda_max(Q)/2 and
lambda_1 = min(mu_1, mu_2)/c2.  Once the forcing vanishes the decay rate
improves to lambda_2 = min(mu_1 + eta_3/2, mu_2 + eta_2/2)/c2 >= lambda_1
(the eta_2/eta_3 terms existed only to absorb the input).

The command-shaping layer (proportional gain xi_1 plus discounted integral
xi_2 with discount gamma per second) obeys the deterministic bound

    |dx(t)| <= |xi_1| |p(t)| + |xi_2| ( sup|p| / |ln gamma| + dt sup|p| ),

the trailing term being the one-step slack of the discrete accumulator.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import admittance


@dataclass
class LyapunovConstants:
    m_min: float
    m_max: float
    k_min: float
    k_max: float
    mdot_max: float
    b_min: float
    b_max: float
    eps_max: float
    Lv_min: float
    Lv_max: float
    V_L: float


@dataclass
class Certificate:
    feasible: bool
    eps: float
    eta1: float
    eta2: float
    eta3: float
    mu1: float
    mu2: float
    mu1_bar: float
    mu2_bar: float
    Gamma: float
    c1: float
    c2: float
    lambda1: float
    lambda2: float
    constants: LyapunovConstants


def lyapunov_constants(cvim, plant, Lv_min, Lv_max, V_L):
    """Extremal inertia/stiffness/damping constants over the reference range."""
    m_beta_min = plant.M_q * plant.M_h * Lv_min**2
    m_beta_max = plant.M_q * plant.M_h * Lv_max**2
    m_min = min(m_beta_min, plant.M_h)
    m_max = max(m_beta_max, plant.M_h)
    k_min = min(cvim.K_beta, cvim.K_l)
    k_max = max(cvim.K_beta, cvim.K_l)
    mdot_max = 2.0 * plant.M_q * plant.M_h * Lv_max * V_L
    eps_max = min(
        np.sqrt(m_beta_min / cvim.K_beta), np.sqrt(plant.M_h / cvim.K_l)
    )
    return LyapunovConstants(
        m_min=m_min,
        m_max=m_max,
        k_min=k_min,
        k_max=k_max,
        mdot_max=mdot_max,
        b_min=2.0 * np.sqrt(m_min * k_min),
        b_max=2.0 * np.sqrt(m_max * k_max),
        eps_max=float(eps_max),
        Lv_min=Lv_min,
        Lv_max=Lv_max,
        V_L=V_L,
    )


def q_matrices(eps, cvim, plant, L_v):
    """The two 2x2 positive-definiteness blocks of V at virtual length L_v."""
    m_beta = plant.M_q * plant.M_h * L_v**2
    Q_beta = np.array(
        [[cvim.K_beta, eps * cvim.K_beta], [eps * cvim.K_beta, m_beta]]
    )
    Q_L = np.array([[cvim.K_l, eps * cvim.K_l], [eps * cvim.K_l, plant.M_h]])
    return Q_beta, Q_L


def _sym2_eigs(Q):
    mean = 0.5 * (Q[0, 0] + Q[1, 1])
    rad = np.sqrt((0.5 * (Q[0, 0] - Q[1, 1])) ** 2 + Q[0, 1] ** 2)
    return mean - rad, mean + rad


def q_matrices_pd(eps, cvim, plant, Lv_min, Lv_max, n_grid=65):
    """True when both blocks are positive definite over the length range."""
    for L_v in np.linspace(Lv_min, Lv_max, n_grid):
        for Q in q_matrices(eps, cvim, plant, L_v):
            lo, _ = _sym2_eigs(Q)
            if lo <= 0.0:
                return False
    return True


def c1_c2(eps, cvim, plant, Lv_min, Lv_max, n_grid=201):
    """Half the extremal eigenvalues of the V-blocks over the length range."""
    lo = np.inf
    hi = -np.inf
    for L_v in np.linspace(Lv_min, Lv_max, n_grid):
        for Q in q_matrices(eps, cvim, plant, L_v):
            a, b = _sym2_eigs(Q)
            lo = min(lo, a)
            hi = max(hi, b)
    return 0.5 * lo, 0.5 * hi


def mu_values(eps, eta1, eta2, eta3, consts):
    """(mu1, mu2, Gamma) for a Young-parameter tuple."""
    mu2 = (
        consts.b_min
        - 0.5 * consts.mdot_max
        - eps * consts.k_max
        - eps / (2.0 * eta1)
        - 0.5 * eta2
    )
    mu1 = (
        eps * consts.k_min**2 / consts.m_max
        - 2.0 * eps * eta1 * consts.k_max**3 / consts.m_min
        - 0.5 * eta3
    )
    Gamma = 1.0 / (2.0 * eta2) + eps**2 * consts.k_max**2 / (
        2.0 * eta3 * consts.m_min**2
    )
    return mu1, mu2, Gamma


def certify(
    cvim,
    plant,
    Lv_min=0.4,
    Lv_max=0.7,
    V_L=0.1,
    points_per_decade=20,
    grid_lo=1e-4,
    grid_hi=1.0,
):
    """Grid search for a feasible (eps, eta_1..3) maximizing min(mu1, mu2).

    min(mu1, mu2) is strictly decreasing in eta_2 (appears only in mu2) and
    eta_3 (only in mu1), so the grid minimum is optimal for both and the
    search enumerates only the (eps, eta_1) plane.
    """
    consts = lyapunov_constants(cvim, plant, Lv_min, Lv_max, V_L)
    decades = np.log10(grid_hi / grid_lo)
    n = int(round(points_per_decade * decades)) + 1
    grid = np.logspace(np.log10(grid_lo), np.log10(grid_hi), n)
    eta23 = grid[0]

    eps_col = grid[:, None]
    eta1_row = grid[None, :]
    mu2 = (
        consts.b_min
        - 0.5 * consts.mdot_max
        - eps_col * consts.k_max
        - eps_col / (2.0 * eta1_row)
        - 0.5 * eta23
    )
    mu1 = (
        eps_col * consts.k_min**2 / consts.m_max
        - 2.0 * eps_col * eta1_row * consts.k_max**3 / consts.m_min
        - 0.5 * eta23
    )
    objective = np.minimum(mu1, mu2)
    objective[grid >= consts.eps_max, :] = -np.inf
    i, j = np.unravel_index(int(np.argmax(objective)), objective.shape)
    eps = float(grid[i])
    eta1 = float(grid[j])
    mu1_v, mu2_v, Gamma = mu_values(eps, eta1, eta23, eta23, consts)
    feasible = (
        mu1_v > 0.0
        and mu2_v > 0.0
        and eps < consts.eps_max
        and q_matrices_pd(eps, cvim, plant, Lv_min, Lv_max)
    )
    c1, c2 = c1_c2(eps, cvim, plant, Lv_min, Lv_max)
    feasible = feasible and c1 > 0.0
    mu1_bar = mu1_v + 0.5 * eta23
    mu2_bar = mu2_v + 0.5 * eta23
    lam1 = min(mu1_v, mu2_v) / c2
    lam2 = min(mu1_bar, mu2_bar) / c2
    return Certificate(
        feasible=bool(feasible),
        eps=eps,
        eta1=eta1,
        eta2=float(eta23),
        eta3=float(eta23),
        mu1=float(mu1_v),
        mu2=float(mu2_v),
        mu1_bar=float(mu1_bar),
        mu2_bar=float(mu2_bar),
        Gamma=float(Gamma),
        c1=float(c1),
        c2=float(c2),
        lambda1=float(lam1),
        lambda2=float(lam2),
        constants=consts,
    )


def lyapunov_value(zeta, zeta_dot, eps, K_diag, M_diag):
    """V = 1/2 z^T K z + 1/2 zd^T M zd + eps z^T K zd (diagonal K, M)."""
    zeta = np.asarray(zeta, dtype=float)
    zeta_dot = np.asarray(zeta_dot, dtype=float)
    K = np.asarray(K_diag, dtype=float)
    M = np.asarray(M_diag, dtype=float)
    return float(
        0.5 * zeta @ (K * zeta)
        + 0.5 * zeta_dot @ (M * zeta_dot)
        + eps * zeta @ (K * zeta_dot)
    )


def iss_envelope(t, z0_sq, sup_tau_sq, cert):
    """Right-hand side of the ISS bound at elapsed time t."""
    return (cert.c2 / cert.c1) * np.exp(-cert.lambda1 * np.asarray(t)) * z0_sq + (
        cert.Gamma / (cert.lambda1 * cert.c1)
    ) * sup_tau_sq


def verify_iss_envelope(t, z_sq, tau_sq, cert):
    """Check |z|^2 against the ISS envelope pointwise.

    Returns (ok, min_margin) where margin = (envelope - z^2)/envelope.
    """
    t = np.asarray(t, dtype=float)
    z_sq = np.asarray(z_sq, dtype=float)
    sup_tau = np.maximum.accumulate(np.asarray(tau_sq, dtype=float))
    bound = iss_envelope(t - t[0], z_sq[0], sup_tau, cert)
    margin = (bound - z_sq) / np.maximum(bound, 1e-300)
    return bool(np.all(z_sq <= bound)), float(np.min(margin))


def fit_decay_rate(t, values, floor=1e-300):
    """Exponential rate from a log-linear least-squares fit (positive=decay)."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = v > floor
    if int(np.count_nonzero(mask)) < 5:
        return np.nan
    slope = np.polyfit(t[mask], np.log(v[mask]), 1)[0]
    return float(-slope)


def verify_post_forcing_decay(t, z_sq, T_c, cert, floor_ratio=1e-8):
    """After the forcing stops, the fitted decay of |z|^2 must reach lambda2
    and the unforced envelope (c2/c1) e^(-lambda2 (t-T_c)) |z(T_c)|^2 must
    hold.  Returns (ok, fitted_rate)."""
    t = np.asarray(t, dtype=float)
    z_sq = np.asarray(z_sq, dtype=float)
    after = t >= T_c
    if not np.any(after):
        return False, np.nan
    t_a = t[after]
    z_a = z_sq[after]
    z0 = z_a[0]
    if z0 <= 0.0:
        return False, np.nan
    window = z_a >= z0 * floor_ratio
    rate = fit_decay_rate(t_a[window], z_a[window])
    envelope = (cert.c2 / cert.c1) * np.exp(-cert.lambda2 * (t_a - T_c)) * z0
    ok = bool(np.all(z_a <= envelope)) and rate >= cert.lambda2
    return ok, rate


def shaping_bound_series(vec_norms, xi1, xi2, gamma, dt):
    """Pointwise shaping bound |xi1| |p(t)| + |xi2| (sup|p|/|ln g| + dt sup)."""
    vec_norms = np.asarray(vec_norms, dtype=float)
    sup = np.maximum.accumulate(vec_norms)
    g1 = float(np.max(np.abs(np.asarray(xi1))))
    g2 = float(np.max(np.abs(np.asarray(xi2))))
    return g1 * vec_norms + g2 * (sup / abs(np.log(gamma)) + dt * sup)


def verify_shaping_bounds(
    vec_inputs, scalar_inputs, delta_x, delta_L, xi1, xi2, xi3, xi4, gamma, dt
):
    """Check both shaped outputs against their deterministic bounds."""
    vec_norms = np.linalg.norm(np.asarray(vec_inputs, dtype=float), axis=1)
    out_norms = np.linalg.norm(np.asarray(delta_x, dtype=float), axis=1)
    bound_x = shaping_bound_series(vec_norms, xi1, xi2, gamma, dt)
    s = np.abs(np.asarray(scalar_inputs, dtype=float))
    bound_L = shaping_bound_series(s, [xi3], [xi4], gamma, dt)
    tol = 1e-9
    ok_x = bool(np.all(out_norms <= bound_x + tol))
    ok_L = bool(np.all(np.abs(np.asarray(delta_L, dtype=float)) <= bound_L + tol))
    return ok_x and ok_L


def _band_limited(rng, t, n_components=4, f_lo=0.2, f_hi=2.0):
    out = np.zeros_like(t)
    for _ in range(n_components):
        f = rng.uniform(f_lo, f_hi)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(0.3, 1.0)
        out += amp * np.sin(2.0 * np.pi * f * t + phase)
    return out


def run_envelope_batch(
    cvim,
    plant,
    cert,
    n_runs=100,
    seed=0,
    duration=12.0,
    T_c=8.0,
    dt=0.01,
    force_bound=2.0,
    Lv_mid=0.55,
    Lv_amp=0.15,
    Lv_freq=0.08,
):
    """Simulate seeded bounded-force impedance runs and verify the bounds.

    Forcing: band-limited (<= 2 Hz) two-channel signal scaled to
    |tau_c| <= force_bound, cut to zero at T_c.  The virtual length follows a
    slow sinusoid inside [Lv_min, Lv_max] with |Lv_dot| <= V_L, exercising
    the time-varying inertia.  Each run checks the ISS envelope, the
    post-forcing decay, and the command-shaping bound.
    """
    n_steps = int(round(duration / dt))
    t = np.arange(n_steps + 1) * dt
    results = []
    for run in range(n_runs):
        rng = np.random.default_rng(np.random.SeedSequence((seed, run)))
        tau = np.stack(
            [_band_limited(rng, t), _band_limited(rng, t)], axis=1
        )
        norms = np.linalg.norm(tau, axis=1)
        tau *= 0.98 * force_bound / max(float(np.max(norms)), 1e-12)
        tau[t >= T_c] = 0.0

        phase = rng.uniform(0.0, 2.0 * np.pi)
        L_v = Lv_mid + Lv_amp * np.sin(2.0 * np.pi * Lv_freq * t + phase)

        st = admittance.ImpedanceState.zeros(2)
        shaping = admittance.ShapingState()
        z_sq = np.empty(n_steps + 1)
        tau_sq = np.empty(n_steps + 1)
        e_ac_hist = np.empty((n_steps + 1, 3))
        dL_hist = np.empty(n_steps + 1)
        dx_hist = np.empty((n_steps + 1, 3))
        dLbar_hist = np.empty(n_steps + 1)
        for k in range(n_steps + 1):
            z_sq[k] = float(st.zeta @ st.zeta + st.zeta_dot @ st.zeta_dot)
            tau_sq[k] = float(tau[k] @ tau[k])
            e_ac = admittance.admittance_error(0.0, st.zeta[0], 0.0, L_v[k])
            dx, dLbar, shaping = admittance.shape_commands(
                e_ac,
                st.zeta[1],
                shaping,
                cvim.xi1,
                cvim.xi2,
                cvim.xi3,
                cvim.xi4,
                cvim.gamma,
                dt,
            )
            e_ac_hist[k] = e_ac
            dL_hist[k] = st.zeta[1]
            dx_hist[k] = dx
            dLbar_hist[k] = dLbar
            if k < n_steps:
                st = admittance.cvim_step(st, tau[k], cvim, plant, L_v[k], dt)

        env_ok, env_margin = verify_iss_envelope(t, z_sq, tau_sq, cert)
        decay_ok, rate = verify_post_forcing_decay(t, z_sq, T_c, cert)
        shaping_ok = verify_shaping_bounds(
            e_ac_hist,
            dL_hist,
            dx_hist,
            dLbar_hist,
            cvim.xi1,
            cvim.xi2,
            cvim.xi3,
            cvim.xi4,
            cvim.gamma,
            dt,
        )
        results.append(
            {
                "run": run,
                "envelope_ok": env_ok,
                "envelope_margin": env_margin,
                "decay_ok": decay_ok,
                "fitted_rate": rate,
                "shaping_ok": shaping_ok,
            }
        )
    return results


def certificate_report(cert, batch=None):
    """JSON-ready dictionary with constants, margins, and verdicts."""
    report = {
        "schema_version": 1,
        "certificate": asdict(cert),
        "verdicts": {
            "feasible": cert.feasible,
            "mu1_positive": cert.mu1 > 0.0,
            "mu2_positive": cert.mu2 > 0.0,
            "lambda2_ge_lambda1": cert.lambda2 >= cert.lambda1,
        },
    }
    if batch is not None:
        report["envelope_runs"] = {
            "count": len(batch),
            "envelope_ok": sum(1 for b in batch if b["envelope_ok"]),
            "decay_ok": sum(1 for b in batch if b["decay_ok"]),
            "shaping_ok": sum(1 for b in batch if b["shaping_ok"]),
            "min_envelope_margin": min(b["envelope_margin"] for b in batch),
            "min_fitted_rate": min(b["fitted_rate"] for b in batch),
        }
        report["verdicts"]["all_envelopes_hold"] = all(
            b["envelope_ok"] for b in batch
        )
        report["verdicts"]["all_decays_reach_lambda2"] = all(
            b["decay_ok"] for b in batch
        )
        report["verdicts"]["all_shaping_bounds_hold"] = all(
            b["shaping_ok"] for b in batch
        )
    return report


def dump_certificate(path, cert, batch=None):
    with open(path, "w") as fh:
        json.dump(certificate_report(cert, batch), fh, indent=2, sort_keys=True)
        fh.write("\n")
