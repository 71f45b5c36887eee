"""Lyapunov certificate construction and the simulated envelope checks."""

import json

import numpy as np

from tethersim import admittance, stability
from tethersim.harness import config as config_mod


def default_setup():
    cfg = config_mod.ScenarioConfig()
    return cfg.as_cvim_params(), cfg.as_plant_params(), cfg.reference


def test_lyapunov_value_formula():
    rng = np.random.default_rng(5)
    for _ in range(50):
        zeta = rng.uniform(-1, 1, 2)
        zeta_dot = rng.uniform(-1, 1, 2)
        K = rng.uniform(0.5, 20.0, 2)
        M = rng.uniform(0.01, 2.0, 2)
        eps = rng.uniform(0.0, 0.1)
        v = stability.lyapunov_value(zeta, zeta_dot, eps, K, M)
        expected = (
            0.5 * sum(K[i] * zeta[i] ** 2 for i in range(2))
            + 0.5 * sum(M[i] * zeta_dot[i] ** 2 for i in range(2))
            + eps * sum(K[i] * zeta[i] * zeta_dot[i] for i in range(2))
        )
        assert abs(v - expected) < 1e-12


def test_positive_definiteness_threshold():
    """The coupling weight is admissible strictly below the closed-form
    bound and inadmissible at or above it."""
    cvim, plant_params, ref = default_setup()
    consts = stability.lyapunov_constants(
        cvim, plant_params, ref.Lv_min, ref.Lv_max, ref.V_L
    )
    assert stability.q_matrices_pd(
        0.99 * consts.eps_max, cvim, plant_params, ref.Lv_min, ref.Lv_max
    )
    assert not stability.q_matrices_pd(
        consts.eps_max, cvim, plant_params, ref.Lv_min, ref.Lv_max
    )
    assert not stability.q_matrices_pd(
        1.5 * consts.eps_max, cvim, plant_params, ref.Lv_min, ref.Lv_max
    )


def test_certificate_feasible_for_both_stiffness_presets():
    cvim, plant_params, ref = default_setup()
    for factor in (1.0, 1.5):
        params = admittance.stiffness_preset(cvim, factor)
        cert = stability.certify(
            params, plant_params, Lv_min=ref.Lv_min, Lv_max=ref.Lv_max, V_L=ref.V_L
        )
        assert cert.feasible
        assert cert.mu1 > 0.0 and cert.mu2 > 0.0
        assert cert.c1 > 0.0 and cert.c2 >= cert.c1
        assert cert.eps < cert.constants.eps_max
        assert cert.lambda1 > 0.0
        assert cert.lambda2 >= cert.lambda1


def test_certificate_values_recompute():
    """The stored margins match mu_values at the stored search point, and
    the unforced rates drop the input-absorption terms."""
    cvim, plant_params, ref = default_setup()
    cert = stability.certify(
        cvim, plant_params, Lv_min=ref.Lv_min, Lv_max=ref.Lv_max, V_L=ref.V_L
    )
    consts = cert.constants
    mu1, mu2, Gamma = stability.mu_values(
        cert.eps, cert.eta1, cert.eta2, cert.eta3, consts
    )
    assert abs(mu1 - cert.mu1) < 1e-12
    assert abs(mu2 - cert.mu2) < 1e-12
    assert abs(Gamma - cert.Gamma) < 1e-12
    assert abs(cert.mu1_bar - (cert.mu1 + 0.5 * cert.eta3)) < 1e-12
    assert abs(cert.mu2_bar - (cert.mu2 + 0.5 * cert.eta2)) < 1e-12
    assert abs(cert.lambda1 - min(cert.mu1, cert.mu2) / cert.c2) < 1e-12
    assert abs(cert.lambda2 - min(cert.mu1_bar, cert.mu2_bar) / cert.c2) < 1e-12


def test_c1_c2_bracket_block_eigenvalues():
    cvim, plant_params, ref = default_setup()
    eps = 0.01
    c1, c2 = stability.c1_c2(eps, cvim, plant_params, ref.Lv_min, ref.Lv_max)
    for L_v in np.linspace(ref.Lv_min, ref.Lv_max, 7):
        for Q in stability.q_matrices(eps, cvim, plant_params, L_v):
            eigs = np.linalg.eigvalsh(Q)
            assert c1 <= 0.5 * eigs[0] + 1e-12
            assert 0.5 * eigs[-1] <= c2 + 1e-12


def test_envelope_formula_and_violation_detection():
    cvim, plant_params, ref = default_setup()
    cert = stability.certify(
        cvim, plant_params, Lv_min=ref.Lv_min, Lv_max=ref.Lv_max, V_L=ref.V_L
    )
    t = np.linspace(0.0, 5.0, 501)
    # At t=0 the bound is (c2/c1) z0^2 + Gamma/(lambda1 c1) sup_tau^2.
    z0_sq, tau_sq = 0.3, 0.4
    b0 = stability.iss_envelope(0.0, z0_sq, tau_sq, cert)
    assert abs(
        b0 - (cert.c2 / cert.c1 * z0_sq + cert.Gamma / (cert.lambda1 * cert.c1) * tau_sq)
    ) < 1e-12

    # A state resting at zero satisfies the bound with full margin.
    ok, margin = stability.verify_iss_envelope(
        t, np.full_like(t, 1e-12), np.full_like(t, tau_sq), cert
    )
    assert ok and margin > 0.99

    # A state above the envelope is flagged.
    z_sq = np.full_like(t, 1e6)
    z_sq[0] = z0_sq
    ok, margin = stability.verify_iss_envelope(
        t, z_sq, np.full_like(t, tau_sq), cert
    )
    assert not ok and margin < 0.0


def test_fit_decay_rate_recovers_exponential():
    t = np.linspace(0.0, 10.0, 1001)
    assert abs(stability.fit_decay_rate(t, np.exp(-0.8 * t)) - 0.8) < 1e-9
    assert np.isnan(stability.fit_decay_rate(t, np.zeros_like(t)))


def test_post_forcing_decay_classification():
    cvim, plant_params, ref = default_setup()
    cert = stability.certify(
        cvim, plant_params, Lv_min=ref.Lv_min, Lv_max=ref.Lv_max, V_L=ref.V_L
    )
    T_c = 8.0
    t = np.linspace(0.0, 12.0, 1201)
    z0 = 0.2

    fast = np.where(
        t < T_c, z0, z0 * np.exp(-(2.0 * cert.lambda2) * (t - T_c))
    )
    ok, rate = stability.verify_post_forcing_decay(t, fast, T_c, cert)
    assert ok and rate > cert.lambda2

    slow = np.where(
        t < T_c, z0, z0 * np.exp(-(0.1 * cert.lambda2) * (t - T_c))
    )
    ok, rate = stability.verify_post_forcing_decay(t, slow, T_c, cert)
    assert not ok


def test_shaping_bound_holds_and_detects_violation():
    cvim, _, _ = default_setup()
    rng = np.random.default_rng(9)
    dt = 0.01
    n = 400
    vec = rng.uniform(-1.0, 1.0, (n, 3))
    scalars = rng.uniform(-1.0, 1.0, n)
    shaping = admittance.ShapingState()
    dx = np.empty((n, 3))
    dL = np.empty(n)
    for k in range(n):
        dx[k], dL[k], shaping = admittance.shape_commands(
            vec[k], scalars[k], shaping,
            cvim.xi1, cvim.xi2, cvim.xi3, cvim.xi4, cvim.gamma, dt,
        )
    assert stability.verify_shaping_bounds(
        vec, scalars, dx, dL, cvim.xi1, cvim.xi2, cvim.xi3, cvim.xi4, cvim.gamma, dt
    )
    corrupted = dx.copy()
    corrupted[200] *= 50.0
    assert not stability.verify_shaping_bounds(
        vec, scalars, corrupted, dL,
        cvim.xi1, cvim.xi2, cvim.xi3, cvim.xi4, cvim.gamma, dt,
    )


def test_envelope_batch_runs_hold_bounds():
    cvim, plant_params, ref = default_setup()
    cert = stability.certify(
        cvim, plant_params, Lv_min=ref.Lv_min, Lv_max=ref.Lv_max, V_L=ref.V_L
    )
    batch = stability.run_envelope_batch(cvim, plant_params, cert, n_runs=3, seed=0)
    assert len(batch) == 3
    for entry in batch:
        assert entry["envelope_ok"]
        assert entry["decay_ok"]
        assert entry["shaping_ok"]
        assert entry["fitted_rate"] >= cert.lambda2


def test_certificate_report_and_dump(tmp_path):
    cvim, plant_params, ref = default_setup()
    cert = stability.certify(
        cvim, plant_params, Lv_min=ref.Lv_min, Lv_max=ref.Lv_max, V_L=ref.V_L
    )
    batch = stability.run_envelope_batch(cvim, plant_params, cert, n_runs=2, seed=0)
    path = tmp_path / "certificate.json"
    stability.dump_certificate(path, cert, batch)
    report = json.loads(path.read_text())
    assert report["schema_version"] == 1
    assert report["verdicts"]["feasible"]
    assert report["verdicts"]["all_envelopes_hold"]
    assert report["envelope_runs"]["count"] == 2
    assert report["certificate"]["eps"] == cert.eps
