"""Vehicle tracking controller, winch PID, and the winch gain classifier."""

import numpy as np
from hypothesis import given, strategies as st

from tethersim import geometry, plant, tracking


def sample_gain_triples(n, seed=11):
    """Seeded random PID triples, log-uniform over [1e-2, 1e2] with an
    occasional sign flip so the positivity conditions are exercised too."""
    rng = np.random.default_rng(seed)
    triples = []
    for _ in range(n):
        gains = 10.0 ** rng.uniform(-2, 2, size=3)
        if rng.random() < 0.2:
            gains[rng.integers(0, 3)] *= -1.0
        triples.append(tuple(gains))
    return triples


def cubic_stable(K_P, K_I, K_D):
    """Root-location oracle for s^3 + K_D s^2 + K_P s + K_I."""
    roots = np.roots([1.0, K_D, K_P, K_I])
    return bool(np.max(roots.real) < 0.0)


def test_gain_classifier_matches_root_oracle():
    """The algebraic stability test agrees with the cubic's actual root
    locations on 10000 random gain triples."""
    mismatches = 0
    for K_P, K_I, K_D in sample_gain_triples(10000):
        stable, margin = tracking.routh_hurwitz_check(K_P, K_I, K_D)
        if stable != cubic_stable(K_P, K_I, K_D):
            mismatches += 1
        if stable:
            assert margin > 0.0
    assert mismatches == 0


def test_gain_classifier_edge_cases():
    assert tracking.routh_hurwitz_check(2.0, 1.0, 1.0) == (True, 1.0)
    assert tracking.routh_hurwitz_check(1.0, 1.0, 1.0) == (False, 0.0)
    assert not tracking.routh_hurwitz_check(1.0, -1.0, 5.0)[0]
    assert not tracking.routh_hurwitz_check(-1.0, 1.0, 5.0)[0]
    assert not tracking.routh_hurwitz_check(1.0, 1.0, -5.0)[0]


def test_classified_gains_predict_step_decay():
    """Gains the classifier passes make the length error decay; gains it
    fails blow the error up within the 30 s window (comparing against the
    dominant pole so slow near-marginal cases are not misread)."""
    e0 = 0.1
    decaying, exploding = [], []
    for K_P, K_I, K_D in sample_gain_triples(400):
        stable, margin = tracking.routh_hurwitz_check(K_P, K_I, K_D)
        rate = float(np.max(np.roots([1.0, K_D, K_P, K_I]).real))
        if stable and margin > 0.5 and rate < -0.15 and len(decaying) < 8:
            decaying.append((K_P, K_I, K_D))
        if not stable and margin < -0.5 and rate > 0.1 and len(exploding) < 8:
            exploding.append((K_P, K_I, K_D))
    assert len(decaying) == 8 and len(exploding) == 8

    for trip in decaying:
        t, e = tracking.winch_error_response(*trip, e0=e0)
        assert e[0] == e0
        assert np.max(np.abs(e[-1000:])) < 0.1 * e0
    for trip in exploding:
        t, e = tracking.winch_error_response(*trip, e0=e0)
        assert np.max(np.abs(e[-1000:])) > e0


def test_winch_pid_terms_and_integrator():
    pid = tracking.WinchPid(tracking.WinchPidParams(K_P=25.0, K_I=10.0, K_D=10.0))
    out = pid.update(0.1, 0.2, dt=0.001, feedforward=0.5)
    # feedforward - K_P e - K_I * 0 - K_D e_dot
    assert out == 0.5 - 25.0 * 0.1 - 10.0 * 0.2
    assert pid._integral == 0.001 * 0.1

    out2 = pid.update(0.1, 0.0, dt=0.001)
    assert out2 == -25.0 * 0.1 - 10.0 * pid.params.K_I * 0.0 - 10.0 * 0.0001
    pid.reset()
    assert pid._integral == 0.0


def test_winch_pid_clips_and_freezes_integrator():
    pid = tracking.WinchPid(tracking.WinchPidParams(accel_max=6.0))
    out = pid.update(10.0, 0.0, dt=0.001)
    assert out == -6.0
    assert pid._integral == 0.0  # frozen while clipped

    out = pid.update(-10.0, 0.0, dt=0.001)
    assert out == 6.0
    assert pid._integral == 0.0

    # Unsaturated but parked on a winch hard stop: still frozen.
    pid.update(0.01, 0.0, dt=0.001, at_limit=True)
    assert pid._integral == 0.0
    # Unsaturated and free: accumulates.
    pid.update(0.01, 0.0, dt=0.001)
    assert pid._integral == 0.001 * 0.01


@given(
    alpha=st.floats(-np.pi, np.pi),
    beta=st.floats(0.0, 2.0),
    ratio=st.floats(1e-3, 10.0),
)
def test_thrust_matrix_inverse(alpha, beta, ratio):
    """Closed form inverts A = I - r hat(e)^2 for any unit cable direction."""
    e = geometry.cable_direction(alpha, beta)
    A = np.eye(3) - ratio * (geometry.skew(e) @ geometry.skew(e))
    A_inv = tracking.thrust_matrix_inverse(e, ratio)
    assert np.allclose(A @ A_inv, np.eye(3), atol=1e-12)


def hover_state(plant_params, length=0.5):
    return plant.PlantState(
        position=np.array([0.0, 0.0, 1.5]),
        velocity=np.zeros(3),
        rotation=np.eye(3),
        omega=np.zeros(3),
        cable=plant.CableState(
            alpha=0.0, beta=0.0, alpha_dot=0.0, beta_dot=0.0,
            length=length, length_rate=0.0,
        ),
    )


def test_quad_control_hover_equilibrium(plant_params):
    """At rest on target with a vertical cable the controller asks for
    exactly the weight of the pair and zero torque."""
    state = hover_state(plant_params)
    target = tracking.TrackingTarget(position=state.position.copy())
    thrust, torque, saturated = tracking.quad_tracking_control(
        state, target, np.zeros(3), 0.0, plant_params, tracking.TrackingParams()
    )
    weight = (plant_params.M_q + plant_params.M_h) * 9.81
    assert abs(thrust - weight) < 1e-12
    assert np.allclose(torque, 0.0, atol=1e-12)
    assert not saturated


def test_quad_control_saturation_flags(plant_params):
    state = hover_state(plant_params)
    params = tracking.TrackingParams(T_max=40.0)

    high = tracking.TrackingTarget(position=state.position + [0.0, 0.0, 50.0])
    thrust, _, saturated = tracking.quad_tracking_control(
        state, high, np.zeros(3), 0.0, plant_params, params
    )
    assert saturated and thrust == params.T_max

    low = tracking.TrackingTarget(position=state.position - [0.0, 0.0, 50.0])
    thrust, _, saturated = tracking.quad_tracking_control(
        state, low, np.zeros(3), 0.0, plant_params, params
    )
    assert saturated and thrust == 0.0


def test_quad_control_cancels_measured_hook_force(plant_params):
    """The axial component of the fed-forward interaction force shifts the
    demanded thrust by exactly the feedback-linearization term."""
    state = hover_state(plant_params)
    target = tracking.TrackingTarget(position=state.position.copy())
    params = tracking.TrackingParams()
    base, _, _ = tracking.quad_tracking_control(
        state, target, np.zeros(3), 0.0, plant_params, params
    )
    # Vertical cable: e = -z, so a downward pull adds -(e @ F_c) e = +f z,
    # i.e. the vehicle carries the extra axial load.
    f = 0.8
    with_force, _, _ = tracking.quad_tracking_control(
        state, target, np.array([0.0, 0.0, -f]), 0.0, plant_params, params
    )
    assert abs((with_force - base) - f) < 1e-12
