"""Shared fixtures and random-state helpers for the test suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tethersim import plant

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def random_rotation(rng):
    """Uniform-ish random rotation matrix (QR of a Gaussian, det fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0.0:
        q[:, 2] *= -1.0
    return q


def random_plant_state(rng, params):
    """Random in-chart plant state away from the winch stops and the pole."""
    state = plant.PlantState(
        position=rng.uniform(-1.0, 1.0, 3),
        velocity=rng.uniform(-0.5, 0.5, 3),
        rotation=random_rotation(rng),
        omega=rng.uniform(-0.5, 0.5, 3),
        cable=plant.CableState(
            alpha=rng.uniform(-np.pi, np.pi),
            beta=rng.uniform(0.15, 2.0),
            alpha_dot=rng.uniform(-1.0, 1.0),
            beta_dot=rng.uniform(-1.0, 1.0),
            length=rng.uniform(
                params.L_min + 0.05, params.L_max - 0.05
            ),
            length_rate=rng.uniform(-0.2, 0.2),
        ),
    )
    return state


def random_plant_inputs(rng):
    return plant.PlantInputs(
        thrust=rng.uniform(0.0, 30.0),
        torque=rng.uniform(-0.5, 0.5, 3),
        winch_accel=rng.uniform(-2.0, 2.0),
        hook_force=rng.uniform(-2.0, 2.0, 3),
    )


@pytest.fixture(scope="session")
def plant_params():
    return plant.PlantParams()
