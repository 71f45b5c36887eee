"""Scenario configuration: YAML schema, validation, and canonical hashing.

Configs are plain-typed dataclasses (floats, ints, strings, lists) so that
parse(serialize(config)) round-trips to an equal object.  Runtime parameter
objects (numpy-backed) are built on demand by the as_* helpers.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import yaml

from .. import admittance, plant, tracking

SCHEMA_VERSION = 1

TASKS = ("loading_unloading_in_place", "transporting")
CONTROLLERS = ("CVIM", "SVIM")
CABLE_MODES = ("VCL", "CCL")
STIFFNESS_PRESETS = ("L", "H")


class ConfigError(ValueError):
    pass


@dataclass
class PlantConfig:
    M_q: float = 2.1
    # Effective distal mass: bare hook (0.012) plus the strapped payload.
    # Both interaction tasks are carried out with a load on the hook; the
    # bare-hook value only applies to free-cable checks.
    M_h: float = 0.312
    J_diag: list = field(default_factory=lambda: [0.03, 0.03, 0.05])
    g: list = field(default_factory=lambda: [0.0, 0.0, -9.81])
    L_min: float = 0.1
    L_max: float = 1.0


@dataclass
class CvimConfig:
    K_beta: float = 6.0
    K_l: float = 10.0
    xi1: list = field(default_factory=lambda: [0.3, 0.3, 0.05])
    xi2: list = field(default_factory=lambda: [0.5, 0.5, 0.002])
    xi3: float = 1.0
    xi4: float = 0.02
    gamma: float = 0.95


@dataclass
class SvimConfig:
    K_diag: list = field(default_factory=lambda: [12.0, 12.0, 12.0, 60.0])
    xi1: list = field(default_factory=lambda: [1.0, 1.0, 0.05])
    xi2: list = field(default_factory=lambda: [0.05, 0.05, 0.005])
    xi3: float = 1.0
    xi4: float = 0.02
    gamma: float = 0.95


@dataclass
class TrackingConfig:
    k_x: float = 16.0
    k_v: float = 8.0
    k_R: float = 30.0
    k_Omega: float = 5.0
    T_max: float = 40.0
    pid_K_P: float = 9.0
    pid_K_I: float = 2.0
    pid_K_D: float = 6.0
    winch_accel_max: float = 6.0


@dataclass
class SensorConfig:
    mocap_rate: float = 100.0
    loadcell_rate: float = 10.0
    mocap_sigma: float = 0.0001
    loadcell_sigma: float = 0.02
    encoder_sigma: float = 0.00001
    spline_window: int = 25
    # One-pole low-pass on the estimated force/tension fed to the admittance
    # (Hz, 0 disables).  Spline-differentiated acceleration is broadband noisy.
    force_filter_cutoff: float = 1.2
    # Separate, slower cutoff for the force fed forward into the thrust
    # command (Hz).  The feedforward exists to cancel the quasi-static load;
    # fast content cannot be phase-canceled and only injects noise.
    ff_filter_cutoff: float = 0.15
    # Cutoff for the load-cell tension fed to the cable-length channel (Hz).
    # The load cell is a quiet sensor, and the length channel needs the
    # swing-frequency tension ripple nearly in phase: reeling out at high
    # tension and in at low extracts swing energy, and a heavy filter's lag
    # destroys that timing.
    tension_filter_cutoff: float = 1.2
    # Ramp-in window (s) on the estimated-force consumers after start; the
    # differentiating spline produces an edge transient while its window
    # fills, and acting on it lurches the vehicle.
    force_arm_time: float = 1.2


@dataclass
class ReferenceConfig:
    L_v: float = 0.5
    hover_height: float = 1.5
    speed: float = 0.25
    distance: float = 2.15
    ramp_time: float = 1.5
    pre_roll: float = 2.0
    post_roll: float = 3.0
    Lv_min: float = 0.4
    Lv_max: float = 0.7
    V_L: float = 0.1


@dataclass
class OperatorConfig:
    # Pull-toward-target profile (loading/unloading task).
    F_max: float = 2.0
    k_op: float = 3.0
    target_offset: list = field(default_factory=lambda: [0.8, 0.0, 0.0])
    t_on: float = 1.0
    t_off: float = 12.0
    ramp: float = 2.5
    # Guidance profile (transporting task).  The narrow bump is the operator
    # shoving the load around the obstacle (tremor rides on it); the wide,
    # weak bias is the hand steering the load to one side for the whole
    # pass, which also keeps the swing plane one-sided.
    hold_force: list = field(default_factory=lambda: [0.0, 0.0, -0.15])
    bump_F: float = 1.0
    bump_radius: float = 0.5
    bias_F: float = 0.5
    bias_radius: float = 1.6
    obstacle_radius: float = 0.25
    # Viscous grip term; a hand is an impedance, and a pure force source
    # would leave the hanging load an undamped pendulum.
    hand_damping: float = 0.3
    # Oscillatory component of the scripted hand (fraction of the active
    # force and its frequency in Hz).  A human push is never a clean ramp;
    # the wobble is what a compliant controller gets to absorb.
    tremor_ratio: float = 0.35
    tremor_freq: float = 0.3
    # The pull tremor calms as the hook closes this fraction of the initial
    # distance to the target (0 disables the scaling).
    vigor_fraction: float = 0.75
    # Weight hung on the hook partway through the loading task and removed
    # near its end (N), and the duration of each hang-on/take-off (s).
    payload_weight: float = 0.4
    payload_rise: float = 0.12
    jitter: float = 0.1


@dataclass
class ScenarioConfig:
    schema_version: int = SCHEMA_VERSION
    task: str = "transporting"
    controller: str = "CVIM"
    cable_mode: str = "VCL"
    stiffness: str = "L"
    stiffness_factor_high: float = 1.5
    seed: int = 0
    duration: float = 0.0  # 0 -> task default
    dt: float = 0.001
    control_rate: float = 100.0
    use_force_estimate: bool = True
    # Initial lean of the hanging load toward the operator (rad); a real
    # load never hangs at the exact vertical where the azimuth is undefined.
    start_lean: float = 0.05
    ccl_length: float = 0.5
    workspace: list = field(default_factory=lambda: [3.5, 3.5, 2.8])
    plant: PlantConfig = field(default_factory=PlantConfig)
    cvim: CvimConfig = field(default_factory=CvimConfig)
    svim: SvimConfig = field(default_factory=SvimConfig)
    tracking: TrackingConfig = field(default_factory=TrackingConfig)
    sensors: SensorConfig = field(default_factory=SensorConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    operator: OperatorConfig = field(default_factory=OperatorConfig)

    # ----- construction of runtime parameter objects -----

    def stiffness_factor(self):
        return self.stiffness_factor_high if self.stiffness == "H" else 1.0

    def as_plant_params(self):
        return plant.PlantParams(
            M_q=self.plant.M_q,
            M_h=self.plant.M_h,
            J=np.diag(self.plant.J_diag),
            g=np.array(self.plant.g, dtype=float),
            L_min=self.plant.L_min,
            L_max=self.plant.L_max,
        )

    def as_cvim_params(self):
        # The stiffness level scales the swing channel only; the cable-length
        # channel keeps the same gain at both levels.
        f = self.stiffness_factor()
        xi3, xi4 = self.cvim.xi3, self.cvim.xi4
        if self.cable_mode == "CCL":
            xi3 = xi4 = 0.0
        return admittance.CvimParams(
            K_beta=self.cvim.K_beta * f,
            K_l=self.cvim.K_l,
            xi1=np.array(self.cvim.xi1, dtype=float),
            xi2=np.array(self.cvim.xi2, dtype=float),
            xi3=xi3,
            xi4=xi4,
            gamma=self.cvim.gamma,
        )

    def as_svim_params(self):
        # Translational channels scale with the stiffness level; the
        # cable-length channel keeps the same gain at both levels.
        f = self.stiffness_factor()
        xi3, xi4 = self.svim.xi3, self.svim.xi4
        if self.cable_mode == "CCL":
            xi3 = xi4 = 0.0
        K = np.array(self.svim.K_diag, dtype=float)
        K[:3] *= f
        return admittance.SvimParams(
            K_diag=K,
            xi1=np.array(self.svim.xi1, dtype=float),
            xi2=np.array(self.svim.xi2, dtype=float),
            xi3=xi3,
            xi4=xi4,
            gamma=self.svim.gamma,
        )

    def as_tracking_params(self):
        return tracking.TrackingParams(
            k_x=self.tracking.k_x,
            k_v=self.tracking.k_v,
            k_R=self.tracking.k_R,
            k_Omega=self.tracking.k_Omega,
            T_max=self.tracking.T_max,
        )

    def as_winch_pid_params(self):
        return tracking.WinchPidParams(
            K_P=self.tracking.pid_K_P,
            K_I=self.tracking.pid_K_I,
            K_D=self.tracking.pid_K_D,
            accel_max=self.tracking.winch_accel_max,
        )

    def virtual_length(self):
        return self.ccl_length if self.cable_mode == "CCL" else self.reference.L_v


_SECTION_TYPES = {
    "plant": PlantConfig,
    "cvim": CvimConfig,
    "svim": SvimConfig,
    "tracking": TrackingConfig,
    "sensors": SensorConfig,
    "reference": ReferenceConfig,
    "operator": OperatorConfig,
}


def _build_section(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return cls(**data)


def from_dict(data):
    """Build and validate a ScenarioConfig from a plain dictionary."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    data = dict(data)
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version} (expected {SCHEMA_VERSION})"
        )
    kwargs = {}
    top_known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(data) - top_known
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    for key, value in data.items():
        if key in _SECTION_TYPES:
            kwargs[key] = _build_section(_SECTION_TYPES[key], value, key)
        else:
            kwargs[key] = value
    cfg = ScenarioConfig(**kwargs)
    validate(cfg)
    return cfg


def validate(cfg):
    if cfg.task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {cfg.task!r}")
    if cfg.controller not in CONTROLLERS:
        raise ConfigError(
            f"controller must be one of {CONTROLLERS}, got {cfg.controller!r}"
        )
    if cfg.cable_mode not in CABLE_MODES:
        raise ConfigError(
            f"cable_mode must be one of {CABLE_MODES}, got {cfg.cable_mode!r}"
        )
    if cfg.stiffness not in STIFFNESS_PRESETS:
        raise ConfigError(
            f"stiffness must be one of {STIFFNESS_PRESETS}, got {cfg.stiffness!r}"
        )
    if cfg.dt <= 0.0 or cfg.control_rate <= 0.0:
        raise ConfigError("dt and control_rate must be positive")
    substeps = 1.0 / (cfg.control_rate * cfg.dt)
    if abs(substeps - round(substeps)) > 1e-9 or round(substeps) < 1:
        raise ConfigError(
            "plant dt must evenly subdivide the control period "
            f"(dt={cfg.dt}, control_rate={cfg.control_rate})"
        )
    if not (cfg.plant.L_min < cfg.plant.L_max):
        raise ConfigError("winch range must satisfy L_min < L_max")
    for name, L in (("reference.L_v", cfg.reference.L_v), ("ccl_length", cfg.ccl_length)):
        if not (cfg.plant.L_min <= L <= cfg.plant.L_max):
            raise ConfigError(f"{name}={L} outside the winch range")
    if not (0.0 < cfg.cvim.gamma < 1.0) or not (0.0 < cfg.svim.gamma < 1.0):
        raise ConfigError("shaping discount gamma must lie in (0, 1)")
    if cfg.sensors.spline_window < 5 or cfg.sensors.spline_window % 2 == 0:
        raise ConfigError("sensors.spline_window must be odd and >= 5")
    if len(cfg.workspace) != 3 or any(w <= 0 for w in cfg.workspace):
        raise ConfigError("workspace must be three positive extents")
    return cfg


def to_dict(cfg):
    return asdict(cfg)


def serialize(cfg):
    """Canonical YAML text for a config."""
    return yaml.safe_dump(to_dict(cfg), sort_keys=True)


def parse(text):
    """Parse YAML text into a validated ScenarioConfig."""
    return from_dict(yaml.safe_load(text))


def load(path):
    with open(path) as fh:
        return parse(fh.read())


def save(cfg, path):
    with open(path, "w") as fh:
        fh.write(serialize(cfg))


def config_hash(cfg):
    """Stable short hash of the canonical JSON form."""
    canonical = json.dumps(to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]
