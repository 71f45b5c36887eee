from .config import ConfigError, ScenarioConfig, config_hash
from .config import load as load_config
from .config import save as save_config
from .metrics import compute_metrics, mean_jerk, path_length, time_mean
from .runner import DivergenceError, LOG_COLUMNS, RunResult, run_scenario
from .runio import read_trace_csv, summary_dict, write_summary_json, write_trace_csv
from .sweep import comparison_matrix, trend_report

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "config_hash",
    "load_config",
    "save_config",
    "compute_metrics",
    "mean_jerk",
    "path_length",
    "time_mean",
    "DivergenceError",
    "LOG_COLUMNS",
    "RunResult",
    "run_scenario",
    "read_trace_csv",
    "summary_dict",
    "write_summary_json",
    "write_trace_csv",
    "comparison_matrix",
    "trend_report",
]
