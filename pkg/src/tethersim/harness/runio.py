"""Run artifacts: trace CSV and summary JSON.

Floats are written with repr() (shortest round-trip form) so a run with the
same config and seed produces a byte-identical file on any platform with
IEEE-754 doubles.
"""

import json

from . import config as config_mod
from . import runner


def format_float(x):
    return repr(float(x))


def write_trace_csv(path, log, columns=None):
    columns = list(columns) if columns is not None else list(runner.LOG_COLUMNS)
    n = len(log[columns[0]])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for i in range(n):
            fh.write(",".join(format_float(log[c][i]) for c in columns) + "\n")


def read_trace_csv(path):
    import numpy as np

    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = [[] for _ in header]
        for line in fh:
            line = line.strip()
            if not line:
                continue
            for slot, tok in zip(data, line.split(",")):
                slot.append(float(tok))
    return {name: np.array(vals) for name, vals in zip(header, data)}


def summary_dict(result):
    cfg = result.config
    return {
        "config": config_mod.to_dict(cfg),
        "config_hash": config_mod.config_hash(cfg),
        "seed": cfg.seed,
        "task": cfg.task,
        "controller": cfg.controller,
        "cable_mode": cfg.cable_mode,
        "stiffness": cfg.stiffness,
        "metrics": result.metrics,
        "checks": result.summary,
    }


def write_summary_json(path, result):
    with open(path, "w") as fh:
        json.dump(summary_dict(result), fh, indent=2, sort_keys=True)
        fh.write("\n")
