"""Comparison matrix over the task/controller/cable/stiffness grid.

Eight cells per task (CVIM/SVIM x VCL/CCL x low/high stiffness), N seeds
per cell with the same seed list everywhere so comparisons are paired.
Cell statistics are mean and standard error over seeds.  Trend checks
compare cell means pairwise, pooling the matched comparisons from every
task in the table, and report the fraction with the expected sign.
"""

import json
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import config as config_mod
from . import runner

CONTROLLERS = ("CVIM", "SVIM")
CABLE_MODES = ("VCL", "CCL")
STIFFNESS_LEVELS = ("L", "H")

CELLS = [
    (ctrl, mode, stiff)
    for ctrl in CONTROLLERS
    for mode in CABLE_MODES
    for stiff in STIFFNESS_LEVELS
]

PASS_FRACTION = 7.0 / 8.0


def cell_config(base_cfg, task, controller, cable_mode, stiffness, seed):
    d = config_mod.to_dict(base_cfg)
    d["task"] = task
    d["controller"] = controller
    d["cable_mode"] = cable_mode
    d["stiffness"] = stiffness
    d["seed"] = int(seed)
    return config_mod.from_dict(d)


def _run_cell_config(cfg_dict):
    cfg = config_mod.from_dict(cfg_dict)
    result = runner.run_scenario(cfg)
    return result.metrics


def _stats(values):
    arr = np.asarray(values, dtype=float)
    mean = float(np.mean(arr))
    if len(arr) > 1:
        se = float(np.std(arr, ddof=1) / np.sqrt(len(arr)))
    else:
        se = 0.0
    return {"mean": mean, "se": se, "values": [float(v) for v in arr]}


def comparison_matrix(base_cfg, seeds=None, jobs=0, tasks=None):
    """Run the grid; returns {"cells": [...], "tasks": ..., ...}.

    ``tasks`` is a sequence of task names (default: just the base config's
    task).  Every task contributes its own eight cells.
    """
    if seeds is None:
        seeds = list(range(10))
    seeds = [int(s) for s in seeds]
    if tasks is None:
        tasks = (base_cfg.task,)
    tasks = list(tasks)
    jobs = int(jobs or 0)

    work = []
    for task in tasks:
        for cell in CELLS:
            for seed in seeds:
                cfg = cell_config(base_cfg, task, *cell, seed)
                work.append(((task,) + cell, seed, config_mod.to_dict(cfg)))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            metric_dicts = list(pool.map(_run_cell_config, [w[2] for w in work]))
    else:
        metric_dicts = [_run_cell_config(w[2]) for w in work]

    by_cell = {}
    for (key, seed, _), metrics in zip(work, metric_dicts):
        by_cell.setdefault(key, []).append((seed, metrics))

    cells_out = []
    for key, rows in by_cell.items():
        task, ctrl, mode, stiff = key
        metric_names = sorted(rows[0][1].keys())
        cells_out.append(
            {
                "task": task,
                "controller": ctrl,
                "cable_mode": mode,
                "stiffness": stiff,
                "seeds": [seed for seed, _ in rows],
                "metrics": {
                    name: _stats([m[name] for _, m in rows]) for name in metric_names
                },
            }
        )
    return {
        "cells": cells_out,
        "tasks": tasks,
        "seeds": seeds,
        "base_config_hash": config_mod.config_hash(base_cfg),
    }


def _cell_mean(table, task, controller, cable_mode, stiffness, metric):
    for cell in table["cells"]:
        if (
            cell.get("task", table["tasks"][0]) == task
            and cell["controller"] == controller
            and cell["cable_mode"] == cable_mode
            and cell["stiffness"] == stiffness
        ):
            return cell["metrics"][metric]["mean"]
    raise KeyError((task, controller, cable_mode, stiffness))


def trend_report(table):
    """Directional trend verdicts from cell means.

    Each family pools its matched comparisons across every task in the
    table (8 comparisons with two tasks) and passes when at least
    PASS_FRACTION of them carry the expected sign:

      cvim_le_svim_beta     CVIM mean swing angle   <= SVIM's, matched cells
      cvim_le_svim_jerk     CVIM mean payload jerk  <= SVIM's, matched cells
      cvim_le_svim_tension  CVIM mean cable tension <= SVIM's, matched cells
      vcl_le_ccl_jerk       variable-length jerk <= locked-length jerk
      high_stiffness_raises_tension  stiff preset > soft preset on tension
    """
    tasks = table["tasks"]
    families = {}

    controller_metrics = (
        ("cvim_le_svim_beta", "mean_beta"),
        ("cvim_le_svim_jerk", "mean_jerk"),
        ("cvim_le_svim_tension", "mean_tension"),
    )
    for family_name, metric in controller_metrics:
        checks = []
        for task in tasks:
            for mode in CABLE_MODES:
                for stiff in STIFFNESS_LEVELS:
                    a = _cell_mean(table, task, "CVIM", mode, stiff, metric)
                    b = _cell_mean(table, task, "SVIM", mode, stiff, metric)
                    checks.append(
                        {
                            "cell": f"{task}/{mode}/{stiff}",
                            "metric": metric,
                            "cvim": a,
                            "svim": b,
                            "ok": bool(a <= b),
                        }
                    )
        families[family_name] = _family(checks)

    checks = []
    for task in tasks:
        for ctrl in CONTROLLERS:
            for stiff in STIFFNESS_LEVELS:
                a = _cell_mean(table, task, ctrl, "VCL", stiff, "mean_jerk")
                b = _cell_mean(table, task, ctrl, "CCL", stiff, "mean_jerk")
                checks.append(
                    {
                        "cell": f"{task}/{ctrl}/{stiff}",
                        "metric": "mean_jerk",
                        "vcl": a,
                        "ccl": b,
                        "ok": bool(a <= b),
                    }
                )
    families["vcl_le_ccl_jerk"] = _family(checks)

    checks = []
    for task in tasks:
        for ctrl in CONTROLLERS:
            for mode in CABLE_MODES:
                lo = _cell_mean(table, task, ctrl, mode, "L", "mean_tension")
                hi = _cell_mean(table, task, ctrl, mode, "H", "mean_tension")
                checks.append(
                    {
                        "cell": f"{task}/{ctrl}/{mode}",
                        "metric": "mean_tension",
                        "low": lo,
                        "high": hi,
                        "ok": bool(hi > lo),
                    }
                )
    families["high_stiffness_raises_tension"] = _family(checks)

    families["all_ok"] = all(
        fam["ok"] for name, fam in families.items() if name != "all_ok"
    )
    return families


def _family(checks):
    passed = sum(1 for c in checks if c["ok"])
    total = len(checks)
    fraction = passed / total if total else 1.0
    return {
        "passed": passed,
        "total": total,
        "fraction": fraction,
        "ok": fraction >= PASS_FRACTION - 1e-12,
        "checks": checks,
    }


def write_table_json(path, table, trends=None):
    payload = dict(table)
    if trends is not None:
        payload["trends"] = trends
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_table_csv(path, table):
    metric_names = sorted(
        {name for cell in table["cells"] for name in cell["metrics"]}
    )
    header = ["task", "controller", "cable_mode", "stiffness"]
    for name in metric_names:
        header += [f"{name}_mean", f"{name}_se"]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for cell in table["cells"]:
            row = [
                cell.get("task", table["tasks"][0]),
                cell["controller"],
                cell["cable_mode"],
                cell["stiffness"],
            ]
            for name in metric_names:
                stats = cell["metrics"].get(name)
                row.append(repr(stats["mean"]) if stats else "")
                row.append(repr(stats["se"]) if stats else "")
            fh.write(",".join(row) + "\n")
