"""Command-line entry points.

Subcommands:
  run            one closed-loop scenario -> trace.csv + summary.json
  sweep          controller/cable/stiffness comparison matrix
  certify        admittance stability certificate + forced-envelope batch
  estimate-demo  hook-force estimator ablation (noisy vs noiseless sensors)
"""

import argparse
import json
import os
import sys

import numpy as np

from . import stability
from .harness import config as config_mod
from .harness import runio, runner, sweep


def _load_config(args, overrides=None):
    if args.config:
        cfg = config_mod.load(args.config)
    else:
        cfg = config_mod.from_dict({})
    data = config_mod.to_dict(cfg)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.dt is not None:
        data["dt"] = args.dt
    if getattr(args, "truth_force", False):
        data["use_force_estimate"] = False
    for key, value in (overrides or {}).items():
        data[key] = value
    return config_mod.from_dict(data)


def _ensure_out(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def cmd_run(args):
    cfg = _load_config(args)
    result = runner.run_scenario(cfg)
    out = _ensure_out(args)
    runio.write_trace_csv(os.path.join(out, "trace.csv"), result.log)
    runio.write_summary_json(os.path.join(out, "summary.json"), result)
    print(f"task={cfg.task} controller={cfg.controller} cable={cfg.cable_mode} "
          f"stiffness={cfg.stiffness} seed={cfg.seed}")
    for name, value in sorted(result.metrics.items()):
        print(f"  {name} = {value:.6g}")
    print(f"  slack_events = {result.summary['slack_events']}")
    print(f"  workspace_exceeded = {result.summary['workspace_exceeded']}")
    print(f"wrote {out}/trace.csv and {out}/summary.json")
    return 0


def cmd_sweep(args):
    cfg = _load_config(args)
    seeds = list(range(args.runs))
    if args.tasks == "both":
        tasks = list(config_mod.TASKS)
    elif args.tasks == "config":
        tasks = None
    else:
        tasks = [t.strip() for t in args.tasks.split(",") if t.strip()]
    table = sweep.comparison_matrix(cfg, seeds=seeds, jobs=args.jobs, tasks=tasks)
    trends = sweep.trend_report(table)
    out = _ensure_out(args)
    sweep.write_table_json(os.path.join(out, "table.json"), table, trends)
    sweep.write_table_csv(os.path.join(out, "table.csv"), table)
    for cell in table["cells"]:
        m = cell["metrics"]
        print(
            f"{cell['task']}/{cell['controller']}/"
            f"{cell['cable_mode']}/{cell['stiffness']}: "
            f"beta={m['mean_beta']['mean']:.4f}+-{m['mean_beta']['se']:.4f} "
            f"jerk={m['mean_jerk']['mean']:.3f}+-{m['mean_jerk']['se']:.3f} "
            f"tension={m['mean_tension']['mean']:.4f}+-{m['mean_tension']['se']:.4f}"
        )
    for name, fam in trends.items():
        if name == "all_ok":
            continue
        print(f"trend {name}: {fam['passed']}/{fam['total']} "
              f"({'ok' if fam['ok'] else 'FAIL'})")
    print(f"wrote {out}/table.json and {out}/table.csv")
    return 0 if trends["all_ok"] else 1


def cmd_certify(args):
    cfg = _load_config(args)
    cvim = cfg.as_cvim_params()
    pp = cfg.as_plant_params()
    ref = cfg.reference
    cert = stability.certify(
        cvim, pp, Lv_min=ref.Lv_min, Lv_max=ref.Lv_max, V_L=ref.V_L
    )
    batch = None
    if cert.feasible and not args.skip_envelope:
        batch = stability.run_envelope_batch(
            cvim, pp, cert, n_runs=args.envelope_runs, seed=cfg.seed
        )
    out = _ensure_out(args)
    path = os.path.join(out, "certificate.json")
    stability.dump_certificate(path, cert, batch)
    report = stability.certificate_report(cert, batch)
    print(json.dumps(report["verdicts"], indent=2, sort_keys=True))
    print(f"wrote {path}")
    if not cert.feasible:
        return 1
    if batch is not None and not report["verdicts"]["all_envelopes_hold"]:
        return 1
    return 0


def cmd_estimate_demo(args):
    out = _ensure_out(args)
    report = {}
    for label, noisy in (("noisy", True), ("noiseless", False)):
        overrides = {}
        if not noisy:
            overrides["sensors"] = {
                "mocap_sigma": 0.0,
                "loadcell_sigma": 0.0,
                "encoder_sigma": 0.0,
            }
        cfg = _load_config(args, overrides=overrides)
        result = runner.run_scenario(cfg)
        log = result.log
        valid = log["est_valid"] > 0.5
        err = np.stack(
            [
                log["Fc_hat_x"] - log["Fc_x"],
                log["Fc_hat_y"] - log["Fc_y"],
                log["Fc_hat_z"] - log["Fc_z"],
            ],
            axis=1,
        )[valid]
        norms = np.linalg.norm(err, axis=1)
        report[label] = {
            "valid_ticks": int(valid.sum()),
            "force_rmse": float(np.sqrt(np.mean(norms**2))) if len(norms) else None,
            "force_max_error": float(np.max(norms)) if len(norms) else None,
            "latency": float(np.median(log["t"][valid] - log["est_eval_time"][valid]))
            if valid.any()
            else None,
        }
        print(f"{label}: {report[label]}")
    path = os.path.join(out, "estimate_demo.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")
    return 0


def _add_common(p):
    p.add_argument("--config", default=None, help="scenario config file (YAML)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--dt", type=float, default=None, help="override plant step size")
    p.add_argument(
        "--truth-force",
        action="store_true",
        help="bypass the estimator, feed the true hook force to the controller",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tethersim",
        description="tethered aerial load simulation and admittance control",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run the comparison matrix")
    _add_common(p)
    p.add_argument("--runs", type=int, default=10, help="seeds per cell")
    p.add_argument("--jobs", type=int, default=0, help="parallel workers (0 = serial)")
    p.add_argument(
        "--tasks",
        default="both",
        help="'both', 'config' (the config file's task), or a comma list",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("certify", help="stability certificate for the admittance")
    _add_common(p)
    p.add_argument("--envelope-runs", type=int, default=100)
    p.add_argument("--skip-envelope", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("estimate-demo", help="estimator ablation on one scenario")
    _add_common(p)
    p.set_defaults(func=cmd_estimate_demo)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
