"""Command-line entry point for reproducible end-to-end runs.

Subcommands: ``gen-data`` (synthetic corpus), ``train`` (fit the slowdown
model), ``schedule`` (plan one queue), ``compare`` (policy comparison with
plot-data CSVs), and ``eval-model`` (held-out error metrics).  Every
command takes a single ``--seed``, writes its outputs plus a run manifest
into ``--out``, and reproduces its outputs byte-for-byte when re-run with
identical inputs.  The manifest is written last, so a directory without
``manifest.json`` is an incomplete run.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import ConfigSpace, SchedulingParams, ValidationError, default_space
from .fnn import (
    TrainingConfig,
    forward_batch,
    load_weights,
    save_weights,
    train as train_network,
    write_loss_csv,
)
from .estimator import FnnSlowdownModel
from .matcher import graph_to_csv
from .scheduler import SchedulerInput, build_graph, schedule, write_schedule_json
from .simenv import (
    OracleParams,
    OracleSlowdownModel,
    dataset_to_csv,
    estimation_error_report,
    generate_dataset,
    load_dataset_csv,
    load_workload,
    run_policy,
    workload_to_json,
    write_error_report_csv,
    write_policy_report_csv,
    POLICIES,
)

OUT_DIR_ENV = "COSCHED_OUT_DIR"


def _resolve_out(args) -> Path:
    # The environment override exists so batch harnesses can redirect
    # output without touching command lines.
    out = os.environ.get(OUT_DIR_ENV, args.out)
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(out_dir: Path, command: str, seed, inputs: dict, options: dict) -> None:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "seed": seed,
        "inputs": {k: str(v) if v is not None else None for k, v in inputs.items()},
        "out_dir": str(out_dir),
        "options": options,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_space(path) -> ConfigSpace:
    return ConfigSpace.load(path) if path else default_space()


def cmd_gen_data(args) -> int:
    out_dir = _resolve_out(args)
    if args.pairs < 1:
        raise ValidationError("--pairs must be >= 1")
    space = _load_space(args.space)
    params = OracleParams.load(args.oracle_params) if args.oracle_params else OracleParams()
    dataset = generate_dataset(
        params, space,
        n_jobs=args.jobs_count,
        n_pairs=args.pairs,
        train_pairs=args.train_pairs,
        seed=args.seed,
    )
    dataset_to_csv(dataset, out_dir / "dataset.csv")
    with open(out_dir / "profiles.json", "w") as fh:
        json.dump(workload_to_json(dataset.jobs), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "bounds.json", "w") as fh:
        json.dump([float(v) for v in dataset.bounds], fh)
        fh.write("\n")
    _write_manifest(out_dir, "gen-data", args.seed,
                    {"config_space": args.space, "oracle_params": args.oracle_params},
                    {"pairs": args.pairs, "train_pairs": args.train_pairs,
                     "jobs_count": args.jobs_count})
    return 0


def cmd_train(args) -> int:
    out_dir = _resolve_out(args)
    samples, _, splits = load_dataset_csv(args.dataset)
    train_samples = [s for s, split in zip(samples, splits) if split == "train"]
    if not train_samples:
        raise ValidationError(f"dataset {args.dataset} has no training rows")
    bounds = None
    bounds_path = Path(args.dataset).with_name("bounds.json")
    if bounds_path.exists():
        with open(bounds_path) as fh:
            bounds = np.asarray(json.load(fh), dtype=float)
    cfg = TrainingConfig(
        learning_rate=args.lr,
        batch_size=args.batch,
        epochs=args.epochs,
        seed=args.seed,
        validation_fraction=args.validation_fraction,
    )
    weights, history = train_network(train_samples, cfg, feature_bounds=bounds)
    save_weights(weights, out_dir / "weights.json")
    write_loss_csv(history, out_dir / "loss.csv")
    _write_manifest(out_dir, "train", args.seed, {"dataset": args.dataset},
                    {"epochs": args.epochs, "lr": args.lr, "batch": args.batch,
                     "validation_fraction": args.validation_fraction})
    return 0


def _pick_model(args):
    if getattr(args, "oracle_as_model", False):
        if not args.oracle_params:
            raise ValidationError("--oracle-as-model requires an oracle params file")
        return OracleSlowdownModel(OracleParams.load(args.oracle_params))
    return FnnSlowdownModel(load_weights(args.weights))


def cmd_schedule(args) -> int:
    out_dir = _resolve_out(args)
    space = _load_space(args.space)
    specs = load_workload(args.workload)
    queue = tuple(s.job for s in specs)
    if len(queue) == 0 or len(queue) % 2 != 0:
        raise ValidationError(f"workload must hold a positive even number of jobs, got {len(queue)}")
    model = _pick_model(args)
    inp = SchedulerInput(queue, space, SchedulingParams(window=len(queue)), model)
    graph = build_graph(inp, jobs=args.jobs)
    graph_to_csv(graph, out_dir / "graph.csv")
    sched = schedule(inp, jobs=args.jobs)
    write_schedule_json(sched, model, space, out_dir / "schedule.json")
    _write_manifest(out_dir, "schedule", args.seed,
                    {"weights": args.weights, "workload": args.workload,
                     "config_space": args.space, "oracle_params": args.oracle_params},
                    {"oracle_as_model": bool(args.oracle_as_model), "jobs": args.jobs})
    return 0


def cmd_compare(args) -> int:
    out_dir = _resolve_out(args)
    space = _load_space(args.space)
    specs = load_workload(args.workload)
    queue = tuple(s.job for s in specs)
    if len(queue) == 0 or len(queue) % 2 != 0:
        raise ValidationError(f"workload must hold a positive even number of jobs, got {len(queue)}")
    params = OracleParams.load(args.oracle_params)
    model = _pick_model(args)

    results = [run_policy(policy, queue, space, model, params, jobs=args.jobs)
               for policy in POLICIES]
    write_policy_report_csv(results, out_dir / "policy_report.csv")

    with open(out_dir / "policy_totals.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["policy", "total_predicted_s", "total_measured_s"])
        for result in results:
            writer.writerow([result.policy, repr(result.total_predicted_s),
                             repr(result.total_measured_s)])

    cosched = next(r for r in results if r.policy == "coschedule")
    with open(out_dir / "power_caps.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["set_index", "jobs", "cpu_cap_w", "gpu_cap_w"])
        for row in cosched.rows:
            for hc in row.configs:
                writer.writerow([row.set_index, "+".join(row.job_ids),
                                 repr(hc.cpu_cap), repr(hc.gpu_cap)])
    with open(out_dir / "core_alloc.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["set_index", "jobs", "cores_job1", "cores_job2"])
        for row in cosched.rows:
            for hc in row.configs:
                writer.writerow([row.set_index, "+".join(row.job_ids),
                                 hc.cpu_partition[0], hc.cpu_partition[1]])
    with open(out_dir / "gpc_alloc.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["set_index", "jobs", "gpcs_job1", "gpcs_job2"])
        for row in cosched.rows:
            for hc in row.configs:
                writer.writerow([row.set_index, "+".join(row.job_ids),
                                 hc.gpu_partition[0], hc.gpu_partition[1]])

    report = estimation_error_report(model, params, queue, space)
    write_error_report_csv(report, out_dir / "estimation_error.csv")

    _write_manifest(out_dir, "compare", args.seed,
                    {"weights": args.weights, "workload": args.workload,
                     "config_space": args.space, "oracle_params": args.oracle_params},
                    {"oracle_as_model": bool(args.oracle_as_model), "jobs": args.jobs})
    return 0


def cmd_eval_model(args) -> int:
    out_dir = _resolve_out(args)
    samples, _, splits = load_dataset_csv(args.dataset)
    chosen = [s for s, split in zip(samples, splits) if split == args.split]
    if not chosen:
        raise ValidationError(f"dataset has no rows for split {args.split!r}")
    weights = load_weights(args.weights)
    X = np.stack([s.input for s in chosen])
    targets = np.array([s.target for s in chosen])
    pred = forward_batch(weights, X)
    err = pred - targets
    with open(out_dir / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["split", "n", "mse", "mae", "max_abs_err", "mean_abs_rel_err"])
        writer.writerow([
            args.split, len(chosen),
            repr(float(np.mean(err ** 2))),
            repr(float(np.mean(np.abs(err)))),
            repr(float(np.max(np.abs(err)))),
            repr(float(np.mean(np.abs(err) / targets))),
        ])
    _write_manifest(out_dir, "eval-model", args.seed,
                    {"weights": args.weights, "dataset": args.dataset},
                    {"split": args.split})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosched",
        description="Co-scheduling, partitioning, and power capping toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate the synthetic labeled corpus")
    p.add_argument("space", help="config-space JSON")
    p.add_argument("oracle_params", help="oracle params JSON")
    p.add_argument("--pairs", type=int, default=16)
    p.add_argument("--train-pairs", type=int, default=12)
    p.add_argument("--jobs-count", type=int, default=8, help="number of synthetic jobs in the corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train the slowdown predictor")
    p.add_argument("dataset", help="dataset CSV from gen-data")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--validation-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    def scheduling_common(p):
        p.add_argument("--oracle-as-model", action="store_true",
                       help="bypass the network and let the oracle predict")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="worker threads for pair optimization")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)

    p = sub.add_parser("schedule", help="plan one job queue")
    p.add_argument("weights", help="weights JSON from train")
    p.add_argument("workload", help="workload JSON (list of job specs)")
    p.add_argument("space", help="config-space JSON")
    p.add_argument("--oracle-params", default=None,
                   help="oracle params JSON (needed with --oracle-as-model)")
    scheduling_common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("compare", help="compare scheduling policies on a workload")
    p.add_argument("weights")
    p.add_argument("workload")
    p.add_argument("space")
    p.add_argument("oracle_params", help="oracle params JSON (measured times)")
    scheduling_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("eval-model", help="error metrics on a dataset split")
    p.add_argument("weights")
    p.add_argument("dataset")
    p.add_argument("--split", choices=("train", "test"), default="test")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_model)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "oracle_params"):
        args.oracle_params = None
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"cosched {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
