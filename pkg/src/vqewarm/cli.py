"""Command-line entry point: ``vqewarm <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .graph import random_graph, read_graph, write_graph
from .harness import ExperimentConfig, load_config, load_report, run_experiment, save_report
from .ising import build_hamiltonian, exact_ground_energy
from .simulator import AnsatzSpec
from .transfer import cross_evaluate, subsample, write_cross_evaluation
from .vqe import METHODS, OptimizerConfig, random_initial, read_trajectory, run_vqe, write_trajectory


def _gen_graphs(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for i in range(args.k):
        write_graph(out / f"graph_{i}.txt", random_graph(args.n, args.edge_prob, rng))
    print(f"wrote {args.k} graphs to {out}")
    return 0


def _solve(args) -> int:
    g = read_graph(args.graph)
    h = build_hamiltonian(g)
    spec = AnsatzSpec(g.n, args.reps)
    cfg = OptimizerConfig(method=args.method, max_iterations=args.max_iterations)
    rng = np.random.default_rng(args.seed)
    init = random_initial(spec, cfg.bounds, rng)
    res = run_vqe(h, spec, init, cfg, rng=rng)
    write_trajectory(args.out, res.trajectory)
    summary = {
        "iterations": res.iterations,
        "evaluations": res.evaluations,
        "final_energy": res.final_energy,
        "status": res.status,
    }
    if g.n <= 24:
        summary["ground_energy"] = exact_ground_energy(h)[0]
    print(json.dumps(summary))
    return 0


def _cross_eval(args) -> int:
    graphs = [read_graph(p) for p in args.graphs]
    n = graphs[0].n
    _, traj = read_trajectory(args.trajectory)
    m = traj.params.shape[1]
    if m % n:
        raise SystemExit(f"trajectory width {m} is not a multiple of n={n}")
    spec = AnsatzSpec(n, m // n - 1)
    idx, points = subsample(traj, args.stride)
    ce = cross_evaluate(points, [build_hamiltonian(g) for g in graphs], spec, point_indices=idx)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_cross_evaluation(
        out / "cross_evaluation.csv", ce, out / "points.csv", seed_energies=traj.energies[idx]
    )
    print(f"evaluated {len(points)} points on {len(graphs)} graphs -> {out}")
    return 0


def _experiment(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    report = run_experiment(cfg, threads=args.threads)
    _print_summary(report.aggregates)
    return 0


def _report(args) -> int:
    report = load_report(args.input).recompute()
    out = args.out if args.out is not None else (
        args.input if Path(args.input).is_dir() else str(Path(args.input).parent)
    )
    save_report(report, out)
    _print_summary(report.aggregates)
    return 0


def _print_summary(agg) -> None:
    for name, s in agg["strategies"].items():
        print(
            f"{name:>11}: iterations {s['mean_iterations']:.2f} +/- {s['std_iterations']:.2f}, "
            f"final energy {s['mean_final_energy']:.4f} +/- {s['std_final_energy']:.4f}"
        )
    if agg.get("agreement"):
        a = agg["agreement"]
        print(f"all/first-half agreement: {a['fraction_within_tolerance']:.3f} of {a['pairs']} pairs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqewarm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graphs", help="write random graph files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=9)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_gen_graphs)

    p = sub.add_parser("solve", help="run one VQE and write its trajectory CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--method", choices=METHODS, default=METHODS[0])
    p.add_argument("--max-iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="trajectory CSV path")
    p.set_defaults(func=_solve)

    p = sub.add_parser("cross-eval", help="evaluate subsampled trajectory points on graphs")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--graphs", nargs="+", required=True)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cross_eval)

    p = sub.add_parser("experiment", help="run the full warm-start comparison")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1, help="worker processes, 0 = one per CPU")
    p.set_defaults(func=_experiment)

    p = sub.add_parser("report", help="recompute aggregates and plot data from report.json")
    p.add_argument("input", help="report.json or the directory holding it")
    p.add_argument("--out", help="directory for regenerated files (default: alongside input)")
    p.set_defaults(func=_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
