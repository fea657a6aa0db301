"""End-to-end warm-start experiment: generate graphs, solve a seed, transfer, compare."""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import InputError
from .graph import Graph, random_graph
from .ising import build_hamiltonian, exact_ground_energy
from .simulator import AnsatzSpec
from .transfer import (
    ABS_ENERGY,
    CrossEvaluation,
    Strategy,
    StrategyKind,
    cross_evaluate,
    select_initial,
    subsample,
)
from .vqe import OptimizerConfig, Trajectory, parameter_change_series, random_initial, run_vqe, write_trajectory

log = logging.getLogger(__name__)

AGREEMENT_TOLERANCE = 1e-3
# Fraction of (target, trial) pairs that must agree, and the allowed gap between
# the all-points and first-half means relative to the random strategy's mean
# optimality gap. Both are chosen here to make the qualitative claim testable.
AGREEMENT_MIN_FRACTION = 0.5
MEAN_GAP_RATIO_LIMIT = 0.05

DEFAULT_STRATEGIES = tuple(Strategy(k) for k in StrategyKind)

# Stream labels for deriving independent rng substreams within a trial.
_GRAPHS, _SEED_INIT, _TARGET_RUN = 0, 1, 2


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 6
    k: int = 9
    edge_prob: float = 0.5
    reps: int = 3
    stride: int = 10
    trials: int = 10
    strategies: tuple[Strategy, ...] = DEFAULT_STRATEGIES
    optimizer: OptimizerConfig = OptimizerConfig()
    master_seed: int = 0
    output_dir: str = "results"
    stride_param_change: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise InputError("k must be >= 2 (one seed graph plus at least one target)")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.stride < 1:
            raise InputError("stride must be >= 1")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise InputError("edge_prob must lie in [0, 1]")
        if not self.strategies:
            raise InputError("at least one strategy is required")
        names = [s.name for s in self.strategies]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate strategies in {names}")

    @property
    def ansatz(self) -> AnsatzSpec:
        return AnsatzSpec(self.n, self.reps)

    def describe(self) -> dict[str, Any]:
        """JSON-ready view of the settings that determine the results."""
        return {
            "n": self.n,
            "k": self.k,
            "edge_prob": self.edge_prob,
            "reps": self.reps,
            "stride": self.stride,
            "trials": self.trials,
            "strategies": [s.name for s in self.strategies],
            "selection_objectives": [s.selection_objective for s in self.strategies],
            "optimizer": {**asdict(self.optimizer), "bounds": list(self.optimizer.bounds)},
            "master_seed": self.master_seed,
            "stride_param_change": self.stride_param_change,
        }


_INT_KEYS = {"n", "k", "reps", "stride", "trials", "master_seed"}
_OPT_KEYS = {"method", "max_iterations", "energy_tolerance", "step_tolerance", "bounds"}


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise InputError(f"not a boolean: {v!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment.

    Optimizer settings use dotted keys (``optimizer.max_iterations``);
    ``strategies`` is a comma-separated list and ``selection_objective``
    applies to every strategy.
    """
    kw: dict[str, Any] = {}
    opt: dict[str, Any] = {}
    objective = ABS_ENERGY
    strategies = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key in _INT_KEYS:
            kw[key] = int(value)
        elif key == "edge_prob":
            kw[key] = float(value)
        elif key == "output_dir":
            kw[key] = value
        elif key == "stride_param_change":
            kw[key] = _parse_bool(value)
        elif key == "strategies":
            strategies = [s.strip() for s in value.split(",") if s.strip()]
        elif key == "selection_objective":
            objective = value
        elif key.startswith("optimizer.") and key[len("optimizer."):] in _OPT_KEYS:
            sub = key[len("optimizer."):]
            if sub == "method":
                opt[sub] = value
            elif sub == "max_iterations":
                opt[sub] = int(value)
            elif sub == "bounds":
                lo, hi = (float(v) for v in value.split(","))
                opt[sub] = (lo, hi)
            else:
                opt[sub] = float(value)
        else:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
    names = strategies if strategies is not None else [k.value for k in StrategyKind]
    kw["strategies"] = tuple(Strategy(StrategyKind(s), objective) for s in names)
    kw["optimizer"] = OptimizerConfig(**opt)
    return ExperimentConfig(**kw)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def _stream(cfg: ExperimentConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(cfg.master_seed, spawn_key=key))


def _graph_record(g: Graph) -> dict[str, Any]:
    return {"n": g.n, "edges": [[i, j, w] for i, j, w in g.edges]}


def _seed_trajectory_and_record(cfg, trial_index, graphs, spec):
    seed_graph = graphs[-1]
    h_seed = build_hamiltonian(seed_graph)
    init = random_initial(spec, cfg.optimizer.bounds, _stream(cfg, trial_index, _SEED_INIT))
    res = run_vqe(h_seed, spec, init, cfg.optimizer, rng=_stream(cfg, trial_index, _SEED_INIT, 1))
    traj = res.trajectory
    if len(traj) >= 2:
        fig_traj = traj
        if cfg.stride_param_change:
            fig_traj = Trajectory(traj.params[:: cfg.stride], traj.energies[:: cfg.stride])
        changes = parameter_change_series(fig_traj).tolist() if len(fig_traj) >= 2 else []
    else:
        changes = []
    record = {
        "graph_index": len(graphs) - 1,
        "iterations": res.iterations,
        "evaluations": res.evaluations,
        "initial_energy": res.initial_energy,
        "final_energy": res.final_energy,
        "ground_energy": exact_ground_energy(h_seed)[0],
        "status": res.status,
        "trajectory_length": len(traj),
        "param_change": changes,
    }
    return res, record


def run_trial(
    cfg: ExperimentConfig,
    trial_index: int,
    return_trajectory: bool = False,
):
    """Run one repetition of the experiment and return its JSON-ready record.

    All randomness comes from substreams of ``cfg.master_seed`` keyed by the
    trial index, so the record does not depend on execution order.
    """
    spec = cfg.ansatz
    graph_rng = _stream(cfg, trial_index, _GRAPHS)
    graphs = [random_graph(cfg.n, cfg.edge_prob, graph_rng) for _ in range(cfg.k)]
    targets = graphs[:-1]
    hams = [build_hamiltonian(g) for g in targets]

    seed_res, seed_rec = _seed_trajectory_and_record(cfg, trial_index, graphs, spec)
    idx, points = subsample(seed_res.trajectory, cfg.stride)
    ce: CrossEvaluation = cross_evaluate(points, hams, spec, point_indices=idx)
    seed_rec["subsampled_indices"] = idx

    runs = []
    for t, h in enumerate(hams):
        ground = exact_ground_energy(h)[0]
        for s_i, strategy in enumerate(cfg.strategies):
            sel = select_initial(
                ce, t, strategy, spec, cfg.optimizer.bounds,
                rng=_stream(cfg, trial_index, _TARGET_RUN, t, s_i),
            )
            res = run_vqe(
                h, spec, sel.chosen_point, cfg.optimizer,
                rng=_stream(cfg, trial_index, _TARGET_RUN, t, s_i, 1),
            )
            runs.append({
                "target_index": t,
                "strategy": strategy.name,
                "selection_objective": strategy.selection_objective,
                "initial_point_index": sel.chosen_index,
                "initial_trajectory_index": None if sel.chosen_index is None else idx[sel.chosen_index],
                "selection_value": sel.objective_value,
                "initial_energy": res.initial_energy,
                "iterations": res.iterations,
                "evaluations": res.evaluations,
                "final_energy": res.final_energy,
                "ground_energy": ground,
                "status": res.status,
                "hit_max_iterations": res.hit_max_iterations,
            })
    record = {
        "trial": trial_index,
        "graphs": [_graph_record(g) for g in graphs],
        "seed": seed_rec,
        "cross_evaluation": ce.energies.tolist(),
        "runs": runs,
    }
    if return_trajectory:
        return record, seed_res.trajectory
    return record


def _stats(values: list[float]) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    return float(a.mean()), float(a.std())


def aggregate(records: list[dict], strategies: list[str]) -> dict[str, Any]:
    """Per-strategy summaries plus the agreement and parity statistics.

    Run-weighted figures treat every target run equally; trial-weighted
    figures average per-trial means, which differs only when trials contribute
    unequal numbers of runs.
    """
    per_strategy: dict[str, Any] = {}
    for name in strategies:
        runs = [r for rec in records for r in rec["runs"] if r["strategy"] == name]
        if not runs:
            continue
        it_mean, it_std = _stats([r["iterations"] for r in runs])
        ev_mean, ev_std = _stats([r["evaluations"] for r in runs])
        fe_mean, fe_std = _stats([r["final_energy"] for r in runs])
        gap_mean, gap_std = _stats([r["final_energy"] - r["ground_energy"] for r in runs])
        trial_it, trial_fe = [], []
        for rec in records:
            mine = [r for r in rec["runs"] if r["strategy"] == name]
            if mine:
                trial_it.append(_stats([r["iterations"] for r in mine])[0])
                trial_fe.append(_stats([r["final_energy"] for r in mine])[0])
        per_strategy[name] = {
            "runs": len(runs),
            "mean_iterations": it_mean,
            "std_iterations": it_std,
            "mean_evaluations": ev_mean,
            "std_evaluations": ev_std,
            "mean_final_energy": fe_mean,
            "std_final_energy": fe_std,
            "mean_optimality_gap": gap_mean,
            "std_optimality_gap": gap_std,
            "max_iteration_hits": sum(bool(r["hit_max_iterations"]) for r in runs),
            "trial_weighted_mean_iterations": _stats(trial_it)[0],
            "trial_weighted_mean_final_energy": _stats(trial_fe)[0],
        }

    out: dict[str, Any] = {"strategies": per_strategy}
    out["weightings_differ"] = any(
        abs(s["mean_final_energy"] - s["trial_weighted_mean_final_energy"]) > 1e-12
        or abs(s["mean_iterations"] - s["trial_weighted_mean_iterations"]) > 1e-12
        for s in per_strategy.values()
    )
    out["parity"] = _parity(per_strategy)
    out["agreement"] = _agreement(records, per_strategy)
    return out


def _parity(per_strategy: dict[str, Any]) -> dict[str, Any]:
    """Compare strategy means against the pooled final-energy standard deviation.

    The pooled deviation is the root of the run-count-weighted mean of the
    per-strategy variances.
    """
    if len(per_strategy) < 2:
        return {}
    counts = np.array([s["runs"] for s in per_strategy.values()], dtype=float)
    variances = np.array([s["std_final_energy"] ** 2 for s in per_strategy.values()])
    pooled = float(np.sqrt((counts * variances).sum() / counts.sum()))
    means = [s["mean_final_energy"] for s in per_strategy.values()]
    spread = float(max(means) - min(means))
    return {
        "pooled_std_final_energy": pooled,
        "max_mean_difference": spread,
        "within_one_pooled_std": spread <= pooled,
    }


def _agreement(records: list[dict], per_strategy: dict[str, Any]) -> dict[str, Any]:
    a, b, r = StrategyKind.ALL_POINTS.value, StrategyKind.FIRST_HALF.value, StrategyKind.RANDOM.value
    if a not in per_strategy or b not in per_strategy:
        return {}
    diffs = []
    same_start = 0
    for rec in records:
        by_key = {(x["target_index"], x["strategy"]): x for x in rec["runs"]}
        targets = sorted({x["target_index"] for x in rec["runs"]})
        for t in targets:
            ra, rb = by_key[(t, a)], by_key[(t, b)]
            diffs.append(abs(ra["final_energy"] - rb["final_energy"]))
            same_start += ra["initial_point_index"] == rb["initial_point_index"]
    diffs_arr = np.asarray(diffs)
    fraction = float(np.mean(diffs_arr <= AGREEMENT_TOLERANCE))
    mean_diff = abs(per_strategy[a]["mean_final_energy"] - per_strategy[b]["mean_final_energy"])
    out = {
        "pairs": len(diffs),
        "tolerance": AGREEMENT_TOLERANCE,
        "fraction_within_tolerance": fraction,
        "same_initial_point_fraction": same_start / len(diffs),
        "mean_final_energy_difference": mean_diff,
        "thresholds_note": (
            "min_fraction and max_gap_ratio are artifact-chosen operationalizations "
            "of 'tended to converge to the same solution'"
        ),
        "min_fraction": AGREEMENT_MIN_FRACTION,
        "max_gap_ratio": MEAN_GAP_RATIO_LIMIT,
        "fraction_ok": fraction >= AGREEMENT_MIN_FRACTION,
    }
    if r in per_strategy:
        gap = per_strategy[r]["mean_optimality_gap"]
        out["random_mean_optimality_gap"] = gap
        out["gap_ratio"] = mean_diff / gap if gap > 0 else (0.0 if mean_diff == 0 else float("inf"))
        out["mean_difference_ok"] = mean_diff < MEAN_GAP_RATIO_LIMIT * gap
    return out


@dataclass
class ExperimentReport:
    config: dict[str, Any]
    records: list[dict[str, Any]]
    aggregates: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {"config": self.config, "aggregates": self.aggregates, "records": self.records}
        return json.dumps(payload, indent=1, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        data = json.loads(text)
        return cls(data["config"], data["records"], data.get("aggregates", {}))

    def recompute(self) -> "ExperimentReport":
        return replace(self, aggregates=aggregate(self.records, self.config["strategies"]))


def _trial_worker(args):
    cfg, t = args
    return run_trial(cfg, t, return_trajectory=True)


def run_experiment(
    cfg: ExperimentConfig, threads: int = 1, write: bool = True
) -> ExperimentReport:
    """Run every trial, aggregate, and (optionally) persist under ``cfg.output_dir``.

    ``threads`` > 1 farms whole trials out to worker processes; 0 means one per
    CPU. Results are identical for any worker count.
    """
    if threads == 0:
        threads = os.cpu_count() or 1
    jobs = [(cfg, t) for t in range(cfg.trials)]
    if threads > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=min(threads, cfg.trials)) as pool:
            outputs = list(pool.map(_trial_worker, jobs))
    else:
        outputs = []
        for job in jobs:
            outputs.append(_trial_worker(job))
            log.info("trial %d/%d done", job[1] + 1, cfg.trials)
    records = [rec for rec, _ in outputs]
    report = ExperimentReport(cfg.describe(), records).recompute()
    if write:
        out = Path(cfg.output_dir)
        save_report(report, out)
        for rec, traj in outputs:
            write_trajectory(out / f"seed_trajectory_trial{rec['trial']}.csv", traj)
    return report


def save_report(report: ExperimentReport, out_dir: Union[str, Path]) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    emit_plot_data(report, out)


def emit_plot_data(report: ExperimentReport, out_dir: Union[str, Path]) -> None:
    """Write ``strategy_summary.csv`` and ``param_change.csv``.

    ``param_change.csv`` concatenates the seed-run series of every trial in
    trial order; ``iter`` restarts at 0 for each trial.
    """
    out = Path(out_dir)
    with open(out / "strategy_summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["strategy", "mean_iterations", "std_iterations", "mean_final_energy", "std_final_energy"])
        for name, s in report.aggregates["strategies"].items():
            w.writerow([name] + [f"{s[c]:.17g}" for c in
                                 ("mean_iterations", "std_iterations", "mean_final_energy", "std_final_energy")])
    with open(out / "param_change.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "delta"])
        for rec in report.records:
            for t, delta in enumerate(rec["seed"]["param_change"]):
                w.writerow([t, f"{delta:.17g}"])


def load_report(path: Union[str, Path]) -> ExperimentReport:
    p = Path(path)
    if p.is_dir():
        p = p / "report.json"
    return ExperimentReport.from_json(p.read_text())
