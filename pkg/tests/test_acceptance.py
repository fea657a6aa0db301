"""Exit criteria for the package, one test per criterion.

Each test reports a PASS/FAIL line that is echoed in pytest's terminal summary.
"""

import itertools
import time

import numpy as np

from vqewarm.cli import main
from vqewarm.graph import Graph, brute_force_maxcut, random_graph
from vqewarm.ising import build_hamiltonian, energy_table, exact_ground_energy
from vqewarm.simulator import AnsatzSpec, energy_at, gradient, parameter_count, prepare_state
from vqewarm.vqe import parameter_change_series, random_initial, run_vqe

BOUNDS = (-2 * np.pi, 2 * np.pi)


def test_criterion_1_oracle_equivalence(report_criterion):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        g = random_graph(int(rng.integers(3, 9)), float(rng.choice([0.3, 0.5, 0.8])), rng)
        h = build_hamiltonian(g)
        if (h.total_weight - exact_ground_energy(h)[0]) / 2 != brute_force_maxcut(g)[0]:
            mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10
    report_criterion(1, ok, f"{mismatches} mismatches over 200 graphs in {elapsed:.2f}s (limit 10s)")
    assert ok


def test_criterion_2_ansatz_shape(report_criterion):
    count = parameter_count(AnsatzSpec(6, 2))
    report_criterion(2, count == 18, f"parameter_count(n=6, reps=2) = {count}")
    assert count == 18


def test_criterion_3_numerical_core(report_criterion):
    rng = np.random.default_rng(303)
    start = time.perf_counter()
    worst_norm = worst_grad = 0.0
    h = 1e-5
    for _ in range(20):
        n = int(rng.integers(1, 7))
        spec = AnsatzSpec(n, int(rng.integers(0, 5)))
        table = energy_table(build_hamiltonian(random_graph(n, 0.5, rng)))
        p = rng.uniform(*BOUNDS, spec.parameter_count)
        worst_norm = max(worst_norm, abs(np.linalg.norm(prepare_state(spec, p)) - 1))
        fd = np.array([(energy_at(spec, table, p + h * e) - energy_at(spec, table, p - h * e)) / (2 * h)
                       for e in np.eye(spec.parameter_count)])
        worst_grad = max(worst_grad, float(np.max(np.abs(gradient(spec, table, p) - fd))))
    elapsed = time.perf_counter() - start
    ok = worst_norm < 1e-10 and worst_grad < 1e-6 and elapsed < 30
    report_criterion(3, ok, f"max norm error {worst_norm:.1e} (<1e-10), max gradient error "
                            f"{worst_grad:.1e} (<1e-6), {elapsed:.2f}s (limit 30s)")
    assert ok


def _connected_random_graphs(count, n, rng):
    out = []
    while len(out) < count:
        g = random_graph(n, 0.5, rng)
        if g.is_connected():
            out.append(g)
    return out


def test_criterion_4_vqe_solvability(report_criterion):
    rng = np.random.default_rng(404)
    graphs = [Graph.complete(3), Graph.cycle(5)] + _connected_random_graphs(5, 5, rng)
    start = time.perf_counter()
    gaps = []
    for g in graphs:
        h = build_hamiltonian(g)
        spec = AnsatzSpec(g.n, 4)
        best = min(run_vqe(h, spec, random_initial(spec, BOUNDS, rng)).final_energy for _ in range(10))
        gaps.append(best - exact_ground_energy(h)[0])
    elapsed = time.perf_counter() - start
    ok = max(gaps) < 1e-3 and elapsed < 120
    report_criterion(4, ok, f"worst best-of-10 gap {max(gaps):.1e} over {len(graphs)} graphs (<1e-3), "
                            f"{elapsed:.1f}s (limit 120s)")
    assert ok


def test_criterion_5_late_steps_are_small(report_criterion):
    rng = np.random.default_rng(505)
    spec = AnsatzSpec(6, 3)
    start = time.perf_counter()
    ratios = []
    for _ in range(10):
        h = build_hamiltonian(random_graph(6, 0.5, rng))
        d = parameter_change_series(run_vqe(h, spec, random_initial(spec, BOUNDS, rng)).trajectory)
        half = (len(d) + 1) // 2
        ratios.append(d[half:].sum() / d[:half].sum())
    elapsed = time.perf_counter() - start
    passing = sum(r < 0.25 for r in ratios)
    ok = passing >= 8 and elapsed < 300
    report_criterion(5, ok, f"{passing}/10 seed solves have second-half change < 25% of first half "
                            f"(need 8), max ratio {max(ratios):.3f}, {elapsed:.1f}s (limit 300s)")
    assert ok


def test_criterion_6_strategy_parity(paper_default_report, report_criterion):
    _, report = paper_default_report
    strategies = report.aggregates["strategies"]
    pooled = report.aggregates["parity"]["pooled_std_final_energy"]
    means = {k: v["mean_final_energy"] for k, v in strategies.items()}
    worst = max(abs(means[a] - means[b]) for a, b in itertools.combinations(means, 2))
    ok = worst <= pooled
    report_criterion(6, ok, "means " + ", ".join(f"{k}={v:.4f}" for k, v in means.items())
                     + f"; largest difference {worst:.4f} vs pooled std {pooled:.4f}")
    assert ok


def test_criterion_7_half_full_agreement(paper_default_report, report_criterion):
    _, report = paper_default_report
    agg = report.aggregates
    fraction = agg["agreement"]["fraction_within_tolerance"]
    mean_diff = abs(agg["strategies"]["all_points"]["mean_final_energy"]
                    - agg["strategies"]["first_half"]["mean_final_energy"])
    random_gap = agg["strategies"]["random"]["mean_optimality_gap"]
    ok_fraction = fraction >= 0.5
    ok_means = mean_diff < 0.05 * random_gap
    report_criterion(7, ok_fraction and ok_means,
                     f"agreement within 1e-3 on {fraction:.3f} of pairs (need 0.5); mean difference "
                     f"{mean_diff:.4f} vs 5% of random gap {0.05 * random_gap:.5f}")
    assert ok_fraction
    assert ok_means


def test_criterion_8_determinism(tmp_path, report_criterion):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("n = 5\nk = 3\ntrials = 2\nmaster_seed = 2024\n")
    start = time.perf_counter()
    for name in ("a", "b"):
        assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    elapsed = time.perf_counter() - start
    same = (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    ok = same and elapsed < 120
    report_criterion(8, ok, f"report.json byte-identical: {same}; two runs in {elapsed:.1f}s (limit 120s)")
    assert ok
