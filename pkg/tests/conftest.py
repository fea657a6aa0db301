import pytest

from vqewarm.harness import ExperimentConfig, run_experiment

_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def report_criterion(request):
    lines = request.config.stash.setdefault(_CRITERIA, [])

    def _report(number, passed, detail):
        lines.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")

    return _report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def paper_default_report(tmp_path_factory):
    """n=6, k=9, p=0.5, reps=3, stride=10, trials=10 with master seed 0."""
    out = tmp_path_factory.mktemp("paper_default")
    cfg = ExperimentConfig(n=6, k=9, edge_prob=0.5, reps=3, stride=10, trials=10,
                           master_seed=0, output_dir=str(out))
    return cfg, run_experiment(cfg)
