"""Variational minimization of Ising energies with full trajectory capture."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import InputError, NumericalError
from .ising import IsingHamiltonian, energy_table
from .optimizers import projected_bfgs, spsa
from .simulator import AnsatzSpec, energies_at, gradient

BFGS = "bfgs"
SPSA = "spsa"
METHODS = (BFGS, SPSA)


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = BFGS
    max_iterations: int = 1000
    energy_tolerance: float = 1e-6
    step_tolerance: float = 1e-8
    bounds: tuple[float, float] = (-2 * np.pi, 2 * np.pi)

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown optimizer {self.method!r}; choose from {METHODS}")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if self.energy_tolerance <= 0 or self.step_tolerance <= 0:
            raise InputError("tolerances must be positive")
        lo, hi = self.bounds
        if not lo <= hi:
            raise InputError(f"empty bound interval {self.bounds}")
        object.__setattr__(self, "bounds", (float(lo), float(hi)))


@dataclass(eq=False)
class Trajectory:
    """Accepted iterates; row ``t`` of ``params`` is iterate ``t`` (0 = initial point)."""

    params: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        self.params = np.atleast_2d(np.asarray(self.params, dtype=float))
        self.energies = np.asarray(self.energies, dtype=float).ravel()
        if len(self.params) != len(self.energies) or len(self.energies) == 0:
            raise InputError("trajectory needs one energy per iterate and at least one iterate")

    def __len__(self) -> int:
        return len(self.energies)

    @property
    def iterates(self) -> list[tuple[int, np.ndarray, float]]:
        return [(t, self.params[t], float(self.energies[t])) for t in range(len(self))]


@dataclass(eq=False)
class VqeResult:
    trajectory: Trajectory
    iterations: int
    evaluations: int
    status: str = ""

    @property
    def final_params(self) -> np.ndarray:
        return self.trajectory.params[-1]

    @property
    def final_energy(self) -> float:
        return float(self.trajectory.energies[-1])

    @property
    def initial_energy(self) -> float:
        return float(self.trajectory.energies[0])

    @property
    def hit_max_iterations(self) -> bool:
        return self.status == "max iterations reached"


@dataclass
class _Objective:
    spec: AnsatzSpec
    values: np.ndarray
    evaluations: int = 0
    xs: list = field(default_factory=list)
    fs: list = field(default_factory=list)

    def energy(self, x: np.ndarray) -> float:
        self.evaluations += 1
        e = float(energies_at(self.spec, self.values, x[None, :])[0])
        if not np.isfinite(e):
            raise NumericalError(f"non-finite energy at {x}")
        return e

    def grad(self, x: np.ndarray) -> np.ndarray:
        self.evaluations += 2 * x.size
        g = gradient(self.spec, self.values, x)
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"non-finite gradient at {x}")
        return g

    def record(self, x: np.ndarray, f: float) -> None:
        self.xs.append(x)
        self.fs.append(f)


def run_vqe(
    h: IsingHamiltonian,
    spec: AnsatzSpec,
    initial,
    cfg: OptimizerConfig = OptimizerConfig(),
    rng: Optional[np.random.Generator] = None,
) -> VqeResult:
    """Minimize ``<psi(theta)|H|psi(theta)>`` starting from ``initial``.

    ``rng`` drives the perturbations of the SPSA method and is ignored by the
    default quasi-Newton method.
    """
    if h.n != spec.n:
        raise InputError(f"Hamiltonian has {h.n} qubits, ansatz has {spec.n}")
    x0 = np.asarray(initial, dtype=float)
    if x0.shape != (spec.parameter_count,):
        raise InputError(f"initial point must have {spec.parameter_count} entries")
    lo, hi = cfg.bounds
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise InputError("initial point lies outside the bounds")
    lower = np.full(x0.size, lo)
    upper = np.full(x0.size, hi)

    obj = _Objective(spec, energy_table(h).values)
    common = dict(
        max_iterations=cfg.max_iterations,
        energy_tolerance=cfg.energy_tolerance,
        step_tolerance=cfg.step_tolerance,
    )
    if cfg.method == BFGS:
        status = projected_bfgs(obj.energy, obj.grad, x0, lower, upper, obj.record, **common)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        status = spsa(obj.energy, x0, lower, upper, obj.record, rng=rng, **common)

    traj = Trajectory(np.array(obj.xs), np.array(obj.fs))
    return VqeResult(traj, iterations=len(traj) - 1, evaluations=obj.evaluations, status=status)


def random_initial(spec: AnsatzSpec, bounds: tuple[float, float], rng: np.random.Generator) -> np.ndarray:
    lo, hi = bounds
    return rng.uniform(lo, hi, size=spec.parameter_count)


def parameter_change_series(t: Trajectory) -> np.ndarray:
    """L2 distance between consecutive iterates."""
    if len(t) < 2:
        raise InputError("need at least two iterates")
    return np.linalg.norm(np.diff(t.params, axis=0), axis=1)


def write_trajectory(path: Union[str, Path], t: Trajectory, iters=None) -> None:
    """Write ``iter,energy,theta_0,...`` rows; ``iters`` overrides the iteration column."""
    iters = range(len(t)) if iters is None else iters
    m = t.params.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "energy"] + [f"theta_{j}" for j in range(m)])
        for it, e, row in zip(iters, t.energies, t.params):
            w.writerow([int(it), f"{e:.17g}"] + [f"{v:.17g}" for v in row])


def read_trajectory(path: Union[str, Path]) -> tuple[list[int], Trajectory]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["iter", "energy"]:
        raise InputError(f"{path}: not a trajectory CSV")
    body = rows[1:]
    iters = [int(r[0]) for r in body]
    energies = [float(r[1]) for r in body]
    params = [[float(v) for v in r[2:]] for r in body]
    return iters, Trajectory(np.array(params), np.array(energies))
