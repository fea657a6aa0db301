"""Warm-start selection from a seed problem's optimization trajectory.

Points visited while solving a seed Hamiltonian are subsampled, evaluated on
each target Hamiltonian, and one of them is chosen as the target's starting
point. Three strategies are supported: search all observed points, search only
the earlier half, or ignore the observations and start at random.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InputError
from .ising import IsingHamiltonian, energy_table
from .simulator import AnsatzSpec, energies_at
from .vqe import Trajectory, random_initial, read_trajectory, write_trajectory


class StrategyKind(str, enum.Enum):
    ALL_POINTS = "all_points"
    FIRST_HALF = "first_half"
    RANDOM = "random"


ABS_ENERGY = "abs_energy"
ENERGY = "energy"
OBJECTIVES = (ABS_ENERGY, ENERGY)


@dataclass(frozen=True)
class Strategy:
    kind: StrategyKind
    selection_objective: str = ABS_ENERGY

    def __post_init__(self):
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.selection_objective not in OBJECTIVES:
            raise InputError(f"unknown selection objective {self.selection_objective!r}")

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(eq=False)
class CrossEvaluation:
    """``energies[i, h]`` is the energy of ``points[h]`` on target ``i``.

    ``point_indices`` holds each point's position in the source trajectory.
    """

    points: np.ndarray
    energies: np.ndarray
    point_indices: Optional[list[int]] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            pts = pts.reshape(len(pts), -1) if pts.size else pts.reshape(0, 0)
        self.points = pts
        self.energies = np.atleast_2d(np.asarray(self.energies, dtype=float))
        if self.energies.shape[1] != len(self.points):
            raise InputError("energy matrix column count must equal the number of points")
        if self.point_indices is None:
            self.point_indices = list(range(len(self.points)))


@dataclass(frozen=True, eq=False)
class SelectionResult:
    chosen_point: np.ndarray
    chosen_index: Optional[int] = None
    objective_value: Optional[float] = None


def subsample(t: Trajectory, stride: int) -> tuple[list[int], list[np.ndarray]]:
    """Every ``stride``-th iterate, starting with the initial point."""
    if int(stride) != stride or stride < 1:
        raise InputError(f"stride must be a positive integer, got {stride!r}")
    idx = list(range(0, len(t), int(stride)))
    return idx, [t.params[i].copy() for i in idx]


def cross_evaluate(
    points: Sequence[np.ndarray],
    targets: Sequence[IsingHamiltonian],
    spec: AnsatzSpec,
    point_indices: Optional[list[int]] = None,
) -> CrossEvaluation:
    for h in targets:
        if h.n != spec.n:
            raise InputError(f"target has {h.n} qubits, ansatz has {spec.n}")
    P = np.asarray(points, dtype=float).reshape(len(points), spec.parameter_count)
    E = np.zeros((len(targets), len(P)))
    if len(P):
        for i, h in enumerate(targets):
            E[i] = energies_at(spec, energy_table(h), P)
    return CrossEvaluation(P, E, point_indices)


def first_half_size(count: int) -> int:
    return math.ceil(count / 2)


def select_initial(
    ce: CrossEvaluation,
    target_index: int,
    strategy: Strategy,
    spec: AnsatzSpec,
    bounds: tuple[float, float],
    rng: Optional[np.random.Generator] = None,
) -> SelectionResult:
    """Choose a starting point for one target.

    Non-random strategies take the lowest-index argmin of the objective (|E| or
    E) over the candidate points and never touch ``rng``.
    """
    if strategy.kind is StrategyKind.RANDOM:
        if rng is None:
            raise InputError("the random strategy needs an rng")
        return SelectionResult(random_initial(spec, bounds, rng))

    if not 0 <= target_index < ce.energies.shape[0]:
        raise InputError(f"target index {target_index} out of range")
    count = len(ce.points)
    if count == 0:
        raise InputError("no observed points to select from")
    if strategy.kind is StrategyKind.FIRST_HALF:
        count = first_half_size(count)
    row = ce.energies[target_index, :count]
    scores = np.abs(row) if strategy.selection_objective == ABS_ENERGY else row
    j = int(np.argmin(scores))
    return SelectionResult(ce.points[j].copy(), j, float(scores[j]))


def write_cross_evaluation(
    path: Union[str, Path],
    ce: CrossEvaluation,
    points_path: Union[str, Path, None] = None,
    seed_energies: Optional[np.ndarray] = None,
) -> None:
    """Long-format ``point_index,target_index,energy`` CSV plus optional points sidecar.

    The sidecar is in trajectory format with ``iter`` holding each point's
    position in the seed trajectory and ``energy`` its seed energy (NaN when
    not supplied).
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["point_index", "target_index", "energy"])
        for i in range(ce.energies.shape[0]):
            for h in range(ce.energies.shape[1]):
                w.writerow([h, i, f"{ce.energies[i, h]:.17g}"])
    if points_path is not None:
        if seed_energies is None:
            seed_energies = np.full(len(ce.points), np.nan)
        write_trajectory(points_path, Trajectory(ce.points, seed_energies), iters=ce.point_indices)


def read_cross_evaluation(path: Union[str, Path], points_path: Union[str, Path]) -> CrossEvaluation:
    iters, pts = read_trajectory(points_path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    T = 1 + max((int(r["target_index"]) for r in rows), default=-1)
    E = np.full((T, len(pts)), np.nan)
    for r in rows:
        E[int(r["target_index"]), int(r["point_index"])] = float(r["energy"])
    if np.isnan(E).any():
        raise InputError(f"{path}: cross-evaluation matrix has missing entries")
    return CrossEvaluation(pts.params, E, iters)
