"""Ising encoding of MaxCut and evaluation of the resulting diagonal observable.

Qubit ``i`` corresponds to bit ``i`` of a partition and to the ``i``-th least
significant bit of a computational-basis index. Spin values are ``z = 1 - 2s``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError
from .graph import MAX_ENUMERATION_QUBITS, BitstringLike, Graph, as_bits, index_to_bits


@dataclass(frozen=True)
class IsingHamiltonian:
    """Sum of weighted ``Z_i Z_j`` couplings on ``n`` qubits."""

    n: int
    terms: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        seen = set()
        for i, j, _ in self.terms:
            if not (0 <= i < j < self.n):
                raise InputError(f"coupling ({i}, {j}) invalid for n={self.n}")
            if (i, j) in seen:
                raise InputError(f"duplicate coupling ({i}, {j})")
            seen.add((i, j))

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.terms))


@dataclass(frozen=True, eq=False)
class EnergyTable:
    """Diagonal of an Ising Hamiltonian; ``values[b]`` is the energy of basis state ``b``."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (1 << self.n,):
            raise InputError(f"energy table must have length 2**{self.n}")
        self.values.setflags(write=False)


def build_hamiltonian(g: Graph) -> IsingHamiltonian:
    return IsingHamiltonian(g.n, tuple(g.edges))


def energy_of_bitstring(h: IsingHamiltonian, s: BitstringLike) -> float:
    z = 1 - 2 * as_bits(s, h.n).astype(np.int64)
    return float(sum(w * z[i] * z[j] for i, j, w in h.terms))


def _check_capacity(n: int) -> None:
    if n > MAX_ENUMERATION_QUBITS:
        raise CapacityError(f"n={n} exceeds table limit {MAX_ENUMERATION_QUBITS}")


def energy_table(h: IsingHamiltonian) -> EnergyTable:
    _check_capacity(h.n)
    idx = np.arange(1 << h.n, dtype=np.int64)
    spins = [1.0 - 2.0 * ((idx >> q) & 1) for q in range(h.n)]
    values = np.zeros(idx.size)
    for i, j, w in h.terms:
        values += w * spins[i] * spins[j]
    return EnergyTable(h.n, values)


def exact_ground_energy(h: IsingHamiltonian) -> tuple[float, np.ndarray]:
    """Minimum diagonal entry and its lowest-index minimizer."""
    table = energy_table(h)
    b = int(np.argmin(table.values))
    return float(table.values[b]), index_to_bits(b, h.n)
