"""Dense statevector simulation of the RY / linear-CNOT two-local ansatz.

The circuit alternates a layer of single-qubit Y rotations with a chain of
CNOTs (control ``q``, target ``q + 1``), ``reps`` times, and closes with one
more rotation layer. Parameters are ordered layer-major, qubit-minor.

Every gate in this circuit is real, so amplitudes are propagated as float64
internally and only widened to complex at the public boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError
from .ising import EnergyTable


@dataclass(frozen=True)
class AnsatzSpec:
    n: int
    reps: int

    def __post_init__(self):
        if self.n < 1 or self.reps < 0:
            raise InputError(f"invalid ansatz shape n={self.n}, reps={self.reps}")

    @property
    def parameter_count(self) -> int:
        return self.n * (self.reps + 1)


def parameter_count(spec: AnsatzSpec) -> int:
    return spec.parameter_count


@lru_cache(maxsize=None)
def _entangler_permutation(n: int) -> np.ndarray:
    # Gather indices for the whole CNOT chain: new[b] = old[perm[b]].
    idx = np.arange(1 << n)
    perm = idx.copy()
    for q in range(n - 1):
        cnot = np.where((idx >> q) & 1, idx ^ (1 << (q + 1)), idx)
        perm = perm[cnot]
    perm.setflags(write=False)
    return perm


def _rotate(states: np.ndarray, n: int, q: int, angles: np.ndarray) -> np.ndarray:
    view = states.reshape(states.shape[0], 1 << (n - q - 1), 2, 1 << q)
    c = np.cos(angles / 2)[:, None, None]
    s = np.sin(angles / 2)[:, None, None]
    a0 = view[:, :, 0, :]
    a1 = view[:, :, 1, :]
    out = np.empty_like(view)
    out[:, :, 0, :] = c * a0 - s * a1
    out[:, :, 1, :] = s * a0 + c * a1
    return out.reshape(states.shape)


def _check_params(spec: AnsatzSpec, params) -> np.ndarray:
    p = np.asarray(params, dtype=float)
    if p.shape[-1] != spec.parameter_count:
        raise InputError(
            f"expected {spec.parameter_count} parameters, got {p.shape[-1]}"
        )
    return p


def prepare_states(spec: AnsatzSpec, params: np.ndarray) -> np.ndarray:
    """Real amplitudes for a batch of parameter vectors, shape ``(B, 2**n)``."""
    p = np.atleast_2d(_check_params(spec, params))
    n = spec.n
    states = np.zeros((p.shape[0], 1 << n))
    states[:, 0] = 1.0
    perm = _entangler_permutation(n)
    for layer in range(spec.reps + 1):
        for q in range(n):
            states = _rotate(states, n, q, p[:, layer * n + q])
        if layer < spec.reps and n > 1:
            states = states[:, perm]
    return states


def prepare_state(spec: AnsatzSpec, params) -> np.ndarray:
    p = _check_params(spec, params)
    if p.ndim != 1:
        raise InputError("prepare_state takes a single parameter vector")
    return prepare_states(spec, p)[0].astype(complex)


def _table_values(table) -> np.ndarray:
    return table.values if isinstance(table, EnergyTable) else np.asarray(table, dtype=float)


def expectation(state: np.ndarray, table) -> float:
    """``<psi|H|psi>`` for a diagonal ``H`` given by its energy table."""
    values = _table_values(table)
    if state.shape != values.shape:
        raise InputError(f"state dimension {state.shape} does not match table {values.shape}")
    return float(np.dot(np.abs(state) ** 2, values))


def energies_at(spec: AnsatzSpec, table, params: np.ndarray) -> np.ndarray:
    """Vectorized ``energy_at`` over the rows of ``params``."""
    values = _table_values(table)
    if values.size != 1 << spec.n:
        raise InputError(f"table size {values.size} does not match n={spec.n}")
    states = prepare_states(spec, params)
    return (states * states) @ values


def energy_at(spec: AnsatzSpec, table, params) -> float:
    return float(energies_at(spec, table, _check_params(spec, params)[None, :])[0])


def gradient(spec: AnsatzSpec, table, params) -> np.ndarray:
    """Exact gradient by the parameter-shift rule.

    Each RY generator has eigenvalues +-1/2, so shifting one angle by
    +-pi/2 and halving the difference is exact.
    """
    p = _check_params(spec, params)
    m = spec.parameter_count
    shifts = np.eye(m) * (np.pi / 2)
    batch = np.concatenate([p + shifts, p - shifts])
    e = energies_at(spec, table, batch)
    return (e[:m] - e[m:]) / 2
