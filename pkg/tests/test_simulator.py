import numpy as np
import pytest

from vqewarm.errors import InputError
from vqewarm.graph import Graph, random_graph
from vqewarm.ising import build_hamiltonian, energy_table, exact_ground_energy
from vqewarm.simulator import (
    AnsatzSpec,
    energy_at,
    expectation,
    gradient,
    parameter_count,
    prepare_state,
)

I2 = np.eye(2)
X = np.array([[0.0, 1.0], [1.0, 0.0]])
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])


def _embed(ops: dict, n: int) -> np.ndarray:
    # Qubit 0 is the least significant bit, so it is the rightmost factor.
    out = np.eye(1)
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, I2))
    return out


def _ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def dense_reference_state(spec: AnsatzSpec, params) -> np.ndarray:
    """Full 2**n x 2**n matrix product, independent of the simulator's kernels."""
    n = spec.n
    U = np.eye(1 << n)
    for layer in range(spec.reps + 1):
        for q in range(n):
            U = _embed({q: _ry(params[layer * n + q])}, n) @ U
        if layer < spec.reps:
            for q in range(n - 1):
                cnot = _embed({q: P0}, n) + _embed({q: P1, q + 1: X}, n)
                U = cnot @ U
    psi0 = np.zeros(1 << n)
    psi0[0] = 1.0
    return U @ psi0


def _random_config(rng, max_n=6, max_reps=4):
    n = int(rng.integers(1, max_n + 1))
    spec = AnsatzSpec(n, int(rng.integers(0, max_reps + 1)))
    table = energy_table(build_hamiltonian(random_graph(n, 0.5, rng)))
    p = rng.uniform(-2 * np.pi, 2 * np.pi, spec.parameter_count)
    return spec, table, p


@pytest.mark.parametrize("n, reps, count", [(6, 2, 18), (5, 5, 30), (1, 0, 1)])
def test_parameter_count(n, reps, count):
    assert parameter_count(AnsatzSpec(n, reps)) == count


class TestPrepareState:
    def test_zero_parameters_give_all_zeros_state(self):
        psi = prepare_state(AnsatzSpec(4, 3), np.zeros(16))
        expected = np.zeros(16)
        expected[0] = 1
        np.testing.assert_allclose(psi, expected, atol=1e-15)

    def test_single_qubit_pi_rotation(self):
        np.testing.assert_allclose(prepare_state(AnsatzSpec(1, 0), [np.pi]), [0, 1], atol=1e-15)

    def test_flip_then_entangle(self):
        psi = prepare_state(AnsatzSpec(2, 1), [np.pi, 0, 0, 0])
        np.testing.assert_allclose(psi, [0, 0, 0, 1], atol=1e-15)
        np.testing.assert_allclose(psi, dense_reference_state(AnsatzSpec(2, 1), [np.pi, 0, 0, 0]), atol=1e-15)

    def test_matches_dense_reference(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            spec, _, p = _random_config(rng)
            np.testing.assert_allclose(prepare_state(spec, p), dense_reference_state(spec, p), atol=1e-12)

    def test_norm_preserved(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            spec = AnsatzSpec(int(rng.integers(1, 11)), int(rng.integers(0, 6)))
            p = rng.uniform(-10, 10, spec.parameter_count)
            assert abs(np.linalg.norm(prepare_state(spec, p)) - 1) < 1e-10

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            prepare_state(AnsatzSpec(2, 1), [0.0, 0.0])


class TestExpectation:
    def test_all_zeros_on_triangle(self):
        table = energy_table(build_hamiltonian(Graph.complete(3)))
        psi = np.zeros(8, dtype=complex)
        psi[0] = 1
        assert expectation(psi, table) == 3

    def test_uniform_superposition_averages_to_zero(self):
        rng = np.random.default_rng(1)
        for n in range(2, 7):
            table = energy_table(build_hamiltonian(random_graph(n, 0.7, rng)))
            psi = np.full(1 << n, 1 / np.sqrt(1 << n), dtype=complex)
            assert expectation(psi, table) == pytest.approx(0, abs=1e-12)

    def test_aligned_pair(self):
        table = energy_table(build_hamiltonian(Graph(2, ((0, 1, 1.0),))))
        assert expectation(np.array([0, 0, 0, 1], dtype=complex), table) == 1

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            expectation(np.ones(4) / 2, energy_table(build_hamiltonian(Graph.complete(3))))

    def test_within_table_range(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            spec, table, p = _random_config(rng)
            e = energy_at(spec, table, p)
            assert table.values.min() - 1e-12 <= e <= table.values.max() + 1e-12


class TestEnergyAt:
    def test_examples(self):
        assert energy_at(AnsatzSpec(3, 2), energy_table(build_hamiltonian(Graph.complete(3))), np.zeros(9)) == 3
        rng = np.random.default_rng(0)
        p = rng.uniform(-3, 3, 12)
        assert energy_at(AnsatzSpec(4, 2), energy_table(build_hamiltonian(Graph(4))), p) == 0

    def test_two_pi_periodicity(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            spec, table, p = _random_config(rng)
            j = int(rng.integers(spec.parameter_count))
            shifted = p.copy()
            shifted[j] += 2 * np.pi
            assert energy_at(spec, table, shifted) == pytest.approx(energy_at(spec, table, p), abs=1e-10)

    def test_variational_bound(self):
        rng = np.random.default_rng(6)
        g = random_graph(5, 0.6, rng)
        h = build_hamiltonian(g)
        table = energy_table(h)
        spec = AnsatzSpec(5, 2)
        ground = exact_ground_energy(h)[0]
        samples = [energy_at(spec, table, rng.uniform(-2 * np.pi, 2 * np.pi, 15)) for _ in range(1000)]
        assert min(samples) >= ground - 1e-12


class TestGradient:
    def test_empty_graph_has_zero_gradient(self):
        table = energy_table(build_hamiltonian(Graph(3)))
        g = gradient(AnsatzSpec(3, 2), table, np.random.default_rng(0).uniform(-3, 3, 9))
        np.testing.assert_allclose(g, 0, atol=1e-15)

    def test_matches_central_differences(self):
        rng = np.random.default_rng(12)
        h = 1e-5
        for _ in range(20):
            spec, table, p = _random_config(rng)
            fd = np.array([
                (energy_at(spec, table, p + h * e) - energy_at(spec, table, p - h * e)) / (2 * h)
                for e in np.eye(spec.parameter_count)
            ])
            np.testing.assert_allclose(gradient(spec, table, p), fd, atol=1e-6)

    def test_triangle_automorphisms(self):
        # Without entanglers the ansatz is permutation symmetric, so relabeling
        # the qubits by a triangle automorphism must relabel the gradient.
        spec = AnsatzSpec(3, 0)
        table = energy_table(build_hamiltonian(Graph.complete(3)))
        uniform = np.full(3, np.pi / 2)
        np.testing.assert_allclose(prepare_state(spec, uniform), np.full(8, 1 / np.sqrt(8)), atol=1e-15)
        g = gradient(spec, table, uniform)
        np.testing.assert_allclose(g, g[0], atol=1e-12)

        equal = np.full(3, 0.7)
        g = gradient(spec, table, equal)
        np.testing.assert_allclose(g, g[0], atol=1e-12)

        p = np.array([0.3, -1.1, 2.0])
        perm = [2, 0, 1]
        np.testing.assert_allclose(gradient(spec, table, p[perm]), gradient(spec, table, p)[perm], atol=1e-12)
