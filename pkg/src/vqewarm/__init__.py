"""Statevector VQE for MaxCut with cross-instance warm starts."""

from .errors import CapacityError, InputError, NumericalError
from .graph import Graph, brute_force_maxcut, cut_value, random_graph, read_graph, write_graph
from .harness import ExperimentConfig, ExperimentReport, run_experiment, run_trial
from .ising import EnergyTable, IsingHamiltonian, build_hamiltonian, energy_of_bitstring, energy_table, exact_ground_energy
from .simulator import AnsatzSpec, energy_at, expectation, gradient, parameter_count, prepare_state
from .transfer import CrossEvaluation, SelectionResult, Strategy, StrategyKind, cross_evaluate, select_initial, subsample
from .vqe import OptimizerConfig, Trajectory, VqeResult, parameter_change_series, random_initial, run_vqe

__version__ = "0.1.0"
