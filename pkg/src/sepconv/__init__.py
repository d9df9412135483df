"""Pure-state conversions under separable maps with and without invertible Kraus operators."""
from .feasibility import (ConversionInstance, FeasibilityReport, SepWitness, Verdict, pauli_trace_obstruction,
                          sep1_feasible, sep_witness_check, trace_monotone_check)
from .kraus import SepMap, build_five_qubit_example, build_three_qubit_example, verify_sep_map
from .stabilizer import Graph, PauliGroup, PauliString, generate_group, graph_state, ring_stabilizer_generators
from .tensor import DensityMatrix, LocalOperator, PureState, apply_local, kron, partial_trace, reduced_ranks

__version__ = "0.1.0"
