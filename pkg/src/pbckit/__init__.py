"""Compile Clifford+T circuits into adaptive Pauli measurements and sample them.

The pipeline: parse or generate a circuit, ``gadgetize`` its t gates onto
magic-state qubits, then ``run_shot``/``sample`` compile each shot into a
sequence of commuting Pauli measurements, resolving as many as possible
classically and sending the rest to a dense register backend.  ``emit``
lowers recorded measurement sequences to hardware-style circuits, and the
``hybrid`` module trades magic qubits for sampling overhead.
"""

from .bench import boundary_lower_bound, gen_hsc, gen_rqc
from .circuit import Circuit, depth, metrics, parse_circuit, peephole_simplify
from .emit import Emission, MeasurementMap, emit, resource_bounds
from .engine import MeasurementRecord, SampleResult, ShotResult, run_shot, sample
from .errors import (
    CapacityError,
    CircuitError,
    GenerationError,
    InternalInvariantError,
    PauliError,
    PbcError,
)
from .gadgets import GadgetizedCircuit, gadgetize
from .hybrid import (
    EstimateResult,
    SamplingPlan,
    StabilizerTerm,
    bounds,
    estimate,
    plan,
    single_qubit_terms,
    tensor_terms,
)
from .pauli import (
    Anticommuting,
    BasisTracker,
    Dependent,
    Independent,
    Origin,
    PauliOperator,
    Reflection,
)
from .statevector import DummyBackend, StatevectorBackend, StateVector, measure_pauli

__version__ = "0.1.0"

__all__ = [
    "Anticommuting",
    "BasisTracker",
    "boundary_lower_bound",
    "bounds",
    "CapacityError",
    "Circuit",
    "CircuitError",
    "Dependent",
    "depth",
    "DummyBackend",
    "emit",
    "Emission",
    "estimate",
    "EstimateResult",
    "GadgetizedCircuit",
    "gadgetize",
    "gen_hsc",
    "gen_rqc",
    "GenerationError",
    "Independent",
    "InternalInvariantError",
    "MeasurementMap",
    "MeasurementRecord",
    "metrics",
    "measure_pauli",
    "Origin",
    "parse_circuit",
    "PauliError",
    "PauliOperator",
    "PbcError",
    "peephole_simplify",
    "plan",
    "Reflection",
    "resource_bounds",
    "run_shot",
    "sample",
    "SampleResult",
    "SamplingPlan",
    "ShotResult",
    "single_qubit_terms",
    "StabilizerTerm",
    "StatevectorBackend",
    "StateVector",
    "tensor_terms",
]
