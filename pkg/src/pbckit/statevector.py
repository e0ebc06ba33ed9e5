"""Dense statevector register for the quantum residue of a compiled run.

Only the magic-state register is ever simulated densely; the data register is
handled classically by the compilation loop.  Qubit 0 is the least
significant bit of the amplitude index.  A Pauli ``i**ph * X^x Z^z`` acts on
basis states as ``P|j> = i**ph * (-1)**popcount(j & z) |j ^ x>``, which keeps
every operation a permutation plus a sign mask, with no matrix ever built.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CapacityError, InternalInvariantError, PauliError
from .pauli import PauliOperator

MAX_DENSE_QUBITS = 26

# Probabilities may drift this far outside [0, 1] before we call it a bug.
PROBABILITY_TOLERANCE = 1e-9
# A measurement whose outcome is this close to certain counts as deterministic.
DETERMINISM_TOLERANCE = 1e-9


class StateVector:
    """A mutable normalized state on ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps: np.ndarray):
        if amps.shape != (1 << num_qubits,):
            raise PauliError(f"amplitude array has wrong shape for {num_qubits} qubits")
        self.num_qubits = num_qubits
        self.amps = np.asarray(amps, dtype=np.complex128)

    @classmethod
    def all_magic(cls, num_qubits: int) -> "StateVector":
        """Tensor power of (|0> + e^{i pi/4} |1>)/sqrt(2)."""
        if num_qubits > MAX_DENSE_QUBITS:
            raise CapacityError(
                f"{num_qubits} qubits exceeds the dense register cap of {MAX_DENSE_QUBITS}"
            )
        idx = np.arange(1 << num_qubits)
        ones = _popcount(idx)
        amps = np.exp(1j * math.pi / 4 * ones) / math.sqrt(1 << num_qubits)
        return cls(num_qubits, amps)


def _popcount(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.int64).copy()
    count = np.zeros_like(v)
    while v.any():
        count += v & 1
        v >>= 1
    return count


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.int64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def apply_pauli(amps: np.ndarray, p: PauliOperator) -> np.ndarray:
    idx = np.arange(amps.shape[0])
    src = idx ^ p.x
    signs = 1.0 - 2.0 * _parity(src & p.z)
    return (1j**p.phase) * signs * amps[src]


def expectation(state: StateVector, p: PauliOperator) -> float:
    """Real part of <psi| P |psi> (the full value for Hermitian P)."""
    return float(np.real(np.vdot(state.amps, apply_pauli(state.amps, p))))


def measure_pauli(
    state: StateVector,
    p: PauliOperator,
    rng: np.random.Generator,
    *,
    require_random: bool = False,
) -> int:
    """Sample a projective measurement of Hermitian P and collapse the state.

    A determined outcome (p0 within tolerance of 0 or 1) is resolved without
    touching the generator: earlier projections can leave the register
    stabilized by operators outside the span of what was measured, so this
    is a legitimate runtime case, not only a linear-dependence bug.  Pass
    ``require_random`` to assert it cannot happen in contexts that know
    better.
    """
    if p.width != state.num_qubits:
        raise PauliError(f"operator width {p.width} != register width {state.num_qubits}")
    if not p.is_hermitian:
        raise PauliError(f"cannot measure non-Hermitian {p.to_label()}")
    moved = apply_pauli(state.amps, p)
    exp_value = float(np.real(np.vdot(state.amps, moved)))
    prob_zero = (1.0 + exp_value) / 2.0
    if not -PROBABILITY_TOLERANCE <= prob_zero <= 1.0 + PROBABILITY_TOLERANCE:
        raise InternalInvariantError(f"outcome probability {prob_zero} outside [0, 1]")
    prob_zero = min(max(prob_zero, 0.0), 1.0)
    if min(prob_zero, 1.0 - prob_zero) <= DETERMINISM_TOLERANCE:
        if require_random:
            raise InternalInvariantError(
                f"measurement of {p.to_label()} on the register is deterministic "
                f"(p0 = {prob_zero})"
            )
        outcome = 0 if prob_zero >= 0.5 else 1
    else:
        outcome = 0 if rng.random() < prob_zero else 1
    keep = prob_zero if outcome == 0 else 1.0 - prob_zero
    sign = 1.0 if outcome == 0 else -1.0
    state.amps = (state.amps + sign * moved) / (2.0 * math.sqrt(keep))
    return outcome


class StatevectorBackend:
    """Faithful Born-rule backend on the magic register."""

    name = "statevector"

    def start_shot(self, num_qubits: int) -> StateVector:
        return StateVector.all_magic(num_qubits)

    def measure(
        self, state: StateVector, p: PauliOperator, rng: np.random.Generator
    ) -> int:
        return measure_pauli(state, p, rng)


class DummyBackend:
    """Fair-coin backend for resource counting at widths no state fits."""

    name = "dummy"

    def start_shot(self, num_qubits: int) -> None:
        return None

    def measure(self, state: None, p: PauliOperator, rng: np.random.Generator) -> int:
        return int(rng.integers(0, 2))


Backend = StatevectorBackend | DummyBackend
