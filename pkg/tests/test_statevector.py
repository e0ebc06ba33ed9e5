"""Dense register backend: preparation, Born probabilities, projection."""

import math

import numpy as np
import pytest

from oracle import MAGIC, kron_chain, pauli_matrix
from pbckit.errors import CapacityError, InternalInvariantError, PauliError
from pbckit.pauli import PauliOperator
from pbckit.statevector import (
    DummyBackend,
    StatevectorBackend,
    StateVector,
    apply_pauli,
    expectation,
    measure_pauli,
)


def test_magic_state_amplitudes():
    one = StateVector.all_magic(1)
    np.testing.assert_allclose(
        one.amps, [1 / math.sqrt(2), np.exp(1j * math.pi / 4) / math.sqrt(2)], atol=1e-15
    )
    two = StateVector.all_magic(2)
    # Index 3 has both qubits on: phase pi/2, weight 1/2.
    assert two.amps[3] == pytest.approx(0.5j, abs=1e-15)
    np.testing.assert_allclose(two.amps, kron_chain([MAGIC, MAGIC]), atol=1e-15)


def test_apply_pauli_matches_dense():
    rng = np.random.default_rng(3)
    for _ in range(40):
        width = int(rng.integers(1, 5))
        p = PauliOperator(
            width,
            int(rng.integers(0, 1 << width)),
            int(rng.integers(0, 1 << width)),
            int(rng.integers(0, 4)),
        )
        state = rng.normal(size=1 << width) + 1j * rng.normal(size=1 << width)
        state /= np.linalg.norm(state)
        np.testing.assert_allclose(
            apply_pauli(state, p), pauli_matrix(p) @ state, atol=1e-12
        )


def test_x_on_magic_probability():
    # <A|X|A> = cos(pi/4), so p(outcome 0) = (2 + sqrt(2))/4.
    state = StateVector.all_magic(1)
    assert expectation(state, PauliOperator.from_label("+X")) == pytest.approx(
        1 / math.sqrt(2), abs=1e-12
    )
    zeros = 0
    shots = 20000
    for i in range(shots):
        fresh = StateVector.all_magic(1)
        outcome = measure_pauli(
            fresh, PauliOperator.from_label("+X"), np.random.default_rng([5, i])
        )
        zeros += outcome == 0
    expected = (2 + math.sqrt(2)) / 4
    assert zeros / shots == pytest.approx(expected, abs=0.01)


def test_projection_collapses_correctly():
    rng = np.random.default_rng(11)
    state = StateVector.all_magic(3)
    p = PauliOperator.from_label("+XZY")
    outcome = measure_pauli(state, p, rng)
    matrix = pauli_matrix(p)
    eig = (-1.0) ** outcome
    np.testing.assert_allclose(matrix @ state.amps, eig * state.amps, atol=1e-12)
    assert np.linalg.norm(state.amps) == pytest.approx(1.0, abs=1e-12)
    # A repeat measurement is now deterministic and returns the same bit.
    again = measure_pauli(state, p, rng)
    assert again == outcome


def test_measure_rejects_non_hermitian():
    state = StateVector.all_magic(1)
    with pytest.raises(PauliError):
        measure_pauli(state, PauliOperator(1, 1, 1, 0), np.random.default_rng(0))


def test_require_random_flags_deterministic():
    state = StateVector.all_magic(2)
    p = PauliOperator.from_label("+ZZ")
    rng = np.random.default_rng(7)
    measure_pauli(state, p, rng)
    with pytest.raises(InternalInvariantError):
        measure_pauli(state, p, rng, require_random=True)


def test_capacity_cap():
    with pytest.raises(CapacityError):
        StateVector.all_magic(27)
    with pytest.raises(CapacityError):
        StatevectorBackend().start_shot(30)


def test_dummy_backend_is_a_coin():
    backend = DummyBackend()
    assert backend.start_shot(50) is None
    rng = np.random.default_rng(13)
    draws = {backend.measure(None, PauliOperator.from_label("+Z"), rng) for _ in range(64)}
    assert draws == {0, 1}


def test_acquired_stabilizer_is_resolved_not_raised():
    # Measuring ZZ on two magic qubits leaves the register stabilized by an
    # operator that was never measured (XY after outcome 0, XX after outcome
    # 1); the follow-up measurement is deterministic and must resolve
    # classically instead of erroring.
    backend = StatevectorBackend()
    zz = PauliOperator.from_label("+ZZ")
    seen = set()
    for seed in range(8):
        rng = np.random.default_rng(seed)
        state = backend.start_shot(2)
        branch = backend.measure(state, zz, rng)
        seen.add(branch)
        acquired = PauliOperator.from_label("+XY" if branch == 0 else "+XX")
        value = expectation(state, acquired)
        assert abs(value - 1.0) < 1e-12  # genuinely determined
        assert backend.measure(state, acquired, rng) == 0
        assert abs(np.linalg.norm(state.amps) - 1.0) < 1e-9
        with pytest.raises(InternalInvariantError):
            measure_pauli(state, acquired, rng, require_random=True)
    assert seen == {0, 1}  # both branches exercised
