"""Propagation lanes: pure and compiled must agree bit-for-bit."""

import subprocess
import sys

import numpy as np
import pytest

from pbckit._kernels import (
    ACCELERATED,
    ACTIVE_LANE,
    encode_program,
    initial_fired,
    make_propagator,
)
from pbckit._kernels._pure import OP_CX, OP_H, OP_S, OP_SKIP, OP_X, OP_Z, PurePropagator
from pbckit.circuit import CondGate, Cnot, Gate, Measure, Reset
from pbckit.errors import CircuitError
from pbckit.pauli import PauliOperator

OP_KINDS = {OP_H: "h", OP_S: "s", OP_X: "x", OP_Z: "z"}


def reference_run(program, width, fired, upto, x, z, phase):
    """Recompute a backward pull with the (dense-verified) operator algebra."""
    op = PauliOperator(width, x, z, phase)
    for i in range(upto - 1, -1, -1):
        if not fired[i]:
            continue
        code, a, b = program[i]
        if code == OP_SKIP:
            continue
        if code == OP_CX:
            op = op.conjugate_by_gate("cx", a, b)
        else:
            op = op.conjugate_by_gate(OP_KINDS[code], a)
    return op.x, op.z, op.phase


def random_program(rng, width, length):
    program = []
    for _ in range(length):
        code = int(rng.integers(0, 6))
        if code == OP_CX and width >= 2:
            a, b = (int(q) for q in rng.choice(width, 2, replace=False))
            program.append((OP_CX, a, b))
        else:
            if code == OP_CX:
                code = OP_H
            program.append((code, int(rng.integers(0, width)), 0))
    return program


def accel_propagator(program, width):
    from pbckit._kernels import _AccelPropagator

    return _AccelPropagator(program, width)


@pytest.mark.parametrize("width", [1, 5, 63, 64, 65, 127, 130])
def test_lanes_agree_with_the_operator_algebra(width):
    rng = np.random.default_rng(width)
    pure = None
    for trial in range(12):
        program = random_program(rng, width, 120)
        pure = PurePropagator(program, width)
        fired = bytearray(int(rng.integers(0, 2)) for _ in program)
        upto = int(rng.integers(0, len(program) + 1))
        x = int(rng.integers(0, 1 << min(width, 62)))
        z = int(rng.integers(0, 1 << min(width, 62)))
        if width > 62:  # spread support across word boundaries
            x |= x << (width - 62)
            z |= z << (width - 62)
            x &= (1 << width) - 1
            z &= (1 << width) - 1
        phase = int(rng.integers(0, 4))
        if (phase + (x & z).bit_count()) % 2:
            phase = (phase + 1) & 3
        expected = reference_run(program, width, fired, upto, x, z, phase)
        assert pure.run(fired, upto, x, z, phase) == expected
        if ACCELERATED:
            accel = accel_propagator(program, width)
            assert accel.run(fired, upto, x, z, phase) == expected


def test_empty_program():
    for maker in (PurePropagator,) + ((accel_propagator,) if ACCELERATED else ()):
        propagator = maker([], 4)
        assert propagator.run(bytearray(), 0, 5, 3, 1) == (5, 3, 1)


def test_make_propagator_uses_the_active_lane():
    propagator = make_propagator([Gate("h", 0), Cnot(0, 1)], 2)
    assert propagator.lane == ACTIVE_LANE


def test_encode_program_and_fired_template():
    instructions = [
        Gate("h", 0),
        Measure(0, 0),
        CondGate("s", 0, (0,)),
        CondGate("z", 1, (0,), 1),
        Cnot(0, 1),
    ]
    assert encode_program(instructions) == [
        (OP_H, 0, 0),
        (OP_SKIP, 0, 0),
        (OP_S, 0, 0),
        (OP_Z, 1, 0),
        (OP_CX, 0, 1),
    ]
    assert initial_fired(instructions) == bytearray([1, 0, 0, 0, 1])


def test_fired_flags_gate_conditioned_instructions():
    # Pulling X0 back through cx, a conditioned s and h depends on whether
    # the s fired; both answers are checked against the operator algebra.
    instructions = [Gate("h", 0), CondGate("s", 0, (0,)), Cnot(0, 1)]
    program = encode_program(instructions)
    propagator = make_propagator(instructions, 2)
    for s_fired in (0, 1):
        fired = bytearray([1, s_fired, 1])
        expected = reference_run(program, 2, fired, 3, 1, 0, 0)
        assert propagator.run(fired, 3, 1, 0, 0) == expected
    on = propagator.run(bytearray([1, 1, 1]), 3, 1, 0, 0)
    off = propagator.run(bytearray([1, 0, 1]), 3, 1, 0, 0)
    assert on != off


def test_encode_program_rejections():
    with pytest.raises(CircuitError):
        encode_program([Gate("t", 0)])
    with pytest.raises(CircuitError):
        encode_program([Reset(0)])


def test_compiled_lane_is_built_here():
    # The sandbox builds the extension; guard against silently losing it.
    assert ACCELERATED
    assert ACTIVE_LANE == "compiled"


def test_pure_env_variable_forces_fallback():
    code = (
        "import pbckit._kernels as k; print(k.ACTIVE_LANE, k.ACCELERATED)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "PBCKIT_PURE": "1"},
        check=True,
    )
    assert out.stdout.split() == ["pure", "False"]
