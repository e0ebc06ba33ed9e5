"""Backward-propagation kernel with a compiled fast lane and a pure fallback.

``make_propagator(instructions, width)`` encodes a circuit once and returns
an object whose ``run(fired, upto, x, z, phase)`` pulls a packed Pauli
backward through the instruction prefix.  The compiled lane is used when the
extension built; set ``PBCKIT_PURE=1`` to force the pure lane regardless.
"""

from __future__ import annotations

import os

from ..circuit import CondGate, Cnot, Gate, Instruction, Measure
from ..errors import CircuitError
from ._pure import OP_CX, OP_H, OP_S, OP_SKIP, OP_X, OP_Z, PurePropagator

_GATE_OPS = {"h": OP_H, "s": OP_S, "x": OP_X, "z": OP_Z}

if os.environ.get("PBCKIT_PURE"):
    _accel = None
else:
    try:
        from . import _accel  # type: ignore[attr-defined]
    except ImportError:
        _accel = None

ACCELERATED = _accel is not None
ACTIVE_LANE = "compiled" if ACCELERATED else "pure"


def encode_program(instructions: list[Instruction]) -> list[tuple[int, int, int]]:
    program: list[tuple[int, int, int]] = []
    for instr in instructions:
        if isinstance(instr, Gate):
            if instr.kind not in _GATE_OPS:
                raise CircuitError(f"cannot propagate through gate {instr.kind!r}")
            program.append((_GATE_OPS[instr.kind], instr.qubit, 0))
        elif isinstance(instr, Cnot):
            program.append((OP_CX, instr.control, instr.target))
        elif isinstance(instr, Measure):
            program.append((OP_SKIP, instr.qubit, 0))
        elif isinstance(instr, CondGate):
            program.append((_GATE_OPS[instr.kind], instr.qubit, 0))
        else:
            raise CircuitError(f"cannot propagate through {type(instr).__name__}")
    return program


def initial_fired(instructions: list[Instruction]) -> bytearray:
    """1 for unconditional gates, 0 for measurements and conditioned gates."""
    return bytearray(
        1 if isinstance(i, (Gate, Cnot)) else 0 for i in instructions
    )


class _AccelPropagator:
    lane = "compiled"

    def __init__(self, program: list[tuple[int, int, int]], width: int):
        import numpy as np

        self._np = np
        self.program = np.array(program, dtype=np.int32).reshape(-1, 3)
        self.width = width
        self.nwords = max(1, (width + 63) // 64)

    def run(self, fired: bytearray, upto: int, x: int, z: int, phase: int):
        np = self._np
        nbytes = self.nwords * 8
        xw = np.frombuffer(x.to_bytes(nbytes, "little"), dtype="<u8").copy()
        zw = np.frombuffer(z.to_bytes(nbytes, "little"), dtype="<u8").copy()
        phase = _accel.propagate(
            self.program, np.frombuffer(fired, dtype=np.uint8), upto, xw, zw, phase
        )
        return (
            int.from_bytes(xw.tobytes(), "little"),
            int.from_bytes(zw.tobytes(), "little"),
            phase,
        )


def make_propagator(instructions: list[Instruction], width: int):
    program = encode_program(instructions)
    if ACCELERATED:
        return _AccelPropagator(program, width)
    return PurePropagator(program, width)
