"""Pure-Python propagation lane; same contract as the compiled one.

The program encoding is shared with the Cython lane: one (opcode, a, b)
triple per instruction, with conditioned gates encoded as their underlying
gate and gated at run time by the ``fired`` byte per instruction.
"""

from __future__ import annotations

OP_H = 0
OP_S = 1
OP_X = 2
OP_Z = 3
OP_CX = 4
OP_SKIP = 5


class PurePropagator:
    lane = "pure"

    def __init__(self, program: list[tuple[int, int, int]], width: int):
        self.program = program
        self.width = width

    def run(self, fired: bytearray, upto: int, x: int, z: int, phase: int):
        """Pull (x, z, phase) backward through program[:upto], newest first.

        Each crossed instruction g maps the operator P to g'Pg, so the
        returned operator acts at the start of the program slice.
        """
        program = self.program
        for i in range(upto - 1, -1, -1):
            if not fired[i]:
                continue
            op, a, b = program[i]
            bit = 1 << a
            if op == OP_H:
                xa = x & bit
                za = z & bit
                if xa and za:
                    phase += 2
                elif xa or za:
                    x ^= bit
                    z ^= bit
            elif op == OP_S:
                if x & bit:
                    z ^= bit
                    phase += 3
            elif op == OP_X:
                if z & bit:
                    phase += 2
            elif op == OP_Z:
                if x & bit:
                    phase += 2
            elif op == OP_CX:
                tbit = 1 << b
                if x & bit:
                    x ^= tbit
                if z & tbit:
                    z ^= bit
        return x, z, phase & 3
