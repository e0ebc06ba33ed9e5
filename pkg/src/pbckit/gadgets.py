"""Rewrite t gates into adaptive gadgets backed by magic-state qubits.

Each t gate on a data qubit q becomes, in program order:

    cx q -> aux        (aux is a fresh qubit prepared in the magic state)
    measure aux -> c   (fresh classical bit)
    if (c) s q

which implements the same unitary on q up to the recorded classical bit.
Auxiliary qubits are appended after the data register, one per t gate, and
their classical bits after the source circuit's own.  The resulting circuit
contains no t gates, so every later measurement can be pushed through it
with Clifford conjugation alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, CondGate, Cnot, Gate, Instruction, Measure, validate
from .errors import CircuitError


@dataclass(frozen=True)
class GadgetizedCircuit:
    """A t-free adaptive circuit plus bookkeeping about its layout."""

    circuit: Circuit
    num_main: int
    num_magic: int
    magic_qubits: tuple[int, ...]
    gadget_cbits: tuple[int, ...]
    output_cbits: tuple[int, ...]


def gadgetize(circ: Circuit) -> GadgetizedCircuit:
    """Convert a unitary h/s/t/x/cx circuit with trailing measurements.

    The source circuit must start all qubits in |0>, contain no conditioned
    gates or resets, and keep its measurements at the end; anything else is
    rejected rather than silently reinterpreted.
    """
    validate(circ)
    if any(kind != "zero" for kind in circ.inputs):
        raise CircuitError("gadgetize expects every input to start in |0>")
    measuring = False
    for instr in circ.instructions:
        if isinstance(instr, Measure):
            measuring = True
        elif isinstance(instr, (Gate, Cnot)):
            if measuring:
                raise CircuitError("gadgetize expects measurements only at the end")
        else:
            raise CircuitError(f"gadgetize cannot handle {type(instr).__name__}")

    n = circ.num_qubits
    m = circ.num_cbits
    t = circ.t_count
    rewritten: list[Instruction] = []
    output_cbits: list[int] = []
    next_magic = 0
    for instr in circ.instructions:
        if isinstance(instr, Gate) and instr.kind == "t":
            aux = n + next_magic
            cbit = m + next_magic
            next_magic += 1
            rewritten.append(Cnot(instr.qubit, aux))
            rewritten.append(Measure(aux, cbit))
            rewritten.append(CondGate("s", instr.qubit, (cbit,)))
        else:
            rewritten.append(instr)
            if isinstance(instr, Measure):
                output_cbits.append(instr.cbit)

    inputs = ("zero",) * n + ("magic",) * t
    gadget = Circuit(n + t, m + t, rewritten, inputs)
    validate(gadget)
    return GadgetizedCircuit(
        circuit=gadget,
        num_main=n,
        num_magic=t,
        magic_qubits=tuple(range(n, n + t)),
        gadget_cbits=tuple(range(m, m + t)),
        output_cbits=tuple(output_cbits),
    )
