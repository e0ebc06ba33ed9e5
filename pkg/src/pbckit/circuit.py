"""Circuit IR, its text format, and a small peephole simplifier.

The instruction set is deliberately tiny: one-qubit gates h, s, t, x; cx;
non-destructive measure into a classical bit; classically conditioned s, x, z
whose condition is an XOR of classical bits and an optional constant 1; and
reset to |0>.  Qubits start in |0> unless declared ``magic``, which means
(|0> + e^{i pi/4} |1>)/sqrt(2).

Text format, one instruction per line, ``#`` starts a comment::

    qubits 3
    cbits 2
    input q2 magic
    h q0
    cx q0 q1
    t q2
    measure q2 -> c0
    if (c0 ^ 1) s q0
    reset q2

Depth is scheduled as-soon-as-possible with every instruction occupying one
layer on the qubits it touches; a conditioned gate additionally waits for the
layer after the measurement that produced each classical bit it reads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import CircuitError

GATE_KINDS = ("h", "s", "t", "x")
COND_KINDS = ("s", "x", "z")
INPUT_KINDS = ("zero", "magic")


@dataclass(frozen=True, slots=True)
class Gate:
    kind: str
    qubit: int


@dataclass(frozen=True, slots=True)
class Cnot:
    control: int
    target: int


@dataclass(frozen=True, slots=True)
class Measure:
    qubit: int
    cbit: int


@dataclass(frozen=True, slots=True)
class CondGate:
    kind: str
    qubit: int
    cbits: tuple[int, ...]
    const: int = 0

    def fires(self, cbit_values) -> bool:
        parity = self.const
        for c in self.cbits:
            parity ^= cbit_values[c]
        return bool(parity & 1)


@dataclass(frozen=True, slots=True)
class Reset:
    qubit: int


Instruction = Gate | Cnot | Measure | CondGate | Reset


def instruction_qubits(instr: Instruction) -> tuple[int, ...]:
    if isinstance(instr, Cnot):
        return (instr.control, instr.target)
    return (instr.qubit,)


@dataclass
class Circuit:
    num_qubits: int
    num_cbits: int = 0
    instructions: list[Instruction] = field(default_factory=list)
    inputs: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.inputs:
            self.inputs = ("zero",) * self.num_qubits

    @property
    def t_count(self) -> int:
        return sum(1 for i in self.instructions if isinstance(i, Gate) and i.kind == "t")

    @property
    def magic_qubits(self) -> tuple[int, ...]:
        return tuple(q for q, kind in enumerate(self.inputs) if kind == "magic")

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        return parse_circuit(text)

    def to_text(self) -> str:
        return circuit_to_text(self)


def validate(circ: Circuit) -> None:
    """Raise CircuitError on any structural problem (no line numbers)."""
    n, m = circ.num_qubits, circ.num_cbits
    if n <= 0:
        raise CircuitError(f"need at least one qubit, got {n}")
    if m < 0:
        raise CircuitError(f"negative cbit count {m}")
    if len(circ.inputs) != n:
        raise CircuitError("inputs tuple length does not match qubit count")
    for kind in circ.inputs:
        if kind not in INPUT_KINDS:
            raise CircuitError(f"unknown input kind {kind!r}")
    written: set[int] = set()
    for instr in circ.instructions:
        for q in instruction_qubits(instr):
            if not 0 <= q < n:
                raise CircuitError(f"qubit q{q} out of range in {instr}")
        if isinstance(instr, Gate):
            if instr.kind not in GATE_KINDS:
                raise CircuitError(f"unknown gate kind {instr.kind!r}")
        elif isinstance(instr, Cnot):
            if instr.control == instr.target:
                raise CircuitError(f"cx control equals target q{instr.control}")
        elif isinstance(instr, Measure):
            if not 0 <= instr.cbit < m:
                raise CircuitError(f"cbit c{instr.cbit} out of range")
            if instr.cbit in written:
                raise CircuitError(f"cbit c{instr.cbit} measured twice")
            written.add(instr.cbit)
        elif isinstance(instr, CondGate):
            if instr.kind not in COND_KINDS:
                raise CircuitError(f"unknown conditioned gate kind {instr.kind!r}")
            if not instr.cbits:
                raise CircuitError("conditioned gate reads no classical bits")
            if instr.const not in (0, 1):
                raise CircuitError("condition constant must be 0 or 1")
            for c in instr.cbits:
                if not 0 <= c < m:
                    raise CircuitError(f"cbit c{c} out of range")
                if c not in written:
                    raise CircuitError(f"condition reads c{c} before it is measured")


_QUBIT_RE = re.compile(r"^q(\d+)$")
_CBIT_RE = re.compile(r"^c(\d+)$")


def _parse_qubit(token: str, line: int) -> int:
    m = _QUBIT_RE.match(token)
    if not m:
        raise CircuitError(f"expected a qubit like q0, got {token!r}", line)
    return int(m.group(1))


def _parse_cbit(token: str, line: int) -> int:
    m = _CBIT_RE.match(token)
    if not m:
        raise CircuitError(f"expected a cbit like c0, got {token!r}", line)
    return int(m.group(1))


def parse_circuit(text: str) -> Circuit:
    num_qubits: int | None = None
    num_cbits = 0
    magic: set[int] = set()
    instructions: list[Instruction] = []
    saw_instruction = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]

        if head == "qubits":
            if num_qubits is not None:
                raise CircuitError("duplicate qubits line", lineno)
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise CircuitError("usage: qubits <count>", lineno)
            num_qubits = int(tokens[1])
            continue
        if num_qubits is None:
            raise CircuitError("first line must be 'qubits <count>'", lineno)

        if head == "cbits":
            if saw_instruction or instructions:
                raise CircuitError("cbits line must precede instructions", lineno)
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise CircuitError("usage: cbits <count>", lineno)
            num_cbits = int(tokens[1])
        elif head == "input":
            if saw_instruction:
                raise CircuitError("input lines must precede instructions", lineno)
            if len(tokens) != 3 or tokens[2] not in INPUT_KINDS:
                raise CircuitError("usage: input q<i> zero|magic", lineno)
            q = _parse_qubit(tokens[1], lineno)
            if tokens[2] == "magic":
                magic.add(q)
        elif head in GATE_KINDS:
            if len(tokens) != 2:
                raise CircuitError(f"usage: {head} q<i>", lineno)
            instructions.append(Gate(head, _parse_qubit(tokens[1], lineno)))
            saw_instruction = True
        elif head == "cx":
            if len(tokens) != 3:
                raise CircuitError("usage: cx q<control> q<target>", lineno)
            instructions.append(
                Cnot(_parse_qubit(tokens[1], lineno), _parse_qubit(tokens[2], lineno))
            )
            saw_instruction = True
        elif head == "measure":
            if len(tokens) != 4 or tokens[2] != "->":
                raise CircuitError("usage: measure q<i> -> c<j>", lineno)
            instructions.append(
                Measure(_parse_qubit(tokens[1], lineno), _parse_cbit(tokens[3], lineno))
            )
            saw_instruction = True
        elif head == "if":
            m = re.match(r"^if\s*\(([^()]*)\)\s*(\w+)\s+(\S+)$", line)
            if not m:
                raise CircuitError("usage: if (c0 ^ c1 ^ 1) s|x|z q<i>", lineno)
            expr, kind, qtok = m.groups()
            if kind not in COND_KINDS:
                raise CircuitError(f"conditioned gate must be one of {COND_KINDS}", lineno)
            cbits: list[int] = []
            const = 0
            terms = [t.strip() for t in expr.split("^")]
            if terms == [""]:
                raise CircuitError("empty condition", lineno)
            for term in terms:
                if term == "1":
                    const ^= 1
                elif term == "0":
                    pass
                else:
                    cbits.append(_parse_cbit(term, lineno))
            if not cbits:
                raise CircuitError("condition must read at least one cbit", lineno)
            instructions.append(
                CondGate(kind, _parse_qubit(qtok, lineno), tuple(cbits), const)
            )
            saw_instruction = True
        elif head == "reset":
            if len(tokens) != 2:
                raise CircuitError("usage: reset q<i>", lineno)
            instructions.append(Reset(_parse_qubit(tokens[1], lineno)))
            saw_instruction = True
        else:
            raise CircuitError(f"unknown instruction {head!r}", lineno)

    if num_qubits is None:
        raise CircuitError("missing 'qubits <count>' line")
    for q in magic:
        if not 0 <= q < num_qubits:
            raise CircuitError(f"input declaration for out-of-range qubit q{q}")
    inputs = tuple("magic" if q in magic else "zero" for q in range(num_qubits))
    circ = Circuit(num_qubits, num_cbits, instructions, inputs)
    validate(circ)
    return circ


def circuit_to_text(circ: Circuit) -> str:
    lines = [f"qubits {circ.num_qubits}"]
    if circ.num_cbits:
        lines.append(f"cbits {circ.num_cbits}")
    for q in circ.magic_qubits:
        lines.append(f"input q{q} magic")
    for instr in circ.instructions:
        if isinstance(instr, Gate):
            lines.append(f"{instr.kind} q{instr.qubit}")
        elif isinstance(instr, Cnot):
            lines.append(f"cx q{instr.control} q{instr.target}")
        elif isinstance(instr, Measure):
            lines.append(f"measure q{instr.qubit} -> c{instr.cbit}")
        elif isinstance(instr, CondGate):
            terms = [f"c{c}" for c in instr.cbits]
            if instr.const:
                terms.append("1")
            lines.append(f"if ({' ^ '.join(terms)}) {instr.kind} q{instr.qubit}")
        elif isinstance(instr, Reset):
            lines.append(f"reset q{instr.qubit}")
    return "\n".join(lines) + "\n"


def depth(circ: Circuit) -> int:
    qubit_free = [1] * circ.num_qubits
    cbit_ready = [1] * circ.num_cbits
    deepest = 0
    for instr in circ.instructions:
        if isinstance(instr, CondGate):
            layer = qubit_free[instr.qubit]
            for c in instr.cbits:
                layer = max(layer, cbit_ready[c])
            qubit_free[instr.qubit] = layer + 1
        elif isinstance(instr, Cnot):
            layer = max(qubit_free[instr.control], qubit_free[instr.target])
            qubit_free[instr.control] = qubit_free[instr.target] = layer + 1
        else:
            layer = qubit_free[instr.qubit]
            qubit_free[instr.qubit] = layer + 1
            if isinstance(instr, Measure):
                cbit_ready[instr.cbit] = layer + 1
        deepest = max(deepest, layer)
    return deepest


def metrics(circ: Circuit) -> dict:
    """The five headline numbers reported for generated circuits."""
    return {
        "n": circ.num_qubits,
        "t": circ.t_count,
        "depth": depth(circ),
        "count_1q": sum(1 for i in circ.instructions if isinstance(i, Gate)),
        "count_cnot": sum(1 for i in circ.instructions if isinstance(i, Cnot)),
    }


# -- peephole simplification -----------------------------------------------
#
# Two rewrites, iterated to a fixed point:
#   (a) cancel adjacent self-inverse pairs: h h, x x, and cx cx on the same
#       control/target, where adjacent means no intervening instruction on
#       the qubits involved;
#   (b) fold runs of diagonal gates (s = 2 eighth-turns, t = 1) on a qubit
#       mod 8 into the canonical [t]*(p&1) + [s]*(p>>1).  A run may pass
#       through a cx *control* (diagonal gates commute with it) but is cut
#       by h, x, a cx target, measure, reset, or a conditioned gate.
# Folding can only lower the t count: the residual t parity p&1 never
# exceeds the number of t gates consumed.


def _cancel_pairs(instructions: list[Instruction]) -> tuple[list[Instruction], bool]:
    out: list[Instruction] = []
    changed = False
    for instr in instructions:
        if isinstance(instr, (Gate, Cnot)):
            mine = set(instruction_qubits(instr))
            for j in range(len(out) - 1, -1, -1):
                prev = out[j]
                if not mine.isdisjoint(instruction_qubits(prev)):
                    cancelable = (
                        isinstance(instr, Gate)
                        and instr.kind in ("h", "x")
                        and prev == instr
                    ) or (isinstance(instr, Cnot) and prev == instr)
                    if cancelable:
                        del out[j]
                        changed = True
                        instr = None
                    break
            if instr is None:
                continue
        out.append(instr)
    return out, changed


def _fold_diagonals(instructions: list[Instruction]) -> tuple[list[Instruction], bool]:
    runs: dict[int, list[int]] = {}  # qubit -> indices of collected s/t gates
    drop: set[int] = set()
    replace: dict[int, list[Instruction]] = {}
    changed = False

    def flush(q: int):
        nonlocal changed
        indices = runs.pop(q, None)
        if not indices:
            return
        power = sum(1 if instructions[i].kind == "t" else 2 for i in indices) % 8
        canonical: list[Instruction] = [Gate("t", q)] * (power & 1) + [
            Gate("s", q)
        ] * (power >> 1)
        collected = [instructions[i] for i in indices]
        contiguous = indices == list(range(indices[0], indices[0] + len(indices)))
        if collected == canonical and contiguous:
            return
        replace[indices[0]] = canonical
        drop.update(indices[1:])
        changed = True

    for i, instr in enumerate(instructions):
        if isinstance(instr, Gate) and instr.kind in ("s", "t"):
            runs.setdefault(instr.qubit, []).append(i)
        elif isinstance(instr, Cnot):
            flush(instr.target)  # control passes through
        else:
            for q in instruction_qubits(instr):
                flush(q)
    for q in list(runs):
        flush(q)

    if not changed:
        return instructions, False
    out: list[Instruction] = []
    for i, instr in enumerate(instructions):
        if i in replace:
            out.extend(replace[i])
        elif i not in drop:
            out.append(instr)
    return out, True


def peephole_simplify(circ: Circuit, max_passes: int = 10_000) -> Circuit:
    """Return an equivalent circuit with the rewrites above applied to a fixed point."""
    instructions = list(circ.instructions)
    for _ in range(max_passes):
        instructions, changed_a = _cancel_pairs(instructions)
        instructions, changed_b = _fold_diagonals(instructions)
        if not (changed_a or changed_b):
            break
    return Circuit(circ.num_qubits, circ.num_cbits, instructions, circ.inputs)
