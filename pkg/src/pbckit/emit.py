"""Emit hardware-style circuits that realize a commuting Pauli measurement sequence.

Input: Hermitian, pairwise commuting, non-identity Pauli operators on a
``width``-qubit register whose qubits start in the magic state.  Output: a
circuit in the package IR plus one bookkeeping entry per operator saying
which classical bits to XOR (and whether to flip) to recover its outcome.
Negative signs are never implemented in hardware; they become classical
flips in the bookkeeping.

Three schemes:

* ``aux``: one reusable auxiliary qubit; per operator, a controlled version
  of each non-trivial site is applied between two Hadamards on the
  auxiliary, which is then measured and conditionally reset.  Worst case
  over operators of weight <= t, this costs at most 4t^2 one-qubit gates,
  t^2 cx gates and depth t(t+5)-1 for a t-operator sequence
  (``resource_bounds``).
* ``cascade``: no auxiliary; a basis layer maps every non-trivial site to Z,
  a balanced cx tree folds the parity onto the highest-index site, which is
  measured non-destructively and everything is undone.  With
  ``elide_uncompute=True`` the undo block is skipped and later operators
  are conjugated through the accumulated frame instead; the skipped block
  is recorded per operator.
* ``ghz``: a block of auxiliary qubits is prepared in a GHZ state (tree of
  cx, depth log t + 1, or a measurement-assisted constant-depth chain),
  one controlled site is applied from each auxiliary, and the whole block
  is measured in the X basis; the outcome is the parity of the block's
  bits.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .circuit import (
    Circuit,
    CondGate,
    Cnot,
    Gate,
    Instruction,
    Measure,
    metrics as circuit_metrics,
)
from .errors import PauliError
from .pauli import PauliOperator

SCHEMES = ("aux", "cascade", "ghz")


@dataclass(frozen=True)
class MeasurementMap:
    """How to read one operator's outcome out of the raw classical bits."""

    pauli: str
    cbits: tuple[int, ...]
    flip: int
    segment: tuple[int, int]
    frame_update: tuple[str, ...] | None = None

    def outcome(self, cbit_values) -> int:
        value = self.flip
        for c in self.cbits:
            value ^= cbit_values[c]
        return value & 1


@dataclass
class Emission:
    circuit: Circuit
    maps: list[MeasurementMap]
    scheme: str

    def metrics(self) -> dict:
        return circuit_metrics(self.circuit)

    def sidecar(self) -> dict:
        return {
            "scheme": self.scheme,
            "register_width": len(self.circuit.magic_qubits),
            "num_qubits": self.circuit.num_qubits,
            "num_cbits": self.circuit.num_cbits,
            "measurements": [asdict(m) for m in self.maps],
        }


def resource_bounds(t: int) -> tuple[int, int, int]:
    """(one-qubit gates, cx gates, depth) guaranteed for the aux scheme on
    t operators of weight <= t drawn from the worst-case family."""
    return (4 * t * t, t * t, t * (t + 5) - 1)


# -- shared helpers ---------------------------------------------------------


def _site_letters(p: PauliOperator) -> dict[int, str]:
    letters = {}
    for q in p.support:
        xb = (p.x >> q) & 1
        zb = (p.z >> q) & 1
        letters[q] = "IXZY"[xb + 2 * zb]
    return letters


def _validate(paulis: list[PauliOperator], width: int):
    for p in paulis:
        if p.width != width:
            raise PauliError(f"operator width {p.width} != register width {width}")
        if not p.is_hermitian:
            raise PauliError(f"cannot measure non-Hermitian {p.to_label()}")
        if p.is_identity:
            raise PauliError("cannot measure the identity")
    for i, a in enumerate(paulis):
        for b in paulis[i + 1 :]:
            if not a.commutes(b):
                raise PauliError(
                    f"{a.to_label()} and {b.to_label()} do not commute"
                )


def _controlled_site(control: int, target: int, letter: str) -> list[Instruction]:
    """Controlled-sigma from an auxiliary onto a register site."""
    if letter == "X":
        return [Cnot(control, target)]
    if letter == "Y":
        # CY = (1 x S) CX (1 x S'), with S' spelled as three S gates.
        return [
            Gate("s", target),
            Gate("s", target),
            Gate("s", target),
            Cnot(control, target),
            Gate("s", target),
        ]
    if letter == "Z":
        return [Gate("h", target), Cnot(control, target), Gate("h", target)]
    raise PauliError(f"no controlled form for letter {letter!r}")


def _cascade_pairs(support: list[int]) -> list[tuple[int, int]]:
    """Balanced parity-folding tree ending on the highest-index site."""
    pairs: list[tuple[int, int]] = []
    active = list(support)
    while len(active) > 1:
        survivors = []
        for i in range(0, len(active) - 1, 2):
            pairs.append((active[i], active[i + 1]))
            survivors.append(active[i + 1])
        if len(active) % 2:
            survivors.append(active[-1])
        active = survivors
    return pairs


# -- aux scheme -------------------------------------------------------------


def _emit_aux(paulis: list[PauliOperator], width: int) -> Emission:
    aux = width
    instructions: list[Instruction] = []
    maps: list[MeasurementMap] = []
    for i, p in enumerate(paulis):
        start = len(instructions)
        instructions.append(Gate("h", aux))
        for q, letter in sorted(_site_letters(p).items()):
            instructions.extend(_controlled_site(aux, q, letter))
        instructions.append(Gate("h", aux))
        instructions.append(Measure(aux, i))
        instructions.append(CondGate("x", aux, (i,)))
        maps.append(
            MeasurementMap(
                pauli=p.to_label(),
                cbits=(i,),
                flip=1 if p.sign < 0 else 0,
                segment=(start, len(instructions)),
            )
        )
    inputs = ("magic",) * width + ("zero",)
    circuit = Circuit(width + 1, len(paulis), instructions, inputs)
    return Emission(circuit, maps, "aux")


# -- cascade scheme ---------------------------------------------------------

# Basis change per site letter: gates C with C sigma C' = Z, and the inverse.
_CASCADE_ENTER = {
    "X": ["h"],
    "Y": ["s", "s", "s", "h"],  # H S', entered as S' then H
    "Z": [],
}
_CASCADE_LEAVE = {
    "X": ["h"],
    "Y": ["h", "s"],
    "Z": [],
}


def _conjugate_through_frame(
    p: PauliOperator, frame: list[Instruction]
) -> PauliOperator:
    """Return F p F' for the frame gate list F (in application order)."""
    out = p
    for g in frame:
        if isinstance(g, Cnot):
            out = out.conjugate_by_gate("cx", g.control, g.target)
        elif g.kind == "s":
            # g W g' needs the inverse rotation; s has order four.
            for _ in range(3):
                out = out.conjugate_by_gate("s", g.qubit)
        else:
            out = out.conjugate_by_gate(g.kind, g.qubit)
    return out


def _emit_cascade(
    paulis: list[PauliOperator], width: int, elide_uncompute: bool
) -> Emission:
    instructions: list[Instruction] = []
    maps: list[MeasurementMap] = []
    frame: list[Instruction] = []
    for i, p in enumerate(paulis):
        effective = _conjugate_through_frame(p, frame) if frame else p
        letters = _site_letters(effective)
        support = sorted(letters)
        target = support[-1]
        start = len(instructions)

        block: list[Instruction] = []
        for q in support:
            block.extend(Gate(kind, q) for kind in _CASCADE_ENTER[letters[q]])
        block.extend(Cnot(a, b) for a, b in _cascade_pairs(support))
        instructions.extend(block)
        instructions.append(Measure(target, i))

        undo: list[Instruction] = []
        undo.extend(Cnot(a, b) for a, b in reversed(_cascade_pairs(support)))
        for q in support:
            undo.extend(Gate(kind, q) for kind in _CASCADE_LEAVE[letters[q]])

        frame_update = None
        if elide_uncompute:
            frame.extend(block)
            frame_update = tuple(
                f"cx q{g.control} q{g.target}"
                if isinstance(g, Cnot)
                else f"{g.kind} q{g.qubit}"
                for g in undo
            )
        else:
            instructions.extend(undo)
        maps.append(
            MeasurementMap(
                pauli=p.to_label(),
                cbits=(i,),
                flip=1 if effective.sign < 0 else 0,
                segment=(start, len(instructions)),
                frame_update=frame_update,
            )
        )
    circuit = Circuit(width, len(paulis), instructions, ("magic",) * width)
    return Emission(circuit, maps, "cascade")


# -- ghz scheme -------------------------------------------------------------


def _ghz_tree_prep(aux: list[int]) -> list[Instruction]:
    prep: list[Instruction] = [Gate("h", aux[0])]
    grown = 1
    while grown < len(aux):
        for i in range(grown):
            if grown + i < len(aux):
                prep.append(Cnot(aux[i], aux[grown + i]))
        grown *= 2
    return prep


def _ghz_const_depth_prep(
    aux: list[int], helpers: list[int], cbit_base: int
) -> tuple[list[Instruction], int]:
    """Chain aux0 h0 aux1 h1 ... measured helpers glue the pluses into a GHZ.

    Helper j sits between aux j and aux j+1; after the cz chain, helpers are
    measured in the X basis and aux j receives an x correction conditioned
    on the parity of helper outcomes j and later.
    """
    t = len(aux)
    prep: list[Instruction] = [Gate("h", q) for q in aux + helpers]
    chain = []
    for j in range(t - 1):
        chain.append((aux[j], helpers[j]))
        chain.append((helpers[j], aux[j + 1]))
    for a, b in chain:
        prep.append(Gate("h", b))
        prep.append(Cnot(a, b))
        prep.append(Gate("h", b))
    helper_cbits = []
    for j, h in enumerate(helpers):
        cbit = cbit_base + j
        helper_cbits.append(cbit)
        prep.append(Gate("h", h))
        prep.append(Measure(h, cbit))
        prep.append(CondGate("x", h, (cbit,)))
    for j in range(t - 1):
        prep.append(CondGate("x", aux[j], tuple(helper_cbits[j:])))
    return prep, cbit_base + len(helpers)


def _emit_ghz(paulis: list[PauliOperator], width: int, prep: str) -> Emission:
    if prep not in ("tree", "constdepth"):
        raise PauliError(f"unknown ghz preparation {prep!r}")
    t = width
    aux = list(range(t, 2 * t))
    helpers = list(range(2 * t, 3 * t - 1)) if prep == "constdepth" else []
    instructions: list[Instruction] = []
    maps: list[MeasurementMap] = []
    next_cbit = 0
    for p in paulis:
        start = len(instructions)
        if prep == "tree":
            instructions.extend(_ghz_tree_prep(aux))
        else:
            block, next_cbit = _ghz_const_depth_prep(aux, helpers, next_cbit)
            instructions.extend(block)
        letters = _site_letters(p)
        for j in range(t):
            if j in letters:
                instructions.extend(_controlled_site(aux[j], j, letters[j]))
        outcome_cbits = []
        for j in range(t):
            cbit = next_cbit
            next_cbit += 1
            outcome_cbits.append(cbit)
            instructions.append(Gate("h", aux[j]))
            instructions.append(Measure(aux[j], cbit))
            instructions.append(CondGate("x", aux[j], (cbit,)))
        maps.append(
            MeasurementMap(
                pauli=p.to_label(),
                cbits=tuple(outcome_cbits),
                flip=1 if p.sign < 0 else 0,
                segment=(start, len(instructions)),
            )
        )
    num_qubits = t + len(aux) + len(helpers)
    inputs = ("magic",) * t + ("zero",) * (len(aux) + len(helpers))
    circuit = Circuit(num_qubits, next_cbit, instructions, inputs)
    return Emission(circuit, maps, "ghz")


# -- entry point ------------------------------------------------------------


def emit(
    paulis,
    width: int,
    scheme: str = "aux",
    *,
    elide_uncompute: bool = False,
    ghz_prep: str = "tree",
) -> Emission:
    """Emit the measurement sequence under the named scheme.

    ``width`` is the register size; it matters when ``paulis`` is empty and
    is checked against every operator otherwise.
    """
    paulis = list(paulis)
    if width <= 0:
        raise PauliError(f"register width must be positive, got {width}")
    _validate(paulis, width)
    if scheme == "aux":
        return _emit_aux(paulis, width)
    if scheme == "cascade":
        return _emit_cascade(paulis, width, elide_uncompute)
    if scheme == "ghz":
        return _emit_ghz(paulis, width, ghz_prep)
    raise PauliError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
