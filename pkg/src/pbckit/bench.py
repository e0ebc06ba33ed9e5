"""Benchmark circuit families: hidden-shift instances and random grid circuits.

The hidden-shift family builds, for an even register size n and a hidden
bitstring s, the circuit H O_f' H O_f H measured in the computational
basis, where both oracles share one random degree-3 phase polynomial g on
n/2 qubits:

    O_f  = (prod_i CZ(i, i + n/2)) (O_g on the first half)
    O_f' = (prod_i CZ(i, i + n/2)) (O_g on the second half) Z(s)

Running it on |0...0> returns exactly s with probability 1, which makes the
family a self-checking correctness benchmark whose t count is 14 per ccz
(each ccz lowers to the standard 7-t, 6-cx block).

The random grid family lays out qubits on a rows x cols grid, starts with a
Hadamard layer, then alternates entangling layers (cz on disjoint neighbour
pairs, cycling through 8 patterns) with random one-qubit gates on idle
qubits, where t is drawn with the rate tuned to hit a target t count in
expectation; instances are post-selected on hitting it exactly after
peephole simplification.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Cnot, Gate, Instruction, Measure, peephole_simplify
from .errors import GenerationError


def _t_dagger(q: int) -> list[Instruction]:
    return [Gate("s", q), Gate("s", q), Gate("s", q), Gate("t", q)]


def ccz_block(a: int, b: int, c: int) -> list[Instruction]:
    """Doubly controlled Z from t, t-dagger and cx; 7 t gates, 6 cx."""
    block: list[Instruction] = []
    block.append(Cnot(b, c))
    block.extend(_t_dagger(c))
    block.append(Cnot(a, c))
    block.append(Gate("t", c))
    block.append(Cnot(b, c))
    block.extend(_t_dagger(c))
    block.append(Cnot(a, c))
    block.append(Gate("t", b))
    block.append(Gate("t", c))
    block.append(Cnot(a, b))
    block.append(Gate("t", a))
    block.extend(_t_dagger(b))
    block.append(Cnot(a, b))
    return block


def _cz(a: int, b: int) -> list[Instruction]:
    return [Gate("h", b), Cnot(a, b), Gate("h", b)]


def _phase_polynomial(
    half: int, n_ccz: int, n_zcz: int, rng: np.random.Generator, offset: int
) -> list[Instruction]:
    """n_ccz ccz blocks interleaved with n_ccz + 1 runs of n_zcz random
    z / cz gates, all on qubits offset .. offset + half - 1."""
    gates: list[Instruction] = []
    for segment in range(n_ccz + 1):
        for _ in range(n_zcz):
            if rng.integers(0, 2) == 0:
                q = offset + int(rng.integers(0, half))
                gates.append(Gate("s", q))
                gates.append(Gate("s", q))
            else:
                a, b = (offset + int(q) for q in rng.choice(half, 2, replace=False))
                gates.extend(_cz(a, b))
        if segment < n_ccz:
            a, b, c = (offset + int(q) for q in rng.choice(half, 3, replace=False))
            gates.extend(ccz_block(a, b, c))
    return gates


def gen_hsc(
    n: int,
    n_ccz: int,
    n_zcz: int,
    seed: int,
    hidden: str | None = None,
) -> tuple[Circuit, str]:
    """Build one hidden-shift instance; returns (circuit, hidden string)."""
    if n % 2 or n < 4:
        raise GenerationError(f"register size must be even and >= 4, got {n}")
    half = n // 2
    if n_ccz > 0 and half < 3:
        raise GenerationError("ccz blocks need at least 3 qubits per half")
    if n_ccz < 0 or n_zcz < 0:
        raise GenerationError("gate counts must be non-negative")
    rng = np.random.default_rng(seed)
    if hidden is None:
        hidden = "".join(str(int(b)) for b in rng.integers(0, 2, size=n))
    if len(hidden) != n or set(hidden) - {"0", "1"}:
        raise GenerationError(f"hidden string must be {n} bits of 0/1")

    # The same polynomial instance is drawn once and placed on both halves.
    g_local = _phase_polynomial(half, n_ccz, n_zcz, rng, offset=0)

    def shift(gates: list[Instruction], by: int) -> list[Instruction]:
        moved: list[Instruction] = []
        for gate in gates:
            if isinstance(gate, Cnot):
                moved.append(Cnot(gate.control + by, gate.target + by))
            else:
                moved.append(Gate(gate.kind, gate.qubit + by))
        return moved

    instructions: list[Instruction] = []
    instructions.extend(Gate("h", q) for q in range(n))
    instructions.extend(g_local)
    for i in range(half):
        instructions.extend(_cz(i, i + half))
    instructions.extend(Gate("h", q) for q in range(n))
    for q, bit in enumerate(hidden):
        if bit == "1":
            instructions.append(Gate("s", q))
            instructions.append(Gate("s", q))
    instructions.extend(shift(g_local, half))
    for i in range(half):
        instructions.extend(_cz(i, i + half))
    instructions.extend(Gate("h", q) for q in range(n))
    instructions.extend(Measure(q, q) for q in range(n))
    return Circuit(n, n, instructions), hidden


# -- random grid circuits ---------------------------------------------------


def grid_pairs(rows: int, cols: int, pattern: int) -> list[tuple[int, int]]:
    """Disjoint neighbour pairs for one of the 8 entangling patterns."""
    orient, stagger, offset = pattern // 4, (pattern // 2) % 2, pattern % 2
    pairs = []
    if orient == 0:
        for r in range(rows):
            for c in range(cols - 1):
                if c % 2 == (offset + stagger * r) % 2:
                    pairs.append((r * cols + c, r * cols + c + 1))
    else:
        for c in range(cols):
            for r in range(rows - 1):
                if r % 2 == (offset + stagger * c) % 2:
                    pairs.append((r * cols + c, (r + 1) * cols + c))
    return pairs


def gen_rqc(
    rows: int,
    cols: int,
    cycles: int,
    t_target: int,
    seed: int,
    max_attempts: int = 500,
) -> Circuit:
    """Random grid instance post-selected on an exact simplified t count."""
    n = rows * cols
    if n < 2 or cycles < 1:
        raise GenerationError("need a grid of >= 2 qubits and >= 1 cycles")
    idle_slots = sum(
        n - 2 * len(grid_pairs(rows, cols, cycle % 8)) for cycle in range(cycles)
    )
    if t_target < 0 or (t_target > 0 and idle_slots == 0):
        raise GenerationError(f"cannot place {t_target} t gates in {idle_slots} slots")
    p_t = min(1.0, t_target / idle_slots) if idle_slots else 0.0

    achieved = []
    for attempt in range(max_attempts):
        rng = np.random.default_rng([seed, attempt])
        instructions: list[Instruction] = [Gate("h", q) for q in range(n)]
        for cycle in range(cycles):
            pairs = grid_pairs(rows, cols, cycle % 8)
            busy = {q for pair in pairs for q in pair}
            for a, b in pairs:
                instructions.extend(_cz(a, b))
            for q in range(n):
                if q in busy:
                    continue
                if rng.random() < p_t:
                    instructions.append(Gate("t", q))
                else:
                    kind = "s" if rng.integers(0, 2) == 0 else "h"
                    instructions.append(Gate(kind, q))
        instructions.extend(Measure(q, q) for q in range(n))
        simplified = peephole_simplify(Circuit(n, n, instructions))
        if simplified.t_count == t_target:
            return simplified
        achieved.append(simplified.t_count)
    raise GenerationError(
        f"no instance with t count {t_target} in {max_attempts} attempts "
        f"(saw {sorted(set(achieved))})"
    )


def boundary_lower_bound(cycles: int) -> float:
    """Crossover lower bound for the grid family at a given cycle count.

    Grows like sqrt(cycles); used when reporting how many magic qubits can
    be virtualized before the sampling overhead overtakes the dense cost.
    """
    return -2.5 + math.sqrt(4.0 * cycles + 37.0) / 2.0
