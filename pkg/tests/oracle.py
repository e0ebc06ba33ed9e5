"""Independent dense-linear-algebra oracle used to pin expected values.

Everything here is computed from explicit matrices and brute-force state
enumeration, never through the package's own algebra, so agreement between
the two is meaningful.  Package objects are accepted as *descriptions*
(bitsets, instruction lists); their semantics are reimplemented from the
documented conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from pbckit.circuit import Circuit, CondGate, Cnot, Gate, Instruction, Measure, Reset
from pbckit.pauli import PauliOperator

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
T = np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex)

GATE_MATRICES = {"h": H, "s": S, "t": T, "x": X, "z": Z}

MAGIC = np.array([1, np.exp(1j * math.pi / 4)], dtype=complex) / math.sqrt(2)
ZERO = np.array([1, 0], dtype=complex)


def kron_chain(per_qubit: list[np.ndarray]) -> np.ndarray:
    """Tensor product with qubit 0 as the least significant index bit."""
    return reduce(np.kron, reversed(per_qubit))


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """i**phase times the per-qubit product X^x Z^z, built densely."""
    factors = []
    for q in range(p.width):
        m = I2
        if (p.x >> q) & 1:
            m = m @ X
        if (p.z >> q) & 1:
            m = m @ Z
        factors.append(m)
    return (1j**p.phase) * kron_chain(factors)


def one_qubit_unitary(u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    factors = [I2] * n
    factors[qubit] = u
    return kron_chain(factors)


def cnot_unitary(control: int, target: int, n: int) -> np.ndarray:
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        out = j ^ (1 << target) if (j >> control) & 1 else j
        m[out, j] = 1
    return m


def instruction_unitary(instr: Instruction, n: int) -> np.ndarray:
    if isinstance(instr, Gate):
        return one_qubit_unitary(GATE_MATRICES[instr.kind], instr.qubit, n)
    if isinstance(instr, Cnot):
        return cnot_unitary(instr.control, instr.target, n)
    raise ValueError(f"not unitary: {instr}")


def circuit_unitary(circ: Circuit) -> np.ndarray:
    u = np.eye(1 << circ.num_qubits, dtype=complex)
    for instr in circ.instructions:
        u = instruction_unitary(instr, circ.num_qubits) @ u
    return u


def initial_state(circ: Circuit) -> np.ndarray:
    return kron_chain(
        [MAGIC if kind == "magic" else ZERO for kind in circ.inputs]
    )


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    overlap = abs(np.vdot(a, b))
    return abs(overlap - 1.0) <= tol


# -- state surgery without full matrices (for wider circuits) ---------------


def apply_1q(state: np.ndarray, u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    shaped = state.reshape(1 << (n - 1 - qubit), 2, 1 << qubit)
    return np.einsum("ab,xby->xay", u, shaped).reshape(-1)


def apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    idx = np.arange(state.shape[0])
    src = np.where((idx >> control) & 1 == 1, idx ^ (1 << target), idx)
    return state[src]


def apply_instruction(state: np.ndarray, instr: Instruction, n: int) -> np.ndarray:
    if isinstance(instr, Gate):
        return apply_1q(state, GATE_MATRICES[instr.kind], instr.qubit, n)
    if isinstance(instr, Cnot):
        return apply_cnot(state, instr.control, instr.target)
    raise ValueError(f"not unitary: {instr}")


# -- adaptive branch-enumerating simulator ----------------------------------


@dataclass
class Branch:
    prob: float
    cbits: list[int]
    state: np.ndarray


PRUNE = 1e-14


def _measure_z(branch: Branch, qubit: int, cbit: int, n: int) -> list[Branch]:
    idx = np.arange(branch.state.shape[0])
    mask1 = ((idx >> qubit) & 1).astype(bool)
    out = []
    for outcome, mask in ((0, ~mask1), (1, mask1)):
        weight = float(np.sum(np.abs(branch.state[mask]) ** 2))
        if weight <= PRUNE:
            continue
        projected = np.where(mask, branch.state, 0.0) / math.sqrt(weight)
        cbits = list(branch.cbits)
        if cbit >= 0:
            cbits[cbit] = outcome
        elif outcome == 1:  # reset: flip the projected-1 branch back to |0>
            projected = apply_cnot_like_flip(projected, qubit)
        out.append(Branch(branch.prob * weight, cbits, projected))
    return out


def apply_cnot_like_flip(state: np.ndarray, qubit: int) -> np.ndarray:
    idx = np.arange(state.shape[0])
    return state[idx ^ (1 << qubit)]


def branch_step(branches: list[Branch], instr: Instruction, n: int) -> list[Branch]:
    if isinstance(instr, (Gate, Cnot)):
        return [
            Branch(b.prob, b.cbits, apply_instruction(b.state, instr, n))
            for b in branches
        ]
    if isinstance(instr, Measure):
        return [nb for b in branches for nb in _measure_z(b, instr.qubit, instr.cbit, n)]
    if isinstance(instr, Reset):
        return [nb for b in branches for nb in _measure_z(b, instr.qubit, -1, n)]
    if isinstance(instr, CondGate):
        out = []
        for b in branches:
            if instr.fires(b.cbits):
                u = GATE_MATRICES[instr.kind]
                out.append(Branch(b.prob, b.cbits, apply_1q(b.state, u, instr.qubit, n)))
            else:
                out.append(b)
        return out
    raise ValueError(f"unknown instruction {instr}")


def branch_run(circ: Circuit, instructions=None, state0=None) -> list[Branch]:
    """Enumerate all measurement branches of an adaptive circuit."""
    n = circ.num_qubits
    start = initial_state(circ) if state0 is None else np.asarray(state0, complex)
    branches = [Branch(1.0, [0] * circ.num_cbits, start)]
    for instr in instructions if instructions is not None else circ.instructions:
        branches = branch_step(branches, instr, n)
    return branches


def output_distribution(circ: Circuit, output_cbits, state0=None) -> dict[str, float]:
    """Exact distribution of the named cbits, branches merged."""
    dist: dict[str, float] = {}
    for branch in branch_run(circ, state0=state0):
        key = "".join(str(branch.cbits[c]) for c in output_cbits)
        dist[key] = dist.get(key, 0.0) + branch.prob
    return dist


def born_distribution(circ: Circuit) -> dict[str, float]:
    """Distribution for a unitary circuit with trailing measurements only."""
    measures = [i for i in circ.instructions if isinstance(i, Measure)]
    unitaries = [i for i in circ.instructions if isinstance(i, (Gate, Cnot))]
    if len(measures) + len(unitaries) != len(circ.instructions):
        raise ValueError("born_distribution expects a unitary circuit + measures")
    n = circ.num_qubits
    state = initial_state(circ)
    for instr in unitaries:
        state = apply_instruction(state, instr, n)
    probs = np.abs(state) ** 2
    dist: dict[str, float] = {}
    order = sorted(measures, key=lambda m: m.cbit)
    for j, pr in enumerate(probs):
        if pr <= PRUNE:
            continue
        key = "".join(str((j >> m.qubit) & 1) for m in order)
        dist[key] = dist.get(key, 0.0) + float(pr)
    return dist


def tvd(a: dict[str, float], b: dict[str, float]) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def counts_to_dist(counts: dict[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    return {k: v / total for k, v in counts.items()}


# -- sequential Pauli measurement reference ---------------------------------


def sequence_distribution(
    paulis: list[PauliOperator], width: int
) -> dict[tuple[int, ...], float]:
    """Measure the operators in order on the all-magic register, exactly."""
    start = kron_chain([MAGIC] * width)
    branches = [(1.0, (), start)]
    for p in paulis:
        matrix = pauli_matrix(p)
        grown = []
        for prob, outcomes, state in branches:
            moved = matrix @ state
            for outcome, sign in ((0, 1.0), (1, -1.0)):
                projected = (state + sign * moved) / 2.0
                weight = float(np.vdot(projected, projected).real)
                if weight <= PRUNE:
                    continue
                grown.append(
                    (prob * weight, outcomes + (outcome,), projected / math.sqrt(weight))
                )
        branches = grown
    dist: dict[tuple[int, ...], float] = {}
    for prob, outcomes, _ in branches:
        dist[outcomes] = dist.get(outcomes, 0.0) + prob
    return dist


def random_commuting_paulis(
    rng: np.random.Generator, width: int, count: int
) -> list[PauliOperator]:
    """Rejection-sample signed, Hermitian, pairwise commuting operators."""
    chosen: list[PauliOperator] = []
    while len(chosen) < count:
        x = int(rng.integers(0, 1 << width))
        z = int(rng.integers(0, 1 << width))
        if x == 0 and z == 0:
            continue
        phase = ((x & z).bit_count() + 2 * int(rng.integers(0, 2))) & 3
        candidate = PauliOperator(width, x, z, phase)
        if all(candidate.commutes(p) for p in chosen):
            chosen.append(candidate)
    return chosen


def _phase_normal_key(state: np.ndarray, decimals: int = 8) -> bytes:
    """Hashable fingerprint that is invariant under a global phase."""
    flat = state.ravel()
    pivot = flat[int(np.argmax(np.abs(flat)))]
    if abs(pivot) > 1e-12:
        flat = flat * (abs(pivot) / pivot)
    return flat.round(decimals).tobytes()


def emitted_distribution(emission, state_tol: float = 1e-9) -> dict:
    """Exact outcome-tuple distribution of an emitted measurement circuit.

    Walks the instruction stream once, decoding each map's outcome at its
    segment boundary.  Classical bits are zeroed as soon as nothing reads
    them any more (conditional gates and pending outcome decodes count as
    reads), and branches agreeing on decoded outcomes, live bits, and joint
    state are merged.  Merging and the final tally assert that branches in
    one outcome class share a state up to global phase, which is itself a
    correctness property of every scheme (the raw measurement record beyond
    the decoded outcomes must not leak into the register).
    """
    circ = emission.circuit
    n = circ.num_qubits
    instrs = circ.instructions
    cursor = 0
    for m in emission.maps:
        start, end = m.segment
        assert start == cursor, "segments must tile the instruction list"
        cursor = end
    assert cursor == len(instrs), "trailing unsegmented instructions"

    decode_at: dict[int, list] = {}
    for m in emission.maps:
        decode_at.setdefault(m.segment[1], []).append(m)

    # need[b]: cbits whose value is still read somewhere at or after
    # boundary b, with decodes at b itself already consumed
    need: list[frozenset[int]] = [frozenset()] * (len(instrs) + 1)
    live: set[int] = set()
    for b in range(len(instrs) - 1, -1, -1):
        for m in decode_at.get(b + 1, ()):
            live.update(m.cbits)
        instr = instrs[b]
        if isinstance(instr, Measure):
            live.discard(instr.cbit)
        elif isinstance(instr, CondGate):
            live.update(instr.cbits)
        need[b] = frozenset(live)

    def compress(leaves, boundary):
        alive = need[boundary]
        merged: dict[tuple, list] = {}
        order = []
        for outcomes, br in leaves:
            cb = [v if i in alive else 0 for i, v in enumerate(br.cbits)]
            key = (outcomes, tuple(cb), _phase_normal_key(br.state))
            kept = merged.get(key)
            if kept is None:
                merged[key] = [outcomes, Branch(br.prob, cb, br.state)]
                order.append(key)
            else:
                assert equal_up_to_phase(
                    br.state, kept[1].state, state_tol
                ), f"outcome class {outcomes} reached inconsistent states"
                kept[1].prob += br.prob
        return [tuple(merged[k]) for k in order]

    leaves = [((), Branch(1.0, [0] * circ.num_cbits, initial_state(circ)))]
    for b, instr in enumerate(instrs):
        stepped = []
        for outcomes, br in leaves:
            for leaf in branch_step([br], instr, n):
                stepped.append((outcomes, leaf))
        leaves = stepped
        decoded = decode_at.get(b + 1, ())
        for m in decoded:
            leaves = [
                (outcomes + (m.outcome(leaf.cbits),), leaf)
                for outcomes, leaf in leaves
            ]
        # bits only die after their final read, so merges can only newly
        # succeed here; plain gates never change the classical record
        if (decoded or isinstance(instr, CondGate)) and len(leaves) > 1:
            leaves = compress(leaves, b + 1)

    out: dict[tuple[int, ...], float] = {}
    rep: dict[tuple[int, ...], np.ndarray] = {}
    for outcomes, br in leaves:
        if outcomes in rep:
            assert equal_up_to_phase(
                br.state, rep[outcomes], state_tol
            ), f"outcome class {outcomes} reached inconsistent states"
            out[outcomes] += br.prob
        else:
            rep[outcomes] = br.state
            out[outcomes] = br.prob
    return out


def random_clifford_t_circuit(
    rng: np.random.Generator, n: int, t: int, extra_gates: int
) -> Circuit:
    """Random h/s/x/cx circuit with exactly t t-gates, measuring every qubit."""
    instructions: list[Instruction] = []
    slots = sorted(rng.choice(max(1, extra_gates + t), size=t, replace=False))
    placed = 0
    for step in range(extra_gates + t):
        if placed < t and step == slots[placed]:
            instructions.append(Gate("t", int(rng.integers(0, n))))
            placed += 1
            continue
        roll = int(rng.integers(0, 4))
        if roll == 3 and n >= 2:
            a, b = rng.choice(n, 2, replace=False)
            instructions.append(Cnot(int(a), int(b)))
        else:
            kind = ("h", "s", "x")[roll % 3]
            instructions.append(Gate(kind, int(rng.integers(0, n))))
    instructions.extend(Measure(q, q) for q in range(n))
    return Circuit(n, n, instructions)
