"""The compilation loop: turn a gadgetized circuit into adaptive Pauli measurements.

Every measurement in the circuit is pulled backward to the very front: first
through the preceding instructions (conditioned gates count only if their
condition fired this shot), then through the reflections recorded by earlier
measurements, oldest first, since each new reflection is logically placed at
the front of the circuit and is therefore the first thing a later
measurement crosses on its way back.  The resulting operator acts directly
on |0...0> tensored with magic states and is resolved against the tracked
basis:

* anticommutes with a tracked row: the outcome is a fair coin, and a
  reflection capturing (row, operator, row outcome, coin) is recorded;
* a signed product of tracked rows: the outcome is that sign XOR the
  recorded outcomes, no randomness and no quantum work;
* independent: the operator's data-register part is trivial, so it is
  restricted to the magic register and handed to the backend.

With hybrid overrides, the first k magic qubits are declared to satisfy a
signed single-qubit stabilizer each; those qubits drop out of restricted
operators classically and only t - k qubits ever touch the backend.
"""

from __future__ import annotations

import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import initial_fired, make_propagator
from .circuit import CondGate, Measure
from .errors import InternalInvariantError, PauliError
from .gadgets import GadgetizedCircuit
from .pauli import (
    Anticommuting,
    BasisTracker,
    Dependent,
    Origin,
    PauliOperator,
    Reflection,
)
from .statevector import Backend, StatevectorBackend


@dataclass(frozen=True, slots=True)
class MeasurementRecord:
    cbit: int
    operator: PauliOperator
    resolution: str  # "coin" | "determined" | "quantum"
    outcome: int


@dataclass
class ShotResult:
    bits: str
    cbit_values: tuple[int, ...]
    records: list[MeasurementRecord]
    quantum_measurements: list[tuple[PauliOperator, int]]
    num_reflections: int

    @property
    def num_quantum(self) -> int:
        return len(self.quantum_measurements)


class _CompiledGadget:
    """Per-gadget preprocessing shared by all shots."""

    def __init__(self, gadget: GadgetizedCircuit, overrides: tuple[PauliOperator, ...]):
        circ = gadget.circuit
        if len(overrides) > gadget.num_magic:
            raise PauliError(
                f"{len(overrides)} overrides for {gadget.num_magic} magic qubits"
            )
        for ov in overrides:
            if ov.width != 1 or ov.is_identity or not ov.is_hermitian:
                raise PauliError("overrides must be signed one-qubit Paulis")
        self.gadget = gadget
        self.overrides = overrides
        self.width = circ.num_qubits
        self.register_width = gadget.num_magic - len(overrides)
        self.register_start = gadget.num_main + len(overrides)
        self.propagator = make_propagator(circ.instructions, self.width)
        self.fired_template = initial_fired(circ.instructions)
        self.measures = [
            (i, instr)
            for i, instr in enumerate(circ.instructions)
            if isinstance(instr, Measure)
        ]
        self.conds = [
            (i, instr)
            for i, instr in enumerate(circ.instructions)
            if isinstance(instr, CondGate)
        ]


def _fresh_tracker(compiled: _CompiledGadget) -> BasisTracker:
    gadget = compiled.gadget
    tracker = BasisTracker(compiled.width)
    for q in range(gadget.num_main):
        tracker.insert(
            PauliOperator(compiled.width, 0, 1 << q), 0, Origin.DUMMY
        )
    for i, ov in enumerate(compiled.overrides):
        q = gadget.num_main + i
        tracker.insert(
            PauliOperator(compiled.width, ov.x << q, ov.z << q, ov.phase),
            0,
            Origin.OVERRIDE,
        )
    return tracker


def _restrict_to_register(
    compiled: _CompiledGadget, op: PauliOperator
) -> PauliOperator:
    """Strip data-register Z factors and override factors; keep the rest."""
    gadget = compiled.gadget
    main_mask = (1 << gadget.num_main) - 1
    if op.x & main_mask:
        raise InternalInvariantError(
            f"independent operator {op.to_label()} has X support on the data register"
        )
    negative = op.sign == -1
    for i, ov in enumerate(compiled.overrides):
        q = gadget.num_main + i
        xb = (op.x >> q) & 1
        zb = (op.z >> q) & 1
        if xb == zb == 0:
            continue
        if xb != ov.x or zb != ov.z:
            raise InternalInvariantError(
                f"operator {op.to_label()} does not match the override on qubit {q}"
            )
        if ov.sign == -1:
            negative = not negative
    start = compiled.register_start
    xr = op.x >> start
    zr = op.z >> start
    if xr == 0 and zr == 0:
        raise InternalInvariantError(
            f"independent operator {op.to_label()} restricts to the identity"
        )
    y_register = (xr & zr).bit_count()
    phase = (y_register + (2 if negative else 0)) & 3
    return PauliOperator(compiled.register_width, xr, zr, phase)


def _run_shot(
    compiled: _CompiledGadget,
    backend: Backend,
    rng: np.random.Generator,
) -> ShotResult:
    gadget = compiled.gadget
    circ = gadget.circuit
    tracker = _fresh_tracker(compiled)
    reflections: list[Reflection] = []
    fired = bytearray(compiled.fired_template)
    cbit_values = [0] * circ.num_cbits
    records: list[MeasurementRecord] = []
    quantum: list[tuple[PauliOperator, int]] = []
    state = backend.start_shot(compiled.register_width)
    cond_ptr = 0

    for index, measure in compiled.measures:
        while cond_ptr < len(compiled.conds) and compiled.conds[cond_ptr][0] < index:
            ci, cond = compiled.conds[cond_ptr]
            fired[ci] = 1 if cond.fires(cbit_values) else 0
            cond_ptr += 1

        x, z, phase = compiled.propagator.run(
            fired, index, 0, 1 << measure.qubit, 0
        )
        op = PauliOperator(compiled.width, x, z, phase)
        for reflection in reflections:  # oldest first; see module docstring
            op = op.conjugate_by_reflection(reflection)
        if not op.is_hermitian:
            raise InternalInvariantError(
                f"conjugated measurement became non-Hermitian: {op.to_label()}"
            )

        verdict = tracker.classify(op)
        if isinstance(verdict, Anticommuting):
            outcome = int(rng.integers(0, 2))
            reflections.append(
                Reflection(
                    axis=tracker.row(verdict.row_index),
                    incoming=op,
                    axis_outcome=tracker.outcome(verdict.row_index),
                    toss=outcome,
                )
            )
            resolution = "coin"
        elif isinstance(verdict, Dependent):
            outcome = verdict.sign
            for i in verdict.row_indices:
                outcome ^= tracker.outcome(i)
            resolution = "determined"
        else:
            restricted = _restrict_to_register(compiled, op)
            outcome = backend.measure(state, restricted, rng)
            tracker.insert(op, outcome, Origin.MEASURED)
            quantum.append((restricted, outcome))
            resolution = "quantum"

        cbit_values[measure.cbit] = outcome
        records.append(MeasurementRecord(measure.cbit, op, resolution, outcome))

    bits = "".join(str(cbit_values[c]) for c in gadget.output_cbits)
    return ShotResult(
        bits=bits,
        cbit_values=tuple(cbit_values),
        records=records,
        quantum_measurements=quantum,
        num_reflections=len(reflections),
    )


def shot_rng(seed: int, shot_index: int) -> np.random.Generator:
    """Independent substream per shot, stable under any execution order."""
    return np.random.default_rng([seed, shot_index])


def run_shot(
    gadget: GadgetizedCircuit,
    backend: Backend,
    rng: np.random.Generator,
    overrides: tuple[PauliOperator, ...] = (),
) -> ShotResult:
    """Compile and execute one shot; see the module docstring for the loop."""
    return _run_shot(_CompiledGadget(gadget, tuple(overrides)), backend, rng)


# -- batched sampling -------------------------------------------------------


@dataclass
class SampleResult:
    shots: int
    seed: int
    backend: str
    scheme: str | None
    histogram: dict[str, int]
    num_quantum: dict[str, float]
    num_reflections: dict[str, float]
    emitted: dict[str, dict[str, float]] | None
    seconds: float = field(default=0.0, compare=False)

    def to_report(self, timing: bool = False) -> dict:
        report = {
            "shots": self.shots,
            "seed": self.seed,
            "backend": self.backend,
            "histogram": dict(sorted(self.histogram.items())),
            "num_quantum": self.num_quantum,
            "num_reflections": self.num_reflections,
        }
        if self.scheme is not None:
            report["scheme"] = self.scheme
            report["emitted"] = self.emitted
        if timing:
            report["timing"] = {
                "seconds_total": round(self.seconds, 6),
                "ms_per_shot": round(1000.0 * self.seconds / max(1, self.shots), 6),
            }
        return report


def _stat_triple(values) -> dict[str, float]:
    seq = list(values)
    if not seq:
        return {"mean": 0.0, "min": 0.0, "max": 0.0}
    return {
        "mean": sum(seq) / len(seq),
        "min": min(seq),
        "max": max(seq),
    }


def _shot_summary(compiled, backend, seed, shot_index, scheme):
    result = _run_shot(compiled, backend, shot_rng(seed, shot_index))
    emitted_metrics = None
    if scheme is not None:
        from .emit import emit

        operators = [p for p, _ in result.quantum_measurements]
        emitted_metrics = emit(operators, compiled.register_width, scheme).metrics()
    return result.bits, result.num_quantum, result.num_reflections, emitted_metrics


def _worker_batch(args):
    gadget, overrides, backend, seed, indices, scheme = args
    compiled = _CompiledGadget(gadget, overrides)
    return [
        _shot_summary(compiled, backend, seed, i, scheme) for i in indices
    ]


def default_workers() -> int:
    value = os.environ.get("PBCKIT_WORKERS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def sample(
    gadget: GadgetizedCircuit,
    shots: int,
    seed: int,
    backend: Backend | None = None,
    scheme: str | None = None,
    workers: int | None = None,
) -> SampleResult:
    """Run many shots on independent RNG substreams and aggregate.

    Results are identical for any worker count: shot i always uses the
    substream (seed, i), and aggregation is order-independent.
    """
    if backend is None:
        backend = StatevectorBackend()
    if workers is None:
        workers = default_workers()
    started = time.perf_counter()
    summaries = []
    if workers > 1 and shots > 1:
        chunk = max(1, (shots + workers - 1) // workers)
        batches = [
            (gadget, (), backend, seed, range(lo, min(lo + chunk, shots)), scheme)
            for lo in range(0, shots, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_worker_batch, batches):
                summaries.extend(part)
    else:
        compiled = _CompiledGadget(gadget, ())
        summaries = [
            _shot_summary(compiled, backend, seed, i, scheme) for i in range(shots)
        ]
    seconds = time.perf_counter() - started

    histogram = Counter(bits for bits, _, _, _ in summaries)
    emitted = None
    if scheme is not None:
        emitted = {
            key: _stat_triple(m[key] for _, _, _, m in summaries)
            for key in ("depth", "count_1q", "count_cnot")
        }
    return SampleResult(
        shots=shots,
        seed=seed,
        backend=backend.name,
        scheme=scheme,
        histogram=dict(histogram),
        num_quantum=_stat_triple(nq for _, nq, _, _ in summaries),
        num_reflections=_stat_triple(nr for _, _, nr, _ in summaries),
        emitted=emitted,
        seconds=seconds,
    )
