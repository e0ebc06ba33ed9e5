"""Trade magic-state qubits for sampling overhead via a quasiprobability mix.

The magic-state density matrix decomposes over three signed stabilizer
projectors:

    |A><A| = 1/2 P(+X) + (1 - sqrt(2))/2 P(-X) + 1/sqrt(2) P(+Y)

with P(g) = (1 + g)/2.  Virtualizing k magic qubits replaces them by a term
drawn from the 3^k-fold tensor product of this decomposition, with
probability proportional to |coefficient|; each drawn term pins its qubits
to a signed one-qubit stabilizer, which the compilation loop then resolves
classically.  The price is a bounded estimator: for output bit y and drawn
term sign s, eta = 1/2 - 1/2 * s * (-1)**y * l1 with l1 = sqrt(2)**k is an
unbiased estimate of the probability that the bit is 1, and Hoeffding gives
the iteration count for a target half-width and failure probability.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .engine import _CompiledGadget, _run_shot, default_workers, shot_rng
from .errors import PauliError
from .gadgets import GadgetizedCircuit
from .pauli import PauliOperator
from .statevector import Backend, StatevectorBackend


@dataclass(frozen=True)
class StabilizerTerm:
    coeff: float
    generators: tuple[PauliOperator, ...]


def single_qubit_terms() -> tuple[StabilizerTerm, ...]:
    x_plus = PauliOperator.from_label("+X")
    x_minus = PauliOperator.from_label("-X")
    y_plus = PauliOperator.from_label("+Y")
    return (
        StabilizerTerm(0.5, (x_plus,)),
        StabilizerTerm((1.0 - math.sqrt(2.0)) / 2.0, (x_minus,)),
        StabilizerTerm(1.0 / math.sqrt(2.0), (y_plus,)),
    )


def tensor_terms(k: int) -> list[StabilizerTerm]:
    """All 3^k product terms for k virtualized qubits, coefficient multiplied."""
    if k < 0:
        raise PauliError(f"virtual qubit count must be >= 0, got {k}")
    singles = single_qubit_terms()
    terms = []
    for combo in product(singles, repeat=k):
        coeff = 1.0
        gens: tuple[PauliOperator, ...] = ()
        for t in combo:
            coeff *= t.coeff
            gens = gens + t.generators
        terms.append(StabilizerTerm(coeff, gens))
    return terms


def l1_norm(terms) -> float:
    return sum(abs(t.coeff) for t in terms)


@dataclass(frozen=True)
class SamplingPlan:
    k: int
    epsilon: float
    p_fail: float
    l1: float
    num_iterations: int
    num_iterations_naive: int

    def to_report(self) -> dict:
        return {
            "k": self.k,
            "epsilon": self.epsilon,
            "p_fail": self.p_fail,
            "l1": self.l1,
            "num_iterations": self.num_iterations,
            "num_iterations_naive": self.num_iterations_naive,
        }


# Squared two-norm of the one-qubit coefficient vector: (3 - sqrt(2))/2.
_SINGLE_L2_SQUARED = 0.25 + (math.sqrt(2.0) - 1.0) ** 2 / 4.0 + 0.5


def plan(k: int, epsilon: float, p_fail: float) -> SamplingPlan:
    """Iteration counts: Hoeffding on the bounded estimator, and the naive
    union-bound-over-terms count kept for comparison."""
    if k < 0:
        raise PauliError("k must be >= 0")
    if not (0 < epsilon and 0 < p_fail < 1):
        raise PauliError("need epsilon > 0 and 0 < p_fail < 1")
    l1 = math.sqrt(2.0) ** k
    num = math.ceil(l1 * l1 * math.log(2.0 / p_fail) / (2.0 * epsilon * epsilon))
    c = 1.0 / math.sqrt(p_fail)
    naive = math.ceil(
        3.0**k * (c * c) * _SINGLE_L2_SQUARED**k / (epsilon * epsilon)
    )
    return SamplingPlan(k, epsilon, p_fail, l1, num, naive)


# Exact exponent rate of the lower bound: 2 * log2((sqrt(2) + 1)/2).
MAGIC_REDUCTION_RATE = 2.0 * math.log2((math.sqrt(2.0) + 1.0) / 2.0)
UPPER_RATE = 0.7374
LOWER_RATE = 0.5431


def bounds(k: int, epsilon: float) -> dict:
    """Published asymptotic iteration rates for k virtualized qubits."""
    return {
        "iterations_upper": 2.0 ** (UPPER_RATE * k) / (epsilon * epsilon),
        "iterations_lower": 2.0 ** (LOWER_RATE * k) / (epsilon * epsilon),
        "halving_virtual_count": MAGIC_REDUCTION_RATE * k,
    }


@dataclass
class EstimateResult:
    k: int
    epsilon: float
    p_fail: float
    seed: int
    num_iterations: int
    l1: float
    estimates: dict[int, float]  # output cbit -> estimated P(bit = 1)
    seconds: float = 0.0

    def to_report(self, timing: bool = False) -> dict:
        report = {
            "k": self.k,
            "epsilon": self.epsilon,
            "p_fail": self.p_fail,
            "seed": self.seed,
            "num_iterations": self.num_iterations,
            "l1": self.l1,
            "estimates": {str(c): v for c, v in sorted(self.estimates.items())},
        }
        if timing:
            report["timing"] = {"seconds_total": round(self.seconds, 6)}
        return report


def _iteration_batch(args):
    gadget, backend, seed, indices, cbits, k = args
    terms = tensor_terms(k)
    weights = np.array([abs(t.coeff) for t in terms])
    cumulative = np.cumsum(weights / weights.sum())
    compiled: dict[int, _CompiledGadget] = {}
    out = []
    for i in indices:
        rng = shot_rng(seed, i)
        term_index = int(np.searchsorted(cumulative, rng.random(), side="right"))
        term_index = min(term_index, len(terms) - 1)
        if term_index not in compiled:
            compiled[term_index] = _CompiledGadget(
                gadget, terms[term_index].generators
            )
        result = _run_shot(compiled[term_index], backend, rng)
        sign = 1.0 if terms[term_index].coeff >= 0 else -1.0
        out.append((sign, tuple(result.cbit_values[c] for c in cbits)))
    return out


def estimate(
    gadget: GadgetizedCircuit,
    k: int,
    epsilon: float,
    p_fail: float,
    seed: int,
    output_cbits=None,
    backend: Backend | None = None,
    workers: int | None = None,
) -> EstimateResult:
    """Estimate P(output bit = 1) for each requested cbit, virtualizing the
    first k magic qubits.  All bits share the same iterations, so the cost
    does not scale with how many are requested."""
    if k > gadget.num_magic:
        raise PauliError(f"k = {k} exceeds the {gadget.num_magic} magic qubits")
    if backend is None:
        backend = StatevectorBackend()
    if workers is None:
        workers = default_workers()
    cbits = tuple(output_cbits) if output_cbits is not None else gadget.output_cbits
    if not cbits:
        raise PauliError("no output cbits to estimate")
    the_plan = plan(k, epsilon, p_fail)
    n = the_plan.num_iterations
    l1 = the_plan.l1

    started = time.perf_counter()
    rows = []
    if workers > 1 and n > 1:
        chunk = max(1, (n + workers - 1) // workers)
        batches = [
            (gadget, backend, seed, range(lo, min(lo + chunk, n)), cbits, k)
            for lo in range(0, n, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_iteration_batch, batches):
                rows.extend(part)
    else:
        rows = _iteration_batch((gadget, backend, seed, range(n), cbits, k))
    seconds = time.perf_counter() - started

    estimates = {}
    for pos, c in enumerate(cbits):
        total = 0.0
        for sign, bits in rows:
            y = bits[pos]
            total += 0.5 - 0.5 * sign * ((-1.0) ** y) * l1
        estimates[c] = total / n
    return EstimateResult(
        k=k,
        epsilon=epsilon,
        p_fail=p_fail,
        seed=seed,
        num_iterations=n,
        l1=l1,
        estimates=estimates,
        seconds=seconds,
    )
