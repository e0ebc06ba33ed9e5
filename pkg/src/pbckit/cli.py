"""Command line front end.

Subcommands: sample, hybrid, gen, emit, bounds.  All reports are JSON with
sorted keys; under a fixed seed the bytes are identical from run to run,
so timing is only included when --timing is passed.

Exit codes: 0 success, 2 usage, 3 invalid input, 4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import boundary_lower_bound, gen_hsc, gen_rqc
from .circuit import metrics as circuit_metrics, parse_circuit
from .emit import emit, resource_bounds
from .engine import sample
from .errors import CapacityError, PbcError
from .gadgets import gadgetize
from .hybrid import bounds as hybrid_bounds, estimate, plan
from .pauli import PauliOperator
from .statevector import DummyBackend, StatevectorBackend

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_CAPACITY = 4


def _dump_json(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_circuit(path: str):
    return parse_circuit(Path(path).read_text())


def _backend_from_name(name: str):
    return StatevectorBackend() if name == "statevector" else DummyBackend()


def _cmd_sample(args) -> int:
    gadget = gadgetize(_load_circuit(args.circuit))
    result = sample(
        gadget,
        shots=args.shots,
        seed=args.seed,
        backend=_backend_from_name(args.backend),
        scheme=args.scheme,
        workers=args.workers,
    )
    if args.csv:
        rows = ["bits,count"]
        rows += [f"{bits},{count}" for bits, count in sorted(result.histogram.items())]
        Path(args.csv).write_text("\n".join(rows) + "\n")
    _dump_json(result.to_report(timing=args.timing), args.out)
    return EXIT_OK


def _cmd_hybrid(args) -> int:
    if args.plan_only:
        _dump_json(plan(args.virtual, args.epsilon, args.p_fail).to_report(), args.out)
        return EXIT_OK
    gadget = gadgetize(_load_circuit(args.circuit))
    cbits = None
    if args.cbits:
        cbits = tuple(int(c) for c in args.cbits.split(","))
    result = estimate(
        gadget,
        k=args.virtual,
        epsilon=args.epsilon,
        p_fail=args.p_fail,
        seed=args.seed,
        output_cbits=cbits,
        workers=args.workers,
    )
    _dump_json(result.to_report(timing=args.timing), args.out)
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.family == "hsc":
        circuit, hidden = gen_hsc(
            args.qubits, args.ccz, args.zcz, args.seed, hidden=args.hidden
        )
        extra = {"hidden": hidden}
    else:
        circuit = gen_rqc(args.rows, args.cols, args.cycles, args.t_count, args.seed)
        extra = {}
    _write_text(circuit.to_text(), args.out)
    if args.metrics:
        _dump_json({**circuit_metrics(circuit), **extra}, args.metrics)
    return EXIT_OK


def _cmd_emit(args) -> int:
    lines = Path(args.paulis).read_text().splitlines()
    labels = [line.strip() for line in lines if line.strip() and not line.startswith("#")]
    operators = [PauliOperator.from_label(label) for label in labels]
    if not operators and args.width is None:
        raise PbcError("empty sequence needs an explicit --width")
    width = args.width if args.width is not None else operators[0].width
    emission = emit(
        operators,
        width,
        args.scheme,
        elide_uncompute=args.elide,
        ghz_prep=args.ghz_prep,
    )
    _write_text(emission.circuit.to_text(), args.out)
    if args.sidecar:
        _dump_json(emission.sidecar(), args.sidecar)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    report: dict = {}
    if args.t is not None:
        count_1q, count_cnot, depth_bound = resource_bounds(args.t)
        report["aux_scheme"] = {
            "t": args.t,
            "count_1q": count_1q,
            "count_cnot": count_cnot,
            "depth": depth_bound,
        }
    if args.virtual is not None:
        report["hybrid"] = {
            "k": args.virtual,
            "epsilon": args.epsilon,
            **hybrid_bounds(args.virtual, args.epsilon),
        }
    if args.cycles is not None:
        report["grid_crossover"] = {
            "cycles": args.cycles,
            "lower_bound": boundary_lower_bound(args.cycles),
        }
    if not report:
        raise PbcError("nothing requested; pass --t, --virtual, or --cycles")
    _dump_json(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbckit",
        description="Compile Clifford+T circuits to adaptive Pauli measurements.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="compile a circuit and draw output samples")
    p.add_argument("circuit", help="circuit file in the package text format")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("statevector", "dummy"), default="statevector")
    p.add_argument("--scheme", choices=("aux", "cascade", "ghz"), default=None,
                   help="also report emitted-circuit stats under this scheme")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="report file (default stdout)")
    p.add_argument("--csv", default=None, help="also write the histogram as csv")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("hybrid", help="estimate output-bit probabilities with virtualized magic qubits")
    p.add_argument("circuit", nargs="?", help="circuit file (not needed with --plan-only)")
    p.add_argument("--virtual", type=int, required=True, help="virtualized magic qubits k")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--p-fail", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cbits", default=None, help="comma list of output cbits (default all)")
    p.add_argument("--plan-only", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=_cmd_hybrid)

    p = sub.add_parser("gen", help="generate a benchmark circuit")
    gen_sub = p.add_subparsers(dest="family", required=True)

    g = gen_sub.add_parser("hsc", help="hidden-shift instance (self-checking)")
    g.add_argument("--qubits", type=int, required=True)
    g.add_argument("--ccz", type=int, required=True)
    g.add_argument("--zcz", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--hidden", default=None, help="fix the hidden bitstring")
    g.add_argument("--out", default=None)
    g.add_argument("--metrics", default=None, help="write metrics json here")
    g.set_defaults(func=_cmd_gen)

    g = gen_sub.add_parser("rqc", help="random grid instance")
    g.add_argument("--rows", type=int, default=5)
    g.add_argument("--cols", type=int, default=5)
    g.add_argument("--cycles", type=int, required=True)
    g.add_argument("--t-count", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.add_argument("--metrics", default=None)
    g.set_defaults(func=_cmd_gen)

    p = sub.add_parser("emit", help="emit a measurement circuit for a Pauli sequence")
    p.add_argument("paulis", help="file with one Pauli label per line")
    p.add_argument("--scheme", choices=("aux", "cascade", "ghz"), default="aux")
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--elide", action="store_true", help="cascade only: skip uncompute blocks")
    p.add_argument("--ghz-prep", choices=("tree", "constdepth"), default="tree")
    p.add_argument("--out", default=None)
    p.add_argument("--sidecar", default=None, help="write outcome bookkeeping json here")
    p.set_defaults(func=_cmd_emit)

    p = sub.add_parser("bounds", help="print resource bounds")
    p.add_argument("--t", type=int, default=None, help="aux-scheme bounds for t operators")
    p.add_argument("--virtual", type=int, default=None, help="hybrid bounds for k")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--cycles", type=int, default=None, help="grid crossover bound")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "hybrid" and not args.plan_only and args.circuit is None:
        parser.error("hybrid needs a circuit file unless --plan-only is given")
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (PbcError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
