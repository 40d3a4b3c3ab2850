"""Command-line entry point.

``framesim run`` simulates a circuit file and ``framesim bench`` generates and
runs benchmark families. Both write one JSON report (stdout, or the file
given by ``--json``) and a short human-readable summary on standard error.
The report omits wall-clock time unless ``--timing`` is passed, so equal
inputs and seeds give byte-identical reports for any worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dense
from .circuit import (
    Circuit,
    CircuitParseError,
    Gate,
    cuccaro_layout,
    gen_cuccaro,
    gen_qft,
    gen_random_stabilizer,
    read,
)
from .multiframe import CoalesceLimitError, default_workers, simulate

__all__ = ["EXIT_CODES", "bench_instances", "main", "parse_range", "run_circuit"]

MAX_DENSE = 20

EXIT_CODES = {
    "ok": 0,
    "usage": 2,
    "not_found": 3,
    "parse": 4,
    "capacity": 5,
    "mismatch": 6,
}

_EPILOG = """exit codes:
  0  success
  2  invalid arguments
  3  input file not found
  4  circuit parse error
  5  capacity exceeded (--verify/--amplitudes need n <= 20)
  6  verification mismatch against the dense oracle

environment:
  FRAMESIM_WORKERS  default worker thread count (1 if unset)
"""


class _Failure(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def parse_range(text: str) -> list[int]:
    """``"5"``, ``"2,4,8"`` or ``"4..12"`` to a list of ints."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def _amplitudes(vec: np.ndarray, n: int) -> list:
    idx = np.nonzero(np.abs(vec) > 1e-12)[0]
    return [[format(int(i), f"0{n}b"), float(vec[i].real), float(vec[i].imag)] for i in idx]


def run_circuit(
    circuit: Circuit,
    rng: np.random.Generator,
    workers: int,
    verify: bool = False,
    amplitudes: bool = False,
    single_frame: bool = False,
    timing: bool = False,
) -> dict:
    """Simulate one circuit and build its report entry."""
    if (verify or amplitudes) and circuit.n > MAX_DENSE:
        raise _Failure("capacity", f"--verify/--amplitudes need n <= {MAX_DENSE}, circuit has {circuit.n}")
    try:
        mf, stats = simulate(circuit, rng=rng, workers=workers, single_frame=single_frame)
    except CoalesceLimitError as exc:
        raise _Failure("capacity", str(exc)) from exc
    report = {"qubits": circuit.n, "gates": len(circuit), "stats": stats.to_dict(timing=timing)}
    if verify or amplitudes:
        vec = mf.state_vector()
    if amplitudes:
        report["amplitudes"] = _amplitudes(vec, circuit.n)
    if verify:
        ref, _ = dense.run(circuit, forced=stats.outcomes)
        report["verified"] = bool(dense.equal_up_to_global_phase(dense.DenseState(circuit.n, vec), ref))
    return report


def bench_instances(family: str, args, rng: np.random.Generator) -> list[tuple[dict, Circuit]]:
    """Benchmark circuits for one family, drawn from the run's generator."""
    sizes = parse_range(args.n)
    if any(n < 1 for n in sizes):
        raise ValueError("sizes must be positive")
    out = []
    if family == "random":
        for n in sizes:
            for beta in args.beta:
                for k in range(args.instances):
                    c = gen_random_stabilizer(n, beta, rng=rng)
                    out.append(({"n": n, "beta": beta, "instance": k}, c))
    elif family == "cuccaro":
        for n in sizes:
            c = gen_cuccaro(n)
            lay = cuccaro_layout(n)
            prep = [Gate("H", (q,)) for q in lay["a"] + lay["b"]]
            out.append(({"n": n}, Circuit(c.n, prep + c.gates)))
    elif family == "qft":
        for n in sizes:
            c = gen_qft(n)
            out.append(({"n": n}, Circuit(n, [Gate("X", (q,)) for q in range(n)] + c.gates)))
    else:
        raise ValueError(f"unknown family {family!r}")
    return out


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="framesim",
        description="Stabilizer-frame quantum circuit simulator.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0, help="64-bit seed for circuit generation and measurements")
        sp.add_argument("--workers", type=int, default=None, help="worker threads (default: FRAMESIM_WORKERS or 1)")
        sp.add_argument("--single-frame", action="store_true", help="disable coalescing")
        sp.add_argument("--amplitudes", action="store_true", help=f"include nonzero amplitudes (n <= {MAX_DENSE})")
        sp.add_argument("--json", metavar="OUT", help="write the report here instead of stdout")
        sp.add_argument("--timing", action="store_true", help="include runtime_ms in the report")

    r = sub.add_parser("run", help="simulate a circuit file", epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    r.add_argument("file")
    r.add_argument("--verify", action="store_true", help=f"compare with the dense oracle (n <= {MAX_DENSE})")
    common(r)

    b = sub.add_parser("bench", help="run a benchmark family", epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    b.add_argument("family", choices=["random", "cuccaro", "qft"])
    b.add_argument("--n", default="4", help='size, list or range such as "4..12"')
    b.add_argument("--beta", type=float, nargs="+", default=[0.6], help="gate density for the random family")
    b.add_argument("--instances", type=int, default=1, help="circuits per (n, beta) for the random family")
    b.add_argument("--verify", action="store_true", help=f"compare with the dense oracle (n <= {MAX_DENSE})")
    common(b)
    return p


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(label: str, entry: dict) -> str:
    st = entry["stats"]
    line = f"{label}: qubits={entry['qubits']} gates={entry['gates']} max_frames={st['max_frames']} max_states={st['max_states']}"
    if "runtime_ms" in st:
        line += f" runtime_ms={st['runtime_ms']:.1f}"
    if "verified" in entry:
        line += f" verified={entry['verified']}"
    return line


def _main(args) -> int:
    workers = default_workers() if args.workers is None else args.workers
    if workers < 1:
        raise _Failure("usage", "--workers must be positive")
    rng = np.random.default_rng(args.seed)
    opts = dict(
        workers=workers,
        verify=args.verify,
        amplitudes=args.amplitudes,
        single_frame=args.single_frame,
        timing=args.timing,
    )
    if args.command == "run":
        if not os.path.exists(args.file):
            raise _Failure("not_found", f"no such file: {args.file}")
        try:
            circuit = read(args.file)
        except CircuitParseError as exc:
            raise _Failure("parse", f"{args.file}: {exc}") from exc
        entry = run_circuit(circuit, rng, **opts)
        report = {"command": "run", "input": os.path.basename(args.file), "seed": args.seed, **entry}
        entries = [entry]
        print(_summary(args.file, entry) + f" workers={workers}", file=sys.stderr)
    else:
        try:
            instances = bench_instances(args.family, args, rng)
        except ValueError as exc:
            raise _Failure("usage", str(exc)) from exc
        entries = []
        for params, circuit in instances:
            entry = {**params, **run_circuit(circuit, rng, **opts)}
            entries.append(entry)
            print(_summary(f"{args.family} n={params['n']}", entry), file=sys.stderr)
        report = {"command": "bench", "family": args.family, "seed": args.seed, "instances": entries}
    _emit(report, args.json)
    if args.verify and not all(e["verified"] for e in entries):
        print("verification failed", file=sys.stderr)
        return EXIT_CODES["mismatch"]
    return EXIT_CODES["ok"]


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _main(args)
    except _Failure as exc:
        print(f"framesim: {exc}", file=sys.stderr)
        return EXIT_CODES[exc.code]


if __name__ == "__main__":
    sys.exit(main())
