"""Circuits, a line-oriented text format, and benchmark circuit generators.

Text format (keywords are case-insensitive, ``#`` starts a comment)::

    qubits 3
    h 0
    cnot 0 1
    tof 0 1 2
    crz 1 0 pi/2
    measure 2

Angles are written ``pi/m``, ``-pi/m`` or as a decimal number of radians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "ARITY",
    "AngleError",
    "ArityError",
    "Circuit",
    "CircuitParseError",
    "Gate",
    "QubitRangeError",
    "UnknownGateError",
    "classical_eval",
    "cuccaro_layout",
    "gen_cuccaro",
    "gen_qft",
    "gen_random_stabilizer",
    "gen_toffoli_decomposed",
    "parse",
    "random_circuit",
    "read",
    "substitute_toffoli",
    "write",
]

ARITY = {
    "H": 1, "P": 1, "PDG": 1, "X": 1, "Y": 1, "Z": 1, "T": 1, "TDG": 1, "MEASURE": 1,
    "CNOT": 2, "CRZ": 2, "TOF": 3,
}  # fmt: skip


class CircuitParseError(ValueError):
    """Base class for text-format errors; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownGateError(CircuitParseError):
    pass


class ArityError(CircuitParseError):
    pass


class QubitRangeError(CircuitParseError):
    pass


class AngleError(CircuitParseError):
    pass


@dataclass(frozen=True)
class Gate:
    """One circuit operation.

    Attributes
    ----------
    kind : str
        Upper-case gate name, a key of :data:`ARITY`.
    qubits : tuple of int
        Operands; ``(control, target)`` for CNOT and CRZ, ``(c1, c2, t)`` for TOF.
    angle : float or None
        Phase in radians for CRZ.
    """

    kind: str
    qubits: tuple
    angle: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if kind not in ARITY:
            raise ValueError(f"unknown gate {self.kind!r}")
        if len(self.qubits) != ARITY[kind]:
            raise ValueError(f"{kind} takes {ARITY[kind]} qubit(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{kind} operands must be distinct")
        if (kind == "CRZ") != (self.angle is not None):
            raise ValueError("an angle is required for CRZ and only for CRZ")


@dataclass
class Circuit:
    """A qubit count and an ordered gate list."""

    n: int
    gates: list

    def __post_init__(self):
        self.gates = list(self.gates)
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} out of range for {self.n} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def count(self, *kinds: str) -> int:
        kinds = {k.upper() for k in kinds}
        return sum(1 for g in self.gates if g.kind in kinds)

    def without_measurements(self) -> Circuit:
        return Circuit(self.n, [g for g in self.gates if g.kind != "MEASURE"])


# ------------------------------------------------------------------ text I/O
_ANGLE_PI = re.compile(r"^(-?)pi/(\d+)$", re.IGNORECASE)
_ANGLE_NUM = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _parse_angle(tok: str, line: int, col: int) -> float:
    m = _ANGLE_PI.match(tok)
    if m:
        denom = int(m.group(2))
        if denom == 0:
            raise AngleError(f"zero denominator in angle {tok!r}", line, col)
        return (-1 if m.group(1) else 1) * math.pi / denom
    if _ANGLE_NUM.match(tok):
        return float(tok)
    raise AngleError(f"malformed angle {tok!r}", line, col)


def _format_angle(angle: float) -> str:
    if angle != 0:
        denom = round(math.pi / abs(angle))
        if denom >= 1 and math.pi / denom == abs(angle):
            return f"{'-' if angle < 0 else ''}pi/{denom}"
    return repr(float(angle))


def _tokens(text: str):
    """Yield ``(line_no, [(col, token), ...])`` for non-blank lines."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if toks:
            yield line_no, toks


def parse(text: str) -> Circuit:
    """Parse the text format; raises a :class:`CircuitParseError` subclass."""
    n = None
    gates = []
    for line_no, toks in _tokens(text):
        col, word = toks[0]
        word = word.upper()
        if n is None:
            if word != "QUBITS" or len(toks) != 2 or not toks[1][1].isdigit():
                raise CircuitParseError("expected 'qubits <n>' header", line_no, col)
            n = int(toks[1][1])
            continue
        if word not in ARITY:
            raise UnknownGateError(f"unknown gate {toks[0][1]!r}", line_no, col)
        want = ARITY[word] + (1 if word == "CRZ" else 0)
        if len(toks) - 1 != want:
            raise ArityError(f"{word.lower()} expects {want} operand(s), got {len(toks) - 1}", line_no, col)
        qubits = []
        for qcol, tok in toks[1 : 1 + ARITY[word]]:
            if not tok.isdigit():
                raise QubitRangeError(f"bad qubit index {tok!r}", line_no, qcol)
            q = int(tok)
            if q >= n:
                raise QubitRangeError(f"qubit {q} out of range for {n} qubits", line_no, qcol)
            qubits.append(q)
        if len(set(qubits)) != len(qubits):
            raise ArityError(f"{word.lower()} operands must be distinct", line_no, col)
        angle = _parse_angle(toks[-1][1], line_no, toks[-1][0]) if word == "CRZ" else None
        gates.append(Gate(word, tuple(qubits), angle))
    if n is None:
        raise CircuitParseError("empty circuit: missing 'qubits <n>' header", 1, 1)
    return Circuit(n, gates)


def read(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def write(circuit: Circuit) -> str:
    """Render a circuit in the text format; ``parse(write(c)) == c``."""
    lines = [f"qubits {circuit.n}"]
    for g in circuit.gates:
        parts = [g.kind.lower(), *map(str, g.qubits)]
        if g.kind == "CRZ":
            parts.append(_format_angle(g.angle))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- generators
def gen_random_stabilizer(n: int, beta: float, seed=None, rng: np.random.Generator | None = None) -> Circuit:
    """``ceil(beta * ceil(n log2 n))`` random H/P/CNOT gates, then measure every qubit.

    Gate kinds are uniform over the three; operands are uniform, with CNOT
    operands distinct.
    """
    if n < 2:
        raise ValueError("random stabilizer circuits need n >= 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    rng = rng if rng is not None else np.random.default_rng(seed)
    count = math.ceil(Fraction(repr(float(beta))) * math.ceil(n * math.log2(n)))
    gates = []
    for _ in range(count):
        kind = ("CNOT", "P", "H")[int(rng.integers(3))]
        if kind == "CNOT":
            c = int(rng.integers(n))
            t = int(rng.integers(n - 1))
            t += t >= c
            gates.append(Gate("CNOT", (c, t)))
        else:
            gates.append(Gate(kind, (int(rng.integers(n)),)))
    gates.extend(Gate("MEASURE", (q,)) for q in range(n))
    return Circuit(n, gates)


def cuccaro_layout(n: int) -> dict:
    """Qubit roles of :func:`gen_cuccaro`: ancilla 0, a_i = 1 + 2i, b_i = 2 + 2i,
    carry 2n + 1 (bit 0 is the least significant)."""
    return {
        "ancilla": 0,
        "a": [1 + 2 * i for i in range(n)],
        "b": [2 + 2 * i for i in range(n)],
        "carry": 2 * n + 1,
    }


def gen_cuccaro(n: int) -> Circuit:
    """Ripple-carry adder on ``2(n + 1)`` qubits writing ``a + b`` into ``b``.

    Built from majority (MAJ) and unmajority-and-add (UMA) blocks; the top
    carry lands on the carry qubit and the ancilla returns to 0.
    """
    if n < 1:
        raise ValueError("adder width must be at least 1")
    lay = cuccaro_layout(n)
    a, b, z = lay["a"], lay["b"], lay["carry"]
    gates = []

    def maj(c, y, x):
        gates.extend([Gate("CNOT", (x, y)), Gate("CNOT", (x, c)), Gate("TOF", (c, y, x))])

    def uma(c, y, x):
        gates.extend([Gate("TOF", (c, y, x)), Gate("CNOT", (x, c)), Gate("CNOT", (c, y))])

    carries = [lay["ancilla"]] + a[:-1]
    for i in range(n):
        maj(carries[i], b[i], a[i])
    gates.append(Gate("CNOT", (a[-1], z)))
    for i in reversed(range(n)):
        uma(carries[i], b[i], a[i])
    return Circuit(2 * n + 2, gates)


def gen_qft(n: int) -> Circuit:
    """Quantum Fourier transform without the final qubit reversal.

    Qubit ``i`` gets one H followed by controlled phases ``pi / 2**k`` from
    every later qubit ``i + k``; ``n (n + 1) / 2`` gates in total.
    """
    if n < 1:
        raise ValueError("QFT width must be at least 1")
    gates = []
    for i in range(n):
        gates.append(Gate("H", (i,)))
        for j in range(i + 1, n):
            gates.append(Gate("CRZ", (j, i), math.pi / 2 ** (j - i)))
    return Circuit(n, gates)


def gen_toffoli_decomposed(c1: int = 0, c2: int = 1, t: int = 2) -> list[Gate]:
    """Seven-T Toffoli decomposition over H, T, TDG and CNOT."""
    if len({c1, c2, t}) != 3:
        raise ValueError("Toffoli operands must be distinct")
    return [
        Gate("H", (t,)),
        Gate("CNOT", (c2, t)),
        Gate("TDG", (t,)),
        Gate("CNOT", (c1, t)),
        Gate("T", (t,)),
        Gate("CNOT", (c2, t)),
        Gate("TDG", (t,)),
        Gate("CNOT", (c1, t)),
        Gate("T", (c2,)),
        Gate("T", (t,)),
        Gate("H", (t,)),
        Gate("CNOT", (c1, c2)),
        Gate("T", (c1,)),
        Gate("TDG", (c2,)),
        Gate("CNOT", (c1, c2)),
    ]


def substitute_toffoli(circuit: Circuit) -> Circuit:
    """Replace every TOF gate by its seven-T decomposition."""
    gates = []
    for g in circuit.gates:
        if g.kind == "TOF":
            gates.extend(gen_toffoli_decomposed(*g.qubits))
        else:
            gates.append(g)
    return Circuit(circuit.n, gates)


def classical_eval(circuit: Circuit, bits: list[int]) -> list[int]:
    """Run a circuit of X, CNOT and TOF gates on a classical bit list."""
    bits = list(bits)
    for g in circuit.gates:
        q = g.qubits
        if g.kind == "X":
            bits[q[0]] ^= 1
        elif g.kind == "CNOT":
            bits[q[1]] ^= bits[q[0]]
        elif g.kind == "TOF":
            bits[q[2]] ^= bits[q[0]] & bits[q[1]]
        else:
            raise ValueError(f"{g.kind} is not a classical reversible gate")
    return bits


def random_circuit(
    n: int,
    length: int,
    rng: np.random.Generator,
    kinds=("H", "P", "PDG", "X", "Y", "Z", "CNOT", "TOF", "CRZ", "T", "TDG"),
    angles=(math.pi / 2, math.pi / 4, math.pi / 8),
) -> Circuit:
    """Uniformly random gates over ``kinds`` with legal distinct operands."""
    usable = [k for k in kinds if ARITY[k] <= n]
    gates = []
    for _ in range(length):
        kind = usable[int(rng.integers(len(usable)))]
        qubits = tuple(int(q) for q in rng.choice(n, ARITY[kind], replace=False))
        angle = float(angles[int(rng.integers(len(angles)))]) if kind == "CRZ" else None
        gates.append(Gate(kind, qubits, angle))
    return Circuit(n, gates)
