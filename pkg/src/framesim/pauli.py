"""Pauli-group elements stored as two bit planes plus a phase exponent.

An n-qubit operator is ``i**phase * L_0 (x) L_1 (x) ... (x) L_{n-1}`` where each
literal ``L_j`` is encoded by bit ``j`` of the X plane and bit ``j`` of the Z
plane: 00 = I, 01 = Z, 10 = X, 11 = Y. Python integers serve as bitsets, so
operators of any width multiply with a handful of word-parallel operations.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "CLIFFORD_KINDS",
    "PauliOperator",
    "SizeMismatchError",
    "commutes",
    "conjugate_single",
    "multiply",
    "product_phase",
]

CLIFFORD_KINDS = frozenset({"H", "P", "PDG", "X", "Y", "Z", "CNOT"})

_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LITERAL = "IZXY"  # indexed by 2*x + z


class SizeMismatchError(ValueError):
    """Raised when two operators act on different numbers of qubits."""


def product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Phase exponent (mod 4) contributed by multiplying two literal strings.

    Sums the per-qubit entries of the single-qubit multiplication table,
    e.g. X*Y = iZ contributes +1 and X*Z = -iY contributes -1.
    """
    plus = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2)
    minus = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2)
    return (plus.bit_count() - minus.bit_count()) & 3


@dataclass(frozen=True)
class PauliOperator:
    """An element of the n-qubit Pauli group.

    Attributes
    ----------
    n : int
        Qubit count.
    x, z : int
        Bit planes; bit ``j`` describes qubit ``j``.
    phase : int
        Exponent ``k`` of the scalar ``i**k``, always reduced mod 4.
    """

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bit planes exceed the qubit count")
        object.__setattr__(self, "phase", self.phase & 3)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, literal: str, phase: int = 0) -> PauliOperator:
        """Operator with one non-identity literal at ``qubit``."""
        code = _LITERAL.index(literal.upper())
        bit = 1 << qubit
        return cls(n, bit if code & 2 else 0, bit if code & 1 else 0, phase)

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        """Parse strings such as ``"-iIYXI"`` or ``"XZ"``."""
        text = text.strip().replace("−", "-")
        phase = 0
        if text[:1] in "+-":
            phase = 2 if text[0] == "-" else 0
            text = text[1:]
        if text[:1] == "i":
            phase += 1
            text = text[1:]
        x = z = 0
        for j, ch in enumerate(text):
            code = _LITERAL.find(ch.upper())
            if code < 0:
                raise ValueError(f"bad Pauli literal {ch!r}")
            if code & 2:
                x |= 1 << j
            if code & 1:
                z |= 1 << j
        return cls(len(text), x, z, phase)

    def literal(self, j: int) -> str:
        return _LITERAL[2 * ((self.x >> j) & 1) + ((self.z >> j) & 1)]

    @property
    def literals(self) -> str:
        return "".join(self.literal(j) for j in range(self.n))

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def with_phase(self, phase: int) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, phase)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __neg__(self) -> PauliOperator:
        return self.with_phase(self.phase + 2)

    def __str__(self) -> str:
        return _PREFIX[self.phase] + self.literals


def _check_sizes(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise SizeMismatchError(f"operators act on {p.n} and {q.n} qubits")


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Return the product ``p * q`` with its phase tracked exactly."""
    _check_sizes(p, q)
    phase = p.phase + q.phase + product_phase(p.x, p.z, q.x, q.z)
    return PauliOperator(p.n, p.x ^ q.x, p.z ^ q.z, phase)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    """True iff ``p`` and ``q`` commute (even symplectic product)."""
    _check_sizes(p, q)
    return ((p.x & q.z) ^ (p.z & q.x)).bit_count() % 2 == 0


def _check_qubits(n: int, qubits) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")


def conjugate_single(p: PauliOperator, gate: str, qubits) -> PauliOperator:
    """Return ``U p U^dagger`` for a Clifford or Pauli gate ``U``.

    Parameters
    ----------
    p : PauliOperator
    gate : str
        One of ``H, P, PDG, X, Y, Z, CNOT`` (case-insensitive).
    qubits : sequence of int
        One index, or ``(control, target)`` for CNOT.
    """
    kind = gate.upper()
    qubits = tuple(qubits)
    _check_qubits(p.n, qubits)
    x, z, phase = p.x, p.z, p.phase
    if kind == "CNOT":
        c, t = qubits
        if c == t:
            raise ValueError("CNOT needs distinct qubits")
        xc, zc, xt, zt = (x >> c) & 1, (z >> c) & 1, (x >> t) & 1, (z >> t) & 1
        x ^= xc << t
        z ^= zt << c
        # X_c Z_t picks up a sign unless exactly one of X_t, Z_c is present
        flip = xc & zt & (xt ^ zc ^ 1)
        return PauliOperator(p.n, x, z, phase + 2 * flip)
    (q,) = qubits
    xq, zq = (x >> q) & 1, (z >> q) & 1
    if kind == "H":
        flip = xq & zq
        x = (x & ~(1 << q)) | (zq << q)
        z = (z & ~(1 << q)) | (xq << q)
    elif kind == "P":
        flip = xq & zq
        z ^= xq << q
    elif kind == "PDG":
        flip = xq & (zq ^ 1)
        z ^= xq << q
    elif kind == "X":
        flip = zq
    elif kind == "Y":
        flip = xq ^ zq
    elif kind == "Z":
        flip = xq
    else:
        raise ValueError(f"not a Clifford gate: {gate!r}")
    return PauliOperator(p.n, x, z, phase + 2 * flip)
