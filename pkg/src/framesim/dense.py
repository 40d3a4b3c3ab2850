"""Brute-force state-vector simulator used as ground truth on small circuits.

Amplitudes live in a ``2**n`` complex array whose index has qubit 0 as the
most significant bit, so ``"01"`` (qubit 0 = 0, qubit 1 = 1) is index 1.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = [
    "MAX_QUBITS",
    "CapacityError",
    "DenseState",
    "apply",
    "equal_up_to_global_phase",
    "gate_matrix",
    "measure",
    "probability_one",
    "project",
    "run",
]

MAX_QUBITS = 24

_S2 = 1 / math.sqrt(2)
_FIXED = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128),
    "P": np.diag([1, 1j]).astype(np.complex128),
    "PDG": np.diag([1, -1j]).astype(np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.diag([1, -1]).astype(np.complex128),
    "T": np.diag([1, cmath.exp(1j * math.pi / 4)]),
    "TDG": np.diag([1, cmath.exp(-1j * math.pi / 4)]),
}
_CNOT = np.eye(4, dtype=np.complex128)[[0, 1, 3, 2]]
_TOF = np.eye(8, dtype=np.complex128)[[0, 1, 2, 3, 4, 5, 7, 6]]


class CapacityError(ValueError):
    """The dense representation would exceed the qubit cap."""


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Dense unitary for a gate; multi-qubit matrices use operand order as bit order."""
    kind = kind.upper()
    if kind in _FIXED:
        return _FIXED[kind]
    if kind == "CNOT":
        return _CNOT
    if kind == "TOF":
        return _TOF
    if kind == "CRZ":
        if angle is None:
            raise ValueError("CRZ needs an angle")
        return np.diag([1, 1, 1, cmath.exp(1j * angle)])
    raise ValueError(f"no dense matrix for gate {kind!r}")


def _unpack(gate):
    if isinstance(gate, tuple):
        kind, qubits, *rest = gate
        return kind.upper(), tuple(qubits), (rest[0] if rest else None)
    return gate.kind.upper(), tuple(gate.qubits), getattr(gate, "angle", None)


class DenseState:
    """Normalized ``n``-qubit state vector.

    Parameters
    ----------
    n : int
        Qubit count, at most :data:`MAX_QUBITS`.
    amps : array_like, optional
        Amplitudes; defaults to ``|0...0>``.
    """

    def __init__(self, n: int, amps=None):
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the dense cap of {MAX_QUBITS}")
        self.n = n
        if amps is None:
            amps = np.zeros(1 << n, dtype=np.complex128)
            amps[0] = 1
        self.amps = np.asarray(amps, dtype=np.complex128)
        if self.amps.shape != (1 << n,):
            raise ValueError("amplitude array has the wrong length")

    @classmethod
    def basis(cls, bits: str) -> DenseState:
        n = len(bits)
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the dense cap of {MAX_QUBITS}")
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[int(bits, 2) if bits else 0] = 1
        return cls(n, amps)

    def copy(self) -> DenseState:
        return DenseState(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def amplitude(self, bits: str) -> complex:
        return complex(self.amps[int(bits, 2) if bits else 0])

    def dump(self, tol: float = 1e-12) -> list[tuple[str, complex]]:
        """Nonzero amplitudes as ``(bitstring, amplitude)`` with qubit 0 first."""
        out = []
        for idx in np.nonzero(np.abs(self.amps) > tol)[0]:
            out.append((format(int(idx), f"0{self.n}b") if self.n else "", complex(self.amps[idx])))
        return out

    def __repr__(self) -> str:
        return f"DenseState(n={self.n})"


def apply(state: DenseState, gate) -> DenseState:
    """Return the state after one gate; ``gate`` is a Gate or ``(kind, qubits[, angle])``."""
    kind, qubits, angle = _unpack(gate)
    if kind == "MEASURE":
        raise ValueError("use measure() for measurement gates")
    n = state.n
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")
    if len(set(qubits)) != len(qubits):
        raise ValueError("gate operands must be distinct")
    k = len(qubits)
    mat = gate_matrix(kind, angle).reshape((2,) * (2 * k))
    psi = state.amps.reshape((2,) * n)
    out = np.tensordot(mat, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    out = np.moveaxis(out, list(range(k)), list(qubits))
    return DenseState(n, out.reshape(-1))


def probability_one(state: DenseState, q: int) -> float:
    psi = state.amps.reshape((2,) * state.n)
    return float(np.sum(np.abs(np.take(psi, 1, axis=q)) ** 2))


def project(state: DenseState, q: int, outcome: int) -> tuple[float, DenseState]:
    """Probability of ``outcome`` on qubit ``q`` and the renormalized post-state."""
    psi = state.amps.reshape((2,) * state.n).copy()
    idx = [slice(None)] * state.n
    idx[q] = 1 - outcome
    psi[tuple(idx)] = 0
    prob = float(np.sum(np.abs(psi) ** 2))
    if prob > 0:
        psi /= math.sqrt(prob)
    return prob, DenseState(state.n, psi.reshape(-1))


def measure(state: DenseState, q: int, rng: np.random.Generator) -> tuple[int, DenseState]:
    """Sample a computational-basis outcome on qubit ``q`` and collapse."""
    p1 = probability_one(state, q)
    outcome = int(rng.random() < p1)
    return outcome, project(state, q, outcome)[1]


def equal_up_to_global_phase(a: DenseState, b: DenseState, tol: float = 1e-9) -> bool:
    """True iff ``a`` equals ``c * b`` for a unit scalar ``c``.

    ``c`` is fixed by the largest-magnitude amplitude of ``b``.
    """
    if a.n != b.n:
        raise ValueError(f"states have {a.n} and {b.n} qubits")
    k = int(np.argmax(np.abs(b.amps)))
    if abs(b.amps[k]) == 0:
        return bool(np.max(np.abs(a.amps), initial=0) <= tol)
    c = a.amps[k] / b.amps[k]
    if abs(abs(c) - 1) > tol:
        return False
    c /= abs(c)
    return bool(np.max(np.abs(a.amps - c * b.amps)) <= tol)


def run(circuit, state: DenseState | None = None, rng=None, forced=None) -> tuple[DenseState, list[int]]:
    """Simulate a whole circuit.

    Measurements sample from ``rng`` unless ``forced`` supplies the outcomes
    in order, in which case the state is projected onto them.
    """
    state = state or DenseState(circuit.n)
    outcomes: list[int] = []
    forced = list(forced) if forced is not None else None
    for gate in circuit.gates:
        if gate.kind == "MEASURE":
            q = gate.qubits[0]
            if forced is not None:
                bit = forced[len(outcomes)]
                _, state = project(state, q, bit)
            else:
                bit, state = measure(state, q, rng)
            outcomes.append(bit)
        else:
            state = apply(state, gate)
    return state, outcomes

