"""Stabilizer frames: one stabilizer matrix shared by many signed copies.

A frame stores a :class:`~framesim.tableau.StabilizerMatrix` together with
``k`` distinct sign vectors. Each sign vector picks one state of the
orthonormal basis spanned by sign changes of the matrix rows, and each carries
a complex amplitude, so the frame represents ``sum_j a_j |psi_j>``.

Entries are stored column-wise as numpy arrays: ``bits`` is a ``(k, n)`` uint8
array of signs (1 means the row is negated) and ``amps`` a ``(k,)`` complex
array. The rows are kept sorted lexicographically with column 0 as the most
significant key, which makes iteration order (and therefore every report)
independent of how work was split between threads.

Global phases follow the canonical convention of
:meth:`StabilizerMatrix.amplitudes`: every basis state's anchor amplitude is
real and positive. When a gate maps ``|psi_j>`` to ``c * |psi'_j>`` the factor
``c`` is read off at the new anchor, where ``|psi'_j>`` has a known value, by
pulling the anchor back through the gate and evaluating the old state there.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ._bits import bits_to_ints, int_to_bits
from .dense import gate_matrix
from .tableau import StabilizerMatrix

__all__ = ["PRUNE_TOL", "Frame"]

PRUNE_TOL = 1e-12
# Entry counts above this are split across workers when a pool is supplied.
CHUNK_THRESHOLD = 4096


def _sort_order(bits: np.ndarray) -> np.ndarray:
    if bits.shape[0] < 2 or bits.shape[1] == 0:
        return np.arange(bits.shape[0])
    return np.lexsort(bits.T[::-1])


def _chunks(k: int, pool) -> list[slice]:
    if pool is None or k <= CHUNK_THRESHOLD:
        return [slice(0, k)]
    parts = min(pool._max_workers, -(-k // CHUNK_THRESHOLD))
    edges = np.linspace(0, k, parts + 1).astype(int)
    return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def _map(fn, k: int, pool):
    """Run ``fn(slice)`` over entry ranges and concatenate the results in order."""
    parts = _chunks(k, pool)
    if len(parts) == 1:
        return fn(parts[0])
    results = list(pool.map(fn, parts))
    if isinstance(results[0], tuple):
        return tuple(np.concatenate(col) for col in zip(*results))
    return np.concatenate(results)


class Frame:
    """A stabilizer matrix with a set of (sign vector, amplitude) entries.

    Parameters
    ----------
    matrix : StabilizerMatrix
    bits : ndarray of uint8, shape (k, n)
        Sign vectors; bit ``i`` set means row ``i`` is negated.
    amps : ndarray of complex, shape (k,)
    normalize : bool
        Combine duplicate sign vectors, prune negligible amplitudes and sort.
    """

    def __init__(self, matrix: StabilizerMatrix, bits, amps, normalize: bool = True):
        self.matrix = matrix
        self.bits = np.asarray(bits, dtype=np.uint8).reshape(-1, matrix.n)
        self.amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if self.bits.shape[0] != self.amps.shape[0]:
            raise ValueError("bits and amplitudes disagree on the entry count")
        if normalize:
            self._normalize()

    @classmethod
    def basis(cls, bits: str = "") -> Frame:
        """Frame holding one computational-basis state with amplitude 1."""
        m = StabilizerMatrix.basis(bits)
        return cls(m, int_to_bits(m.signs, m.n)[None, :], [1.0], normalize=False)

    @classmethod
    def from_matrix(cls, matrix: StabilizerMatrix, amp: complex = 1.0) -> Frame:
        matrix.to_row_echelon()
        return cls(matrix, int_to_bits(matrix.signs, matrix.n)[None, :], [amp], normalize=False)

    # ------------------------------------------------------------------ basics
    @property
    def n(self) -> int:
        return self.matrix.n

    def __len__(self) -> int:
        return self.amps.shape[0]

    def copy(self) -> Frame:
        return Frame(self.matrix.copy(), self.bits.copy(), self.amps.copy(), normalize=False)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def sign_ints(self) -> list[int]:
        return bits_to_ints(self.bits) if len(self) else []

    def __repr__(self) -> str:
        return f"Frame(n={self.n}, entries={len(self)})"

    def dump(self) -> str:
        """Matrix rows, then one ``sign-bits re,im`` line per entry."""
        lines = [self.matrix.dump(), "--"]
        for row, a in zip(self.bits, self.amps):
            lines.append(f"{''.join(map(str, row))} {float(a.real)!r},{float(a.imag)!r}")
        return "\n".join(lines)

    def _normalize(self) -> None:
        """Merge equal sign vectors, prune zeros, restore sorted order."""
        k = len(self)
        if k == 0:
            return
        if k > 1 and self.n > 0:
            uniq, inverse = np.unique(self.bits, axis=0, return_inverse=True)
            inverse = inverse.reshape(-1)
            if uniq.shape[0] < k:
                re = np.bincount(inverse, weights=self.amps.real, minlength=uniq.shape[0])
                im = np.bincount(inverse, weights=self.amps.imag, minlength=uniq.shape[0])
                self.bits, self.amps = uniq, re + 1j * im
            else:
                order = _sort_order(self.bits)
                self.bits, self.amps = self.bits[order], self.amps[order]
        elif k > 1:
            self.amps = np.array([self.amps.sum()])
            self.bits = self.bits[:1]
        keep = np.abs(self.amps) >= PRUNE_TOL
        if not keep.all():
            self.bits, self.amps = self.bits[keep], self.amps[keep]

    def ensure_echelon(self) -> None:
        """Restore echelon form after lazy updates, replaying the signs."""
        memo = self.matrix.to_row_echelon()
        if memo.ops:
            self.bits = memo.apply(self.bits)

    # --------------------------------------------------------------- reading
    def state_vector(self) -> np.ndarray:
        """Dense ``sum_j a_j |psi_j>`` (qubit 0 is the most significant bit)."""
        self.ensure_echelon()
        vec = np.zeros(1 << self.n, dtype=np.complex128)
        for row, a in zip(self.bits, self.amps):
            vec += a * self.matrix.state_vector(row)
        return vec

    def weight_one(self, q: int) -> float:
        """``sum_j |a_j|^2 p_j(1)`` for a computational measurement of ``q``."""
        self.ensure_echelon()
        w = np.abs(self.amps) ** 2
        if self.matrix.is_random(q):
            return 0.5 * float(w.sum())
        u = self.matrix.z_row(q)
        return float(w[self.bits[:, u] == 1].sum())

    # ------------------------------------------------------------- rotation
    def rotate(self, gate: str, qubits, track_phase: bool = True, pool=None) -> None:
        """Apply a Clifford or Pauli gate to every entry.

        With ``track_phase=False`` the amplitudes are left untouched and echelon
        repair is deferred; only valid when the global phase of the whole
        state is unobservable (a lone entry).
        """
        kind = gate.upper()
        qubits = tuple(qubits)
        if not track_phase:
            memo = self.matrix.conjugate(kind, qubits, repair=False)
            if memo.ops:
                self.bits = memo.apply(self.bits)
            return
        self.ensure_echelon()
        old = self.matrix.copy()
        memo = self.matrix.conjugate(kind, qubits)
        new = self.matrix
        k = len(self)

        def work(part):
            ob = self.bits[part]
            nb = memo.apply(ob)
            return nb, self.amps[part] * _pullback(old, new, ob, nb, kind, qubits)

        self.bits, self.amps = _map(work, k, pool)
        order = _sort_order(self.bits)
        self.bits, self.amps = self.bits[order], self.amps[order]

    # ------------------------------------------------------------- cofactor
    def cofactor(self, q: int, pool=None) -> bool:
        """Split every entry into its ``q = 0`` and ``q = 1`` components.

        Returns False (and changes nothing) when ``q`` is already
        deterministic. Otherwise the matrix gains a ``+-Z_q`` row and each
        entry is replaced by its two cofactors, which share one memo.
        """
        if not 0 <= q < self.n:
            raise IndexError(f"qubit {q} out of range for {self.n} qubits")
        self.ensure_echelon()
        if not self.matrix.is_random(q):
            return False
        old = self.matrix.copy()
        memo = self.matrix.collapse(q, 0)
        new = self.matrix
        scale = 2.0 ** (new.x_count / 2)

        def work(part):
            ob = self.bits[part]
            nb = np.concatenate([memo.apply(ob, 0), memo.apply(ob, 1)])
            ob2 = np.concatenate([ob, ob])
            vals = old.amplitudes(ob2, new.anchors(nb)) * scale
            return nb, np.concatenate([self.amps[part], self.amps[part]]) * vals

        self.bits, self.amps = _map(work, len(self), pool)
        self._normalize()
        return True

    def restrict(self, q: int, outcome: int) -> None:
        """Keep only entries consistent with qubit ``q`` reading ``outcome``."""
        self.ensure_echelon()
        if self.matrix.is_random(q):
            raise ValueError(f"qubit {q} must be cofactored before restriction")
        u = self.matrix.z_row(q)
        keep = self.bits[:, u] == outcome
        self.bits, self.amps = self.bits[keep], self.amps[keep]

    def class_mask(self, qubits) -> np.ndarray:
        """Entries whose listed (deterministic) qubits all read 1."""
        sel = np.ones(len(self), dtype=bool)
        for q in qubits:
            sel &= self.bits[:, self.matrix.z_row(q)] == 1
        return sel

    # ---------------------------------------------------- non-Clifford gates
    def apply_toffoli(self, c1: int, c2: int, t: int, pool=None) -> None:
        """Flip qubit ``t`` in the cofactor where both controls read 1."""
        if len({c1, c2, t}) != 3:
            raise ValueError("Toffoli operands must be distinct")
        self.cofactor(c1, pool)
        self.cofactor(c2, pool)
        sel = self.class_mask((c1, c2))
        if not sel.any():
            return
        m = self.matrix
        flip = int_to_bits(sum(((z >> t) & 1) << i for i, z in enumerate(m.zs)), self.n)
        sub = self.bits[sel]
        nb = sub ^ flip
        pre = m.anchors(nb)
        pre[:, t] ^= 1
        self.amps[sel] *= m.amplitudes(sub, pre) * 2.0 ** (m.x_count / 2)
        self.bits[sel] = nb
        order = _sort_order(self.bits)
        self.bits, self.amps = self.bits[order], self.amps[order]

    def apply_controlled_phase(self, c: int, t: int, alpha: float, pool=None) -> None:
        """Multiply the ``c = t = 1`` cofactor by ``exp(i alpha)``."""
        if c == t:
            raise ValueError("controlled phase needs distinct qubits")
        self.cofactor(c, pool)
        self.cofactor(t, pool)
        self.amps[self.class_mask((c, t))] *= cmath.exp(1j * alpha)

    def apply_t(self, q: int, dagger: bool = False, pool=None) -> None:
        """Multiply the ``q = 1`` cofactor by ``exp(+-i pi/4)``."""
        self.cofactor(q, pool)
        self.amps[self.class_mask((q,))] *= cmath.exp((-1j if dagger else 1j) * math.pi / 4)


def _pullback(old: StabilizerMatrix, new: StabilizerMatrix, old_bits, new_bits, kind, qubits) -> np.ndarray:
    """Factors ``c_j`` with ``U|psi_j> = c_j |psi'_j>`` for one Clifford gate.

    ``<b'|U|psi_j>`` is evaluated at the anchor ``b'`` of each new state by
    summing the old amplitudes of its preimages under ``U``; dividing by the
    anchor amplitude ``2**(-x'/2)`` gives the factor.
    """
    anchor = new.anchors(new_bits)
    scale = 2.0 ** (new.x_count / 2)
    if kind == "CNOT":
        c, t = qubits
        pre = anchor.copy()
        pre[:, t] ^= pre[:, c]
        return old.amplitudes(old_bits, pre) * scale
    (q,) = qubits
    u = gate_matrix(kind)
    row = anchor[:, q]
    total = np.zeros(anchor.shape[0], dtype=np.complex128)
    for v in (0, 1):
        coef = u[row, v]
        if not np.any(coef):
            continue
        pre = anchor.copy()
        pre[:, q] = v
        total += coef * old.amplitudes(old_bits, pre)
    return total * scale
