"""Stabilizer matrices kept in reduced row-echelon form.

A matrix holds ``n`` commuting, independent generator rows (bit planes as
Python integers) and a sign bitmask (bit ``i`` set means row ``i`` carries -1).
The canonical layout orders the ``2n`` columns as ``X_0..X_{n-1}, Z_0..Z_{n-1}``
and keeps the rows in reduced row-echelon form over that order. This puts the
rows with X/Y literals (the X-block) on top and the Z/I-only rows (the Z-block)
below, and makes the literal rows a function of the stabilizer group alone, so
two matrices describing the same basis compare equal.

Every structural change is recorded in a :class:`Memo` so that sign vectors
held elsewhere (frame entries) can replay it.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._bits import bitstring_to_int, gf2_inverse, gf2_matmul, int_to_bits, ints_to_bits
from .pauli import CLIFFORD_KINDS, PauliOperator, commutes, product_phase

__all__ = [
    "ContractError",
    "MeasureKind",
    "Memo",
    "StabilizerMatrix",
    "inverse_gates",
]

_PHASES = np.array([1, 1j, -1, -1j], dtype=np.complex128)


class ContractError(RuntimeError):
    """An operation was called outside its precondition."""


class MeasureKind(NamedTuple):
    """Result of :meth:`StabilizerMatrix.measure_kind`."""

    random: bool
    outcome: int | None = None


class Memo:
    """Ordered record of sign-relevant row operations.

    Operations are tuples:

    ``("flip", mask)``
        toggle the signs of the rows in ``mask``
    ``("perm", order)``
        new row ``i`` is old row ``order[i]``
    ``("swap", i, j)``
    ``("mul", i, j, c)``
        row ``i`` becomes row ``i`` times row ``j``; its sign picks up
        sign ``j`` xor ``c``
    ``("set", i)``
        row ``i`` was replaced by a forced measurement outcome
    """

    __slots__ = ("ops",)

    def __init__(self, ops=None):
        self.ops = list(ops) if ops else []

    def __len__(self) -> int:
        return sum(1 for op in self.ops if op[0] in ("mul", "swap", "set"))

    def __repr__(self) -> str:
        return f"Memo({self.ops!r})"

    def extend(self, other: Memo) -> Memo:
        self.ops.extend(other.ops)
        return self

    @property
    def structural(self) -> bool:
        """True when rows moved or combined (not just sign flips)."""
        return any(op[0] != "flip" for op in self.ops)

    def apply_int(self, sigma: int, forced: int = 0) -> int:
        """Replay on one sign vector stored as an integer."""
        for op in self.ops:
            kind = op[0]
            if kind == "flip":
                sigma ^= op[1]
            elif kind == "mul":
                _, i, j, c = op
                sigma ^= (((sigma >> j) & 1) ^ c) << i
            elif kind == "swap":
                _, i, j = op
                bi, bj = (sigma >> i) & 1, (sigma >> j) & 1
                if bi != bj:
                    sigma ^= (1 << i) | (1 << j)
            elif kind == "perm":
                out = 0
                for new, old in enumerate(op[1]):
                    out |= ((sigma >> old) & 1) << new
                sigma = out
            elif kind == "set":
                i = op[1]
                sigma = (sigma & ~(1 << i)) | ((forced & 1) << i)
        return sigma

    def apply(self, bits: np.ndarray, forced: int = 0) -> np.ndarray:
        """Replay on a ``(k, n)`` array of sign bits; returns a new array."""
        if not self.ops:
            return bits.copy()
        n = bits.shape[1]
        cols = np.array(bits.T, dtype=np.uint8, order="C")
        for op in self.ops:
            kind = op[0]
            if kind == "flip":
                idx = np.nonzero(int_to_bits(op[1], n))[0]
                cols[idx] ^= 1
            elif kind == "mul":
                _, i, j, c = op
                cols[i] ^= cols[j]
                if c:
                    cols[i] ^= 1
            elif kind == "swap":
                _, i, j = op
                cols[[i, j]] = cols[[j, i]]
            elif kind == "perm":
                cols = cols[list(op[1])]
            elif kind == "set":
                cols[op[1]] = forced & 1
        return np.ascontiguousarray(cols.T)


def inverse_gates(gates):
    """Inverse of a Clifford gate list given as ``(kind, qubits)`` pairs."""
    inv = {"P": "PDG", "PDG": "P"}
    return [(inv.get(kind, kind), tuple(qubits)) for kind, qubits in reversed(list(gates))]


def _normalize(gate, qubits):
    kind = gate.upper()
    if kind not in CLIFFORD_KINDS:
        raise ValueError(f"not a Clifford gate: {gate!r}")
    qubits = tuple(int(q) for q in qubits)
    if len(qubits) != (2 if kind == "CNOT" else 1):
        raise ValueError(f"{kind} takes {2 if kind == 'CNOT' else 1} qubit(s)")
    if kind == "CNOT" and qubits[0] == qubits[1]:
        raise ValueError("CNOT needs distinct qubits")
    return kind, qubits


class StabilizerMatrix:
    """Generator rows of one stabilizer state plus their signs.

    Parameters
    ----------
    n : int
        Qubit count.
    xs, zs : sequence of int
        Bit planes per row.
    signs : int
        Bit ``i`` set means row ``i`` has sign -1.
    """

    def __init__(self, n: int, xs=None, zs=None, signs: int = 0):
        self.n = n
        self.xs = list(xs) if xs is not None else [0] * n
        self.zs = list(zs) if zs is not None else [1 << j for j in range(n)]
        if len(self.xs) != n or len(self.zs) != n:
            raise ValueError("a stabilizer matrix needs exactly n rows")
        self.signs = signs
        self._piv: list[int] | None = None
        self._cache = None

    # ------------------------------------------------------------------ build
    @classmethod
    def basis(cls, bits="") -> StabilizerMatrix:
        """Matrix of a computational-basis state; row j is +Z_j or -Z_j."""
        if isinstance(bits, str):
            n = len(bits)
            value = bitstring_to_int(bits)
        else:
            bits = [int(b) for b in bits]
            n = len(bits)
            value = sum(b << j for j, b in enumerate(bits))
        m = cls(n, [0] * n, [1 << j for j in range(n)], value)
        m._piv = [n + j for j in range(n)]
        return m

    @classmethod
    def from_generators(cls, generators) -> StabilizerMatrix:
        """Build from Pauli operators or strings such as ``["+XX", "-ZZ"]``.

        The rows must be Hermitian, pairwise commuting and independent. The
        result is brought to echelon form.
        """
        ops = [g if isinstance(g, PauliOperator) else PauliOperator.from_string(g) for g in generators]
        n = len(ops)
        for p in ops:
            if p.n != n:
                raise ValueError("need n generators on n qubits")
            if not p.is_hermitian:
                raise ValueError(f"generator {p} has an imaginary phase")
        for a in range(n):
            for b in range(a + 1, n):
                if not commutes(ops[a], ops[b]):
                    raise ValueError(f"generators {ops[a]} and {ops[b]} anticommute")
        m = cls(n, [p.x for p in ops], [p.z for p in ops], sum(((p.phase >> 1) & 1) << i for i, p in enumerate(ops)))
        if m.rank() != n:
            raise ValueError("generators are not independent")
        m.to_row_echelon()
        return m

    def copy(self) -> StabilizerMatrix:
        m = StabilizerMatrix(self.n, self.xs, self.zs, self.signs)
        m._piv = None if self._piv is None else list(self._piv)
        m._cache = self._cache
        return m

    # ------------------------------------------------------------- inspection
    def row(self, i: int) -> PauliOperator:
        return PauliOperator(self.n, self.xs[i], self.zs[i], 2 * ((self.signs >> i) & 1))

    def rows(self) -> list[PauliOperator]:
        return [self.row(i) for i in range(self.n)]

    @property
    def is_echelon(self) -> bool:
        return self._piv is not None

    @property
    def x_count(self) -> int:
        """Number of X-block rows (requires echelon form)."""
        self._require_echelon()
        return sum(1 for p in self._piv if p < self.n)

    @property
    def pivots(self) -> list[int]:
        self._require_echelon()
        return list(self._piv)

    def literal_key(self) -> tuple:
        """Hashable key of the literal rows, ignoring signs."""
        return (self.n, tuple(self.xs), tuple(self.zs))

    def rank(self) -> int:
        """GF(2) rank of the stacked bit planes."""
        rows = [(x << self.n) | z for x, z in zip(self.xs, self.zs)]
        rank = 0
        for col in range(2 * self.n):
            bit = 1 << col
            piv = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            for i in range(len(rows)):
                if i != rank and rows[i] & bit:
                    rows[i] ^= rows[rank]
            rank += 1
        return rank

    def check_invariants(self) -> None:
        """Raise AssertionError if any structural invariant is broken."""
        rows = self.rows()
        for a in range(self.n):
            for b in range(a + 1, self.n):
                assert commutes(rows[a], rows[b]), f"rows {a} and {b} anticommute"
        assert self.rank() == self.n, "rows are dependent"
        if self._piv is not None:
            assert self._echelon_ok(), "echelon form violated"

    def _echelon_ok(self) -> bool:
        piv = [self._lead(i) for i in range(self.n)]
        if piv != self._piv or piv != sorted(piv) or len(set(piv)) != self.n:
            return False
        for i, c in enumerate(piv):
            for k in range(self.n):
                if k != i and self._bit(k, c):
                    return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerMatrix):
            return NotImplemented
        return self.n == other.n and self.xs == other.xs and self.zs == other.zs and self.signs == other.signs

    def __repr__(self) -> str:
        return f"StabilizerMatrix({[str(r) for r in self.rows()]})"

    def dump(self) -> str:
        """One row per line, X-block first when in echelon form."""
        return "\n".join(str(r) for r in self.rows())

    # ------------------------------------------------------------ row helpers
    def _bit(self, i: int, c: int) -> int:
        n = self.n
        return (self.xs[i] >> c) & 1 if c < n else (self.zs[i] >> (c - n)) & 1

    def _lead(self, i: int) -> int:
        x = self.xs[i]
        if x:
            return (x & -x).bit_length() - 1
        z = self.zs[i]
        if not z:
            raise ContractError("identity row in a stabilizer matrix")
        return self.n + (z & -z).bit_length() - 1

    def _mul(self, i: int, j: int, memo: Memo) -> None:
        xi, zi, xj, zj = self.xs[i], self.zs[i], self.xs[j], self.zs[j]
        e = product_phase(xi, zi, xj, zj)
        if e & 1:
            raise ContractError("multiplied anticommuting rows")
        c = e >> 1
        self.xs[i] = xi ^ xj
        self.zs[i] = zi ^ zj
        self.signs ^= (((self.signs >> j) & 1) ^ c) << i
        memo.ops.append(("mul", i, j, c))

    def _swap(self, i: int, j: int, memo: Memo) -> None:
        if i == j:
            return
        self.xs[i], self.xs[j] = self.xs[j], self.xs[i]
        self.zs[i], self.zs[j] = self.zs[j], self.zs[i]
        bi, bj = (self.signs >> i) & 1, (self.signs >> j) & 1
        if bi != bj:
            self.signs ^= (1 << i) | (1 << j)
        if self._piv is not None:
            self._piv[i], self._piv[j] = self._piv[j], self._piv[i]
        memo.ops.append(("swap", i, j))

    def _sort_rows(self, memo: Memo) -> None:
        order = sorted(range(self.n), key=self._piv.__getitem__)
        if order == list(range(self.n)):
            return
        self.xs = [self.xs[o] for o in order]
        self.zs = [self.zs[o] for o in order]
        self.signs = sum(((self.signs >> o) & 1) << i for i, o in enumerate(order))
        self._piv = [self._piv[o] for o in order]
        memo.ops.append(("perm", tuple(order)))

    def _require_echelon(self) -> None:
        if self._piv is None:
            raise ContractError("matrix is not in row-echelon form; call to_row_echelon()")

    # -------------------------------------------------------------- echelon
    def to_row_echelon(self) -> Memo:
        """Bring the rows to reduced echelon form; empty memo if already there."""
        memo = Memo()
        if self._piv is not None:
            return memo
        n = self.n
        piv = []
        r = 0
        for c in range(2 * n):
            hit = next((i for i in range(r, n) if self._bit(i, c)), None)
            if hit is None:
                continue
            self._swap(r, hit, memo)
            for i in range(n):
                if i != r and self._bit(i, c):
                    self._mul(i, r, memo)
            piv.append(c)
            r += 1
        if r != n:
            raise ContractError("rows are dependent")
        self._piv = piv
        self._cache = None
        return memo

    def _repair(self, changed, dirty, memo: Memo) -> None:
        """Restore echelon form after edits confined to ``changed`` columns
        and to the rows listed in ``dirty``; O(n) row operations."""
        piv = self._piv
        n = self.n
        changed = sorted(changed)
        dirty = set(dirty) | {i for i in range(n) if piv[i] in changed}
        clean = [i for i in range(n) if i not in dirty]
        for c in changed:
            hit = [i for i in clean if self._bit(i, c)]
            late = [i for i in hit if piv[i] > c]
            if not late:
                continue
            r = max(late, key=piv.__getitem__)
            for i in hit:
                if i != r:
                    self._mul(i, r, memo)
            piv[r] = c
        pivot_of = {piv[i]: i for i in clean}
        for d in sorted(dirty):
            for c in sorted(pivot_of):
                if self._bit(d, c):
                    self._mul(d, pivot_of[c], memo)
            lead = self._lead(d)
            for i in pivot_of.values():
                if self._bit(i, lead):
                    self._mul(i, d, memo)
            piv[d] = lead
            pivot_of[lead] = d
        self._sort_rows(memo)
        self._cache = None

    # ---------------------------------------------------------- conjugation
    def conjugate(self, gate: str, qubits, repair: bool = True) -> Memo:
        """Replace every row ``Q`` by ``U Q U^dagger`` and repair echelon form.

        With ``repair=False`` the echelon form is left stale (restored later by
        :meth:`to_row_echelon`); this is the fast path for a lone stabilizer
        state whose global phase is irrelevant.
        """
        kind, qubits = _normalize(gate, qubits)
        for q in qubits:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range for {self.n} qubits")
        memo = Memo()
        flips, changed = self._apply_gate(kind, qubits)
        if flips:
            self.signs ^= flips
            memo.ops.append(("flip", flips))
        if changed:
            self._cache = None
            if self._piv is not None:
                if repair:
                    self._repair(changed, (), memo)
                else:
                    self._piv = None
        if repair and self._piv is None:
            memo.extend(self.to_row_echelon())
        return memo

    def _apply_gate(self, kind: str, qubits) -> tuple[int, tuple]:
        xs, zs, n = self.xs, self.zs, self.n
        flips = 0
        if kind == "CNOT":
            c, t = qubits
            bc, bt = 1 << c, 1 << t
            for i in range(n):
                x, z = xs[i], zs[i]
                xc, zt = x & bc, z & bt
                if xc and zt and bool(x & bt) == bool(z & bc):
                    flips |= 1 << i
                if xc:
                    xs[i] = x ^ bt
                if zt:
                    zs[i] = z ^ bc
            return flips, (t, n + c)
        (q,) = qubits
        bit = 1 << q
        if kind == "H":
            for i in range(n):
                xb, zb = xs[i] & bit, zs[i] & bit
                if xb and zb:
                    flips |= 1 << i
                elif xb or zb:
                    xs[i] ^= bit
                    zs[i] ^= bit
            return flips, (q, n + q)
        if kind in ("P", "PDG"):
            want = 1 if kind == "P" else 0
            for i in range(n):
                if xs[i] & bit:
                    if bool(zs[i] & bit) == bool(want):
                        flips |= 1 << i
                    zs[i] ^= bit
            return flips, (n + q,)
        for i in range(n):
            xb, zb = xs[i] & bit, zs[i] & bit
            if kind == "X":
                hit = zb
            elif kind == "Z":
                hit = xb
            else:
                hit = bool(xb) != bool(zb)
            if hit:
                flips |= 1 << i
        return flips, ()

    # ---------------------------------------------------------- measurement
    def z_row(self, q: int) -> int:
        """Index of the row equal to +-Z_q; requires q to be deterministic."""
        self._require_echelon()
        target = self.n + q
        for i in range(self.n - 1, -1, -1):
            if self._piv[i] == target:
                if self.xs[i] or self.zs[i] != 1 << q:
                    raise ContractError(f"qubit {q} is not deterministic")
                return i
            if self._piv[i] < target:
                break
        raise ContractError(f"qubit {q} is not deterministic")

    def is_random(self, q: int) -> bool:
        self._require_echelon()
        bit = 1 << q
        return any(self.xs[i] & bit for i in range(self.n) if self._piv[i] < self.n)

    def measure_kind(self, q: int) -> MeasureKind:
        """Random if column q holds an X/Y literal, else the forced outcome."""
        if not 0 <= q < self.n:
            raise IndexError(f"qubit {q} out of range for {self.n} qubits")
        if self.is_random(q):
            return MeasureKind(True, None)
        return MeasureKind(False, (self.signs >> self.z_row(q)) & 1)

    def collapse(self, q: int, outcome: int) -> Memo:
        """Project onto qubit ``q`` = ``outcome`` for a random qubit.

        The bottom-most X-block row with an X/Y literal at ``q`` is multiplied
        into the other anticommuting rows and then replaced by +-Z_q. The
        memo's ``("set", j)`` step marks where the forced sign enters.
        """
        self._require_echelon()
        bit = 1 << q
        hits = [i for i in range(self.n) if self._piv[i] < self.n and self.xs[i] & bit]
        if not hits:
            raise ContractError(f"qubit {q} is deterministic; nothing to collapse")
        memo = Memo()
        j = hits[-1]
        for i in hits[:-1]:
            self._mul(i, j, memo)
        self.xs[j] = 0
        self.zs[j] = bit
        self.signs = (self.signs & ~(1 << j)) | ((outcome & 1) << j)
        memo.ops.append(("set", j))
        self._repair((), (j,), memo)
        return memo

    # ------------------------------------------------------------ amplitudes
    def _derived(self):
        if self._cache is None:
            self._require_echelon()
            n = self.n
            x = self.x_count
            pivx = self._piv[:x]
            xx = ints_to_bits(self.xs[:x], n)
            zx = ints_to_bits(self.zs[:x], n)
            y = np.array([(self.xs[i] & self.zs[i]).bit_count() & 3 for i in range(x)], dtype=np.int64)
            cross = np.triu(gf2_matmul(zx, xx.T), k=1) if x else np.zeros((0, 0), dtype=np.uint8)
            zb = ints_to_bits(self.zs[x:], n)
            free = np.array([c for c in range(n) if c not in set(pivx)], dtype=np.int64)
            w = np.zeros((n - x, n), dtype=np.uint8)
            if n - x:
                w[:, free] = gf2_inverse(zb[:, free]).T
            self._cache = (x, np.array(pivx, dtype=np.int64), xx, zx, y, cross, zb, w)
        return self._cache

    def anchors(self, sign_bits: np.ndarray) -> np.ndarray:
        """Anchor basis state per sign vector: the support element that is 0
        on every X-block pivot column. Input and output are ``(k, n)`` bits."""
        x, _, _, _, _, _, _, w = self._derived()
        sign_bits = np.atleast_2d(sign_bits)
        if self.n == x:
            return np.zeros((sign_bits.shape[0], self.n), dtype=np.uint8)
        return gf2_matmul(sign_bits[:, x:], w)

    def amplitudes(self, sign_bits: np.ndarray, basis_bits: np.ndarray) -> np.ndarray:
        """Canonical amplitudes, vectorized over rows of the two ``(k, n)`` inputs.

        Row ``t`` gives the amplitude of basis state ``basis_bits[t]`` in the
        unit-norm state stabilized by these rows with signs ``sign_bits[t]``.
        The anchor basis state has real positive amplitude ``2**(-x/2)``.
        """
        x, pivx, xx, zx, y, cross, zb, _ = self._derived()
        sign_bits = np.atleast_2d(sign_bits).astype(np.uint8)
        basis_bits = np.atleast_2d(basis_bits).astype(np.uint8)
        k = max(sign_bits.shape[0], basis_bits.shape[0])
        sign_bits = np.broadcast_to(sign_bits, (k, self.n))
        basis_bits = np.broadcast_to(basis_bits, (k, self.n))
        if self.n == 0:
            return np.ones(k, dtype=np.complex128)
        ok = np.ones(k, dtype=bool)
        if self.n > x:
            ok = np.all(gf2_matmul(basis_bits, zb.T) == sign_bits[:, x:], axis=1)
        if x == 0:
            return ok.astype(np.complex128)
        subset = basis_bits[:, pivx]
        anchor = basis_bits ^ gf2_matmul(subset, xx)
        zsub = gf2_matmul(subset, zx)
        s64 = subset.astype(np.int64)
        expo = s64 @ y
        parity = (
            (subset & sign_bits[:, :x]).sum(axis=1, dtype=np.int64)
            + ((s64 @ cross.astype(np.int64)) * s64).sum(axis=1)
            + (zsub & anchor).sum(axis=1, dtype=np.int64)
        )
        expo = (expo + 2 * (parity & 1)) & 3
        return np.where(ok, _PHASES[expo] * 2.0 ** (-x / 2), 0)

    def canonical_amplitude(self, signs=None, basis=0) -> complex:
        """Amplitude of one basis state (int with bit j = qubit j, or a bit string)."""
        n = self.n
        if signs is None:
            signs = self.signs
        if isinstance(basis, str):
            basis = bitstring_to_int(basis)
        if isinstance(signs, str):
            signs = bitstring_to_int(signs)
        sb = int_to_bits(signs, n)[None, :] if isinstance(signs, int) else np.asarray(signs, np.uint8)[None, :]
        bb = int_to_bits(basis, n)[None, :] if isinstance(basis, int) else np.asarray(basis, np.uint8)[None, :]
        return complex(self.amplitudes(sb, bb)[0])

    def support(self, signs=None) -> tuple[np.ndarray, np.ndarray]:
        """All nonzero-amplitude basis states (as ``(2**x, n)`` bits) and amplitudes."""
        x, _, xx, _, _, _, _, _ = self._derived()
        if signs is None:
            signs = self.signs
        if isinstance(signs, np.ndarray):
            sb = signs.astype(np.uint8)[None, :]
        else:
            sb = int_to_bits(signs, self.n)[None, :]
        anchor = self.anchors(sb)
        combos = ((np.arange(1 << x)[:, None] >> np.arange(x)[None, :]) & 1).astype(np.uint8)
        basis = anchor ^ gf2_matmul(combos, xx)
        return basis, self.amplitudes(sb, basis)

    def state_vector(self, signs=None) -> np.ndarray:
        """Dense amplitude vector; index bit (n-1-j) holds qubit j."""
        if self.n > 24:
            raise ValueError("dense expansion limited to 24 qubits")
        basis, amps = self.support(signs)
        weights = 1 << np.arange(self.n - 1, -1, -1, dtype=np.int64)
        vec = np.zeros(1 << self.n, dtype=np.complex128)
        vec[basis.astype(np.int64) @ weights] = amps
        return vec

    # --------------------------------------------------------- basis change
    def basis_form_circuit(self) -> list[tuple[str, tuple[int, ...]]]:
        """Clifford gates that map these rows to +-Z_j rows (basis form)."""
        self._require_echelon()
        work = self.copy()
        n = self.n
        x = work.x_count
        pivx = work._piv[:x]
        gates: list[tuple[str, tuple[int, ...]]] = []

        def apply(kind, qs):
            gates.append((kind, qs))
            work.conjugate(kind, qs, repair=False)

        for i, p in enumerate(pivx):
            row = work.xs[i]
            for c in range(n):
                if c != p and (row >> c) & 1:
                    apply("CNOT", (p, c))
        for i, p in enumerate(pivx):
            if (work.zs[i] >> p) & 1:
                apply("P", (p,))
        for i, p in enumerate(pivx):
            row = work.zs[i]
            for c in range(n):
                if c != p and (row >> c) & 1:
                    apply("H", (c,))
                    apply("CNOT", (p, c))
                    apply("H", (c,))
        for p in pivx:
            apply("H", (p,))
        return gates
