"""Superpositions held as lists of mutually orthogonal stabilizer frames.

The engine dispatches each gate by class. Clifford and Pauli gates rotate
every frame. Toffoli, controlled-phase and T gates cofactor and then
re-compress the entries by coalescing pairs into rotated frames and merging
frames that share a matrix. Measurements sample one deviate from the run's
generator and keep only the consistent cofactors.

Worker threads never change results: frames are processed independently
and joined back in list order, and entry arrays are split into contiguous
ranges whose outputs are concatenated in order before the canonical sort.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._bits import gf2_matmul, ints_to_bits
from .frame import Frame
from .pauli import product_phase
from .tableau import StabilizerMatrix, inverse_gates

__all__ = [
    "CLIFFORD_GATES",
    "NONCLIFFORD_GATES",
    "CoalesceLimitError",
    "Multiframe",
    "SimulationStats",
    "check_orthogonality",
    "coalesce",
    "coalesce_general",
    "default_workers",
    "fast_orthogonal",
    "intersection",
    "merge_frames",
    "orthogonalize",
    "simulate",
]

CLIFFORD_GATES = frozenset({"H", "P", "PDG", "X", "Y", "Z", "CNOT"})
NONCLIFFORD_GATES = frozenset({"TOF", "CRZ", "T", "TDG"})
_PHASE_GATE = {1: "P", 2: "Z", 3: "PDG"}
_TOL = 1e-9
PARALLEL_MIN_STATES = 256


class CoalesceLimitError(RuntimeError):
    """Coalescing failed to reach a fixpoint within the round cap."""


def default_workers() -> int:
    """Worker count from ``FRAMESIM_WORKERS``, else 1."""
    try:
        return max(1, int(os.environ.get("FRAMESIM_WORKERS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- coalescing
def _z_rows(m: StabilizerMatrix) -> list[int]:
    """Rows of the form +-Z_k."""
    return [i for i in range(m.n) if m.xs[i] == 0 and m.zs[i] & (m.zs[i] - 1) == 0]


def _pairs(frame: Frame, zrows: list[int]):
    """Greedy adjacent pairing of entries that differ only on ``zrows`` and
    whose amplitudes differ by a power of ``i``."""
    bits, amps = frame.bits, frame.amps
    masked = bits.copy()
    masked[:, zrows] = 0
    _, group = np.unique(masked, axis=0, return_inverse=True)
    group = group.reshape(-1)
    mod = np.abs(amps)
    phase = np.mod(np.angle(amps), math.pi / 2)
    phase = np.where(phase > math.pi / 2 - _TOL, 0.0, phase)
    order = np.lexsort((np.arange(len(amps)), np.round(phase, 9), np.round(mod, 11), group))
    pairs = []
    i = 0
    while i + 1 < len(order):
        a, b = int(order[i]), int(order[i + 1])
        if group[a] == group[b]:
            ratio = amps[b] / amps[a]
            turns = np.angle(ratio) / (math.pi / 2)
            if abs(abs(ratio) - 1) <= _TOL and abs(turns - round(turns)) <= _TOL:
                pairs.append((a, b))
                i += 2
                continue
        i += 1
    return pairs


def coalesce(frame: Frame, pool=None) -> list[Frame]:
    """Fuse entry pairs that differ only on ``+-Z_k`` rows.

    Two entries ``a_j |psi_j>`` and ``a_r |psi_r>`` with ``a_r = i**d a_j`` whose
    sign vectors differ exactly on the ``Z_k`` rows in ``V`` satisfy
    ``|psi_r> = X_V |psi_j>``, so their sum is a single stabilizer state
    ``sqrt(2) a_j C|psi_j>`` with ``C = CNOT... P**d H`` on the first qubit of
    ``V``. Pairs sharing ``(V, d)`` share ``C`` and land in one output frame;
    unpaired entries stay in a residual frame with the original matrix.

    Returns ``[frame]`` (the same object) when nothing pairs.
    """
    frame.ensure_echelon()
    if len(frame) < 2:
        return [frame]
    m = frame.matrix
    zrows = _z_rows(m)
    if not zrows:
        return [frame]
    pairs = _pairs(frame, zrows)
    if not pairs:
        return [frame]
    groups: dict[tuple, list[int]] = {}
    used = np.zeros(len(frame), dtype=bool)
    for a, b in pairs:
        diff = np.nonzero(frame.bits[a] != frame.bits[b])[0]
        v1 = int(diff[0])
        j, r = (a, b) if frame.bits[a, v1] == 0 else (b, a)
        d = int(round(np.angle(frame.amps[r] / frame.amps[j]) / (math.pi / 2))) % 4
        groups.setdefault((tuple(int(v) for v in diff), d), []).append(j)
        used[a] = used[b] = True
    out = []
    if not used.all():
        rest = ~used
        out.append(Frame(m.copy(), frame.bits[rest], frame.amps[rest], normalize=False))
    for (rows, d), js in sorted(groups.items()):
        js = sorted(js)
        f = Frame(m.copy(), frame.bits[js], math.sqrt(2) * frame.amps[js], normalize=False)
        qubits = [m.zs[v].bit_length() - 1 for v in rows]
        f.rotate("H", (qubits[0],), pool=pool)
        if d:
            f.rotate(_PHASE_GATE[d], (qubits[0],), pool=pool)
        for q in qubits[1:]:
            f.rotate("CNOT", (qubits[0], q), pool=pool)
        out.append(f)
    return out


def coalesce_general(frame: Frame, pool=None) -> list[Frame]:
    """Coalesce in the basis where every row is ``+-Z_k``, then rotate back."""
    frame.ensure_echelon()
    circuit = frame.matrix.basis_form_circuit()
    if not circuit:
        return coalesce(frame, pool)
    work = frame.copy()
    for kind, qubits in circuit:
        work.rotate(kind, qubits, pool=pool)
    parts = coalesce(work, pool)
    if len(parts) == 1 and parts[0] is work:
        return [frame]
    back = inverse_gates(circuit)
    for part in parts:
        for kind, qubits in back:
            part.rotate(kind, qubits, pool=pool)
    return merge_frames(parts)


def merge_frames(frames: list[Frame]) -> list[Frame]:
    """Union frames whose matrices have identical rows.

    Equal sign vectors add their amplitudes; entries that cancel are pruned,
    and frames left empty are dropped. Output order follows first appearance.
    """
    buckets: dict[tuple, list[Frame]] = {}
    for f in frames:
        f.ensure_echelon()
        buckets.setdefault(f.matrix.literal_key(), []).append(f)
    out = []
    for group in buckets.values():
        if len(group) == 1:
            f = group[0]
        else:
            f = Frame(
                group[0].matrix,
                np.concatenate([g.bits for g in group]),
                np.concatenate([g.amps for g in group]),
            )
        if len(f):
            out.append(f)
    return out


# ------------------------------------------------------------ orthogonality
def intersection(frames: list[Frame]) -> list[tuple[int, int]]:
    """Literal rows ``(x, z)`` present in every frame's matrix."""
    if not frames:
        return []
    common = set(zip(frames[0].matrix.xs, frames[0].matrix.zs))
    for f in frames[1:]:
        common &= set(zip(f.matrix.xs, f.matrix.zs))
    return sorted(common)


def fast_orthogonal(fa: Frame, fb: Frame, shared) -> np.ndarray:
    """``(len(fa), len(fb))`` mask of entry pairs certified orthogonal because
    their signs differ on some shared row."""
    ia = {row: i for i, row in enumerate(zip(fa.matrix.xs, fa.matrix.zs))}
    ib = {row: i for i, row in enumerate(zip(fb.matrix.xs, fb.matrix.zs))}
    cols_a = [ia[r] for r in shared]
    cols_b = [ib[r] for r in shared]
    if not cols_a:
        return np.zeros((len(fa), len(fb)), dtype=bool)
    sa = fa.bits[:, cols_a]
    sb = fb.bits[:, cols_b]
    return np.any(sa[:, None, :] != sb[None, :, :], axis=2)


def _dependencies(ma: StabilizerMatrix, mb: StabilizerMatrix):
    """Subsets ``(s, t)`` of rows of ``ma`` and ``mb`` whose products agree up to
    sign, with the sign bit ``c`` of their ratio for all-positive rows."""
    n = ma.n
    rows = [x | (z << n) for x, z in zip(ma.xs, ma.zs)] + [x | (z << n) for x, z in zip(mb.xs, mb.zs)]
    pivots: dict[int, tuple[int, int]] = {}
    deps = []
    for idx, v in enumerate(rows):
        combo = 1 << idx
        while v:
            low = v & -v
            if low not in pivots:
                pivots[low] = (v, combo)
                break
            pv, pc = pivots[low]
            v ^= pv
            combo ^= pc
        if v == 0:
            deps.append(combo)
    mask = (1 << n) - 1
    out = []
    for combo in deps:
        s, t = combo & mask, combo >> n
        phase_a = _product_phase(ma, s)
        phase_b = _product_phase(mb, t)
        out.append((s, t, ((phase_a - phase_b) & 3) >> 1))
    return out


def _product_phase(m: StabilizerMatrix, subset: int) -> int:
    x = z = phase = 0
    i = 0
    while subset:
        if subset & 1:
            phase += product_phase(x, z, m.xs[i], m.zs[i])
            x ^= m.xs[i]
            z ^= m.zs[i]
        subset >>= 1
        i += 1
    return phase & 3


def exact_orthogonal(fa: Frame, fb: Frame) -> np.ndarray:
    """``(len(fa), len(fb))`` mask of orthogonal entry pairs.

    Two stabilizer states are orthogonal iff some operator lies in one group
    while its negation lies in the other. Each dependency between the two
    row sets yields one sign test; a pair overlaps iff all tests agree.
    """
    deps = _dependencies(fa.matrix, fb.matrix)
    if not deps:
        return np.zeros((len(fa), len(fb)), dtype=bool)
    n = fa.n
    s = ints_to_bits([d[0] for d in deps], n)
    t = ints_to_bits([d[1] for d in deps], n)
    c = np.array([d[2] for d in deps], dtype=np.uint8)
    ua = gf2_matmul(fa.bits, s.T) ^ c
    ub = gf2_matmul(fb.bits, t.T)
    return np.any(ua[:, None, :] != ub[None, :, :], axis=2)


def _row_index(m: StabilizerMatrix) -> dict:
    return {row: i for i, row in enumerate(zip(m.xs, m.zs))}


def _shared_keys(f: Frame, shared) -> set:
    idx = _row_index(f.matrix)
    return {r.tobytes() for r in f.bits[:, [idx[r] for r in shared]]}


def _overlapping(fa: Frame, fb: Frame, shared) -> bool:
    """True if some entry of ``fa`` is not orthogonal to some entry of ``fb``."""
    if shared and not _shared_keys(fa, shared) & _shared_keys(fb, shared):
        return False
    deps = _dependencies(fa.matrix, fb.matrix)
    if not deps:
        return True
    n = fa.n
    s = ints_to_bits([d[0] for d in deps], n)
    t = ints_to_bits([d[1] for d in deps], n)
    c = np.array([d[2] for d in deps], dtype=np.uint8)
    keys_a = {r.tobytes() for r in gf2_matmul(fa.bits, s.T) ^ c}
    keys_b = {r.tobytes() for r in gf2_matmul(fb.bits, t.T)}
    return bool(keys_a & keys_b)


def _fixed_words(f: Frame) -> tuple[np.ndarray, np.ndarray]:
    """Per-entry masks of deterministic qubits and their values, packed into
    64-bit words."""
    m = f.matrix
    words = (m.n + 63) // 64
    mask = np.zeros(words, dtype=np.uint64)
    val = np.zeros((len(f), words), dtype=np.uint64)
    for i, (x, z) in enumerate(zip(m.xs, m.zs)):
        if x == 0 and z & (z - 1) == 0:
            q = z.bit_length() - 1
            w, b = divmod(q, 64)
            mask[w] |= np.uint64(1 << b)
            val[:, w] |= f.bits[:, i].astype(np.uint64) << np.uint64(b)
    return np.broadcast_to(mask, val.shape), val


def _candidate_pairs(frames: list[Frame], block: int = 2048) -> set:
    """Frame pairs with entries not separated by a shared deterministic qubit."""
    parts = [_fixed_words(f) for f in frames]
    mask = np.concatenate([p[0] for p in parts])
    val = np.concatenate([p[1] for p in parts])
    owner = np.repeat(np.arange(len(frames)), [len(f) for f in frames])
    pairs = set()
    for lo in range(0, len(owner), block):
        hi = min(lo + block, len(owner))
        clash = np.zeros((hi - lo, len(owner)), dtype=bool)
        for w in range(mask.shape[1]):
            both = mask[lo:hi, w, None] & mask[None, :, w]
            clash |= (both & (val[lo:hi, w, None] ^ val[None, :, w])) != 0
        ia, ib = np.nonzero(~clash)
        fa, fb = owner[lo + ia], owner[ib]
        keep = fa < fb
        pairs.update(zip(fa[keep].tolist(), fb[keep].tolist()))
    return pairs


def check_orthogonality(frames: list[Frame]) -> bool:
    """True iff every cross-frame pair of entry states is orthogonal."""
    if len(frames) < 2:
        return True
    for f in frames:
        f.ensure_echelon()
    shared = intersection(frames)
    for a, b in sorted(_candidate_pairs(frames)):
        if _overlapping(frames[a], frames[b], shared):
            return False
    return True


def _column_literals(m: StabilizerMatrix, q: int) -> frozenset:
    return frozenset(2 * ((x >> q) & 1) + ((z >> q) & 1) for x, z in zip(m.xs, m.zs))


def _pivot(frames: list[Frame]) -> int:
    n = frames[0].n
    for q in range(n):
        if len({_column_literals(f.matrix, q) for f in frames}) > 1:
            return q
    for q in range(n):
        if any(f.matrix.is_random(q) for f in frames):
            return q
    raise RuntimeError("distinct frames with identical basis matrices")


def orthogonalize(frames: list[Frame], pool=None) -> list[Frame]:
    """Cofactor all frames on pivot qubits until a single frame remains."""
    frames = merge_frames(frames)
    while len(frames) > 1:
        p = _pivot(frames)
        for f in frames:
            f.cofactor(p, pool)
        frames = merge_frames(frames)
    return frames


# ------------------------------------------------------------------ engine
@dataclass
class SimulationStats:
    """Counters gathered during one simulation."""

    n: int
    gate_counts: dict = field(default_factory=lambda: {"clifford": 0, "nonclifford": 0, "measure": 0})
    max_frames: int = 1
    max_states: int = 1
    outcomes: list = field(default_factory=list)
    orthogonalizations: int = 0
    runtime_ms: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("runtime_ms")
        return d


class Multiframe:
    """A list of mutually orthogonal frames over ``n`` qubits.

    Parameters
    ----------
    n : int
    frames : list of Frame, optional
        Defaults to the single basis state ``|0...0>``.
    workers : int, optional
        Thread count; defaults to ``FRAMESIM_WORKERS`` or 1.
    single_frame : bool
        Disable coalescing so the state stays in one frame.
    """

    def __init__(self, n: int, frames=None, workers: int | None = None, single_frame: bool = False):
        self.n = n
        self.frames = list(frames) if frames is not None else [Frame.basis("0" * n)]
        self.workers = default_workers() if workers is None else int(workers)
        if self.workers < 1:
            raise ValueError("workers must be positive")
        self.single_frame = single_frame
        self.general_coalesce = False
        self.stats = SimulationStats(n)
        self._pool = ThreadPoolExecutor(self.workers) if self.workers > 1 else None
        self._observe()

    @classmethod
    def basis(cls, bits: str, **kwargs) -> Multiframe:
        return cls(len(bits), [Frame.basis(bits)], **kwargs)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # ------------------------------------------------------------ reading
    @property
    def total_states(self) -> int:
        return sum(len(f) for f in self.frames)

    def norm2(self) -> float:
        return sum(f.norm2() for f in self.frames)

    def state_vector(self) -> np.ndarray:
        vec = np.zeros(1 << self.n, dtype=np.complex128)
        for f in self.frames:
            vec += f.state_vector()
        return vec

    def _lone(self) -> bool:
        return len(self.frames) == 1 and len(self.frames[0]) == 1

    def _observe(self) -> None:
        self.stats.max_frames = max(self.stats.max_frames, len(self.frames))
        self.stats.max_states = max(self.stats.max_states, self.total_states)

    def _fan_out(self, frames) -> bool:
        # thread dispatch costs more than it saves on small states
        return self._pool is not None and len(frames) > 1 and sum(len(f) for f in frames) >= PARALLEL_MIN_STATES

    def _each(self, fn) -> None:
        if self._fan_out(self.frames):
            list(self._pool.map(fn, self.frames))
        else:
            for f in self.frames:
                fn(f)

    def _inner_pool(self):
        return self._pool if len(self.frames) == 1 else None

    # ------------------------------------------------------------ gates
    def apply(self, gate, rng=None):
        """Apply one gate (object with ``kind``, ``qubits``, ``angle``).

        Returns the outcome bit for measurements, else None.
        """
        kind = gate.kind.upper()
        qubits = tuple(gate.qubits)
        if kind in CLIFFORD_GATES:
            self.apply_clifford(kind, qubits)
        elif kind in NONCLIFFORD_GATES:
            self.apply_nonclifford(kind, qubits, getattr(gate, "angle", None))
        elif kind == "MEASURE":
            return self.measure(qubits[0], rng)
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
        return None

    def apply_clifford(self, kind: str, qubits) -> None:
        self.stats.gate_counts["clifford"] += 1
        lone = self._lone()
        pool = self._inner_pool()
        self._each(lambda f: f.rotate(kind, qubits, track_phase=not lone, pool=pool))

    def apply_nonclifford(self, kind: str, qubits, angle: float | None = None) -> None:
        """Apply TOF, CRZ, T or TDG, then re-compress and restore orthogonality."""
        self.stats.gate_counts["nonclifford"] += 1
        pool = self._inner_pool()
        if kind == "TOF":
            op = lambda f: f.apply_toffoli(*qubits, pool=pool)  # noqa: E731
        elif kind == "CRZ":
            op = lambda f: f.apply_controlled_phase(*qubits, angle, pool=pool)  # noqa: E731
        else:
            op = lambda f: f.apply_t(qubits[0], kind == "TDG", pool=pool)  # noqa: E731
        self._each(op)
        self.frames = [f for f in self.frames if len(f)]
        self._observe()
        if not self.single_frame:
            self.frames = self._coalesce_fixpoint()
            self._observe()
        self._restore_orthogonality()

    def _coalesce_fixpoint(self) -> list[Frame]:
        frames = merge_frames(self.frames)
        cap = max(self.n, 1)
        for _ in range(cap + 1):
            pool = self._pool if len(frames) == 1 else None
            fuse = coalesce_general if self.general_coalesce else coalesce
            if self._fan_out(frames):
                parts = list(self._pool.map(fuse, frames))
            else:
                parts = [fuse(f, pool) for f in frames]
            changed = any(len(p) != 1 or p[0] is not f for p, f in zip(parts, frames))
            frames = merge_frames([g for p in parts for g in p])
            if not changed:
                return frames
        raise CoalesceLimitError(f"coalescing did not settle within {cap} rounds")

    def _restore_orthogonality(self) -> None:
        if len(self.frames) > 1 and not check_orthogonality(self.frames):
            self.stats.orthogonalizations += 1
            self.frames = orthogonalize(self.frames, self._pool)
            self._observe()

    def measure(self, q: int, rng) -> int:
        """Sample qubit ``q`` with one uniform deviate and collapse."""
        if not 0 <= q < self.n:
            raise IndexError(f"qubit {q} out of range for {self.n} qubits")
        self.stats.gate_counts["measure"] += 1
        u = rng.random()
        if self._lone():
            f = self.frames[0]
            f.ensure_echelon()
            if f.matrix.is_random(q):
                outcome = 0 if u < 0.5 else 1
                memo = f.matrix.collapse(q, outcome)
                f.bits = memo.apply(f.bits, outcome)
            else:
                outcome = int(f.bits[0, f.matrix.z_row(q)])
            self.stats.outcomes.append(outcome)
            return outcome
        pool = self._inner_pool()
        total = self.norm2()
        p1 = sum(f.weight_one(q) for f in self.frames) / total
        outcome = 0 if u < 1 - p1 else 1
        for f in self.frames:
            f.cofactor(q, pool)
            f.restrict(q, outcome)
        self._observe()
        self.frames = [f for f in self.frames if len(f)]
        scale = 1 / math.sqrt(self.norm2())
        for f in self.frames:
            f.amps = f.amps * scale
        self.frames = merge_frames(self.frames)
        self._restore_orthogonality()
        self.stats.outcomes.append(outcome)
        return outcome

    def probability_one(self, q: int) -> float:
        return sum(f.weight_one(q) for f in self.frames) / self.norm2()


def simulate(
    circuit,
    seed: int | None = 0,
    rng: np.random.Generator | None = None,
    workers: int | None = None,
    single_frame: bool = False,
    state: Multiframe | None = None,
    callback=None,
) -> tuple[Multiframe, SimulationStats]:
    """Run a circuit from ``|0...0>`` (or ``state``) and collect statistics.

    ``callback(index, gate, multiframe)`` is invoked after every gate.
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    mf = state or Multiframe(circuit.n, workers=workers, single_frame=single_frame)
    if mf.n != circuit.n:
        raise ValueError("circuit and state disagree on the qubit count")
    start = time.perf_counter()
    try:
        for idx, gate in enumerate(circuit.gates):
            mf.apply(gate, rng)
            mf._observe()
            if callback is not None:
                callback(idx, gate, mf)
    finally:
        mf.close()
    mf.stats.runtime_ms = (time.perf_counter() - start) * 1000
    return mf, mf.stats
