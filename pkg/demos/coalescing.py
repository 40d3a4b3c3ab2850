"""Coalescing a computational-basis superposition.

Four equal-weight basis states on three qubits collapse into two frames of
one entry each, and the state is unchanged.

    python3 demos/coalescing.py
"""

import numpy as np

from framesim import Frame, StabilizerMatrix
from framesim.multiframe import check_orthogonality, coalesce


def main():
    basis = ["000", "010", "100", "111"]
    bits = np.array([[int(c) for c in s] for s in basis], dtype=np.uint8)
    frame = Frame(StabilizerMatrix.basis("000"), bits, [0.5] * 4)
    print(f"input: one frame, {len(frame)} entries over {basis}")

    out = coalesce(frame)
    for i, f in enumerate(out):
        rows = " ".join(str(r) for r in f.matrix.rows())
        print(f"frame {i}: [{rows}] entries={len(f)} amp={np.round(f.amps, 4).tolist()}")

    drift = np.max(np.abs(sum(f.state_vector() for f in out) - frame.state_vector()))
    print(f"state change {drift:.1e}, frames orthogonal: {check_orthogonality(out)}")


if __name__ == "__main__":
    main()
