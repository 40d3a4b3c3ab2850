"""Conversions between integer bitsets and numpy 0/1 arrays, plus GF(2) helpers."""

from __future__ import annotations

import numpy as np


def ints_to_bits(values, n: int) -> np.ndarray:
    """Unpack integers into a ``(len(values), n)`` uint8 array; bit j -> column j."""
    values = list(values)
    nbytes = max(1, (n + 7) // 8)
    if not values:
        return np.zeros((0, n), dtype=np.uint8)
    raw = b"".join(int(v).to_bytes(nbytes, "little") for v in values)
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(len(values), nbytes)
    return np.unpackbits(arr, axis=1, bitorder="little")[:, :n].copy()


def int_to_bits(value: int, n: int) -> np.ndarray:
    return ints_to_bits([value], n)[0]


def bits_to_ints(bits: np.ndarray) -> list[int]:
    """Inverse of :func:`ints_to_bits`."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    packed = np.packbits(bits, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def bits_to_int(bits) -> int:
    return bits_to_ints(np.asarray(bits, dtype=np.uint8)[None, :])[0]


def bitstring_to_int(text: str) -> int:
    """``"b0 b1 ... "`` (qubit 0 first) to an integer with bit j = qubit j."""
    value = 0
    for j, ch in enumerate(text):
        if ch not in "01":
            raise ValueError(f"bad bit {ch!r} in {text!r}")
        if ch == "1":
            value |= 1 << j
    return value


def int_to_bitstring(value: int, n: int) -> str:
    return "".join("1" if (value >> j) & 1 else "0" for j in range(n))


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2) of 0/1 arrays (float BLAS, exact for n < 2**24)."""
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.uint8)
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


def gf2_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a square 0/1 matrix over GF(2); raises if singular."""
    m = a.shape[0]
    aug = np.concatenate([a.astype(np.uint8) & 1, np.eye(m, dtype=np.uint8)], axis=1)
    for col in range(m):
        hits = np.nonzero(aug[col:, col])[0]
        if hits.size == 0:
            raise np.linalg.LinAlgError("matrix is singular over GF(2)")
        piv = col + hits[0]
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        rows = np.nonzero(aug[:, col])[0]
        rows = rows[rows != col]
        aug[rows] ^= aug[col]
    return aug[:, m:].copy()


def basis_index(bits, n: int) -> int:
    """Dense-vector index of a basis state; qubit 0 is the most significant bit."""
    idx = 0
    for j in range(n):
        idx = (idx << 1) | int(bits[j])
    return idx
