import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framesim import dense
from framesim.pauli import (
    PauliOperator,
    SizeMismatchError,
    commutes,
    conjugate_single,
    multiply,
    product_phase,
)

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def to_matrix(p: PauliOperator) -> np.ndarray:
    """Dense matrix with qubit 0 as the most significant tensor factor."""
    m = np.ones((1, 1), dtype=complex)
    for j in range(p.n):
        m = np.kron(m, _MATS[p.literal(j)])
    return (1j**p.phase) * m


def gate_unitary(kind: str, qubits, n: int) -> np.ndarray:
    cols = []
    for i in range(1 << n):
        s = dense.DenseState(n, np.eye(1 << n)[i])
        cols.append(dense.apply(s, (kind, tuple(qubits))).amps)
    return np.array(cols).T


@st.composite
def paulis(draw, n=None):
    n = draw(st.integers(1, 5)) if n is None else n
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    return PauliOperator(n, x, z, draw(st.integers(0, 3)))


@st.composite
def pauli_pairs(draw):
    n = draw(st.integers(1, 5))
    return draw(paulis(n)), draw(paulis(n))


class TestParsing:
    def test_roundtrip(self):
        for text in ["+XZ", "-IYX", "+iZ", "-iXXYZ", "+I"]:
            assert str(PauliOperator.from_string(text)) == text

    def test_literal_encoding(self):
        p = PauliOperator.from_string("IXYZ")
        assert p.x == 0b0110 and p.z == 0b1100
        assert [p.literal(j) for j in range(4)] == list("IXYZ")

    def test_unsigned_defaults_positive(self):
        assert PauliOperator.from_string("XZ").phase == 0

    def test_bad_literal(self):
        with pytest.raises(ValueError):
            PauliOperator.from_string("XQ")

    def test_planes_out_of_range(self):
        with pytest.raises(ValueError):
            PauliOperator(2, x=0b100)

    def test_single(self):
        assert str(PauliOperator.single(3, 1, "Y", 2)) == "-IYI"

    def test_weight_and_hermitian(self):
        p = PauliOperator.from_string("-iXIY")
        assert p.weight == 2
        assert not p.is_hermitian
        assert (-PauliOperator.from_string("XY")).is_hermitian


class TestMultiply:
    def test_xy_is_iz(self):
        assert str(multiply(PauliOperator.from_string("X"), PauliOperator.from_string("Y"))) == "+iZ"

    def test_zx_is_iy(self):
        assert str(PauliOperator.from_string("Z") * PauliOperator.from_string("X")) == "+iY"

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            multiply(PauliOperator.from_string("X"), PauliOperator.from_string("XX"))

    @given(pauli_pairs())
    def test_matches_dense(self, pair):
        p, q = pair
        assert np.allclose(to_matrix(p * q), to_matrix(p) @ to_matrix(q))

    @given(paulis())
    def test_square_is_plus_minus_identity(self, p):
        sq = p * p
        assert sq.x == 0 and sq.z == 0
        assert sq.phase == (2 * p.phase) % 4

    @given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
    def test_product_phase_antisymmetry(self, x1, z1, x2, z2):
        a = product_phase(x1, z1, x2, z2)
        b = product_phase(x2, z2, x1, z1)
        anti = ((x1 & z2) ^ (z1 & x2)).bit_count() & 1
        assert (a - b) % 4 == 2 * anti


class TestCommutes:
    def test_single_qubit(self):
        x, z = PauliOperator.from_string("X"), PauliOperator.from_string("Z")
        assert not commutes(x, z)
        assert commutes(x, x)

    def test_two_anticommuting_positions(self):
        assert commutes(PauliOperator.from_string("XZ"), PauliOperator.from_string("ZX"))

    @given(pauli_pairs())
    def test_matches_dense(self, pair):
        p, q = pair
        a, b = to_matrix(p), to_matrix(q)
        assert commutes(p, q) == np.allclose(a @ b, b @ a)


class TestConjugate:
    def test_h_swaps_x_and_z(self):
        assert str(conjugate_single(PauliOperator.from_string("X"), "H", (0,))) == "+Z"
        assert str(conjugate_single(PauliOperator.from_string("Y"), "H", (0,))) == "-Y"

    def test_cnot_sign(self):
        # Z_0 X_1 maps to (Z_0 Z_1)(X_0 X_1) = -Y_0 Y_1
        assert str(conjugate_single(PauliOperator.from_string("ZX"), "CNOT", (1, 0))) == "-YY"

    @given(st.data())
    def test_cnot_matches_dense(self, data):
        p = data.draw(paulis(2))
        qs = data.draw(st.sampled_from([(0, 1), (1, 0)]))
        u = gate_unitary("CNOT", qs, 2)
        assert np.allclose(to_matrix(conjugate_single(p, "CNOT", qs)), u @ to_matrix(p) @ u.conj().T)

    def test_cnot_spreads_x(self):
        assert str(conjugate_single(PauliOperator.from_string("XI"), "CNOT", (0, 1))) == "+XX"
        assert str(conjugate_single(PauliOperator.from_string("IZ"), "CNOT", (0, 1))) == "+ZZ"

    def test_phase_gate(self):
        assert str(conjugate_single(PauliOperator.from_string("X"), "P", (0,))) == "+Y"
        assert str(conjugate_single(PauliOperator.from_string("X"), "PDG", (0,))) == "-Y"

    def test_rejects_non_clifford(self):
        with pytest.raises(ValueError):
            conjugate_single(PauliOperator.from_string("X"), "T", (0,))

    def test_qubit_range(self):
        with pytest.raises(IndexError):
            conjugate_single(PauliOperator.from_string("X"), "H", (3,))

    @given(st.data())
    def test_matches_dense(self, data):
        p = data.draw(paulis())
        kinds = ["H", "P", "PDG", "X", "Y", "Z"] + (["CNOT"] if p.n > 1 else [])
        kind = data.draw(st.sampled_from(kinds))
        if kind == "CNOT":
            qs = tuple(data.draw(st.permutations(range(p.n)))[:2])
        else:
            qs = (data.draw(st.integers(0, p.n - 1)),)
        u = gate_unitary(kind, qs, p.n)
        expect = u @ to_matrix(p) @ u.conj().T
        assert np.allclose(to_matrix(conjugate_single(p, kind, qs)), expect)
