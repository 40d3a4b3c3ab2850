import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framesim import dense
from framesim.circuit import (
    AngleError,
    ArityError,
    Circuit,
    Gate,
    QubitRangeError,
    UnknownGateError,
    classical_eval,
    cuccaro_layout,
    gen_cuccaro,
    gen_qft,
    gen_random_stabilizer,
    gen_toffoli_decomposed,
    parse,
    random_circuit,
    substitute_toffoli,
    write,
)


def qft_closed_form(bits: str) -> np.ndarray:
    """Product-form QFT output without the final qubit reversal: qubit i
    carries phase 2 pi * 0.x_i x_{i+1} ... x_{n-1}."""
    n = len(bits)
    x = [int(b) for b in bits]
    factors = []
    for i in range(n):
        frac = sum(x[k] * 2.0 ** -(k - i + 1) for k in range(i, n))
        factors.append(np.array([1, np.exp(2j * math.pi * frac)]) / math.sqrt(2))
    out = np.ones(1)
    for f in factors:
        out = np.kron(out, f)
    return out


def adder_output(n: int, a: int, b: int) -> tuple[int, list[int]]:
    lay = cuccaro_layout(n)
    c = gen_cuccaro(n)
    bits = [0] * c.n
    for i in range(n):
        bits[lay["a"][i]] = (a >> i) & 1
        bits[lay["b"][i]] = (b >> i) & 1
    out = classical_eval(c, bits)
    total = sum(out[lay["b"][i]] << i for i in range(n)) | (out[lay["carry"]] << n)
    return total, out


class TestGate:
    def test_arity(self):
        with pytest.raises(ValueError):
            Gate("CNOT", (0,))

    def test_distinct(self):
        with pytest.raises(ValueError):
            Gate("TOF", (0, 0, 1))

    def test_crz_needs_angle(self):
        with pytest.raises(ValueError):
            Gate("CRZ", (0, 1))

    def test_circuit_range(self):
        with pytest.raises(ValueError):
            Circuit(1, [Gate("H", (1,))])


class TestParse:
    def test_bell(self):
        c = parse("qubits 2\nh 0\ncnot 0 1\n")
        assert c.n == 2
        assert c.gates == [Gate("H", (0,)), Gate("CNOT", (0, 1))]

    def test_qft3_text(self):
        text = "qubits 3\nh 0\ncrz 1 0 pi/2\ncrz 2 0 pi/4\nh 1\ncrz 2 1 pi/2\nh 2\n"
        assert parse(text).gates == gen_qft(3).gates

    def test_comments_case_crlf(self):
        c = parse("# header\r\nQUBITS 2\r\nH 0  # note\r\n\r\nMeasure 1\r\n")
        assert [g.kind for g in c.gates] == ["H", "MEASURE"]

    def test_decimal_and_negative_angles(self):
        c = parse("qubits 2\ncrz 0 1 0.25\ncrz 0 1 -pi/8\n")
        assert c.gates[0].angle == 0.25
        assert c.gates[1].angle == -math.pi / 8

    def test_unknown_gate_position(self):
        with pytest.raises(UnknownGateError) as err:
            parse("qubits 1\nfoo 0")
        assert err.value.line == 2 and err.value.column == 1

    def test_arity_error(self):
        with pytest.raises(ArityError):
            parse("qubits 2\ncnot 0\n")

    def test_range_error(self):
        with pytest.raises(QubitRangeError) as err:
            parse("qubits 2\nh 0\nx 5\n")
        assert err.value.line == 3

    def test_angle_error(self):
        with pytest.raises(AngleError):
            parse("qubits 2\ncrz 0 1 pi/x\n")

    @pytest.mark.parametrize(
        "circuit",
        [gen_qft(5), gen_cuccaro(3), gen_random_stabilizer(6, 1.0, seed=2)],
        ids=["qft", "cuccaro", "random"],
    )
    def test_roundtrip(self, circuit):
        again = parse(write(circuit))
        assert again.n == circuit.n
        assert again.gates == circuit.gates

    @given(st.integers(0, 2**31))
    def test_roundtrip_random(self, seed):
        c = random_circuit(4, 15, np.random.default_rng(seed))
        assert parse(write(c)).gates == c.gates


class TestRandomStabilizer:
    def test_gate_count(self):
        c = gen_random_stabilizer(100, 0.6, seed=1)
        assert len(c) - c.count("MEASURE") == 399
        assert [g.qubits[0] for g in c.gates if g.kind == "MEASURE"] == list(range(100))

    def test_deterministic(self):
        assert gen_random_stabilizer(20, 1.0, seed=4).gates == gen_random_stabilizer(20, 1.0, seed=4).gates

    def test_only_stabilizer_gates(self):
        c = gen_random_stabilizer(30, 1.2, seed=0)
        assert {g.kind for g in c.gates} <= {"H", "P", "CNOT", "MEASURE"}

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            gen_random_stabilizer(1, 1.0)


class TestCuccaro:
    def test_width(self):
        assert gen_cuccaro(4).n == 10

    def test_example_sum(self):
        total, _ = adder_output(3, 0b011, 0b001)
        assert total == 0b100

    def test_zeros(self):
        total, out = adder_output(3, 0, 0)
        assert total == 0 and not any(out)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exhaustive(self, n):
        lay = cuccaro_layout(n)
        for a, b in itertools.product(range(1 << n), repeat=2):
            total, out = adder_output(n, a, b)
            assert total == a + b
            assert out[lay["ancilla"]] == 0
            assert sum(out[lay["a"][i]] << i for i in range(n)) == a

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            gen_cuccaro(0)


class TestQFT:
    def test_sizes(self):
        assert [g.kind for g in gen_qft(1).gates] == ["H"]
        assert len(gen_qft(3)) == 6
        assert len(gen_qft(10)) == 55

    @pytest.mark.parametrize("n", range(1, 9))
    def test_gate_count_formula(self, n):
        assert len(gen_qft(n)) == n * (n + 1) // 2

    @pytest.mark.parametrize("bits", ["1", "10", "111", "0110", "11111"])
    def test_closed_form_matches_oracle(self, bits):
        ref, _ = dense.run(gen_qft(len(bits)), state=dense.DenseState.basis(bits))
        assert np.allclose(ref.amps, qft_closed_form(bits), atol=1e-12)


class TestToffoliDecomposition:
    def test_seven_t_gates(self):
        frag = gen_toffoli_decomposed(0, 1, 2)
        assert sum(g.kind in ("T", "TDG") for g in frag) == 7
        assert {g.kind for g in frag} <= {"H", "T", "TDG", "CNOT"}

    def test_truth_table(self):
        for i in range(8):
            state = dense.DenseState(3, np.eye(8)[i])
            for g in gen_toffoli_decomposed():
                state = dense.apply(state, g)
            want = dense.apply(dense.DenseState(3, np.eye(8)[i]), ("TOF", (0, 1, 2)))
            assert np.allclose(state.amps, want.amps)

    def test_rejects_repeats(self):
        with pytest.raises(ValueError):
            gen_toffoli_decomposed(0, 0, 1)

    def test_substitution_preserves_adder(self):
        sub = substitute_toffoli(gen_cuccaro(2))
        assert sub.count("TOF") == 0
        for a, b in itertools.product(range(4), repeat=2):
            lay = cuccaro_layout(2)
            bits = ["0"] * sub.n
            for i in range(2):
                bits[lay["a"][i]] = str((a >> i) & 1)
                bits[lay["b"][i]] = str((b >> i) & 1)
            state = dense.DenseState.basis("".join(bits))
            out, _ = dense.run(sub, state=state)
            idx = int(np.argmax(np.abs(out.amps)))
            got = format(idx, f"0{sub.n}b")
            total = sum(int(got[lay["b"][i]]) << i for i in range(2)) | (int(got[lay["carry"]]) << 2)
            assert total == a + b
            assert abs(out.amps[idx]) == pytest.approx(1)
