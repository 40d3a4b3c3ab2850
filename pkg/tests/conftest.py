import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from framesim import dense
from framesim.circuit import Circuit, Gate, cuccaro_layout, gen_cuccaro

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (verdict, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def report(criterion: int, ok: bool, detail: str) -> None:
    prev = ACCEPTANCE.get(criterion)
    verdict = "PASS" if ok and (prev is None or prev[0] == "PASS") else "FAIL"
    text = detail if prev is None else f"{prev[1]}; {detail}"
    ACCEPTANCE[criterion] = (verdict, text)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {verdict} - {detail}")


def dense_of(mf_or_frame) -> dense.DenseState:
    vec = mf_or_frame.state_vector()
    return dense.DenseState(int(np.log2(len(vec))), vec)


def cuccaro_with_inputs(n: int, a: int, b: int) -> tuple[Circuit, dict]:
    """Adder circuit preceded by X gates that load ``a`` and ``b``."""
    lay = cuccaro_layout(n)
    c = gen_cuccaro(n)
    prep = [Gate("X", (lay["a"][i],)) for i in range(n) if (a >> i) & 1]
    prep += [Gate("X", (lay["b"][i],)) for i in range(n) if (b >> i) & 1]
    return Circuit(c.n, prep + c.gates), lay


def cuccaro_superposed(n: int) -> Circuit:
    """Adder with H on every input qubit."""
    lay = cuccaro_layout(n)
    c = gen_cuccaro(n)
    return Circuit(c.n, [Gate("H", (q,)) for q in lay["a"] + lay["b"]] + c.gates)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
