import json
import subprocess
import sys

import numpy as np
import pytest

from framesim.circuit import Circuit, Gate, gen_qft, write
from framesim.cli import EXIT_CODES, main, parse_range

from conftest import cuccaro_superposed
from test_circuit import qft_closed_form

BELL = "qubits 2\nh 0\ncnot 0 1\nmeasure 0\nmeasure 1\n"


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--json", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


@pytest.fixture
def bell_file(tmp_path):
    p = tmp_path / "bell.qc"
    p.write_text(BELL)
    return p


class TestParseRange:
    def test_forms(self):
        assert parse_range("5") == [5]
        assert parse_range("2,4") == [2, 4]
        assert parse_range("4..7") == [4, 5, 6, 7]

    def test_empty_range(self):
        with pytest.raises(ValueError):
            parse_range("5..3")


class TestRun:
    def test_bell_verified(self, bell_file, tmp_path):
        code, rep = run_json(["run", str(bell_file), "--verify", "--amplitudes"], tmp_path)
        assert code == EXIT_CODES["ok"]
        assert rep["verified"] is True
        x = rep["stats"]["outcomes"][0]
        assert rep["stats"]["outcomes"] == [x, x]
        assert [a[0] for a in rep["amplitudes"]] == [f"{x}{x}"]

    def test_stdout_report(self, bell_file, capsys):
        assert main(["run", str(bell_file)]) == 0
        captured = capsys.readouterr()
        rep = json.loads(captured.out)
        assert rep["command"] == "run" and rep["qubits"] == 2
        assert "max_states" in captured.err
        assert "runtime_ms" not in rep["stats"]

    def test_timing_flag(self, bell_file, tmp_path):
        _, rep = run_json(["run", str(bell_file), "--timing"], tmp_path)
        assert rep["stats"]["runtime_ms"] >= 0

    def test_qft10_peak(self, tmp_path):
        p = tmp_path / "qft10.qc"
        p.write_text(write(Circuit(10, [Gate("X", (q,)) for q in range(10)] + gen_qft(10).gates)))
        code, rep = run_json(["run", str(p)], tmp_path)
        assert code == 0
        assert rep["stats"]["max_states"] == 512

    def test_single_frame_cuccaro8(self, tmp_path):
        p = tmp_path / "add8.qc"
        p.write_text(write(cuccaro_superposed(8)))
        _, multi = run_json(["run", str(p)], tmp_path, "m.json")
        _, single = run_json(["run", str(p), "--single-frame"], tmp_path, "s.json")
        assert single["stats"]["max_frames"] == 1
        assert single["stats"]["max_states"] > multi["stats"]["max_states"]

    def test_single_frame_still_verifies(self, tmp_path):
        p = tmp_path / "add2.qc"
        p.write_text(write(cuccaro_superposed(2)))
        code, rep = run_json(["run", str(p), "--single-frame", "--verify"], tmp_path)
        assert code == 0 and rep["verified"] is True

    @pytest.mark.parametrize("workers", ["2", "8"])
    def test_workers_byte_identical(self, tmp_path, workers):
        p = tmp_path / "c.qc"
        p.write_text(write(cuccaro_superposed(3)) + "measure 0\nmeasure 3\n")
        main(["run", str(p), "--seed", "11", "--amplitudes", "--json", str(tmp_path / "a.json")])
        main(["run", str(p), "--seed", "11", "--amplitudes", "--workers", workers, "--json", str(tmp_path / "b.json")])
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


class TestExitCodes:
    def test_not_found(self, tmp_path):
        assert main(["run", str(tmp_path / "missing.qc")]) == EXIT_CODES["not_found"] == 3

    def test_parse_error(self, tmp_path, capsys):
        p = tmp_path / "bad.qc"
        p.write_text("qubits 2\nfoo 0\n")
        assert main(["run", str(p)]) == EXIT_CODES["parse"] == 4
        assert "line 2" in capsys.readouterr().err

    def test_capacity(self, tmp_path):
        p = tmp_path / "wide.qc"
        p.write_text("qubits 21\nh 0\n")
        assert main(["run", str(p), "--verify"]) == EXIT_CODES["capacity"] == 5
        assert main(["run", str(p)]) == 0

    def test_mismatch(self, bell_file, tmp_path, monkeypatch):
        from framesim import cli

        monkeypatch.setattr(cli.dense, "equal_up_to_global_phase", lambda a, b: False)
        code, rep = run_json(["run", str(bell_file), "--verify"], tmp_path)
        assert code == EXIT_CODES["mismatch"] == 6
        assert rep["verified"] is False

    def test_usage(self, bell_file):
        with pytest.raises(SystemExit) as err:
            main(["bench", "nosuch"])
        assert err.value.code == EXIT_CODES["usage"]
        assert main(["run", str(bell_file), "--workers", "0"]) == EXIT_CODES["usage"]
        assert main(["bench", "qft", "--n", "0"]) == EXIT_CODES["usage"]

    def test_help_lists_codes(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        out = capsys.readouterr().out
        for code in EXIT_CODES.values():
            assert f"  {code}  " in out
        assert "FRAMESIM_WORKERS" in out


class TestBench:
    def test_qft3_closed_form(self, tmp_path):
        code, rep = run_json(["bench", "qft", "--n", "3", "--amplitudes"], tmp_path)
        assert code == 0
        want = qft_closed_form("111")
        got = np.zeros(8, dtype=complex)
        for bits, re, im in rep["instances"][0]["amplitudes"]:
            got[int(bits, 2)] = re + 1j * im
        assert np.max(np.abs(got - want)) < 1e-9

    def test_random_stays_single(self, tmp_path):
        code, rep = run_json(["bench", "random", "--n", "100", "--beta", "0.6", "--seed", "1"], tmp_path)
        assert code == 0
        (inst,) = rep["instances"]
        assert inst["stats"]["max_frames"] == 1 and inst["stats"]["max_states"] == 1
        assert inst["qubits"] == 100 and len(inst["stats"]["outcomes"]) == 100

    def test_random_grid(self, tmp_path):
        _, rep = run_json(
            ["bench", "random", "--n", "4,6", "--beta", "0.6", "1.2", "--instances", "2", "--verify"], tmp_path
        )
        assert len(rep["instances"]) == 8
        assert all(i["verified"] for i in rep["instances"])

    def test_cuccaro_verify(self, tmp_path):
        code, rep = run_json(["bench", "cuccaro", "--n", "1..3", "--verify"], tmp_path)
        assert code == 0
        states = [i["stats"]["max_states"] for i in rep["instances"]]
        assert states == sorted(states)
        assert all(i["verified"] for i in rep["instances"])

    def test_seed_reproducible(self, tmp_path):
        argv = ["bench", "random", "--n", "8", "--instances", "3", "--seed", "5"]
        _, a = run_json(argv, tmp_path, "a.json")
        _, b = run_json(argv, tmp_path, "b.json")
        _, c = run_json(argv[:-1] + ["6"], tmp_path, "c.json")
        assert a == b and a != c


class TestModuleEntry:
    def test_python_m(self, bell_file):
        proc = subprocess.run(
            [sys.executable, "-m", "framesim", "run", str(bell_file), "--verify"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["verified"] is True
