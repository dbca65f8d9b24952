import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from aqftlab.cli import main
from aqftlab.phase import Phase
from aqftlab.semiclassical import TrialSpec, success_probability_exact

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def _no_format_env(monkeypatch):
    monkeypatch.delenv("AQFTLAB_FORMAT", raising=False)


def call(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def golden(name):
    return (GOLDEN / name).read_text()


def test_emit_one_qubit():
    assert call("emit-circuit", "--n", "1") == (0, "n=1 label=qft\nH 1\n")


@pytest.mark.parametrize("argv,name", [
    (("--n", "3"), "emit_n3.txt"),
    (("--n", "5", "--m", "3"), "emit_n5_m3.txt"),
])
def test_emit_golden(argv, name):
    code, text = call("emit-circuit", *argv)
    assert code == 0 and text == golden(name)


def test_emit_five_three_has_twelve_gates():
    _, text = call("emit-circuit", "--n", "5", "--m", "3")
    gates = text.splitlines()[1:]
    assert len(gates) == 12
    assert sum(g.startswith("H ") for g in gates) == 5


def test_emit_inverse():
    code, text = call("emit-circuit", "--n", "2", "--inverse")
    assert code == 0 and text == "n=2 label=inverse_qft\nH 2\nCR 2 2 1 inv\nH 1\n"


@pytest.mark.parametrize("argv", [
    ("emit-circuit", "--n", "0"),
    ("emit-circuit", "--n", "25"),
    ("emit-circuit", "--n", "4", "--m", "5"),
    ("emit-circuit", "--n", "4", "--m", "1"),
    ("emit-circuit", "--n", "x"),
    ("emit-circuit", "--n", "3", "--bogus"),
    ("emit-circuit",),
    ("frobnicate",),
    (),
])
def test_usage_errors_exit_two(argv, capsys):
    code, _ = call(*argv)
    assert code == 2
    assert capsys.readouterr().err


@pytest.mark.parametrize("name,n,m", [("bounds_4_4.csv", 4, 4), ("bounds_16_6.csv", 16, 6)])
def test_bounds_golden(name, n, m):
    code, text = call("bounds", "--n", str(n), "--m", str(m))
    assert code == 0 and text == golden(name)


def test_bounds_values():
    _, text = call("bounds", "--n", "4", "--m", "4")
    row = next(csv.DictReader(io.StringIO(text)))
    assert abs(float(row["fixed_const"]) - 0.342785) < 5e-7
    _, text = call("bounds", "--n", "16", "--m", "6")
    row = next(csv.DictReader(io.StringIO(text)))
    assert float(row["barenco"]) < float(row["aqft_bound"])


def test_bounds_small_register_warns(capsys):
    code, text = call("bounds", "--n", "3", "--m", "2")
    assert code == 0 and text == golden("bounds_3_2.csv")
    row = next(csv.DictReader(io.StringIO(text)))
    assert row["fixed_n"] == row["fixed_const"] == "NA"
    assert "warning" in capsys.readouterr().err


def test_bounds_json_and_text():
    code, text = call("bounds", "--n", "64", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["m"] == 8 and doc["n"] == 64
    code, text = call("bounds", "--n", "64", "--format", "text")
    assert "aqft_bound: " in text


def test_sweep_golden_csv(capsys):
    code, text = call("sweep", "--n", "8", "--log-rule", "2", "--grid", "257", "--format", "csv")
    assert code == 0
    assert text == golden("sweep_n8_grid257.csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 258 and {len(r) for r in rows} == {8}
    err = capsys.readouterr().err
    assert err == golden("sweep_n8_grid257.stderr")
    assert "rows=257" in err and "violations=0" in err


def test_sweep_json_is_strict():
    code, text = call("sweep", "--n", "4,5", "--grid", "17", "--worst-case", "--format", "json")
    assert code == 0
    data = json.loads(text, parse_constant=lambda c: pytest.fail(f"non-strict JSON {c}"))
    assert data[-1]["summary"] is True
    assert data[-1]["rows"] == len(data) - 1


def test_sweep_config_file(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("n=8\nlog_rule=2\ngrid=257\n")
    code, text = call("sweep", "--config", str(cfg))
    assert code == 0 and text == golden("sweep_n8_grid257.csv")
    assert call("sweep", "--config", str(tmp_path / "missing.cfg"))[0] == 2
    cfg.write_text("n=8\nbogus=1\n")
    assert call("sweep", "--config", str(cfg))[0] == 2


def test_sweep_workers_do_not_change_output():
    args = ("sweep", "--n", "4,6,9", "--grid", "65", "--worst-case", "--format", "json")
    assert call(*args) == call(*args, "--workers", "3")


def test_sweep_violation_exit_one(monkeypatch):
    import aqftlab.experiments as ex
    real = ex._sweep_one

    def broken(args):
        rows = real(args)
        from dataclasses import replace
        return [replace(rows[0], exact_p=0.0)] + rows[1:]

    monkeypatch.setattr(ex, "_sweep_one", broken)
    code, _ = call("sweep", "--n", "4", "--grid", "9")
    assert code == 1


def test_sweep_needs_input():
    assert call("sweep")[0] == 2
    assert call("sweep", "--n", "4", "--m", "3", "--log-rule", "1")[0] == 2


def test_trial_exact_phase():
    code, text = call("trial", "--n", "4", "--m", "4", "--phi", "0.0101b")
    assert code == 0 and text.splitlines()[-1] == "P = 1"


def test_trial_matches_library():
    code, text = call("trial", "--n", "8", "--m", "5", "--phi", "0.3217")
    spec = TrialSpec(8, 5, Phase.parse("0.3217", 40))
    assert code == 0
    assert text.splitlines()[-1] == f"P = {success_probability_exact(spec):.12g}"
    assert "rounded from decimal input" in text


def test_trial_per_bit_row():
    code, text = call("trial", "--n", "4", "--m", "2", "--phi", "5/2^4")
    assert code == 0
    row = [line for line in text.splitlines() if line.startswith("1\t")]
    assert row and row[0].split("\t")[3] == "1/16"
    code, text = call("trial", "--n", "4", "--m", "2", "--phi", "5/2^4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["p"] for r in rows] == ["4", "3", "2", "1"]
    assert rows[-1]["delta"] == "1/16"


def test_trial_json_and_criterion():
    code, text = call("trial", "--n", "5", "--m", "3", "--phi", "0.40625", "--criterion", "two",
                      "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["criterion"] == "two" and doc["estimate"] == "01101"
    assert len(doc["qualifying"]) == 1


@pytest.mark.parametrize("phi", ["abc", "1/3", "0.2b", "1/2^x", ""])
def test_trial_bad_phase(phi):
    assert call("trial", "--n", "4", "--phi", phi)[0] == 2


def test_montecarlo_is_byte_stable():
    args = ("montecarlo", "--n", "8", "--m", "5", "--phi", "0.3217", "--samples", "100000",
            "--seed", "42")
    first = call(*args)
    assert first[0] == 0
    assert call(*args) == first
    assert call(*args, "--workers", "4") == first
    row = next(csv.DictReader(io.StringIO(first[1])))
    assert row["seed"] == "42" and row["samples"] == "100000"


def test_montecarlo_requires_seed():
    assert call("montecarlo", "--n", "8", "--phi", "0.3")[0] == 2
    assert call("montecarlo", "--n", "8", "--phi", "0.3", "--seed", "-1")[0] == 2
    assert call("montecarlo", "--n", "8", "--phi", "0.3", "--seed", "1", "--samples", "5")[0] == 2


def test_gatecount_rows():
    code, text = call("gatecount", "--n", "4,16,64,256", "--log-rule", "2")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and len(rows) == 4
    got = [(int(r["n"]), int(r["m"]), int(r["qft_rotations"]), int(r["aqft_rotations"]))
           for r in rows]
    assert got == [(4, 4, 6, 6), (16, 6, 120, 65), (64, 8, 2016, 420), (256, 10, 32640, 2259)]
    code, text = call("gatecount", "--n", "1024", "--format", "json")
    assert json.loads(text)[0]["aqft_rotations"] == 11198


def test_simulate_agrees():
    code, text = call("simulate", "--n", "6", "--m", "3", "--phi", "0.3217", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and float(doc["tv_distance"]) <= 1e-10
    assert len(doc["outcomes"]) == 16
    assert call("simulate", "--n", "13", "--phi", "0.1")[0] == 2


def test_format_from_environment(monkeypatch):
    monkeypatch.setenv("AQFTLAB_FORMAT", "json")
    code, text = call("bounds", "--n", "8")
    assert code == 0 and json.loads(text)["m"] == 5
    monkeypatch.setenv("AQFTLAB_FORMAT", "xml")
    assert call("bounds", "--n", "8")[0] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aqftlab", "emit-circuit", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == golden("emit_n3.txt")
    proc = subprocess.run([sys.executable, "-m", "aqftlab", "bounds"], capture_output=True,
                          text=True)
    assert proc.returncode == 2 and "required" in proc.stderr
