from __future__ import annotations

import csv
import io
import math
import subprocess
import sys

import pytest

from squidqdyn.cli import COLUMNS, main, parse_args

FAST = ["--t-steps", "101", "--n-random-probes", "2", "--jobs", "1"]


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_capacitive_cnot(tmp_path, capsys):
    out = tmp_path / "cap.csv"
    assert main(["capacitive-cnot", "--delta", "1.0", "--out", str(out)]) == 0
    line = capsys.readouterr().out
    assert "PASS" in line and "gate_time=3.14159265359" in line
    (row,) = read_rows(out)
    assert float(row["t"]) == pytest.approx(math.pi, rel=1e-15)
    assert float(row["max_leakage"]) <= 1e-12


def test_inductive_eigs(tmp_path, capsys):
    out = tmp_path / "eigs.csv"
    assert main(["inductive-eigs", "--ej1", "1", "--ej2", "1", "--el", "1", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "2.2360679775" in text and "PASS" in text
    vals = sorted(float(r["notes"].split("eigenvalue=")[1]) for r in read_rows(out))
    assert vals == pytest.approx([-math.sqrt(5), -1, 1, math.sqrt(5)], abs=1e-15)


def test_single_qubit_corrected_sweep(tmp_path, capsys):
    out = tmp_path / "sq.csv"
    code = main(["single-qubit-error", "--ej-over-ech", "0.01,0.02,0.04,0.08", "--nx", "0.5",
                 "--effective", "corrected-generic", "--out", str(out), *FAST])
    assert code == 0
    rows = read_rows(out)
    assert len(rows) == 4
    slope = float(rows[0]["notes"].split("slope=")[1])
    assert slope >= 3.5
    assert "PASS" in capsys.readouterr().out


def test_threshold_failure_exit_code(tmp_path):
    # away from the degeneracy the corrected model only reaches third order
    code = main(["single-qubit-error", "--ej-over-ech", "0.01,0.02,0.04,0.08", "--nx", "0.4",
                 "--effective", "corrected-generic", "--out", str(tmp_path / "x.csv"), *FAST])
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["single-qubit-error", "--trunc", "4"],
        ["single-qubit-error", "--t-steps", "1"],
        ["single-qubit-error", "--ej-over-ech", "a,b"],
        ["single-qubit-error", "--effective", "third-order"],
        ["single-qubit-error", "--jobs", "0"],
        [],
    ],
)
def test_usage_errors(argv, tmp_path, capsys):
    assert main([*argv, "--out", str(tmp_path / "u.csv")] if argv else []) == 1
    assert "error" in capsys.readouterr().err


def test_literal_mode_singular_is_usage_error(tmp_path):
    code = main(["single-qubit-error", "--nx", "0", "--effective", "corrected-paper",
                 "--out", str(tmp_path / "p.csv"), *FAST])
    assert code == 1


def test_byte_identical_output(tmp_path):
    argv = ["single-qubit-error", "--ej-over-ech", "0.02,0.04,0.08", "--nx", "0.4,0.5",
            "--effective", "first-order", *FAST]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main([*argv, "--out", str(a)])
    main([*argv[:-2], "--jobs", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_csv_round_trip(tmp_path):
    out = tmp_path / "r.csv"
    main(["inductive-error", "--ej-over-ech", "0.04,0.08,0.16", "--effective", "first-order",
          "--out", str(out), *FAST])
    with open(out, newline="") as fh:
        reader = csv.reader(fh)
        assert tuple(next(reader)) == COLUMNS
        rows = list(reader)
    assert len(rows) == 3
    for row in rows:
        for name, cell in zip(COLUMNS, row):
            if cell and name not in ("scenario", "effective_mode", "notes"):
                x = float(cell)
                assert math.isfinite(x)
                assert format(x, ".17g") == cell


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# sweep\nej-over-ech = 0.02,0.04,0.08\nnx=0.4  # off degeneracy\nt_steps=101\n")
    args = parse_args(["single-qubit-error", "--config", str(cfg)])
    assert args.ej_over_ech == [0.02, 0.04, 0.08] and args.nx == [0.4] and args.t_steps == 101
    args = parse_args(["single-qubit-error", "--config", str(cfg), "--nx", "0.3"])
    assert args.nx == [0.3] and args.t_steps == 101


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    assert main(["single-qubit-error", "--config", str(bad)]) == 1
    bad.write_text("just words\n")
    assert main(["single-qubit-error", "--config", str(bad)]) == 1
    assert main(["single-qubit-error", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("SQUIDQDYN_SEED", "7")
    assert parse_args(["capacitive-cnot"]).seed == 7
    assert parse_args(["capacitive-cnot", "--seed", "3"]).seed == 3
    monkeypatch.setenv("SQUIDQDYN_SEED", "x")
    assert main(["capacitive-cnot", "--out", "-"]) == 1
    monkeypatch.delenv("SQUIDQDYN_SEED")
    assert parse_args(["capacitive-cnot"]).seed == 42


def test_seed_reaches_probe_set(tmp_path, monkeypatch):
    import squidqdyn.experiments as ex

    seen = []
    real = ex.ProbeSet.build

    def spy(dim, n_random=16, seed=42):
        seen.append(seed)
        return real(dim, n_random, seed)

    monkeypatch.setattr(ex.ProbeSet, "build", spy)
    main(["single-qubit-error", "--ej-over-ech", "0.08", "--seed", "9", "--out", str(tmp_path / "s.csv"), *FAST])
    assert seen == [9]


def test_stdout_output(capsys):
    assert main(["fidelity-scan", "--system", "capacitive", "--t-steps", "51", "--out", "-"]) == 0
    text = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(text.split("\nfidelity-scan ")[0] + "\n")))
    assert float(rows[0]["fidelity"]) >= 1 - 1e-9


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "squidqdyn", "inductive-eigs", "--out", str(tmp_path / "e.csv")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
