import csv
import json
import subprocess
import sys

import pytest

from oamwalk.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    emit_spectrum_table,
    records_from_json,
    records_to_json,
    run_cli,
)
from oamwalk.ring import IterationRecord


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def by_iteration(rows, n):
    return {int(r["ell"]): float(r["probability_or_power"]) for r in rows if int(r["iteration"]) == n}


def test_ideal_csv(tmp_path):
    out = tmp_path / "p.csv"
    assert run_cli(["--mode", "ideal", "--steps", "100", "--coin", "symmetric", "--output", str(out)]) == 0
    rows = read_csv(out)
    assert by_iteration(rows, 1) == pytest.approx({-1: 0.5, 1: 0.5}, abs=1e-12)
    for n in (1, 50, 100):
        assert sum(by_iteration(rows, n).values()) == pytest.approx(1, abs=1e-10)


def test_fig1_peaks_move_outward(tmp_path):
    out = tmp_path / "fig1.csv"
    assert run_cli(["--mode", "ideal", "--steps", "30", "--output", str(out)]) == 0
    rows = read_csv(out)
    peaks = []
    for n in (10, 20, 30):
        d = by_iteration(rows, n)
        peaks.append((min(d, key=lambda e: -d[e] if e < 0 else 0), max(d, key=lambda e: d[e] if e > 0 else 0)))
    lefts, rights = zip(*peaks)
    assert list(lefts) == sorted(lefts, reverse=True)
    assert list(rights) == sorted(rights)


def test_ring_csv(tmp_path):
    out = tmp_path / "ring.csv"
    assert run_cli(["--mode", "ring", "--steps", "20", "--mu", "0.5", "--output", str(out)]) == 0
    rows = read_csv(out)
    assert set(rows[0]) == {"iteration", "ell", "probability_or_power", "detected_power", "clipped_power"}
    for r in rows:
        n = int(r["iteration"])
        assert float(r["detected_power"]) == pytest.approx(0.25 * 0.5 ** (n - 1), abs=1e-12)
    assert {int(r["iteration"]) for r in rows} == set(range(1, 21))


def test_hom_json(tmp_path):
    out = tmp_path / "hom.json"
    assert run_cli(["--mode", "hom", "--format", "json", "--output", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["coincidence_amplitude"] == 0
    assert rep["distinguishable_coincidence_probability"] == pytest.approx(0.5)
    assert rep["norm"] == pytest.approx(1)


@pytest.mark.parametrize("mode", ["jones", "coherent"])
def test_other_modes(tmp_path, mode):
    out = tmp_path / "x.csv"
    assert run_cli(["--mode", mode, "--steps", "5", "--alpha", "2", "--output", str(out)] if mode == "coherent"
                   else ["--mode", mode, "--steps", "5", "--output", str(out)]) == 0
    total = 4.0 if mode == "coherent" else 1.0
    assert sum(by_iteration(read_csv(out), 5).values()) == pytest.approx(total)


@pytest.mark.parametrize(
    "argv",
    [
        ["--mode", "quantum"],
        ["--mode", "ideal", "--q", "0.3"],
        ["--mode", "ring", "--mu", "1.5"],
        ["--mode", "ring", "--mu", "0"],
        ["--mode", "ring"],
        ["--mode", "ideal", "--mu", "0.5"],
        ["--mode", "ideal", "--coin", "sideways"],
        ["--mode", "ideal", "--steps", "0"],
        ["--mode", "hom", "--format", "csv"],
        ["--mode", "hom", "--format", "json", "--q", "1"],
        ["--mode", "ideal", "--steps", "notanumber"],
    ],
)
def test_bad_config(tmp_path, argv, capsys):
    code = run_cli(argv + ["--output", str(tmp_path / "o.csv")])
    assert code == EXIT_CONFIG
    assert capsys.readouterr().err


def test_bad_config_names_field(tmp_path, capsys):
    run_cli(["--mode", "ring", "--mu", "2", "--output", str(tmp_path / "o")])
    assert "mu" in capsys.readouterr().err


def test_unwritable(tmp_path):
    code = run_cli(["--mode", "ideal", "--steps", "2", "--output", str(tmp_path / "no" / "dir.csv")])
    assert code == EXIT_IO


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "o.json"
    cfg.write_text(json.dumps({"mode": "ring", "steps": 4, "mu": 0.9, "window-halfwidth": 2,
                               "output": str(out), "format": "json"}))
    assert run_cli(["--config", str(cfg)]) == EXIT_OK
    recs = records_from_json(out.read_text())
    assert [r.iteration for r in recs] == [1, 2, 3, 4]
    assert recs[0].detected_power == pytest.approx(0.81)


def test_config_file_unknown_field(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mode": "ideal", "colour": "red", "output": "x"}))
    assert run_cli(["--config", str(cfg)]) == EXIT_CONFIG


def test_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run_cli(["--mode", "ring", "--steps", "15", "--mu", "0.3", "--coin", "random",
                        "--seed", "7", "--output", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    run_cli(["--mode", "ring", "--steps", "15", "--mu", "0.3", "--coin", "random", "--seed", "8", "--output", str(c)])
    assert c.read_bytes() != a.read_bytes()


def test_json_round_trip(tmp_path):
    out = tmp_path / "r.json"
    assert run_cli(["--mode", "ring", "--steps", "12", "--mu", "0.35", "--window-halfwidth", "3",
                    "--format", "json", "--output", str(out)]) == 0
    recs = records_from_json(out.read_text())
    assert records_to_json(recs) == out.read_text()
    assert any(r.clipped_power > 0 for r in recs)


def test_emit_rows(tmp_path):
    rec = [IterationRecord(1, 1.0, {-1: 0.5, 1: 0.5})]
    path = emit_spectrum_table(rec, "csv", tmp_path / "t.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,ell,probability_or_power"
    assert len(lines) == 3


def test_emit_ring_columns(tmp_path):
    rec = [IterationRecord(1, 0.25, {0: 0.2}, 0.05)]
    text = emit_spectrum_table(rec, "csv", tmp_path / "t.csv", ring_columns=True).read_text()
    assert text.splitlines()[0].endswith("detected_power,clipped_power")


def test_emit_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_spectrum_table([], "csv", tmp_path / "t.csv")


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "oamwalk", "--mode", "ideal", "--steps", "3", "--output", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
