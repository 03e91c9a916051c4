import json
import math
from pathlib import Path

import pytest

from qcvz.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    load_config,
    main,
)


def run(outdir, *argv):
    return main([argv[0], "--out", str(outdir), *argv[1:]])


def test_unknown_command():
    assert main(["frobnicate"]) == EXIT_USAGE


def test_help():
    assert main([]) == EXIT_OK
    assert main(["--help"]) == EXIT_OK


def test_bad_flag_is_usage_error(tmp_path):
    assert main(["resources", "--no-such-flag"]) == EXIT_USAGE


def test_bad_config(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text("{not json")
    assert main(["resources", "-n", "10", "--config", str(p)]) == EXIT_CONFIG
    p.write_text(json.dumps({"qubits": []}))
    assert main(["resources", "-n", "10", "--config", str(p)]) == EXIT_CONFIG


def test_default_config_loads():
    cfg = load_config(None)
    assert len(cfg.qubits) == len(cfg.mixers) == len(cfg.resonators)


def test_resources_outputs(tmp_path):
    assert run(tmp_path, "resources", "-n", "1000000") == EXIT_OK
    data = json.loads((tmp_path / "resources.json").read_text())
    assert data["avg_pw_per_qubit"] == pytest.approx(110.96)
    assert data["cable_count"] == 250
    assert (tmp_path / "resources.txt").exists()
    meta = json.loads((tmp_path / "resources.json.meta.json").read_text())
    assert meta["command"] == "resources"
    assert meta["seed"] == 0


def test_resources_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "resources", "-n", "4000") == EXIT_OK
    assert run(b, "resources", "-n", "4000") == EXIT_OK
    assert (a / "resources.json").read_bytes() == (b / "resources.json").read_bytes()


def test_out_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("QCVZ_OUT_DIR", str(tmp_path / "envdir"))
    assert main(["resources", "-n", "10"]) == EXIT_OK
    assert (tmp_path / "envdir" / "resources.json").exists()


def test_compile_example_programs(tmp_path):
    prog = tmp_path / "prog.json"
    prog.write_text(
        json.dumps(
            {
                "qubits": [
                    ["x90", "x90"],
                    ["x90", "t", "x90", "s", "x90"],
                    ["x90", "h", "x90"],
                ]
            }
        )
    )
    assert run(tmp_path, "compile", "--program", str(prog)) == EXIT_OK
    sched = json.loads((tmp_path / "schedule.json").read_text())
    slots_q0 = [c["slot"] for c in sched["cycles"] if 0 in c["fired"]]
    assert slots_q0 == [0, 8]
    stats = json.loads((tmp_path / "schedule_stats.json").read_text())
    assert stats["cycles"] == len(sched["cycles"])
    assert (tmp_path / "schedule.csv").exists()


def test_compile_bad_gate_is_numeric_error(tmp_path):
    prog = tmp_path / "prog.json"
    prog.write_text(json.dumps({"qubits": [["x90", "cnot"]]}))
    assert run(tmp_path, "compile", "--program", str(prog)) == EXIT_NUMERIC


def test_compile_missing_program_is_config_error(tmp_path):
    assert run(tmp_path, "compile", "--program", str(tmp_path / "nope.json")) == EXIT_CONFIG


def test_spectrum_outputs(tmp_path):
    assert run(tmp_path, "spectrum") == EXIT_OK
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "freq_hz,power_db"
    assert len(lines) == 5
    on = {float(f): float(p) for f, p in (ln.split(",") for ln in lines[1:])}
    off_dir = tmp_path / "off"
    assert run(off_dir, "spectrum", "--off") == EXIT_OK
    lines = (off_dir / "spectrum.csv").read_text().splitlines()
    off = {float(f): float(p) for f, p in (ln.split(",") for ln in lines[1:])}
    f_diff = max(on, key=on.get)  # difference tone sits at 0 dB when on
    assert on[f_diff] - off[f_diff] == pytest.approx(28.5, abs=1e-9)
    assert (tmp_path / "crosstalk.csv").exists()


def test_rabi_and_plot(tmp_path):
    assert run(tmp_path, "rabi", "--tau-max-s", "1e-7") == EXIT_OK
    csv = tmp_path / "rabi.csv"
    assert csv.read_text().splitlines()[0] == "t_s,p1"
    assert run(tmp_path, "plot", "--csv", str(csv), "--kind", "line") == EXIT_OK
    svg = csv.with_suffix(".svg")
    assert svg.exists() and svg.read_text().startswith("<svg")
    # plotting is deterministic
    first = svg.read_bytes()
    assert run(tmp_path, "plot", "--csv", str(csv), "--kind", "line") == EXIT_OK
    assert svg.read_bytes() == first


def test_plot_bad_csv_is_numeric_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\nx,y\n")
    assert run(tmp_path, "plot", "--csv", str(bad), "--kind", "line") == EXIT_NUMERIC


def test_calibrate_then_t1(tmp_path):
    assert run(tmp_path, "calibrate") == EXIT_OK
    pulses = tmp_path / "pulses.json"
    d = json.loads(pulses.read_text())
    assert d["x90"]["target_angle_rad"] == pytest.approx(math.pi / 2)
    assert (
        run(
            tmp_path,
            "t1",
            "--pulses",
            str(pulses),
            "--points",
            "13",
            "--max-delay-s",
            "8e-5",
        )
        == EXIT_OK
    )
    fit = json.loads((tmp_path / "t1_fit.json").read_text())
    assert fit["params"]["tau"] == pytest.approx(25.3e-6, rel=0.02)


def test_vz_ramsey_cmd(tmp_path):
    assert run(tmp_path, "vz-ramsey", "--points", "8") == EXIT_OK
    lines = (tmp_path / "vz_ramsey.csv").read_text().splitlines()
    assert lines[0] == "theta_deg,p1"
    assert len(lines) == 9
