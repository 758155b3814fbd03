"""Subcommand drivers: schemas, exit codes, determinism, output formats."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from fklab.cli import main


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_heff_writes_couplings_and_decay(tmp_path):
    cfg = _write(tmp_path, "c.json", {"dims": [2, 1, 1], "U": 16.0, "beta": 160.0, "max_g": 3})
    out = tmp_path / "out"
    assert main(["heff", "--config", cfg, "--out", str(out), "--seed", "1"]) == 0
    doc = json.loads((out / "couplings.json").read_text())
    assert doc["provenance"]["seed"] == 1
    pair = [c for c in doc["couplings"] if len(c["cluster"]) == 2]
    assert pair and abs(4 * 16.0 * pair[0]["value"] - 1) < 0.05
    decay = json.loads((out / "decay.json").read_text())
    assert "levels" in decay


def test_heff_missing_key_exits_2(tmp_path):
    cfg = _write(tmp_path, "c.json", {"dims": [2, 1, 1], "beta": 160.0})
    assert main(["heff", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_heff_unknown_key_exits_2(tmp_path):
    cfg = _write(tmp_path, "c.json", {"dims": [2, 1, 1], "U": 4.0, "beta": 1.0, "frobnicate": 1})
    assert main(["heff", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_heff_cap_exits_3(tmp_path):
    cfg = _write(tmp_path, "c.json", {"dims": [4, 4, 1], "U": 4.0, "beta": 1.0})
    assert main(["heff", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_heff_deterministic_outputs(tmp_path):
    cfg = _write(tmp_path, "c.json", {"dims": [2, 1, 1], "U": 16.0, "beta": 160.0})
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["heff", "--config", cfg, "--out", str(out1), "--seed", "7"]) == 0
    assert main(["heff", "--config", cfg, "--out", str(out2), "--seed", "7"]) == 0
    assert (out1 / "couplings.json").read_bytes() == (out2 / "couplings.json").read_bytes()


def test_tilings_counts_and_render_flag(tmp_path):
    cfg = _write(tmp_path, "t.json", {"side": 1})
    out = tmp_path / "o"
    assert main(["tilings", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "tilings.json").read_text())
    assert doc["count"] == 2
    assert not list(out.glob("*.svg"))  # render off: no SVG files

    cfg2 = _write(tmp_path, "t2.json", {"side": 1, "render": True})
    out2 = tmp_path / "o2"
    assert main(["tilings", "--config", cfg2, "--out", str(out2)]) == 0
    svgs = sorted(out2.glob("*.svg"))
    assert len(svgs) == 2
    assert svgs[0].read_text().startswith("<svg")


def test_tilings_cap_exits_3(tmp_path):
    cfg = _write(tmp_path, "t.json", {"side": 4})
    assert main(["tilings", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_tilings_deterministic_order(tmp_path):
    cfg = _write(tmp_path, "t.json", {"side": 2})
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["tilings", "--config", cfg, "--out", str(out1)])
    main(["tilings", "--config", cfg, "--out", str(out2)])
    assert (out1 / "tilings.json").read_bytes() == (out2 / "tilings.json").read_bytes()


def test_mc_replicas_and_csv(tmp_path):
    cfg = _write(tmp_path, "m.json", {
        "dims": [4, 4, 4], "bc": "bc111", "hamiltonian": "h4", "U": 4.0,
        "beta": 2560.0, "sweeps": 12, "thermalization": 4, "seed": 9,
        "replicas": 2, "measure_stride": 2,
    })
    out = tmp_path / "o"
    assert main(["mc", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "summary.json").read_text())
    assert len(doc["replicas"]) == 2
    assert "mean_good_fraction" in doc["replicas"][0]
    csv0 = (out / "series_r0.csv").read_text().splitlines()
    assert csv0[0].startswith("# config_sha256=")  # provenance on every output
    assert csv0[1] == "sweep,energy,acceptance,width,good_fraction"
    assert "se_good_fraction" in doc["replicas"][0]
    # same seed, same replica -> byte-identical series on rerun
    out2 = tmp_path / "o2"
    main(["mc", "--config", cfg, "--out", str(out2)])
    assert (out / "series_r0.csv").read_bytes() == (out2 / "series_r0.csv").read_bytes()


def test_mc_snapshot_stride_and_workers_env(tmp_path, monkeypatch):
    doc = {
        "dims": [5, 5, 5], "bc": "bc111", "hamiltonian": "h2", "U": 4.0,
        "beta": 2560.0, "sweeps": 30, "thermalization": 10, "seed": 5,
        "replicas": 2, "measure_stride": 5, "snapshot_stride": 2,
    }
    cfg = _write(tmp_path, "m.json", doc)
    out1 = tmp_path / "serial"
    assert main(["mc", "--config", cfg, "--out", str(out1)]) == 0
    snaps = sorted(out1.glob("snapshot_r0_s*.svg"))
    assert len(snaps) == 2  # every 2nd of 4 measurements

    monkeypatch.setenv("FKLAB_WORKERS", "2")
    out2 = tmp_path / "parallel"
    assert main(["mc", "--config", cfg, "--out", str(out2)]) == 0
    for p1 in sorted(out1.iterdir()):
        p2 = out2 / p1.name
        assert p1.read_bytes() == p2.read_bytes()  # scheduling-independent


def test_mc_bc100_emits_layer_profile(tmp_path):
    cfg = _write(tmp_path, "m.json", {
        "dims": [4, 4, 4], "bc": "bc100", "hamiltonian": "h2", "U": 8.0,
        "beta": 320.0, "sweeps": 10, "thermalization": 2, "seed": 3,
        "measure_stride": 2,
    })
    out = tmp_path / "o"
    assert main(["mc", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "summary.json").read_text())
    assert "layer_magnetization" in doc["replicas"][0]
    assert len(doc["replicas"][0]["layers"]) == 4


def test_bounds_polymer_and_infeasible(tmp_path):
    cfg = _write(tmp_path, "b.json", {
        "op": "polymer", "C1": 1.0, "C2": 1.0, "lambda": 1e-6, "b": 1e14,
    })
    out = tmp_path / "o"
    assert main(["bounds", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "bounds_polymer.json").read_text())
    assert set(doc["flags"]) == {"cond1", "cond2", "cond4"}
    assert doc["k0"] is not None

    # infeasible lambda must still exit 0 (reporting, not failure)
    cfg2 = _write(tmp_path, "b2.json", {
        "op": "polymer", "C1": 1.0, "C2": 1.0, "lambda": 0.5, "b": 1.0,
    })
    out2 = tmp_path / "o2"
    assert main(["bounds", "--config", cfg2, "--out", str(out2)]) == 0
    doc2 = json.loads((out2 / "bounds_polymer.json").read_text())
    assert doc2["flags"]["cond2"] is False


def test_bounds_b0_and_cj(tmp_path):
    cfg = _write(tmp_path, "b.json", {"op": "b0", "C1": 1.0, "C2": 1.0, "lambda": 1e-6})
    out = tmp_path / "o"
    assert main(["bounds", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "bounds_b0.json").read_text())
    assert doc["B"] > 1.0 and doc["b0"] > 0 and doc["lambda0"] > 0

    cfg2 = _write(tmp_path, "c.json", {"op": "cj", "U": 24.0, "beta": 50.0})
    assert main(["bounds", "--config", cfg2, "--out", str(out)]) == 0
    doc2 = json.loads((out / "bounds_cj.json").read_text())
    assert doc2["values"]["2"] == pytest.approx(0.25)


def test_bounds_audit_consumes_coupling_files(tmp_path):
    c16 = _write(tmp_path, "c16.json", {"dims": [2, 2, 1], "U": 16.0, "beta": 256.0, "max_g": 4})
    c32 = _write(tmp_path, "c32.json", {"dims": [2, 2, 1], "U": 32.0, "beta": 512.0, "max_g": 4})
    main(["heff", "--config", c16, "--out", str(tmp_path / "t16")])
    main(["heff", "--config", c32, "--out", str(tmp_path / "t32")])
    acfg = _write(tmp_path, "a.json", {
        "op": "audit",
        "couplings": str(tmp_path / "t16" / "couplings.json"),
        "couplings_2u": str(tmp_path / "t32" / "couplings.json"),
    })
    out = tmp_path / "audit"
    assert main(["bounds", "--config", acfg, "--out", str(out)]) == 0
    doc = json.loads((out / "bounds_audit.json").read_text())
    assert doc["violations"] == 0
    assert doc["c1"] / 16.0 < 1.0
    assert doc["pair_exponent_ok"] is True


def test_energy_subcommand(tmp_path):
    cfg = _write(tmp_path, "e.json", {
        "volume": {"dims": [6, 6, 6], "shell": 2, "bc": "bc111"},
        "U": 8.0,
        "flips": [[0, 0, -1]],
    })
    out = tmp_path / "o"
    assert main(["energy", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "energy.json").read_text())
    total_area = sum(c["area"] for c in doc["contours"])
    assert doc["h2"] == pytest.approx(total_area / (2 * 8.0), abs=1e-12)
    assert any(c["pinned"] for c in doc["contours"])


def test_render_from_tilings_json(tmp_path):
    tcfg = _write(tmp_path, "t.json", {"side": 1})
    tout = tmp_path / "t"
    main(["tilings", "--config", tcfg, "--out", str(tout)])
    rcfg = _write(tmp_path, "r.json", {"kind": "tiling", "path": str(tout / "tilings.json"), "index": 1})
    rout = tmp_path / "r"
    assert main(["render", "--config", rcfg, "--out", str(rout)]) == 0
    assert (rout / "render.svg").read_text().startswith("<svg")


def test_console_script_entry_point(tmp_path):
    cfg = _write(tmp_path, "t.json", {"side": 1})
    proc = subprocess.run(
        [sys.executable, "-m", "fklab.cli", "tilings", "--config", cfg,
         "--out", str(tmp_path / "o")],
        capture_output=True,
    )
    assert proc.returncode == 0
