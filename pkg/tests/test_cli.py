"""Command line front end: configs, outputs, exit codes, determinism."""

import csv
import json
from pathlib import Path

import numpy as np

from qcle.cli import main

CONFIG = {
    "potential": {"eta": 1.0, "alpha": 0.0, "epsilon": 0.0, "f0": 0.1},
    "bath": {"gamma": 1.0, "temp": 1.0, "nu": 1e4},
    "initial": {"q0": 1.0, "v0": 0.0},
    "time_grid": {"t_max": 10.0, "n": 501},
    "freq_grid": {"omega_max": 200.0, "n": 8001},
    "tolerances": {"djm_tol": 1e-9, "djm_k_max": 80, "response_window": 2.5},
    "integrator": {"dt_sub": 0.005},
    "mc": {"n_paths": 400, "seed": 99, "f0_kick": 0.1},
}


def _write_config(tmp_path, overrides=None, drop=None) -> Path:
    cfg = json.loads(json.dumps(CONFIG))
    for key, val in (overrides or {}).items():
        sec, _, field = key.partition(".")
        if field:
            cfg.setdefault(sec, {})[field] = val
        else:
            cfg[sec] = val
    for key in drop or []:
        sec, _, field = key.partition(".")
        if field:
            cfg[sec].pop(field, None)
        else:
            cfg.pop(sec, None)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def _read_csv(path: Path):
    with path.open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_kernels_subcommand(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["kernels", "--config", str(cfg), "--out", str(out)]) == 0
    header, rows = _read_csv(out / "kernels_time.csv")
    assert header == ["t", "chi_q", "chi_v", "chi_v_dot"]
    assert len(rows) == 501
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "kernels"
    assert manifest["effective"]["seed"] == 99
    assert manifest["effective"]["djm_tol"] == 1e-9


def test_csv_round_trip_17_digits(tmp_path):
    from qcle import chi_v
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    main(["kernels", "--config", str(cfg), "--out", str(out)])
    _, rows = _read_csv(out / "kernels_time.csv")
    t = np.array([float(r[0]) for r in rows])
    cv = np.array([float(r[2]) for r in rows])
    assert np.array_equal(cv, chi_v(t, 1.0, 1.0))  # exact round trip


def test_moments_and_response_subcommands(tmp_path):
    cfg = _write_config(tmp_path)
    out1 = tmp_path / "m"
    assert main(["moments", "--config", str(cfg), "--out", str(out1)]) == 0
    assert (out1 / "moments.csv").exists()
    assert (out1 / "variance_spectrum.csv").exists()
    out2 = tmp_path / "r"
    assert main(["response", "--config", str(cfg), "--out", str(out2)]) == 0
    m = json.loads((out2 / "manifest.json").read_text())
    assert m["diagnostics"]["route_disagreement"] < 1e-4
    assert m["diagnostics"]["ode_residual_recursion"] < 1e-2


def test_susceptibility_subcommand(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "s"
    assert main(["susceptibility", "--config", str(cfg), "--out", str(out)]) == 0
    header, rows = _read_csv(out / "susceptibility.csv")
    assert header == ["omega", "re", "im"]
    assert (out / "response_reconstructed.csv").exists()


def test_mc_subcommand_and_seed_override(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "mc"
    assert main(["mc", "--config", str(cfg), "--out", str(out)]) == 0
    m = json.loads((out / "manifest.json").read_text())
    assert m["effective"]["seed"] == 99 and m["diagnostics"]["n_excluded"] == 0
    out2 = tmp_path / "mc2"
    main(["mc", "--config", str(cfg), "--out", str(out2), "--seed", "123"])
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert m2["effective"]["seed"] == 123
    assert (out / "mc_moments.csv").read_bytes() \
        != (out2 / "mc_moments.csv").read_bytes()


def test_determinism_byte_identical(tmp_path):
    cfg = _write_config(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["mc", "--config", str(cfg), "--out", str(out1)])
    main(["mc", "--config", str(cfg), "--out", str(out2)])
    for name in ("mc_moments.csv", "mc_response.csv", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_missing_required_field_exits_2(tmp_path, capsys):
    cfg = _write_config(tmp_path, drop=["bath.nu"])
    assert main(["moments", "--config", str(cfg), "--out",
                 str(tmp_path / "o")]) == 2
    assert "bath.nu" in capsys.readouterr().err


def test_invalid_values_exit_2(tmp_path, capsys):
    cfg = _write_config(tmp_path, overrides={"potential.alpha": -1.0})
    assert main(["kernels", "--config", str(cfg), "--out",
                 str(tmp_path / "o")]) == 2
    cfg2 = _write_config(tmp_path, overrides={"time_grid.n": 1})
    assert main(["kernels", "--config", str(cfg2), "--out",
                 str(tmp_path / "o")]) == 2
    assert main(["kernels", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o")]) == 2
    assert main(["response", "--out", str(tmp_path / "o")]) == 2  # no config


def test_nonconvergence_exits_3_with_manifest(tmp_path):
    cfg = _write_config(tmp_path, overrides={
        "potential.alpha": 0.3,
        "tolerances.djm_k_max": 2,
        "tolerances.djm_tol": 1e-12,
        "tolerances.response_window": 10.0,
    })
    out = tmp_path / "o"
    assert main(["response", "--config", str(cfg), "--out", str(out)]) == 3
    m = json.loads((out / "manifest.json").read_text())
    assert m["diagnostics"]["windows_converged"][0] is False
    assert m["diagnostics"]["window_term_norms"]


def test_validate_subset(tmp_path, capsys):
    out = tmp_path / "v"
    assert main(["validate", "--criteria", "1,5", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "[criterion 1] PASS" in printed and "[criterion 5] PASS" in printed
    header, rows = _read_csv(out / "acceptance_report.csv")
    assert header == ["criterion", "passed", "description", "detail"]
    assert [r[0] for r in rows] == ["1", "5"]


def test_validate_reports_known_defect(tmp_path, capsys):
    out = tmp_path / "v6"
    # criterion 6 carries the documented unattainable tolerance: nonzero exit
    assert main(["validate", "--criteria", "6", "--out", str(out)]) == 1
    assert "UNATTAINABLE" in capsys.readouterr().out
    m = json.loads((out / "manifest.json").read_text())
    assert m["results"][0]["known_unattainable"] is True


def test_validate_bad_criteria_exit_2(tmp_path):
    assert main(["validate", "--criteria", "1,zap",
                 "--out", str(tmp_path / "o")]) == 2
