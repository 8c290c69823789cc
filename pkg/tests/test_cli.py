"""Command-line interface: outputs, formats, exit codes."""

import json

import numpy as np
import pytest

from corrsets import cli, selfcheck


def run(capsys, *argv):
    rc = cli.main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_support_text(capsys):
    rc, out, err = run(capsys, "support", "--model", "qm", "--scenario", "chsh")
    assert rc == 0
    assert err == ""
    assert "support qm (chsh) = 2.82842712475" in out
    assert "rank r: 2" in out
    assert "seed=0 version=" in out


def test_support_json(capsys):
    rc, out, _ = run(capsys, "support", "--model", "max", "--scenario",
                     "pauli3", "--format", "json")
    assert rc == 0
    payload = json.loads(out)
    assert payload["command"] == "support"
    assert payload["model"] == "max"
    assert np.isclose(payload["value"], 3.0)
    assert payload["seed"] == 0
    assert "version" in payload
    assert np.allclose(payload["frame_singular_values"], [1.0, 1.0, 1.0])


def test_gauge_text_and_json(capsys):
    # the built-in pauli3 scenario carries the maximally entangled state,
    # whose correlation sits exactly on the quantum boundary
    rc, out, _ = run(capsys, "gauge", "--model", "qm", "--scenario", "pauli3")
    assert rc == 0
    assert "gauge qm (pauli3) = 1" in out

    rc, out, _ = run(capsys, "gauge", "--model", "sep", "--scenario",
                     "pauli3", "--format", "json")
    assert rc == 0
    payload = json.loads(out)
    assert np.isclose(payload["value"], 3.0)
    assert payload["finite"] is True
    assert payload["rank"] == 3


def test_gauge_infinite(capsys, tmp_path):
    plane = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
             [np.sqrt(0.5), np.sqrt(0.5), 0.0]]
    path = tmp_path / "flat.json"
    path.write_text(json.dumps({"A": plane, "B": plane,
                                "C": np.eye(3).tolist()}))
    rc, out, _ = run(capsys, "gauge", "--model", "qm", "--file", str(path))
    assert rc == 0
    assert "= infinite" in out

    rc, out, _ = run(capsys, "gauge", "--model", "qm", "--file", str(path),
                     "--format", "json")
    payload = json.loads(out)
    assert payload["finite"] is False
    assert payload["value"] is None or payload["value"] == "infinite"


def test_witness_text(capsys):
    rc, out, _ = run(capsys, "witness", "--model", "qm", "--scenario",
                     "pauli3", "--state", "rho_max")
    assert rc == 0
    assert "sensitivity (gauge) = 3" in out
    assert "p_crit = 0.666666666667" in out
    assert "detectable: yes" in out
    assert "round-trip Tr[Z*^T C]/phi = 3" in out
    assert "witness operator:" in out


def test_witness_chsh_werner(capsys):
    rc, out, _ = run(capsys, "witness", "--model", "sep", "--scenario",
                     "chsh", "--state", "werner:0")
    assert rc == 0
    assert "p_crit = 0.5" in out
    assert "detectable: yes" in out


def test_witness_undetectable(capsys):
    rc, out, _ = run(capsys, "witness", "--model", "qm", "--scenario",
                     "pauli3", "--state", "werner:0.5")
    assert rc == 0
    assert "detectable: no" in out


def test_table1_csv(capsys):
    rc, out, _ = run(capsys, "table1", "--format", "csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# corrsets")
    assert lines[1] == "method,two_settings,three_settings"
    rows = {line.split(",")[0]: line.split(",") for line in lines[2:]}
    assert rows["ppt"][1] == ""
    assert abs(float(rows["ppt"][2]) - 2.0 / 3.0) <= 1e-3
    assert abs(float(rows["gauge"][1]) - 0.5) <= 1e-9
    assert abs(float(rows["gauge"][2]) - 2.0 / 3.0) <= 1e-9
    chsh_p = 1.0 - 1.0 / np.sqrt(2.0)
    assert abs(float(rows["chsh"][1]) - chsh_p) <= 1e-6
    assert rows["i3322"][1] == ""
    assert abs(float(rows["i3322"][2]) - 0.2) <= 1e-4


def test_ratios_outputs(capsys):
    rc, out, _ = run(capsys, "ratios", "--scenario", "pauli3")
    assert rc == 0
    assert "qm-over-sep 3 3" in out
    assert "max-over-qm 3 3" in out

    rc, out, _ = run(capsys, "ratios", "--scenario", "chsh")
    assert rc == 0
    assert "qm-over-sep 2 2" in out
    assert "max-over-qm 2 1" in out


def test_sweep_werner(capsys):
    rc, out, _ = run(capsys, "sweep", "--scenario", "pauli3", "--model", "qm",
                     "--state", "werner", "--points", "5")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p gauge"
    values = [line.split() for line in lines[1:-1]]
    for p_str, g_str in values:
        assert np.isclose(float(g_str), 1.0 - float(p_str), atol=1e-9)


def test_sweep_tau(capsys):
    rc, out, _ = run(capsys, "sweep", "--scenario", "pauli3", "--model", "qm",
                     "--state", "tau", "--points", "3")
    assert rc == 0
    lines = out.strip().splitlines()
    for p_str, g_str in (line.split() for line in lines[1:-1]):
        assert np.isclose(float(g_str), 3.0 * (1.0 - float(p_str)), atol=1e-9)


def test_verify_quick(capsys):
    rc, out, _ = run(capsys, "verify", "--level", "quick")
    assert rc == 0
    assert "summary:" in out
    assert "0 failed" in out


def test_verify_deterministic(capsys):
    rc1, out1, _ = run(capsys, "verify", "--level", "quick", "--seed", "7")
    rc2, out2, _ = run(capsys, "verify", "--level", "quick", "--seed", "7")
    assert rc1 == rc2 == 0
    assert out1 == out2


def test_verify_reports_failure(capsys, monkeypatch):
    real = selfcheck.run_battery

    def broken(level="quick", seed=0, scenario=None):
        report = real(level="quick", seed=seed)
        report.results[0].passed = False
        return report

    monkeypatch.setattr(cli.selfcheck, "run_battery", broken)
    rc, out, _ = run(capsys, "verify", "--level", "quick")
    assert rc == 1
    assert "FAIL" in out


def test_scenario_file_with_state(capsys, tmp_path):
    path = tmp_path / "scen.json"
    path.write_text(json.dumps({
        "A": np.eye(3).tolist(),
        "B": np.eye(3).tolist(),
        "state": "werner:0",
    }))
    rc, out, _ = run(capsys, "gauge", "--model", "qm", "--file", str(path))
    assert rc == 0
    assert "= 1" in out


def test_scenario_file_renormalizes_rows(capsys, tmp_path):
    rows = (np.eye(3) * (1.0 + 5e-4)).tolist()
    path = tmp_path / "near.json"
    path.write_text(json.dumps({"A": rows, "B": rows, "Z": np.eye(3).tolist()}))
    rc, out, _ = run(capsys, "support", "--model", "max", "--file", str(path))
    assert rc == 0
    assert "= 3" in out


def test_scenario_file_rejects_bad_rows(capsys, tmp_path):
    rows = (np.eye(3) * 1.5).tolist()
    path = tmp_path / "bad_rows.json"
    path.write_text(json.dumps({"A": rows, "B": rows, "Z": np.eye(3).tolist()}))
    rc, out, err = run(capsys, "support", "--model", "max", "--file", str(path))
    assert rc == 2
    assert "error:" in err


def test_unknown_scenario(capsys):
    rc, _, err = run(capsys, "gauge", "--model", "qm", "--scenario", "nosuch")
    assert rc == 2
    assert "unknown scenario" in err


def test_missing_file(capsys, tmp_path):
    rc, _, err = run(capsys, "gauge", "--model", "qm", "--file",
                     str(tmp_path / "absent.json"))
    assert rc == 2
    assert "error:" in err


def test_malformed_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"A": [[1, 0')
    rc, _, err = run(capsys, "gauge", "--model", "qm", "--file", str(path))
    assert rc == 2
    assert "error:" in err


def test_missing_coefficient_matrix(capsys, tmp_path):
    path = tmp_path / "noz.json"
    path.write_text(json.dumps({"A": np.eye(3).tolist(),
                                "B": np.eye(3).tolist(),
                                "C": np.eye(3).tolist()}))
    rc, _, err = run(capsys, "support", "--model", "qm", "--file", str(path))
    assert rc == 2
    assert "no coefficient matrix" in err


def test_missing_state_for_witness(capsys, tmp_path):
    path = tmp_path / "nostate.json"
    path.write_text(json.dumps({"A": np.eye(3).tolist(),
                                "B": np.eye(3).tolist()}))
    rc, _, err = run(capsys, "witness", "--model", "qm", "--file", str(path))
    assert rc == 2
    assert "error:" in err


def test_bad_state_string(capsys):
    rc, _, err = run(capsys, "witness", "--model", "qm", "--scenario",
                     "pauli3", "--state", "werner:nope")
    assert rc == 2
    assert "error:" in err


def test_seed_flag_after_subcommand(capsys):
    rc, out, _ = run(capsys, "support", "--model", "qm", "--scenario", "chsh",
                     "--seed", "3")
    assert rc == 0
    assert "seed=3" in out


def test_state_flag_dense_matrix(capsys, tmp_path):
    phi = np.zeros((4, 4, 2))
    phi[:, :, 0] = np.array([[0.5, 0, 0, 0.5],
                             [0, 0, 0, 0],
                             [0, 0, 0, 0],
                             [0.5, 0, 0, 0.5]])
    path = tmp_path / "dense.json"
    path.write_text(json.dumps({"A": np.eye(3).tolist(),
                                "B": np.eye(3).tolist(),
                                "state": phi.tolist()}))
    rc, out, _ = run(capsys, "gauge", "--model", "qm", "--file", str(path))
    assert rc == 0
    assert "= 1" in out
