import json

import numpy as np
import pytest

from nsflab.cli import main
from nsflab.lab import ScenarioConfig, reference_config


def test_riemann_json_contract(capsys):
    assert main(["riemann"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"left", "mid_left", "mid_right", "right",
                        "sigma1", "sigma3", "delta1", "deltaC", "delta3"}
    for key in ("left", "mid_left", "mid_right", "right"):
        assert set(out[key]) == {"v", "u", "theta"}
    assert out["sigma1"] < 0 < out["sigma3"]


def test_riemann_solve_mode_round_trips(capsys):
    assert main(["riemann"]) == 0
    built = json.loads(capsys.readouterr().out)
    left = built["left"]
    assert main(["riemann", "--solve-left",
                 str(left["v"]), str(left["u"]), str(left["theta"])]) == 0
    solved = json.loads(capsys.readouterr().out)
    assert solved["mid_left"]["v"] == pytest.approx(built["mid_left"]["v"], abs=1e-8)


def test_profile_csv(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["profile", "--family", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "xi,v,u,theta"
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert np.all(np.diff(data["xi"]) > 0)
    assert np.all(np.diff(data["v"]) <= 0)  # 1-family volume decreases


def test_contact_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["contact", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "xi,Theta,dTheta"
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert np.all(np.diff(data["Theta"]) >= 0)


def test_simulate_exit_codes(tmp_path):
    cfg = reference_config().to_dict()
    cfg.update({"t_end": 0.2, "output_every": 2, "output_dir": "clirun"})
    cfg["grid"] = {"x_min": -120.0, "x_max": 120.0, "n": 384}
    cfg["amplitudes"] = {"delta1": 0.0, "deltaC": 0.0, "delta3": 0.0}
    cfg["perturbation"] = None
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code = main(["--output-root", str(tmp_path), "simulate", "--config", str(path)])
    assert code == 0
    assert (tmp_path / "clirun" / "diagnostics.csv").exists()

    cfg["perturbation"] = {"amplitude": -1.5, "width": 4.0, "components": ["theta"]}
    cfg["amplitudes"] = {"delta1": 0.1, "deltaC": 0.0, "delta3": 0.0}
    path.write_text(json.dumps(cfg))
    code = main(["--output-root", str(tmp_path), "simulate", "--config", str(path)])
    assert code == 1


def test_simulate_bad_config_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"nonsense": True}))
    assert main(["simulate", "--config", str(path)]) == 2


def test_output_root_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("NSFLAB_OUTPUT_ROOT", str(tmp_path))
    cfg = reference_config().to_dict()
    cfg.update({"t_end": 0.2, "output_every": 2, "output_dir": "envrun"})
    cfg["grid"] = {"x_min": -20.0, "x_max": 20.0, "n": 64}
    cfg["amplitudes"] = {"delta1": 0.0, "deltaC": 0.0, "delta3": 0.0}
    cfg["perturbation"] = None
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path)]) == 0
    assert (tmp_path / "envrun" / "report.json").exists()


def test_sweep_cli(tmp_path):
    cfg = reference_config().to_dict()
    cfg.update({"t_end": 0.2, "output_every": 2, "output_dir": "clisweep"})
    cfg["grid"] = {"x_min": -120.0, "x_max": 120.0, "n": 384}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code = main(["--output-root", str(tmp_path), "sweep", "--config", str(path),
                 "--axis", "perturbation.amplitude", "--values", "0.001,0.002",
                 "--workers", "1"])
    assert (tmp_path / "clisweep" / "sweep_summary.csv").exists()
    assert code in (0, 1)  # short horizon need not satisfy the decay properties
