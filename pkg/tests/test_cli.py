import json
import math

import numpy as np
import pytest

from vbeat.cli import main, read_trace_csv


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def simulate_config(out_dir, **overrides):
    cfg = {
        "emitter": {"kind": "v_system", "fss_ueV": 13.0},
        "drive": {
            "envelope": {"kind": "gaussian", "fwhm_ps": 100.0},
            "peak_rabi_rad_per_ps": 0.0417,
            "pol_angle_rad": math.pi / 4,
            "t0_ps": 200.0,
        },
        "detection": {"pol_angle_rad": -math.pi / 4, "irf_fwhm_ps": 150.0},
        "integrator": {"dt_out_ps": 2.0},
        "task": {"kind": "simulate", "t_end_ps": 4000.0},
        "output": {"dir": str(out_dir), "stem": "trace"},
    }
    cfg.update(overrides)
    return cfg


def test_simulate_row_count(tmp_path):
    cfg = write_config(tmp_path, simulate_config(tmp_path / "out"))
    assert main(["simulate", "--config", cfg]) == 0
    lines = (tmp_path / "out" / "trace.csv").read_text().splitlines()
    assert lines[0] == "t_ps,intensity"
    assert len(lines) == 2002   # header + 2001 samples for 4 ns at 2 ps
    assert (tmp_path / "out" / "trace.meta.json").exists()


def test_simulate_missing_fss(tmp_path, capsys):
    payload = simulate_config(tmp_path / "out")
    del payload["emitter"]["fss_ueV"]
    cfg = write_config(tmp_path, payload)
    assert main(["simulate", "--config", cfg]) == 2
    assert "emitter.fss_ueV required" in capsys.readouterr().err


def test_simulate_unknown_key_rejected(tmp_path, capsys):
    payload = simulate_config(tmp_path / "out")
    payload["emitter"]["colour"] = "red"
    cfg = write_config(tmp_path, payload)
    assert main(["simulate", "--config", cfg]) == 2
    assert "emitter.colour" in capsys.readouterr().err


def test_simulate_zero_drive_all_zero(tmp_path):
    payload = simulate_config(tmp_path / "out")
    payload["drive"] = {"envelope": {"kind": "cw"}, "peak_rabi_rad_per_ps": 0.0}
    payload["detection"] = {"pol_angle_rad": None, "irf_fwhm_ps": 0.0}
    payload["task"]["t_end_ps"] = 100.0
    cfg = write_config(tmp_path, payload)
    assert main(["simulate", "--config", cfg]) == 0
    trace = read_trace_csv(str(tmp_path / "out" / "trace.csv"))
    assert np.max(np.abs(trace.values)) == 0.0


def test_simulate_deterministic_bytes(tmp_path):
    cfg = write_config(tmp_path, simulate_config(tmp_path / "a"))
    assert main(["simulate", "--config", cfg]) == 0
    assert main(["simulate", "--config", cfg, "--out-dir", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "trace.csv").read_bytes()
    b = (tmp_path / "b" / "trace.csv").read_bytes()
    assert a == b


def test_float_formatting_nine_significant_digits(tmp_path):
    cfg = write_config(tmp_path, simulate_config(tmp_path / "out"))
    main(["simulate", "--config", cfg])
    line = (tmp_path / "out" / "trace.csv").read_text().splitlines()[500]
    value = line.split(",")[1]
    mantissa = value.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
    assert len(mantissa) <= 9


def test_fit_round_trip(tmp_path):
    from vbeat.core import energy_to_angular

    t = np.arange(0.0, 2000.0 + 1e-9, 4.0)
    omega = energy_to_angular(13.0)
    y = np.exp(-t / 1000.0) * (1.0 + 0.8 * np.cos(omega * t))
    csvate = tmp_path / "synth.csv"
    lines = ["t_ps,intensity"] + [f"{a:.9g},{b:.9g}" for a, b in zip(t, y)]
    csvate.write_text("\n".join(lines) + "\n")
    out = tmp_path / "fit.json"
    assert main(["fit", str(csvate), "--model", "single", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["converged"]
    assert abs(payload["omega_rad_per_ps"] - omega) / omega < 1e-3
    assert payload["model"] == "single"
    assert len(payload["components"]) == 1


def test_fit_triple_requires_delta0(tmp_path, capsys):
    t = np.arange(0.0, 1000.0, 4.0)
    csv_path = tmp_path / "t.csv"
    csv_path.write_text(
        "t_ps,intensity\n" + "\n".join(f"{a:.9g},1.0" for a in t) + "\n"
    )
    code = main(["fit", str(csv_path), "--model", "triple", "--out", str(tmp_path / "f.json")])
    assert code == 2
    assert "delta0 required" in capsys.readouterr().err


def test_fit_malformed_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    assert main(["fit", str(bad), "--model", "single", "--out", str(tmp_path / "f.json")]) == 2


def test_fit_no_beat_exit_4(tmp_path):
    t = np.arange(0.0, 2000.0, 4.0)
    y = np.exp(-t / 800.0)
    csv_path = tmp_path / "decay.csv"
    csv_path.write_text(
        "t_ps,intensity\n" + "\n".join(f"{a:.9g},{b:.9g}" for a, b in zip(t, y)) + "\n"
    )
    out = tmp_path / "fit.json"
    assert main(["fit", str(csv_path), "--model", "single", "--out", str(out)]) == 4
    payload = json.loads(out.read_text())
    assert payload["converged"] is False
    assert "AmbiguousSeed" in payload["error"]


def test_sweep_outputs(tmp_path):
    cfg = write_config(tmp_path, {
        "emitter": {"kind": "v_system", "fss_ueV": 13.0},
        "task": {"kind": "fss_sweep", "fss_list_ueV": [13.0, 20.0, 30.0, 40.0]},
        "output": {"dir": str(tmp_path / "sweep")},
    })
    assert main(["sweep", "--config", cfg]) == 0
    summary = (tmp_path / "sweep" / "summary.csv").read_text().splitlines()
    assert summary[0] == "param,value_GHz,stderr_GHz,converged"
    assert len(summary) == 5
    for i in range(4):
        assert (tmp_path / "sweep" / f"param_{i}.csv").exists()
        assert (tmp_path / "sweep" / f"fit_{i}.json").exists()
    values = [float(row.split(",")[1]) for row in summary[1:]]
    assert values == sorted(values)


def test_sweep_empty_list(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "emitter": {"kind": "v_system", "fss_ueV": 13.0},
        "task": {"kind": "fss_sweep", "fss_list_ueV": []},
        "output": {"dir": str(tmp_path / "sweep")},
    })
    assert main(["sweep", "--config", cfg]) == 2


def test_power_sweep_monotone(tmp_path):
    cfg = write_config(tmp_path, {
        "emitter": {"kind": "two_level"},
        "task": {"kind": "power_sweep", "power_list": [1.0, 2.0, 4.0]},
        "output": {"dir": str(tmp_path / "power")},
    })
    assert main(["sweep", "--config", cfg]) == 0
    rows = (tmp_path / "power" / "summary.csv").read_text().splitlines()[1:]
    ghz = [float(r.split(",")[1]) for r in rows]
    assert ghz == sorted(ghz)
    assert ghz[0] == pytest.approx(1.3, abs=0.03)


def test_spectrum_detuning(tmp_path):
    cfg = write_config(tmp_path, {
        "emitter": {"kind": "v_system", "fss_ueV": 13.0},
        "drive": {"envelope": {"kind": "cw"}, "peak_rabi_rad_per_ps": 1.5e-4,
                  "pol_angle_rad": math.pi / 4},
        "task": {"kind": "detuning_spectrum", "min_ueV": -5.0, "max_ueV": 20.0,
                 "n_points": 126},
        "output": {"dir": str(tmp_path / "spec"), "stem": "scan"},
    })
    assert main(["spectrum", "--config", cfg]) == 0
    lines = (tmp_path / "spec" / "scan.csv").read_text().splitlines()
    assert lines[0] == "axis,value"
    assert len(lines) == 127
    meta = json.loads((tmp_path / "spec" / "scan.meta.json").read_text())
    assert meta["axis_unit"] == "ueV"


def test_spectrum_numerical_failure_exit_3(tmp_path):
    cfg = write_config(tmp_path, {
        "emitter": {"kind": "v_system", "fss_ueV": 13.0, "gamma2_per_ps": 0.0},
        "drive": {"envelope": {"kind": "cw"}, "peak_rabi_rad_per_ps": 0.01,
                  "pol_angle_rad": 0.0},
        "task": {"kind": "detuning_spectrum", "min_ueV": -2.0, "max_ueV": 2.0,
                 "n_points": 5},
        "output": {"dir": str(tmp_path / "spec")},
    })
    assert main(["spectrum", "--config", cfg]) == 3


def test_reproduce_fig4(tmp_path):
    out = tmp_path / "fig4"
    assert main(["reproduce-fig", "fig4", "--out-dir", str(out)]) == 0
    for panel in "abcd":
        assert (out / f"trace_{panel}.csv").exists()
    fit_d = json.loads((out / "fit_d.json").read_text())
    assert fit_d["model"] == "triple"
    assert len(fit_d["components"]) == 3
