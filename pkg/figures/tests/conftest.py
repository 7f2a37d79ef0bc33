import json
import math

import numpy as np
import pytest


def write_trace(path, t, y):
    lines = ["t_ps,intensity"] + [f"{a:.9g},{b:.9g}" for a, b in zip(t, y)]
    path.write_text("\n".join(lines) + "\n")


def write_fit(path, model, components, t1_ps=1000.0, offset=0.0, baseline=1.0,
              window=(0.0, 2000.0)):
    payload = {
        "model": model,
        "converged": True,
        "iterations": 5,
        "residual_rms": 1e-9,
        "t1_ps": t1_ps,
        "offset": offset,
        "baseline": baseline,
        "omega_rad_per_ps": components[len(components) // 2][0],
        "delta0_rad_per_ps": 0.0,
        "components": [
            {
                "role": role,
                "frequency_rad_per_ps": freq,
                "frequency_GHz": freq * 1000.0 / (2.0 * math.pi),
                "amplitude": amp,
                "phase_rad": phase,
            }
            for (freq, amp, phase), role in zip(
                components,
                ("single",) if len(components) == 1 else ("minus", "center", "plus"),
            )
        ],
        "covariance": None,
        "param_names": [],
        "residual_history": [],
        "window_ps": list(window),
        "warnings": [],
    }
    path.write_text(json.dumps(payload, indent=2))
    return payload


@pytest.fixture
def fig4_dataset(tmp_path):
    """Synthetic reproduce-fig fig4 layout (no simulator involved)."""
    d = tmp_path / "fig4_data"
    d.mkdir()
    t = np.arange(0.0, 2000.0, 2.0)
    w = 0.008
    write_trace(d / "trace_a.csv", t, np.exp(-t / 900.0))
    write_trace(d / "trace_b.csv", t, np.exp(-t / 900.0) * (1 + 0.5 * np.cos(0.02 * t)))
    write_trace(d / "trace_c.csv", t, 0.4 - 0.3 * np.exp(-t / 1200.0) * np.cos(w * t))
    write_trace(
        d / "trace_d.csv",
        t,
        0.4 - np.exp(-t / 1200.0) * (0.2 * np.cos(w * t) + 0.1 * np.cos(0.018 * t)),
    )
    write_fit(d / "fit_b.json", "single", [(0.02, 0.5, 0.0)])
    write_fit(d / "fit_c.json", "single", [(w, 0.3, math.pi)],
              offset=0.4, baseline=0.0, t1_ps=1200.0)
    write_fit(
        d / "fit_d.json",
        "triple",
        [(0.002, 0.05, 0.0), (w, 0.2, math.pi), (0.018, 0.1, math.pi)],
        offset=0.4, baseline=0.0, t1_ps=1200.0,
    )
    return d
