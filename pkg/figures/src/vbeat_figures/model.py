"""Fitted beat-model evaluation, shared with the simulator's fit module.

    I(t) = offset + exp(-t / T1) * (baseline + sum_j B_j cos(w_j t + phi_j))

Overlays are evaluated from the stored fit parameters; nothing is re-fitted.
"""
from __future__ import annotations

import numpy as np


def evaluate_fit(fit: dict, times_ps: np.ndarray) -> np.ndarray:
    t = np.asarray(times_ps, dtype=float)
    osc = np.full_like(t, float(fit["baseline"]))
    for comp in fit["components"]:
        osc = osc + comp["amplitude"] * np.cos(
            comp["frequency_rad_per_ps"] * t + comp["phase_rad"]
        )
    return float(fit["offset"]) + np.exp(-t / float(fit["t1_ps"])) * osc
