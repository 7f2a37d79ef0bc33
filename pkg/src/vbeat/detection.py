"""Detected intensity from trajectories: polarization projection and IRF.

The two transitions radiate into orthogonal polarization modes (H for e1, V
for e2).  An analyzer at angle theta from H admits the projected lowering
operator cos(theta) sigma_1 + sin(theta) sigma_2, so the detected rate is

    I(theta) = cos^2(theta) rho_11 + sin^2(theta) rho_22
             + sin(theta) cos(theta) (rho_12 + rho_21).

Without an analyzer the coherence terms drop and the rate is rho_11 + rho_22.
Projecting both decay paths onto one polarization erases the which-path
information and makes the excited-state coherence visible as a beat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import E1, E2
from .dynamics import Trajectory

__all__ = [
    "DetectionConfig",
    "IntensityTrace",
    "GridTooCoarse",
    "DEFAULT_ANALYZER_ANGLE",
    "total_intensity",
    "projected_intensity",
    "convolve_irf",
    "detect",
]

# crossed with a 45-degree excitation so the scattered laser is suppressed
DEFAULT_ANALYZER_ANGLE = -math.pi / 4.0

FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


class GridTooCoarse(ValueError):
    """Sampling step too large to resolve the requested IRF."""


@dataclass(frozen=True)
class DetectionConfig:
    """Analyzer angle (None = unpolarized) and Gaussian IRF width (0 = off)."""

    pol_angle_rad: float | None = DEFAULT_ANALYZER_ANGLE
    irf_fwhm_ps: float = 0.0

    def __post_init__(self):
        if self.irf_fwhm_ps < 0:
            raise ValueError("irf_fwhm_ps must be >= 0")


@dataclass
class IntensityTrace:
    """Uniformly sampled detected intensity in excited-population units."""

    times_ps: np.ndarray
    values: np.ndarray
    detection: DetectionConfig | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dt_ps(self) -> float:
        return float(self.times_ps[1] - self.times_ps[0])

    def window(self, t_min: float | None = None, t_max: float | None = None) -> "IntensityTrace":
        lo = -math.inf if t_min is None else t_min
        hi = math.inf if t_max is None else t_max
        mask = (self.times_ps >= lo) & (self.times_ps <= hi)
        return IntensityTrace(
            times_ps=self.times_ps[mask],
            values=self.values[mask],
            detection=self.detection,
            meta=dict(self.meta),
        )

    def __len__(self) -> int:
        return len(self.times_ps)


def total_intensity(traj: Trajectory) -> IntensityTrace:
    """Unpolarized detection: rho_11 + rho_22, coherences invisible."""
    values = np.real(traj.states[:, E1, E1] + traj.states[:, E2, E2])
    return IntensityTrace(
        times_ps=traj.times_ps.copy(),
        values=values,
        detection=DetectionConfig(pol_angle_rad=None),
    )


def projected_intensity(traj: Trajectory, pol_angle_rad: float) -> IntensityTrace:
    """Detection through an analyzer at pol_angle_rad from the H dipole."""
    c, s = math.cos(pol_angle_rad), math.sin(pol_angle_rad)
    states = traj.states
    values = np.real(
        c * c * states[:, E1, E1]
        + s * s * states[:, E2, E2]
        + s * c * (states[:, E1, E2] + states[:, E2, E1])
    )
    return IntensityTrace(
        times_ps=traj.times_ps.copy(),
        values=values,
        detection=DetectionConfig(pol_angle_rad=pol_angle_rad),
    )


def convolve_irf(trace: IntensityTrace, fwhm_ps: float) -> IntensityTrace:
    """Blur a trace with a unit-area Gaussian of the given FWHM.

    Zero-padded discrete convolution on the existing grid; fwhm = 0 returns
    the trace unchanged."""
    if fwhm_ps < 0:
        raise ValueError("fwhm_ps must be >= 0")
    if fwhm_ps == 0.0:
        return replace(trace, meta=dict(trace.meta))
    dt = trace.dt_ps
    if dt > fwhm_ps / 4.0:
        raise GridTooCoarse(
            f"dt_out = {dt:g} ps exceeds irf_fwhm/4 = {fwhm_ps / 4.0:g} ps"
        )
    sigma = fwhm_ps * FWHM_TO_SIGMA
    half = int(math.ceil(5.0 * sigma / dt))
    offsets = dt * np.arange(-half, half + 1)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel /= kernel.sum()
    values = np.convolve(trace.values, kernel, mode="same")
    detection = trace.detection or DetectionConfig(pol_angle_rad=None)
    return IntensityTrace(
        times_ps=trace.times_ps.copy(),
        values=values,
        detection=replace(detection, irf_fwhm_ps=fwhm_ps),
        meta=dict(trace.meta),
    )


def detect(traj: Trajectory, cfg: DetectionConfig) -> IntensityTrace:
    """Projection (or total) intensity followed by the configured IRF."""
    if cfg.pol_angle_rad is None:
        trace = total_intensity(traj)
    else:
        trace = projected_intensity(traj, cfg.pol_angle_rad)
    if cfg.irf_fwhm_ps > 0:
        trace = convolve_irf(trace, cfg.irf_fwhm_ps)
    return trace
