"""Frequency-domain observables: CW detuning scans and emission spectra.

The detuning scan reports the total steady-state excited population while the
laser is swept across the transitions.  The emission spectrum is the Fourier
transform of the steady-state first-order correlation function

    S(w) ~ Re  int_0^inf  exp(-i w tau) < E-(t) E+(t+tau) >_ss  dtau,

with E+ the analyzer-projected lowering operator, evaluated through the
quantum regression theorem: eigendecompose the vectorized generator, then
each decaying mode contributes one Lorentzian.  The zero mode carries the
coherently scattered (elastic) component, reported separately in metadata
because it is a delta line at the laser frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import scipy.linalg

from .core import (
    DIM,
    E1,
    E2,
    G,
    CW,
    DriveField,
    EmitterKind,
    EmitterModel,
    angular_to_ghz,
    ghz_to_angular,
    require_valid,
)
from .detection import DEFAULT_ANALYZER_ANGLE
from .dynamics import (
    DegenerateSteadyState,
    SIGMA_1,
    SIGMA_2,
    _two_level_generator,
    liouvillian,
    steady_state,
)

__all__ = [
    "Spectrum",
    "SpectrumKind",
    "NonDiagonalizableGenerator",
    "detuning_spectrum",
    "emission_spectrum",
    "count_peaks",
]


class NonDiagonalizableGenerator(RuntimeError):
    """Eigendecomposition unusable and the fallback integration failed."""


class SpectrumKind(str, Enum):
    DETUNING_SCAN = "detuning_scan"
    EMISSION = "emission"


@dataclass
class Spectrum:
    axis: np.ndarray          # detuning in ueV, or emission offset in GHz
    values: np.ndarray
    kind: SpectrumKind
    axis_unit: str
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.axis)


def detuning_spectrum(
    model: EmitterModel,
    drive: DriveField,
    detuning_range_uev: tuple[float, float],
    n_points: int,
) -> Spectrum:
    """Steady-state excited population versus laser detuning (CW scan)."""
    require_valid(model)
    if not isinstance(drive.envelope, CW):
        raise ValueError("detuning_spectrum requires a CW drive")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    axis = np.linspace(detuning_range_uev[0], detuning_range_uev[1], n_points)
    values = np.empty(n_points)
    for i, det in enumerate(axis):
        rho = steady_state(model, replace(drive, detuning_ueV=float(det)))
        values[i] = float(np.real(rho[E1, E1] + rho[E2, E2]))
    return Spectrum(
        axis=axis,
        values=values,
        kind=SpectrumKind.DETUNING_SCAN,
        axis_unit="ueV",
        meta={"pol_angle_rad": None},
    )


def _projected_lowering(pol_angle_rad: float, dim: int) -> np.ndarray:
    if dim == 2:
        op = np.zeros((2, 2), dtype=complex)
        op[0, 1] = math.cos(pol_angle_rad)
        return op
    return math.cos(pol_angle_rad) * SIGMA_1 + math.sin(pol_angle_rad) * SIGMA_2


def _mode_amplitudes(generator, rho_ss, e_plus):
    """Eigen-mode frequencies, widths and residues of <E- E+(tau)>.

    Returns (lambdas, coefficients) with the correlation function equal to
    sum_k c_k exp(lambda_k tau)."""
    dim = rho_ss.shape[0]
    vals, vecs = scipy.linalg.eig(generator)
    cond = np.linalg.cond(vecs)
    if not np.isfinite(cond) or cond > 1e10:
        raise np.linalg.LinAlgError(f"eigenvector condition {cond:.2e}")
    x0 = (rho_ss @ e_plus.conj().T).reshape(-1)
    weights = np.linalg.solve(vecs, x0)
    traces = np.array([np.trace(e_plus @ vecs[:, k].reshape(dim, dim)) for k in range(len(vals))])
    return vals, traces * weights


def _cluster_modes(lams: np.ndarray, coeffs: np.ndarray, tol: float = 1e-9):
    """Merge residues of (near-)degenerate eigenvalues before assembly."""
    order = np.lexsort((lams.imag, lams.real))
    lams, coeffs = lams[order], coeffs[order]
    out_l: list[complex] = []
    out_c: list[complex] = []
    for lam, c in zip(lams, coeffs):
        if out_l and abs(lam - out_l[-1]) < tol:
            out_c[-1] += c
        else:
            out_l.append(lam)
            out_c.append(c)
    return np.array(out_l), np.array(out_c)


def emission_spectrum(
    model: EmitterModel,
    drive: DriveField,
    freq_range_ghz: tuple[float, float],
    n_points: int,
    pol_angle_rad: float | None = DEFAULT_ANALYZER_ANGLE,
) -> Spectrum:
    """Incoherent emission spectrum of the CW-driven emitter.

    The axis is the offset from the laser frequency in GHz.  pol_angle_rad
    None sums the two orthogonal polarization channels instead of projecting.
    The coherent (elastic) delta-line weight and the total detected power are
    reported in Spectrum.meta; total power equals the detected steady-state
    intensity, which cross-checks the mode decomposition.
    """
    require_valid(model)
    if not isinstance(drive.envelope, CW):
        raise ValueError("emission_spectrum requires a CW drive")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")

    rho_full = steady_state(model, drive)
    two_level = model.kind == EmitterKind.TWO_LEVEL
    if two_level:
        generator = _two_level_generator(model, drive)
        rho_ss = rho_full[:2, :2]
        dim = 2
    else:
        generator = liouvillian(model, drive)
        rho_ss = rho_full
        dim = DIM

    angles = [pol_angle_rad] if pol_angle_rad is not None else [0.0, math.pi / 2.0]
    axis = np.linspace(freq_range_ghz[0], freq_range_ghz[1], n_points)
    omegas = ghz_to_angular(axis)
    values = np.zeros(n_points)
    coherent_weight = 0.0
    power_total = 0.0
    method = "eigendecomposition"
    n_modes = 0

    for theta in angles:
        e_plus = _projected_lowering(theta, dim)
        try:
            lams, coeffs = _mode_amplitudes(generator, rho_ss, e_plus)
        except np.linalg.LinAlgError:
            method = "integrated"
            part_values, part_coherent, part_power = _integrated_spectrum(
                model, generator, rho_ss, e_plus, omegas
            )
            values += part_values
            coherent_weight += part_coherent
            power_total += part_power
            continue
        lams, coeffs = _cluster_modes(lams, coeffs)
        if float(np.max(lams.real)) > 1e-10:
            raise NonDiagonalizableGenerator(
                f"generator has a growing mode (Re lambda = {np.max(lams.real):.3e})"
            )
        power_total += float(np.sum(coeffs).real)
        for lam, c in zip(lams, coeffs):
            if abs(lam) <= 1e-10:
                coherent_weight += c.real
                continue
            n_modes += 1
            values += np.real(c / (1j * omegas - lam))

    detected = _detected_ss_intensity(rho_full, pol_angle_rad)
    return Spectrum(
        axis=axis,
        values=values,
        kind=SpectrumKind.EMISSION,
        axis_unit="GHz",
        meta={
            "pol_angle_rad": pol_angle_rad,
            "coherent_weight": coherent_weight,
            "power_total": power_total,
            "detected_ss_intensity": detected,
            "method": method,
            "n_modes": n_modes,
        },
    )


def _detected_ss_intensity(rho: np.ndarray, pol_angle_rad: float | None) -> float:
    if pol_angle_rad is None:
        return float(np.real(rho[E1, E1] + rho[E2, E2]))
    c, s = math.cos(pol_angle_rad), math.sin(pol_angle_rad)
    return float(
        np.real(
            c * c * rho[E1, E1]
            + s * s * rho[E2, E2]
            + s * c * (rho[E1, E2] + rho[E2, E1])
        )
    )


def _integrated_spectrum(model, generator, rho_ss, e_plus, omegas):
    """Dense integration of the correlation function (fallback path)."""
    rates = [r for r in (model.gamma1_per_ps, model.gamma2_per_ps) if r > 0]
    slow = min(rates) if rates else 1e-3
    tau_max = 40.0 / slow
    w_max = float(np.max(np.abs(omegas))) if len(omegas) else 0.0
    dtau = min(0.5 / max(w_max, 1e-6), 1.0 / slow / 50.0)
    n_tau = int(tau_max / dtau) + 1
    taus = dtau * np.arange(n_tau)

    prop = scipy.linalg.expm(generator * dtau)
    dim = rho_ss.shape[0]
    x = (rho_ss @ e_plus.conj().T).reshape(-1)
    corr = np.empty(n_tau, dtype=complex)
    for i in range(n_tau):
        corr[i] = np.trace(e_plus @ x.reshape(dim, dim))
        x = prop @ x
    coherent = np.trace(e_plus @ rho_ss) * np.trace(rho_ss @ e_plus.conj().T)
    corr_inc = corr - coherent
    phases = np.exp(-1j * np.outer(omegas, taus))
    values = np.real(np.trapezoid(phases * corr_inc[None, :], dx=dtau, axis=1))
    return values, float(np.real(coherent)), float(np.real(corr[0]))


def count_peaks(spectrum: Spectrum, min_prominence_frac: float = 1e-3) -> int:
    """Number of resolved local maxima above a fractional prominence floor."""
    from scipy.signal import find_peaks

    v = np.asarray(spectrum.values, dtype=float)
    peaks, _ = find_peaks(v, prominence=min_prominence_frac * float(v.max()))
    return int(len(peaks))
