"""Shared domain types and unit conventions.

Levels are indexed g=0, e1=1, e2=2.  Internally all times are in ps and all
angular rates in rad/ps; energies cross API boundaries in micro-eV.  The
conversion constant hbar = 658.2119 ueV*ps keeps every simulated quantity
within a few orders of magnitude of unity.

Two-level emitters live in the same 3x3 state space with the e2 row/column
pinned to zero, so a single dynamics engine and detection path serves both
emitter kinds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

HBAR_UEV_PS = 658.2119   # hbar in ueV*ps
H_UEV_PS = 4135.667      # h in ueV*ps

G, E1, E2 = 0, 1, 2
DIM = 3

SQUARE_RAMP_PS = 1.0     # cosine ramp width applied to square pulse edges

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-9
EIGENVALUE_FLOOR = -1e-8


# ---------------------------------------------------------------------------
# unit conversions
# ---------------------------------------------------------------------------

def energy_to_angular(e_uev):
    """Energy in ueV -> angular rate in rad/ps (divide by hbar)."""
    return e_uev / HBAR_UEV_PS


def angular_to_energy(omega_rad_per_ps):
    """Angular rate in rad/ps -> energy in ueV."""
    return omega_rad_per_ps * HBAR_UEV_PS


def angular_to_ghz(omega_rad_per_ps):
    """rad/ps -> ordinary frequency in GHz."""
    return 1000.0 * omega_rad_per_ps / (2.0 * math.pi)


def ghz_to_angular(f_ghz):
    return 2.0 * math.pi * f_ghz / 1000.0


def energy_to_ghz(e_uev):
    return angular_to_ghz(energy_to_angular(e_uev))


# ---------------------------------------------------------------------------
# emitter model
# ---------------------------------------------------------------------------

class EmitterKind(str, Enum):
    TWO_LEVEL = "two_level"   # fine-structure-free emitter (trion-like)
    V_SYSTEM = "v_system"     # split doublet sharing one ground state


ORTHOGONAL_DIPOLES = (0.0, math.pi / 2.0)   # H and V transition dipoles


@dataclass(frozen=True)
class EmitterModel:
    """Level structure and decay channels of the emitter.

    gamma1/gamma2 are the radiative rates of e1->g and e2->g; dephasing is a
    pure dephasing rate applied to both optical coherences.  fss_ueV is the
    excited-doublet splitting (zero for two-level emitters).
    """

    kind: EmitterKind
    fss_ueV: float = 0.0
    gamma1_per_ps: float = 1e-3
    gamma2_per_ps: float = 1e-3
    dephasing_per_ps: float = 0.0
    dipole_angles_rad: tuple[float, float] = ORTHOGONAL_DIPOLES

    @property
    def fss_rad_per_ps(self) -> float:
        return energy_to_angular(self.fss_ueV)

    def two_level_view(self) -> "EmitterModel":
        """Same decay channels with the e2 level decoupled (for calibration)."""
        return EmitterModel(
            kind=EmitterKind.TWO_LEVEL,
            fss_ueV=0.0,
            gamma1_per_ps=self.gamma1_per_ps,
            gamma2_per_ps=self.gamma2_per_ps,
            dephasing_per_ps=self.dephasing_per_ps,
            dipole_angles_rad=self.dipole_angles_rad,
        )


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple[str, ...]


def validate(model: EmitterModel) -> ValidationReport:
    """Report-style check of every EmitterModel invariant."""
    v: list[str] = []
    if not isinstance(model.kind, EmitterKind):
        v.append("kind must be an EmitterKind")
    rates = {
        "fss_ueV": model.fss_ueV,
        "gamma1_per_ps": model.gamma1_per_ps,
        "gamma2_per_ps": model.gamma2_per_ps,
        "dephasing_per_ps": model.dephasing_per_ps,
    }
    for name, value in rates.items():
        if not math.isfinite(value):
            v.append(f"{name} must be finite")
        elif value < 0:
            v.append(f"{name} >= 0")
    if model.kind == EmitterKind.TWO_LEVEL and model.fss_ueV != 0.0:
        v.append("fss_ueV == 0 for two-level emitters")
    a0, a1 = model.dipole_angles_rad
    if abs(abs(a1 - a0) - math.pi / 2.0) > 1e-12:
        v.append("dipole angles must differ by exactly pi/2")
    return ValidationReport(passed=not v, violations=tuple(v))


def require_valid(model: EmitterModel) -> None:
    report = validate(model)
    if not report.passed:
        raise ValueError("invalid emitter model: " + "; ".join(report.violations))


# ---------------------------------------------------------------------------
# drive field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CW:
    def value(self, t: float, t0: float = 0.0) -> float:
        return 1.0

    @property
    def area_ps(self) -> float:
        return math.inf

    def step_hint_ps(self) -> float:
        return math.inf


def _cos_step(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return 0.5 * (1.0 - math.cos(math.pi * x))


@dataclass(frozen=True)
class Square:
    """Flat-top pulse over [t0, t0+duration] with cosine ramps straddling the
    edges; the straddle keeps the pulse area exactly peak*duration."""

    duration_ps: float

    def __post_init__(self):
        if not (self.duration_ps > 0.0 and math.isfinite(self.duration_ps)):
            raise ValueError("duration_ps must be positive and finite")

    def value(self, t: float, t0: float = 0.0) -> float:
        r = SQUARE_RAMP_PS
        rise = _cos_step((t - (t0 - r / 2.0)) / r)
        fall = _cos_step(((t0 + self.duration_ps + r / 2.0) - t) / r)
        return rise * fall

    @property
    def area_ps(self) -> float:
        return self.duration_ps

    def step_hint_ps(self) -> float:
        return max(self.duration_ps / 4.0, SQUARE_RAMP_PS)


@dataclass(frozen=True)
class Gaussian:
    fwhm_ps: float

    def __post_init__(self):
        if not (self.fwhm_ps > 0.0 and math.isfinite(self.fwhm_ps)):
            raise ValueError("fwhm_ps must be positive and finite")

    def value(self, t: float, t0: float = 0.0) -> float:
        x = (t - t0) / self.fwhm_ps
        return math.exp(-4.0 * math.log(2.0) * x * x)

    @property
    def area_ps(self) -> float:
        return self.fwhm_ps * math.sqrt(math.pi / (4.0 * math.log(2.0)))

    def step_hint_ps(self) -> float:
        return self.fwhm_ps / 2.0


Envelope = Union[CW, Square, Gaussian]


@dataclass(frozen=True)
class DriveField:
    """Classical drive: envelope, peak Rabi rate, detuning from g<->e1, and
    excitation polarization angle measured from the H dipole."""

    envelope: Envelope
    peak_rabi_rad_per_ps: float
    detuning_ueV: float = 0.0
    pol_angle_rad: float = 0.0
    t0_ps: float = 0.0

    def __post_init__(self):
        if not (self.peak_rabi_rad_per_ps >= 0.0 and math.isfinite(self.peak_rabi_rad_per_ps)):
            raise ValueError("peak_rabi_rad_per_ps must be >= 0 and finite")
        for name in ("detuning_ueV", "pol_angle_rad", "t0_ps"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def detuning_rad_per_ps(self) -> float:
        return energy_to_angular(self.detuning_ueV)

    def envelope_value(self, t: float) -> float:
        return self.envelope.value(t, self.t0_ps)

    def channel_weights(self, model: EmitterModel) -> tuple[float, float]:
        """Geometric projection of the drive onto each transition dipole.

        The e2 weight is forced to zero for two-level emitters (decoupling
        contract)."""
        a0, a1 = model.dipole_angles_rad
        w1 = math.cos(self.pol_angle_rad - a0)
        w2 = math.cos(self.pol_angle_rad - a1)
        if model.kind == EmitterKind.TWO_LEVEL:
            w2 = 0.0
        return w1, w2

    def rabi_at(self, model: EmitterModel, t: float) -> tuple[float, float]:
        """Instantaneous Rabi rates (Omega_1(t), Omega_2(t)) in rad/ps."""
        f = self.envelope_value(t)
        w1, w2 = self.channel_weights(model)
        peak = self.peak_rabi_rad_per_ps
        return peak * f * w1, peak * f * w2


# ---------------------------------------------------------------------------
# density matrices
# ---------------------------------------------------------------------------

def basis_state(index: int) -> np.ndarray:
    rho = np.zeros((DIM, DIM), dtype=complex)
    rho[index, index] = 1.0
    return rho


def ground_state() -> np.ndarray:
    return basis_state(G)


def pure_state(amplitudes: Sequence[complex]) -> np.ndarray:
    """Density matrix of the normalized pure state sum_i amplitudes[i] |i>."""
    psi = np.asarray(amplitudes, dtype=complex)
    if psi.shape != (DIM,):
        raise ValueError("amplitudes must have length 3 (g, e1, e2)")
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ValueError("amplitudes must not all vanish")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().T)


def state_violations(
    rho: np.ndarray,
    herm_atol: float = HERMITICITY_ATOL,
    trace_atol: float = TRACE_ATOL,
    eig_floor: float = EIGENVALUE_FLOOR,
) -> list[str]:
    """Check Hermiticity, unit trace and positivity of a 3x3 state."""
    v: list[str] = []
    rho = np.asarray(rho)
    if rho.shape != (DIM, DIM):
        return [f"state must be {DIM}x{DIM}, got {rho.shape}"]
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > herm_atol:
        v.append(f"not Hermitian (max |rho - rho^H| = {herm_err:.3e})")
    trace_err = abs(np.trace(rho) - 1.0)
    if trace_err > trace_atol:
        v.append(f"trace deviates from 1 by {trace_err:.3e}")
    if not v:
        lam_min = float(np.linalg.eigvalsh(hermitize(rho)).min())
        if lam_min < eig_floor:
            v.append(f"not positive semidefinite (min eigenvalue {lam_min:.3e})")
    return v


def require_valid_state(rho: np.ndarray) -> np.ndarray:
    v = state_violations(rho)
    if v:
        raise ValueError("invalid density matrix: " + "; ".join(v))
    return np.asarray(rho, dtype=complex)
