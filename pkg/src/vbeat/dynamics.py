"""Rotating-frame Hamiltonian assembly, Lindblad propagation, steady states.

The frame rotates at the laser frequency, so with laser detuning D (ueV,
converted to rad/ps) the excited levels sit at Delta = -D and Delta + delta0,
where delta0 is the fine-structure splitting.  Both optical transitions share
this one frame; the e2 channel keeps a static offset delta0 relative to e1.

The generator acting on the row-major vectorized state splits as

    L(t) = L_static + Omega_pk * f(t) * L_drive

with f(t) the drive envelope, which the integrator exploits: the right-hand
side is two 9x9 matrix-vector products per evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .core import (
    DIM,
    E1,
    E2,
    G,
    CW,
    DriveField,
    EmitterKind,
    EmitterModel,
    hermitize,
    require_valid,
    require_valid_state,
)

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "StepFailure",
    "DegenerateSteadyState",
    "hamiltonian_at",
    "lindblad_rhs",
    "evolve",
    "steady_state",
]


class StepFailure(RuntimeError):
    """Adaptive integrator could not meet tolerance."""


class DegenerateSteadyState(RuntimeError):
    """The Liouvillian null space has dimension > 1."""


# lowering operators sigma_i = |g><e_i| and excited-state projectors
SIGMA_1 = np.zeros((DIM, DIM), dtype=complex)
SIGMA_1[G, E1] = 1.0
SIGMA_2 = np.zeros((DIM, DIM), dtype=complex)
SIGMA_2[G, E2] = 1.0
PROJ_E1 = np.zeros((DIM, DIM), dtype=complex)
PROJ_E1[E1, E1] = 1.0
PROJ_E2 = np.zeros((DIM, DIM), dtype=complex)
PROJ_E2[E2, E2] = 1.0


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    dt_out_ps: float = 2.0
    max_step_ps: float | None = None   # None -> derived from the envelope

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.dt_out_ps > 0:
            raise ValueError("dt_out_ps must be positive")
        if self.max_step_ps is not None and not self.max_step_ps > 0:
            raise ValueError("max_step_ps must be positive")


@dataclass
class Trajectory:
    """Uniformly sampled density-matrix history plus run metadata."""

    times_ps: np.ndarray            # shape (n,)
    states: np.ndarray              # shape (n, 3, 3) complex
    model: EmitterModel
    drive: DriveField

    @property
    def populations(self) -> np.ndarray:
        """Real diagonal (n, 3) array of level populations."""
        return np.real(np.einsum("nii->ni", self.states))

    def __len__(self) -> int:
        return len(self.times_ps)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def hamiltonian_at(model: EmitterModel, drive: DriveField, t: float) -> np.ndarray:
    """3x3 rotating-frame Hamiltonian (units of rad/ps) at time t."""
    require_valid(model)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    delta = -drive.detuning_rad_per_ps
    omega1, omega2 = drive.rabi_at(model, t)
    h = np.zeros((DIM, DIM), dtype=complex)
    h[E1, E1] = delta
    h[E2, E2] = delta + model.fss_rad_per_ps
    h[G, E1] = h[E1, G] = 0.5 * omega1
    h[G, E2] = h[E2, G] = 0.5 * omega2
    return h


def _dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    opd = op.conj().T
    opdop = opd @ op
    return op @ rho @ opd - 0.5 * (opdop @ rho + rho @ opdop)


def lindblad_rhs(model: EmitterModel, rho: np.ndarray, h: np.ndarray) -> np.ndarray:
    """d(rho)/dt for the given Hamiltonian: coherent part plus radiative decay
    on both transitions and pure dephasing of both excited levels."""
    out = -1j * (h @ rho - rho @ h)
    if model.gamma1_per_ps:
        out += model.gamma1_per_ps * _dissipator(SIGMA_1, rho)
    if model.gamma2_per_ps:
        out += model.gamma2_per_ps * _dissipator(SIGMA_2, rho)
    if model.dephasing_per_ps:
        twog = 2.0 * model.dephasing_per_ps
        out += twog * _dissipator(PROJ_E1, rho)
        out += twog * _dissipator(PROJ_E2, rho)
    return out


def _commutator_superop(h: np.ndarray) -> np.ndarray:
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def _dissipator_superop(op: np.ndarray) -> np.ndarray:
    eye = np.eye(op.shape[0])
    opdop = op.conj().T @ op
    return (
        np.kron(op, op.conj())
        - 0.5 * (np.kron(opdop, eye) + np.kron(eye, opdop.T))
    )


def static_superop(model: EmitterModel, detuning_rad_per_ps: float) -> np.ndarray:
    """Drive-independent part of the generator (detunings + dissipators)."""
    delta = -detuning_rad_per_ps
    h0 = np.zeros((DIM, DIM), dtype=complex)
    h0[E1, E1] = delta
    h0[E2, E2] = delta + model.fss_rad_per_ps
    sup = _commutator_superop(h0)
    sup += model.gamma1_per_ps * _dissipator_superop(SIGMA_1)
    sup += model.gamma2_per_ps * _dissipator_superop(SIGMA_2)
    if model.dephasing_per_ps:
        twog = 2.0 * model.dephasing_per_ps
        sup += twog * (_dissipator_superop(PROJ_E1) + _dissipator_superop(PROJ_E2))
    return sup


def drive_superop(model: EmitterModel, drive: DriveField) -> np.ndarray:
    """Generator of the drive commutator per unit of Omega_pk * f(t)."""
    w1, w2 = drive.channel_weights(model)
    hd = 0.5 * (w1 * (SIGMA_1 + SIGMA_1.conj().T) + w2 * (SIGMA_2 + SIGMA_2.conj().T))
    return _commutator_superop(hd)


def liouvillian(model: EmitterModel, drive: DriveField, t: float | None = None) -> np.ndarray:
    """Full 9x9 generator; for CW drives t may be omitted."""
    envelope = 1.0 if t is None else drive.envelope_value(t)
    return static_superop(model, drive.detuning_rad_per_ps) + (
        drive.peak_rabi_rad_per_ps * envelope
    ) * drive_superop(model, drive)


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

def _default_max_step(drive: DriveField, span: float) -> float:
    hint = drive.envelope.step_hint_ps()
    return min(hint, span) if math.isfinite(hint) else span


def evolve(
    model: EmitterModel,
    drive: DriveField,
    rho0: np.ndarray,
    t_span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate the master equation over t_span, sampled every dt_out_ps.

    Uses an embedded adaptive RK 4(5) pair on the vectorized state; output
    samples are re-Hermitized but otherwise untouched.
    """
    require_valid(model)
    rho0 = require_valid_state(rho0)
    if model.kind == EmitterKind.TWO_LEVEL:
        leak = max(np.max(np.abs(rho0[E2, :])), np.max(np.abs(rho0[:, E2])))
        if leak > 1e-12:
            raise ValueError("two-level emitters require zero e2 population/coherence")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must satisfy t_end > t_start")
    cfg = cfg or IntegratorConfig()

    n = int(math.floor((t1 - t0) / cfg.dt_out_ps + 1e-9))
    times = t0 + cfg.dt_out_ps * np.arange(n + 1)

    l_static = static_superop(model, drive.detuning_rad_per_ps)
    l_drive = drive.peak_rabi_rad_per_ps * drive_superop(model, drive)
    envelope = drive.envelope
    t_center = drive.t0_ps
    driven = drive.peak_rabi_rad_per_ps > 0 and np.any(np.abs(l_drive) > 0)

    if driven:
        def rhs(t, y):
            return l_static @ y + envelope.value(t, t_center) * (l_drive @ y)
    else:
        def rhs(t, y):
            return l_static @ y

    max_step = cfg.max_step_ps
    if max_step is None:
        max_step = _default_max_step(drive, t1 - t0) if driven else t1 - t0

    sol = solve_ivp(
        rhs,
        (t0, times[-1]),
        rho0.reshape(-1).astype(complex),
        method="RK45",
        t_eval=times,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=max_step,
    )
    if not sol.success:
        raise StepFailure(f"integrator failed: {sol.message}")

    states = sol.y.T.reshape(-1, DIM, DIM)
    states = 0.5 * (states + states.conj().transpose(0, 2, 1))
    return Trajectory(times_ps=times, states=states, model=model, drive=drive)


# ---------------------------------------------------------------------------
# steady state
# ---------------------------------------------------------------------------

_NULL_SPACE_TOL = 1e-10


def _null_state(generator: np.ndarray, dim: int) -> np.ndarray:
    """Trace-normalized density matrix spanning a one-dimensional null space."""
    _, s, vh = np.linalg.svd(generator)
    null_dim = int(np.sum(s < _NULL_SPACE_TOL * max(1.0, s[0])))
    if null_dim != 1:
        raise DegenerateSteadyState(
            f"generator null space has dimension {null_dim}, expected 1"
        )
    rho = vh[-1].conj().reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-6:
        raise DegenerateSteadyState("null vector has (near-)zero trace")
    return rho / tr


def _two_level_generator(model: EmitterModel, drive: DriveField) -> np.ndarray:
    """4x4 generator on the coupled (g, e1) block.

    The decoupled e2 level would otherwise contribute spurious conserved
    quantities whenever gamma2 = 0."""
    w1, _ = drive.channel_weights(model)
    omega = drive.peak_rabi_rad_per_ps * w1
    h = np.array(
        [[0.0, 0.5 * omega], [0.5 * omega, -drive.detuning_rad_per_ps]],
        dtype=complex,
    )
    sigma = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    proj = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    sup = _commutator_superop(h)
    sup += model.gamma1_per_ps * _dissipator_superop(sigma)
    if model.dephasing_per_ps:
        sup += 2.0 * model.dephasing_per_ps * _dissipator_superop(proj)
    return sup


def steady_state(model: EmitterModel, drive: DriveField) -> np.ndarray:
    """Stationary density matrix of the CW-driven emitter.

    Computed from the null space of the vectorized generator with trace
    normalization; raises DegenerateSteadyState when that space is not
    one-dimensional."""
    require_valid(model)
    if not isinstance(drive.envelope, CW):
        raise ValueError("steady_state requires a CW drive envelope")
    if model.gamma1_per_ps <= 0 and model.gamma2_per_ps <= 0:
        raise ValueError("steady_state requires at least one nonzero decay rate")

    if model.kind == EmitterKind.TWO_LEVEL:
        sub = _null_state(_two_level_generator(model, drive), 2)
        rho = np.zeros((DIM, DIM), dtype=complex)
        rho[:2, :2] = sub
    else:
        rho = _null_state(liouvillian(model, drive), DIM)

    residual = np.max(np.abs(lindblad_rhs(model, rho, hamiltonian_at(model, drive, 0.0))))
    if residual > 1e-10:
        raise DegenerateSteadyState(f"steady-state residual {residual:.3e} exceeds 1e-10")
    return rho
