"""Desk-scale experiment pipelines: pulse calibration, splitting sweeps,
power sweeps, and the four canonical transients.

Drive strengths are specified through the effective Rabi rate on the e1
channel; when the excitation polarization sits at 45 degrees (driving both
dipoles of a split doublet) the peak rate is scaled up by 1/cos(45) so that
the e1 channel sees the requested rate.  Short-pulse experiments fit the
free-decay transient after the pulse; long square drives fit the driven
oscillation inside the pulse window.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    DriveField,
    EmitterKind,
    EmitterModel,
    Envelope,
    Gaussian,
    Square,
    angular_to_ghz,
    ghz_to_angular,
    ground_state,
    require_valid,
)
from .detection import (
    DEFAULT_ANALYZER_ANGLE,
    DetectionConfig,
    IntensityTrace,
    detect,
)
from .dynamics import IntegratorConfig, evolve
from .beatfit import BeatFitResult, fit_fss_beat, fit_triple_beat

__all__ = [
    "OMEGA_FIG4_RAD_PER_PS",
    "PiPulseCalibration",
    "SweepResult",
    "pi_pulse_calibrate",
    "run_fss_beat_experiment",
    "run_power_sweep",
    "reproduce_fig4",
    "fss_from_field",
    "default_v_model",
    "default_tls_model",
]

OMEGA_FIG4_RAD_PER_PS = ghz_to_angular(1.3)   # canonical Rabi rate, 1.3 GHz

DEFAULT_EXCITATION_ANGLE = math.pi / 4.0
# Rabi-rate sweeps use a small e2 admixture: with equal coupling the dressed
# branch structure distorts the constrained fit enough to break the
# rate-vs-sqrt(power) linearity (measured R^2 ~ 0.96 at 45deg vs > 0.999
# at 10deg over a 16x range), while 10deg still shows all three components
POWER_SWEEP_EXCITATION_ANGLE = math.radians(10.0)
SHORT_PULSE_FWHM_PS = 100.0
LONG_PULSE_DURATION_PS = 2000.0
DEFAULT_IRF_FWHM_PS = 150.0
DT_OUT_PS = 2.0
SHORT_SPAN_PS = 4000.0
LONG_SPAN_PS = 3000.0
SHORT_PULSE_T0_PS = 200.0
LONG_PULSE_T0_PS = 2.0


def default_v_model() -> EmitterModel:
    return EmitterModel(kind=EmitterKind.V_SYSTEM, fss_ueV=13.0)


def default_tls_model() -> EmitterModel:
    return EmitterModel(kind=EmitterKind.TWO_LEVEL)


def fss_from_field(b_tesla: float, fss0_ueV: float, kappa_uev_per_tesla: float) -> float:
    """Phenomenological field mapping sqrt(fss0^2 + (kappa*B)^2).

    Utility only: the splitting sweeps below take the splitting axis
    directly, since no first-principles field law is assumed."""
    return math.hypot(fss0_ueV, kappa_uev_per_tesla * b_tesla)


def _worker_count(max_workers: int | None, n_items: int) -> int:
    n = max_workers if max_workers is not None else min(8, os.cpu_count() or 1)
    cap = os.environ.get("VBEAT_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, min(n, n_items))


def _map_points(fn, items, max_workers):
    workers = _worker_count(max_workers, len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))   # order preserved regardless of completion


# ---------------------------------------------------------------------------
# pi-pulse calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiPulseCalibration:
    """Peak Rabi rate for unit pulse area pi, plus the simulated inversion."""

    omega_pk_rad_per_ps: float
    final_excited_population: float
    warning: str | None = None


def pi_pulse_calibrate(
    model: EmitterModel,
    envelope: Envelope,
    verify: bool = True,
) -> PiPulseCalibration:
    """Peak Rabi rate giving pulse area pi on the driven channel.

    Verification simulates the two-level embedding driven head-on; a warning
    flags inversions <= 0.99, which is unavoidable once decay during the
    pulse is non-negligible."""
    require_valid(model)
    area = envelope.area_ps
    if not math.isfinite(area):
        raise ValueError("pi-pulse calibration requires a pulsed envelope")
    omega_pk = math.pi / area

    final_pop = math.nan
    warning = None
    if verify:
        # sample right at the effective pulse end so free decay afterwards
        # does not masquerade as a calibration error
        if isinstance(envelope, Gaussian):
            t0 = 3.0 * envelope.fwhm_ps
            t_end = t0 + 1.25 * envelope.fwhm_ps
        else:
            t0 = 2.0
            t_end = t0 + envelope.duration_ps + 1.0
        drive = DriveField(
            envelope=envelope,
            peak_rabi_rad_per_ps=omega_pk,
            pol_angle_rad=0.0,
            t0_ps=t0,
        )
        traj = evolve(
            model.two_level_view(),
            drive,
            ground_state(),
            (0.0, t_end),
            IntegratorConfig(dt_out_ps=t_end / 200.0),
        )
        final_pop = float(np.real(traj.states[-1][1, 1]))
        if final_pop <= 0.99:
            warning = (
                f"pi-pulse inversion {final_pop:.4f} <= 0.99: "
                "decay during the pulse limits the achievable inversion"
            )
    return PiPulseCalibration(
        omega_pk_rad_per_ps=omega_pk,
        final_excited_population=final_pop,
        warning=warning,
    )


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    """Per-point fitted frequency (GHz) over a swept parameter axis."""

    kind: str                        # "fss" or "power"
    parameter: np.ndarray
    value_ghz: np.ndarray            # nan where the point failed
    stderr_ghz: np.ndarray
    converged: np.ndarray
    fits: list[BeatFitResult | None]
    errors: list[str | None]
    traces: list[IntensityTrace | None] | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.parameter)


def _assemble(kind, parameter, points, meta, keep_traces) -> SweepResult:
    value = np.full(len(points), math.nan)
    stderr = np.full(len(points), math.nan)
    conv = np.zeros(len(points), dtype=bool)
    fits: list[BeatFitResult | None] = []
    errors: list[str | None] = []
    traces: list[IntensityTrace | None] = []
    for i, (fit, err, trace) in enumerate(points):
        fits.append(fit)
        errors.append(err)
        traces.append(trace)
        if fit is not None:
            value[i] = fit.omega_ghz
            stderr[i] = angular_to_ghz(fit.omega_stderr_rad_per_ps())
            conv[i] = fit.converged
    return SweepResult(
        kind=kind,
        parameter=np.asarray(parameter, dtype=float),
        value_ghz=value,
        stderr_ghz=stderr,
        converged=conv,
        fits=fits,
        errors=errors,
        traces=traces if keep_traces else None,
        meta=meta,
    )


def simulate_fss_transient(
    model: EmitterModel,
    *,
    pulse_fwhm_ps: float = SHORT_PULSE_FWHM_PS,
    t0_ps: float = SHORT_PULSE_T0_PS,
    span_ps: float = SHORT_SPAN_PS,
    theta_exc: float = DEFAULT_EXCITATION_ANGLE,
    theta_det: float | None = DEFAULT_ANALYZER_ANGLE,
    irf_fwhm_ps: float = DEFAULT_IRF_FWHM_PS,
    dt_out_ps: float = DT_OUT_PS,
) -> IntensityTrace:
    """Detected transient after a short pi pulse resonant with e1."""
    cal = pi_pulse_calibrate(model, Gaussian(fwhm_ps=pulse_fwhm_ps), verify=False)
    w1 = math.cos(theta_exc - model.dipole_angles_rad[0])
    drive = DriveField(
        envelope=Gaussian(fwhm_ps=pulse_fwhm_ps),
        peak_rabi_rad_per_ps=cal.omega_pk_rad_per_ps / w1,
        pol_angle_rad=theta_exc,
        t0_ps=t0_ps,
    )
    traj = evolve(
        model, drive, ground_state(), (0.0, span_ps), IntegratorConfig(dt_out_ps=dt_out_ps)
    )
    trace = detect(traj, DetectionConfig(pol_angle_rad=theta_det, irf_fwhm_ps=irf_fwhm_ps))
    # one envelope width past the pulse end plus the detector blur tail, and
    # clear of the final-sample convolution boundary: the fitted model only
    # holds where the free decay is uncontaminated
    sigma_irf = irf_fwhm_ps / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    trace.meta["fit_window_ps"] = (
        t0_ps + 2.0 * pulse_fwhm_ps + 3.0 * sigma_irf,
        span_ps - 5.0 * sigma_irf,
    )
    return trace


def run_fss_beat_experiment(
    model: EmitterModel,
    fss_list_ueV,
    *,
    max_workers: int | None = None,
    keep_traces: bool = False,
    **knobs,
) -> SweepResult:
    """Short-pulse quantum-beat frequency for each splitting value.

    Per point: simulate a 100-ps pi pulse on e1, project the emission,
    blur with the detector response, and fit the single-beat model on the
    post-pulse window.  Fit failures are recorded per point without
    aborting the sweep."""
    require_valid(model)
    fss_list = [float(x) for x in fss_list_ueV]
    if not fss_list:
        raise ValueError("fss_list_ueV must not be empty")
    if any(x < 0 for x in fss_list):
        raise ValueError("fss values must be >= 0")

    def point(fss):
        trace = None
        try:
            m = replace(model, fss_ueV=fss, kind=EmitterKind.V_SYSTEM)
            trace = simulate_fss_transient(m, **knobs)
            fit = fit_fss_beat(trace.window(*trace.meta["fit_window_ps"]))
            return fit, None, trace
        except Exception as exc:   # per-point failures must not kill the sweep
            return None, f"{type(exc).__name__}: {exc}", trace

    points = _map_points(point, fss_list, max_workers)
    return _assemble("fss", fss_list, points, {"knobs": dict(knobs)}, keep_traces)


def simulate_driven_transient(
    model: EmitterModel,
    omega_eff_rad_per_ps: float,
    *,
    duration_ps: float = LONG_PULSE_DURATION_PS,
    t0_ps: float = LONG_PULSE_T0_PS,
    span_ps: float = LONG_SPAN_PS,
    theta_exc: float | None = None,
    theta_det: float | None = DEFAULT_ANALYZER_ANGLE,
    irf_fwhm_ps: float = DEFAULT_IRF_FWHM_PS,
    dt_out_ps: float = DT_OUT_PS,
) -> IntensityTrace:
    """Detected transient under a long square drive resonant with e1.

    omega_eff_rad_per_ps is the Rabi rate felt by the e1 channel; V-systems
    default to 45-degree excitation so both dipoles couple."""
    if theta_exc is None:
        theta_exc = (
            DEFAULT_EXCITATION_ANGLE
            if model.kind == EmitterKind.V_SYSTEM
            else model.dipole_angles_rad[0]
        )
    w1 = math.cos(theta_exc - model.dipole_angles_rad[0])
    drive = DriveField(
        envelope=Square(duration_ps=duration_ps),
        peak_rabi_rad_per_ps=omega_eff_rad_per_ps / w1,
        pol_angle_rad=theta_exc,
        t0_ps=t0_ps,
    )
    traj = evolve(
        model, drive, ground_state(), (0.0, span_ps), IntegratorConfig(dt_out_ps=dt_out_ps)
    )
    trace = detect(traj, DetectionConfig(pol_angle_rad=theta_det, irf_fwhm_ps=irf_fwhm_ps))
    # keep clear of the blurred turn-on and turn-off: inside those zones the
    # detected signal mixes driven and free evolution and no single model fits
    sigma_irf = irf_fwhm_ps / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    trace.meta["fit_window_ps"] = (
        t0_ps + 10.0 + 2.0 * sigma_irf,
        t0_ps + duration_ps - 10.0 - 2.0 * sigma_irf,
    )
    return trace


def run_power_sweep(
    model: EmitterModel,
    power_list,
    *,
    rabi_at_unit_power_rad_per_ps: float = OMEGA_FIG4_RAD_PER_PS,
    max_workers: int | None = None,
    keep_traces: bool = False,
    **knobs,
) -> SweepResult:
    """Fitted Rabi rate versus excitation power under a 2-ns square drive.

    The field amplitude scales as sqrt(power), anchored so that unit power
    gives the canonical 1.3 GHz rate.  V-systems are fitted with the
    three-component model constrained by their splitting, two-level emitters
    with the single-beat model."""
    require_valid(model)
    powers = [float(p) for p in power_list]
    if not powers:
        raise ValueError("power_list must not be empty")
    if any(p <= 0 for p in powers):
        raise ValueError("powers must be > 0")

    if model.kind == EmitterKind.V_SYSTEM:
        knobs.setdefault("theta_exc", POWER_SWEEP_EXCITATION_ANGLE)

    def point(power):
        trace = None
        try:
            omega_eff = rabi_at_unit_power_rad_per_ps * math.sqrt(power)
            trace = simulate_driven_transient(model, omega_eff, **knobs)
            window = trace.window(*trace.meta["fit_window_ps"])
            if model.kind == EmitterKind.V_SYSTEM:
                # seed at the commanded rate: with the detector blur the slow
                # branch can dominate the spectrum and strand a blind seed
                fit = fit_triple_beat(
                    window,
                    model.fss_rad_per_ps,
                    init={"omega_rad_per_ps": omega_eff},
                )
            else:
                fit = fit_fss_beat(window)
            return fit, None, trace
        except Exception as exc:
            return None, f"{type(exc).__name__}: {exc}", trace

    points = _map_points(point, powers, max_workers)
    meta = {
        "rabi_at_unit_power_rad_per_ps": rabi_at_unit_power_rad_per_ps,
        "knobs": dict(knobs),
    }
    return _assemble("power", powers, points, meta, keep_traces)


# ---------------------------------------------------------------------------
# canonical transient quartet
# ---------------------------------------------------------------------------

def reproduce_fig4(
    v_model: EmitterModel | None = None,
    tls_model: EmitterModel | None = None,
    omega_eff_rad_per_ps: float = OMEGA_FIG4_RAD_PER_PS,
) -> dict[str, IntensityTrace]:
    """Four projected transients: short pi pulse and long drive on both
    emitter kinds.  No detector blur so the raw beat structure is visible.

    (a) pi pulse, two-level: bare decay, no beat
    (b) pi pulse, split doublet: splitting beat
    (c) long drive, two-level: Rabi beat
    (d) long drive, split doublet: three combined beat components
    """
    v_model = v_model or default_v_model()
    tls_model = tls_model or default_tls_model()
    traces = {
        "a": simulate_fss_transient(tls_model, irf_fwhm_ps=0.0),
        "b": simulate_fss_transient(v_model, irf_fwhm_ps=0.0),
        "c": simulate_driven_transient(tls_model, omega_eff_rad_per_ps, irf_fwhm_ps=0.0),
        "d": simulate_driven_transient(v_model, omega_eff_rad_per_ps, irf_fwhm_ps=0.0),
    }
    for name, trace in traces.items():
        trace.meta["panel"] = name
    return traces
