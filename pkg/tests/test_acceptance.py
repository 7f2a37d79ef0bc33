"""Acceptance gate: one test per stated criterion, printed pass/fail lines.

Run with `pytest tests/test_acceptance.py -v -s` to see the report lines.
Tolerances are pinned here and nowhere else.  One known-red assertion is
documented in /root/notes/decisions.md (triple-beat FFT peak positions).
"""
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import random_density_matrix
from vbeat.core import (
    CW,
    DriveField,
    EmitterKind,
    EmitterModel,
    Gaussian,
    Square,
    energy_to_angular,
    energy_to_ghz,
    ghz_to_angular,
    ground_state,
    pure_state,
)
from vbeat.detection import (
    IntensityTrace,
    convolve_irf,
    projected_intensity,
    total_intensity,
)
from vbeat.dynamics import IntegratorConfig, evolve
from vbeat.beatfit import fft_peaks, fit_fss_beat, fit_triple_beat
from vbeat.spectra import count_peaks, emission_spectrum
from vbeat.experiments import (
    OMEGA_FIG4_RAD_PER_PS,
    default_tls_model,
    default_v_model,
    reproduce_fig4,
    run_fss_beat_experiment,
    run_power_sweep,
)

DELTA0_UEV = 13.0
DELTA0 = energy_to_angular(DELTA0_UEV)
TARGETS_GHZ = sorted(
    [
        abs(1.3 - energy_to_ghz(DELTA0_UEV) / 2.0),
        1.3,
        1.3 + energy_to_ghz(DELTA0_UEV) / 2.0,
    ]
)


def report(name: str, passed: bool, detail: str) -> None:
    print(f"[ACCEPTANCE] {name}: {'PASS' if passed else 'FAIL'} ({detail})")


def _random_config(rng):
    kind = EmitterKind.TWO_LEVEL if rng.random() < 0.3 else EmitterKind.V_SYSTEM
    model = EmitterModel(
        kind=kind,
        fss_ueV=0.0 if kind == EmitterKind.TWO_LEVEL else float(rng.uniform(0.0, 40.0)),
        gamma1_per_ps=float(10 ** rng.uniform(-4, -2)),
        gamma2_per_ps=float(10 ** rng.uniform(-4, -2)),
        dephasing_per_ps=float(rng.choice([0.0, 10 ** rng.uniform(-5, -3)])),
    )
    choice = rng.integers(0, 3)
    if choice == 0:
        envelope = CW()
    elif choice == 1:
        envelope = Square(duration_ps=float(rng.uniform(100.0, 5000.0)))
    else:
        envelope = Gaussian(fwhm_ps=float(rng.uniform(20.0, 500.0)))
    drive = DriveField(
        envelope=envelope,
        peak_rabi_rad_per_ps=float(rng.uniform(0.0, 0.05)),
        detuning_ueV=float(rng.uniform(-20.0, 20.0)),
        pol_angle_rad=float(rng.uniform(0.0, math.pi)),
        t0_ps=float(rng.uniform(0.0, 2000.0)),
    )
    if rng.random() < 0.5:
        rho0 = ground_state()
    elif kind == EmitterKind.TWO_LEVEL:
        amps = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        rho0 = pure_state([amps[0], amps[1], 0.0])
    else:
        rho0 = random_density_matrix(rng)
    return model, drive, rho0


def test_state_validity_suite():
    """50 randomized configurations evolved for 10 ns keep physical states."""
    start = time.monotonic()
    rng = np.random.default_rng(20260809)
    worst_trace = worst_herm = 0.0
    worst_eig = 0.0
    for _ in range(50):
        model, drive, rho0 = _random_config(rng)
        traj = evolve(model, drive, rho0, (0.0, 10000.0), IntegratorConfig(dt_out_ps=20.0))
        traces = np.abs(np.einsum("nii->n", traj.states) - 1.0)
        herm = np.max(np.abs(traj.states - traj.states.conj().transpose(0, 2, 1)))
        eig_min = float(np.linalg.eigvalsh(traj.states).min())
        worst_trace = max(worst_trace, float(traces.max()))
        worst_herm = max(worst_herm, float(herm))
        worst_eig = min(worst_eig, eig_min)
    elapsed = time.monotonic() - start
    ok = worst_trace < 1e-9 and worst_herm < 1e-10 and worst_eig > -1e-8 and elapsed < 60.0
    report(
        "state-validity",
        ok,
        f"|Tr-1|max={worst_trace:.2e}, herm={worst_herm:.2e}, "
        f"eig_min={worst_eig:.2e}, {elapsed:.1f}s",
    )
    assert worst_trace < 1e-9
    assert worst_herm < 1e-10
    assert worst_eig > -1e-8
    assert elapsed < 60.0


def test_rabi_oracle():
    """Lossless driven TLS matches the closed-form Rabi formula to 1e-6."""
    start = time.monotonic()
    rng = np.random.default_rng(42)
    model = EmitterModel(kind=EmitterKind.TWO_LEVEL, gamma1_per_ps=0.0, gamma2_per_ps=0.0)
    worst = 0.0
    for _ in range(20):
        omega = float(rng.uniform(0.002, 0.08))
        det_uev = float(rng.uniform(-15.0, 15.0))
        t_end = float(rng.uniform(20.0, 800.0))
        drive = DriveField(envelope=CW(), peak_rabi_rad_per_ps=omega, detuning_ueV=det_uev)
        traj = evolve(model, drive, ground_state(), (0.0, t_end),
                      IntegratorConfig(dt_out_ps=t_end))
        delta = energy_to_angular(det_uev)
        gen = math.hypot(omega, delta)
        expected = (omega**2 / gen**2) * math.sin(gen * t_end / 2.0) ** 2
        worst = max(worst, abs(traj.states[-1][1, 1].real - expected))
    elapsed = time.monotonic() - start
    ok = worst < 1e-6 and elapsed < 10.0
    report("rabi-oracle", ok, f"max |err|={worst:.2e}, {elapsed:.1f}s")
    assert worst < 1e-6
    assert elapsed < 10.0


def test_projection_completeness():
    """projected(theta) + projected(theta+90deg) == total, pointwise 1e-12."""
    rng = np.random.default_rng(7)
    model = default_v_model()
    worst = 0.0
    for _ in range(5):
        drive = DriveField(
            envelope=CW(),
            peak_rabi_rad_per_ps=float(rng.uniform(0.0, 0.04)),
            detuning_ueV=float(rng.uniform(-10, 10)),
            pol_angle_rad=float(rng.uniform(0, math.pi)),
        )
        traj = evolve(model, drive, random_density_matrix(rng), (0.0, 800.0),
                      IntegratorConfig(dt_out_ps=4.0))
        for theta in rng.uniform(-math.pi, math.pi, size=4):
            a = projected_intensity(traj, float(theta)).values
            b = projected_intensity(traj, float(theta) + math.pi / 2).values
            c = total_intensity(traj).values
            worst = max(worst, float(np.max(np.abs(a + b - c))))
    ok = worst < 1e-12
    report("projection-completeness", ok, f"max |err|={worst:.2e}")
    assert worst < 1e-12


def test_fss_beat_frequency():
    """Short-pulse beat at 13 ueV hits E/h within 2%; sweep slope 1.00+-0.02."""
    start = time.monotonic()
    sweep = run_fss_beat_experiment(default_v_model(), [13.0, 20.0, 30.0, 40.0])
    beat_13 = sweep.value_ghz[0]
    target = energy_to_ghz(13.0)
    x = energy_to_angular(sweep.parameter)
    y = ghz_to_angular(sweep.value_ghz)
    slope, intercept = np.polyfit(x, y, 1)
    intercept_ghz = intercept * 1000.0 / (2.0 * math.pi)
    elapsed = time.monotonic() - start
    ok = (
        abs(beat_13 - target) / target < 0.02
        and abs(slope - 1.0) < 0.02
        and abs(intercept_ghz) < 0.05
        and elapsed < 30.0
    )
    report(
        "fss-beat-frequency",
        ok,
        f"beat(13ueV)={beat_13:.4f} GHz vs {target:.4f}, slope={slope:.4f}, "
        f"intercept={intercept_ghz:.4f} GHz, {elapsed:.1f}s",
    )
    assert abs(beat_13 - target) / target < 0.02
    assert abs(slope - 1.0) < 0.02
    assert abs(intercept_ghz) < 0.05
    assert elapsed < 30.0


@pytest.fixture(scope="module")
def fig4_traces():
    return reproduce_fig4()


def test_triple_beat_constrained_fit(fig4_traces):
    """Constrained-fit components land on 0.27/1.30/2.87 GHz within 0.05."""
    start = time.monotonic()
    trace = fig4_traces["d"]
    window = trace.window(*trace.meta["fit_window_ps"])
    fit = fit_triple_beat(window, DELTA0)
    errs = np.abs(fit.frequencies_ghz - TARGETS_GHZ)
    elapsed = time.monotonic() - start
    ok = bool(np.all(errs < 0.05)) and elapsed < 30.0
    report(
        "triple-beat-constrained-fit",
        ok,
        f"components={np.round(fit.frequencies_ghz, 4)} GHz, "
        f"max err={errs.max():.4f} GHz, {elapsed:.1f}s",
    )
    assert np.all(errs < 0.05)
    assert elapsed < 30.0


def test_triple_beat_fft_peaks(fig4_traces):
    """FFT peaks at 0.27/1.30/2.87 GHz within 0.05 (known-red: the driven
    V-system physically beats at {W, d0-W/2, d0+W/2}, see decisions ledger)."""
    start = time.monotonic()
    trace = fig4_traces["d"]
    window = trace.window(*trace.meta["fit_window_ps"])
    peaks = fft_peaks(window)
    got = sorted(p.frequency_rad_per_ps * 1000.0 / (2.0 * math.pi) for p in peaks.peaks)
    errs = [min(abs(g - t) for g in got) if got else math.inf for t in TARGETS_GHZ]
    elapsed = time.monotonic() - start
    ok = len(got) >= 3 and max(errs) < 0.05
    report(
        "triple-beat-fft-peaks",
        ok,
        f"peaks={np.round(got, 4)} GHz vs targets {np.round(TARGETS_GHZ, 4)}, "
        f"errs={np.round(errs, 3)}; spec defect, see /root/notes/decisions.md"
        f", {elapsed:.1f}s",
    )
    assert len(got) >= 3
    assert max(errs) < 0.05, (
        "the master-equation beat set {W, d0-W/2, d0+W/2} cannot coincide "
        "with the caption arithmetic at W/2pi = 1.3 GHz (see decisions ledger)"
    )


def test_triple_beat_two_level(fig4_traces):
    """The same drive on a two-level emitter keeps one component at 1.30."""
    start = time.monotonic()
    trace = fig4_traces["c"]
    window = trace.window(*trace.meta["fit_window_ps"])
    single = fit_fss_beat(window)
    fit = fit_triple_beat(window, DELTA0)
    amps = dict(zip(fit.component_roles, fit.amplitudes))
    side_frac = max(amps["minus"], amps["plus"]) / amps["center"]
    elapsed = time.monotonic() - start
    ok = abs(single.omega_ghz - 1.30) < 0.03 and side_frac < 0.05 and elapsed < 30.0
    report(
        "triple-beat-two-level",
        ok,
        f"single={single.omega_ghz:.4f} GHz, side/main={side_frac:.2e}, {elapsed:.1f}s",
    )
    assert abs(single.omega_ghz - 1.30) < 0.03
    assert side_frac < 0.05
    assert elapsed < 30.0


def test_power_linearity():
    """Fitted rate vs sqrt(power): R^2 > 0.99 over a 16x range, both kinds."""
    start = time.monotonic()
    powers = [0.5 * 2 ** (k / 2) for k in range(9)]   # 0.5 .. 8.0
    r2 = {}
    for model, name in ((default_tls_model(), "two_level"), (default_v_model(), "v_system")):
        sweep = run_power_sweep(model, powers)
        x = np.sqrt(sweep.parameter)
        y = sweep.value_ghz
        coef = np.polyfit(x, y, 1)
        pred = np.polyval(coef, x)
        r2[name] = 1.0 - np.sum((y - pred) ** 2) / np.sum((y - y.mean()) ** 2)
    elapsed = time.monotonic() - start
    ok = all(v > 0.99 for v in r2.values()) and elapsed < 120.0
    report(
        "power-linearity",
        ok,
        f"R2(two_level)={r2['two_level']:.6f}, R2(v_system)={r2['v_system']:.6f}, "
        f"{elapsed:.1f}s",
    )
    assert r2["two_level"] > 0.99
    assert r2["v_system"] > 0.99
    assert elapsed < 120.0


def test_irf_attenuation():
    """A 150-ps IRF scales the 3.14 GHz beat visibility by 0.453 +- 0.01."""
    t = np.arange(0.0, 6000.0 + 1e-9, 2.0)
    y = np.exp(-t / 1000.0) * (1.0 + 0.8 * np.cos(DELTA0 * t))
    clean = IntensityTrace(times_ps=t, values=y)
    blurred = convolve_irf(clean, 150.0)
    window = (400.0, 5600.0)
    fit_clean = fit_fss_beat(clean.window(*window))
    fit_blur = fit_fss_beat(blurred.window(*window))
    vis_clean = fit_clean.amplitudes[0] / fit_clean.baseline
    vis_blur = fit_blur.amplitudes[0] / fit_blur.baseline
    measured = vis_blur / vis_clean
    sigma = 150.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    expected = math.exp(-0.5 * (sigma * DELTA0) ** 2)
    ok = abs(measured - 0.453) < 0.01
    report(
        "irf-attenuation",
        ok,
        f"measured={measured:.4f}, Gaussian factor={expected:.4f}, target 0.453+-0.01",
    )
    assert expected == pytest.approx(0.4532, abs=1e-3)
    assert abs(measured - 0.453) < 0.01


def test_mollow_and_multiplet_spectra():
    """TLS emission shows side peaks at +-W; the V-system shows >= 5 maxima."""
    start = time.monotonic()
    from scipy.signal import find_peaks

    tls = default_tls_model()
    omega = 0.02
    drive = DriveField(envelope=CW(), peak_rabi_rad_per_ps=omega)
    spec = emission_spectrum(tls, drive, (-8.0, 8.0), 801, pol_angle_rad=0.0)
    peaks, _ = find_peaks(spec.values, prominence=1e-3 * spec.values.max())
    positions = sorted(spec.axis[peaks])
    side = omega * 1000.0 / (2.0 * math.pi)
    bin_ghz = spec.axis[1] - spec.axis[0]
    mollow_ok = (
        len(positions) == 3
        and abs(positions[0] + side) <= bin_ghz
        and abs(positions[2] - side) <= bin_ghz
    )

    v = default_v_model()
    drive_v = DriveField(
        envelope=CW(),
        peak_rabi_rad_per_ps=OMEGA_FIG4_RAD_PER_PS / math.cos(math.pi / 4),
        pol_angle_rad=math.pi / 4,
    )
    spec_v = emission_spectrum(v, drive_v, (-6.0, 10.0), 1601, pol_angle_rad=math.pi / 4)
    n_peaks = count_peaks(spec_v)
    elapsed = time.monotonic() - start
    ok = mollow_ok and n_peaks >= 5 and elapsed < 30.0
    report(
        "mollow-multiplet-spectra",
        ok,
        f"TLS sides at +-{side:.3f} GHz ok={mollow_ok}, V maxima={n_peaks}, {elapsed:.1f}s",
    )
    assert mollow_ok
    assert n_peaks >= 5
    assert elapsed < 30.0


def test_fit_round_trips():
    """Noiseless synthetics recover frequencies to 1e-3; 1% noise to 1%."""
    start = time.monotonic()
    omega = OMEGA_FIG4_RAD_PER_PS
    t = np.arange(0.0, 2000.0 + 1e-9, 4.0)

    y1 = np.exp(-t / 1000.0) * (1.0 + 0.8 * np.cos(DELTA0 * t + 0.3))
    fit1 = fit_fss_beat(IntensityTrace(times_ps=t, values=y1))
    err_single = abs(fit1.omega_rad_per_ps - DELTA0) / DELTA0

    freqs = (omega - DELTA0 / 2, omega, omega + DELTA0 / 2)
    t3 = np.arange(0.0, 3000.0 + 1e-9, 2.0)
    y3 = np.exp(-t3 / 1300.0) * (
        0.5
        + 0.2 * np.cos(freqs[0] * t3 + 0.3)
        + 0.25 * np.cos(freqs[1] * t3 - 0.5)
        + 0.15 * np.cos(freqs[2] * t3 + 1.0)
    )
    fit3 = fit_triple_beat(IntensityTrace(times_ps=t3, values=y3), DELTA0)
    err_triple = abs(fit3.omega_rad_per_ps - omega) / omega

    errs_mc = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noisy = y1 + 0.01 * y1.max() * rng.standard_normal(len(t))
        fit = fit_fss_beat(IntensityTrace(times_ps=t, values=noisy))
        errs_mc.append(abs(fit.omega_rad_per_ps - DELTA0) / DELTA0)
    worst_mc = max(errs_mc)
    elapsed = time.monotonic() - start
    ok = err_single < 1e-3 and err_triple < 1e-3 and worst_mc <= 0.01 and elapsed < 60.0
    report(
        "fit-round-trips",
        ok,
        f"noiseless single={err_single:.2e}, triple={err_triple:.2e}, "
        f"worst of 100 noisy={worst_mc:.4f}, {elapsed:.1f}s",
    )
    assert err_single < 1e-3
    assert err_triple < 1e-3
    assert worst_mc <= 0.01
    assert elapsed < 60.0
