import math

import numpy as np
import pytest
from scipy.signal import find_peaks

from vbeat.core import (
    CW,
    DriveField,
    EmitterKind,
    EmitterModel,
    energy_to_angular,
    ghz_to_angular,
)
from vbeat.dynamics import DegenerateSteadyState
from vbeat.spectra import (
    SpectrumKind,
    count_peaks,
    detuning_spectrum,
    emission_spectrum,
)


def cw(omega, pol=0.0, det=0.0):
    return DriveField(envelope=CW(), peak_rabi_rad_per_ps=omega,
                      detuning_ueV=det, pol_angle_rad=pol)


# ---------------------------------------------------------------------------
# detuning scans
# ---------------------------------------------------------------------------

def test_two_level_weak_drive_lorentzian(tls_model):
    # closed-form steady state: (W^2/4)/(D^2 + G^2/4 + W^2/2)
    omega = energy_to_angular(0.1)
    spec = detuning_spectrum(tls_model, cw(omega), (-3.0, 3.0), 241)
    deltas = energy_to_angular(spec.axis)
    expected = (omega**2 / 4) / (deltas**2 + 1e-6 / 4 + omega**2 / 2)
    assert np.max(np.abs(spec.values - expected)) < 1e-12
    assert spec.kind == SpectrumKind.DETUNING_SCAN
    assert spec.axis_unit == "ueV"


def test_two_level_linewidth_limit(tls_model):
    # FWHM -> hbar * Gamma = 0.658 ueV as the drive vanishes
    spec = detuning_spectrum(tls_model, cw(energy_to_angular(0.01)), (-2.0, 2.0), 4001)
    half = spec.values.max() / 2.0
    above = spec.axis[spec.values >= half]
    assert above[-1] - above[0] == pytest.approx(0.658, abs=2e-3)


def test_v_system_two_peaks(v_model):
    spec = detuning_spectrum(v_model, cw(energy_to_angular(0.1), pol=math.pi / 4),
                             (-5.0, 20.0), 251)
    peaks, _ = find_peaks(spec.values)
    positions = spec.axis[peaks]
    step = spec.axis[1] - spec.axis[0]
    assert len(positions) == 2
    assert abs(positions[0] - 0.0) <= step
    assert abs(positions[1] - 13.0) <= step


def test_v_weak_drive_is_two_displaced_lineshapes(v_model, tls_model):
    # superposition of two displaced two-level lineshapes, 2% pointwise
    omega = energy_to_angular(0.1)
    spec_v = detuning_spectrum(v_model, cw(omega, pol=math.pi / 4), (-5.0, 20.0), 301)
    eff = omega * math.cos(math.pi / 4)
    copy_at_zero = detuning_spectrum(tls_model, cw(eff), (-5.0, 20.0), 301)
    copy_at_13 = detuning_spectrum(tls_model, cw(eff), (-18.0, 7.0), 301)
    combined = copy_at_zero.values + copy_at_13.values
    assert np.max(np.abs(spec_v.values - combined)) < 0.02 * spec_v.values.max()


def test_zero_drive_scan_is_zero(v_model):
    spec = detuning_spectrum(v_model, cw(0.0), (-5.0, 20.0), 41)
    assert np.max(np.abs(spec.values)) < 1e-14


def test_detuning_scan_propagates_degeneracy():
    m = EmitterModel(kind=EmitterKind.V_SYSTEM, fss_ueV=13.0,
                     gamma1_per_ps=1e-3, gamma2_per_ps=0.0)
    with pytest.raises(DegenerateSteadyState):
        detuning_spectrum(m, cw(0.01, pol=0.0), (-2.0, 2.0), 5)


# ---------------------------------------------------------------------------
# emission spectra
# ---------------------------------------------------------------------------

def test_mollow_triplet_positions(tls_model):
    omega = 0.02
    spec = emission_spectrum(tls_model, cw(omega), (-8.0, 8.0), 801, pol_angle_rad=0.0)
    peaks, _ = find_peaks(spec.values, prominence=1e-3 * spec.values.max())
    positions = sorted(spec.axis[peaks])
    side = omega * 1000.0 / (2.0 * math.pi)
    step = spec.axis[1] - spec.axis[0]
    assert len(positions) == 3
    assert abs(positions[0] + side) <= step
    assert abs(positions[1]) <= step
    assert abs(positions[2] - side) <= step


def test_weak_drive_single_lorentzian_width(tls_model):
    # free-decay correlation: FWHM = Gamma + 2*gamma_d in rad/ps
    m = EmitterModel(kind=EmitterKind.TWO_LEVEL, gamma1_per_ps=1e-3,
                     gamma2_per_ps=1e-3, dephasing_per_ps=5e-4)
    spec = emission_spectrum(m, cw(1e-4), (-1.5, 1.5), 6001, pol_angle_rad=0.0)
    half = spec.values.max() / 2.0
    above = spec.axis[spec.values >= half]
    fwhm_ghz = above[-1] - above[0]
    expected = (1e-3 + 2 * 5e-4) * 1000.0 / (2.0 * math.pi)
    assert fwhm_ghz == pytest.approx(expected, rel=0.02)


def test_v_system_multiplet(v_model):
    omega_eff = ghz_to_angular(1.3)
    drive = cw(omega_eff / math.cos(math.pi / 4), pol=math.pi / 4)
    spec = emission_spectrum(v_model, drive, (-6.0, 10.0), 1601,
                             pol_angle_rad=math.pi / 4)
    assert count_peaks(spec) >= 5


def test_emission_power_identity(v_model):
    drive = cw(0.015, pol=math.pi / 4, det=1.0)
    spec = emission_spectrum(v_model, drive, (-6.0, 6.0), 101)
    assert spec.meta["power_total"] == pytest.approx(
        spec.meta["detected_ss_intensity"], rel=1e-6
    )
    assert spec.meta["method"] == "eigendecomposition"


def test_emission_values_floor(tls_model, v_model):
    for model, drive in ((tls_model, cw(0.02)),
                         (v_model, cw(0.02, pol=math.pi / 4))):
        spec = emission_spectrum(model, drive, (-10.0, 10.0), 501)
        assert spec.values.min() > -1e-9


def test_mollow_positions_linear_in_drive(tls_model):
    # peak positions scale linearly with the drive over a 4x sweep
    omegas = [0.01, 0.02, 0.03, 0.04]
    positions = []
    for omega in omegas:
        span = omega * 1000.0 / math.pi   # +- 2x the sideband position
        spec = emission_spectrum(tls_model, cw(omega), (-span, span), 2001,
                                 pol_angle_rad=0.0)
        peaks, _ = find_peaks(spec.values, prominence=1e-3 * spec.values.max())
        positions.append(max(spec.axis[peaks]))
    x = np.asarray(omegas)
    y = np.asarray(positions)
    coef = np.polyfit(x, y, 1)
    pred = np.polyval(coef, x)
    r2 = 1 - np.sum((y - pred) ** 2) / np.sum((y - y.mean()) ** 2)
    assert r2 > 0.999


def test_emission_requires_cw(v_model):
    from vbeat.core import Square

    drive = DriveField(envelope=Square(duration_ps=100.0), peak_rabi_rad_per_ps=0.01)
    with pytest.raises(ValueError):
        emission_spectrum(v_model, drive, (-5.0, 5.0), 11)
