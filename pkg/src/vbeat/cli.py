"""Command-line front end: simulate | fit | sweep | spectrum | reproduce-fig.

Configs are strict JSON (unknown keys rejected, errors name the offending
field).  Tabular outputs are CSV with a single header row and floats at nine
significant digits; trace and summary CSVs are byte-identical across reruns
of the same config, while each output gets a .meta.json sidecar carrying the
timestamp and the fully resolved configuration.

Exit codes: 0 ok, 2 config/input error, 3 numerical failure, 4 fit
non-convergence.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    CW,
    DriveField,
    EmitterKind,
    EmitterModel,
    Gaussian,
    Square,
    basis_state,
    ground_state,
    pure_state,
    require_valid,
    validate,
)
from .detection import DetectionConfig, IntensityTrace, detect
from .dynamics import DegenerateSteadyState, IntegratorConfig, StepFailure, evolve
from .beatfit import (
    AmbiguousSeed,
    BeatFitResult,
    DegenerateOmega,
    FitModel,
    TraceTooShort,
    fit_fss_beat,
    fit_triple_beat,
)
from .spectra import NonDiagonalizableGenerator, Spectrum, detuning_spectrum, emission_spectrum
from .experiments import (
    OMEGA_FIG4_RAD_PER_PS,
    default_tls_model,
    default_v_model,
    reproduce_fig4,
    run_fss_beat_experiment,
    run_power_sweep,
    simulate_fss_transient,
)

FLOAT_FMT = "%.9g"


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# strict config parsing
# ---------------------------------------------------------------------------

class _Section:
    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must be an object")
        self.data = dict(data)
        self.path = path

    _REQUIRED = object()

    def take(self, key, default=_REQUIRED):
        if key in self.data:
            return self.data.pop(key)
        if default is self._REQUIRED:
            raise ConfigError(f"{self.path}.{key} required")
        return default

    def finish(self):
        for key in self.data:
            raise ConfigError(f"{self.path}.{key}: unknown key")


def _number(value, path, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number")
    return float(value)


def parse_emitter(data: dict) -> EmitterModel:
    sec = _Section(data, "emitter")
    kind_raw = sec.take("kind")
    try:
        kind = EmitterKind(kind_raw)
    except ValueError:
        raise ConfigError("emitter.kind must be 'two_level' or 'v_system'")
    if kind == EmitterKind.V_SYSTEM:
        fss = _number(sec.take("fss_ueV"), "emitter.fss_ueV")
    else:
        fss = _number(sec.take("fss_ueV", 0.0), "emitter.fss_ueV")
    model = EmitterModel(
        kind=kind,
        fss_ueV=fss,
        gamma1_per_ps=_number(sec.take("gamma1_per_ps", 1e-3), "emitter.gamma1_per_ps"),
        gamma2_per_ps=_number(sec.take("gamma2_per_ps", 1e-3), "emitter.gamma2_per_ps"),
        dephasing_per_ps=_number(sec.take("dephasing_per_ps", 0.0), "emitter.dephasing_per_ps"),
    )
    sec.finish()
    report = validate(model)
    if not report.passed:
        raise ConfigError("emitter: " + "; ".join(report.violations))
    return model


def parse_envelope(data, path: str):
    sec = _Section(data, path)
    kind = sec.take("kind")
    if kind == "cw":
        envelope = CW()
    elif kind == "square":
        envelope = Square(duration_ps=_number(sec.take("duration_ps"), f"{path}.duration_ps"))
    elif kind == "gaussian":
        envelope = Gaussian(fwhm_ps=_number(sec.take("fwhm_ps"), f"{path}.fwhm_ps"))
    else:
        raise ConfigError(f"{path}.kind must be 'cw', 'square' or 'gaussian'")
    sec.finish()
    return envelope


def parse_drive(data: dict) -> DriveField:
    sec = _Section(data, "drive")
    envelope = parse_envelope(sec.take("envelope"), "drive.envelope")
    try:
        drive = DriveField(
            envelope=envelope,
            peak_rabi_rad_per_ps=_number(sec.take("peak_rabi_rad_per_ps"), "drive.peak_rabi_rad_per_ps"),
            detuning_ueV=_number(sec.take("detuning_ueV", 0.0), "drive.detuning_ueV"),
            pol_angle_rad=_number(sec.take("pol_angle_rad", 0.0), "drive.pol_angle_rad"),
            t0_ps=_number(sec.take("t0_ps", 0.0), "drive.t0_ps"),
        )
    except ValueError as exc:
        raise ConfigError(f"drive: {exc}")
    sec.finish()
    return drive


def parse_detection(data: dict | None) -> DetectionConfig:
    if data is None:
        return DetectionConfig()
    sec = _Section(data, "detection")
    pol = sec.take("pol_angle_rad", DetectionConfig.pol_angle_rad)
    pol = _number(pol, "detection.pol_angle_rad", allow_none=True)
    try:
        cfg = DetectionConfig(
            pol_angle_rad=pol,
            irf_fwhm_ps=_number(sec.take("irf_fwhm_ps", 0.0), "detection.irf_fwhm_ps"),
        )
    except ValueError as exc:
        raise ConfigError(f"detection: {exc}")
    sec.finish()
    return cfg


def parse_integrator(data: dict | None) -> IntegratorConfig:
    if data is None:
        return IntegratorConfig()
    sec = _Section(data, "integrator")
    try:
        cfg = IntegratorConfig(
            rel_tol=_number(sec.take("rel_tol", 1e-9), "integrator.rel_tol"),
            abs_tol=_number(sec.take("abs_tol", 1e-11), "integrator.abs_tol"),
            dt_out_ps=_number(sec.take("dt_out_ps", 2.0), "integrator.dt_out_ps"),
            max_step_ps=_number(sec.take("max_step_ps", None), "integrator.max_step_ps", allow_none=True),
        )
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}")
    sec.finish()
    return cfg


def parse_initial_state(value):
    if value == "ground":
        return ground_state()
    if value == "e1":
        return basis_state(1)
    if value == "e1e2_superposition":
        return pure_state([0.0, 1.0, 1.0])
    if isinstance(value, list):
        try:
            amps = [complex(re, im) for re, im in value]
        except (TypeError, ValueError):
            raise ConfigError("task.initial_state list must contain [re, im] pairs")
        if len(amps) != 3:
            raise ConfigError("task.initial_state needs 3 amplitude pairs")
        return pure_state(amps)
    raise ConfigError(
        "task.initial_state must be 'ground', 'e1', 'e1e2_superposition' or amplitudes"
    )


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    return cfg


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def write_trace_csv(path: Path, trace: IntensityTrace) -> None:
    lines = ["t_ps,intensity"]
    for t, v in zip(trace.times_ps, trace.values):
        lines.append(f"{_fmt(t)},{_fmt(v)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_trace_csv(path: str) -> IntensityTrace:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "t_ps,intensity":
                raise ConfigError(
                    f"{path}: expected header 't_ps,intensity', got '{header}'"
                )
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except FileNotFoundError:
        raise ConfigError(f"trace file not found: {path}")
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed CSV ({exc})")
    if data.shape[1] != 2 or data.shape[0] < 2:
        raise ConfigError(f"{path}: need two columns and at least two rows")
    dt = np.diff(data[:, 0])
    if not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-9):
        raise ConfigError(f"{path}: time grid is not uniform")
    return IntensityTrace(times_ps=data[:, 0], values=data[:, 1])


def write_spectrum_csv(path: Path, spectrum: Spectrum) -> None:
    lines = ["axis,value"]
    for a, v in zip(spectrum.axis, spectrum.values):
        lines.append(f"{_fmt(a)},{_fmt(v)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_summary_csv(path: Path, sweep) -> None:
    lines = ["param,value_GHz,stderr_GHz,converged"]
    for p, v, s, c in zip(sweep.parameter, sweep.value_ghz, sweep.stderr_ghz, sweep.converged):
        lines.append(f"{_fmt(p)},{_fmt(v)},{_fmt(s)},{str(bool(c)).lower()}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def fit_to_dict(fit: BeatFitResult) -> dict:
    return {
        "model": fit.model_kind.value,
        "converged": bool(fit.converged),
        "iterations": int(fit.iterations),
        "residual_rms": fit.residual_rms,
        "t1_ps": fit.t1_ps,
        "offset": fit.offset,
        "baseline": fit.baseline,
        "omega_rad_per_ps": fit.omega_rad_per_ps,
        "omega_GHz": fit.omega_ghz,
        "delta0_rad_per_ps": fit.delta0_rad_per_ps,
        "components": [
            {
                "role": role,
                "frequency_rad_per_ps": float(freq),
                "frequency_GHz": float(freq) * 1000.0 / (2.0 * math.pi),
                "amplitude": float(amp),
                "phase_rad": float(phase),
            }
            for role, freq, amp, phase in zip(
                fit.component_roles,
                fit.frequencies_rad_per_ps,
                fit.amplitudes,
                fit.phases_rad,
            )
        ],
        "covariance": None if fit.covariance is None else fit.covariance.tolist(),
        "param_names": list(fit.param_names),
        "residual_history": list(fit.residual_history),
        "window_ps": list(fit.window_ps),
        "warnings": list(fit.warnings),
    }


def _meta(config: dict, **extra) -> dict:
    return {
        "tool": "vbeat",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": config,
        **extra,
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    top = _Section(cfg, "config")
    model = parse_emitter(top.take("emitter"))
    drive = parse_drive(top.take("drive"))
    detection = parse_detection(top.take("detection", None))
    integrator = parse_integrator(top.take("integrator", None))
    task = _Section(top.take("task"), "task")
    if task.take("kind") != "simulate":
        raise ConfigError("task.kind must be 'simulate' for the simulate command")
    t_start = _number(task.take("t_start_ps", 0.0), "task.t_start_ps")
    t_end = _number(task.take("t_end_ps"), "task.t_end_ps")
    rho0 = parse_initial_state(task.take("initial_state", "ground"))
    noise_sigma = _number(task.take("noise_sigma", 0.0), "task.noise_sigma")
    task.finish()
    out = _Section(top.take("output", {"dir": ".", "stem": "trace"}), "output")
    cfg_dir = out.take("dir", ".")
    out_dir = Path(args.out_dir) if args.out_dir else Path(cfg_dir)
    stem = out.take("stem", "trace")
    out.finish()
    top.finish()

    traj = evolve(model, drive, rho0, (t_start, t_end), integrator)
    trace = detect(traj, detection)
    if noise_sigma > 0:
        rng = np.random.default_rng(args.seed)
        trace.values = trace.values + noise_sigma * float(np.max(np.abs(trace.values))) * rng.standard_normal(len(trace))

    csv_path = out_dir / f"{stem}.csv"
    write_trace_csv(csv_path, trace)
    write_json(
        out_dir / f"{stem}.meta.json",
        _meta(
            cfg,
            grid={
                "t_start_ps": t_start,
                "t_end_ps": t_end,
                "dt_out_ps": integrator.dt_out_ps,
                "n_samples": len(trace),
            },
            seed=args.seed if noise_sigma > 0 else None,
        ),
    )
    print(csv_path)
    return 0


def cmd_fit(args) -> int:
    trace = read_trace_csv(args.trace)
    if args.t_min_ps is not None or args.t_max_ps is not None:
        trace = trace.window(args.t_min_ps, args.t_max_ps)
    model_kind = FitModel(args.model)
    out_path = Path(args.out)

    status = 0
    try:
        if model_kind == FitModel.TRIPLE:
            if args.delta0_uev is None:
                print("error: delta0 required for triple fit", file=sys.stderr)
                return 2
            from .core import energy_to_angular

            fit = fit_triple_beat(trace, energy_to_angular(args.delta0_uev))
        else:
            fit = fit_fss_beat(trace)
        payload = fit_to_dict(fit)
        if not fit.converged:
            status = 4
    except (AmbiguousSeed, TraceTooShort, DegenerateOmega) as exc:
        payload = {
            "model": model_kind.value,
            "converged": False,
            "error": f"{type(exc).__name__}: {exc}",
        }
        status = 4
    write_json(out_path, payload)
    print(out_path)
    return status


def _sweep_outputs(out_dir: Path, sweep, cfg: dict) -> None:
    if sweep.traces is not None:
        for i, trace in enumerate(sweep.traces):
            if trace is not None:
                write_trace_csv(out_dir / f"param_{i}.csv", trace)
    for i, fit in enumerate(sweep.fits):
        if fit is not None:
            write_json(out_dir / f"fit_{i}.json", fit_to_dict(fit))
    write_summary_csv(out_dir / "summary.csv", sweep)
    write_json(
        out_dir / "summary.meta.json",
        _meta(cfg, kind=sweep.kind, errors=sweep.errors, sweep_meta={
            k: v for k, v in sweep.meta.items() if k != "knobs"
        }),
    )


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    top = _Section(cfg, "config")
    model = parse_emitter(top.take("emitter"))
    task = _Section(top.take("task"), "task")
    kind = task.take("kind")
    out = _Section(top.take("output", {"dir": "."}), "output")
    cfg_dir = out.take("dir", ".")
    out_dir = Path(args.out_dir) if args.out_dir else Path(cfg_dir)
    out.finish()

    if kind == "fss_sweep":
        values = task.take("fss_list_ueV")
        if not isinstance(values, list) or not values:
            raise ConfigError("task.fss_list_ueV must be a non-empty list")
        task.finish()
        top.finish()
        sweep = run_fss_beat_experiment(model, values, keep_traces=True)
    elif kind == "power_sweep":
        values = task.take("power_list")
        if not isinstance(values, list) or not values:
            raise ConfigError("task.power_list must be a non-empty list")
        rabi_unit = _number(
            task.take("rabi_at_unit_power_rad_per_ps", OMEGA_FIG4_RAD_PER_PS),
            "task.rabi_at_unit_power_rad_per_ps",
        )
        task.finish()
        top.finish()
        sweep = run_power_sweep(
            model, values, rabi_at_unit_power_rad_per_ps=rabi_unit, keep_traces=True
        )
    else:
        raise ConfigError("task.kind must be 'fss_sweep' or 'power_sweep'")

    _sweep_outputs(out_dir, sweep, cfg)
    print(out_dir / "summary.csv")
    n_conv = int(np.sum(sweep.converged))
    return 0 if n_conv >= 0.8 * len(sweep) else 4


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    top = _Section(cfg, "config")
    model = parse_emitter(top.take("emitter"))
    drive = parse_drive(top.take("drive"))
    task = _Section(top.take("task"), "task")
    kind = task.take("kind")
    out = _Section(top.take("output", {"dir": ".", "stem": "spectrum"}), "output")
    cfg_dir = out.take("dir", ".")
    out_dir = Path(args.out_dir) if args.out_dir else Path(cfg_dir)
    stem = out.take("stem", "spectrum")
    out.finish()

    if kind == "detuning_spectrum":
        lo = _number(task.take("min_ueV"), "task.min_ueV")
        hi = _number(task.take("max_ueV"), "task.max_ueV")
        n = int(task.take("n_points", 201))
        task.finish()
        top.finish()
        spec = detuning_spectrum(model, drive, (lo, hi), n)
    elif kind == "emission_spectrum":
        lo = _number(task.take("min_GHz"), "task.min_GHz")
        hi = _number(task.take("max_GHz"), "task.max_GHz")
        n = int(task.take("n_points", 801))
        pol = task.take("pol_angle_rad", DetectionConfig.pol_angle_rad)
        pol = _number(pol, "task.pol_angle_rad", allow_none=True)
        task.finish()
        top.finish()
        spec = emission_spectrum(model, drive, (lo, hi), n, pol_angle_rad=pol)
    else:
        raise ConfigError("task.kind must be 'detuning_spectrum' or 'emission_spectrum'")

    csv_path = out_dir / f"{stem}.csv"
    write_spectrum_csv(csv_path, spec)
    write_json(
        out_dir / f"{stem}.meta.json",
        _meta(cfg, axis_unit=spec.axis_unit, kind=spec.kind.value, spectrum_meta=spec.meta),
    )
    print(csv_path)
    return 0


def _reproduce_fig2(out_dir: Path) -> None:
    v = default_v_model()
    tls = default_tls_model()
    weak = DriveField(envelope=CW(), peak_rabi_rad_per_ps=1.5e-4, pol_angle_rad=math.pi / 4)
    spec_v = detuning_spectrum(v, weak, (-6.0, 19.0), 251)
    spec_tls = detuning_spectrum(tls, weak, (-6.0, 19.0), 251)
    write_spectrum_csv(out_dir / "spectrum_x0.csv", spec_v)
    write_spectrum_csv(out_dir / "spectrum_x1m.csv", spec_tls)

    fss_values = [13.0, 20.0, 30.0, 40.0]
    sweep = run_fss_beat_experiment(v, fss_values, keep_traces=True)
    for fss, trace, fit in zip(fss_values, sweep.traces, sweep.fits):
        tag = f"fss{int(fss)}"
        if trace is not None:
            write_trace_csv(out_dir / f"transient_{tag}.csv", trace)
        if fit is not None:
            write_json(out_dir / f"fit_{tag}.json", fit_to_dict(fit))
    write_summary_csv(out_dir / "beat_vs_fss.csv", sweep)


def _reproduce_fig3(out_dir: Path) -> None:
    v = default_v_model()
    tls = default_tls_model()
    powers = [0.5 * 2 ** (k / 2) for k in range(9)]
    show = {2: "p1", 6: "p4"}   # transients at unit and 4x power
    for model, tag in ((v, "v"), (tls, "tls")):
        sweep = run_power_sweep(model, powers, keep_traces=True)
        write_summary_csv(out_dir / f"omega_vs_power_{tag}.csv", sweep)
        for idx, label in show.items():
            if sweep.traces[idx] is not None:
                write_trace_csv(out_dir / f"transient_{tag}_{label}.csv", sweep.traces[idx])
            if sweep.fits[idx] is not None:
                write_json(out_dir / f"fit_{tag}_{label}.json", fit_to_dict(sweep.fits[idx]))


def _reproduce_fig4(out_dir: Path) -> None:
    v = default_v_model()
    traces = reproduce_fig4()
    for name, trace in traces.items():
        write_trace_csv(out_dir / f"trace_{name}.csv", trace)
    for name, trace in traces.items():
        window = trace.window(*trace.meta["fit_window_ps"])
        try:
            if name == "d":
                fit = fit_triple_beat(
                    window, v.fss_rad_per_ps, init={"omega_rad_per_ps": OMEGA_FIG4_RAD_PER_PS}
                )
            elif name in ("b", "c"):
                fit = fit_fss_beat(window)
            else:
                continue
            write_json(out_dir / f"fit_{name}.json", fit_to_dict(fit))
        except (AmbiguousSeed, TraceTooShort) as exc:
            write_json(out_dir / f"fit_{name}.json", {"converged": False, "error": str(exc)})


def cmd_reproduce_fig(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = {"fig2": _reproduce_fig2, "fig3": _reproduce_fig3, "fig4": _reproduce_fig4}[args.figure]
    runner(out_dir)
    write_json(out_dir / "meta.json", _meta({"figure": args.figure}))
    print(out_dir)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vbeat",
        description="Simulate and analyze time-resolved resonance fluorescence "
        "from driven two-level and V-type emitters.",
    )
    parser.add_argument("--version", action="version", version=f"vbeat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory and write the detected trace")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--seed", type=int, default=0, help="noise generator seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a stored trace CSV")
    p.add_argument("trace")
    p.add_argument("--model", choices=[m.value for m in FitModel], required=True)
    p.add_argument("--delta0-uev", type=float, default=None,
                   help="fine-structure splitting for the triple fit (ueV)")
    p.add_argument("--t-min-ps", type=float, default=None)
    p.add_argument("--t-max-ps", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="run a splitting or power sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="compute a detuning scan or emission spectrum")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("reproduce-fig", help="run a canonical figure pipeline")
    p.add_argument("figure", choices=["fig2", "fig3", "fig4"])
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_reproduce_fig)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StepFailure, DegenerateSteadyState, NonDiagonalizableGenerator) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
