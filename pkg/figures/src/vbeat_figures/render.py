"""Multi-panel figure assembly from trace/spectrum/summary CSVs + fit JSON."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import read_fit, read_spectrum, read_summary, read_trace
from .model import evaluate_fit

plt.rcParams["svg.hashsalt"] = "vbeat-figures"
plt.rcParams["svg.fonttype"] = "none"

DPI = 150


class MissingInput(FileNotFoundError):
    pass


@dataclass(frozen=True)
class PanelSpec:
    title: str
    kind: str                       # "trace" | "spectrum" | "summary"
    source: Path
    fit: Path | None = None
    xlabel: str = "t (ps)"
    ylabel: str = "intensity"
    residual_strip: bool = False


@dataclass(frozen=True)
class FigureSpec:
    name: str
    nrows: int
    ncols: int
    panels: tuple[PanelSpec, ...]
    out_stem: str


def _check_inputs(spec: FigureSpec) -> None:
    for panel in spec.panels:
        for path in (panel.source, panel.fit):
            if path is not None and not Path(path).exists():
                raise MissingInput(str(path))


def _draw_trace(ax, panel: PanelSpec, res_ax=None):
    t, y = read_trace(panel.source)
    ax.plot(t, y, lw=0.8, color="0.25", label="simulated")
    overlay = None
    if panel.fit is not None:
        fit = read_fit(panel.fit)
        if not fit.get("error"):
            overlay = fit["model"]
            lo, hi = fit.get("window_ps", (t[0], t[-1]))
            mask = (t >= lo) & (t <= hi)
            model = evaluate_fit(fit, t[mask])
            ax.plot(t[mask], model, lw=1.2, color="crimson", label=f"{overlay} fit")
            if res_ax is not None:
                res_ax.plot(t[mask], y[mask] - model, lw=0.6, color="crimson")
                res_ax.axhline(0.0, lw=0.5, color="0.6")
                res_ax.set_ylabel("resid.", fontsize=7)
                res_ax.tick_params(labelsize=7)
    ax.legend(fontsize=7, loc="upper right")
    return overlay


def _draw_spectrum(ax, panel: PanelSpec):
    x, v = read_spectrum(panel.source)
    ax.plot(x, v, lw=1.0, color="0.2")
    ax.fill_between(x, v, alpha=0.15, color="steelblue")
    return None


def _draw_summary(ax, panel: PanelSpec):
    data = read_summary(panel.source)
    x = np.sqrt(data["param"])
    ax.errorbar(x, data["value_GHz"], yerr=data["stderr_GHz"], fmt="o", ms=4,
                color="0.2", ecolor="0.6", capsize=2)
    coef = np.polyfit(x, data["value_GHz"], 1)
    grid = np.linspace(x.min(), x.max(), 50)
    ax.plot(grid, np.polyval(coef, grid), lw=1.0, color="crimson",
            label=f"slope {coef[0]:.3f} GHz")
    ax.legend(fontsize=7)
    return None


def render(spec: FigureSpec, out_dir) -> dict:
    """Draw every panel and write <out_stem>.png and .svg.

    Pure read-only with respect to the inputs; the returned report lists the
    layout, each panel's overlay model (if any) and the written files."""
    _check_inputs(spec)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    fig = plt.figure(figsize=(4.0 * spec.ncols, 2.8 * spec.nrows), dpi=DPI)
    outer = fig.add_gridspec(spec.nrows, spec.ncols, hspace=0.55, wspace=0.3)

    report_panels = []
    for idx, panel in enumerate(spec.panels):
        cell = outer[idx // spec.ncols, idx % spec.ncols]
        res_ax = None
        if panel.kind == "trace" and panel.residual_strip:
            inner = cell.subgridspec(2, 1, height_ratios=(3, 1), hspace=0.08)
            ax = fig.add_subplot(inner[0])
            res_ax = fig.add_subplot(inner[1], sharex=ax)
            ax.tick_params(labelbottom=False)
            res_ax.set_xlabel(panel.xlabel, fontsize=8)
        else:
            ax = fig.add_subplot(cell)
            ax.set_xlabel(panel.xlabel, fontsize=8)

        if panel.kind == "trace":
            overlay = _draw_trace(ax, panel, res_ax)
        elif panel.kind == "spectrum":
            overlay = _draw_spectrum(ax, panel)
        elif panel.kind == "summary":
            overlay = _draw_summary(ax, panel)
        else:
            raise ValueError(f"unknown panel kind '{panel.kind}'")
        ax.set_title(panel.title, fontsize=9)
        ax.set_ylabel(panel.ylabel, fontsize=8)
        ax.tick_params(labelsize=7)
        report_panels.append({
            "title": panel.title,
            "kind": panel.kind,
            "source": str(panel.source),
            "overlay_model": overlay,
        })

    png = out_dir / f"{spec.out_stem}.png"
    svg = out_dir / f"{spec.out_stem}.svg"
    fig.savefig(png)
    fig.savefig(svg, metadata={"Date": None})
    plt.close(fig)
    return {
        "figure": spec.name,
        "layout": (spec.nrows, spec.ncols),
        "panels": report_panels,
        "outputs": [str(png), str(svg)],
    }


# ---------------------------------------------------------------------------
# canonical specs over the reproduce-fig output layout
# ---------------------------------------------------------------------------

def build_fig2_spec(data_dir) -> FigureSpec:
    """CW detuning scans plus the four splitting-beat transients."""
    d = Path(data_dir)
    panels = [
        PanelSpec(title="split doublet, CW scan", kind="spectrum",
                  source=d / "spectrum_x0.csv", xlabel="detuning (ueV)",
                  ylabel="excited population"),
        PanelSpec(title="two-level, CW scan", kind="spectrum",
                  source=d / "spectrum_x1m.csv", xlabel="detuning (ueV)",
                  ylabel="excited population"),
    ]
    for fss in (13, 20, 30, 40):
        panels.append(PanelSpec(
            title=f"beat transient, {fss} ueV", kind="trace",
            source=d / f"transient_fss{fss}.csv", fit=d / f"fit_fss{fss}.json",
            residual_strip=True,
        ))
    return FigureSpec(name="fig2", nrows=3, ncols=2, panels=tuple(panels),
                      out_stem="fig2")


def build_fig3_spec(data_dir) -> FigureSpec:
    """Driven transients and the rate-versus-sqrt(power) summaries."""
    d = Path(data_dir)
    panels = [
        PanelSpec(title="split doublet, unit power", kind="trace",
                  source=d / "transient_v_p1.csv", fit=d / "fit_v_p1.json"),
        PanelSpec(title="split doublet, 4x power", kind="trace",
                  source=d / "transient_v_p4.csv", fit=d / "fit_v_p4.json"),
        PanelSpec(title="two-level, unit power", kind="trace",
                  source=d / "transient_tls_p1.csv", fit=d / "fit_tls_p1.json"),
        PanelSpec(title="two-level, 4x power", kind="trace",
                  source=d / "transient_tls_p4.csv", fit=d / "fit_tls_p4.json"),
        PanelSpec(title="split doublet: rate vs sqrt(P)", kind="summary",
                  source=d / "omega_vs_power_v.csv", xlabel="sqrt(power)",
                  ylabel="fitted rate (GHz)"),
        PanelSpec(title="two-level: rate vs sqrt(P)", kind="summary",
                  source=d / "omega_vs_power_tls.csv", xlabel="sqrt(power)",
                  ylabel="fitted rate (GHz)"),
    ]
    return FigureSpec(name="fig3", nrows=3, ncols=2, panels=tuple(panels),
                      out_stem="fig3")


def build_fig4_spec(data_dir) -> FigureSpec:
    """The canonical 2x2 transient quartet with fit overlays."""
    d = Path(data_dir)
    panels = (
        PanelSpec(title="(a) pi pulse, two-level", kind="trace",
                  source=d / "trace_a.csv"),
        PanelSpec(title="(b) pi pulse, split doublet", kind="trace",
                  source=d / "trace_b.csv", fit=d / "fit_b.json"),
        PanelSpec(title="(c) 2-ns drive, two-level", kind="trace",
                  source=d / "trace_c.csv", fit=d / "fit_c.json"),
        PanelSpec(title="(d) 2-ns drive, split doublet", kind="trace",
                  source=d / "trace_d.csv", fit=d / "fit_d.json"),
    )
    return FigureSpec(name="fig4", nrows=2, ncols=2, panels=panels,
                      out_stem="fig4")


BUILDERS = {"fig2": build_fig2_spec, "fig3": build_fig3_spec, "fig4": build_fig4_spec}
