"""Render vbeat CSV/JSON outputs into multi-panel figures.

This package only reads the file formats the simulator CLI emits (trace,
spectrum and summary CSVs plus fit JSON); it never imports the simulator.
"""

__version__ = "0.1.0"

from .io import read_fit, read_spectrum, read_summary, read_trace  # noqa: F401
from .model import evaluate_fit  # noqa: F401
from .render import (  # noqa: F401
    FigureSpec,
    PanelSpec,
    MissingInput,
    build_fig2_spec,
    build_fig3_spec,
    build_fig4_spec,
    render,
)
