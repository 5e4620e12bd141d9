"""Figure renderers for the affinebench CSV outputs."""

__version__ = "0.1.0"

from .figures import (
    KINDS,
    FigureSpec,
    build_auc_grid,
    build_auc_scatter,
    build_convergence,
    build_ert_scatter,
    build_heatmap,
    build_landscape,
    build_rankgrid,
    render,
)
from .schema import SCHEMAS, LandscapeData, SchemaError, load_landscape, load_table

__all__ = [
    "KINDS",
    "SCHEMAS",
    "FigureSpec",
    "LandscapeData",
    "SchemaError",
    "build_auc_grid",
    "build_auc_scatter",
    "build_convergence",
    "build_ert_scatter",
    "build_heatmap",
    "build_landscape",
    "build_rankgrid",
    "load_landscape",
    "load_table",
    "render",
    "__version__",
]
