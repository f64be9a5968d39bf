"""logcurves: turn raw log collections into Time Curve visualizations."""

__version__ = "0.1.0"

from .curvedoc import CurveDocument, deserialize, render_svg, serialize
from .pipeline import PipelineConfig, SeriesSpec, run_pipeline

__all__ = [
    "CurveDocument",
    "PipelineConfig",
    "SeriesSpec",
    "deserialize",
    "render_svg",
    "run_pipeline",
    "serialize",
    "__version__",
]
