"""Figure rendering for barenco sweep CSVs."""

from .render import EmptyDataError, FigureJob, SchemaError, build_figure, render

__version__ = "0.1.0"

__all__ = ["EmptyDataError", "FigureJob", "SchemaError", "build_figure", "render"]
