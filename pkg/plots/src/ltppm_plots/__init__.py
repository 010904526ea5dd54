"""Offline figure and table rendering for optimizer CSV outputs."""

from .render import PlotSpec, SchemaError, render

__all__ = ["PlotSpec", "SchemaError", "render"]
