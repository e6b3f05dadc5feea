"""plotkit: static objective-vs-time figures from solver trace CSVs."""

from .render import PlotSpec, SchemaError, Trace, load_trace, render, spec_from_json

__version__ = "0.1.0"
