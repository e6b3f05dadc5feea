"""Render objective-vs-wall-clock figures from solver trace CSVs.

Consumes the trace schema `iter,elapsed_s,best_obj,norm_sq,gap,set_size`
verbatim and emits static PNG/SVG figures: one curve per trace, an optional
dashed reference line, an optional dotted completion-time marker, and a zoom
inset over the opening fraction of the run.  Rendering is a pure function of
the input files: fixed styles, no timestamps.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = ("iter", "elapsed_s", "best_obj", "norm_sq", "gap", "set_size")

# fixed visual identity so repeated renders are byte-identical
_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linewidth": 0.6,
    "lines.linewidth": 1.6,
    "legend.framealpha": 0.9,
    "svg.hashsalt": "plotkit",
}

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class SchemaError(ValueError):
    """Trace file does not match the documented CSV schema."""


@dataclass
class Trace:
    label: str
    elapsed: np.ndarray
    best_obj: np.ndarray


@dataclass
class PlotSpec:
    """One figure: curves, optional reference/marker, zoom inset."""

    traces: list[tuple[str, str]]          # (csv path, legend label)
    out_path: str
    reference: float | None = None         # dashed horizontal line
    reference_label: str = "reference"
    marker_time: float | None = None       # dotted vertical line
    marker_label: str = "flow done"
    zoom_fraction: float = 0.2
    log_time: bool = True
    log_value: bool = False
    inset: bool = True
    title: str | None = None
    ylabel: str = "best objective"

    def __post_init__(self):
        if not self.traces:
            raise ValueError("a plot needs at least one trace")
        if not 0.0 < self.zoom_fraction <= 1.0:
            raise ValueError("zoom fraction must lie in (0, 1]")


def load_trace(path, label: str) -> Trace:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty trace file")
        for col in EXPECTED_COLUMNS:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r}")
        for col in header:
            if col not in EXPECTED_COLUMNS:
                raise SchemaError(f"{path}: unexpected column {col!r}")
        i_elapsed = header.index("elapsed_s")
        i_best = header.index("best_obj")
        elapsed, best = [], []
        for row in reader:
            if not row or row[i_best] == "":
                continue
            elapsed.append(float(row[i_elapsed]))
            best.append(float(row[i_best]))
    if not elapsed:
        raise SchemaError(f"{path}: no plottable rows (best_obj always empty)")
    return Trace(label, np.asarray(elapsed), np.asarray(best))


def _draw(ax, traces: list[Trace], spec: PlotSpec, clip: float | None):
    for i, tr in enumerate(traces):
        sel = slice(None) if clip is None else tr.elapsed <= clip
        ax.plot(tr.elapsed[sel], tr.best_obj[sel], color=_COLORS[i % len(_COLORS)],
                label=tr.label, drawstyle="steps-post")
    if spec.reference is not None:
        ax.axhline(spec.reference, color="black", linestyle="--", linewidth=1.1,
                   label=spec.reference_label)
    if spec.marker_time is not None and (clip is None or spec.marker_time <= clip):
        ax.axvline(spec.marker_time, color="gray", linestyle=":", linewidth=1.3,
                   label=spec.marker_label)


def render(spec: PlotSpec) -> str:
    """Draw the figure described by ``spec`` and write it to ``spec.out_path``."""
    traces = [load_trace(path, label) for path, label in spec.traces]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        _draw(ax, traces, spec, clip=None)
        if spec.log_time:
            ax.set_xscale("log")
        if spec.log_value:
            ax.set_yscale("log")
        ax.set_xlabel("elapsed seconds")
        ax.set_ylabel(spec.ylabel)
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(loc="lower right")
        if spec.inset and spec.zoom_fraction < 1.0:
            horizon = spec.zoom_fraction * max(tr.elapsed.max() for tr in traces)
            if horizon > 0:
                sub = ax.inset_axes([0.08, 0.56, 0.38, 0.38])
                _draw(sub, traces, spec, clip=horizon)
                sub.set_title(f"first {spec.zoom_fraction:.0%}", fontsize=7)
                sub.tick_params(labelsize=6)
        out = Path(spec.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"Date": None} if out.suffix == ".svg" else {}
        fig.savefig(out, metadata=metadata)
        plt.close(fig)
    return str(out)


def spec_from_json(path) -> PlotSpec:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    base = Path(path).parent
    traces = [(str(base / t["path"]), t["label"]) for t in payload["traces"]]
    return PlotSpec(
        traces=traces,
        out_path=str(base / payload["out"]),
        reference=payload.get("reference"),
        reference_label=payload.get("reference_label", "reference"),
        marker_time=payload.get("marker_time"),
        marker_label=payload.get("marker_label", "flow done"),
        zoom_fraction=payload.get("zoom_fraction", 0.2),
        log_time=payload.get("log_time", True),
        log_value=payload.get("log_value", False),
        inset=payload.get("inset", True),
        title=payload.get("title"),
        ylabel=payload.get("ylabel", "best objective"),
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__)
    parser.add_argument("spec", help="JSON plot description")
    args = parser.parse_args(argv)
    try:
        out = render(spec_from_json(args.spec))
    except (SchemaError, ValueError, OSError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
