"""Render the optimizer CLI's CSV outputs into figures and tables.

Consumes only the documented file formats (no imports from the optimizer
package): per-cell trace CSVs, summary.csv, and timing.csv.  Three figure
kinds exist: per-cell convergence curves, the runtime-vs-dimension scaling
figure, and a markdown results table that bolds the best value per row.
Metrics are never recomputed here; the CSVs are the single source of truth.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

TRACE_COLUMNS = ("iter", "evals", "h", "archive_size", "sp", "igd", "elapsed_ms")
SUMMARY_COLUMNS = (
    "problem",
    "dimension",
    "algorithm",
    "runs",
    "final_igd_median",
    "final_igd_mean",
    "final_sp_median",
    "final_sp_mean",
    "wall_ms_mean",
    "errors",
)
TIMING_COLUMNS = ("dimension", "algorithm", "wall_ms_mean", "eval_ms_mean", "overhead_ms_mean")

KINDS = ("convergence", "scaling", "table")


class SchemaError(ValueError):
    """A CSV input does not match the documented trace/summary/timing schema."""


@dataclass(frozen=True)
class PlotSpec:
    input_dir: str
    kind: str
    output_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


def read_rows(path: Path, expected: Sequence[str]) -> list[dict[str, str]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    for column in expected:
        if column not in header:
            raise SchemaError(f"{path}: missing column {column!r}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise SchemaError(f"{path}: row {i} has {len(parts)} fields, expected {len(header)}")
        rows.append(dict(zip(header, parts)))
    return rows


def load_trace_series(path: Path) -> dict[str, np.ndarray]:
    """Numeric columns of one trace file, keyed by column name."""
    rows = read_rows(path, TRACE_COLUMNS)
    series = {
        column: np.array([float(row[column]) for row in rows]) for column in TRACE_COLUMNS
    }
    return series


def render_convergence(input_dir: Path, output_dir: Path) -> list[Path]:
    traces = sorted(input_dir.glob("trace_*.csv"))
    if not traces:
        raise SchemaError(f"{input_dir}: no trace_*.csv files found")
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for path in traces:
        series = load_trace_series(path)
        evals = series["evals"]
        fig, ax = plt.subplots(figsize=(6, 4))
        for metric, style in (("igd", "-"), ("sp", "--")):
            values = series[metric]
            mask = np.isfinite(values)
            if mask.any():
                ax.plot(evals[mask], values[mask], style, label=metric)
        ax.set_xlabel("evaluations")
        ax.set_ylabel("indicator value")
        ax.set_yscale("log")
        ax.set_title(path.stem[len("trace_"):])
        ax.legend()
        out = output_dir / f"{path.stem}.png"
        fig.savefig(out, dpi=120)
        plt.close(fig)
        written.append(out)
    return written


def render_scaling(input_dir: Path, output_path: Path) -> Path:
    timing = input_dir / "timing.csv"
    if not timing.exists():
        raise SchemaError(f"{input_dir}: missing timing.csv")
    rows = read_rows(timing, TIMING_COLUMNS)
    if not rows:
        raise SchemaError(f"{timing}: no data rows")
    by_algorithm: dict[str, list[tuple[int, float]]] = {}
    for row in rows:
        by_algorithm.setdefault(row["algorithm"], []).append(
            (int(row["dimension"]), float(row["wall_ms_mean"]))
        )
    fig, ax = plt.subplots(figsize=(6, 4))
    for algorithm in sorted(by_algorithm):
        points = sorted(by_algorithm[algorithm])
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=algorithm)
    ax.set_xlabel("decision variables")
    ax.set_ylabel("mean wall time per run (ms)")
    ax.legend()
    output_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output_path, dpi=120)
    plt.close(fig)
    return output_path


def _metric_table(rows: list[dict[str, str]], column: str, title: str) -> list[str]:
    algorithms = sorted({row["algorithm"] for row in rows})
    cells: dict[tuple[str, str], dict[str, float]] = {}
    for row in rows:
        key = (row["problem"], row["dimension"])
        cells.setdefault(key, {})[row["algorithm"]] = float(row[column])
    lines = [f"## {title}", ""]
    lines.append("| problem | dim | " + " | ".join(algorithms) + " |")
    lines.append("|---" * (2 + len(algorithms)) + "|")
    for problem, dim in sorted(cells, key=lambda k: (k[0], int(k[1]))):
        values = cells[(problem, dim)]
        finite = {a: v for a, v in values.items() if math.isfinite(v)}
        best = min(finite.values()) if finite else math.nan
        rendered = []
        for algorithm in algorithms:
            if algorithm not in values:
                rendered.append("-")
                continue
            value = values[algorithm]
            text = f"{value:.4g}"
            rendered.append(f"**{text}**" if math.isfinite(value) and value == best else text)
        lines.append(f"| {problem} | {dim} | " + " | ".join(rendered) + " |")
    lines.append("")
    return lines


def render_table(input_dir: Path, output_path: Path) -> Path:
    summary = input_dir / "summary.csv"
    if not summary.exists():
        raise SchemaError(f"{input_dir}: missing summary.csv")
    rows = read_rows(summary, SUMMARY_COLUMNS)
    if not rows:
        raise SchemaError(f"{summary}: no data rows")
    lines = ["# Results", ""]
    lines += _metric_table(rows, "final_igd_mean", "Mean final IGD (lower is better)")
    lines += _metric_table(rows, "final_sp_mean", "Mean final SP (lower is better)")
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text("\n".join(lines), encoding="utf-8")
    return output_path


def render(spec: PlotSpec):
    """Dispatch on figure kind; returns the written path(s)."""
    input_dir = Path(spec.input_dir)
    if spec.kind == "convergence":
        return render_convergence(input_dir, Path(spec.output_path))
    if spec.kind == "scaling":
        return render_scaling(input_dir, Path(spec.output_path))
    return render_table(input_dir, Path(spec.output_path))


def _main(kind: str, default_out: str, argv: Sequence[str] | None) -> int:
    parser = argparse.ArgumentParser(description=f"render the {kind} output")
    parser.add_argument("input_dir", help="directory holding the experiment CSV files")
    parser.add_argument("--out", default=None, help=f"output path (default: {default_out})")
    args = parser.parse_args(argv)
    out = args.out or str(Path(args.input_dir) / default_out)
    try:
        written = render(PlotSpec(input_dir=args.input_dir, kind=kind, output_path=out))
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if isinstance(written, list):
        for path in written:
            print(path)
    else:
        print(written)
    return 0


def plot_convergence_main(argv: Sequence[str] | None = None) -> int:
    return _main("convergence", "plots", argv)


def plot_scaling_main(argv: Sequence[str] | None = None) -> int:
    return _main("scaling", "scaling.png", argv)


def make_table_main(argv: Sequence[str] | None = None) -> int:
    return _main("table", "table.md", argv)
