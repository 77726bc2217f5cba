"""Report output: delimited tables, run summaries and rendered figures.

Every command writes its results as a comma-separated table (RFC 4180
body, '.' decimal separator, comment header lines prefixed with '#')
plus a PNG rendering of the same data, and a JSON run summary. The
header carries the package version, the fully resolved configuration
and the grid resolution, but never wall-clock information: repeated
runs with the same inputs must produce byte-identical files, so timing
goes to stderr instead.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import __version__  # noqa: E402
from .config import RunConfig  # noqa: E402


def format_number(value: Any) -> str:
    """Locale-independent numeric formatting with a '.' decimal point."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


class ReportWriter:
    """Writes the output files of one command invocation.

    All files land in the configured output directory. Tables are CSV
    with a commented metadata header; figures are PNG; the run summary
    is JSON. Content depends only on inputs, never on time or host.
    """

    def __init__(self, config: RunConfig, command: str):
        self.config = config
        self.command = command
        self.out_dir = Path(config.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def metadata_lines(self) -> list[str]:
        lines = [f"# spatialqkd {__version__}",
                 f"# command = {self.command}"]
        for key, value in self.config.describe().items():
            lines.append(f"# {key} = {format_number(value)}")
        return lines

    def write_table(self, name: str, columns: Mapping[str, Sequence]) -> Path:
        """Write named columns as a CSV table with a metadata header."""
        lengths = {len(v) for v in columns.values()}
        if len(lengths) > 1:
            raise ValueError("table columns differ in length")
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(columns.keys())
        for row in zip(*columns.values()):
            writer.writerow([format_number(v) for v in row])
        path = self.out_dir / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            for line in self.metadata_lines():
                fh.write(line + "\r\n")
            fh.write(buffer.getvalue())
        self.written.append(path)
        return path

    def write_summary(self, payload: Mapping[str, Any]) -> Path:
        """Write the JSON run summary with the resolved configuration."""
        document = {
            "version": __version__,
            "command": self.command,
            "config": {k: v for k, v in self.config.describe().items()},
            "results": dict(payload),
        }
        path = self.out_dir / "summary.json"
        with open(path, "w") as fh:
            json.dump(document, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        self.written.append(path)
        return path

    def save_figure(self, fig, name: str) -> Path:
        path = self.out_dir / f"{name}.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        self.written.append(path)
        return path

    def plot_curves(self, name: str, x: Sequence, curves: Mapping[str, Sequence],
                    xlabel: str, ylabel: str, title: str,
                    hline: float | None = None,
                    vline: float | None = None,
                    logy: bool = False) -> Path:
        """Render one or more curves over a common abscissa to PNG."""
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for label, y in curves.items():
            ax.plot(x, y, marker="o", markersize=3, linewidth=1.2, label=label)
        if hline is not None:
            ax.axhline(hline, color="gray", linestyle="--", linewidth=0.9)
        if vline is not None:
            ax.axvline(vline, color="gray", linestyle=":", linewidth=0.9)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        if len(curves) > 1:
            ax.legend(frameon=False)
        ax.grid(True, alpha=0.3)
        return self.save_figure(fig, name)

    def plot_histogram_pair(self, name: str, centers: Sequence,
                            empirical: Sequence, analytic: Sequence,
                            xlabel: str, title: str) -> Path:
        """Render an empirical histogram against its analytic prediction."""
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        width = centers[1] - centers[0] if len(centers) > 1 else 1.0
        ax.bar(centers, empirical, width=0.9 * width, alpha=0.55,
               label="simulated")
        ax.plot(centers, analytic, color="crimson", linewidth=1.4,
                label="analytic")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("probability")
        ax.set_title(title)
        ax.legend(frameon=False)
        ax.grid(True, alpha=0.3)
        return self.save_figure(fig, name)

    def plot_spectrum(self, name: str, values: Sequence, ylabel: str,
                      title: str) -> Path:
        """Render a discrete spectrum (Schmidt coefficients and the like)."""
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        idx = range(1, len(values) + 1)
        ax.stem(idx, values)
        ax.set_xlabel("mode index")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        return self.save_figure(fig, name)
