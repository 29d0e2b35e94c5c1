"""Build figure panels from delay-scan CSV files.

The input format is the scatdelay CLI convention: `#`-prefixed header lines
(`# key: value`), one column-name row, then numeric rows where unusable
points are spelled `nan`. This module does no physics; it only plots what
the CSV contains, and NaN cells become visible gaps in the curves.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
from matplotlib.figure import Figure


class MissingColumnError(ValueError):
    """A required column is absent from the CSV header."""


@dataclass(frozen=True)
class PanelSpec:
    """What to read, what to draw, and where to write the image."""

    csv_path: str
    out_path: str
    x_column: str = "theta_rad"
    curve_columns: tuple = ("t_delay_k", "b_over_R")
    reference_columns: tuple = ("t_class_k", "b_class_over_R")
    cross_section_column: str | None = "dsdo_over_R2"
    x_label: str = "scattering angle theta [rad]"
    y_label: str = "k t / m  and  b / R"
    cross_section_log: bool = True


def read_profile(csv_path: str):
    """Parse a CLI CSV into (metadata dict, column -> float array dict)."""
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()

    meta = {}
    body_lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            stripped = line.lstrip("#").strip()
            key, sep, value = stripped.partition(":")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        if line.strip():
            body_lines.append(line)

    if not body_lines:
        raise ValueError(f"{csv_path}: no column row found")

    reader = csv.reader(io.StringIO("\n".join(body_lines)))
    rows = list(reader)
    columns = [name.strip() for name in rows[0]]
    data_rows = rows[1:]
    if not data_rows:
        raise ValueError(f"{csv_path}: columns but no data rows")

    values = np.full((len(data_rows), len(columns)), np.nan)
    for i, row in enumerate(data_rows):
        if len(row) != len(columns):
            raise ValueError(
                f"{csv_path}: row {i + 1} has {len(row)} cells, expected {len(columns)}"
            )
        values[i] = [float(cell) for cell in row]

    table = {name: values[:, j] for j, name in enumerate(columns)}
    return meta, table


def _require(table: dict, names) -> None:
    missing = [name for name in names if name not in table]
    if missing:
        raise MissingColumnError(
            "missing columns: " + ", ".join(missing)
            + " (have: " + ", ".join(table) + ")"
        )


def panel_figure(spec: PanelSpec) -> Figure:
    """Build the panel as a Figure without touching the filesystem.

    A pure function of the CSV contents: the same file always yields the
    same curves, labels, and axes.
    """
    meta, table = read_profile(spec.csv_path)

    needed = [spec.x_column, *spec.curve_columns, *spec.reference_columns]
    if spec.cross_section_column is not None:
        needed.append(spec.cross_section_column)
    _require(table, needed)

    x = table[spec.x_column]
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.subplots()

    colors = ["C0", "C3", "C2", "C4"]
    for i, name in enumerate(spec.curve_columns):
        ax.plot(x, table[name], ls="-", color=colors[i % len(colors)], label=name)
    for i, name in enumerate(spec.reference_columns):
        ax.plot(x, table[name], ls="--", color=colors[i % len(colors)], alpha=0.6,
                label=name)

    if spec.cross_section_column is not None:
        twin = ax.twinx()
        twin.plot(x, table[spec.cross_section_column], ls=":", color="gray",
                  label=spec.cross_section_column)
        if spec.cross_section_log:
            twin.set_yscale("log")
        twin.set_ylabel(spec.cross_section_column, color="gray")

    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    params = meta.get("parameters", "")
    title = params if params else meta.get("command", "")
    if title:
        ax.set_title(title, fontsize=10)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    return fig


def render_panel(spec: PanelSpec) -> str:
    """Render the panel to spec.out_path and return that path."""
    fig = panel_figure(spec)
    fig.savefig(spec.out_path, dpi=150)
    return spec.out_path
