"""Figure assembly from harness CSV files."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

CSV_HEADER = ["t", "estimate", "sq_error", "stderr", "n_paths"]

# preferred drawing order and styles for the standard bundle file names
KNOWN_STYLES = {
    "pdmp": {"color": "tab:blue", "label": "PDMP squared error"},
    "langevin": {"color": "tab:green", "label": "Langevin squared error"},
    "bound": {"color": "tab:red", "label": "theoretical bound"},
}


class InputError(ValueError):
    """Malformed or inconsistent input CSVs."""


@dataclass(frozen=True)
class Series:
    name: str
    times: np.ndarray
    sq_errors: np.ndarray


@dataclass(frozen=True)
class PlotSpec:
    inputs: Sequence[Path]
    output: Path
    labels: Sequence[str] = ()
    log_y: bool = True
    title: str = "Squared error of time-t estimates"


def read_series(path) -> Series:
    """Load one error-curve CSV, insisting on the documented header."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise InputError(f"{path.name}: expected header "
                         f"{','.join(CSV_HEADER)!r}, got "
                         f"{','.join(rows[0]) if rows else '<empty>'!r}")
    if len(rows) < 2:
        raise InputError(f"{path.name}: no data rows")
    try:
        body = np.array([[float(c) for c in r[:4]] for r in rows[1:]])
    except ValueError as exc:
        raise InputError(f"{path.name}: non-numeric cell ({exc})") from exc
    return Series(name=path.stem, times=body[:, 0], sq_errors=body[:, 2])


def discover_inputs(in_dir) -> list:
    """CSV files of a bundle directory, standard names first."""
    in_dir = Path(in_dir)
    if not in_dir.is_dir():
        raise InputError(f"input directory {in_dir} does not exist")
    found = sorted(in_dir.glob("*.csv"))
    if not found:
        raise InputError(f"no CSV files in {in_dir}")
    order = {name: i for i, name in enumerate(KNOWN_STYLES)}
    return sorted(found, key=lambda p: (order.get(p.stem, len(order)), p.stem))


def plot_error_bundle(spec: PlotSpec) -> Path:
    """Render all series of the spec into one figure.

    Validates every input before any drawing, so a malformed file never
    leaves a partial image behind.  All series must share the t column.
    """
    series = [read_series(p) for p in spec.inputs]
    if not series:
        raise InputError("no input series")
    base = series[0]
    for s in series[1:]:
        if s.times.shape != base.times.shape \
                or not np.array_equal(s.times, base.times):
            raise InputError(f"time grid of {s.name} does not match "
                             f"{base.name}")

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    labels = list(spec.labels)
    for i, s in enumerate(series):
        style = KNOWN_STYLES.get(s.name, {})
        label = labels[i] if i < len(labels) else style.get("label", s.name)
        y = s.sq_errors
        if spec.log_y:
            # log axes drop nonpositive points; keep the curve connected
            y = np.where(y > 0.0, y, np.nan)
        ax.plot(s.times, y, label=label, color=style.get("color"))
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("squared error")
    ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
