"""Per-iteration change statistics, written as CSV plus a matplotlib figure."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .imaging import FrameBuffer

COLUMNS = ("frame", "iteration", "mean_abs_change")


def iteration_changes(stack: list[FrameBuffer]) -> list[float]:
    """Mean absolute color change |I_n - I_{n-1}| for n = 1..k."""
    return [float(np.mean(np.abs(b.color - a.color))) for a, b in zip(stack[:-1], stack[1:])]


def write_csv(path, rows) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(COLUMNS)
        for frame, it, val in rows:
            w.writerow([frame, it, f"{val:.8f}"])


def render_figure(path, rows, stack: list[FrameBuffer] | None = None, title: str = "") -> None:
    """Change-per-iteration curves, with the first frame's iterations as a strip below."""
    ncols = len(stack) if stack else 1
    fig = Figure(figsize=(max(6.0, 1.4 * ncols), 5.0 if stack else 3.2), dpi=100)
    if stack:
        grid = fig.add_gridspec(2, ncols, height_ratios=[2.0, 1.0])
        ax = fig.add_subplot(grid[0, :])
    else:
        ax = fig.add_subplot(1, 1, 1)
    frames = sorted({r[0] for r in rows})
    for f in frames:
        its = [r[1] for r in rows if r[0] == f]
        vals = [r[2] for r in rows if r[0] == f]
        ax.plot(its, vals, marker="o", lw=1.2, label=f"frame {f}")
    ax.set_xlabel("iteration n")
    ax.set_ylabel(r"mean $|I_n - I_{n-1}|$")
    ax.grid(alpha=0.3)
    if len(frames) <= 8:
        ax.legend(fontsize=8, frameon=False)
    if title:
        ax.set_title(title, fontsize=10)
    if stack:
        for n, fb in enumerate(stack):
            a = fig.add_subplot(grid[1, n])
            a.imshow(fb.color, interpolation="nearest")
            a.set_axis_off()
            a.set_title(f"I{n}", fontsize=8)
    fig.tight_layout()
    fig.savefig(Path(path))


def write_report(out_dir, rows, stack=None, title: str = "") -> tuple[Path, Path]:
    out = Path(out_dir)
    csv_path = out / "report.csv"
    fig_path = out / "report.png"
    write_csv(csv_path, rows)
    render_figure(fig_path, rows, stack, title)
    return csv_path, fig_path
