#!/usr/bin/env python3
"""Regenerate the transition-probability, capacity, and efficiency figures.

Reads the CSV files emitted by the ``dte-recon`` CLI and renders one of four
figures:

* ``fig1``    -- plane transition probabilities vs SNR (8 series:
                 4 planes x 2 detections) from a sub-channel CSV.
* ``fig2het`` -- heterodyne sub-channel capacities (12 series: per plane a
                 solid BIAWGN reverse line, a dashed BSC line, and cross
                 marks for the direct direction) from a sub-channel CSV.
* ``fig2hom`` -- the same for homodyne rows.
* ``fig3``    -- reconciliation efficiencies (12 series: 3 depths x
                 2 detections x 2 directions) from a sweep CSV.

Usage:
    render_fig.py --spec fig3 --in sweep.csv --out fig3.png

All numbers come from the input CSV; this script computes nothing.
A schema mismatch (missing column) aborts with a nonzero exit naming the
missing column.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SUBCHANNEL_COLUMNS = ("snr_db", "detection", "level", "p", "p_se", "c_bsc",
                      "mi_dr", "mi_dr_se", "mi_rr", "mi_rr_se")
SWEEP_COLUMNS = ("snr_db", "detection", "depth", "beta_dr", "beta_dr_se",
                 "beta_rr", "beta_rr_se", "mi_xy")

# black / red / blue for increasing depth, as in the reference figures
DEPTH_COLORS = {2: "black", 3: "tab:red", 4: "tab:blue"}
LEVEL_COLORS = {1: "black", 2: "tab:red", 3: "tab:blue", 4: "tab:green"}

FIGURES = ("fig1", "fig2het", "fig2hom", "fig3")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    input_csv: str
    output_image: str
    y_scale: str = "linear"       # "linear" or "log"
    line_width: float = 1.2

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}; want one of {FIGURES}")
        if self.y_scale not in ("linear", "log"):
            raise ValueError(f"y_scale must be 'linear' or 'log', got {self.y_scale!r}")
        if not self.line_width > 0:
            raise ValueError("line_width must be positive")


def read_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        for col in required:
            if col not in header:
                raise SchemaError(f"input CSV is missing required column {col!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError("input CSV has no data rows")
    for row in rows:
        for col in required:
            if col not in ("detection",):
                row[col] = float(row[col])
    return rows


def series(rows, **filters):
    sel = [r for r in rows if all(r[k] == v for k, v in filters.items())]
    sel.sort(key=lambda r: r["snr_db"])
    return [r["snr_db"] for r in sel], sel


def detections_in(rows):
    seen = []
    for r in rows:
        if r["detection"] not in seen:
            seen.append(r["detection"])
    return seen


def render_fig1(rows, ax):
    styles = {"heterodyne": "-", "homodyne": "--"}
    for det in detections_in(rows):
        for level in (1, 2, 3, 4):
            snr, sel = series(rows, detection=det, level=level)
            if not sel:
                raise SchemaError(f"no rows for detection={det} level={level}")
            ax.plot(snr, [r["p"] for r in sel], styles.get(det, "-"),
                    color=LEVEL_COLORS[level],
                    label=f"plane {level} ({det[:3]})")
    ax.set_ylabel("transition probability")
    ax.set_title("Per-plane transition probabilities")


def render_fig2(rows, ax, detection):
    sub = [r for r in rows if r["detection"] == detection]
    if not sub:
        raise SchemaError(f"no rows for detection={detection}")
    for level in (1, 2, 3, 4):
        snr, sel = series(sub, level=level)
        if not sel:
            raise SchemaError(f"no rows for level={level}")
        color = LEVEL_COLORS[level]
        ax.plot(snr, [r["mi_rr"] for r in sel], "-", color=color,
                label=f"plane {level} BIAWGN (reverse)")
        ax.plot(snr, [r["c_bsc"] for r in sel], "--", color=color,
                label=f"plane {level} BSC")
        ax.plot(snr, [r["mi_dr"] for r in sel], linestyle="none", marker="x",
                color=color, label=f"plane {level} BIAWGN (direct)")
    ax.set_ylabel("capacity / mutual information (bits)")
    ax.set_title(f"Sub-channel capacities ({detection})")


def render_fig3(rows, ax):
    line_style = {"heterodyne": "-", "homodyne": "--"}
    marker = {"heterodyne": "x", "homodyne": "o"}
    for depth in (2, 3, 4):
        for det in detections_in(rows):
            snr, sel = series(rows, detection=det, depth=depth)
            if not sel:
                raise SchemaError(f"no rows for detection={det} depth={depth}")
            color = DEPTH_COLORS[depth]
            ax.plot(snr, [r["beta_rr"] for r in sel], line_style.get(det, "-"),
                    color=color, label=f"l={depth} reverse ({det[:3]})")
            ax.plot(snr, [r["beta_dr"] for r in sel], linestyle="none",
                    marker=marker.get(det, "x"), markerfacecolor="none",
                    color=color, label=f"l={depth} direct ({det[:3]})")
    ax.set_ylabel("reconciliation efficiency")
    ax.set_title("Maximum reconciliation efficiency")


def render(spec: FigureSpec):
    """Render one figure; returns the matplotlib Figure after saving it."""
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    if spec.figure == "fig1":
        rows = read_rows(spec.input_csv, SUBCHANNEL_COLUMNS)
        render_fig1(rows, ax)
    elif spec.figure == "fig2het":
        rows = read_rows(spec.input_csv, SUBCHANNEL_COLUMNS)
        render_fig2(rows, ax, "heterodyne")
    elif spec.figure == "fig2hom":
        rows = read_rows(spec.input_csv, SUBCHANNEL_COLUMNS)
        render_fig2(rows, ax, "homodyne")
    else:
        rows = read_rows(spec.input_csv, SWEEP_COLUMNS)
        render_fig3(rows, ax)
    for line in ax.get_lines():
        line.set_linewidth(spec.line_width)
    ax.set_yscale(spec.y_scale)
    ax.set_xlabel("SNR (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=150)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--spec", required=True, choices=FIGURES)
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_image", required=True)
    parser.add_argument("--y-scale", choices=("linear", "log"), default="linear")
    parser.add_argument("--line-width", type=float, default=1.2)
    args = parser.parse_args(argv)
    try:
        fig = render(FigureSpec(args.spec, args.input_csv, args.output_image,
                                y_scale=args.y_scale, line_width=args.line_width))
        plt.close(fig)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
