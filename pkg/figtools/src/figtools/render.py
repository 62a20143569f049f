"""Render the three standard sweep figures from barenco CSV files.

The CSV schemas are a frozen contract with the producing CLI; any header
mismatch is a hard error carrying the column diff, never a guess.  Curves use
line styles (solid/dashed/dotted/dash-dotted) instead of color so grayscale
prints keep their legend.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_HEADERS = {
    "fig3": ("ratio", "theta_rad", "alpha_rad"),
    "fig5": ("v1_v2_ve", "T_us", "alpha_rad", "theta_rad", "phi_rad"),
    "fig6": ("protocol", "T_us", "alpha_rad", "theta_rad", "phi_rad",
             "e_decay", "e_blockade", "e_leakage", "total"),
}

LINE_STYLES = ("-", "--", ":", "-.")


class SchemaError(ValueError):
    """CSV header does not match the documented sweep schema."""


class EmptyDataError(ValueError):
    """CSV contains a header but no data rows."""


@dataclass(frozen=True)
class FigureJob:
    """One render request: source CSV, figure kind, output image path, and
    optional axis overrides."""

    csv: Path
    kind: str
    out: Path
    xlabel: str | None = None
    ylabel: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in EXPECTED_HEADERS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {sorted(EXPECTED_HEADERS)}")


def _read_rows(job: FigureJob) -> list[dict]:
    with open(job.csv, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaError(f"{job.csv}: empty file, expected header "
                              f"{EXPECTED_HEADERS[job.kind]}") from None
        expected = EXPECTED_HEADERS[job.kind]
        if header != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            raise SchemaError(
                f"{job.csv}: header mismatch for {job.kind}: "
                f"missing columns {missing}, unexpected columns {extra}, "
                f"expected order {list(expected)}, found {list(header)}")
        rows = [dict(zip(expected, row)) for row in reader if row]
    if not rows:
        raise EmptyDataError(f"{job.csv}: no data rows")
    return rows


def _grouped(rows: list[dict], key: str) -> dict[str, list[dict]]:
    groups: dict[str, list[dict]] = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row)
    return groups


def _style(i: int) -> dict:
    return {"linestyle": LINE_STYLES[i % len(LINE_STYLES)], "color": "black", "lw": 1.2}


def build_figure(job: FigureJob) -> plt.Figure:
    """Assemble the matplotlib figure for a job (no file written)."""
    rows = _read_rows(job)
    if job.kind == "fig3":
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        for i, (ratio, grp) in enumerate(_grouped(rows, "ratio").items()):
            theta = np.array([float(r["theta_rad"]) for r in grp])
            alpha = np.array([float(r["alpha_rad"]) for r in grp])
            order = np.argsort(theta)
            ax.plot(theta[order], alpha[order], label=f"b01/b02 = {ratio}", **_style(i))
        ax.axhline(np.pi / 4, color="gray", lw=0.8)
        ax.set_xlabel(job.xlabel or r"$|\theta|$ (rad)")
        ax.set_ylabel(job.ylabel or r"$\alpha$ (rad)")
        ax.legend(fontsize=8)
    elif job.kind == "fig5":
        groups = _grouped(rows, "v1_v2_ve")
        ncols = 3
        nrows = -(-len(groups) // ncols)
        fig, axes = plt.subplots(nrows, ncols, figsize=(3.0 * ncols, 2.6 * nrows),
                                 squeeze=False)
        for ax, (label, grp) in zip(axes.ravel(), groups.items()):
            alpha = np.array([float(r["alpha_rad"]) for r in grp])
            order = np.argsort(alpha)
            for i, col in enumerate(("theta_rad", "phi_rad")):
                vals = np.array([float(r[col]) for r in grp])
                ax.plot(alpha[order], vals[order],
                        label=col.removesuffix("_rad"), **_style(i))
            ax.set_title(f"(V1:V2:Ve) = {label}", fontsize=8)
            ax.set_xlabel(job.xlabel or r"$\alpha$ (rad)", fontsize=8)
            ax.legend(fontsize=7)
        for ax in axes.ravel()[len(groups):]:
            ax.set_visible(False)
    else:  # fig6
        groups = _grouped(rows, "protocol")
        fig, axes = plt.subplots(1, len(groups), figsize=(4.2 * len(groups), 3.2),
                                 squeeze=False)
        series = (("alpha_rad", r"$\alpha$"), ("theta_rad", r"$\theta$"),
                  ("phi_rad", r"$\phi$"), ("total", r"$10^3 \times$ total error"))
        for ax, (protocol, grp) in zip(axes.ravel(), sorted(groups.items())):
            t = np.array([float(r["T_us"]) for r in grp])
            order = np.argsort(t)
            for i, (col, label) in enumerate(series):
                vals = np.array([float(r[col]) for r in grp])
                if col == "total":
                    vals = vals * 1e3
                ax.plot(t[order], vals[order], label=label, **_style(i))
            roman = {"1": "I", "2": "II"}.get(protocol, protocol)
            ax.set_title(f"Protocol {roman}", fontsize=9)
            ax.set_xlabel(job.xlabel or "T (us)")
            ax.legend(fontsize=7)
    for ax in fig.axes:
        if job.xlim:
            ax.set_xlim(*job.xlim)
        if job.ylim:
            ax.set_ylim(*job.ylim)
    fig.tight_layout()
    return fig


def render(job: FigureJob) -> Path:
    """Write the figure image (format from the output suffix); the input CSV
    is only ever read."""
    fig = build_figure(job)
    try:
        fig.savefig(job.out)
    finally:
        plt.close(fig)
    return job.out
