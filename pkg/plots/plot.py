#!/usr/bin/env python3
"""Render figure images from the simulation harness's CSV output.

Reads the long-format result tables (CSV with a ``# metadata:`` JSON header
line) and regenerates the three standard figures:

  fig1  blurred TV vs bandwidth for the Gaussian and trimodal kernels,
        with a star at the unsmoothed-TV limit
  fig2  oracle / estimate / UCB / LCB vs bandwidth, one panel per beta,
        star at the h -> 0 oracle TV
  fig3  empirical blurred TV per beta, one panel per tau

Usage: plot.py --figure fig2 --in results/fig2.csv --out fig2.png
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

FIGURE_IDS = ("fig1", "fig2", "fig3")

REQUIRED_COLUMNS = {
    "fig1": {"kernel", "h", "quantity", "value"},
    "fig2": {"beta", "h", "quantity", "value"},
    "fig3": {"beta", "tau", "h", "quantity", "value"},
}


class SchemaError(Exception):
    """The CSV does not carry the columns the figure needs."""


@dataclass(frozen=True)
class PlotJob:
    input_csv: str
    figure: str
    output: str
    log_x: bool = True
    star_marker: bool = True

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise ValueError(f"figure must be one of {FIGURE_IDS}, got {self.figure!r}")


@dataclass
class Table:
    rows: list[dict]
    metadata: dict = field(default_factory=dict)


def load_table(path: str) -> Table:
    """Parse a harness CSV: metadata header line, column header, data rows."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        metadata = {}
        if first.startswith("# metadata: "):
            metadata = json.loads(first[len("# metadata: "):])
            header_line = fh.readline()
        else:
            header_line = first
        names = [c.strip() for c in header_line.strip().split(",")] if header_line.strip() else []
        reader = csv.DictReader(fh, fieldnames=names)
        rows = []
        for raw in reader:
            row = {}
            for key, val in raw.items():
                if val is None or val == "":
                    continue
                try:
                    row[key] = float(val)
                except ValueError:
                    row[key] = val
            rows.append(row)
    if not names or not rows:
        raise SchemaError(f"{path}: no data rows found")
    return Table(rows=rows, metadata=metadata)


def _require_columns(table: Table, figure: str, path: str) -> None:
    present = set()
    for row in table.rows:
        present.update(row.keys())
    missing = REQUIRED_COLUMNS[figure] - present
    if missing:
        raise SchemaError(
            f"{path}: missing columns for {figure}: {sorted(missing)}; found {sorted(present)}"
        )


def _series(rows, quantity, **match):
    pts = [
        (r["h"], r["value"])
        for r in rows
        if r.get("quantity") == quantity and all(r.get(k) == v for k, v in match.items())
    ]
    pts.sort()
    return [p[0] for p in pts], [p[1] for p in pts]


def _star(ax, x, y):
    ax.plot([x], [y], marker="*", markersize=14, color="black", linestyle="none", zorder=5)


def build_figure(job: PlotJob) -> plt.Figure:
    """Build (but do not save) the matplotlib figure for a job."""
    table = load_table(job.input_csv)
    _require_columns(table, job.figure, job.input_csv)
    rows = table.rows

    if job.figure == "fig1":
        kernels = sorted({r["kernel"] for r in rows if "kernel" in r})
        fig, axes = plt.subplots(1, len(kernels), figsize=(5 * len(kernels), 4), sharey=True)
        axes = [axes] if len(kernels) == 1 else list(axes)
        for ax, kernel in zip(axes, kernels):
            hs, vals = _series(rows, "oracle_blurred_tv", kernel=kernel)
            ax.plot(hs, vals, label="blurred TV")
            stars = _series(rows, "tv_limit", kernel=kernel)
            if job.star_marker and stars[0] is not None and len(stars[1]):
                _star(ax, hs[0], stars[1][0])
            ax.set_title(f"{kernel} kernel")
            ax.set_xlabel("bandwidth h")
            if job.log_x:
                ax.set_xscale("log")
            ax.legend()
        axes[0].set_ylabel("blurred TV")

    elif job.figure == "fig2":
        betas = sorted({r["beta"] for r in rows if "beta" in r})
        fig, axes = plt.subplots(1, len(betas), figsize=(4.2 * len(betas), 4), sharey=True)
        axes = [axes] if len(betas) == 1 else list(axes)
        for ax, beta in zip(axes, betas):
            for quantity, style in (
                ("oracle", dict(color="black", linestyle="--")),
                ("estimate", dict(color="tab:blue")),
                ("ucb", dict(color="tab:red")),
                ("lcb", dict(color="tab:green")),
            ):
                hs, vals = _series(rows, quantity, beta=beta)
                ax.plot(hs, vals, label=quantity, **style)
            stars = _series(rows, "tv_limit", beta=beta)
            if job.star_marker and len(stars[1]):
                hs, _ = _series(rows, "oracle", beta=beta)
                _star(ax, hs[0], stars[1][0])
            ax.set_title(f"beta = {beta:g}")
            ax.set_xlabel("bandwidth h")
            if job.log_x:
                ax.set_xscale("log")
            ax.legend()
        axes[0].set_ylabel("blurred TV")

    else:  # fig3
        taus = sorted({r["tau"] for r in rows if "tau" in r})
        betas = sorted({r["beta"] for r in rows if "beta" in r})
        fig, axes = plt.subplots(1, len(taus), figsize=(3.6 * len(taus), 3.8), sharey=True)
        axes = [axes] if len(taus) == 1 else list(axes)
        for ax, tau in zip(axes, taus):
            for beta in betas:
                hs, vals = _series(rows, "mc_estimate", beta=beta, tau=tau)
                ax.plot(hs, vals, label=f"beta = {beta:g}")
            ax.set_title(f"tau = {tau:g}")
            ax.set_xlabel("bandwidth h")
            if job.log_x:
                ax.set_xscale("log")
        axes[0].set_ylabel("empirical blurred TV")
        axes[-1].legend()

    fig.tight_layout()
    return fig


def render(job: PlotJob) -> str:
    """Render the job to its output image; returns the output path."""
    fig = build_figure(job)
    fig.savefig(job.output, dpi=150)
    plt.close(fig)
    return job.output


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plot.py", description=__doc__.splitlines()[0])
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument("--in", dest="input_csv", required=True, help="harness CSV to read")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--linear-x", action="store_true", help="disable the log-scale x axis")
    parser.add_argument("--no-star", action="store_true", help="omit the TV-limit star marker")
    args = parser.parse_args(argv)
    job = PlotJob(
        input_csv=args.input_csv,
        figure=args.figure,
        output=args.out,
        log_x=not args.linear_x,
        star_marker=not args.no_star,
    )
    try:
        render(job)
    except (OSError, SchemaError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {job.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
