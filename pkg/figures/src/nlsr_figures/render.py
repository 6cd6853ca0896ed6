"""Render benchmark figures from the harness CSV files.

Every renderer is a pure function of CSV content plus the figure spec:
fixed canvas, seeded SVG hash salt, no clocks, no recomputation of any
numerical quantity beyond grouping, min/max, and the slope guide lines.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "nlsr-figures"
import matplotlib.pyplot as plt  # noqa: E402

FIGURE_IDS = ("convergence", "efficiency", "gamma", "longtime", "table1")

REQUIRED_COLUMNS = {
    "convergence": ["method", "tau", "h1_error", "status"],
    "efficiency": ["method", "tau", "h1_error", "wall_time_s", "status"],
    "gamma": ["method", "tau", "n", "t_tilde", "gamma"],
    "longtime": ["method", "theta", "t_tilde", "mass_rel_err"],
    "table1": ["method", "theta", "mass_rel_err"],
}

FIGSIZE = (6.4, 4.2)
DPI = 130


class SchemaError(Exception):
    """CSV is missing required columns (or has no data rows)."""


@dataclass
class FigureSpec:
    figure: str
    csv_paths: list
    out_path: str
    log_axes: bool = True
    slope_guides: tuple = (1, 2)
    title: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise SchemaError(f"unknown figure id {self.figure!r}; known: {FIGURE_IDS}")


def read_rows(path, required):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _load(spec, kind=None):
    kind = kind or spec.figure
    rows = []
    for p in spec.csv_paths:
        rows.extend(read_rows(p, REQUIRED_COLUMNS[kind]))
    return rows


def _save(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    suffix = out_path.suffix.lower()
    if suffix not in (".png", ".svg"):
        raise SchemaError(f"output must be .png or .svg, got {out_path.name}")
    metadata = {"Date": None} if suffix == ".svg" else None
    fig.savefig(out_path, dpi=DPI, metadata=metadata)
    plt.close(fig)
    return out_path


def _series_by_method(rows, xcol, ycol, ok_only=True):
    series = {}
    for r in rows:
        if ok_only and r.get("status", "ok") != "ok":
            continue
        try:
            x, y = float(r[xcol]), float(r[ycol])
        except ValueError:
            continue
        series.setdefault(r["method"], []).append((x, y))
    return {m: sorted(pts) for m, pts in series.items()}


def _slope_guides(ax, xs, ys, orders):
    x0, x1 = min(xs), max(xs)
    anchor_y = np.exp(np.mean(np.log(ys)))
    anchor_x = np.exp(np.mean(np.log(xs)))
    xx = np.array([x0, x1])
    for order in orders:
        ax.loglog(xx, anchor_y * (xx / anchor_x) ** order, "k", alpha=0.45,
                  lw=0.9, ls="--" if order % 2 else ":",
                  label=f"order {order}")


def render_convergence(spec: FigureSpec):
    rows = _load(spec, "convergence")
    series = _series_by_method(rows, "tau", "h1_error")
    if not series:
        raise SchemaError("no usable (method, tau, h1_error) rows")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    all_x, all_y = [], []
    for method, pts in sorted(series.items()):
        x, y = zip(*pts)
        ax.loglog(x, y, marker="o", ms=4, label=method)
        all_x += list(x)
        all_y += list(y)
    if spec.slope_guides:
        _slope_guides(ax, all_x, all_y, spec.slope_guides)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$H^1$ error")
    ax.set_title(spec.title or "error vs step size")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, spec.out_path), {"methods": sorted(series)}


def render_efficiency(spec: FigureSpec):
    rows = _load(spec, "efficiency")
    series = _series_by_method(rows, "wall_time_s", "h1_error")
    if not series:
        raise SchemaError("no usable (method, wall_time_s, h1_error) rows")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for method, pts in sorted(series.items()):
        x, y = zip(*pts)
        ax.loglog(x, y, marker="s", ms=4, label=method)
    ax.set_xlabel("wall time [s]")
    ax.set_ylabel(r"$H^1$ error")
    ax.set_title(spec.title or "error vs cpu time (machine-relative)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, spec.out_path), {"methods": sorted(series)}


def render_gamma(spec: FigureSpec):
    rows = _load(spec, "gamma")
    series = _series_by_method(rows, "t_tilde", "gamma", ok_only=False)
    if not series:
        raise SchemaError("no usable (method, t_tilde, gamma) rows")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    band = 0.0
    for method, pts in sorted(series.items()):
        x, y = zip(*pts)
        ax.plot(x, y, lw=0.8, label=method)
        band = max(band, float(np.max(np.abs(np.array(y) - 1.0))))
    ax.axhline(1.0, color="k", lw=0.8, alpha=0.6)
    pad = max(3 * band, 1e-4)
    ax.set_ylim(1.0 - pad, 1.0 + pad)
    ax.set_xlabel(r"$\tilde t_n$")
    ax.set_ylabel(r"$\gamma_n$")
    ax.set_title(spec.title or "relaxation coefficients")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.25)
    return _save(fig, spec.out_path), {"methods": sorted(series), "band": band}


def render_longtime(spec: FigureSpec):
    rows = _load(spec, "longtime")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    groups = {}
    for r in rows:
        key = f"{r['method']} (theta={r['theta']})" if len(spec.csv_paths) > 1 else r["method"]
        groups.setdefault(key, []).append((float(r["t_tilde"]), float(r["mass_rel_err"])))
    plotted = []
    for label, pts in sorted(groups.items()):
        pts = sorted(pts)
        # zero rows vanish on the log axis (the paper's curves show the
        # same gaps where the stepwise error is exactly zero)
        x = [p[0] for p in pts if p[1] > 0]
        y = [p[1] for p in pts if p[1] > 0]
        if x:
            ax.semilogy(x, y, lw=0.7, label=label)
            plotted.append(label)
    if not plotted:
        raise SchemaError("no nonzero mass_rel_err rows to plot")
    ax.set_xlabel(r"$\tilde t_n$")
    ax.set_ylabel(r"relative $L^2$-norm error")
    ax.set_title(spec.title or "stepwise mass error")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, spec.out_path), {"methods": plotted}


def render_table1(spec: FigureSpec):
    """Min/max stepwise mass error per (data, method), as plain text."""
    rows = _load(spec, "table1")
    stats = {}
    for r in rows:
        key = (r["theta"], r["method"])
        e = float(r["mass_rel_err"])
        lo, hi = stats.get(key, (np.inf, 0.0))
        stats[key] = (min(lo, e), max(hi, e))
    lines = [f"{'data':>10s}  {'method':10s}  {'max':>9s}  {'min':>9s}"]
    for (theta, method), (lo, hi) in sorted(stats.items()):
        lines.append(f"{theta:>10s}  {method:10s}  {hi:9.2e}  {lo:9.2e}")
    text = "\n".join(lines) + "\n"
    out_path = Path(spec.out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text)
    return out_path, {"text": text, "cells": stats}


RENDERERS = {
    "convergence": render_convergence,
    "efficiency": render_efficiency,
    "gamma": render_gamma,
    "longtime": render_longtime,
    "table1": render_table1,
}


def render(spec: FigureSpec):
    """Dispatch on the figure id; returns (output path, info dict)."""
    return RENDERERS[spec.figure](spec)
