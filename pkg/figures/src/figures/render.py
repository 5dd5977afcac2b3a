"""Rendering of the four figure kinds.

Every kind reads only the documented CSV columns, draws a single static
figure, and writes the image atomically (temp file in the target directory,
then rename), so a crash mid-write never leaves a truncated image behind.
"""

import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import Table, read_table
from .spec import FigureSpec

__all__ = ["render"]

_EMPTY_NOTE = "warning: input table has a header but no data rows"


def _series_label(column: str, csv_label: str) -> str:
    return f"{csv_label}: {column}" if csv_label else column


def _annotate_empty(ax):
    ax.text(0.5, 0.5, _EMPTY_NOTE, transform=ax.transAxes,
            ha="center", va="center", color="tab:red")


def _slope_guide(ax, x, y, slope: float):
    """Reference triangle of the given log-log slope anchored near the data."""
    x0, x1 = x[-1], x[-2]
    y0 = 0.5 * y[-1]
    y1 = y0 * (x1 / x0) ** slope
    ax.loglog([x0, x1, x1, x0], [y0, y0, y1, y0], "k-", linewidth=0.8)
    ax.annotate(f"slope {slope:g}", (x1, np.sqrt(y0 * y1)),
                textcoords="offset points", xytext=(4, 0), fontsize=8)


def _draw_loglog_h(ax, spec: FigureSpec, tables):
    ax.set_xlabel("h")
    ax.set_ylabel("value")
    drew = False
    for table, label in tables:
        cols = table.require(("h", "p") + spec.series)
        if table.n_rows == 0:
            continue
        h, p = cols[0], cols[1]
        order = np.argsort(h)[::-1]
        for name, vals in zip(spec.series, cols[2:]):
            mask = np.isfinite(vals[order]) & (vals[order] > 0)
            if mask.any():
                ax.loglog(h[order][mask], vals[order][mask], "o-",
                          label=_series_label(name, label))
                drew = True
        finite_p = p[np.isfinite(p)]
        err = cols[2][order]
        mask = np.isfinite(err) & (err > 0)
        if finite_p.size and mask.sum() >= 2:
            _slope_guide(ax, h[order][mask], err[mask], float(finite_p[0]) + 1)
    if drew:
        ax.legend()
    else:
        _annotate_empty(ax)


def _draw_semilog_N(ax, spec: FigureSpec, tables):
    ax.set_xlabel("N")
    ax.set_ylabel("value")
    drew = False
    for table, label in tables:
        cols = table.require(("N",) + spec.series)
        if table.n_rows == 0:
            continue
        n = cols[0]
        order = np.argsort(n)
        for name, vals in zip(spec.series, cols[1:]):
            mask = np.isfinite(vals[order]) & (vals[order] > 0)
            if mask.any():
                ax.semilogy(n[order][mask], vals[order][mask], "s-",
                            label=_series_label(name, label))
                drew = True
    if drew:
        ax.legend()
    else:
        _annotate_empty(ax)


def _draw_profile(ax, spec: FigureSpec, tables):
    ax.set_xlabel("x")
    ax.set_ylabel("mode 0")
    twin = None
    drew = False
    for table, label in tables:
        cols = table.require(("x",) + spec.series)
        if table.n_rows == 0:
            continue
        x = cols[0]
        for name, vals in zip(spec.series, cols[1:]):
            if name.endswith("_density"):
                if twin is None:
                    twin = ax.twinx()
                    twin.set_ylabel("residual density")
                twin.plot(x, vals, "--", label=_series_label(name, label))
            else:
                ax.plot(x, vals, "-", label=_series_label(name, label))
            drew = True
    handles, names = ax.get_legend_handles_labels()
    if twin is not None:
        h2, n2 = twin.get_legend_handles_labels()
        handles, names = handles + h2, names + n2
    if drew:
        ax.legend(handles, names, loc="best", fontsize=8)
    else:
        _annotate_empty(ax)


def _draw_expfactor(ax, spec: FigureSpec, tables):
    ax.set_xlabel("h")
    ax.set_ylabel("exponential factor")
    drew = False
    for table, label in tables:
        cols = table.require(("h",) + spec.series)
        if table.n_rows == 0:
            continue
        h = cols[0]
        order = np.argsort(h)[::-1]
        for name, vals in zip(spec.series, cols[1:]):
            mask = np.isfinite(vals[order])
            if mask.any():
                ax.semilogx(h[order][mask], vals[order][mask], "d-",
                            label=_series_label(name, label))
                drew = True
    if drew:
        ax.set_ylim(bottom=0)
        ax.legend()
    else:
        _annotate_empty(ax)


_DRAWERS = {
    "loglog_h": _draw_loglog_h,
    "semilog_N": _draw_semilog_N,
    "profile": _draw_profile,
    "expfactor": _draw_expfactor,
}


def _atomic_savefig(fig, path: str):
    directory = os.path.dirname(os.path.abspath(path))
    suffix = os.path.splitext(path)[1] or ".png"
    fd, tmp = tempfile.mkstemp(suffix=suffix, dir=directory)
    os.close(fd)
    try:
        fig.savefig(tmp, dpi=150)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def render(spec: FigureSpec) -> str:
    """Render one figure and return the written image path."""
    if not spec.out_path:
        raise ValueError("figure spec has no output path")
    labels = spec.labels or ("",) * len(spec.csv_paths)
    tables = [(read_table(path), label)
              for path, label in zip(spec.csv_paths, labels)]
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    try:
        if spec.title:
            ax.set_title(spec.title)
        _DRAWERS[spec.kind](ax, spec, tables)
        fig.tight_layout()
        _atomic_savefig(fig, spec.out_path)
    finally:
        plt.close(fig)
    return spec.out_path
