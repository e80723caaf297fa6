"""Matplotlib figure rendering for the CLI report path.

Figures accompany the delimited outputs: curve portraits in the plane
(optionally with the CMC annulus), phase-plane trajectories, and the
log-log convergence plot.  Only vector formats (svg, pdf) are accepted,
and the SVG hash salt plus empty date metadata keep repeat renders
byte-identical.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .geometry import GeneratingCurve
from .rotating import ConvergenceTable

__all__ = ["save_curve_figure", "save_phase_figure", "save_convergence_figure"]

plt.rcParams["svg.hashsalt"] = "helisurf"
plt.rcParams["figure.figsize"] = (5.0, 5.0)
plt.rcParams["savefig.bbox"] = "tight"

_VECTOR_SUFFIXES = {".svg", ".pdf"}


def _checked_path(path) -> Path:
    path = Path(path)
    if path.suffix.lower() not in _VECTOR_SUFFIXES:
        raise ValueError(f"figure format must be vector (svg/pdf), got {path.suffix!r}")
    return path


def _save(fig, path: Path) -> Path:
    meta = {"Date": None} if path.suffix.lower() == ".svg" else {"CreationDate": None}
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def save_curve_figure(
    curves,
    path,
    labels=None,
    annulus_radii: tuple[float, float] | None = None,
    origin_marker: bool = True,
    title: str | None = None,
) -> Path:
    """Plot generating curves in the plane with equal axes."""
    path = _checked_path(path)
    fig, ax = plt.subplots()
    for idx, c in enumerate(curves):
        pts = c.points() if isinstance(c, GeneratingCurve) else np.asarray(c, dtype=float)
        label = labels[idx] if labels else None
        ax.plot(pts[:, 0], pts[:, 1], lw=1.0, label=label)
    if annulus_radii is not None:
        phi = np.linspace(0.0, 2.0 * math.pi, 256)
        for r in annulus_radii:
            ax.plot(abs(r) * np.cos(phi), abs(r) * np.sin(phi), ls="--", lw=0.6, color="0.6")
    if origin_marker:
        ax.plot([0.0], [0.0], "+", color="0.3", ms=8)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    if labels:
        ax.legend(fontsize=8)
    return _save(fig, path)


def save_phase_figure(trajectories, path, labels=None, title: str | None = None) -> Path:
    """Plot (tau, nu) phase-plane trajectories."""
    path = _checked_path(path)
    fig, ax = plt.subplots()
    for idx, arr in enumerate(trajectories):
        arr = np.asarray(arr, dtype=float)
        label = labels[idx] if labels else None
        ax.plot(arr[:, 0], arr[:, 1], lw=1.0, label=label)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\nu$")
    ax.axhline(0.0, color="0.8", lw=0.5)
    ax.axvline(0.0, color="0.8", lw=0.5)
    if title:
        ax.set_title(title)
    if labels:
        ax.legend(fontsize=8)
    return _save(fig, path)


def save_convergence_figure(table: ConvergenceTable, path, title: str | None = None) -> Path:
    """Log-log plot of the sup-distances against h with the fitted slope."""
    path = _checked_path(path)
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    hs = np.array(table.h_values)
    c0 = np.array(table.c0())
    ax.loglog(hs, c0, "o-", label="sup distance")
    ref = c0[0] * (hs / hs[0]) ** table.slope
    ax.loglog(hs, ref, "--", color="0.5", label=f"slope {table.slope:.2f}")
    ax.set_xlabel("h")
    ax.set_ylabel("distance to the constant solution")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _save(fig, path)
