"""Deterministic file emitters: SVG curve plots, OBJ meshes, CSV tables.

All floats are written with 17 significant digits, which round-trips IEEE
doubles exactly, so identical inputs produce byte-identical files and the
CSV/OBJ loaders recover the numbers bit-for-bit.  The SVG y-axis is flipped
so the figures read in the usual mathematical orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import GeneratingCurve, reconstruct_points
from .mesh import SurfaceMesh

__all__ = [
    "SvgStyle",
    "export_svg",
    "export_obj",
    "export_csv",
    "load_obj",
    "load_csv",
]

CSV_HEADER = "s,tau,nu,theta,k,x,y"

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass
class SvgStyle:
    """Rendering options for curve figures."""

    width: int = 640
    height: int = 640
    stroke_width: float = 1.5
    colors: tuple[str, ...] = _PALETTE
    margin_fraction: float = 0.05
    origin_marker: bool = False
    annulus_radii: tuple[float, float] | None = None
    normalize_outer_radius: float | None = None  # rescale curves to this max radius
    background: str | None = None


def _curve_points(curve) -> np.ndarray:
    if isinstance(curve, GeneratingCurve):
        return curve.points()
    return np.asarray(curve, dtype=float)


def export_svg(curves, path, style: SvgStyle | None = None) -> Path:
    """Write an SVG 1.1 figure with one polyline per curve.

    ``curves`` is a list of GeneratingCurve or (n, 2) point arrays.  With
    ``normalize_outer_radius`` every curve is scaled so its largest radius
    matches that value (the common-outer-radius presentation of closed
    curves); ``annulus_radii`` adds the two bounding circles and
    ``origin_marker`` a small cross at the origin.
    """
    st = style or SvgStyle()
    path = Path(path)
    point_sets = []
    for c in curves:
        pts = _curve_points(c)
        if len(pts) and st.normalize_outer_radius is not None:
            rmax = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
            if rmax > 0.0:
                pts = pts * (st.normalize_outer_radius / rmax)
        point_sets.append(pts)

    xs = [p[:, 0] for p in point_sets if len(p)]
    ys = [p[:, 1] for p in point_sets if len(p)]
    if xs:
        x_lo = min(float(np.min(v)) for v in xs)
        x_hi = max(float(np.max(v)) for v in xs)
        y_lo = min(float(np.min(v)) for v in ys)
        y_hi = max(float(np.max(v)) for v in ys)
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    if st.annulus_radii is not None:
        r_out = max(abs(st.annulus_radii[0]), abs(st.annulus_radii[1]))
        x_lo, x_hi = min(x_lo, -r_out), max(x_hi, r_out)
        y_lo, y_hi = min(y_lo, -r_out), max(y_hi, r_out)
    span = max(x_hi - x_lo, y_hi - y_lo, 1e-30)
    pad = st.margin_fraction * span
    # flip the y-axis: emit (x, -y) and fit the viewBox to the flipped data
    vb = (x_lo - pad, -(y_hi + pad), (x_hi - x_lo) + 2 * pad, (y_hi - y_lo) + 2 * pad)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{st.width}" height="{st.height}" '
        f'viewBox="{_fmt(vb[0])} {_fmt(vb[1])} {_fmt(vb[2])} {_fmt(vb[3])}">',
    ]
    if st.background is not None:
        lines.append(
            f'<rect x="{_fmt(vb[0])}" y="{_fmt(vb[1])}" width="{_fmt(vb[2])}" '
            f'height="{_fmt(vb[3])}" fill="{st.background}"/>'
        )
    sw = st.stroke_width * span / max(st.width, st.height)
    if st.annulus_radii is not None:
        for r in st.annulus_radii:
            lines.append(
                f'<circle cx="0" cy="0" r="{_fmt(abs(r))}" fill="none" '
                f'stroke="#999999" stroke-width="{_fmt(0.5 * sw)}" stroke-dasharray="{_fmt(4 * sw)}"/>'
            )
    if st.origin_marker:
        m = 2.0 * sw
        lines.append(
            f'<path d="M {_fmt(-m)} 0 L {_fmt(m)} 0 M 0 {_fmt(-m)} L 0 {_fmt(m)}" '
            f'stroke="#444444" stroke-width="{_fmt(0.5 * sw)}"/>'
        )
    for idx, pts in enumerate(point_sets):
        color = st.colors[idx % len(st.colors)]
        coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in pts)
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="{_fmt(sw)}" '
            f'points="{coords}"/>'
        )
    lines.append("</svg>")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def export_obj(mesh: SurfaceMesh, path) -> Path:
    """Write v/vn/f records; faces reference vertex and normal by the same index."""
    path = Path(path)
    out = []
    for v in mesh.vertices:
        out.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
    for n in mesh.normals:
        out.append(f"vn {_fmt(n[0])} {_fmt(n[1])} {_fmt(n[2])}")
    for t in mesh.triangles:
        out.append(f"f {t[0]+1}//{t[0]+1} {t[1]+1}//{t[1]+1} {t[2]+1}//{t[2]+1}")
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


def load_obj(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read back (vertices, normals, triangles) from an OBJ file."""
    verts, norms, tris = [], [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "vn":
            norms.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            tris.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    return np.array(verts), np.array(norms), np.array(tris, dtype=np.int64)


def export_csv(curve: GeneratingCurve, path) -> Path:
    """One row per sample: s,tau,nu,theta,k,x,y with reconstructed points."""
    path = Path(path)
    pts = reconstruct_points(curve.tau, curve.nu, curve.theta)
    rows = [CSV_HEADER]
    for i in range(len(curve.s)):
        rows.append(
            ",".join(
                _fmt(v)
                for v in (
                    curve.s[i],
                    curve.tau[i],
                    curve.nu[i],
                    curve.theta[i],
                    curve.k[i],
                    pts[i, 0],
                    pts[i, 1],
                )
            )
        )
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


def load_csv(path) -> dict[str, np.ndarray]:
    """Read back the curve table as a dict of column arrays."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    if header != CSV_HEADER.split(","):
        raise ValueError(f"unexpected CSV header: {lines[0]!r}")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    if data.size == 0:
        data = data.reshape(0, len(header))
    return {name: data[:, j] for j, name in enumerate(header)}
