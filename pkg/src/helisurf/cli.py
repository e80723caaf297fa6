"""Command-line interface.

Subcommands construct one member of a family (``rotating``, ``minimal``,
``cmc``), classify closed CMC curves (``classify``), run the h -> 0
convergence experiment (``converge``), reduce a general motion triple
(``reduce``), or emit a swept mesh (``mesh``).

Every run can emit a delimited/file artifact (``--format svg|obj|csv|json``
with ``--out``) and, alongside it, a rendered matplotlib figure
(``--figure plot.svg``).  ``--format json`` prints a machine-readable
report on stdout.  Exit codes: 0 success, 2 precondition violation,
1 internal error.  A plain ``key = value`` config file supplies defaults
that explicit flags override.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cmc, minimal, motions, rotating
from .engine import DomainExit, InitialData, IntegratorConfig, integrate_curve, resample_arclength
from .export import SvgStyle, export_csv, export_obj, export_svg
from .geometry import GeneratingCurve, Pitch
from .mesh import build_mesh, discrete_mean_curvature_field, max_interior_deviation

__all__ = ["main", "RunConfig"]

SCHEMA_VERSION = 1


class PreconditionError(Exception):
    """User input violates a documented precondition (exit code 2)."""


@dataclass
class RunConfig:
    """Flat key = value run configuration; flags override file values."""

    values: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        values = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line is not 'key = value': {raw!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
        return cls(values=values)

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in sorted(self.values.items()))

    def get(self, key: str, default=None):
        return self.values.get(key, default)


def _report(family: str, params: dict, results: dict, warnings: list[str]) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "family": family,
        "params": params,
        "results": results,
        "warnings": warnings,
    }


def _emit_report(report: dict, out: Path | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    if out is not None:
        out.write_text(text + "\n", encoding="utf-8")
    print(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _pitch_from(args, config: RunConfig) -> Pitch:
    h = args.h if args.h is not None else _maybe_float(config.get("h"))
    mu = args.mu if args.mu is not None else _maybe_float(config.get("mu"))
    if h is not None and mu is not None:
        raise PreconditionError("give either --h or --mu, not both")
    if mu is not None:
        return Pitch(mu)
    if h is not None:
        return Pitch.finite(h)
    raise PreconditionError("a pitch is required (--h or --mu)")


def _maybe_float(v):
    return None if v is None else float(v)


def _pick(args_value, config: RunConfig, key: str, default, cast):
    if args_value is not None:
        return args_value
    from_cfg = config.get(key)
    if from_cfg is not None:
        return cast(from_cfg)
    return default


def _integrator_config(s_range: tuple[float, float], tol: float | None) -> IntegratorConfig:
    kwargs = {"s_min": s_range[0], "s_max": s_range[1]}
    if tol is not None:
        kwargs["abs_tol"] = tol
        kwargs["rel_tol"] = tol
    return IntegratorConfig(**kwargs)


def _default_out(family: str, fmt: str) -> Path:
    return Path(f"{family}.{fmt}")


def _dense_points(curve: GeneratingCurve, ds: float = 0.01) -> GeneratingCurve:
    if curve.solution is None:
        return curve
    span = float(curve.s[-1] - curve.s[0])
    step = min(ds, span / 400.0) if span > 0 else ds
    return resample_arclength(curve, step)


def _export_curve(curve: GeneratingCurve, fmt: str, out: Path, args, svg_style=None) -> None:
    if fmt == "csv":
        export_csv(curve, out)
    elif fmt == "svg":
        export_svg([_dense_points(curve)], out, svg_style)
    elif fmt == "obj":
        t_range = tuple(args.t_range) if args.t_range else (0.0, 4.0 * math.pi)
        mesh = build_mesh(_dense_points(curve, 0.05), n_t=args.n_t or 64, t_range=t_range)
        export_obj(mesh, out)
    else:
        raise PreconditionError(f"format {fmt!r} not supported for this subcommand")


def _curve_results(curve: GeneratingCurve) -> dict:
    pts = curve.points()
    if curve.s[0] <= 0.0 <= curve.s[-1] and curve.solution is not None:
        y0 = curve.solution(0.0)
        initial = {"tau": float(y0[0]), "nu": float(y0[1]), "theta": float(y0[2])}
    else:
        i0 = int(np.argmin(np.abs(curve.s)))
        initial = {
            "tau": float(curve.tau[i0]),
            "nu": float(curve.nu[i0]),
            "theta": float(curve.theta[i0]),
        }
    return {
        "s_range": [float(curve.s[0]), float(curve.s[-1])],
        "n_samples": len(curve.s),
        "initial": initial,
        "end_state": {
            "tau": float(curve.tau[-1]),
            "nu": float(curve.nu[-1]),
            "theta": float(curve.theta[-1]),
            "k": float(curve.k[-1]),
        },
        "min_radius": float(np.min(np.hypot(pts[:, 0], pts[:, 1]))),
        "max_radius": float(np.max(np.hypot(pts[:, 0], pts[:, 1]))),
    }


def _add_common(p, with_pitch=True):
    if with_pitch:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--h", type=float, help="pitch h > 0")
        g.add_argument("--mu", type=float, help="inverse pitch, mu = 0 for h = infinity")
    p.add_argument("--theta0", type=float, default=None, help="starting tangent angle")
    p.add_argument("--tol", type=float, default=None, help="integrator/solver tolerance")
    p.add_argument("--out", type=Path, default=None, help="output file path")
    p.add_argument(
        "--format",
        choices=["svg", "obj", "csv", "json"],
        default=None,
        help="output format (json reports to stdout)",
    )
    p.add_argument("--figure", type=Path, default=None, help="render a matplotlib figure (svg/pdf)")
    p.add_argument("--config", type=Path, default=None, help="key = value defaults file")
    p.add_argument("--t-range", type=float, nargs=2, default=None, help="sweep angle range for obj")
    p.add_argument("--n-t", type=int, default=None, help="sweep samples for obj")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="helisurf",
        description="Helicoidal surfaces under mean curvature flow: "
        "rotating solitons, minimal and CMC families.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rotating", help="rotating-soliton generating curve")
    _add_common(p)
    p.add_argument("--A", type=float, default=None, help="starting distance to the origin")
    p.add_argument(
        "--z0", type=float, nargs=2, default=None,
        help="free starting point in the plane (overrides --A)",
    )
    p.add_argument("--s-range", type=float, nargs=2, default=None)
    p.add_argument("--verify", action="store_true", help="audit the qualitative structure")

    p = sub.add_parser("minimal", help="minimal generating curve (closed form)")
    _add_common(p)
    p.add_argument("--A", type=float, default=None, help="distance of the curve to the origin")
    p.add_argument("--s-range", type=float, nargs=2, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("cmc", help="constant-mean-curvature generating curve")
    _add_common(p)
    p.add_argument("--R", type=float, default=None, help="trajectory amplitude R >= 0")
    p.add_argument("--excursions", type=int, default=None)

    p = sub.add_parser("classify", help="closed CMC curve for a rotation ratio p/q")
    _add_common(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = sub.add_parser("converge", help="h -> 0 convergence experiment")
    _add_common(p, with_pitch=False)
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--h-list", type=str, default=None, help="comma-separated pitches")
    p.add_argument("--interval", type=float, nargs=2, default=None)
    p.add_argument("--deriv-order", type=int, default=None)

    p = sub.add_parser("reduce", help="reduce a motion triple (b, A, c)")
    _add_common(p, with_pitch=False)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--A-matrix", type=str, required=True, help="nine comma-separated entries")
    p.add_argument("--c", type=str, required=True, help="three comma-separated entries")

    p = sub.add_parser("mesh", help="swept surface mesh with validation")
    _add_common(p)
    p.add_argument("--family", choices=["rotating", "minimal", "cmc"], required=True)
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--s-range", type=float, nargs=2, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--validate", action="store_true", help="report discrete-H deviation")
    return ap


def _cmd_rotating(args, config: RunConfig) -> dict:
    pitch = _pitch_from(args, config)
    A = _pick(args.A, config, "A", 0.0, float)
    s_range = tuple(_pick(args.s_range, config, "s_range", (-20.0, 20.0), _parse_pair))
    theta0 = _pick(args.theta0, config, "theta0", 0.0, float)
    cfg = _integrator_config(s_range, args.tol)
    law = rotating.rotating_law(pitch)
    if args.z0 is not None:
        z0 = (float(args.z0[0]), float(args.z0[1]))
    else:
        # canonical family start: (tau, nu)(0) = (0, A)
        z0 = (-abs(A) * math.sin(theta0), abs(A) * math.cos(theta0))
    curve = integrate_curve(law, InitialData(z0, theta0), cfg)
    results = _curve_results(curve)
    warnings = []
    if args.verify:
        rep = rotating.verify_soliton_structure(curve)
        results["structure"] = {
            "tau_zero_count": rep.tau_zero_count,
            "k_zero_count": rep.k_zero_count,
            "r_min": rep.r_min_value,
            "nu_ends": list(rep.nu_ends),
            "k_ends": list(rep.k_ends),
            "angle_defects": list(rep.angle_defects),
            "theta_growth": list(rep.theta_growth),
            "max_residual": rep.max_residual,
            "checks": rep.checks,
        }
        warnings.extend(f"structure check failed: {k}" for k, v in rep.checks.items() if not v)
    params = {"h": pitch.h, "A": A, "z0": list(z0), "s_range": list(s_range), "theta0": theta0}
    report = _report("rotating", params, results, warnings)
    _finish_outputs(args, config, curve, report, figure_kind="curve")
    return report


def _cmd_minimal(args, config: RunConfig) -> dict:
    pitch = _pitch_from(args, config)
    if pitch.is_infinite:
        raise PreconditionError("the minimal closed form needs finite pitch")
    A = _pick(args.A, config, "A", 0.0, float)
    theta0 = _pick(args.theta0, config, "theta0", 0.0, float)
    s_range = tuple(_pick(args.s_range, config, "s_range", (-10.0, 10.0), _parse_pair))
    n = _pick(args.samples, config, "samples", 801, int)
    spec = minimal.MinimalCurveSpec(pitch=pitch, A=A, theta0=theta0)
    curve = minimal.minimal_closed_form_at(spec, np.linspace(s_range[0], s_range[1], n))
    results = _curve_results(curve)
    results["conserved_ratio"] = A / pitch.h
    results["max_abs_H"] = float(np.max(np.abs(curve.mean_curvatures())))
    params = {"h": pitch.h, "A": A, "theta0": theta0, "s_range": list(s_range), "samples": n}
    report = _report("minimal", params, results, [])
    _finish_outputs(args, config, curve, report, figure_kind="curve")
    return report


def _cmd_cmc(args, config: RunConfig) -> dict:
    pitch = _pitch_from(args, config)
    if pitch.is_infinite:
        raise PreconditionError("CMC excursions need finite pitch")
    R = _pick(args.R, config, "R", 1.0, float)
    if R < 0.0:
        raise PreconditionError("R must be nonnegative")
    n_exc = _pick(args.excursions, config, "excursions", 1, int)
    theta0 = _pick(args.theta0, config, "theta0", 0.0, float)
    cfg = _integrator_config((0.0, 1.0), args.tol)
    curve, traj = cmc.generate_cmc_curve(R, pitch, n_excursions=n_exc, theta0=theta0, config=cfg)
    results = _curve_results(curve)
    results.update(
        {
            "period": traj.period,
            "delta_theta": cmc.delta_theta(R, pitch),
            "delta_phi": cmc.delta_phi(R, pitch),
            "annulus": [abs(R - 1.0), R + 1.0],
        }
    )
    params = {"h": pitch.h, "R": R, "excursions": n_exc, "theta0": theta0}
    report = _report("cmc", params, results, [])
    style = SvgStyle(origin_marker=True, annulus_radii=(abs(R - 1.0), R + 1.0))
    _finish_outputs(args, config, curve, report, figure_kind="curve", svg_style=style,
                    annulus=(abs(R - 1.0), R + 1.0))
    return report


def _cmd_classify(args, config: RunConfig) -> dict:
    pitch = _pitch_from(args, config)
    theta0 = _pick(args.theta0, config, "theta0", 0.0, float)
    tol = args.tol if args.tol is not None else 1e-10
    rep = cmc.classify_closed(args.p, args.q, pitch, theta0=theta0, tol=tol)
    results = {
        "R": rep.R,
        "delta_theta": rep.delta_theta,
        "delta_phi": rep.delta_phi,
        "alpha": rep.alpha,
        "closure_error": rep.closure_error,
        "rotation_number": rep.rotation_number,
        "rotation_residual": rep.rotation_residual,
        "winding_number": rep.winding_number,
        "through_origin": rep.through_origin,
        "trichotomy": rep.trichotomy,
        "min_radius": rep.min_radius,
        "symmetry_error": rep.symmetry_error,
        "theta0": rep.theta0,
    }
    warnings = []
    if rep.through_origin:
        warnings.append("winding number ill-conditioned: curve passes through the origin")
    params = {"h": pitch.h, "p": args.p, "q": args.q, "theta0": theta0}
    report = _report("classify", params, results, warnings)

    fmt = args.format or "json"
    needs_curve = fmt in ("svg", "csv", "obj") or args.figure is not None
    if needs_curve:
        curve, _ = cmc.generate_cmc_curve(rep.R, pitch, n_excursions=args.q, theta0=theta0)
        style = SvgStyle(origin_marker=True, annulus_radii=(abs(rep.R - 1.0), rep.R + 1.0))
        _finish_outputs(args, config, curve, report, figure_kind="curve", svg_style=style,
                        annulus=(abs(rep.R - 1.0), rep.R + 1.0))
    elif fmt == "json":
        _emit_report(report, args.out)
    return report


def _cmd_converge(args, config: RunConfig) -> dict:
    A = _pick(args.A, config, "A", 1.0, float)
    h_list = _pick(args.h_list, config, "h_list", "0.1,0.05,0.025,0.0125", str)
    hs = [float(v) for v in h_list.split(",") if v.strip()]
    interval = tuple(_pick(args.interval, config, "interval", (-5.0, 5.0), _parse_pair))
    order = _pick(args.deriv_order, config, "deriv_order", 1, int)
    table = rotating.convergence_experiment(A, hs, interval, deriv_order=order)
    results = {
        "h": table.h_values,
        "distances": table.distances,
        "slope": table.slope,
    }
    params = {"A": A, "interval": list(interval), "deriv_order": order}
    report = _report("converge", params, results, [])

    fmt = args.format or "json"
    if fmt == "csv":
        out = args.out or _default_out("converge", "csv")
        header = "h," + ",".join(f"c{k}" for k in range(order + 1))
        rows = [header]
        for h, dist in zip(table.h_values, table.distances):
            rows.append(",".join(f"{v:.17g}" for v in [h, *dist]))
        Path(out).write_text("\n".join(rows) + "\n", encoding="utf-8")
    elif fmt == "json":
        _emit_report(report, args.out)
    else:
        raise PreconditionError("converge supports only csv or json output")
    if args.figure is not None:
        from . import plotting

        plotting.save_convergence_figure(table, args.figure)
    return report


def _cmd_reduce(args, config: RunConfig) -> dict:
    entries = [float(v) for v in args.A_matrix.split(",")]
    if len(entries) != 9:
        raise PreconditionError("--A-matrix needs nine comma-separated entries")
    A = np.array(entries).reshape(3, 3)
    c = np.array([float(v) for v in args.c.split(",")])
    if c.shape != (3,):
        raise PreconditionError("--c needs three comma-separated entries")
    w, spec = motions.reduce_general(args.b, A, c)
    results = {
        "w": w.tolist(),
        "reduced": {"b": spec.b, "A": spec.A.tolist(), "c": spec.c.tolist()},
        "case": "dilation+rotation" if args.b != 0.0 else "translation+rotation",
    }
    report = _report("reduce", {"b": args.b, "A": A.tolist(), "c": c.tolist()}, results, [])
    _emit_report(report, args.out)
    return report


def _cmd_mesh(args, config: RunConfig) -> dict:
    pitch = _pitch_from(args, config)
    s_range = tuple(_pick(args.s_range, config, "s_range", (-5.0, 5.0), _parse_pair))
    n_s = _pick(args.samples, config, "samples", 129, int)
    n_t = args.n_t or 64
    t_range = tuple(args.t_range) if args.t_range else (0.0, 4.0 * math.pi)
    theta0 = _pick(args.theta0, config, "theta0", 0.0, float)

    if args.family == "minimal":
        if pitch.is_infinite:
            raise PreconditionError("minimal mesh needs finite pitch")
        A = _pick(args.A, config, "A", 0.0, float)
        spec = minimal.MinimalCurveSpec(pitch=pitch, A=A, theta0=theta0)
        curve = minimal.minimal_closed_form_at(spec, np.linspace(s_range[0], s_range[1], n_s))
        params = {"h": pitch.h, "A": A}
    elif args.family == "rotating":
        A = _pick(args.A, config, "A", 0.0, float)
        cfg = _integrator_config(s_range, args.tol)
        curve = integrate_curve(rotating.rotating_law(pitch), InitialData((0.0, abs(A)), 0.0), cfg)
        curve = resample_arclength(curve, (s_range[1] - s_range[0]) / (n_s - 1))
        params = {"h": pitch.h, "A": A}
    else:
        R = _pick(args.R, config, "R", 0.0, float)
        if pitch.is_infinite:
            raise PreconditionError("CMC mesh needs finite pitch")
        curve, _ = cmc.generate_cmc_curve(R, pitch, n_excursions=1, theta0=theta0)
        curve = resample_arclength(curve, float(curve.s[-1]) / (n_s - 1))
        params = {"h": pitch.h, "R": R}

    mesh = build_mesh(curve, pitch=pitch, n_t=n_t, t_range=t_range)
    mesh.validate()
    results = {
        "n_vertices": mesh.n_vertices,
        "n_triangles": len(mesh.triangles),
        "grid": list(mesh.grid_shape),
    }
    if args.validate:
        results["max_interior_H_deviation"] = max_interior_deviation(mesh)
        field_vals = discrete_mean_curvature_field(mesh)
        results["interior_H_range"] = [
            float(np.nanmin(field_vals)),
            float(np.nanmax(field_vals)),
        ]
    params.update({"family": args.family, "s_range": list(s_range), "n_s": n_s, "n_t": n_t})
    report = _report("mesh", params, results, [])

    fmt = args.format or "obj"
    if fmt == "obj":
        export_obj(mesh, args.out or _default_out(f"{args.family}-mesh", "obj"))
    elif fmt == "json":
        _emit_report(report, args.out)
    else:
        raise PreconditionError("mesh supports only obj or json output")
    return report


def _parse_pair(v) -> tuple[float, float]:
    if isinstance(v, (tuple, list)):
        return (float(v[0]), float(v[1]))
    parts = [p for p in str(v).replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ValueError(f"expected two numbers, got {v!r}")
    return (float(parts[0]), float(parts[1]))


def _finish_outputs(args, config, curve, report, figure_kind="curve", svg_style=None, annulus=None):
    fmt = args.format if args.format is not None else config.get("format", "json")
    if fmt == "json":
        _emit_report(report, args.out)
    else:
        out = args.out or _default_out(report["family"], fmt)
        _export_curve(curve, fmt, Path(out), args, svg_style=svg_style)
    if args.figure is not None:
        from . import plotting

        plotting.save_curve_figure(
            [_dense_points(curve)],
            args.figure,
            annulus_radii=annulus,
            title=report["family"],
        )


_COMMANDS = {
    "rotating": _cmd_rotating,
    "minimal": _cmd_minimal,
    "cmc": _cmd_cmc,
    "classify": _cmd_classify,
    "converge": _cmd_converge,
    "reduce": _cmd_reduce,
    "mesh": _cmd_mesh,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    config = RunConfig()
    if getattr(args, "config", None):
        try:
            config = RunConfig.from_text(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    try:
        _COMMANDS[args.command](args, config)
    except (
        PreconditionError,
        cmc.RatioOutOfRange,
        motions.NonSkew,
        motions.OrthogonalityViolated,
        rotating.CurveTooShort,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
