"""Command-line interface: every operation behind one entry point.

Subcommands: faber, cheb, rate, invariance, widom, zeros, rivlin.  Every
run writes a JSON report; tabular runs (rate, widom, zeros) also write
CSV; zeros and rate emit an SVG plot.  Exit codes: 0 success, 1 invalid
arguments or family spec, 2 numerical failure (unconverged solve).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .curves import (
    Circle,
    CurveFamily,
    Interval,
    InversePolynomialImage,
    Lemniscate,
    capacity_leading_coefficient,
    family_from_json_dict,
    family_to_json_dict,
    phi_series,
    sample_level_curve,
)
from .experiments import (
    ExperimentError,
    invariance_experiment,
    rate_experiment,
    rivlin_check,
    widom_experiment,
    zero_trajectories,
)
from .minimax import SolveOptions, solve_chebyshev
from .series import ComplexPolynomial, monic_faber

__all__ = ["RunConfig", "run", "main"]

_OUTDIR_ENV = "EQUICHEB_OUTDIR"


@dataclass
class RunConfig:
    """Validated parameters of one CLI invocation."""

    subcommand: str
    family: Optional[CurveFamily] = None
    n: Optional[int] = None
    r: Optional[float] = None
    r_grid: Optional[List[float]] = None
    r_pair: Optional[List[float]] = None
    n_max: Optional[int] = None
    M: Optional[int] = None
    M_eval: int = 4096
    tol_rel: Optional[float] = None
    max_iter: Optional[int] = None
    adapt: bool = True
    depth: Optional[int] = None
    trials: int = 1000
    grid_M: int = 4096
    seed: int = 0
    outdir: Path = field(default_factory=Path.cwd)
    tag: str = "run"

    def solve_options(self) -> SolveOptions:
        base = SolveOptions()
        return SolveOptions(
            tol_rel=self.tol_rel if self.tol_rel is not None else base.tol_rel,
            max_iter=self.max_iter if self.max_iter is not None else base.max_iter,
            adapt=self.adapt,
        )

    def experiment_options(self) -> Optional[SolveOptions]:
        """None (use the experiment's own defaults) unless the user set knobs."""
        if self.tol_rel is None and self.max_iter is None and self.adapt:
            return None
        return SolveOptions(
            tol_rel=self.tol_rel if self.tol_rel is not None else 2e-4,
            max_iter=self.max_iter if self.max_iter is not None else 12000,
            adapt=False,
        )


def _parse_poly_flag(text: str) -> ComplexPolynomial:
    """Comma-separated descending-degree coefficients; complex as re+imi."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty polynomial spec")
    vals = []
    for p in parts:
        try:
            vals.append(complex(p.replace("i", "j")))
        except ValueError as e:
            raise ValueError(f"bad coefficient {p!r}") from e
    return ComplexPolynomial(np.array(vals[::-1], dtype=complex))


def _parse_float_list(text: str) -> List[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _build_family(args) -> CurveFamily:
    if getattr(args, "family_json", None):
        try:
            spec = json.loads(Path(args.family_json).read_text())
        except OSError as e:
            raise ValueError(f"cannot read family spec: {e}") from e
        except json.JSONDecodeError as e:
            raise ValueError(f"malformed family spec JSON: {e}") from e
        return family_from_json_dict(spec)
    kind = args.family
    if kind == "circle":
        return Circle(args.R if args.R is not None else 1.0)
    if kind == "interval":
        return Interval()
    if kind == "lemniscate":
        if args.P is None:
            raise ValueError("lemniscate needs --P")
        return Lemniscate(_parse_poly_flag(args.P), args.R if args.R is not None else 1.0)
    if kind == "inverse-image":
        if args.P is None:
            raise ValueError("inverse-image needs --P")
        return InversePolynomialImage(_parse_poly_flag(args.P))
    raise ValueError(f"unknown family {kind!r}")


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, rows):
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def _svg_document(polylines, points, width=640, height=640):
    """Minimal deterministic SVG: one path per polyline, circles for points."""
    xs, ys = [], []
    for line in polylines:
        xs.extend(z.real for z in line)
        ys.extend(z.imag for z in line)
    for z in points:
        xs.append(z.real)
        ys.append(z.imag)
    if not xs:
        xs = ys = [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
    vb = (x0 - pad, -(y1 + pad), (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad)
    stroke = max(vb[2], vb[3]) / 400.0
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{vb[0]:.6g} {vb[1]:.6g} {vb[2]:.6g} {vb[3]:.6g}">',
    ]
    for line in polylines:
        if len(line) == 0:
            continue
        parts.append(
            f'<path d="{_svg_path_multi(line)}" '
            f'fill="none" stroke="#e07020" stroke-width="{stroke:.6g}"/>'
        )
    for z in points:
        parts.append(
            f'<circle cx="{z.real:.6g}" cy="{-z.imag:.6g}" r="{2*stroke:.6g}" fill="#c02020"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _svg_path_multi(line):
    return "M " + " L ".join(f"{z.real:.6g},{-z.imag:.6g}" for z in line)


def _svg_loglog(r_values, values, width=640, height=480):
    pts = [
        complex(np.log10(r), np.log10(max(v, 1e-300)))
        for r, v in zip(r_values, values)
        if v is not None and v > 0
    ]
    return _svg_document([pts], [], width, height)


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equicheb",
        description="Chebyshev polynomials on equipotential curves and Faber polynomials",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_family_flags(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--family",
                       choices=["circle", "interval", "lemniscate", "inverse-image"])
        g.add_argument("--family-json", type=str,
                       help="path to a family spec JSON (covers explicit maps)")
        p.add_argument("--R", type=float, default=None,
                       help="circle radius / lemniscate level")
        p.add_argument("--P", type=str, default=None,
                       help="polynomial, descending-degree coefficients, e.g. 1,0,-1")

    def add_solver_flags(p):
        p.add_argument("--M", type=int, default=None, help="sample size override")
        p.add_argument("--tol", type=float, default=None, help="relative gap tolerance")
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--no-adapt", action="store_true")

    def add_out_flags(p):
        p.add_argument("-o", "--outdir", type=str, default=None,
                       help=f"output directory (default: ${_OUTDIR_ENV} or cwd)")
        p.add_argument("--tag", type=str, default=None, help="output file stem")

    p = sub.add_parser("faber", help="monic Faber polynomial of a family")
    add_family_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, default=None)
    add_out_flags(p)

    p = sub.add_parser("cheb", help="Chebyshev polynomial of one level curve")
    add_family_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    add_solver_flags(p)
    add_out_flags(p)

    p = sub.add_parser("rate", help="convergence-rate experiment over an r grid")
    add_family_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r-grid", type=str, required=True, help="comma list, e.g. 2,4,8,16,32")
    add_solver_flags(p)
    add_out_flags(p)

    p = sub.add_parser("invariance", help="compare solves at two levels")
    add_family_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=str, required=True, help="two levels, e.g. 1.5,4")
    add_solver_flags(p)
    add_out_flags(p)

    p = sub.add_parser("widom", help="normalized error sequence at fixed level")
    add_family_flags(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    add_solver_flags(p)
    add_out_flags(p)

    p = sub.add_parser("zeros", help="zero trajectories across levels")
    add_family_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r-grid", type=str, default=None,
                   help="comma list; default: 100 log steps in [1.05, 8]")
    add_solver_flags(p)
    add_out_flags(p)

    p = sub.add_parser("rivlin", help="strong-uniqueness inequality trials")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--grid-M", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    add_out_flags(p)

    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand)
    if getattr(args, "family", None) is not None or getattr(args, "family_json", None):
        cfg.family = _build_family(args)
    for name in ("n", "r", "depth", "trials", "seed", "M"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "n_max", None) is not None:
        cfg.n_max = args.n_max
    if getattr(args, "grid_M", None) is not None:
        cfg.grid_M = args.grid_M
    if getattr(args, "tol", None) is not None:
        cfg.tol_rel = args.tol
    if getattr(args, "max_iter", None) is not None:
        cfg.max_iter = args.max_iter
    if getattr(args, "no_adapt", False):
        cfg.adapt = False
    if args.subcommand in ("rate", "zeros") and getattr(args, "r_grid", None):
        cfg.r_grid = _parse_float_list(args.r_grid)
    if args.subcommand == "invariance":
        pair = _parse_float_list(args.r)
        if len(pair) != 2:
            raise ValueError("--r must give exactly two levels")
        cfg.r_pair = pair
        cfg.r = None
    outdir = getattr(args, "outdir", None) or os.environ.get(_OUTDIR_ENV) or os.getcwd()
    cfg.outdir = Path(outdir)
    cfg.tag = getattr(args, "tag", None) or f"{args.subcommand}"
    # validation before any computation
    if cfg.n is not None and cfg.n < 0:
        raise ValueError("degree must be nonnegative")
    if cfg.r is not None and cfg.r <= 1.0 and args.subcommand in ("cheb", "widom"):
        raise ValueError("level r must exceed 1")
    if cfg.r_grid is not None and any(r <= 1.0 for r in cfg.r_grid):
        raise ValueError("all grid levels must exceed 1")
    if cfg.r_pair is not None and any(r <= 1.0 for r in cfg.r_pair):
        raise ValueError("both levels must exceed 1")
    if cfg.M is not None and cfg.n is not None and cfg.M <= cfg.n:
        raise ValueError("sample size must exceed the degree")
    if cfg.trials < 1:
        raise ValueError("trials must be positive")
    return cfg


def _execute(cfg: RunConfig) -> dict:
    """Run the requested operation; returns {'json':..., 'csv':..., 'svg':...}."""
    out = {}
    if cfg.subcommand == "faber":
        depth = cfg.depth if cfg.depth is not None else cfg.n + 1
        phi = phi_series(cfg.family, depth)
        poly = monic_faber(phi, cfg.n)
        out["json"] = {
            "report": "faber",
            "family": family_to_json_dict(cfg.family),
            "n": cfg.n,
            "c": capacity_leading_coefficient(cfg.family),
            "coeffs": [[float(v.real), float(v.imag)] for v in poly.coeffs],
        }
    elif cfg.subcommand == "cheb":
        M = cfg.M if cfg.M is not None else max(256, 16 * cfg.n)
        sample = sample_level_curve(cfg.family, cfg.r, M)
        sol = solve_chebyshev(sample, cfg.n, cfg.solve_options())
        payload = sol.to_json_dict(n=cfg.n, r=cfg.r)
        payload["report"] = "cheb"
        payload["family"] = family_to_json_dict(cfg.family)
        out["json"] = payload
        out["unconverged"] = not sol.converged
    elif cfg.subcommand == "rate":
        rep = rate_experiment(cfg.family, cfg.n, cfg.r_grid, opts=cfg.experiment_options(), M=cfg.M)
        out["json"] = rep.to_json_dict()
        out["csv"] = rep.to_csv_rows()
        out["svg"] = _svg_loglog(rep.r_values, rep.D)
    elif cfg.subcommand == "invariance":
        rep = invariance_experiment(cfg.family, cfg.n, tuple(cfg.r_pair),
                                    opts=cfg.experiment_options(), M=cfg.M)
        out["json"] = rep.to_json_dict()
    elif cfg.subcommand == "widom":
        factory = None
        user_opts = cfg.experiment_options()
        if user_opts is not None:
            factory = lambda n: user_opts
        rep = widom_experiment(cfg.family, cfg.r, cfg.n_max, opts_factory=factory)
        out["json"] = rep.to_json_dict()
        out["csv"] = rep.to_csv_rows()
    elif cfg.subcommand == "zeros":
        grid = cfg.r_grid if cfg.r_grid else list(np.geomspace(1.05, 8.0, 100))
        opts = SolveOptions(
            tol_rel=cfg.tol_rel if cfg.tol_rel is not None else 5e-4,
            max_iter=cfg.max_iter if cfg.max_iter is not None else 4000,
            adapt=False,
        )
        rep = zero_trajectories(cfg.family, cfg.n, grid, opts=opts, M=cfg.M)
        out["json"] = rep.to_json_dict()
        out["csv"] = rep.to_csv_rows()
        out["svg"] = _svg_document(
            [rep.trajectories[t] for t in range(rep.trajectories.shape[0])],
            list(rep.faber_roots.roots),
        )
    elif cfg.subcommand == "rivlin":
        rep = rivlin_check(cfg.n, cfg.trials, cfg.grid_M, cfg.seed)
        out["json"] = rep.to_json_dict()
    else:
        raise ValueError(f"unknown subcommand {cfg.subcommand!r}")
    return out


def run(argv: Sequence[str] | None = None) -> int:
    """Parse argv, execute, persist artifacts; returns the exit code."""
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
    except SystemExit as e:
        # argparse already printed the message
        return 0 if e.code == 0 else 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    try:
        out = _execute(cfg)
    except (ValueError,) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ExperimentError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    try:
        cfg.outdir.mkdir(parents=True, exist_ok=True)
        stem = cfg.outdir / cfg.tag
        _write_json(stem.with_suffix(".json"), out["json"])
        print(f"wrote {stem.with_suffix('.json')}")
        if "csv" in out:
            _write_csv(stem.with_suffix(".csv"), out["csv"])
            print(f"wrote {stem.with_suffix('.csv')}")
        if "svg" in out:
            stem.with_suffix(".svg").write_text(out["svg"])
            print(f"wrote {stem.with_suffix('.svg')}")
    except OSError as e:
        print(f"error writing outputs: {e}", file=sys.stderr)
        return 1
    if out.get("unconverged"):
        print("solve did not converge within the iteration budget", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
