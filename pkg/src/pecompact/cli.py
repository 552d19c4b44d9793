"""Command-line entry point: ``pecompact {solve,verify,extend,holder,sweep}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import export, plots
from .config import load_config

log = logging.getLogger("pecompact")


def _metric_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value or JSON file with model, n, m, beta, r_max, grid_size")
    p.add_argument("--model", choices=["hyperbolic", "ads_schw"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--grid-size", dest="grid_size", type=int)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--no-plot", action="store_true", help="skip the PNG written next to the output")


def _metric(a):
    cfg = load_config(a.config, model=a.model, n=a.n, m=a.m, beta=a.beta, r_max=a.r_max, grid_size=a.grid_size)
    return cfg.build()


def cmd_solve(a) -> int:
    from .compactification_solver import residual_profile, solve

    comp = solve(_metric(a), a.s, tol=a.tol)
    data = export.compactification_json(comp)
    export.write_json(data, a.out)
    res = residual_profile(comp, spectral=True)
    if a.series_csv:
        export.write_series_csv(comp.series(variable="x"), a.series_csv)
    if a.residual_csv:
        export.write_profile_csv(res, a.residual_csv)
    if not a.no_plot:
        plots.plot_compactification(comp, plots.figure_path(a.out), res)
    if "table" in data["series"]:
        print(data["series"]["table"])
    print(f"defining residual {data['residual_report']['defining_residual']:.3e}, "
          f"spectral residual {data['residual_report']['spectral_residual']:.3e}")
    return 0


def cmd_verify(a) -> int:
    from .compactification_solver import solve
    from .curvature_lab import identity_suite

    comp = solve(_metric(a), a.s)
    rows = identity_suite(comp)
    if a.identity != "all":
        rows = [r for r in rows if r["identity"] == a.identity]
        if not rows:
            raise SystemExit(f"identity {a.identity!r} is not checked at s={a.s:g}")
    if a.out:
        export.write_identity_csv(rows, a.out)
        if not a.no_plot:
            plots.plot_identities(rows, plots.figure_path(a.out))
    else:
        print("identity,sup_residual,location")
        for r in rows:
            print(f"{r['identity']},{r['sup_residual']:.6e},{r['location']:.6g}")
    bad = [r for r in rows if not r["sup_residual"] < a.tol]
    return 1 if bad else 0


def cmd_extend(a) -> int:
    from .extension_operator import mollify_extend

    f = export.read_boundary_csv(a.input, a.k, a.alpha)
    F = mollify_extend(f, a.k, a.l, nx=a.nx)
    export.write_strip_csv(F, a.out)
    if not a.no_plot:
        plots.plot_strip(F, plots.figure_path(a.out))
    return 0


def cmd_holder(a) -> int:
    from .compactification_solver import solve
    from .holder_norms import dyadic_grid, profile_in_rho, weighted_norm

    g = _metric(a)
    comp = solve(g, a.s)
    top = float(g.rho(np.array([g.r_min])).value[0])
    j_min = int(np.ceil(-np.log2(top))) + 1
    nodes = dyadic_grid(a.j_max, a.per_collar, j_min)
    if a.quantity == "rho_s":
        fn = lambda r, K: comp.jets(r, K)[1]  # noqa: E731
    else:
        fn = lambda r, K: comp.jets(r, K)[1] / g.rho(r, K)  # noqa: E731
    p = profile_in_rho(g, nodes, fn, a.l + 2, a.quantity)
    est = weighted_norm(p, a.l, a.beta_holder, a.delta)
    export.write_holder_csv(est, a.out)
    if not a.no_plot:
        plots.plot_holder(est, plots.figure_path(a.out))
    print(f"weighted norm estimate {est.value:.6g}, collar growth {est.growth_rate():.3f}")
    return 0


def cmd_sweep(a) -> int:
    from .family_harness import FamilySpec, run_direction_a, run_direction_b

    spec = FamilySpec.from_json(a.family)
    if a.workers:
        spec.workers = a.workers
    rep = (run_direction_a if a.direction == "a" else run_direction_b)(spec, a.s)
    export.write_report_csv(rep, a.out)
    if not a.no_plot:
        plots.plot_report(rep, plots.figure_path(a.out))
    for f in rep.failures():
        print(f"FAIL {f['name']} member={f['member']} value={f['value']} bound={f['bound']}", file=sys.stderr)
    print(f"direction {a.direction} s={a.s:g}: {'all bounds hold' if rep.passed else 'bound violated'}")
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pecompact", description="Radial Poincare-Einstein compactification lab")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve for the adapted defining function rho_s")
    _metric_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True, help="JSON output")
    p.add_argument("--series-csv", help="boundary series CSV (exponent, coefficient, fit_residual)")
    p.add_argument("--residual-csv", help="spectral residual profile CSV (r, value)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="curvature identity residuals")
    _metric_args(p)
    p.add_argument("--identity", default="all")
    p.add_argument("--tol", type=float, default=1e-6, help="exit 1 if any residual reaches this")
    p.add_argument("--out", help="CSV output (stdout when omitted)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extend", help="mollifier extension of boundary data to the strip")
    p.add_argument("--input", required=True, help="CSV with columns y,f on a uniform grid over [-1, 1]")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--nx", type=int, default=97)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("holder", help="dyadic-collar weighted Hoelder estimate of rho_s or rho_s/rho")
    _metric_args(p)
    p.add_argument("--quantity", choices=["rho_s", "ratio"], default="ratio")
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--beta-holder", dest="beta_holder", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--j-max", dest="j_max", type=int, default=8)
    p.add_argument("--per-collar", dest="per_collar", type=int, default=65)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_holder)

    p = sub.add_parser("sweep", help="uniform-bound sweep over a metric family")
    p.add_argument("--family", required=True, help="JSON family description")
    p.add_argument("--direction", choices=["a", "b"], required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return a.func(a)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
