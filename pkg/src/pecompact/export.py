"""CSV and JSON writers for solver, curvature, norm and extension outputs."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .boundary_asymptotics import BoundarySeries, SeriesStopError


def _writer(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = open(path, "w", newline="")
    return fh, csv.writer(fh)


def write_rows(path, header, rows) -> Path:
    fh, w = _writer(path)
    with fh:
        w.writerow(header)
        w.writerows(rows)
    return Path(path)


def write_series_csv(series: BoundarySeries, path) -> Path:
    return write_rows(path, ["exponent", "coefficient", "fit_residual"], series.rows())


def write_profile_csv(profile, path) -> Path:
    return write_rows(path, ["r", "value"], profile.rows())


def write_identity_csv(rows: list[dict], path) -> Path:
    return write_rows(path, ["identity", "sup_residual", "location"],
                      [(r["identity"], f"{r['sup_residual']:.6e}", f"{r['location']:.6g}") for r in rows])


def write_holder_csv(estimate, path) -> Path:
    return write_rows(path, ["collar_index", "local_norm"], estimate.rows())


def write_strip_csv(F, path) -> Path:
    """Header row of y-nodes (after an ``x`` label), one row per x-node."""
    return write_rows(path, ["x", *[f"{y:.10g}" for y in F.y]], F.rows())


def read_strip_csv(path):
    from .extension_operator import StripFunction

    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path) as fh:
        header = next(csv.reader(fh))
    y = np.array([float(v) for v in header[1:]])
    return StripFunction(data[:, 0], y, data[:, 1:])


def read_boundary_csv(path, k: int = 0, alpha: float = 1.0):
    """Two columns ``y, f`` (header optional) on a uniform grid over [-1, 1]."""
    from .extension_operator import BoundaryFunction

    with open(path) as fh:
        first = fh.readline()
    skip = 0 if _numeric(first) else 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    return BoundaryFunction(data[:, 0], data[:, 1], k, alpha)


def _numeric(line: str) -> bool:
    try:
        [float(v) for v in line.strip().split(",")]
        return True
    except ValueError:
        return False


def write_report_csv(report, path) -> Path:
    return write_rows(path, ["member_id", "quantity", "value", "bound_status"],
                      [(r["member_id"], r["quantity"], f"{r['value']:.10g}", r["bound_status"]) for r in report.rows])


def compactification_json(comp, include_spectral: bool = True) -> dict:
    from .compactification_solver import spectral_residual

    g = comp.metric
    grid = comp.rho_s.grid
    out = {
        "model": g.model,
        "n": g.n,
        "s": comp.s,
        "kind": "fefferman_graham" if comp.is_fg else "adapted",
        "params": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v) for k, v in g.params.items()},
        "grid": grid.tolist(),
        "v": comp.v_or_w.values.tolist(),
        "rho_s": comp.rho_s.values.tolist(),
        "phi_s": comp.phi_s.values.tolist(),
        "residual_report": dict(comp.solver_report),
    }
    if include_spectral:
        out["residual_report"]["spectral_residual"] = spectral_residual(comp)
    try:
        ser = comp.series(variable="x")
        out["series"] = {"variable": ser.variable, "exponents": ser.exponents.tolist(),
                         "coefficients": list(map(float, ser.coeffs)), "truncation_order": ser.truncation_order,
                         "table": ser.table()}
    except (SeriesStopError, ValueError) as exc:
        out["series"] = {"error": str(exc)}
    return out


def write_json(data: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1, default=float))
    return path
