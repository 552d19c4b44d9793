"""Acceptance criteria 1-12, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import pecompact.series as S
from pecompact import make_ads_schwarzschild, make_hyperbolic, solve
from pecompact.boundary_asymptotics import build_w_series, extract_expansion
from pecompact.compactification_solver import DEFAULT_TOL, regularity_threshold_probe, s_to_n_limit_check
from pecompact.curvature_lab import (
    boundary_values,
    compactified_curvatures,
    identity_suite,
    positivity_audit,
    q2N_vanishing_check,
)
from pecompact.extension_operator import (
    M2,
    BoundaryFunction,
    bump,
    cutoff,
    extension_expansion,
    extension_norm_ratio,
    mollify_extend,
    plateau,
    remainder_slope,
)
from pecompact.model_geometry import with_defining_function
from pecompact.radial_operator import RadialProfile, apply_gjms_plus

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct execution outside pytest
    ACCEPTANCE_LINES = []


def report(num: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_flat_compactification():
    t0 = time.perf_counter()
    g = make_hyperbolic(3)
    c = solve(g, 2.0)
    r = g.grid()
    exact = 1.0 / (1.0 + np.cosh(r))
    err = float(np.max(np.abs(c.rho_s_at(r) / exact - 1.0)))
    curv = compactified_curvatures(c)
    t_err = float(np.max(np.abs(curv.T.values - 2.0)))
    bv = boundary_values(c)
    h_err = abs(bv["H"] - 3.0)
    t_h_gap = abs(bv["T"] - 2.0 / 3.0 * bv["H"])
    dt = time.perf_counter() - t0
    ok = err < 1e-8 and t_err < 1e-8 and h_err < 1e-4 and t_h_gap < 1e-4 and dt < 5.0
    report(1, ok, f"rho_s rel err {err:.2e}, |T-2| {t_err:.2e}, |H-3| {h_err:.2e}, "
                  f"|T-(2/n)H| {t_h_gap:.2e}, {dt:.2f}s")


def test_criterion_02_boundary_J_trace():
    t0 = time.perf_counter()
    g = make_hyperbolic(3)
    errs = []
    for s in (3.0, 3.5, 4.0):
        J = boundary_values(solve(g, s))["J"]
        target = (2 * s - 3 - 1) / (2 * s - 3 - 2) * 1.5
        errs.append(abs(J / target - 1.0))
    dt = time.perf_counter() - t0
    ok = max(errs) < 1e-3 and dt < 30.0
    report(2, ok, "rel errors " + ", ".join(f"{e:.1e}" for e in errs) + f", {dt:.2f}s")


def test_criterion_03_fg_expansion_coefficient():
    g = make_hyperbolic(3)
    ser = build_w_series(g, 2, "x")
    recursion = ser.coefficient(2.0)  # log(rho_F / x) = c x^2 + ..., so rho_F = x + c x^3 + ...
    c = solve(g, 3.0)
    fit = extract_expansion(lambda x: c.rho_s_at(-np.log(x / g.x_scale)) / x - 1.0, (2.0, 3.0, 4.0, 5.0), x0=0.1)
    fitted = fit.coefficient(0.0)
    ok = abs(recursion + 0.75) < 1e-3 and abs(fitted + 0.75) < 1e-3
    report(3, ok, f"recursion {recursion:.6f}, fit from solution {fitted:.6f}")


def test_criterion_04_q_curvature_vanishing():
    g = make_hyperbolic(3)
    n1 = q2N_vanishing_check(g, 1)
    n2 = q2N_vanishing_check(g, 2)
    neg1 = q2N_vanishing_check(g, 1, s=2.6)
    neg2 = q2N_vanishing_check(g, 2, s=2.6)
    ok = (n1["gjms_residual"] < 1e-8 and n2["q_relative"] < 1e-6 and n2["q_sup"] < 1e-6
          and neg1["gjms_residual"] > 1e-2 and neg2["q_relative"] > 1e-2)
    report(4, ok, f"P2 residual {n1['gjms_residual']:.1e}, Q4 sup {n2['q_sup']:.1e}; "
                  f"controls {neg1['gjms_residual']:.2f}, {neg2['q_relative']:.2f}")


def test_criterion_05_gjms_constant():
    g = make_hyperbolic(3)
    c = solve(g, 3.0)
    r = g.grid()
    r = r[g.rho(r).value > 0.01]
    w = RadialProfile(r, c.jets(r, 8)[0])
    P = apply_gjms_plus(g, 2, w).values
    err = float(np.max(np.abs(P + 6.0)))
    # independent derivatives from the dense solution; four differentiations cost ~1e-6
    rs = np.linspace(0.5, 12.0, 25)
    ws = RadialProfile.from_callable_spectral(rs, lambda t: c.jets(t, 1)[0].value, 4, halfwidth=0.6)
    err_sp = float(np.max(np.abs(apply_gjms_plus(g, 2, ws).values + 6.0)))
    report(5, err < 1e-8 and err_sp < 1e-4, f"P4+ w = -6 with sup error {err:.1e} (spectral cross-check {err_sp:.1e})")


def test_criterion_06_continuity_in_s():
    rows = s_to_n_limit_check(make_hyperbolic(3), [2.8, 2.9, 2.95])
    ratios = [row["ratio"] for row in rows[1:]]
    dec = all(a["sup_diff"] > b["sup_diff"] for a, b in zip(rows, rows[1:]))
    ok = dec and all(abs(q - 2.0) <= 0.3 for q in ratios)
    report(6, ok, "sup diffs " + ", ".join(f"{row['sup_diff']:.2e}" for row in rows)
                  + "; ratios " + ", ".join(f"{q:.3f}" for q in ratios))


def test_criterion_07_regularity_threshold():
    g = make_hyperbolic(3)
    frac = regularity_threshold_probe(g, 2.75)
    odd = regularity_threshold_probe(g, 2.0)
    ok = abs(frac.exponent - 0.5) <= 0.05 and frac.obstruction and not odd.obstruction
    report(7, ok, f"s=2.75 exponent {frac.exponent:.4f}; s=2 obstruction={odd.obstruction}")


IDENTITY_S = (2.0, 2.6, 3.0, 3.5, 4.0)


def test_criterion_08_identity_suite():
    worst, where = 0.0, ""
    names = set()
    for model, g in (("hyperbolic", make_hyperbolic(3)), ("ads m=0.2", make_ads_schwarzschild(3, 0.2))):
        for s in IDENTITY_S:
            for row in identity_suite(solve(g, s)):
                names.add(row["identity"])
                if not row["sup_residual"] <= worst:
                    worst, where = row["sup_residual"], f"{row['identity']} ({model}, s={s:g})"
    required = {"R", "bdf", "J", "S4", "T2", "conformal_scalar"}
    ok = worst < 1e-6 and required <= names
    report(8, ok, f"worst residual {worst:.1e} at {where}; identities {sorted(names)}")


def test_criterion_09_positivity():
    bad, n_ok = [], 0
    worst_grad = 0.0
    for g in (make_hyperbolic(3), make_ads_schwarzschild(3, 0.2), make_ads_schwarzschild(3, 0.5)):
        assert g.boundary.positive_scalar
        for s in (2.0, 2.6, 3.0, 3.5, 4.0):
            aud = positivity_audit(solve(g, s))
            worst_grad = max(worst_grad, aud["max_grad"])
            expected = "T>0,J=0" if s == 2.0 else "J>0"
            if aud["passed"] and aud["regime"] == expected:
                n_ok += 1
            else:
                bad.append((g.model, s, aud["violations"]))
    report(9, not bad, f"{n_ok} audits passed, max |d rho_s| {worst_grad:.10f}, failures {bad}")


def _random_bump(rng):
    centers = rng.uniform(-0.4, 0.4, 3)
    widths = rng.uniform(0.08, 0.25, 3)
    amps = rng.normal(size=3)
    return lambda y: plateau(y) * sum(a * np.exp(-((y - c) / w) ** 2) for a, c, w in zip(amps, centers, widths))


def test_criterion_10_extension_operator():
    y_in = lambda F, margin: np.abs(F.y) <= 0.5 - margin  # noqa: E731
    one = BoundaryFunction.from_callable(plateau)
    F1 = mollify_extend(one)
    lin = BoundaryFunction.from_callable(lambda y: y * plateau(y))
    Fl = mollify_extend(lin)
    quad = BoundaryFunction.from_callable(lambda y: y**2 * plateau(y))
    Fq = mollify_extend(quad)
    chi = cutoff(F1.x)[:, None]
    mask = np.abs(F1.y[None, :]) <= 0.5 - F1.x[:, None]
    e_plateau = float(np.max(np.abs(F1.values - chi)[mask]))
    e_lin = float(np.max(np.abs(Fl.values - chi * Fl.y[None, :])[mask]))
    e_quad = float(np.max(np.abs(Fq.values - chi * (Fq.y[None, :] ** 2 + M2 * Fq.x[:, None] ** 2))[mask]))
    coef = extension_expansion(Fq, 2, 0)
    sel = y_in(Fq, 0.3)
    e_f2 = float(np.max(np.abs(coef[2][sel] - M2)))

    y0 = 0.1
    kink = BoundaryFunction.from_callable(lambda y: np.abs(y - y0) ** 2.5 * plateau(y), k=2, alpha=0.5)
    slope = remainder_slope(kink, 2, 0, y0)[0]

    rng = np.random.default_rng(7)
    fs = [BoundaryFunction.from_callable(_random_bump(rng), ny=401, k=1, alpha=0.5) for _ in range(20)]
    coarse = np.array([extension_norm_ratio(f, 1, 1, 0.5, nx=97) for f in fs])
    fs_fine = [BoundaryFunction.from_callable(f.func, ny=801, k=1, alpha=0.5) for f in fs]
    fine = np.array([extension_norm_ratio(f, 1, 1, 0.5, nx=193) for f in fs_fine])
    change = abs(fine.max() / coarse.max() - 1.0)
    spread = coarse.max() / coarse.min()

    ok = (e_plateau < 1e-12 and e_lin < 1e-12 and e_quad < 1e-10 and e_f2 < 1e-8
          and abs(slope - 2.5) <= 0.1 and change < 0.25 and spread < 50)
    report(10, ok, f"plateau {e_plateau:.0e}, linear {e_lin:.0e}, quadratic {e_quad:.0e}, f2-m2 {e_f2:.0e}; "
                   f"remainder slope {slope:.3f}; norm ratio max {coarse.max():.3f} -> {fine.max():.3f} "
                   f"({100 * change:.1f}% change), spread {spread:.1f}")


def _run_cli(args):
    return subprocess.run([sys.executable, "-m", "pecompact", *args], capture_output=True, text=True)


def test_criterion_11_family_harness(tmp_path):
    from pecompact.family_harness import FamilySpec, corollary_roundtrip

    t0 = time.perf_counter()
    fam = tmp_path / "ads.json"
    fam.write_text(json.dumps({"model": "ads_schw", "params": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], "n": 3, "workers": 4}))
    codes = {}
    for s in (2.0, 3.0, 3.5):
        for d in ("a", "b"):
            out = tmp_path / f"report_{d}_{s:g}.csv"
            res = _run_cli(["sweep", "--family", str(fam), "--direction", d, "--s", str(s), "--out", str(out), "--no-plot"])
            codes[(d, s)] = res.returncode
    spec = FamilySpec(workers=4)
    fwd = corollary_roundtrip(spec, 1, 2)
    rev = corollary_roundtrip(spec, 2, 1)
    dt = time.perf_counter() - t0
    ok = all(v == 0 for v in codes.values()) and fwd["passed"] and rev["passed"] and dt < 300
    report(11, ok, f"exit codes {sorted(set(codes.values()))} over 6 sweeps; corollary (1,2) {fwd['passed']}, "
                   f"(2,1) {rev['passed']}; {dt:.1f}s")


def test_criterion_12_uniqueness_surrogate():
    worst = 0.0
    g = make_hyperbolic(3)
    g2 = with_defining_function(g, lambda r: 1.0 / S.cosh(r))
    A = make_ads_schwarzschild(3, 0.2)
    C = A.params["C"]
    A2 = with_defining_function(A, lambda r: S.exp(-r) * (1.0 + S.exp(-2.0 * r)) / C)
    for a, b in ((g, g2), (A, A2)):
        r = a.grid()
        for s in (2.0, 2.75, 3.0, 3.5):
            d = np.max(np.abs(solve(a, s).rho_s_at(r) - solve(b, s).rho_s_at(r)))
            worst = max(worst, float(d))
    report(12, worst < 10 * DEFAULT_TOL, f"sup |rho_s - rho_s'| {worst:.1e} (bound {10 * DEFAULT_TOL:.0e})")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
