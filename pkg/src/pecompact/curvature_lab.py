"""Curvature of compactified metrics and the identities relating them.

For a compactification ``bar g_s = rho_s^2 g_+`` everything is computed twice
where possible:

* directly, from the warped-product Ricci tensor of ``bar g_s``;
* from ``rho_s`` alone, through the conformal-change formulas that use the
  Einstein condition on ``g_+`` and the defining equation.

Conventions: ``J = R/(2n)`` in the interior (dimension ``n+1``), Schouten
tensor ``A = (Ric - J g)/(n-1)``, trace-free Ricci ``E = Ric - R g/(n+1)``,
``T = rho^{-1}(1 - |d rho|^2)``, ``Q4 = -Lap J + (n+1)/2 J^2 - 2|A|^2``.
Boundary values are Richardson-extrapolated from five dyadic levels
``rho in {0.005, ..., 0.08}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from . import series as S
from .boundary_asymptotics import richardson_boundary_value
from .compactification_solver import Compactification, JET_ORDER, solve_vs, solve_w
from .model_geometry import RadialMetric
from .radial_operator import RadialProfile, apply_gjms_plus, apply_laplacian_plus, gjms_constants
from .series import Jet
from .warped import WarpedFrame

RHO_MIN = 0.01
RICHARDSON_NODES = (0.005, 0.01, 0.02, 0.04, 0.08)


@dataclass
class InteriorCurvature:
    J: RadialProfile
    T: RadialProfile
    E_norm2: RadialProfile
    A_norm2: RadialProfile
    Q2: RadialProfile
    Q4: RadialProfile
    H: float
    J_formula: RadialProfile
    grad_norm2: RadialProfile
    discrepancy: dict = field(default_factory=dict)


@dataclass
class _Pack:
    """All curvature jets of bar g_s at a set of nodes."""

    r: np.ndarray
    rho_s: Jet
    phi: Jet
    frame: WarpedFrame
    R: Jet
    J: Jet
    A2: Jet
    E2: Jet
    T: Jet
    grad2: Jet
    lap_rho: Jet
    mean_curv: Jet


def _pack(c: Compactification, r, order: int = JET_ORDER) -> _Pack:
    g = c.metric
    r = np.asarray(r, float)
    _, rho_s, phi = c.jets(r, order)
    frame = g.frame(r, order, scale=rho_s)
    return _curv_pack(g.n, r, rho_s, phi, frame)


def _curv_pack(n: int, r, rho_s: Jet, phi: Jet, frame: WarpedFrame) -> _Pack:
    radial, tang = frame.ricci()
    R = radial
    for d, t in zip(frame.dims, tang):
        R = R + t * d
    J = R / (2.0 * n)
    A2 = frame.weighted_norm2((radial - J) / (n - 1), [(t - J) / (n - 1) for t in tang])
    E2 = frame.weighted_norm2(radial - R / (n + 1), [t - R / (n + 1) for t in tang])
    grad2 = frame.grad_norm2(rho_s)
    T = (1.0 - grad2) / rho_s.truncate(grad2.order)
    return _Pack(r, rho_s, phi, frame, R, J, A2, E2, T, grad2, frame.laplacian(rho_s), frame.mean_curvature())


def _nodes(c: Compactification, r=None) -> np.ndarray:
    g = c.metric
    if r is not None:
        return np.asarray(r, float)
    grid = g.grid()
    return grid[g.rho(grid).value > RHO_MIN]


def _prof(r, jet: Jet, label: str) -> RadialProfile:
    return RadialProfile(np.asarray(r, float), jet, label=label)


def j_formula(n: int, s: float, p: _Pack) -> Jet:
    """J from rho_s alone: (2s-n-1)/2 rho_s^{-2}(1 - |d rho_s|^2)."""
    k = p.grad2.order
    return (1.0 - p.grad2) / (p.rho_s.truncate(k) * p.rho_s.truncate(k)) * ((2 * s - n - 1) / 2.0)


def boundary_values(c: Compactification, nodes=RICHARDSON_NODES) -> dict:
    """Richardson-extrapolated boundary traces of J, T, H and |d rho_s|^2."""
    g = c.metric
    out = {}

    def at(name):
        def f(h):
            p = _pack(c, g.r_of_rho(np.asarray(h)), 4)
            return getattr(p, name).value
        return f

    out["J"] = richardson_boundary_value(at("J"), nodes)
    out["T"] = richardson_boundary_value(at("T"), nodes)
    out["H"] = richardson_boundary_value(at("mean_curv"), nodes)
    out["grad2"] = richardson_boundary_value(at("grad2"), nodes)

    def umb(h):
        fr = _pack(c, g.r_of_rho(np.asarray(h)), 4).frame
        rates = [x.value for x in fr.log_rates()]
        return rates[0] - rates[-1]

    # trace-free second fundamental form of the level sets: spread of principal curvatures
    out["umbilicity"] = abs(richardson_boundary_value(umb, nodes))
    return out


def compactified_curvatures(c: Compactification, g: RadialMetric | None = None, r=None,
                            order: int = JET_ORDER) -> InteriorCurvature:
    g = g or c.metric
    r = _nodes(c, r)
    p = _pack(c, r, order)
    n = g.n
    Jf = j_formula(n, c.s, p)
    lapJ = p.frame.laplacian(p.J)
    k = lapJ.order
    Q4 = -lapJ + p.J.truncate(k) * p.J.truncate(k) * ((n + 1) / 2.0) - p.A2.truncate(k) * 2.0
    bv = boundary_values(c)
    disc = {
        "J_direct_vs_formula": float(np.max(np.abs(p.J.value - Jf.value))),
        "grad_direct_vs_radial": float(np.max(np.abs(p.grad2.value - (p.rho_s.deriv(1) / p.rho_s.value) ** 2))),
    }
    return InteriorCurvature(
        J=_prof(r, p.J, "J"), T=_prof(r, p.T, "T"), E_norm2=_prof(r, p.E2, "|E|^2"), A_norm2=_prof(r, p.A2, "|A|^2"),
        Q2=_prof(r, p.J, "Q2"), Q4=_prof(r, Q4, "Q4"), H=bv["H"], J_formula=_prof(r, Jf, "J_formula"),
        grad_norm2=_prof(r, p.grad2, "|d rho_s|^2"), discrepancy=disc,
    )


def q4(c: Compactification, g: RadialMetric | None = None, r=None) -> RadialProfile:
    return compactified_curvatures(c, g, r).Q4


def q4_of_frame(n: int, frame: WarpedFrame) -> tuple[Jet, Jet]:
    """Q4 of an arbitrary warped metric and the size of its largest term."""
    radial, tang = frame.ricci()
    R = radial
    for d, t in zip(frame.dims, tang):
        R = R + t * d
    J = R / (2.0 * n)
    A2 = frame.weighted_norm2((radial - J) / (n - 1), [(t - J) / (n - 1) for t in tang])
    lapJ = frame.laplacian(J)
    k = lapJ.order
    a, b, cc = -lapJ, J.truncate(k) * J.truncate(k) * ((n + 1) / 2.0), A2.truncate(k) * 2.0
    Q = a + b - cc
    size = Jet(np.abs(a.c) + np.abs(b.c) + np.abs(cc.c))
    return Q, size


def _gjms_relative(g: RadialMetric, N: int, u: RadialProfile, target: float = 0.0) -> float:
    """sup |P+_{2N} u - target| relative to the largest intermediate term."""
    consts = gjms_constants(g.n, N)
    cur = RadialProfile(u.grid, u.jet)
    scale = 0.0
    for cj in consts:
        lap = apply_laplacian_plus(g, cur)
        part = cur.jet.truncate(lap.derivative_order) * cj
        scale = max(scale, float(np.max(np.abs(lap.values))), float(np.max(np.abs(part.value))))
        cur = RadialProfile(u.grid, -lap.jet - part)
    scale = max(scale, abs(target))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(cur.values - target)) / scale)


def q2N_vanishing_check(g: RadialMetric, N: int, s: float | None = None, r=None) -> dict:
    """GJMS and Q-curvature residuals at s = n/2 + N - 1/2 (or at a supplied s)."""
    if not 1 <= N <= 2:
        raise ValueError("acceptance scope covers N = 1, 2")
    n = g.n
    s_N = n / 2 + N - 0.5
    s = s_N if s is None else s
    comp = solve_w(g) if s == n else solve_vs(g, s)
    grid = _nodes(comp, r)
    v, rho_s, _ = comp.jets(grid, JET_ORDER)
    out = {"N": N, "s": s, "s_N": s_N, "matched": abs(s - s_N) < 1e-12}
    if comp.is_fg:
        if 2 * N == n + 1:
            Qplus = (-1) ** ((n + 1) // 2) * factorial(n)
            out["Q_plus"] = float(Qplus)
            out["gjms_residual"] = _gjms_relative(g, N, _prof(grid, v, "w"), target=-float(Qplus))
            out["gjms_value"] = float(np.mean(apply_gjms_plus(g, N, _prof(grid, v, "w")).values))
    else:
        u = S.power(rho_s, (n + 1) / 2 - N)
        out["gjms_residual"] = _gjms_relative(g, N, _prof(grid, u, "rho_s^p"))
    p = _pack(comp, grid)
    if N == 1:
        Q, size = p.J, Jet(np.abs(p.J.c) + 1.0)
    else:
        Q, size = q4_of_frame(n, p.frame)
    out["q_sup"] = float(np.max(np.abs(Q.value)))
    out["q_relative"] = float(np.max(np.abs(Q.value)) / max(np.max(size.value), 1e-300))
    return out


def positivity_audit(c: Compactification, g: RadialMetric | None = None, r=None) -> dict:
    g = g or c.metric
    n, s = g.n, c.s
    grid = _nodes(c, r)
    p = _pack(c, grid, 4)
    grad = np.sqrt(p.grad2.value)
    report = {"s": s, "min_J": float(np.min(p.J.value)), "min_T": float(np.min(p.T.value)),
              "sup_abs_J": float(np.max(np.abs(p.J.value))), "max_grad": float(np.max(grad)),
              "Rhat_positive": g.boundary.positive_scalar, "violations": []}
    tol_grad = 1e-8
    if abs(2 * s - n - 1) > 1e-12:
        alt = 1.0 - 2.0 * p.J.value * p.rho_s.value**2 / (2 * s - n - 1)
        report["grad_formula_gap"] = float(np.max(np.abs(alt - p.grad2.value)))
    if s > n / 2 + 1:
        report["regime"] = "J>0"
        if report["min_J"] <= 0:
            report["violations"].append(("J<=0", float(grid[np.argmin(p.J.value)])))
    elif abs(s - (n + 1) / 2) < 1e-12:
        report["regime"] = "T>0,J=0"
        if report["min_T"] <= 0:
            report["violations"].append(("T<=0", float(grid[np.argmin(p.T.value)])))
        if report["sup_abs_J"] >= 1e-8:
            report["violations"].append(("J!=0", float(grid[np.argmax(np.abs(p.J.value))])))
    else:
        report["regime"] = "none"
    if report["max_grad"] > 1 + tol_grad:
        report["violations"].append(("|d rho_s|>1", float(grid[np.argmax(grad)])))
    report["passed"] = not report["violations"]
    return report


def identity_suite(c: Compactification, g: RadialMetric | None = None, r=None) -> list[dict]:
    """Left-minus-right sup residuals of the curvature identities on rho > 0.01."""
    g = g or c.metric
    n, s = g.n, c.s
    grid = _nodes(c, r)
    K = JET_ORDER
    p = _pack(c, grid, K)
    fr = p.frame
    rows = []

    def add(name, jet: Jet):
        vals = np.abs(jet.value)
        i = int(np.argmax(vals))
        rows.append({"identity": name, "sup_residual": float(vals[i]), "location": float(grid[i])})

    def t(j: Jet, k: int) -> Jet:
        return j.truncate(k)

    rho = p.rho_s
    # scalar curvature in terms of the defining function (applies to any compactification)
    k = p.lap_rho.order
    add("R", t(p.J, k) + p.lap_rho / t(rho, k) + (1.0 - t(p.grad2, k)) / t(rho * rho, k) * ((n + 1) / 2.0))
    # same identity for the fixed compactification rho^2 g_+
    rho0 = g.rho(grid, K)
    fr0 = g.frame(grid, K, scale=rho0)
    p0 = _curv_pack(n, grid, rho0, rho0, fr0)
    k0 = p0.lap_rho.order
    add("R_fixed", t(p0.J, k0) + p0.lap_rho / t(rho0, k0) + (1.0 - t(p0.grad2, k0)) / t(rho0 * rho0, k0) * ((n + 1) / 2.0))
    add("bdf", p.lap_rho + t(p.T, k) * s)
    add("J", t(p.J, k) - t(j_formula(n, s, p), k))
    lapT = fr.laplacian(p.T)
    kT = lapT.order
    dJ = fr.inner(rho, p.J)
    add("S4", lapT + t(p.J * p.T, kT) + t(p.A2 * rho, kT) * 2.0 - t(dJ, kT) * 2.0)
    if abs(2 * s - n - 1) < 1e-12:
        add("T2", lapT + t(p.E2 * rho, kT) * (2.0 / (n - 1) ** 2))
    else:
        lapJ = fr.laplacian(p.J)
        kJ = lapJ.order
        lhs = (lapJ + t(dJ / rho, kJ) * (3 + n - 2 * s)) / (2 * s - n - 1)
        add("J_positivity_equation", lhs + t(p.A2, kJ) - t(p.J * p.J, kJ) * ((n + 1) / (2 * s - n - 1) ** 2))
    add("conformal_scalar", conformal_scalar_residual(c, g, grid, p0, p))
    return rows


def conformal_scalar_residual(c: Compactification, g: RadialMetric, grid, p0: _Pack, p: _Pack) -> Jet:
    """Scalar curvature of bar g_s from that of bar g = rho^2 g_+ and phi_s.

    With ``bar g_s = e^{2f} bar g`` in dimension n+1,
    ``e^{2f} R_s = R - 2n Lap f - n(n-1)|df|^2``; for ``s != n``
    ``f = log(phi_s)/(n-s)`` and for ``s = n`` ``f = phi = w - log rho``.
    """
    n, s = g.n, c.s
    fr0 = p0.frame
    phi = p.phi.truncate(JET_ORDER)
    f = phi if c.is_fg else S.log(phi) / (n - s)
    lap_f = fr0.laplacian(f)
    k = lap_f.order
    lhs = p0.R.truncate(k) - lap_f * (2.0 * n) - fr0.grad_norm2(f).truncate(k) * (n * (n - 1))
    rhs = S.exp(f.truncate(k) * 2.0) * p.R.truncate(k)
    return lhs - rhs


def conformal_scalar_displayed_form(c: Compactification, g: RadialMetric | None = None, r=None) -> float:
    """Residual of the phi-form with coefficients 2n/(n-s) and n(n-3)/(n-s) (diagnostic)."""
    g = g or c.metric
    n, s = g.n, c.s
    grid = _nodes(c, r)
    p = _pack(c, grid)
    rho0 = g.rho(grid, JET_ORDER)
    fr0 = g.frame(grid, JET_ORDER, scale=rho0)
    p0 = _curv_pack(n, grid, rho0, rho0, fr0)
    phi = p.phi
    lap = fr0.laplacian(phi)
    k = lap.order
    lhs = -lap / phi.truncate(k) * (2 * n / (n - s)) - fr0.grad_norm2(phi).truncate(k) / (phi * phi).truncate(k) * (n * (n - 3) / (n - s)) + p0.R.truncate(k)
    rhs = S.power(phi.truncate(k), 2.0 / (n - s)) * p.R.truncate(k)
    return float(np.max(np.abs((lhs - rhs).value)))


def round_cylinder_q4(n: int, r=None) -> tuple[float, float]:
    """Q4 of dr^2 + round S^n through the warped route, and the product-metric value.

    For the product, Ric = 0 + (n-1) g_S, J = (n-1)/2, A = diag(-1/2, 1/2) and
    Q4 = (n+1)((n-1)^2 - 4)/8.
    """
    from .warped import WarpFactor

    r = np.linspace(0.5, 2.0, 7) if r is None else np.asarray(r, float)
    one = Jet.constant(1.0, 4, r.shape)
    frame = WarpedFrame(one, [one], (WarpFactor(n, 1.0, "S^n"),))
    Q, _ = q4_of_frame(n, frame)
    return float(np.max(np.abs(Q.value - (n + 1) * ((n - 1) ** 2 - 4) / 8))), (n + 1) * ((n - 1) ** 2 - 4) / 8
