"""Global solution of the defining equations on a radial model.

Adapted compactification (``n/2 < s``, ``s != n``)::

    -Delta_+ v - s(n - s) v = 0,   v = rho^{n-s}(1 + o(1)),   rho_s = v^{1/(n-s)}

Fefferman-Graham compactification::

    -Delta_+ w = n,   w = log rho + o(1),   rho_F = e^w

Both are linear radial ODEs.  The solution regular at the centre is integrated
outward in the scaled unknown ``U = v e^{(n-s) r}`` which tends to a constant
plus ``B e^{-(2s-n) r}``; the constant ``A`` is read off at ``r_max`` from
``U + U'/(2s - n)``, which removes the ``x^s`` admixture exactly up to
``O(e^{-2 r_max})``.  Normalization uses ``c = lim rho e^r`` obtained by
Richardson extrapolation of the fixed defining function itself.

Derivatives at nodes come from the Taylor recurrence of the ODE, seeded with
the integrator's value and slope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import curve_fit

from . import series as S
from .boundary_asymptotics import build_phi_series, max_phi_order
from .model_geometry import BoundaryData, RadialMetric
from .radial_operator import RadialProfile
from .series import Jet

DEFAULT_TOL = 1e-10
JET_ORDER = 8
R0 = 1e-4


class SolverError(RuntimeError):
    pass


class SpectrumViolation(SolverError):
    """v_s changed sign or the two radial solutions became dependent."""


def _boundary_limit(f, r_hi: float) -> float:
    """lim f(r) as r -> inf for f = L + a e^{-r} + b e^{-2r} + ..."""
    r = np.array([r_hi - 2.0, r_hi - 1.0, r_hi])
    sig = np.exp(-r)
    coef = np.polynomial.polynomial.polyfit(sig / sig[-1], f(r), 2)
    return float(coef[0])


def _taylor_linear(a0, a1, lam: Jet, shift: float, forcing: float, order: int) -> Jet:
    """Jet of the solution of u'' + lambda' u' + shift u = forcing through (a0, a1)."""
    p = lam.c
    c = np.zeros((order + 1,) + np.shape(a0))
    c[0], c[1] = a0, a1
    for k in range(order - 1):
        acc = -shift * c[k] + (forcing if k == 0 else 0.0)
        for i in range(k + 1):
            acc = acc - p[i] * (k - i + 1) * c[k - i + 1]
        c[k + 2] = acc / ((k + 2) * (k + 1))
    return Jet(c)


@dataclass
class _State:
    kind: str  # "v" or "w"
    sol: object
    n: int
    s: float
    mu: float
    norm: float  # v: c^mu / A ; w: additive constant
    c: float
    A: float = 1.0

    def base(self, r):
        y = self.sol.sol(np.asarray(r, float))
        return y[0], y[1]


@dataclass
class Compactification:
    s: float
    metric: RadialMetric
    v_or_w: RadialProfile
    rho_s: RadialProfile
    phi_s: RadialProfile
    boundary: BoundaryData
    solver_report: dict
    state: _State = field(repr=False)

    @property
    def is_fg(self) -> bool:
        return self.state.kind == "w"

    @property
    def n(self) -> int:
        return self.metric.n

    # evaluation ---------------------------------------------------------
    def jets(self, r, order: int = JET_ORDER) -> tuple[Jet, Jet, Jet]:
        """(v_s or w, rho_s, phi_s) jets at arbitrary nodes ``r``."""
        g, st = self.metric, self.state
        r = np.asarray(r, float)
        lam = g.lambda_prime(r, max(order - 2, 0))
        y0, y1 = st.base(r)
        rho = g.rho(r, order)
        if st.kind == "v":
            e = np.exp(-st.mu * r) * st.norm
            v0, v1 = e * y0, e * (y1 - st.mu * y0)
            v = _taylor_linear(v0, v1, lam, st.s * (st.n - st.s), 0.0, order)
            rho_s = S.exp(S.log(v) / st.mu)
            phi = v * S.power(rho, -st.mu)
            return v, rho_s, phi
        w = _taylor_linear(y0 + st.norm, y1, lam, 0.0, -float(st.n), order)
        return w, S.exp(w), w - S.log(rho)

    def rho_s_at(self, r) -> np.ndarray:
        return self.jets(r, 1)[1].value

    def phi_at(self, r) -> np.ndarray:
        return self.jets(r, 1)[2].value

    def v_at(self, r) -> np.ndarray:
        return self.jets(r, 1)[0].value

    def profiles(self, r, order: int = JET_ORDER) -> tuple[RadialProfile, RadialProfile, RadialProfile]:
        v, rs, ph = self.jets(r, order)
        r = np.asarray(r, float)
        return (RadialProfile(r, v, label="w" if self.is_fg else "v_s"),
                RadialProfile(r, rs, label="rho_s"), RadialProfile(r, ph, label="phi_s"))

    def series(self, order: int | None = None, variable: str = "rho"):
        if self.is_fg:
            from .boundary_asymptotics import build_w_series

            return build_w_series(self.metric, self.n - 1 if order is None else order, variable)
        order = max_phi_order(self.n, self.s) if order is None else order
        return build_phi_series(self.metric, self.s, order, variable)


def _center_start(g: RadialMetric, shift: float, forcing: float):
    a = g.center_dim
    c2 = (forcing - shift) / (2.0 * (a + 1))  # u = 1 + c2 r^2 (v) or c2 r^2 (w)
    return c2


def _integrate(rhs, y0, R, rtol):
    sol = solve_ivp(rhs, (R0, R), y0, method="DOP853", rtol=rtol, atol=1e-16, dense_output=True)
    if not sol.success:
        raise SolverError(sol.message)
    return sol


def solve_vs(g: RadialMetric, s: float, tol: float = DEFAULT_TOL, rtol: float = 1e-13,
             order: int = JET_ORDER) -> Compactification:
    n = g.n
    if s <= n / 2:
        raise ValueError(f"s must exceed n/2 = {n / 2}")
    if s == n:
        raise ValueError("s = n is the Fefferman-Graham case: use solve_w")
    if tol <= 0:
        raise ValueError("tol must be positive")
    mu = n - s
    two_gamma = 2 * s - n
    lam_fast = lambda r: float(g.lambda_prime(r, 0).value)

    def rhs(r, y):
        lp = lam_fast(r)
        return [y[1], -(lp - 2 * mu) * y[1] - mu * (n - lp) * y[0]]

    c2 = _center_start(g, s * (n - s), 0.0)
    v0, v1 = 1.0 + c2 * R0**2, 2.0 * c2 * R0
    e0 = np.exp(mu * R0)
    R = g.r_max
    sol = _integrate(rhs, [e0 * v0, e0 * (v1 + mu * v0)], R, rtol)
    UR, dUR = sol.sol(R)
    A = UR + dUR / two_gamma
    scale = np.max(np.abs(sol.y[0]))
    if not np.isfinite(A) or abs(A) < 1e-10 * scale:
        raise SpectrumViolation(f"boundary coefficient vanishes (A = {A:.3e}): s(n-s) hits the spectrum")
    c = _boundary_limit(lambda r: g.rho(r).value * np.exp(r), R)
    norm = c**mu / A
    state = _State("v", sol, n, s, mu, norm, c, A)
    comp = _package(g, s, state, order, tol)
    if np.min(comp.v_or_w.values) <= 0:
        bad = comp.v_or_w.grid[np.argmin(comp.v_or_w.values)]
        raise SpectrumViolation(f"v_s is not positive (minimum at r = {bad:.4g})")
    comp.solver_report.update({"A": float(A), "x_s_admixture_rate": float(dUR), "normalization": float(norm)})
    return comp


def solve_w(g: RadialMetric, tol: float = DEFAULT_TOL, rtol: float = 1e-13, order: int = JET_ORDER) -> Compactification:
    n = g.n
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam_fast = lambda r: float(g.lambda_prime(r, 0).value)

    def rhs(r, y):
        return [y[1], -n - lam_fast(r) * y[1]]

    c2 = _center_start(g, 0.0, -float(n))
    R = g.r_max
    sol = _integrate(rhs, [c2 * R0**2, 2 * c2 * R0], R, rtol)
    WR = sol.sol(R)[0]
    c = _boundary_limit(lambda r: g.rho(r).value * np.exp(r), R)
    if not np.isfinite(c) or c <= 0:
        raise SolverError("normalization failure: rho e^r does not converge")
    K = np.log(c) - (WR + R)
    state = _State("w", sol, n, float(n), 0.0, float(K), c)
    comp = _package(g, float(n), state, order, tol)
    comp.solver_report.update({"additive_constant": float(K)})
    return comp


def _package(g: RadialMetric, s: float, state: _State, order: int, tol: float) -> Compactification:
    grid = g.grid()
    comp = Compactification(s, g, None, None, None, g.boundary, {}, state)  # type: ignore[arg-type]
    v, rs, ph = comp.profiles(grid, order)
    comp.v_or_w, comp.rho_s, comp.phi_s = v, rs, ph
    comp.solver_report = {"tol": tol, "rho_scale": state.c, "r_max": g.r_max, "grid_size": grid.size,
                          "defining_residual": defining_residual(comp)}
    return comp


def solve(g: RadialMetric, s: float, tol: float = DEFAULT_TOL, **kw) -> Compactification:
    return solve_w(g, tol, **kw) if s == g.n else solve_vs(g, s, tol, **kw)


def residual_profile(comp: Compactification, r=None, spectral: bool = False) -> RadialProfile:
    """Pointwise relative residual of the defining equation (absolute/n in the log case).

    By default derivatives come from the node jets, which satisfy the recursion
    by construction; ``spectral`` recomputes them by local Chebyshev
    interpolation of the dense solution, an independent check.
    """
    from .radial_operator import apply_laplacian_plus

    g = comp.metric
    if spectral:
        r = np.linspace(0.5, min(g.r_max - 1.0, 12.0), 25) if r is None else np.asarray(r, float)
        prof = RadialProfile.from_callable_spectral(r, lambda t: comp.jets(t, 1)[0].value, 2)
    else:
        prof = comp.v_or_w if r is None else comp.profiles(r)[0]
    lap = apply_laplacian_plus(g, prof)
    if comp.is_fg:
        res = np.abs(-lap.values - g.n) / g.n
    else:
        shift = comp.s * (g.n - comp.s)
        vals = prof.values[: lap.values.size]
        res = np.abs(lap.values + shift * vals) / (np.abs(lap.values) + abs(shift) * np.abs(vals))
    return RadialProfile(prof.grid[: res.size], Jet(res[np.newaxis]), label="defining_residual")


def defining_residual(comp: Compactification, r=None) -> float:
    """Relative sup residual of the defining equation using jets at the nodes."""
    return float(np.max(residual_profile(comp, r).values))


def spectral_residual(comp: Compactification, r=None) -> float:
    """Same residual with derivatives from local Chebyshev interpolation of the dense solution."""
    return float(np.max(residual_profile(comp, r, spectral=True).values))


def matching_study(g: RadialMetric, s: float, shift: float = 2.0) -> float:
    """sup |rho_s| change when r_max moves by ``shift`` (relative, on the shorter domain)."""
    from dataclasses import replace

    a = solve(g, s)
    b = solve(replace(g, r_max=g.r_max - shift), s)
    r = np.linspace(g.r_min, g.r_max - shift - 0.5, 300)
    ra, rb = a.rho_s_at(r), b.rho_s_at(r)
    return float(np.max(np.abs(ra - rb) / np.abs(ra)))


def s_to_n_limit_check(g: RadialMetric, s_list, r=None) -> list[dict]:
    """sup |rho_s - rho_F| for each s, with ratios of consecutive differences."""
    fg = solve_w(g)
    r = g.grid() if r is None else np.asarray(r, float)
    rf = fg.rho_s_at(r)
    rows = []
    for s in s_list:
        if s == g.n:
            diff = 0.0
        else:
            diff = float(np.max(np.abs(solve_vs(g, s).rho_s_at(r) - rf)))
        rows.append({"s": float(s), "sup_diff": diff})
    for prev, cur in zip(rows, rows[1:]):
        cur["ratio"] = prev["sup_diff"] / cur["sup_diff"] if cur["sup_diff"] > 0 else np.inf
    return rows


@dataclass(frozen=True)
class ProbeResult:
    s: float
    difference_order: int
    slope: float
    exponent: float
    predicted: float
    obstruction: bool
    below_noise: bool
    condition: float
    h: np.ndarray = field(repr=False)
    differences: np.ndarray = field(repr=False)


def regularity_threshold_probe(g: RadialMetric, s: float, h=None, comp: Compactification | None = None,
                               noise: float = 1e-11) -> ProbeResult:
    """Scaling exponent of the m-th forward difference of phi_s at the boundary.

    ``phi_s`` is read as a function of the fixed defining function rho;
    ``m = floor(2s - n) + 1``.  A smooth profile gives ``|Delta^m| ~ h^m``
    (reported exponent 1), the fractional term ``rho^{2s-n}`` gives
    ``h^{2s-n}`` (reported exponent ``2s - n - m + 1``).
    """
    n = g.n
    comp = comp or solve(g, s)
    two_gamma = 2 * s - n
    m = int(np.floor(two_gamma + 1e-12)) + 1
    h = np.geomspace(1e-4, 1e-2, 9) if h is None else np.asarray(h, float)
    if comp.is_fg:
        boundary_value = 0.0
    else:
        boundary_value = 1.0
    from math import comb

    diffs = np.zeros_like(h)
    for i, hi in enumerate(h):
        pts = hi * np.arange(1, m + 1)
        vals = np.concatenate([[boundary_value], comp.phi_at(g.r_of_rho(pts))])
        diffs[i] = sum((-1) ** (m - k) * comb(m, k) * vals[k] for k in range(m + 1))
    scale_floor = noise * 2**m
    ok = np.abs(diffs) > scale_floor
    if ok.sum() < 3:
        return ProbeResult(s, m, float("nan"), float("nan"), two_gamma - m + 1, False, True, float("nan"), h, diffs)
    X = np.vstack([np.ones(ok.sum()), np.log(h[ok])]).T
    coef, *_ = np.linalg.lstsq(X, np.log(np.abs(diffs[ok])), rcond=None)
    slope = float(coef[1])
    cond = float(np.linalg.cond(X))
    fractional = abs(two_gamma - round(two_gamma)) > 1e-9
    if fractional and ok.sum() >= 5:
        # the smooth rho^m term survives the m-th difference at order h^m: fit it as a nuisance
        hh, yy = h[ok], diffs[ok] / h[ok] ** m
        model = lambda t, P, q, Q, Rr: P * t ** (q - m) * (1.0 + Rr * t) + Q
        try:
            popt, pcov = curve_fit(model, hh, yy, p0=[diffs[ok][0] / hh[0] ** slope, slope, 0.0, 0.0], maxfev=20000)
            slope = float(popt[1])
            cond = float(np.linalg.cond(pcov)) if np.all(np.isfinite(pcov)) else float("inf")
        except RuntimeError:
            pass
    exponent = slope - (m - 1)
    obstruction = exponent < 1.0 - 0.1
    return ProbeResult(s, m, slope, exponent, two_gamma - m + 1, obstruction, False, cond, h, diffs)
