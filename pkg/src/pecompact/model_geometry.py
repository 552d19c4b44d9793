"""Radially symmetric Poincare-Einstein model metrics.

Models are written in the proper distance ``r`` from the centre (or horizon)
so that the Laplacian of a radial function is ``u'' + lambda'(r) u'`` with
``lambda`` the log volume density.  Two families are built in:

* hyperbolic space ``dr^2 + sinh(r)^2 g_{S^n}`` with the ball-model defining
  function ``rho = 1/(1 + cosh r)``;
* AdS-Schwarzschild ``V^{-1}dq^2 + V dtau^2 + q^2 g_{S^{n-1}}``,
  ``V = 1 + q^2 - 2m q^{2-n}``, reparameterized through ``q'' = V'(q)/2`` which
  is regular at the horizon.  Its defining function is ``rho = e^{-r}/C`` with
  ``C = lim q e^{-r}`` so that the boundary sphere factor is the unit sphere.

A generic single-warp constructor is available for negative controls
(``make_warped``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import series as S
from .series import Jet
from .warped import WarpedFrame, WarpFactor, einstein_defect


@dataclass(frozen=True)
class BoundaryData:
    ghat_scale: tuple[float, ...]
    Jhat: float
    Rhat: float
    positive_scalar: bool
    description: str = ""

    @classmethod
    def from_scalar(cls, n: int, Rhat: float, scales, description: str = "") -> "BoundaryData":
        return cls(tuple(scales), Rhat / (2.0 * (n - 1)), Rhat, Rhat > 0, description)


@dataclass(frozen=True)
class RadialMetric:
    n: int
    model: str
    factors: tuple[WarpFactor, ...]
    warp_fn: Callable[[Jet], list[Jet]] = field(repr=False)
    rho_fn: Callable[[Jet], Jet] = field(repr=False)
    rho_scale: float  # lim rho e^r
    center_dim: int  # dimension of the factor collapsing at r = 0
    boundary: BoundaryData
    lambda_sigma: np.ndarray = field(repr=False)  # series of lambda' in sigma = e^{-r}
    rho_sigma: np.ndarray = field(repr=False)  # series of rho in sigma
    r_max: float = 20.0
    r_min: float = 0.01
    grid_size: int = 400
    params: dict = field(default_factory=dict)

    # profiles -----------------------------------------------------------
    def warps(self, r, order: int) -> list[Jet]:
        return self.warp_fn(Jet.variable(np.asarray(r, float), order))

    def rho(self, r, order: int = 0) -> Jet:
        return self.rho_fn(Jet.variable(np.asarray(r, float), order))

    def log_volume_density(self, r, order: int) -> Jet:
        ws = self.warps(r, order)
        out = S.log(ws[0]) * self.factors[0].dim
        for fa, w in zip(self.factors[1:], ws[1:]):
            out = out + S.log(w) * fa.dim
        return out

    def lambda_prime(self, r, order: int) -> Jet:
        """Jet of lambda'(r) of the requested order."""
        ws = self.warps(r, order + 1)
        out = (ws[0].d() / ws[0].truncate(order)) * self.factors[0].dim
        for fa, w in zip(self.factors[1:], ws[1:]):
            out = out + (w.d() / w.truncate(order)) * fa.dim
        return out

    def frame(self, r, order: int, scale: Jet | None = None) -> WarpedFrame:
        r = np.asarray(r, float)
        if scale is None:
            scale = Jet.constant(1.0, order, r.shape)
        return WarpedFrame(scale, self.warps(r, order), self.factors)

    def grid(self, size: int | None = None, r_min: float | None = None, r_max: float | None = None) -> np.ndarray:
        size = size or self.grid_size
        lo = self.r_min if r_min is None else r_min
        hi = self.r_max if r_max is None else r_max
        return np.linspace(lo, hi, size)

    def r_of_rho(self, rho_value) -> np.ndarray:
        """Invert the fixed defining function (monotone in r)."""
        vals = np.atleast_1d(np.asarray(rho_value, float))
        out = np.empty_like(vals)
        top = float(self.rho(self.r_min).value)
        if np.any(vals >= top) or np.any(vals <= 0):
            raise ValueError(f"rho values must lie in (0, {top:.6g}) on this model")
        for i, v in enumerate(vals):
            guess = -np.log(v / self.rho_scale)
            lo, hi = max(guess - 5.0, self.r_min), guess + 5.0
            out[i] = brentq(lambda r: self.rho(r).value - v, lo, hi, xtol=1e-15, rtol=1e-15)
        return out if np.ndim(rho_value) else out[0]

    @property
    def x_scale(self) -> float:
        """Geodesic defining function is x = x_scale * e^{-r}."""
        return self.rho_scale

    @property
    def dims(self) -> int:
        return self.n + 1


def rescale_defining_function(g: RadialMetric, c: float) -> RadialMetric:
    """Same g_+ with defining function c*rho, i.e. boundary representative c^2 ghat."""
    from dataclasses import replace

    if c <= 0:
        raise ValueError("rescaling constant must be positive")
    b = g.boundary
    bd = BoundaryData(tuple(x * c for x in b.ghat_scale), b.Jhat / c**2, b.Rhat / c**2, b.positive_scalar,
                      f"{b.description} (rescaled by {c:g})")
    rho_fn = g.rho_fn
    return replace(g, rho_fn=lambda R: rho_fn(R) * c, rho_scale=g.rho_scale * c,
                   rho_sigma=np.asarray(g.rho_sigma) * c, boundary=bd)


def with_defining_function(g: RadialMetric, rho_fn: Callable[[Jet], Jet], rho_sigma=None) -> RadialMetric:
    """Same g_+ and boundary representative, different fixed defining function.

    ``rho_fn`` must satisfy rho e^r -> rho_scale of ``g``; otherwise the
    boundary metric changes and :func:`rescale_defining_function` applies.
    """
    from dataclasses import replace

    r_hi = np.array([g.r_max - 2.0, g.r_max - 1.0, g.r_max])
    lim = rho_fn(Jet.variable(r_hi, 0)).value * np.exp(r_hi)
    if np.max(np.abs(lim / g.rho_scale - 1.0)) > 1e-6:
        raise ValueError(f"rho e^r tends to {lim[-1]:.6g}, not {g.rho_scale:.6g}: boundary representative differs")
    sig = np.full(np.shape(g.rho_sigma), np.nan) if rho_sigma is None else np.asarray(rho_sigma, float)
    return replace(g, rho_fn=rho_fn, rho_sigma=sig)


def _check_n(n: int) -> None:
    if int(n) != n or n < 3:
        raise ValueError(f"boundary dimension must be an integer >= 3, got {n}")


def make_hyperbolic(n: int, r_max: float = 20.0, grid_size: int = 400, r_min: float = 0.01) -> RadialMetric:
    _check_n(n)
    order = 24
    sig = np.zeros(order + 1)
    sig[0] = n
    sig[2::2] = 2.0 * n  # n coth r = n (1 + s^2)/(1 - s^2)
    rho_sig = np.zeros(order + 1)
    k = np.arange(order)
    rho_sig[1:] = 2.0 * (-1.0) ** k * (k + 1)  # 2s/(1+s)^2
    return RadialMetric(
        n=n,
        model="hyperbolic",
        factors=(WarpFactor(n, 1.0, f"S^{n}"),),
        warp_fn=lambda r: [S.sinh(r)],
        rho_fn=lambda r: 1.0 / (1.0 + S.cosh(r)),
        rho_scale=2.0,
        center_dim=n,
        boundary=BoundaryData.from_scalar(n, float(n * (n - 1)), (1.0,), f"round S^{n}"),
        lambda_sigma=sig,
        rho_sigma=rho_sig,
        r_max=r_max,
        r_min=r_min,
        grid_size=grid_size,
    )


def make_warped(n: int, warp: Callable[[Jet], Jet], r_max: float = 20.0, grid_size: int = 400,
                rho: Callable[[Jet], Jet] | None = None, rho_scale: float = 2.0) -> RadialMetric:
    """Single-warp metric ``dr^2 + warp(r)^2 g_{S^n}`` (not necessarily Einstein)."""
    _check_n(n)
    rho = rho or (lambda r: 1.0 / (1.0 + S.cosh(r)))
    nan = np.full(25, np.nan)
    return RadialMetric(
        n=n, model="warped", factors=(WarpFactor(n, 1.0, f"S^{n}"),),
        warp_fn=lambda r: [warp(r)], rho_fn=rho, rho_scale=rho_scale, center_dim=n,
        boundary=BoundaryData.from_scalar(n, float(n * (n - 1)), (1.0,), f"round S^{n}"),
        lambda_sigma=nan, rho_sigma=nan, r_max=r_max, grid_size=grid_size,
    )


# AdS-Schwarzschild -----------------------------------------------------------

def _V(q, n, m):
    return 1.0 + q * q - 2.0 * m * q ** (2 - n)


def _dV(q, n, m):
    if m == 0:
        return 2.0 * q
    return 2.0 * q - 2.0 * m * (2 - n) * q ** (1 - n)


def horizon_radius(n: int, m: float) -> float:
    """Largest root of V (0 when m = 0: the sphere factor collapses instead)."""
    if m == 0:
        return 0.0
    # q^{n-2} V = q^n + q^{n-2} - 2m is increasing in q > 0
    return brentq(lambda q: q**n + q ** (n - 2) - 2.0 * m, 0.0, max(1.0, 2.0 * m) + 1.0, xtol=1e-15, rtol=1e-15)


class _RadiusSolution:
    """q(r) from q'' = V'(q)/2 with dense output; jets from the Taylor recurrence."""

    def __init__(self, n: int, m: float, r_end: float):
        self.n, self.m = n, m
        self.qh = horizon_radius(n, m)
        if m == 0:
            y0 = [0.0, 1.0]
        else:
            y0 = [self.qh, 0.0]

        def rhs(r, y):
            return [y[1], 0.5 * _dV(y[0], n, m)]

        self.sol = solve_ivp(rhs, (0.0, r_end), y0, method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True)
        if not self.sol.success:
            raise RuntimeError(self.sol.message)
        self.C = float(self.sol.sol(r_end)[0] * np.exp(-r_end))

    def jets(self, r: Jet) -> tuple[Jet, Jet]:
        order = r.order
        q0, q1 = self.sol.sol(r.value)
        c = np.zeros((order + 2,) + np.shape(r.value))
        c[0], c[1] = q0, q1
        # q'' = V'(q)/2 with V'(q) = 2q - 2m(2-n) q^{1-n}
        for k in range(order):
            qj = Jet(c[: k + 1])
            acc = qj * 1.0
            if self.m != 0:
                acc = acc - S.power(qj, 1.0 - self.n) * (self.m * (2 - self.n))
            c[k + 2] = acc.c[k] / ((k + 2) * (k + 1))
        q = Jet(c[: order + 2])
        return q.truncate(order), q.d()


def _ads_lambda_sigma(n: int, m: float, C: float, order: int) -> np.ndarray:
    u = Jet.variable(0.0, order)
    W = 1.0 + u * u - (u**n) * (2.0 * m)
    Winv = S.power(W, -0.5)
    # G(u) = int_0^u (W^{-1/2} - 1)/t dt ; (W^{-1/2} - 1) has no constant term
    g = (Winv - 1.0).c
    G = np.zeros(order + 1)
    G[1:] = g[1:] / np.arange(1, order + 1)
    sigma_over_C = u * S.exp(Jet(G))
    u_of_sigma = S.revert(sigma_over_C)
    t = Jet.variable(0.0, order)
    u_s = S.compose(u_of_sigma, t / C)
    lam_u = S.sqrt(W) * n - (u * Jet(np.append(W.d().c, 0.0))) / (S.sqrt(W) * 2.0)
    return S.compose(lam_u, u_s).c


def make_ads_schwarzschild(n: int, m: float, beta: float | None = None, r_max: float = 20.0,
                           grid_size: int = 400, r_min: float = 0.01) -> RadialMetric:
    _check_n(n)
    if m < 0:
        raise ValueError("mass parameter m must be nonnegative")
    rad = _RadiusSolution(n, m, r_max + 2.0)
    qh = rad.qh
    if m > 0:
        beta_cap = 4.0 * np.pi / _dV(qh, n, m)
        center_dim = 1
    else:
        beta_cap = None
        center_dim = n - 1
    beta_used = beta if beta is not None else (beta_cap if beta_cap is not None else 2.0 * np.pi)
    cap_regular = beta_cap is None or abs(beta_used - beta_cap) < 1e-12 * beta_cap
    C = rad.C

    def warp_fn(r: Jet) -> list[Jet]:
        q, dq = rad.jets(r)
        return [dq, q]

    def rho_fn(r: Jet) -> Jet:
        return S.exp(-r) / C

    order = 24
    lam_sig = _ads_lambda_sigma(n, m, C, order)
    rho_sig = np.zeros(order + 1)
    rho_sig[1] = 1.0 / C
    Rhat = float((n - 1) * (n - 2))
    return RadialMetric(
        n=n,
        model="ads_schw",
        factors=(WarpFactor(1, 0.0, "S^1"), WarpFactor(n - 1, 1.0, f"S^{n-1}")),
        warp_fn=warp_fn,
        rho_fn=rho_fn,
        rho_scale=1.0 / C,
        center_dim=center_dim,
        boundary=BoundaryData.from_scalar(n, Rhat, (1.0, 1.0), f"S^1({beta_used:.6g}) x S^{n-1}"),
        lambda_sigma=lam_sig,
        rho_sigma=rho_sig,
        r_max=r_max,
        r_min=r_min,
        grid_size=grid_size,
        params={"m": m, "beta": beta_used, "beta_cap": beta_cap, "cap_regular": cap_regular,
                "horizon_q": qh, "C": C},
    )


def einstein_residual(g: RadialMetric, r=None):
    """Pointwise sup over components of |Ric + n g| for the model metric."""
    from .radial_operator import RadialProfile

    r = g.grid() if r is None else np.asarray(r, float)
    frame = g.frame(r, 2)
    vals = einstein_defect(frame, -float(g.n))
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite curvature values: corrupted warp profile")
    return RadialProfile(r, Jet(vals[None]), label="einstein_residual")
