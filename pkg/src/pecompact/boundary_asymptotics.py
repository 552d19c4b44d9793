"""Frobenius expansions at the conformal boundary.

Near the boundary every model is expanded in ``sigma = e^{-r}``.  For a
boundary variable ``X`` (the fixed defining function ``rho`` or the geodesic
defining function ``x``) write ``theta = X d/dX`` and ``a(X) = sigma d(log X)/d sigma``
so that ``d/dr = -a theta``.  The hyperbolic Laplacian of a radial function is

    Delta_+ = A(X) theta^2 + B(X) theta,
    A = a^2,  B = a (theta a) - lambda' a,

with ``A = 1 + O(X)`` and ``B = -n + O(X)``.  Acting on ``X^mu`` the leading
part is the indicial polynomial ``mu (mu - n)``; the roots of
``mu(mu - n) + s(n - s)`` are ``n - s`` and ``s``.

Writing ``v = X^{n-s} sum_j b_j X^j`` the coefficients obey

    j (j - 2 gamma) b_j = - sum_{k >= 1} [A_k (mu + j - k)^2 + B_k (mu + j - k)] b_{j-k},

``gamma = s - n/2``.  The recursion is stopped below the collision ``j = 2 gamma``.
The same scheme applied to ``w - log X`` solves ``-Delta_+ w = n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import series as S
from .series import Jet

SERIES_ORDER = 16


class SeriesStopError(ValueError):
    """Raised when a recursion would divide by the vanishing indicial factor."""


@dataclass(frozen=True)
class BoundarySeries:
    base_exponent: float
    offsets: tuple[float, ...]
    coeffs: tuple[float, ...]
    truncation_order: float
    variable: str = "rho"
    provenance: tuple[str, ...] = ()
    fit_residual: float = 0.0
    log_coefficient: float = 0.0  # coefficient of log(X), used by the w series
    stopped: bool = False
    condition: float = 1.0

    def __post_init__(self):
        off = np.asarray(self.offsets, float)
        if off.size > 1 and np.any(np.diff(off) <= 0):
            raise ValueError("series offsets must be strictly increasing")
        if len(self.coeffs) != len(self.offsets):
            raise ValueError("offsets and coefficients differ in length")
        frac = [o for o in off if abs(o - round(o)) > 1e-12]
        if len(frac) > 1:
            raise ValueError("at most one non-integer offset is allowed")

    @property
    def exponents(self) -> np.ndarray:
        return self.base_exponent + np.asarray(self.offsets, float)

    def coefficient(self, offset: float) -> float:
        for o, c in zip(self.offsets, self.coeffs):
            if abs(o - offset) < 1e-12:
                return c
        return 0.0

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, float)
        out = np.zeros_like(X)
        for e, c in zip(self.exponents, self.coeffs):
            out = out + c * X**e
        if self.log_coefficient:
            out = out + self.log_coefficient * np.log(X)
        return out

    def scale(self, factor: float) -> "BoundarySeries":
        return BoundarySeries(self.base_exponent, self.offsets, tuple(factor * c for c in self.coeffs),
                              self.truncation_order, self.variable, self.provenance, self.fit_residual,
                              factor * self.log_coefficient, self.stopped)

    def add(self, other: "BoundarySeries") -> "BoundarySeries":
        if other.variable != self.variable:
            raise ValueError("cannot add series in different variables")
        terms: dict[float, float] = {}
        for e, c in zip(self.exponents, self.coeffs):
            terms[round(float(e), 12)] = terms.get(round(float(e), 12), 0.0) + c
        for e, c in zip(other.exponents, other.coeffs):
            terms[round(float(e), 12)] = terms.get(round(float(e), 12), 0.0) + c
        mu = min(self.base_exponent, other.base_exponent)
        keys = sorted(terms)
        trunc = min(self.base_exponent + self.truncation_order, other.base_exponent + other.truncation_order) - mu
        return BoundarySeries(mu, tuple(k - mu for k in keys), tuple(terms[k] for k in keys), trunc,
                              self.variable, log_coefficient=self.log_coefficient + other.log_coefficient)

    def table(self) -> str:
        var = self.variable
        lines = [f"{'c_j':>16}   exponent"]
        for e, c in zip(self.exponents, self.coeffs):
            lines.append(f"{c:16.10g} @ {var}^{e:g}")
        if self.log_coefficient:
            lines.append(f"{self.log_coefficient:16.10g} @ log {var}")
        lines.append(f"(truncated at {var}^{self.base_exponent + self.truncation_order:g}, fit residual {self.fit_residual:.3g})")
        return "\n".join(lines)

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(e), float(c), float(self.fit_residual)) for e, c in zip(self.exponents, self.coeffs)]


@dataclass(frozen=True)
class GeodesicGauge:
    x_profile: "object"  # RadialProfile
    g2_coefficient: tuple[float, ...]
    Ahat: tuple[float, ...]
    x_scale: float
    dx_defect: float

    def x_of_r(self, r):
        return self.x_scale * np.exp(-np.asarray(r, float))


def indicial_roots(n: int, s: float) -> tuple[float, float]:
    if s <= n / 2:
        raise ValueError(f"s must exceed n/2 = {n / 2}")
    return (n - s, s)


def indicial_value(mu: float, n: int, s: float) -> float:
    """mu(mu - n) + s(n - s) in factored form, exactly zero at the roots."""
    return (mu - s) * (mu - (n - s))


# operator coefficients in a boundary variable --------------------------------

def _variable_in_sigma(g, variable: str, order: int) -> Jet:
    if variable == "sigma":
        c = np.zeros(order + 1)
        c[1] = 1.0
        return Jet(c)
    if variable == "x":
        c = np.zeros(order + 1)
        c[1] = g.x_scale
        return Jet(c)
    if variable == "rho":
        if np.any(np.isnan(g.rho_sigma[: order + 1])):
            raise ValueError("metric carries no boundary expansion of rho")
        return Jet(np.asarray(g.rho_sigma[: order + 1], float))
    raise ValueError(f"unknown boundary variable {variable!r}")


def operator_coefficients(g, variable: str = "rho", order: int = SERIES_ORDER):
    """Series A(X), B(X) with Delta_+ = A theta^2 + B theta (theta = X d/dX)."""
    X = _variable_in_sigma(g, variable, order + 1)
    # a = sigma X'(sigma)/X as a series in sigma (X has a simple zero)
    # sigma X'/X = X'(sigma) / (X/sigma)
    a_sig = (X.d() / Jet(X.c[1:])).truncate(order)
    lam_sig = Jet(np.asarray(g.lambda_sigma[: order + 1], float))
    sig_of_X = S.revert(X.truncate(order))
    a = S.compose(a_sig, sig_of_X)
    lam = S.compose(lam_sig, sig_of_X)
    # theta a = X a'(X)
    ad = a.d()
    theta_a = Jet(np.concatenate([[0.0], ad.c]))
    A = a * a
    B = a * theta_a - lam * a
    return A.c, B.c


def series_laplacian(g, ser: BoundarySeries, shift: float = 0.0, roots: tuple[float, float] | None = None) -> BoundarySeries:
    """Term-by-term action of Delta_+ (+ shift) on a boundary series.

    When ``roots`` is given the leading symbol ``mu(mu-n) + shift`` is
    evaluated in the factored form ``(mu - roots[0])(mu - roots[1])`` so the
    indicial cancellation is exact.
    """
    A, B = operator_coefficients(g, ser.variable)
    kmax = int(np.floor(ser.truncation_order))
    terms: dict[float, float] = {}
    for o, c in zip(ser.offsets, ser.coeffs):
        e = ser.base_exponent + o
        for k in range(0, kmax + 1):
            if o + k > ser.truncation_order + 1e-12:
                break
            if k == 0:
                sym = (e - roots[0]) * (e - roots[1]) if roots else e * e * A[0] + e * B[0] + shift
            else:
                sym = A[k] * e * e + B[k] * e
            key = round(o + k, 12)
            terms[key] = terms.get(key, 0.0) + sym * c
    if ser.log_coefficient:
        # Delta_+ log X = B(X)
        for k in range(0, kmax + 1):
            terms[round(k - ser.base_exponent, 12)] = terms.get(round(k - ser.base_exponent, 12), 0.0) + ser.log_coefficient * B[k]
    keys = sorted(terms)
    return BoundarySeries(ser.base_exponent, tuple(keys), tuple(terms[k] for k in keys), ser.truncation_order,
                          ser.variable, tuple("operator image" for _ in keys))


def max_phi_order(n: int, s: float) -> int:
    two_gamma = 2 * s - n
    if abs(two_gamma - round(two_gamma)) < 1e-12:
        return int(round(two_gamma)) - 1
    return int(np.floor(two_gamma))


def build_phi_series(g, s: float, order: int, variable: str = "rho") -> BoundarySeries:
    """Locally determined part of (rho_s / X)^{n-s} = 1 + sum_j b_j X^j."""
    n = g.n
    if s <= n / 2 or s == n:
        raise ValueError("build_phi_series needs n/2 < s, s != n")
    two_gamma = 2 * s - n
    legal = max_phi_order(n, s)
    if order > legal:
        raise SeriesStopError(
            f"order {order} passes the indicial collision at j = 2 gamma = {two_gamma:g}; "
            f"the recursion is determined only through j = {legal}")
    A, B = operator_coefficients(g, variable)
    mu = n - s
    b = [1.0]
    prov = ["boundary normalization"]
    for j in range(1, order + 1):
        rhs = 0.0
        for k in range(1, j + 1):
            e = mu + j - k
            rhs -= (A[k] * e * e + B[k] * e) * b[j - k]
        ind = j * (j - two_gamma)
        b.append(rhs / ind)
        prov.append(f"cancels X^{mu + j:g} residual")
    return BoundarySeries(0.0, tuple(float(j) for j in range(order + 1)), tuple(b), float(order),
                          variable, tuple(prov))


def build_w_series(g, order: int, variable: str = "rho") -> BoundarySeries:
    """Series of w - log X for the solution of -Delta_+ w = n with w - log X -> 0."""
    n = g.n
    stopped = False
    if order >= n:
        if n % 2 == 0:
            order, stopped = n - 1, True
        else:
            raise SeriesStopError(f"order {order} reaches the indicial collision at j = n = {n}")
    A, B = operator_coefficients(g, variable)
    p = [0.0]
    prov = ["boundary condition"]
    for j in range(1, order + 1):
        rhs = -B[j]
        for k in range(1, j):
            e = j - k
            rhs -= (A[k] * e * e + B[k] * e) * p[j - k]
        p.append(rhs / (j * (j - n)))
        prov.append(f"cancels X^{j} residual")
    return BoundarySeries(0.0, tuple(float(j) for j in range(order + 1)), tuple(p), float(order), variable,
                          tuple(prov), stopped=stopped)


def geodesic_gauge(g, order: int = 2) -> GeodesicGauge:
    """x = x_scale e^{-r} and the x^2 coefficient of each cross-section factor of x^2 g_+."""
    from .radial_operator import RadialProfile

    xs = g.x_scale
    # x/rho -> 1 is enforced by x_scale = lim rho e^r; check convergence
    r_hi = np.array([g.r_max - 2.0, g.r_max - 1.0, g.r_max])
    ratio = xs * np.exp(-r_hi) / g.rho(r_hi).value
    if not np.all(np.isfinite(ratio)) or np.max(np.abs(ratio - 1.0)) > 1e-6:
        raise ValueError("rho e^r does not converge: cannot normalize the geodesic defining function")
    grid = g.grid()
    x_prof = RadialProfile.from_function(grid, lambda r: S.exp(-r) * xs, 2, "x")
    # cross-section factors (x f_a)^2 sampled in x and fitted by a polynomial
    xv = np.geomspace(2e-3, 0.2, 60)
    r = -np.log(xv / xs)
    warps = g.warps(r, 0)
    g2 = []
    for w in warps:
        h = (xv * w.value) ** 2
        coef = np.polynomial.polynomial.polyfit(xv, h, 8)
        g2.append(float(coef[2] / coef[0]))
    b = g.boundary
    Ahat = []
    for fa in g.factors:
        ric = (fa.dim - 1) * fa.curvature
        Ahat.append((ric - b.Jhat) / (g.n - 2))
    dx = x_prof.jet.d().value / x_prof.values
    defect = float(np.max(np.abs(dx * dx - 1.0)))
    return GeodesicGauge(x_prof, tuple(g2), tuple(Ahat), xs, defect)


def extract_expansion(p, exponents: Sequence[float], g=None, gauge: str = "x", x0: float = 0.1,
                      window: float = 4.0, samples: int = 48) -> BoundarySeries:
    """Least-squares fit of sum_i c_i X^{e_i} on the geometric window X in [x0/window, x0].

    ``p`` is either a callable of the boundary variable or a RadialProfile
    (then ``g`` converts its grid to ``X``).
    """
    ex = np.asarray(sorted(exponents), float)
    if ex.size > 1 and np.min(np.diff(ex)) < 1e-3:
        raise ValueError("exponents too close: fit is ill-conditioned")
    if callable(p):
        X = np.geomspace(x0 / window, x0, samples)
        y = np.asarray(p(X), float)
    else:
        if g is None:
            raise ValueError("a RadialProfile needs its metric to map r to the boundary variable")
        if gauge == "x":
            Xall = g.x_scale * np.exp(-p.grid)
        else:
            Xall = g.rho(p.grid).value
        mask = (Xall >= x0 / window) & (Xall <= x0)
        X, y = Xall[mask], p.values[mask]
        if X.size < ex.size:
            raise ValueError("not enough grid samples in the fit window")
    V = X[:, None] ** ex[None, :]
    scale = np.max(np.abs(V), axis=0)
    coef, *_ = np.linalg.lstsq(V / scale, y, rcond=None)
    coef = coef / scale
    resid = float(np.max(np.abs(V @ coef - y)))
    cond = float(np.linalg.cond(V / scale))
    mu = float(ex[0])
    return BoundarySeries(mu, tuple(float(e - mu) for e in ex), tuple(float(c) for c in coef),
                          float(ex[-1] - mu), gauge, tuple("fit" for _ in ex), resid, condition=cond)


def richardson_boundary_value(f: Callable[[np.ndarray], np.ndarray], nodes=(0.02, 0.04, 0.08)) -> float:
    """Value at 0 of the polynomial through (h_i, f(h_i))."""
    h = np.asarray(nodes, float)
    vals = np.asarray(f(h), float)
    coef = np.polynomial.polynomial.polyfit(h, vals, len(h) - 1)
    return float(coef[0])
