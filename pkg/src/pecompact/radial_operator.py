"""Radial profiles and the operators of the Poincare-Einstein metric acting on them.

A :class:`RadialProfile` is a function of the proper distance ``r`` sampled at
grid nodes together with its Taylor jet at every node, so ``derivative_order``
derivatives are available exactly.  Operators consume derivatives and return
profiles of lower order, so a derivative budget that runs out fails loudly.

Operator conventions (radial reduction, ``u = u(r)``):

* ``Delta_+ u = u'' + lambda'(r) u'``;
* ``P0 = Delta_+ + s(n - s)``;
* ``P_lambda = rho^{-lambda} P0 rho^{lambda}`` (weight-shifted P0);
* ``P^+_{2N} = prod_j (-Delta_+ - c_j)`` with
  ``c_j = (n + 2N - 4j + 3)(n - 2N + 4j - 3)/4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Callable

import numpy as np
from numpy.polynomial import chebyshev as C

from . import series as S
from .series import Jet

if TYPE_CHECKING:  # pragma: no cover
    from .boundary_asymptotics import BoundarySeries
    from .model_geometry import RadialMetric


@dataclass(frozen=True)
class RadialProfile:
    grid: np.ndarray
    jet: Jet
    boundary_series: "BoundarySeries | None" = None
    label: str = ""

    def __post_init__(self):
        g = np.asarray(self.grid, float)
        if g.ndim != 1 or (g.size > 1 and np.any(np.diff(g) <= 0)):
            raise ValueError("grid must be a strictly increasing 1-D array")
        if self.jet.c.shape[1:] != g.shape:
            raise ValueError("jet shape does not match grid")
        object.__setattr__(self, "grid", g)

    # constructors -------------------------------------------------------
    @classmethod
    def from_function(cls, grid, fn: Callable[[Jet], Jet], order: int, label: str = "") -> "RadialProfile":
        """Profile of ``fn`` written in jet arithmetic (exact derivatives)."""
        grid = np.asarray(grid, float)
        return cls(grid, fn(Jet.variable(grid, order)), label=label)

    @classmethod
    def from_samples(cls, grid, values, order: int, label: str = "", degree: int | None = None) -> "RadialProfile":
        """Profile from plain samples: derivatives by global Chebyshev interpolation."""
        grid = np.asarray(grid, float)
        values = np.asarray(values, float)
        deg = degree or min(len(grid) - 1, 60)
        ser = C.Chebyshev.fit(grid, values, deg)
        derivs = [ser(grid)]
        for _ in range(order):
            ser = ser.deriv()
            derivs.append(ser(grid))
        return cls(grid, Jet.from_derivatives(np.stack(derivs)), label=label)

    @classmethod
    def from_callable_spectral(cls, grid, fn: Callable[[np.ndarray], np.ndarray], order: int,
                               halfwidth: float = 0.4, degree: int = 16, label: str = "") -> "RadialProfile":
        """Derivatives of a black-box callable by local Chebyshev interpolation.

        Independent of any ODE structure; used to cross-check jets that were
        produced by recurrences.
        """
        grid = np.asarray(grid, float)
        nodes = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
        derivs = np.zeros((order + 1, grid.size))
        for i, r in enumerate(grid):
            lo = max(r - halfwidth, 1e-9)
            hi = lo + 2 * halfwidth
            pts = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes
            ser = C.Chebyshev.fit(pts, fn(pts), degree, domain=[lo, hi])
            for k in range(order + 1):
                derivs[k, i] = ser(r)
                ser = ser.deriv()
        return cls(grid, Jet.from_derivatives(derivs), label=label)

    # accessors ----------------------------------------------------------
    @property
    def values(self) -> np.ndarray:
        return self.jet.value

    @property
    def derivative_order(self) -> int:
        return self.jet.order

    def derivative(self, k: int = 1) -> np.ndarray:
        return self.jet.deriv(k)

    def d(self) -> "RadialProfile":
        return RadialProfile(self.grid, self.jet.d(), label=f"d({self.label})")

    def require(self, order: int, what: str) -> None:
        if self.derivative_order < order:
            raise ValueError(f"{what} needs derivative_order >= {order}, profile has {self.derivative_order}")

    def with_jet(self, jet: Jet, label: str | None = None) -> "RadialProfile":
        return RadialProfile(self.grid, jet, label=self.label if label is None else label)

    def map(self, fn: Callable[[Jet], Jet], label: str = "") -> "RadialProfile":
        return self.with_jet(fn(self.jet), label)

    def restrict(self, mask) -> "RadialProfile":
        mask = np.asarray(mask, bool)
        return RadialProfile(self.grid[mask], Jet(self.jet.c[:, mask]), self.boundary_series, self.label)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def argsup(self) -> float:
        return float(self.grid[int(np.argmax(np.abs(self.values)))])

    def rows(self):
        return list(zip(self.grid.tolist(), self.values.tolist()))

    # pointwise algebra --------------------------------------------------
    def _other(self, other):
        if isinstance(other, RadialProfile):
            if other.grid.shape != self.grid.shape or not np.allclose(other.grid, self.grid, rtol=0, atol=1e-14):
                raise ValueError("profiles live on different grids")
            return other.jet
        return other

    def __add__(self, o):
        return self.with_jet(self.jet + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return self.with_jet(self.jet - self._other(o))

    def __rsub__(self, o):
        return self.with_jet(self._other(o) - self.jet)

    def __mul__(self, o):
        return self.with_jet(self.jet * self._other(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self.with_jet(self.jet / self._other(o))

    def __neg__(self):
        return self.with_jet(-self.jet)

    def __pow__(self, p):
        return self.with_jet(self.jet**p)


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    n: int
    s: float | None = None
    lam: float = 0.0
    N: int = 1
    k: int | None = None  # available regularity; caps N

    KINDS = ("laplacian_plus", "P0", "P_lambda", "gjms_product")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind in ("P0", "P_lambda"):
            _check_s(self.n, self.s)
        if self.kind == "gjms_product":
            if self.N < 1:
                raise ValueError("GJMS half-order N must be >= 1")
            if self.k is not None and self.N > (self.k + 1) // 2:
                raise ValueError(f"N = {self.N} exceeds the regularity bound floor((k+1)/2) for k = {self.k}")

    def apply(self, g: "RadialMetric", u: RadialProfile) -> RadialProfile:
        if self.kind == "laplacian_plus":
            return apply_laplacian_plus(g, u)
        if self.kind == "P0":
            return apply_P0(g, self.s, u)
        if self.kind == "P_lambda":
            return apply_P_lambda(g, self.s, self.lam, u)
        return apply_gjms_plus(g, self.N, u)


def _check_s(n: int, s) -> None:
    if s is None or s <= n / 2:
        raise ValueError(f"spectral parameter must satisfy s > n/2 = {n / 2}, got {s}")


def apply_laplacian_plus(g: "RadialMetric", u: RadialProfile) -> RadialProfile:
    u.require(2, "Delta_+")
    K = u.derivative_order - 2
    du = u.jet.d()
    lam = g.lambda_prime(u.grid, K)
    out = du.d() + lam * du.truncate(K)
    series = None
    if u.boundary_series is not None:
        from .boundary_asymptotics import series_laplacian

        series = series_laplacian(g, u.boundary_series)
    return RadialProfile(u.grid, out, series, f"Delta+({u.label})")


def apply_P0(g: "RadialMetric", s: float, u: RadialProfile) -> RadialProfile:
    _check_s(g.n, s)
    lap = apply_laplacian_plus(g, u)
    out = lap.jet + u.jet.truncate(lap.derivative_order) * (s * (g.n - s))
    series = None
    if u.boundary_series is not None:
        from .boundary_asymptotics import series_laplacian

        series = series_laplacian(g, u.boundary_series, shift=s * (g.n - s), roots=(s, g.n - s))
    return RadialProfile(u.grid, out, series, f"P0({u.label})")


def apply_P_lambda(g: "RadialMetric", s: float, lam: float, u: RadialProfile) -> RadialProfile:
    """rho^{-lam} (Delta_+ + s(n-s)) (rho^{lam} u)."""
    _check_s(g.n, s)
    rho = g.rho(u.grid, u.derivative_order)
    w = RadialProfile(u.grid, S.power(rho, lam) * u.jet)
    p = apply_P0(g, s, w)
    return RadialProfile(u.grid, p.jet / S.power(rho.truncate(p.derivative_order), lam), label=f"P_lam({u.label})")


def gjms_constants(n: int, N: int) -> list[float]:
    return [(n + 2 * N - 4 * j + 3) * (n - 2 * N + 4 * j - 3) / 4.0 for j in range(1, N + 1)]


def apply_gjms_plus(g: "RadialMetric", N: int, u: RadialProfile, order: list[int] | None = None) -> RadialProfile:
    """Product of shifted Laplacians, factors applied in increasing j (or ``order``)."""
    u.require(2 * N, f"P+_{2 * N}")
    consts = gjms_constants(g.n, N)
    idx = list(range(N)) if order is None else list(order)
    out = u.with_jet(u.jet, u.label)
    out = RadialProfile(out.grid, out.jet, None, out.label)
    for j in idx:
        lap = apply_laplacian_plus(g, out)
        out = RadialProfile(u.grid, -lap.jet - out.jet.truncate(lap.derivative_order) * consts[j])
    return RadialProfile(u.grid, out.jet, label=f"P+{2 * N}({u.label})")


def conformal_laplacian_check(g: "RadialMetric", u: RadialProfile) -> RadialProfile:
    """Delta_+ u - [rho^2 Lap_bar u - (n-1) rho <d rho, d u>_bar] with bar g = rho^2 g_+."""
    u.require(2, "conformal Laplacian check")
    K = u.derivative_order
    rho = g.rho(u.grid, K)
    frame = g.frame(u.grid, K, scale=rho)
    lap_bar = frame.laplacian(u.jet)
    K2 = lap_bar.order
    rhs = rho.truncate(K2) * rho.truncate(K2) * lap_bar - rho.truncate(K2) * frame.inner(rho, u.jet).truncate(K2) * (g.n - 1)
    lhs = apply_laplacian_plus(g, u).jet
    return RadialProfile(u.grid, lhs.truncate(K2) - rhs, label="conformal_laplacian_residual")
