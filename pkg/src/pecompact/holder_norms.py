"""Discrete Hölder and weighted Hölder estimators.

All estimators are lower bounds of the true norms: they take suprema over
node pairs in a scale band ``[4, 64]`` local grid spacings.  Tests are phrased
as stability or divergence under refinement, never as absolute values.

Weighted norms live on dyadic collars ``rho in [2^{-j-1}, 2^{-j}]``.  In the
radial reduction a Möbius chart near the boundary is a unit window in
``log rho``, so measuring ``C^{l,beta}`` on a collar with lengths divided by
``2^{-j}`` reproduces the chart norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import series as S
from .radial_operator import RadialProfile
from .series import Jet

BAND = (4.0, 64.0)


@dataclass
class HolderEstimate:
    k: int
    alpha: float
    delta: float
    value: float
    scale_band: tuple[float, float]
    seminorm: float = 0.0
    sup_part: float = 0.0
    collars: list[tuple[int, float]] = field(default_factory=list)
    weight: str = "rho^-delta"

    def rows(self):
        return list(self.collars)

    def growth_rate(self, skip: int = 1) -> float:
        """Slope of log2(local norm) against collar index (0 for bounded data)."""
        return collar_growth(self.collars, skip)


def _band_quotient(x: np.ndarray, y: np.ndarray, alpha: float, band=BAND, absolute: bool = False):
    """max |y_i - y_j| / |x_i - x_j|^alpha over pairs with separation in the band.

    The band is in units of the local spacing, or in plain length units when
    ``absolute`` (used when comparing estimates across different grids).
    """
    lo, hi = band
    dx = np.gradient(x) if x.size > 1 else np.ones(1)
    if absolute:
        dx = np.ones_like(dx)
    best, hmin, hmax, found = 0.0, np.inf, 0.0, False
    for m in range(1, x.size):
        sep = x[m:] - x[:-m]
        loc = np.maximum(dx[m:], dx[:-m])
        ok = (sep >= lo * loc * (1 - 1e-9)) & (sep <= hi * loc * (1 + 1e-9))
        if ok.any():
            q = np.abs(y[m:] - y[:-m])[ok] / (sep[ok] ** alpha).reshape((-1,) + (1,) * (y.ndim - 1))
            best = max(best, float(q.max()))
            hmin, hmax, found = min(hmin, float(sep[ok].min())), max(hmax, float(sep[ok].max())), True
        elif np.all(sep > hi * loc):
            break
    if not found:
        raise ValueError("empty scale band: grid does not resolve [4, 64] local spacings")
    return best, (hmin, hmax)


def holder_seminorm(p: RadialProfile, k: int, alpha: float, band=BAND, absolute: bool = False) -> HolderEstimate:
    """C^{k,alpha} estimate: sup norms of D^j p (j <= k) plus the band quotient of D^k p."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    p.require(k, f"C^{k},alpha estimate")
    sup_part = sum(float(np.max(np.abs(p.derivative(j)))) for j in range(k + 1))
    semi, hb = _band_quotient(p.grid, p.derivative(k), alpha, band, absolute)
    return HolderEstimate(k, alpha, 0.0, sup_part + semi, hb, semi, sup_part)


def dyadic_grid(j_max: int, per_collar: int = 129, j_min: int = 0) -> np.ndarray:
    """Uniform nodes inside each collar [2^{-j-1}, 2^{-j}], j_min <= j <= j_max."""
    parts = [np.linspace(2.0 ** (-j - 1), 2.0 ** (-j), per_collar) for j in range(j_min, j_max + 1)]
    return np.unique(np.concatenate(parts))


def _collar_masks(grid: np.ndarray, min_nodes: int = 8):
    jmax = int(np.floor(-np.log2(grid.min()))) + 1
    for j in range(0, jmax + 1):
        lo, hi = 2.0 ** (-j - 1), 2.0 ** (-j)
        mask = (grid >= lo * (1 - 1e-12)) & (grid <= hi * (1 + 1e-12))
        if mask.sum() >= min_nodes:
            yield j, mask


def collar_norms(p: RadialProfile, l: int, beta: float, delta: float = 0.0, scaled: bool = True,
                 band=BAND, include_sup: bool = True) -> list[tuple[int, float, tuple[float, float]]]:
    """Per-collar C^{l,beta} norm of rho^{-delta} p on a profile whose grid variable is rho.

    With ``scaled`` lengths are measured in units of the collar size (chart
    norm); without it the classical quotient is reported per collar.
    """
    p.require(l, "collar norm")
    rho = Jet.variable(p.grid, p.derivative_order)
    w = S.power(rho, -delta) * p.jet if delta else p.jet
    out = []
    for j, mask in _collar_masks(p.grid):
        scale = 2.0 ** (-j) if scaled else 1.0
        x = p.grid[mask]
        sup_part = sum(scale**i * float(np.max(np.abs(w.deriv(i)[mask]))) for i in range(l + 1)) if include_sup else 0.0
        semi, hb = _band_quotient(x, w.deriv(l)[mask], beta, band)
        out.append((j, sup_part + scale ** (l + beta) * semi, hb))
    if not out:
        raise ValueError("no populated dyadic collar")
    return out


def weighted_norm(p: RadialProfile, l: int, beta: float, delta: float, band=BAND) -> HolderEstimate:
    """Estimate of the weighted norm: sup over dyadic collars of the chart norm of rho^{-delta} p.

    ``p`` must be a profile in the variable rho.  Nodes with rho > 1 form the
    interior piece and enter through the plain classical norm (collar index -1).
    """
    cols = collar_norms(p, l, beta, delta, True, band)
    rows = [(j, v) for j, v, _ in cols]
    inner = p.grid > 1.0
    if inner.sum() >= 8:
        sub = p.restrict(inner)
        rho = Jet.variable(sub.grid, sub.derivative_order)
        est = holder_seminorm(sub.with_jet(S.power(rho, -delta) * sub.jet), l, beta, band)
        rows.insert(0, (-1, est.value))
    hmin = min(c[2][0] for c in cols)
    hmax = max(c[2][1] for c in cols)
    value = max(v for _, v in rows)
    return HolderEstimate(l, beta, delta, value, (hmin, hmax), collars=rows)


def collar_growth(rows, skip: int = 1) -> float:
    """Least-squares slope of log2(norm) against collar index, ignoring the first ``skip`` collars."""
    js = np.array([j for j, _ in rows if j >= 0], float)[skip:]
    vals = np.array([v for j, v in rows if j >= 0], float)[skip:]
    if js.size < 2:
        raise ValueError("need at least two collars for a growth rate")
    return float(np.polyfit(js, np.log2(np.maximum(vals, 1e-300)), 1)[0])


def reparametrize(u: Jet, rho: Jet) -> Jet:
    """Jet of u in the variable rho, given jets of u and rho in a common variable r."""
    K = min(u.order, rho.order)
    drho = Jet(rho.c[: K + 1].copy())
    drho.c[0] = 0.0
    inv = S.revert(drho)
    du = Jet(u.c[: K + 1].copy())
    base = du.c[0].copy()
    du.c[0] = 0.0
    out = S.compose(du, inv)
    out.c[0] = base
    return out


def profile_in_rho(g, rho_nodes, fn: Callable[[np.ndarray, int], Jet], order: int = 6, label: str = "") -> RadialProfile:
    """Profile in the variable rho of a function given by r-jets ``fn(r, order)``."""
    nodes = np.sort(np.asarray(rho_nodes, float))
    r = g.r_of_rho(nodes)
    jet = reparametrize(fn(r, order), g.rho(r, order))
    return RadialProfile(nodes, jet, label=label)
