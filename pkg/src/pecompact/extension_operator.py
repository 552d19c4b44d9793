"""Mollifier extension of boundary data into a half-strip.

``F(x, y) = chi(x) x^l (phi_x * f)(y)`` with ``phi_x(z) = phi(z/x)/x`` and
``phi`` the normalized bump ``exp(-1/(1-z^2))`` on ``|z| < 1``.  The boundary
is one-dimensional (a strip over ``y in [-1, 1]``), which already exercises
every estimate since none of them depends on the boundary dimension.

The convolution is evaluated as ``int phi(z) f(y - x z) dz`` with a fixed
401-node trapezoid rule in ``z`` (spectrally accurate for the flat bump)
and weights normalized to sum to one, so constants are reproduced exactly and
odd moments vanish by symmetry of the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .holder_norms import holder_seminorm, _band_quotient
from .radial_operator import RadialProfile
from .series import Jet

# second moment of the normalized bump, by adaptive quadrature
M2 = 0.158113636264
Z_NODES = 401
SUPPORT = 0.9


def bump(z):
    z = np.asarray(z, float)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1
    out[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return out


def _smoothstep(t):
    """C-infinity transition from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.asarray(t, float)
    a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.maximum(1 - t, 1e-300)), 0.0)
    return a / (a + b)


def cutoff(x):
    """chi: 1 on [0, 1/2], 0 beyond 3/4, smooth in between."""
    return 1.0 - _smoothstep((np.asarray(x, float) - 0.5) / 0.25)


def plateau(y, inner: float = 0.5, outer: float = 0.85):
    """Smooth even function equal to 1 on |y| <= inner and 0 for |y| >= outer."""
    return 1.0 - _smoothstep((np.abs(np.asarray(y, float)) - inner) / (outer - inner))


def _kernel():
    z = np.linspace(-1.0, 1.0, Z_NODES)
    w = bump(z)
    return z, w / w.sum()


@dataclass
class BoundaryFunction:
    y: np.ndarray
    values: np.ndarray
    k: int = 0
    alpha: float = 1.0
    func: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, float)
        self.values = np.asarray(self.values, float)
        d = np.diff(self.y)
        if self.y[0] > -1 + 1e-12 or self.y[-1] < 1 - 1e-12 or np.ptp(d) > 1e-9 * d.mean():
            raise ValueError("boundary samples must sit on a uniform grid covering [-1, 1]")
        outside = np.abs(self.y) > SUPPORT
        if np.any(np.abs(self.values[outside]) > 1e-12 * max(1.0, np.max(np.abs(self.values)))):
            raise ValueError(f"support of f must lie in [-{SUPPORT}, {SUPPORT}]")

    @classmethod
    def from_callable(cls, func, ny: int = 801, k: int = 0, alpha: float = 1.0) -> "BoundaryFunction":
        y = np.linspace(-1.0, 1.0, ny)
        return cls(y, func(y), k, alpha, func)

    @property
    def h(self) -> float:
        return float(self.y[1] - self.y[0])

    def __call__(self, q):
        """Values off the grid: exact when a callable is attached, else local quintic interpolation."""
        q = np.asarray(q, float)
        if self.func is not None:
            return np.where(np.abs(q) <= 1.0, self.func(np.clip(q, -1, 1)), 0.0)
        return _lagrange(self.y, self.values, q)

    def scaled(self, a: float) -> "BoundaryFunction":
        f = self.func
        return BoundaryFunction(self.y, a * self.values, self.k, self.alpha, None if f is None else (lambda y: a * f(y)))


def _lagrange(y, v, q, width: int = 6):
    """Local Lagrange interpolation on a uniform grid; zero outside [-1, 1]."""
    h = y[1] - y[0]
    pad = width
    vv = np.concatenate([np.zeros(pad), v, np.zeros(pad)])
    t = (q - y[0]) / h + pad
    i0 = np.floor(t).astype(int) - width // 2 + 1
    i0 = np.clip(i0, 0, vv.size - width)
    out = np.zeros_like(q)
    idx = i0[..., None] + np.arange(width)
    for j in range(width):
        lj = np.ones_like(q)
        for m in range(width):
            if m != j:
                lj = lj * (t - idx[..., m]) / (idx[..., j] - idx[..., m])
        out = out + lj * vv[idx[..., j]]
    return np.where(np.abs(q) <= 1.0 + 1e-12, out, 0.0)


@dataclass
class StripFunction:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # shape (len(x), len(y))
    l: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, float)
        self.y = np.asarray(self.y, float)
        self.values = np.asarray(self.values, float)
        if self.values.shape != (self.x.size, self.y.size):
            raise ValueError("values must have shape (len(x), len(y))")

    def trace(self) -> np.ndarray:
        return self.values[0]

    def rows(self):
        return [[xi, *row] for xi, row in zip(self.x.tolist(), self.values.tolist())]


def mollified(f: BoundaryFunction, x: float, y=None) -> np.ndarray:
    """(phi_x * f)(y); equals f at x = 0."""
    if x == 0:
        return f.values.copy() if y is None else f(np.asarray(y, float))
    y = f.y if y is None else np.asarray(y, float)
    z, w = _kernel()
    return f(y[:, None] - x * z[None, :]) @ w


def mollify_extend(f: BoundaryFunction, k: int = 0, l: int = 0, x=None, nx: int = 97) -> StripFunction:
    """F(x, y) = chi(x) x^l (phi_x * f)(y) on [0, 0.96] x [-1, 1]."""
    if k < 0 or l < 0:
        raise ValueError("k and l must be non-negative")
    x = np.linspace(0.0, 0.96, nx) if x is None else np.asarray(x, float)
    if np.any(x < 0) or np.any(x >= 1):
        raise ValueError("strip coordinate x must lie in [0, 1)")
    vals = np.zeros((x.size, f.y.size))
    chi = cutoff(x)
    for i, xi in enumerate(x):
        if chi[i] == 0.0:
            continue
        vals[i] = chi[i] * xi**l * mollified(f, xi)
    return StripFunction(x, f.y, vals, l)


def extension_expansion(F: StripFunction, k: int, l: int | None = None, x_fit: float = 0.25, extra: int = 2):
    """Coefficients f_0..f_k of F = x^l (f_0 + x f_1 + ... + x^k f_k + ...), fitted per y.

    The fit uses degree ``k + extra`` on ``0 < x <= x_fit`` so that the first
    neglected terms do not leak into the reported ones.
    """
    l = F.l if l is None else l
    mask = (F.x > 0) & (F.x <= x_fit)
    if mask.sum() < k + extra + 2:
        raise ValueError("too few x-slices for the expansion fit")
    xs = F.x[mask]
    u = F.values[mask] / xs[:, None] ** l
    V = np.vander(xs, k + extra + 1, increasing=True)
    if np.linalg.cond(V) > 1e12:
        raise ValueError("ill-conditioned expansion fit")
    coef, *_ = np.linalg.lstsq(V, u, rcond=None)
    return coef[: k + 1]


def moment_coefficients(f: BoundaryFunction, k: int, derivs) -> list[np.ndarray]:
    """Oracle f_i = m_i (-1)^i f^{(i)}/i! from the kernel moments and supplied derivatives."""
    z, w = _kernel()
    out = []
    fact = 1.0
    for i in range(k + 1):
        fact = fact * max(i, 1)
        out.append(float(np.sum(w * (-z) ** i)) * np.asarray(derivs[i]) / fact)
    return out


def remainder_slope(f: BoundaryFunction, k: int, l: int, y0: float, h=None) -> tuple[float, np.ndarray, np.ndarray]:
    """Scaling exponent of the remainder of the x-expansion at y = y0.

    The (k+1)-th forward difference of ``F(x, y0)/x^l`` at step h annihilates
    the polynomial part through order k, so it scales like the remainder.
    """
    h = np.geomspace(2e-3, 2e-2, 7) if h is None else np.asarray(h, float)
    diffs = []
    for hi in h:
        xs = hi * np.arange(1, k + 3)
        u = np.array([mollified(f, xi, np.array([y0]))[0] for xi in xs])
        d = u
        for _ in range(k + 1):
            d = np.diff(d)
        diffs.append(abs(d[0]))
    diffs = np.asarray(diffs)
    slope = float(np.polyfit(np.log(h), np.log(diffs), 1)[0])
    return slope, h, diffs


def _d4(v, h, axis):
    """Fourth-order first derivative along ``axis`` (one-sided at the ends)."""
    v = np.moveaxis(v, axis, 0)
    d = np.empty_like(v)
    d[2:-2] = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    return np.moveaxis(d, 0, axis)


def _fd_derivs(values, step, order, axis):
    out = [values]
    cur = values
    for _ in range(order):
        cur = _d4(cur, step, axis)
        out.append(cur)
    return out


# physical scale band for norm comparisons across grids
NORM_BAND = (0.04, 0.2)


def boundary_norm(f: BoundaryFunction, k: int, alpha: float, band=NORM_BAND) -> float:
    derivs = np.stack(_fd_derivs(f.values, f.h, k, 0))
    p = RadialProfile(f.y, Jet.from_derivatives(derivs))
    return holder_seminorm(p, k, alpha, band, absolute=True).value


def strip_norm(F: StripFunction, order: int, alpha: float, x_max: float = 0.8, band=NORM_BAND, stride: int = 8) -> float:
    """C^{order,alpha} estimate on the strip: sup of all mixed derivatives plus axis quotients of the top ones."""
    mask = F.x <= x_max
    x, vals = F.x[mask], F.values[mask]
    hx, hy = x[1] - x[0], F.y[1] - F.y[0]
    total = 0.0
    top = []
    for a, dx in enumerate(_fd_derivs(vals, hx, order, 0)):
        for b, dxy in enumerate(_fd_derivs(dx, hy, order - a, 1)):
            total += float(np.max(np.abs(dxy)))
            if a + b == order:
                top.append(dxy)
    semi = 0.0
    for d in top:
        semi = max(semi, _band_quotient(x, d[:, ::stride], alpha, band, True)[0])
        semi = max(semi, _band_quotient(F.y, d[::stride].T, alpha, band, True)[0])
    return total + semi


def extension_norm_ratio(f: BoundaryFunction, k: int, l: int, alpha: float, nx: int = 97) -> float:
    """Estimated ||F||_{C^{k+l,alpha}} / ||f||_{C^{k,alpha}}."""
    F = mollify_extend(f, k, l, nx=nx)
    return strip_norm(F, k + l, alpha) / boundary_norm(f, k, alpha)


def weighted_derivative_ratio(f: BoundaryFunction, k: int, l: int, alpha: float, j: int = 1, nx: int = 97) -> float:
    """sup |x^j d_x^j F| relative to ||f||_{C^{k,alpha}}."""
    F = mollify_extend(f, k, l, nx=nx)
    d = _fd_derivs(F.values, F.x[1] - F.x[0], j, 0)[j]
    return float(np.max(np.abs(F.x[:, None] ** j * d))) / boundary_norm(f, k, alpha)


def quotient_by_rho(F: StripFunction, tol: float = 1e-10) -> StripFunction:
    """F/x, with the x = 0 column filled by cubic extrapolation of the quotient."""
    if F.x[0] != 0.0:
        raise ValueError("strip must contain the x = 0 slice")
    scale = max(float(np.max(np.abs(F.values))), 1e-300)
    if np.max(np.abs(F.values[0])) > tol * scale:
        raise ValueError("F does not vanish at x = 0; the quotient is undefined")
    q = np.empty_like(F.values)
    q[1:] = F.values[1:] / F.x[1:, None]
    xs = F.x[1:5]
    # Lagrange weights for evaluation at x = 0
    wts = np.array([np.prod([-xm / (xj - xm) for xm in xs if xm != xj]) for xj in xs])
    q[0] = wts @ q[1:5]
    return StripFunction(F.x, F.y, q, max(F.l - 1, 0))
