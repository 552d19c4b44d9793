"""Truncated Taylor series ("jets") with numpy coefficient arrays.

A :class:`Jet` stores normalized Taylor coefficients ``c[k] = u^(k)/k!`` of a
function about one or many expansion points at once.  The leading axis is the
order, trailing axes index the expansion points.  Arithmetic is exact Taylor
arithmetic truncated at the smaller order of the operands, so any expression
built from jets carries its own derivatives (forward-mode Taylor
differentiation).

The same class doubles as a formal power series in a boundary variable when it
has no trailing axes; :func:`compose` and :func:`revert` are provided for that
use.
"""

from __future__ import annotations

from math import factorial

import numpy as np


def _as_coeffs(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


class Jet:
    __array_priority__ = 1000

    def __init__(self, coeffs):
        c = _as_coeffs(coeffs)
        if c.ndim == 0:
            c = c[None]
        self.c = c

    # construction -------------------------------------------------------
    @classmethod
    def variable(cls, x, order: int) -> "Jet":
        """Jet of the identity map expanded about the points ``x``."""
        x = _as_coeffs(x)
        c = np.zeros((order + 1,) + x.shape)
        c[0] = x
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        c = np.zeros((order + 1,) + tuple(shape))
        c[0] = value
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs) -> "Jet":
        d = _as_coeffs(derivs)
        fac = np.array([factorial(k) for k in range(d.shape[0])], dtype=float)
        return cls(d / fac.reshape((-1,) + (1,) * (d.ndim - 1)))

    # basic accessors ----------------------------------------------------
    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def deriv(self, k: int) -> np.ndarray:
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {k}")
        return self.c[k] * factorial(k)

    def derivatives(self) -> np.ndarray:
        return np.stack([self.deriv(k) for k in range(self.order + 1)])

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])

    def d(self) -> "Jet":
        """Derivative with respect to the expansion variable (order drops by one)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1, dtype=float).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)

    def __getitem__(self, idx) -> "Jet":
        return Jet(self.c[(slice(None),) + (idx if isinstance(idx, tuple) else (idx,))])

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.c.shape[1:]})"

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        other = _as_coeffs(other)
        c = np.zeros((self.order + 1,) + np.broadcast_shapes(self.c.shape[1:], other.shape))
        c[0] = other
        return Jet(c)

    def _pair(self, other):
        o = self._coerce(other)
        k = min(self.order, o.order)
        return self.c[: k + 1], o.c[: k + 1]

    def __add__(self, other):
        a, b = self._pair(other)
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        a, b = self._pair(other)
        return Jet(a - b)

    def __rsub__(self, other):
        a, b = self._pair(other)
        return Jet(b - a)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * _as_coeffs(other))
        a, b = self._pair(other)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(a.shape[0]):
            out[k] = np.sum(a[: k + 1] * b[k::-1], axis=0)
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a = self.c
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            b[k] = -np.sum(a[1 : k + 1] * b[k - 1 :: -1][:k], axis=0) * b[0]
        return Jet(b)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / _as_coeffs(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(1.0, self.order, self.c.shape[1:])
            for _ in range(int(p)):
                out = out * self
            return out
        return power(self, float(p))


def _k_weights(n: int, ndim: int) -> np.ndarray:
    return np.arange(n, dtype=float).reshape((-1,) + (1,) * (ndim - 1))


def exp(u: Jet) -> Jet:
    a = u.c
    e = np.zeros_like(a)
    e[0] = np.exp(a[0])
    ia = a * _k_weights(a.shape[0], a.ndim)
    for k in range(1, a.shape[0]):
        e[k] = np.sum(ia[1 : k + 1] * e[k - 1 :: -1][:k], axis=0) / k
    return Jet(e)


def log(u: Jet) -> Jet:
    a = u.c
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k].copy()
        for i in range(1, k):
            acc -= i * out[i] * a[k - i] / k
        out[k] = acc / a[0]
    return Jet(out)


def power(u: Jet, p: float) -> Jet:
    """``u**p`` for real ``p`` (requires a nonzero leading coefficient)."""
    a = u.c
    b = np.zeros_like(a)
    b[0] = a[0] ** p
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc += (p * i - (k - i)) * a[i] * b[k - i]
        b[k] = acc / (k * a[0])
    return Jet(b)


def sqrt(u: Jet) -> Jet:
    return power(u, 0.5)


def _sinh_cosh(u: Jet, sign: float):
    a = u.c
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    if sign > 0:
        s[0], c[0] = np.sinh(a[0]), np.cosh(a[0])
    else:
        s[0], c[0] = np.sin(a[0]), np.cos(a[0])
    ia = a * _k_weights(a.shape[0], a.ndim)
    for k in range(1, a.shape[0]):
        s[k] = np.sum(ia[1 : k + 1] * c[k - 1 :: -1][:k], axis=0) / k
        c[k] = sign * np.sum(ia[1 : k + 1] * s[k - 1 :: -1][:k], axis=0) / k
    return Jet(s), Jet(c)


def sinh(u: Jet) -> Jet:
    return _sinh_cosh(u, 1.0)[0]


def cosh(u: Jet) -> Jet:
    return _sinh_cosh(u, 1.0)[1]


def sin(u: Jet) -> Jet:
    return _sinh_cosh(u, -1.0)[0]


def cos(u: Jet) -> Jet:
    return _sinh_cosh(u, -1.0)[1]


# formal power series helpers ------------------------------------------------

def compose(outer: Jet, inner: Jet) -> Jet:
    """Series of ``outer(inner(t))`` with ``inner(0) = 0`` (node-wise for vector jets)."""
    if np.any(np.abs(inner.c[0]) > 1e-300):
        raise ValueError("inner series must vanish at the origin")
    order = min(outer.order, inner.order)
    inner = inner.truncate(order)
    shape = np.broadcast_shapes(outer.c.shape[1:], inner.c.shape[1:])
    out = Jet.constant(outer.c[order], order, shape)
    for k in range(order - 1, -1, -1):
        out = out * inner + outer.c[k]
    return out


def revert(series: Jet) -> Jet:
    """Compositional inverse of a series with ``s(0) = 0``, ``s'(0) != 0``."""
    if np.any(np.abs(series.c[0]) > 1e-300) or np.any(series.c[1] == 0.0):
        raise ValueError("series must vanish at 0 with nonzero slope")
    order = series.order
    t = Jet.variable(np.zeros(series.c.shape[1:]), order)
    inv = t / series.c[1]
    for _ in range(order):
        inv = inv + (t - compose(series, inv)) / series.c[1]
    return inv
