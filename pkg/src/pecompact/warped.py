"""Curvature of multiply warped products with a radial conformal factor.

Every metric handled by the package has the form

    h = e^2 (dr^2 + sum_a f_a(r)^2 g_a)

with ``g_a`` an Einstein factor of dimension ``d_a`` and normalized sectional
curvature ``k_a`` (1 for unit spheres, 0 for circles).  Writing ``t`` for the
``h``-arclength (``dt = e dr``) and ``F_a = e f_a`` the metric is the plain
warped product ``dt^2 + sum F_a^2 g_a`` and its Ricci tensor is diagonal with

    Ric(dt, dt) = -sum_a d_a F_a'' / F_a
    Ric_a       = -F_a''/F_a - (d_a - 1)(F_a'^2 - k_a)/F_a^2
                  - sum_{b != a} d_b F_a' F_b' / (F_a F_b)

where primes are ``t``-derivatives.  Radial functions ``u`` have Hessian
eigenvalues ``u''`` (radial) and ``(F_a'/F_a) u'`` (factor ``a``).

All inputs are :class:`~pecompact.series.Jet` objects in ``r`` so every output
carries its own derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import Jet


@dataclass(frozen=True)
class WarpFactor:
    dim: int
    curvature: float
    label: str = ""


class WarpedFrame:
    """Curvature calculator for ``scale^2 (dr^2 + sum f_a^2 g_a)`` at a set of nodes."""

    def __init__(self, scale: Jet, warps: list[Jet], factors: tuple[WarpFactor, ...]):
        self.scale = scale
        self.factors = factors
        self.F = [scale * f for f in warps]
        self.dims = [fa.dim for fa in factors]
        self.N = 1 + sum(self.dims)  # total dimension

    def Dt(self, u: Jet) -> Jet:
        """Arclength derivative d/dt = scale^{-1} d/dr."""
        return u.d() / self.scale

    def log_rates(self) -> list[Jet]:
        return [self.Dt(F) / F for F in self.F]

    def mean_curvature(self) -> Jet:
        """Trace of the second fundamental form of the level sets, outward normal +dt."""
        rates = self.log_rates()
        out = rates[0] * self.dims[0]
        for d, h in zip(self.dims[1:], rates[1:]):
            out = out + h * d
        return out

    def ricci(self) -> tuple[Jet, list[Jet]]:
        rates = self.log_rates()
        second = [self.Dt(self.Dt(F)) / F for F in self.F]
        radial = second[0] * (-self.dims[0])
        for d, s2 in zip(self.dims[1:], second[1:]):
            radial = radial - s2 * d
        tang = []
        for a, fa in enumerate(self.factors):
            Fa = self.F[a]
            val = -second[a]
            if fa.dim > 1:
                val = val - (rates[a] * rates[a] - fa.curvature / (Fa * Fa)) * (fa.dim - 1)
            for b, fb in enumerate(self.factors):
                if b != a:
                    val = val - rates[a] * rates[b] * fb.dim
            tang.append(val)
        return radial, tang

    def scalar(self) -> Jet:
        radial, tang = self.ricci()
        out = radial
        for d, t in zip(self.dims, tang):
            out = out + t * d
        return out

    def weighted_norm2(self, radial: Jet, tang: list[Jet]) -> Jet:
        """|S|^2 for a diagonal symmetric 2-tensor given by its eigenvalues."""
        out = radial * radial
        for d, t in zip(self.dims, tang):
            out = out + t * t * d
        return out

    def laplacian(self, u: Jet) -> Jet:
        du = self.Dt(u)
        return self.Dt(du) + self.mean_curvature().truncate(du.order) * du

    def hessian(self, u: Jet) -> tuple[Jet, list[Jet]]:
        du = self.Dt(u)
        return self.Dt(du), [h * du for h in self.log_rates()]

    def grad_norm2(self, u: Jet) -> Jet:
        du = self.Dt(u)
        return du * du

    def inner(self, u: Jet, v: Jet) -> Jet:
        return self.Dt(u) * self.Dt(v)


def einstein_defect(frame: WarpedFrame, einstein_const: float) -> np.ndarray:
    """Pointwise max over eigen-components of |Ric - einstein_const * h|."""
    radial, tang = frame.ricci()
    parts = [np.abs(radial.value - einstein_const)]
    parts += [np.abs(t.value - einstein_const) for t in tang]
    return np.max(np.stack(parts), axis=0)
