"""Uniform bounds across one-parameter families of Poincaré-Einstein metrics.

Compactness of a family is operationalized as uniform boundedness of the
discrete norm estimates of :mod:`pecompact.holder_norms`.  Every bound is
reported together with the member that achieves it.

Direction (a): bounds on the fixed compactifications ``bar g`` give bounds on
``phi_s = rho_s / rho`` with regularity ``(l, beta)`` chosen from ``2s - n``
and the declared ``(k, alpha)``.  Direction (b): for ``s > n/2 + 1`` or
``s = (n+1)/2`` and positive boundary scalar curvature, bounds on ``rho_s``
transfer back to ``rho / rho_s``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .compactification_solver import Compactification, regularity_threshold_probe, solve
from .curvature_lab import boundary_values, positivity_audit
from .holder_norms import dyadic_grid, holder_seminorm, profile_in_rho
from .model_geometry import RadialMetric, make_ads_schwarzschild, make_hyperbolic, rescale_defining_function

# tolerance on |d rho_s| <= 1
GRAD_TOL = 1e-8
# absolute scale band (in rho) for norm estimates; fixed so tables compare across grids
RHO_BAND = (0.004, 0.03)
COLLAR = 0.1


@dataclass
class FamilySpec:
    model: str = "ads_schw"
    params: list[float] = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    s_values: list[float] = field(default_factory=lambda: [2.0, 3.0, 3.5])
    n: int = 3
    k: int = 3
    alpha: float = 0.5
    l: int | None = None
    beta: float | None = None
    grid_size: int = 400
    r_max: float = 20.0
    per_collar: int = 65
    j_max: int = 8
    uniform_ratio: float = 4.0
    workers: int = 1
    rescale_boundary: bool = False

    @classmethod
    def from_json(cls, path) -> "FamilySpec":
        with open(path) as fh:
            data = json.load(fh)
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def members(self) -> list[tuple[str, RadialMetric]]:
        out = []
        for p in self.params:
            if self.model == "ads_schw":
                g = make_ads_schwarzschild(self.n, p, r_max=self.r_max, grid_size=self.grid_size)
                if self.rescale_boundary:
                    # same conformal class; representative with rho e^r -> 1
                    g = rescale_defining_function(g, g.params["C"])
                out.append((f"m={p:g}", g))
            elif self.model == "hyperbolic":
                out.append(("hyperbolic", make_hyperbolic(self.n, r_max=self.r_max, grid_size=self.grid_size)))
            else:
                raise ValueError(f"unknown family model {self.model!r}")
        return out

    def indices_a(self, s: float) -> tuple[int, float, str]:
        """(l, beta, case) from the trichotomy on 2s - n versus k + alpha."""
        if self.l is not None and self.beta is not None:
            return self.l, self.beta, "user"
        d = 2 * s - self.n
        if self.k + self.alpha < d:
            return self.k, self.alpha / 2, "a.1"
        if abs(d - round(d)) < 1e-12 and int(round(d)) % 2 == 1 and d > 0:
            return self.k, self.alpha / 2, "a.2"
        # l + beta < 2s - n
        l = max(int(math.ceil(d)) - 1, 0)
        beta = min(0.8 * (d - l), 0.99)
        return l, beta, "a.3"


@dataclass
class UniformBoundReport:
    direction: str
    s: float
    rows: list[dict] = field(default_factory=list)
    assertions: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, member: str, quantity: str, value: float, status: str = "info"):
        self.rows.append({"member_id": member, "quantity": quantity, "value": float(value), "bound_status": status})

    def check(self, name: str, ok: bool, value, bound, member: str = "family"):
        status = "pass" if ok else "FAIL"
        self.assertions.append({"name": name, "ok": bool(ok), "value": value, "bound": bound, "member": member})
        self.add(member, name, value if np.isscalar(value) else np.nan, status)

    @property
    def passed(self) -> bool:
        return all(a["ok"] for a in self.assertions)

    def values(self, quantity: str) -> dict:
        return {r["member_id"]: r["value"] for r in self.rows if r["quantity"] == quantity}

    def failures(self) -> list[dict]:
        return [a for a in self.assertions if not a["ok"]]


def _rho_nodes(g: RadialMetric, spec: FamilySpec) -> np.ndarray:
    top = float(g.rho(g.r_min).value)
    j_min = max(int(math.ceil(-math.log2(top))) + 1, 2)
    return dyadic_grid(spec.j_max, spec.per_collar, j_min)


def _norm_in_rho(g, nodes, fn, order, l, beta) -> float:
    p = profile_in_rho(g, nodes, fn, order=max(l + 2, 4))
    return holder_seminorm(p, l, beta, RHO_BAND, absolute=True).value


def _ratio_fn(g: RadialMetric, c: Compactification):
    """rho_s/rho as r-jets; equals phi_s for s != n and e^{phi} in the log-type case."""
    return lambda r, K: c.jets(r, K)[1] / g.rho(r, K)


def _interior_norm(g, fn, l: int, beta: float) -> float:
    """Classical norm of an r-jet function on the interior region rho > 1/4."""
    from .radial_operator import RadialProfile

    grid = g.grid()
    grid = grid[g.rho(grid).value > 0.25]
    return holder_seminorm(RadialProfile(grid, fn(grid, max(l + 1, 2))), l, beta, (0.1, 0.5), absolute=True).value


def metric_norm(g: RadialMetric, spec: FamilySpec, l: int | None = None, beta: float | None = None,
                comp: Compactification | None = None) -> float:
    """Norm estimate of the components of rho^2 g_+ (or rho_s^2 g_+ when ``comp`` is given).

    Near the boundary the components are taken in the coordinate rho,
    ``(u/rho_r)^2 d rho^2 + sum (u f_a)^2 g_a`` with ``u`` the defining function;
    on the interior region rho > 1/4 they are taken as plain functions of r.
    """
    from .radial_operator import RadialProfile

    l = spec.k if l is None else l
    beta = spec.alpha if beta is None else beta
    nodes = _rho_nodes(g, spec)

    def u(r, K):
        return g.rho(r, K) if comp is None else comp.jets(r, K)[1]

    def radial(r, K):
        return (u(r, K) / g.rho(r, K + 1).d()) ** 2

    comps = [radial] + [lambda r, K, a=a: (u(r, K) * g.warps(r, K)[a]) ** 2 for a in range(len(g.factors))]
    total = sum(_norm_in_rho(g, nodes, fn, l + 2, l, beta) for fn in comps)
    grid = g.grid()
    grid = grid[g.rho(grid).value > 0.25]
    K = l + 1
    inner = [u(grid, K) ** 2] + [(u(grid, K) * w) ** 2 for w in g.warps(grid, K)]
    total += sum(holder_seminorm(RadialProfile(grid, j), l, beta, (0.1, 0.5), absolute=True).value for j in inner)
    return total


def _member_a(mid, g, s, spec: FamilySpec):
    l, beta, case = spec.indices_a(s)
    c = solve(g, s)
    nodes = _rho_nodes(g, spec)
    out = {"member": mid, "case": case, "l": l, "beta": beta}
    out["gbar_norm"] = metric_norm(g, spec)
    ratio = _ratio_fn(g, c)
    out["phi_norm"] = _norm_in_rho(g, nodes, ratio, l + 2, l, beta) + _interior_norm(g, ratio, l, beta)
    out["phi_constant"] = out["phi_norm"] / out["gbar_norm"]
    grid = g.grid()
    phi = c.rho_s_at(grid) / g.rho(grid).value
    out["phi_min"], out["phi_max"] = float(np.min(phi)), float(np.max(phi))
    out["rho_s_sup"] = float(np.max(c.rho_s_at(grid)))
    aud = positivity_audit(c)
    out["max_grad"] = aud["max_grad"]
    out["min_J"], out["min_T"] = aud["min_J"], aud["min_T"]
    if case == "a.3":
        pr = regularity_threshold_probe(g, s, comp=c)
        out["obstruction_exponent"] = pr.exponent
        out["predicted_exponent"] = pr.predicted
    return out


class MemberFailure(RuntimeError):
    pass


def _map(spec: FamilySpec, fn, members):
    def run(m):
        try:
            return fn(*m)
        except Exception as exc:
            raise MemberFailure(f"member {m[0]}: {exc}") from exc

    if spec.workers > 1:
        with ThreadPoolExecutor(spec.workers) as ex:
            return list(ex.map(run, members))
    return [run(m) for m in members]


def _uniform(rep: UniformBoundReport, spec: FamilySpec, res: list[dict], name: str, raw: str, const: str | None):
    """Uniform bound on ``raw``: finite everywhere, and when ``const`` is given the
    input-normalized constant stays within ``uniform_ratio`` of the reference member's.
    Without ``const`` the raw values themselves are compared with the reference."""
    vals = np.array([r[raw] for r in res])
    i = int(np.argmax(vals))
    rep.add(res[i]["member"], f"{raw}_max_over_reference", vals.max() / vals[0])
    key = const or raw
    cs = np.array([r[key] for r in res])
    j = int(np.argmax(cs))
    ok = bool(np.all(np.isfinite(vals)) and cs.max() <= spec.uniform_ratio * cs[0])
    rep.check(name, ok, float(cs.max()), f"<= {spec.uniform_ratio} x {cs[0]:.6g}", res[j]["member"])


def run_direction_a(spec: FamilySpec, s: float) -> UniformBoundReport:
    if s <= spec.n / 2:
        raise ValueError(f"s must exceed n/2 = {spec.n / 2}")
    members = spec.members()
    rep = UniformBoundReport("a", s, meta={"spec": spec.to_dict()})
    res = _map(spec, lambda mid, g: _member_a(mid, g, s, spec), members)
    l, beta, case = spec.indices_a(s)
    rep.meta.update(l=l, beta=beta, case=case)
    for r in res:
        for q in ("gbar_norm", "phi_norm", "phi_constant", "phi_min", "phi_max", "rho_s_sup", "max_grad", "min_J", "min_T"):
            rep.add(r["member"], q, r[q])
    gb = [r["gbar_norm"] for r in res]
    rep.check("gbar_norms_finite", bool(np.all(np.isfinite(gb))), max(gb), "finite")
    _uniform(rep, spec, res, "phi_norm_uniform", "phi_norm", "phi_constant")
    c1 = min(r["phi_min"] for r in res)
    c2 = max(r["phi_max"] for r in res)
    rep.check("pinching_lower", c1 > 0, c1, "> 0", min(res, key=lambda r: r["phi_min"])["member"])
    rep.check("pinching_upper", bool(np.isfinite(c2)), c2, "finite", max(res, key=lambda r: r["phi_max"])["member"])
    for r in res:
        rep.check("grad_le_1", r["max_grad"] <= 1 + GRAD_TOL, r["max_grad"], f"<= 1 + {GRAD_TOL}", r["member"])
    if case == "a.3":
        target = (2 * s - spec.n) % 1.0
        for r in res:
            e = r["obstruction_exponent"]
            rep.check("obstruction_exponent", bool(np.isfinite(e) and abs(e - target) < 0.05), e, f"{target} +- 0.05", r["member"])
    return rep


def _check_b_range(n: int, s: float) -> None:
    if not (s > n / 2 + 1 or abs(s - (n + 1) / 2) < 1e-12):
        raise ValueError(
            f"direction (b) needs s > n/2 + 1 = {n / 2 + 1} or s = (n+1)/2 = {(n + 1) / 2}; for s = {s} "
            "the fractional Q-curvature obstruction rules out C^{k,alpha} regularity of the compactification"
        )


def _member_b(mid, g, s, spec: FamilySpec):
    c = solve(g, s)
    nodes = _rho_nodes(g, spec)
    k, beta = spec.k, spec.alpha / 2
    out = {"member": mid, "Rhat_positive": g.boundary.positive_scalar}
    grid = g.grid()
    out["rho_s_sup"] = float(np.max(c.rho_s_at(grid)))
    rho_s_fn = lambda r, K: c.jets(r, K)[1]  # noqa: E731
    out["gs_norm"] = metric_norm(g, spec, comp=c)
    out["rho_s_norm"] = _norm_in_rho(g, nodes, rho_s_fn, k + 3, k + 1, spec.alpha) + _interior_norm(g, rho_s_fn, k + 1, spec.alpha)
    out["rho_s_constant"] = out["rho_s_norm"] / out["gs_norm"]
    phi = c.rho_s_at(grid) / g.rho(grid).value
    out["phi_min"], out["phi_max"] = float(np.min(phi)), float(np.max(phi))
    aud = positivity_audit(c)
    out["max_grad"], out["min_J"], out["min_T"] = aud["max_grad"], aud["min_J"], aud["min_T"]
    rs = g.grid()
    rs = rs[g.rho(rs).value < COLLAR]
    _, rho_s, _ = c.jets(rs, 2)
    frame = g.frame(rs, 2, scale=rho_s)
    out["collar_grad_min"] = float(np.sqrt(np.min(frame.grad_norm2(rho_s).value)))

    def inv_phi(r, K):
        return g.rho(r, K) / c.jets(r, K)[1]

    out["ratio_norm"] = _norm_in_rho(g, nodes, inv_phi, k + 2, k, beta) + _interior_norm(g, inv_phi, k, beta)
    out["ratio_constant"] = out["ratio_norm"] / out["gs_norm"]
    if abs(s - (g.n + 1) / 2) < 1e-12:
        bv = boundary_values(c)
        out["H"] = bv["H"]
        out["T_sup"] = _t_sup(c)
    return out


def _t_sup(c: Compactification) -> float:
    from .curvature_lab import compactified_curvatures

    return compactified_curvatures(c).T.sup()


def run_direction_b(spec: FamilySpec, s: float) -> UniformBoundReport:
    _check_b_range(spec.n, s)
    members = spec.members()
    if not all(g.boundary.positive_scalar for _, g in members):
        raise ValueError("direction (b) requires positive boundary scalar curvature for every member")
    rep = UniformBoundReport("b", s, meta={"spec": spec.to_dict(), "beta": spec.alpha / 2})
    res = _map(spec, lambda mid, g: _member_b(mid, g, s, spec), members)
    for r in res:
        for q in ("gs_norm", "rho_s_sup", "rho_s_norm", "rho_s_constant", "phi_min", "phi_max", "max_grad",
                  "collar_grad_min", "ratio_norm", "ratio_constant", "min_J", "min_T", "H", "T_sup"):
            if q in r:
                rep.add(r["member"], q, r[q])
    _uniform(rep, spec, res, "S_i_rho_s_sup", "rho_s_sup", None)
    _uniform(rep, spec, res, "S_ii_rho_s_norm", "rho_s_norm", "rho_s_constant")
    c1 = min(r["phi_min"] for r in res)
    rep.check("S_iii_pinching", bool(c1 > 0 and np.isfinite(max(r["phi_max"] for r in res))), c1, "c > 0",
              min(res, key=lambda r: r["phi_min"])["member"])
    cmin = 0.5 * min(r["collar_grad_min"] for r in res)
    for r in res:
        ok = cmin < r["collar_grad_min"] and r["max_grad"] <= 1 + GRAD_TOL
        rep.check("S_iv_collar_gradient", ok, r["collar_grad_min"], f"({cmin:.4g}, 1]", r["member"])
    _uniform(rep, spec, res, "transfer_ratio_norm", "ratio_norm", "ratio_constant")
    if abs(s - (spec.n + 1) / 2) < 1e-12:
        _uniform(rep, spec, res, "S2_T_sup", "T_sup", None)
        for r in res:
            rep.check("H_positive", r["H"] > 0, r["H"], "> 0", r["member"])
    return rep


def norm_table(spec: FamilySpec, s: float) -> dict:
    """Per-member C^{k, alpha/2} estimates of rho_s, rho_s/rho and of the metric bar g_s."""
    out = {}
    beta = spec.alpha / 2
    for mid, g in spec.members():
        c = solve(g, s)
        nodes = _rho_nodes(g, spec)
        gs = metric_norm(g, spec, beta=beta, comp=c)
        rho_s = _norm_in_rho(g, nodes, lambda r, K: c.jets(r, K)[1], spec.k + 2, spec.k, beta)
        phi = _norm_in_rho(g, nodes, _ratio_fn(g, c), spec.k + 2, spec.k, beta)
        out[mid] = {"metric": gs, "rho_s": rho_s, "phi": phi}
    return out


def corollary_roundtrip(spec: FamilySpec, N: int, K: int) -> dict:
    """Norm tables at s = n/2 + N - 1/2 and t = n/2 + K - 1/2, each checked for uniform bounds."""
    n = spec.n
    s, t = n / 2 + N - 0.5, n / 2 + K - 0.5
    for v in (s, t):
        if v <= n / 2:
            raise ValueError("odd-integer offsets need N, K >= 1")
    tab_s = norm_table(spec, s)
    tab_t = tab_s if s == t else norm_table(spec, t)

    def bounded(tab, given):
        """Norms of one table controlled by the metric norms of the other, uniformly in the member."""
        ref = np.array([row["metric"] for row in given.values()])
        for key in ("metric", "rho_s", "phi"):
            vals = np.array([row[key] for row in tab.values()])
            const = vals / ref
            if not (np.all(np.isfinite(vals)) and const.max() <= spec.uniform_ratio * const[0]):
                return False
        return True

    bt, bs = bounded(tab_t, tab_s), bounded(tab_s, tab_t)
    return {"s": s, "t": t, "table_s": tab_s, "table_t": tab_t, "t_given_s": bt, "s_given_t": bs, "passed": bt and bs}
