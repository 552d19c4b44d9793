"""Matplotlib figures written next to CSV/JSON outputs (Agg backend, no display)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def figure_path(out, suffix: str = "") -> Path:
    out = Path(out)
    return out.with_name(f"{out.stem}{suffix}.png")


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_compactification(comp, path, residual=None) -> Path:
    r = comp.rho_s.grid
    rho = comp.metric.rho(r).value
    fig, axes = plt.subplots(1, 2 if residual is None else 3, figsize=(11 if residual is None else 15, 4))
    axes[0].semilogy(r, comp.rho_s.values, label="rho_s")
    axes[0].semilogy(r, rho, "--", label="rho")
    axes[0].set_xlabel("r")
    axes[0].legend()
    axes[1].plot(r, comp.rho_s.values / rho)
    axes[1].set_xlabel("r")
    axes[1].set_title("rho_s / rho")
    if residual is not None:
        axes[2].semilogy(residual.grid, np.maximum(residual.values, 1e-18))
        axes[2].set_xlabel("r")
        axes[2].set_title("relative residual")
    fig.suptitle(f"{comp.metric.model}, n={comp.n}, s={comp.s:g}")
    return _save(fig, path)


def plot_identities(rows: list[dict], path) -> Path:
    names = [r["identity"] for r in rows]
    vals = np.maximum([r["sup_residual"] for r in rows], 1e-18)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.barh(names, vals)
    ax.set_xscale("log")
    ax.set_xlabel("sup residual")
    return _save(fig, path)


def plot_strip(F, path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    im = ax.pcolormesh(F.y, F.x, F.values, shading="auto")
    ax.set_xlabel("y")
    ax.set_ylabel("x")
    fig.colorbar(im, ax=ax)
    return _save(fig, path)


def plot_holder(estimate, path) -> Path:
    js, vals = zip(*[(j, v) for j, v in estimate.collars if j >= 0])
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.semilogy(js, vals, "o-")
    ax.set_xlabel("collar index j")
    ax.set_ylabel("local norm")
    return _save(fig, path)


def plot_report(report, path) -> Path:
    """Per-member values of every quantity that carries a member-level row."""
    qty: dict[str, list[tuple[str, float]]] = {}
    for row in report.rows:
        if row["member_id"] != "family" and np.isfinite(row["value"]):
            qty.setdefault(row["quantity"], []).append((row["member_id"], row["value"]))
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name, pts in sorted(qty.items()):
        vals = np.abs([v for _, v in pts])
        if vals.size and vals.max() > 0:
            ax.plot([m for m, _ in pts], vals, "o-", label=name)
    ax.set_yscale("log")
    ax.set_xlabel("member")
    ax.set_title(f"direction {report.direction}, s={report.s:g}, {'pass' if report.passed else 'FAIL'}")
    if qty:
        ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)
