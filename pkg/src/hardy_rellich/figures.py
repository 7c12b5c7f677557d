"""Matplotlib renderings saved next to the delimited outputs."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "convergence_figure",
    "sweep_figure",
    "decay_figure",
    "lambda_figure",
    "residual_figure",
]


def residual_figure(names, residuals, tol, path) -> None:
    """Per-check worst residuals of the identity suite against tolerance."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    pos = np.arange(len(names))
    floor = 1e-18
    ax.bar(pos, np.maximum(residuals, floor), color="tab:blue")
    ax.axhline(tol, color="k", ls="--", lw=1, label="tolerance")
    ax.set_yscale("log")
    ax.set_ylim(floor, max(tol * 10, 1e-8))
    ax.set_xticks(pos, names, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("max relative residual")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def convergence_figure(report, path) -> None:
    """Estimates over the refinement schedule against the sharp constant."""
    steps = np.arange(1, len(report.estimates) + 1)
    values = [e.value for e in report.estimates]
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax0.plot(steps, values, "o-", label="estimate")
    ax0.axhline(report.target, color="k", ls="--", lw=1, label="target")
    ax0.set_xlabel("refinement step")
    ax0.set_ylabel(f"{report.kind} quotient")
    ax0.legend(frameon=False)
    gaps = np.array(report.gaps)
    ax1.semilogy(steps, np.maximum(gaps, 1e-300), "s-")
    ax1.set_xlabel("refinement step")
    ax1.set_ylabel("estimate - target")
    ax1.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_figure(rows, path) -> None:
    """Regime map in the exponent plane, one panel per dimension."""
    dims = sorted({row["dim"] for row in rows})
    fig, axes = plt.subplots(1, len(dims), figsize=(4.0 * len(dims), 3.6), squeeze=False)
    for ax, dim in zip(axes[0], dims):
        cell = [row for row in rows if row["dim"] == dim]
        x = np.array([row["delta"] for row in cell])
        y = np.array([row["delta_prime"] for row in cell])
        ok = np.array([row["rellich_valid"] for row in cell], dtype=bool)
        hardy_only = np.array(
            [row["hardy_valid"] and not row["rellich_valid"] for row in cell], dtype=bool
        )
        ax.scatter(x[ok], y[ok], c="tab:green", s=28, label="Rellich")
        ax.scatter(x[hardy_only], y[hardy_only], c="tab:orange", s=28, label="Hardy only")
        rest = ~(ok | hardy_only)
        ax.scatter(x[rest], y[rest], c="tab:red", s=28, label="neither")
        lim = max(x.max(), y.max()) if x.size else 4.0
        ts = np.linspace(0, min(4.0, lim), 64)
        ax.plot(ts, 4.0 - ts, "k--", lw=1, label="delta + delta' = 4")
        # frontier where the commutator bound meets the Hardy constant
        gg = np.linspace(0, lim, 201)
        xx, yy = np.meshgrid(gg, gg)
        lo = np.minimum(xx, yy)
        hi = np.maximum(xx, yy)
        base = dim + lo - 2.0
        a1 = np.where(base > 0, base**2 / 4.0, -np.inf)  # invalid where base <= 0
        nu = np.maximum((1 - lo / 2) ** 2, (1 - hi / 2) ** 2)
        ax.contour(xx, yy, a1 - nu, levels=[0.0], colors="tab:blue", linewidths=1)
        ax.set_title(f"d = {dim}")
        ax.set_xlabel("delta")
        ax.set_ylabel("delta'")
    axes[0][0].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def decay_figure(values, bounds, energy_scale, path) -> None:
    """Localized-energy decay along the cutoff sequence."""
    steps = np.arange(1, len(values) + 1)
    fig, ax = plt.subplots(figsize=(5, 3.6))
    floor = 1e-300
    ax.semilogy(steps, np.maximum(values, floor), "o-", label="localized energy")
    ax.semilogy(steps, np.maximum(bounds, floor), "s--", label="ramp bound")
    ax.axhline(max(1e-6 * energy_scale, floor), color="k", ls=":", lw=1, label="1e-6 x energy")
    ax.set_xlabel("exhaustion step")
    ax.set_ylabel("energy")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def lambda_figure(lambdas, quotients, target, path) -> None:
    """Separated product quotient against the scaling parameter."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.loglog(lambdas, quotients, "o-", label="product quotient")
    ax.axhline(target, color="k", ls="--", lw=1, label="first-factor constant")
    ax.set_xlabel("lambda")
    ax.set_ylabel("quotient")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
