"""Figure rendering for experiment artifacts.

Each experiment renders one PNG next to its CSV so a results directory
is browsable without downstream tooling.  The Agg backend is forced:
runs are headless and must not touch a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .analysis import CommutantResult, DriftReport, OrderEstimate, ShadowHamiltonian  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_drift(report: DriftReport, path) -> Path:
    """Energy deviation plus, for quantum runs, norm and fidelity defects."""
    if report.classical:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.semilogy(report.times[1:], np.maximum(
            report.relative_energy_error()[1:], 1e-18))
        ax.set_xlabel("time")
        ax.set_ylabel("|H(t) − H(0)| / |H(0)|")
        ax.set_title(f"leapfrog energy error, dt={report.dt:g}")
        fig.tight_layout()
        return _save(fig, path)
    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    axes[0].plot(report.times, report.energy - report.energy[0])
    axes[0].set_ylabel("⟨H⟩(t) − ⟨H⟩(0)")
    axes[0].set_title(f"{report.scheme_name} on {report.model_id}, "
                      f"dt={report.dt:g}")
    axes[1].semilogy(report.times, np.maximum(np.abs(report.norm - 1.0),
                                              1e-18))
    axes[1].set_ylabel("| ‖Ψ‖ − 1 |")
    axes[2].semilogy(report.times, np.maximum(1.0 - report.fidelity, 1e-18))
    axes[2].set_ylabel("1 − fidelity")
    axes[2].set_xlabel("time")
    fig.tight_layout()
    return _save(fig, path)


def plot_order(estimate: OrderEstimate, path, xlabel: str = "dt",
               title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(estimate.dts, estimate.errors, "o", label="measured")
    fit = np.exp(estimate.intercept) * estimate.dts ** estimate.slope
    ax.loglog(estimate.dts, fit, "--",
              label=f"slope {estimate.slope:.3f} (r²={estimate.r_squared:.4f})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("error")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_shadow(shadow: ShadowHamiltonian, path) -> Path:
    orders = [n for n, _ in shadow.corrections]
    norms = [max(float(np.linalg.norm(m)), 1e-18)
             for _, m in shadow.corrections]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.semilogy(orders, norms, "o-")
    ax.set_xticks(orders)
    ax.set_xlabel("correction order n")
    ax.set_ylabel("‖H_n‖_F")
    ax.set_title(f"shadow corrections at dt={shadow.dt:g}")
    fig.tight_layout()
    return _save(fig, path)


def plot_commutant(result: CommutantResult, path, tol: float) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    labels = ["‖[Φ,H]‖", "block-scalar defect"]
    values = [max(result.commutator_defect, 1e-18),
              max(result.function_defect, 1e-18)]
    ax.bar(labels, values, color=["tab:blue", "tab:orange"])
    ax.set_yscale("log")
    ax.axhline(tol, color="k", linestyle="--", label=f"tol = {tol:g}")
    ax.set_ylabel("Frobenius defect")
    verdict = (f"commutes={result.commutes}, "
               f"function of H={result.is_function_of_h}")
    ax.set_title(verdict)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_bch(estimates: list[OrderEstimate], path, order: int) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for i, est in enumerate(estimates):
        ax.loglog(est.dts, est.errors, "o-",
                  label=f"trial {i} (slope {est.slope:.2f})")
    ax.set_xlabel("ε")
    ax.set_ylabel("‖BCH − log oracle‖_F")
    ax.set_title(f"truncation order {order}: expected slope {order + 1}")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_bound(hs_norm: float, s: int, bound: float, path) -> Path:
    """The two error budgets Δtˢ·‖H_s‖ and 1/Δt cross at the bound."""
    dts = np.geomspace(bound / 10, bound * 10, 200)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(dts, hs_norm * dts**s, label=f"Δt^{s}·‖H_s‖ (scheme error)")
    ax.loglog(dts, 1.0 / dts, label="1/Δt (energy-time scale)")
    ax.axvline(bound, color="k", linestyle="--",
               label=f"Δt_min = {bound:.4g}")
    ax.set_xlabel("Δt")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)
