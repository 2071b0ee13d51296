"""CSV and JSON-sidecar emission.

Every experiment writes a delimited table (one row per sample) plus a
JSON sidecar carrying the normalized config, the library version, the
random-generator identity and summary statistics.  Numbers in the CSV
use 17 significant digits, which round-trips IEEE doubles exactly, so a
rerun with the same config and seed is byte-identical.  Wall-clock time
lives only in the sidecar for the same reason.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ._version import __version__
from .analysis import CommutantResult, DriftReport, OrderEstimate, ShadowHamiltonian
from .config import ExperimentConfig

#: generator identity recorded so frozen fixtures outlive library upgrades
RNG_DESCRIPTION = f"numpy {np.__version__} default_rng (PCG64)"


def format_value(value) -> str:
    """One CSV cell: bools as 0/1, integers verbatim, floats %.17g."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def write_csv(path, header: list[str], rows) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def drift_table(report: DriftReport) -> tuple[list[str], list[tuple]]:
    if report.classical:
        header = ["time", "energy", "classical"]
        rows = [(t, e, True) for t, e in zip(report.times, report.energy)]
        return header, rows
    header = ["time", "energy", "norm", "fidelity"]
    rows = list(zip(report.times, report.energy, report.norm,
                    report.fidelity))
    return header, rows


def order_table(estimate: OrderEstimate) -> tuple[list[str], list[tuple]]:
    return ["dt", "error"], list(zip(estimate.dts, estimate.errors))


def shadow_table(shadow: ShadowHamiltonian) -> tuple[list[str], list[tuple]]:
    header = ["order", "correction_norm"]
    rows = [(n, float(np.linalg.norm(mat))) for n, mat in shadow.corrections]
    return header, rows


def commutant_table(result: CommutantResult) -> tuple[list[str], list[tuple]]:
    header = ["commutes", "is_function_of_h", "ambiguous_degeneracy",
              "commutator_defect", "function_defect"]
    rows = [(result.commutes, result.is_function_of_h,
             result.ambiguous_degeneracy, result.commutator_defect,
             result.function_defect)]
    return header, rows


def bch_table(estimates: list[OrderEstimate]) -> tuple[list[str], list[tuple]]:
    header = ["trial", "epsilon", "residual"]
    rows = [(i, eps, err) for i, est in enumerate(estimates)
            for eps, err in zip(est.dts, est.errors)]
    return header, rows


def bound_table(hs_norm: float, s: int,
                bound: float) -> tuple[list[str], list[tuple]]:
    return ["hs_norm", "order", "dt_bound"], [(hs_norm, s, bound)]


def write_sidecar(path, config: ExperimentConfig, summary: dict,
                  artifacts: dict, wall_seconds: float) -> Path:
    path = Path(path)
    payload = {
        "config": config.to_dict(),
        "version": __version__,
        "rng": RNG_DESCRIPTION,
        "summary": summary,
        "artifacts": artifacts,
        "wall_seconds": wall_seconds,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def drift_summary(report: DriftReport, h_norm: float | None = None) -> dict:
    out = {
        "scheme": report.scheme_name,
        "model_id": report.model_id,
        "dt": report.dt,
        "samples": int(len(report.times)),
        "initial_energy": float(report.energy[0]),
        "max_energy_drift": report.max_energy_drift(),
        "max_relative_energy_error": report.max_relative_energy_error(),
    }
    if h_norm is not None:
        out["h_frobenius_norm"] = h_norm
        out["max_energy_drift_over_h_norm"] = (
            report.max_energy_drift() / h_norm)
    if report.norm is not None:
        out["max_norm_deviation"] = report.max_norm_deviation()
    if report.fidelity is not None:
        out["min_fidelity"] = report.min_fidelity()
    return out
