"""Experiment runner: parse a JSON config, run, emit CSV + sidecar + figure.

Exit codes: 0 success, 2 config error (message names the bad field),
3 numerical failure (branch cut, blown-up trajectory, fit with too few
points).  One experiment per invocation; reruns with the same config and
seed produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

import numpy as np

from ._version import __version__
from .analysis import (
    DEGENERACY_RTOL,
    bch_oracle_residuals,
    commutant_test,
    correction_noise_floor,
    drift_experiment,
    growth_fit,
    min_timestep_bound,
    observed_order,
    shadow_hamiltonian,
)
from .classical import ClassicalState, classical_drift_experiment
from .config import ExperimentConfig, load_config
from .errors import ConfigError, SplitDriftError
from .models import (
    GridModel,
    SplitHamiltonian,
    build_grid_hamiltonian,
    gaussian_packet,
    random_hermitian,
    toy_model,
)
from .operators import PAULI_X, PAULI_Y, PAULI_Z, HermitianOperator, StateVector, commutator
from .reports import (
    bch_table,
    bound_table,
    commutant_table,
    drift_summary,
    drift_table,
    order_table,
    shadow_table,
    write_csv,
    write_sidecar,
)
from .schemes import build_scheme, scheme_registry

#: catalog blurbs; anything registered without one falls back to its fields
_SCHEME_NOTES = {
    "trotter": "exp(ΔtX₁)⋯exp(ΔtX_l), plain first-order product",
    "strang": "exp(ΔtX₁/2)·exp(ΔtX₂)·exp(ΔtX₁/2), palindromic",
    "triple-jump-4": "S₂(w₁Δt)·S₂(w₀Δt)·S₂(w₁Δt) on strang, w₀ < 0",
    "triple-jump-6": "triple-jump recursion applied twice",
    "euler-path-integral": "[1 + (−iΔtH)/n]ⁿ short-time kernel, norm-breaking",
    "exact": "eigendecomposition propagator exp(−iΔtH), zero error",
}


def build_model(cfg: ExperimentConfig) -> tuple[SplitHamiltonian, str,
                                                GridModel | None]:
    """Materialize the configured model as a split plus an identifier."""
    spec = cfg.model
    if spec["kind"] == "grid":
        model = GridModel(
            ndim=spec["ndim"], n=spec["n"], half_width=spec["half_width"],
            potential=spec["potential"],
            potential_params=spec.get("potential_params", {}))
        return build_grid_hamiltonian(model), model.model_id, model
    name = spec["name"]
    if name == "pauli_xz":
        return toy_model("pauli_xz"), "toy-pauli_xz", None
    if name == "random_hermitian":
        dim = spec.get("dim", 4)
        split = toy_model("random_hermitian", seed=cfg.seed, dim=dim)
        return split, f"toy-random_hermitian-d{dim}-seed{cfg.seed}", None
    split = toy_model("diagonal", parts=spec["parts"])
    return split, f"toy-diagonal-d{split.dim}", None


def build_state(cfg: ExperimentConfig, split: SplitHamiltonian,
                grid: GridModel | None) -> StateVector:
    spec = cfg.initial_state
    kind = spec["kind"]
    if kind == "gaussian":
        return gaussian_packet(
            grid, center=spec["center"], width=spec["width"],
            momentum=spec.get("momentum"),
            boundary_tol=cfg.tolerances.get("boundary_tol", 1e-8))
    if kind == "basis":
        index = spec["index"]
        if index >= split.dim:
            raise ConfigError(
                f"field 'initial_state.index': {index} out of range for "
                f"dimension {split.dim}")
        amplitudes = np.zeros(split.dim, dtype=complex)
        amplitudes[index] = 1.0
        return StateVector(amplitudes)
    rng = np.random.default_rng([cfg.seed, 1])
    amplitudes = rng.standard_normal(split.dim) \
        + 1j * rng.standard_normal(split.dim)
    return StateVector(amplitudes).normalized()


def build_observable(cfg: ExperimentConfig,
                     split: SplitHamiltonian) -> HermitianOperator:
    spec = cfg.observable
    kind = spec["kind"]
    if kind == "part":
        index = spec["index"]
        if index >= split.num_parts:
            raise ConfigError(
                f"field 'observable.index': {index} out of range for "
                f"{split.num_parts} parts")
        return split.parts[index]
    if kind == "h_power":
        return HermitianOperator(
            np.linalg.matrix_power(split.total.matrix, spec["power"]))
    if kind == "pauli":
        if split.dim != 2:
            raise ConfigError(
                "field 'observable.axis': Pauli observables need a "
                f"2-dimensional model, got dimension {split.dim}")
        return HermitianOperator(
            {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}[spec["axis"]])
    rng = np.random.default_rng([cfg.seed, 2])
    return HermitianOperator(random_hermitian(rng, split.dim))


def _run_drift(cfg: ExperimentConfig):
    split, model_id, grid = build_model(cfg)
    scheme = build_scheme(**cfg.scheme)
    psi0 = build_state(cfg, split, grid)
    report = drift_experiment(scheme, split, cfg.dt, psi0, cfg.steps,
                              cfg.sample_every, model_id)
    header, rows = drift_table(report)
    summary = drift_summary(report, h_norm=split.total.norm())

    def plotter(path):
        from .plots import plot_drift
        return plot_drift(report, path)

    return header, rows, summary, plotter


def _run_order(cfg: ExperimentConfig):
    split, model_id, grid = build_model(cfg)
    scheme = build_scheme(**cfg.scheme)
    psi0 = build_state(cfg, split, grid)
    estimate = observed_order(scheme, split, psi0, cfg.dt_ladder,
                              horizon=cfg.horizon, metric=cfg.metric)
    header, rows = order_table(estimate)
    summary = {
        "scheme": scheme.name, "model_id": model_id, "metric": cfg.metric,
        "horizon": cfg.horizon, "nominal_order": scheme.order,
        "slope": estimate.slope, "intercept": estimate.intercept,
        "r_squared": estimate.r_squared,
    }

    def plotter(path):
        from .plots import plot_order
        return plot_order(
            estimate, path,
            title=f"{scheme.name} {cfg.metric}-error convergence")

    return header, rows, summary, plotter


def _run_shadow(cfg: ExperimentConfig):
    split, model_id, grid = build_model(cfg)
    scheme = build_scheme(**cfg.scheme)
    shadow = shadow_hamiltonian(scheme, split, cfg.dt, cfg.truncation)
    header, rows = shadow_table(shadow)
    h_norm = split.total.norm()
    fit = growth_fit(shadow, h_norm)
    summary = {
        "scheme": scheme.name, "model_id": model_id, "dt": cfg.dt,
        "h_frobenius_norm": h_norm,
        "consistency_defect": shadow.consistency_defect,
        "correction_norms": {str(n): float(np.linalg.norm(m))
                             for n, m in shadow.corrections},
        "growth_fit": {
            "applicable": fit.applicable,
            "amplitude": fit.amplitude if fit.applicable else None,
            "ratio": fit.ratio if fit.applicable else None,
            "r_squared": fit.r_squared if fit.applicable else None,
            "reason": fit.reason,
        },
    }
    leading = next(
        (n for n, m in shadow.corrections
         if np.linalg.norm(m) > correction_noise_floor(shadow, n, h_norm)),
        None)
    if leading is not None:
        h_lead = shadow.correction(leading)
        lead_norm = float(np.linalg.norm(h_lead))
        comm = float(np.linalg.norm(commutator(split.total.matrix, h_lead)))
        summary["leading_order"] = leading
        summary["leading_commutator_norm"] = comm
        summary["leading_commutes_with_h"] = bool(
            comm <= 1e-6 * h_norm * lead_norm)
        summary["min_timestep_bound"] = min_timestep_bound(lead_norm, leading)
    else:
        summary["leading_order"] = None

    def plotter(path):
        from .plots import plot_shadow
        return plot_shadow(shadow, path)

    return header, rows, summary, plotter


def _run_commutant(cfg: ExperimentConfig):
    split, model_id, grid = build_model(cfg)
    phi = build_observable(cfg, split)
    tol = cfg.tolerances.get("commutant_tol", 1e-10)
    result = commutant_test(
        phi, split.total, tol=tol,
        degeneracy_rtol=cfg.tolerances.get("degeneracy_rtol",
                                           DEGENERACY_RTOL))
    header, rows = commutant_table(result)
    summary = {
        "model_id": model_id, "observable": cfg.observable,
        "commutes": result.commutes,
        "is_function_of_h": result.is_function_of_h,
        "ambiguous_degeneracy": result.ambiguous_degeneracy,
        "commutator_defect": result.commutator_defect,
        "function_defect": result.function_defect,
        "tol": tol,
    }

    def plotter(path):
        from .plots import plot_commutant
        return plot_commutant(result, path, tol)

    return header, rows, summary, plotter


def _run_classical(cfg: ExperimentConfig):
    spec = cfg.initial_state
    state = ClassicalState(spec["q"][0], spec["q"][1],
                           spec["p"][0], spec["p"][1], spec.get("t", 0.0))
    report = classical_drift_experiment(state, cfg.dt, cfg.steps,
                                        cfg.sample_every)
    header, rows = drift_table(report)
    summary = drift_summary(report)

    def plotter(path):
        from .plots import plot_drift
        return plot_drift(report, path)

    return header, rows, summary, plotter


def _run_bch_check(cfg: ExperimentConfig):
    estimates = [
        bch_oracle_residuals(cfg.order, cfg.epsilons, cfg.dim,
                             seed=[cfg.seed, trial])
        for trial in range(cfg.trials)
    ]
    header, rows = bch_table(estimates)
    slopes = [e.slope for e in estimates]
    summary = {
        "order": cfg.order, "expected_slope": cfg.order + 1,
        "dim": cfg.dim, "trials": cfg.trials, "slopes": slopes,
        "mean_slope": float(np.mean(slopes)),
    }

    def plotter(path):
        from .plots import plot_bch
        return plot_bch(estimates, path, cfg.order)

    return header, rows, summary, plotter


def _run_bound(cfg: ExperimentConfig):
    if cfg.hs_norm is not None:
        hs_norm = cfg.hs_norm
        source = "explicit"
    else:
        split, model_id, grid = build_model(cfg)
        scheme = build_scheme(**cfg.scheme)
        shadow = shadow_hamiltonian(scheme, split, cfg.dt)
        hs_norm = shadow.correction_norm(cfg.order)
        source = f"extracted from {model_id} at dt={cfg.dt:g}"
    bound = min_timestep_bound(hs_norm, cfg.order)
    header, rows = bound_table(hs_norm, cfg.order, bound)
    summary = {"hs_norm": hs_norm, "order": cfg.order,
               "dt_bound": bound, "source": source}

    def plotter(path):
        from .plots import plot_bound
        return plot_bound(hs_norm, cfg.order, bound, path)

    return header, rows, summary, plotter


_RUNNERS = {
    "drift": _run_drift,
    "order": _run_order,
    "shadow": _run_shadow,
    "commutant": _run_commutant,
    "classical": _run_classical,
    "bch-check": _run_bch_check,
    "bound": _run_bound,
}


def run_experiment(cfg: ExperimentConfig, out_dir, plot: bool = True) -> dict:
    """Run the configured experiment; write CSV, sidecar and (optionally)
    a PNG under out_dir.  Returns the summary with artifact paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    header, rows, summary, plotter = _RUNNERS[cfg.experiment](cfg)
    stem = cfg.stem()
    csv_path = write_csv(out_dir / f"{stem}.csv", header, rows)
    artifacts = {"csv": csv_path.name}
    if plot:
        artifacts["plot"] = plotter(out_dir / f"{stem}.png").name
    wall = time.perf_counter() - start
    sidecar = write_sidecar(out_dir / f"{stem}.json", cfg, summary,
                            artifacts, wall)
    artifacts["sidecar"] = sidecar.name
    return {"summary": summary, "artifacts": artifacts,
            "out_dir": str(out_dir)}


def list_schemes() -> str:
    """Human-readable catalog of every registered scheme."""
    lines = []
    for name, factory in scheme_registry().items():
        scheme = factory()
        order = "exact" if scheme.order == 0 else str(scheme.order)
        tag = f"order {order}" if scheme.unitary \
            else f"order {order}, NON-UNITARY"
        note = _SCHEME_NOTES.get(
            name, f"composition with {getattr(scheme, 'num_parts', '?')} parts")
        lines.append(f"{name} ({tag}): {note}")
    return "\n".join(lines)


def _summary_lines(summary: dict, indent: str = "  ") -> list[str]:
    lines = []
    for key, value in summary.items():
        if isinstance(value, float):
            lines.append(f"{indent}{key} = {value:.6g}")
        else:
            lines.append(f"{indent}{key} = {value}")
    return lines


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="splitdrift",
        description="Unitary-splitting drift experiments: run a JSON-"
                    "configured experiment and emit CSV + JSON + PNG.")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment from a config")
    run_p.add_argument("config", help="JSON config (or a result sidecar)")
    run_p.add_argument("--out", default=".",
                       help="output directory (default: current)")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the config's seed")
    run_p.add_argument("--no-plot", action="store_true",
                       help="skip the PNG figure")
    sub.add_parser("list-schemes", help="print the scheme catalog")
    sub.add_parser("version", help="print the library version")
    args = parser.parse_args(argv)

    if args.command == "list-schemes":
        print(list_schemes())
        return 0
    if args.command == "version":
        print(f"splitdrift {__version__}")
        return 0

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("field 'seed' must be >= 0")
            cfg = dataclasses.replace(cfg, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(cfg, args.out, plot=not args.no_plot)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SplitDriftError, ValueError, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(f"experiment: {cfg.experiment}")
    for line in _summary_lines(result["summary"]):
        print(line)
    names = ", ".join(sorted(result["artifacts"].values()))
    print(f"wrote {names} in {result['out_dir']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
