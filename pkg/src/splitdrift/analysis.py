"""Diagnostics for what finite-order unitary schemes actually generate.

A unitary scheme's one-step map equals exp(−i·Δt·H̃(Δt)) for an effective
(shadow) Hamiltonian H̃ = H + Σ_{n≥s} Δtⁿ·H_n.  This module extracts the
correction matrices H_n, tests whether an observable is a function of H
(the commutant test behind quantum non-integrability), and measures the
observable consequence: the energy expectation ⟨H⟩ drifts whenever the
leading correction fails to commute with H, while the norm stays exact.

Correction extraction evaluates H̃(Δt) = log(step)/(−i·Δt) on a symmetric
geometric ladder ±Δt·{1, ½, ¼} and solves the 6×6 Vandermonde system for
the matrix-valued polynomial coefficients.  Symmetric nodes separate odd
and even powers exactly, so a palindromic scheme's odd corrections come
out at roundoff instead of being polluted by even-order tails.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchCutError,
    DimensionMismatchError,
    InsufficientDataError,
    NumericalError,
    UnsupportedOrderError,
)
from .models import SplitHamiltonian, random_hermitian
from .operators import (
    HermitianOperator,
    StateVector,
    as_matrix,
    commutator,
    eigh_or_raise,
    expm,
    logm_unitary,
)
from .schemes import (
    CompositionScheme,
    ExactEvolution,
    ExactScheme,
    Scheme,
    _sample_steps,
    stage_matrices,
    step_operator,
)

MAX_BCH_ORDER = 4
#: relative eigenvalue gap below which two eigenvalues share a cluster
DEGENERACY_RTOL = 1e-8
#: gaps within this factor above the clustering tolerance are flagged
DEGENERACY_AMBIGUITY_FACTOR = 10.0
#: shadow ladder nodes relative to the base Δt; symmetric by construction
LADDER_NODES = (1.0, -1.0, 0.5, -0.5, 0.25, -0.25)
ROUNDOFF_FLOOR = 1e-13


def bch_truncated(x, y, order: int) -> np.ndarray:
    """log(e^X·e^Y) truncated at the given total order (1 ≤ order ≤ 4).

    Terms: X+Y; +½[X,Y]; +(1/12)([X,[X,Y]] + [Y,[Y,X]]); +(1/24)[X,[Y,[Y,X]]].
    Orders above 4 are declined, not extrapolated.
    """
    if not 1 <= order <= MAX_BCH_ORDER:
        raise UnsupportedOrderError(
            f"truncation order must be in 1..{MAX_BCH_ORDER}, got {order}")
    xm, ym = as_matrix(x), as_matrix(y)
    if xm.shape != ym.shape:
        raise DimensionMismatchError(
            f"operands have shapes {xm.shape} and {ym.shape}")
    z = xm + ym
    if order >= 2:
        xy = commutator(xm, ym)
        z = z + 0.5 * xy
    if order >= 3:
        z = z + (commutator(xm, xy) + commutator(ym, -xy)) / 12.0
    if order >= 4:
        z = z + commutator(xm, commutator(ym, -xy)) / 24.0
    return z


def bch_oracle_residuals(order: int, epsilons=(0.2, 0.1, 0.05, 0.025),
                         dim: int = 4, seed=0) -> "OrderEstimate":
    """Residual ‖bch_truncated(εX, εY, k) − log(e^{εX}·e^{εY})‖ against the
    matrix-log oracle on a seeded random anti-Hermitian pair; the fitted
    slope should be k+1."""
    epsilons = tuple(sorted(set(float(e) for e in epsilons), reverse=True))
    if len(epsilons) < 3:
        raise InsufficientDataError(
            f"need at least 3 epsilon values, got {len(epsilons)}")
    rng = np.random.default_rng(seed)
    hx = HermitianOperator(random_hermitian(rng, dim))
    hy = HermitianOperator(random_hermitian(rng, dim))
    ax, ay = -1j * hx.matrix, -1j * hy.matrix
    residuals = []
    for eps in epsilons:
        u = expm(hx, -1j * eps).matrix @ expm(hy, -1j * eps).matrix
        z = logm_unitary(u)
        residuals.append(float(np.linalg.norm(
            bch_truncated(eps * ax, eps * ay, order) - z)))
    slope, intercept, r2 = _loglog_fit(np.array(epsilons), np.array(residuals))
    return OrderEstimate(dts=np.array(epsilons), errors=np.array(residuals),
                         slope=slope, intercept=intercept, r_squared=r2)


def effective_hamiltonian(scheme: Scheme, split: SplitHamiltonian,
                          dt: float) -> HermitianOperator:
    """H̃(Δt) = log(one-step map)/(−i·Δt), the generator the scheme
    propagates exactly.  Requires a unitary scheme and |Δt| small enough
    that no step eigenphase reaches ±π."""
    if not scheme.unitary:
        raise ValueError(
            f"scheme {scheme.name!r} is not unitary; it has no Hermitian "
            "effective generator")
    if dt == 0.0:
        raise ValueError("dt must be nonzero")
    phase_reach = abs(dt) * split.total.spectral_radius()
    if phase_reach >= np.pi:
        # beyond this the principal log reconstructs an aliased generator,
        # not the physical one, with no numerical warning sign
        raise BranchCutError(
            f"|dt|·spectral_radius(H) = {phase_reach:.4g} ≥ π; "
            "reduce dt to stay on the principal branch")
    log_step = logm_unitary(step_operator(scheme, split, dt).matrix)
    h_eff = log_step / (-1j * dt)
    return HermitianOperator((h_eff + h_eff.conj().T) / 2.0)


@dataclass(frozen=True)
class ShadowHamiltonian:
    """H̃(Δt) ≈ base + Σ_{n=1}^{truncation} Δtⁿ·H_n.

    ``corrections`` holds (n, H_n) with Hermitian H_n; orders below the
    scheme's nominal order come out at the extraction noise floor.
    ``consistency_defect`` is ‖C₀ − base‖_F from the fit, a health check
    on the extraction.
    """

    base: HermitianOperator
    corrections: tuple
    truncation: int
    dt: float
    consistency_defect: float = 0.0

    def correction(self, n: int) -> np.ndarray:
        for order, mat in self.corrections:
            if order == n:
                return mat
        raise KeyError(f"no correction of order {n} (truncation {self.truncation})")

    def correction_norm(self, n: int) -> float:
        return float(np.linalg.norm(self.correction(n)))

    def evaluate(self, dt: float) -> np.ndarray:
        """base + Σ dtⁿ·H_n at an arbitrary step size."""
        out = self.base.matrix.copy()
        for n, mat in self.corrections:
            out = out + dt**n * mat
        return out


def shadow_hamiltonian(scheme: Scheme, split: SplitHamiltonian, dt: float,
                       truncation: int = MAX_BCH_ORDER) -> ShadowHamiltonian:
    """Extract correction matrices H_1..H_truncation for a unitary scheme.

    Evaluates H̃ on the symmetric ladder ±dt·{1, ½, ¼} and solves the
    Vandermonde system for polynomial coefficients through order 5 (the
    order-5 slack absorbs the leading tail instead of aliasing it into
    the reported corrections).  The base dt must keep every ladder point
    clear of the log's branch cut; good conditioning wants
    dt·spectral_radius(H) of order one.
    """
    if not 1 <= truncation <= MAX_BCH_ORDER:
        raise UnsupportedOrderError(
            f"truncation must be in 1..{MAX_BCH_ORDER}, got {truncation}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dim = split.dim
    nodes = np.array(LADDER_NODES)
    samples = np.empty((len(nodes), dim * dim), dtype=complex)
    for i, s in enumerate(nodes):
        samples[i] = effective_hamiltonian(scheme, split, s * dt).matrix.ravel()
    powers = np.vander(nodes, N=len(nodes), increasing=True)
    coeffs = np.linalg.solve(powers, samples)
    base = split.total
    corrections = []
    for n in range(1, truncation + 1):
        h_n = coeffs[n].reshape(dim, dim) / dt**n
        defect = float(np.linalg.norm(h_n - h_n.conj().T))
        if defect > 1e-10 * max(1.0, float(np.linalg.norm(h_n))):
            raise NumericalError(
                f"extracted order-{n} correction has Hermiticity defect "
                f"{defect:.3e}; extraction is ill-conditioned at dt={dt:g}")
        corrections.append((n, (h_n + h_n.conj().T) / 2.0))
    c0 = coeffs[0].reshape(dim, dim)
    return ShadowHamiltonian(
        base=base, corrections=tuple(corrections), truncation=truncation,
        dt=dt, consistency_defect=float(np.linalg.norm(c0 - base.matrix)))


@dataclass(frozen=True)
class CommutantResult:
    """Outcome of the commutant membership test for an observable Φ."""

    commutes: bool
    is_function_of_h: bool
    ambiguous_degeneracy: bool
    commutator_defect: float
    function_defect: float


def _eigenvalue_clusters(w: np.ndarray, rtol: float) -> list[slice]:
    scale = max(float(np.max(np.abs(w))), 1e-300)
    clusters = []
    start = 0
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > rtol * scale:
            clusters.append(slice(start, i))
            start = i
    clusters.append(slice(start, len(w)))
    return clusters


def commutant_test(phi, h, tol: float = 1e-10,
                   degeneracy_rtol: float = DEGENERACY_RTOL) -> CommutantResult:
    """Does Φ commute with H, and if so, is it merely a function of H?

    ``is_function_of_h`` requires Φ, in H's eigenbasis, to be block-diagonal
    across eigenvalue clusters and scalar within each cluster — for a
    nondegenerate spectrum that is exactly Φ = F(H) by interpolation.
    A degenerate H admits operators that commute without being functions
    of H (H = 1 with Φ = σx is the canonical counterexample).
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    pm, hm = as_matrix(phi), as_matrix(h)
    if pm.shape != hm.shape:
        raise DimensionMismatchError(
            f"operator shapes differ: {pm.shape} vs {hm.shape}")
    phi_norm = float(np.linalg.norm(pm))
    comm_defect = float(np.linalg.norm(commutator(pm, hm)))
    commutes = bool(
        comm_defect <= tol * max(phi_norm * float(np.linalg.norm(hm)), 1e-300))

    w, v = eigh_or_raise(hm)
    clusters = _eigenvalue_clusters(w, degeneracy_rtol)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    gaps = np.diff(w)
    ambiguous = bool(np.any(
        (gaps > degeneracy_rtol * scale)
        & (gaps <= DEGENERACY_AMBIGUITY_FACTOR * degeneracy_rtol * scale)))

    phi_eig = v.conj().T @ pm @ v
    residual = phi_eig.copy()
    for block in clusters:
        size = block.stop - block.start
        mean = np.trace(phi_eig[block, block]) / size
        residual[block, block] -= mean * np.eye(size)
    function_defect = float(np.linalg.norm(residual))
    is_function = bool(function_defect <= tol * max(phi_norm, 1e-300))
    return CommutantResult(
        commutes=commutes, is_function_of_h=is_function,
        ambiguous_degeneracy=ambiguous, commutator_defect=comm_defect,
        function_defect=function_defect)


@dataclass(frozen=True)
class DriftReport:
    """Sampled time series of ⟨H⟩, norm and fidelity against exact propagation.

    ``energy`` is the raw quadratic form Re⟨Ψ|H|Ψ⟩; ``fidelity`` is the
    normalized overlap |⟨Ψ_exact|Ψ_scheme⟩|²/(‖Ψ_exact‖²‖Ψ_scheme‖²), which
    stays ≤ 1 even for the non-unitary stepper.  Classical runs carry the
    energy series only.
    """

    times: np.ndarray
    energy: np.ndarray
    norm: np.ndarray | None
    fidelity: np.ndarray | None
    scheme_name: str
    dt: float
    model_id: str
    classical: bool = False
    wall_seconds: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        energy = np.asarray(self.energy, dtype=float)
        if times.shape != energy.shape:
            raise ValueError("times and energy lengths differ")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "energy", energy)
        for name in ("norm", "fidelity"):
            series = getattr(self, name)
            if series is not None:
                series = np.asarray(series, dtype=float)
                if series.shape != times.shape:
                    raise ValueError(f"{name} length differs from times")
                object.__setattr__(self, name, series)
        if self.fidelity is not None and np.any(self.fidelity > 1.0 + 1e-12):
            raise ValueError("fidelity exceeds 1 beyond roundoff")

    def max_energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy - self.energy[0])))

    def max_norm_deviation(self) -> float:
        if self.norm is None:
            raise ValueError("report has no norm series")
        return float(np.max(np.abs(self.norm - 1.0)))

    def min_fidelity(self) -> float:
        if self.fidelity is None:
            raise ValueError("report has no fidelity series")
        return float(np.min(self.fidelity))

    def relative_energy_error(self) -> np.ndarray:
        """|⟨H⟩(t) − ⟨H⟩(0)| / |⟨H⟩(0)| at each sample."""
        return np.abs(self.energy - self.energy[0]) / max(
            abs(float(self.energy[0])), 1e-300)

    def max_relative_energy_error(self) -> float:
        return float(np.max(self.relative_energy_error()))


def _evolve_sampled(scheme: Scheme, split: SplitHamiltonian, dt: float,
                    psi0: StateVector, steps: int,
                    sample_every: int) -> tuple[np.ndarray, np.ndarray]:
    """Times and sampled states for any scheme kind."""
    sample_idx = _sample_steps(steps, sample_every)
    times = np.array([i * dt for i in sample_idx])
    if isinstance(scheme, ExactScheme):
        return times, ExactEvolution(split.total).states_at(psi0, times)
    if isinstance(scheme, CompositionScheme):
        mats = stage_matrices(scheme, split, dt)[::-1]

        def advance(state):
            for m in mats:
                state = m @ state
            return state
    else:
        step = step_operator(scheme, split, dt).matrix

        def advance(state):
            return step @ state

    state = psi0.amplitudes.copy()
    states = [state.copy()]
    keep = set(sample_idx)
    # overflow is expected for the non-unitary stepper and is reported as
    # NumericalError below, so keep numpy from warning about it first
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, steps + 1):
            state = advance(state)
            # the euler stepper amplifies top modes geometrically; checking
            # ‖Ψ‖² also catches states whose entries are finite but whose
            # quadratic forms (norm, ⟨H⟩) would overflow in the report
            if not np.isfinite(np.vdot(state, state).real):
                raise NumericalError(
                    f"state left the finite range at step {i} "
                    f"(scheme {scheme.name!r}, dt={dt:g})")
            if i in keep:
                states.append(state.copy())
    return times, np.array(states)


def drift_experiment(scheme: Scheme, split: SplitHamiltonian, dt: float,
                     psi0: StateVector, steps: int, sample_every: int = 1,
                     model_id: str = "") -> DriftReport:
    """Evolve under the scheme and exactly from the same state; record
    ⟨H⟩, norm and fidelity-vs-exact at the sampled times."""
    if psi0.dim != split.dim:
        raise DimensionMismatchError(
            f"state dim {psi0.dim} vs split dim {split.dim}")
    start = time.perf_counter()
    times, states = _evolve_sampled(scheme, split, dt, psi0, steps, sample_every)
    exact_states = ExactEvolution(split.total).states_at(psi0, times)
    h = split.total.matrix
    h_states = states @ h.T  # row i is (H ψ_i)ᵀ
    energy = np.einsum("ij,ij->i", states.conj(), h_states).real
    norms = np.linalg.norm(states, axis=1)
    exact_norms = np.linalg.norm(exact_states, axis=1)
    overlap = np.abs(np.einsum("ij,ij->i", exact_states.conj(), states))
    fidelity = (overlap / (exact_norms * norms)) ** 2
    elapsed = time.perf_counter() - start
    return DriftReport(
        times=times, energy=energy, norm=norms, fidelity=fidelity,
        scheme_name=scheme.name, dt=dt, model_id=model_id,
        wall_seconds=elapsed)


@dataclass(frozen=True)
class OrderEstimate:
    """Least-squares slope of log(error) vs log(dt)."""

    dts: np.ndarray
    errors: np.ndarray
    slope: float
    intercept: float
    r_squared: float

    def __post_init__(self):
        dts = np.asarray(self.dts, dtype=float)
        errors = np.asarray(self.errors, dtype=float)
        if np.any(np.diff(dts) >= 0):
            raise ValueError("dts must be strictly decreasing")
        if np.any(errors <= 0):
            raise ValueError("errors must be positive")
        if not np.isfinite(self.slope):
            raise ValueError("slope is not finite")
        object.__setattr__(self, "dts", dts)
        object.__setattr__(self, "errors", errors)


def _loglog_fit(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float, float]:
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def observed_order(scheme: Scheme, split: SplitHamiltonian,
                   psi0: StateVector, dts, horizon: float = 1.0,
                   metric: str = "state") -> OrderEstimate:
    """Measured convergence order at a fixed horizon T.

    metric="state":  error = ‖Ψ_scheme(T) − Ψ_exact(T)‖₂
    metric="energy": error = |⟨H⟩(T) − ⟨H⟩(0)|, the energy-conservation order.

    Each dt must divide the horizon; errors below the 1e−13 roundoff floor
    are excluded, and fewer than 3 surviving points is an error.
    """
    dts = np.asarray(sorted(set(float(d) for d in dts), reverse=True))
    if len(dts) < 4:
        raise InsufficientDataError(
            f"need at least 4 dt values, got {len(dts)}")
    if metric not in ("state", "energy"):
        raise ValueError(f"unknown metric {metric!r}")
    h = split.total.matrix
    exact_final = ExactEvolution(split.total).state_at(psi0, horizon)
    e0 = float(np.vdot(psi0.amplitudes, h @ psi0.amplitudes).real)
    errors = []
    for dt in dts:
        steps = round(horizon / dt)
        if steps < 1 or abs(steps * dt - horizon) > 1e-9 * horizon:
            raise ValueError(
                f"dt={dt:g} does not divide the horizon T={horizon:g}")
        _, states = _evolve_sampled(scheme, split, dt, psi0, steps, steps)
        final = states[-1]
        if metric == "state":
            errors.append(float(np.linalg.norm(final - exact_final.amplitudes)))
        else:
            e_final = float(np.vdot(final, h @ final).real)
            errors.append(abs(e_final - e0))
    errors = np.asarray(errors)
    usable = errors > ROUNDOFF_FLOOR
    if np.count_nonzero(usable) < 3:
        raise InsufficientDataError(
            f"only {np.count_nonzero(usable)} error values above the "
            f"{ROUNDOFF_FLOOR:g} roundoff floor; cannot fit an order")
    slope, intercept, r2 = _loglog_fit(dts[usable], errors[usable])
    return OrderEstimate(dts=dts[usable], errors=errors[usable],
                         slope=slope, intercept=intercept, r_squared=r2)


@dataclass(frozen=True)
class GrowthFit:
    """Fit of ‖H_n‖_F ≈ A·Bⁿ over the extractable correction orders."""

    applicable: bool
    amplitude: float = float("nan")
    ratio: float = float("nan")
    r_squared: float = float("nan")
    orders: tuple = ()
    norms: tuple = ()
    reason: str = ""


def default_ladder_dt(split: SplitHamiltonian) -> float:
    """Base dt keeping ladder eigenphases near 0.5, well clear of ±π."""
    radius = split.total.spectral_radius()
    if radius == 0.0:
        return 1.0
    return 0.5 / radius


def correction_noise_floor(shadow: ShadowHamiltonian, n: int,
                           h_norm: float) -> float:
    """Norm below which an extracted H_n is indistinguishable from the
    ladder's roundoff (the solve divides O(ε·‖H‖) noise by dtⁿ)."""
    return 1e-11 * max(h_norm, 1.0) / shadow.dt**n


def growth_fit(shadow: ShadowHamiltonian,
               h_norm: float | None = None) -> GrowthFit:
    """Fit ‖H_n‖ ≈ A·Bⁿ over the correction orders that clear the
    extraction noise floor."""
    if h_norm is None:
        h_norm = shadow.base.norm()
    orders, norms = [], []
    for n, mat in shadow.corrections:
        norm = float(np.linalg.norm(mat))
        if norm > correction_noise_floor(shadow, n, h_norm):
            orders.append(n)
            norms.append(norm)
    if len(orders) < 3:
        return GrowthFit(
            applicable=False, orders=tuple(orders), norms=tuple(norms),
            reason=(f"only {len(orders)} correction orders above the noise "
                    "floor; growth model needs at least 3 (commuting or "
                    "near-integrable split)"))
    xs = np.array(orders, dtype=float)
    ly = np.log(np.array(norms))
    slope, intercept = np.polyfit(xs, ly, 1)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum((ly - (slope * xs + intercept)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return GrowthFit(
        applicable=True, amplitude=float(np.exp(intercept)),
        ratio=float(np.exp(slope)), r_squared=r2,
        orders=tuple(orders), norms=tuple(norms))


def correction_growth_fit(scheme: Scheme, split: SplitHamiltonian,
                          max_order: int = MAX_BCH_ORDER,
                          dt: float | None = None) -> GrowthFit:
    """Exponential growth model for the correction norms.

    Returns a flagged not-applicable result when fewer than 3 correction
    orders rise above the extraction noise floor (commuting splits have
    none at all).
    """
    if dt is None:
        dt = default_ladder_dt(split)
    shadow = shadow_hamiltonian(scheme, split, dt, truncation=max_order)
    return growth_fit(shadow, split.total.norm())


def min_timestep_bound(hs_norm: float, s: int) -> float:
    """Δt solving Δtˢ·‖H_s‖ = 1/Δt (ħ = 1): the uncertainty-relation lower
    bound Δt = ‖H_s‖^(−1/(s+1)) below which an order-s scheme's own error
    budget is inconsistent with the energy-time relation."""
    if hs_norm <= 0:
        raise ValueError(f"hs_norm must be positive, got {hs_norm}")
    if s < 1:
        raise ValueError(f"order s must be >= 1, got {s}")
    return float(hs_norm ** (-1.0 / (s + 1)))
