"""Time-discretization schemes: unitary composition formulas, the
non-unitary first-order product stepper, and the exact propagator.

A ``CompositionScheme`` realizes one step of Π_j exp(−i·Δt·c_j·A_{p_j})
for a split Hamiltonian Σ A_p.  Stages are listed in product order: the
first listed stage is the leftmost factor and therefore acts *last* on
the state.  Per-part coefficients must sum to one — the first-order
consistency condition every finite-order formula shares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .models import SplitHamiltonian
from .operators import (
    HermitianOperator,
    StateVector,
    UnitaryOperator,
    _exp_hermitian_times,
    eigh_or_raise,
)

CONSISTENCY_ATOL = 1e-14


@dataclass(frozen=True)
class CompositionScheme:
    """Ordered stages (part index, real coefficient) with a nominal order."""

    name: str
    order: int
    stages: tuple
    unitary: bool = True

    def __post_init__(self):
        stages = tuple((int(j), float(c)) for j, c in self.stages)
        if not stages:
            raise ValueError("a scheme needs at least one stage")
        if any(j < 0 for j, _ in stages):
            raise ValueError("part indices must be non-negative")
        object.__setattr__(self, "stages", stages)
        for j in {j for j, _ in stages}:
            total = sum(c for i, c in stages if i == j)
            if abs(total - 1.0) > CONSISTENCY_ATOL:
                raise ValueError(
                    f"scheme {self.name!r}: coefficients for part {j} sum to "
                    f"{total!r}, not 1")

    @property
    def num_parts(self) -> int:
        return 1 + max(j for j, _ in self.stages)

    @property
    def is_palindromic(self) -> bool:
        return self.stages == tuple(reversed(self.stages))

    def scaled(self, factor: float) -> tuple:
        return tuple((j, c * factor) for j, c in self.stages)


@dataclass(frozen=True)
class EulerPathIntegral:
    """Non-unitary first-order stepper [1 + (−i·Δt·H)/n]^n.

    Each elementary factor 1 + x·H/n breaks unitarity; the n → ∞ limit
    recovers the exact propagator.
    """

    substeps: int = 1
    name: str = "euler-path-integral"
    order: int = 1
    unitary: bool = False

    def __post_init__(self):
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")


@dataclass(frozen=True)
class ExactScheme:
    """Exact propagator exp(−i·Δt·H), the zero-error control."""

    name: str = "exact"
    order: int = 0  # exact: no finite order
    unitary: bool = True


Scheme = CompositionScheme | EulerPathIntegral | ExactScheme


def trotter_scheme(num_parts: int = 2) -> CompositionScheme:
    """First-order product exp(xA₁)·exp(xA₂)·…·exp(xA_l)."""
    if num_parts < 2:
        raise ValueError(f"trotter needs at least 2 parts, got {num_parts}")
    return CompositionScheme(
        name="trotter", order=1,
        stages=tuple((j, 1.0) for j in range(num_parts)))


def strang_scheme() -> CompositionScheme:
    """Symmetric second-order product exp(xA/2)·exp(xB)·exp(xA/2)."""
    return CompositionScheme(
        name="strang", order=2,
        stages=((0, 0.5), (1, 1.0), (0, 0.5)))


def _fold(stages: tuple) -> tuple:
    """Merge adjacent stages acting on the same part (exp(aA)exp(bA) = exp((a+b)A))."""
    out: list[tuple[int, float]] = []
    for j, c in stages:
        if out and out[-1][0] == j:
            out[-1] = (j, out[-1][1] + c)
        else:
            out.append((j, c))
    return tuple(out)


def higher_order_scheme(base: CompositionScheme,
                        target_order: int) -> CompositionScheme:
    """Raise a symmetric scheme of even order 2k to ``target_order`` by the
    triple-jump recursion S_{2k+2}(Δt) = S_{2k}(w₁Δt)·S_{2k}(w₀Δt)·S_{2k}(w₁Δt)
    with w₁ = 1/(2 − 2^{1/(2k+1)}) and w₀ = 1 − 2w₁.

    w₀ is negative: a legitimate backward sub-step that leaves unitarity
    untouched.  The recursion preserves symmetry, so it can be applied
    repeatedly for orders 4, 6, …
    """
    if not base.is_palindromic:
        raise ValueError(f"base scheme {base.name!r} is not palindromic")
    if base.order % 2 != 0:
        raise ValueError(f"base order must be even, got {base.order}")
    if target_order % 2 != 0 or target_order <= base.order:
        raise ValueError(
            f"target order must be even and exceed the base order "
            f"{base.order}, got {target_order}")
    scheme = base
    while scheme.order < target_order:
        k2 = scheme.order
        w1 = 1.0 / (2.0 - 2.0 ** (1.0 / (k2 + 1)))
        w0 = 1.0 - 2.0 * w1
        stages = _fold(scheme.scaled(w1) + scheme.scaled(w0) + scheme.scaled(w1))
        scheme = CompositionScheme(
            name=f"triple-jump-{k2 + 2}", order=k2 + 2, stages=stages,
            unitary=base.unitary)
    return scheme


def scheme_registry() -> dict:
    """Constructors for every named scheme, keyed by catalog name."""
    return {
        "trotter": trotter_scheme,
        "strang": strang_scheme,
        "triple-jump-4": lambda: higher_order_scheme(strang_scheme(), 4),
        "triple-jump-6": lambda: higher_order_scheme(strang_scheme(), 6),
        "euler-path-integral": EulerPathIntegral,
        "exact": ExactScheme,
    }


def build_scheme(name: str, **params) -> Scheme:
    """Instantiate a registered scheme by name.

    ``trotter`` accepts num_parts, ``euler-path-integral`` accepts substeps;
    the rest take no parameters.
    """
    registry = scheme_registry()
    if name not in registry:
        raise ValueError(
            f"unknown scheme {name!r}; known: {', '.join(sorted(registry))}")
    try:
        return registry[name](**params)
    except TypeError as exc:
        raise ValueError(
            f"scheme {name!r} does not accept parameters {params!r}") from exc


@dataclass(frozen=True)
class StepOperator:
    """One-step evolution matrix with its provenance."""

    matrix: np.ndarray
    scheme_name: str
    dt: float
    unitary: bool

    def as_unitary(self) -> UnitaryOperator:
        return UnitaryOperator(self.matrix)


def exact_propagator(h: HermitianOperator, dt: float) -> StepOperator:
    """exp(−i·dt·H); conserves both norm and ⟨H⟩ to roundoff.

    dt = 0 is allowed and yields the identity.
    """
    return StepOperator(
        matrix=_exp_hermitian_times(h.matrix, -1j * dt),
        scheme_name="exact", dt=dt, unitary=True)


def euler_path_integral_step(split: SplitHamiltonian, dt: float,
                             n: int = 1) -> StepOperator:
    """[1 + (−i·dt)·H/n]^n for H = Σ A_j.  Strictly norm-increasing on any
    state not annihilated by H when n = 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    dim = split.dim
    factor = np.eye(dim, dtype=complex) + (-1j * dt / n) * split.total.matrix
    return StepOperator(
        matrix=np.linalg.matrix_power(factor, n),
        scheme_name=f"euler-path-integral(n={n})", dt=dt, unitary=False)


def stage_matrices(scheme: CompositionScheme, split: SplitHamiltonian,
                   dt: float) -> list[np.ndarray]:
    """Stage exponentials exp(−i·dt·c·A_j) in product order, computed once
    per (scheme, split, dt) and shared between repeated applications."""
    if scheme.num_parts != split.num_parts:
        raise DimensionMismatchError(
            f"scheme {scheme.name!r} addresses {scheme.num_parts} parts but "
            f"the split has {split.num_parts}")
    cache: dict[tuple[int, float], np.ndarray] = {}
    for j, c in scheme.stages:
        if (j, c) not in cache:
            cache[(j, c)] = _exp_hermitian_times(
                split.parts[j].matrix, -1j * dt * c)
    return [cache[(j, c)] for j, c in scheme.stages]


def step_operator(scheme: Scheme, split: SplitHamiltonian,
                  dt: float) -> StepOperator:
    """The full one-step matrix of any scheme on a given split."""
    if isinstance(scheme, ExactScheme):
        op = exact_propagator(split.total, dt)
        return StepOperator(op.matrix, scheme.name, dt, True)
    if isinstance(scheme, EulerPathIntegral):
        return euler_path_integral_step(split, dt, scheme.substeps)
    mats = stage_matrices(scheme, split, dt)
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return StepOperator(out, scheme.name, dt, scheme.unitary)


@dataclass(frozen=True)
class Trajectory:
    """Sampled states: times[i] is the physical time of states[i]."""

    times: np.ndarray
    states: np.ndarray

    def state(self, i: int) -> StateVector:
        return StateVector(self.states[i])


def _sample_steps(steps: int, sample_every: int) -> list[int]:
    idx = list(range(0, steps + 1, sample_every))
    if idx[-1] != steps:
        idx.append(steps)
    return idx


def apply_scheme(scheme: CompositionScheme, split: SplitHamiltonian,
                 dt: float, psi: StateVector, steps: int,
                 sample_every: int = 1) -> Trajectory:
    """Evolve ``steps`` steps, applying stage exponentials one by one
    (rightmost stage first), sampling every ``sample_every`` steps.
    The initial state is always included."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if sample_every < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    if psi.dim != split.dim:
        raise DimensionMismatchError(
            f"state dim {psi.dim} vs split dim {split.dim}")
    mats = stage_matrices(scheme, split, dt)[::-1]  # application order
    sample_at = set(_sample_steps(steps, sample_every))
    state = psi.amplitudes.copy()
    times = [0.0]
    states = [state.copy()]
    for step in range(1, steps + 1):
        for m in mats:
            state = m @ state
        if step in sample_at:
            times.append(step * dt)
            states.append(state.copy())
    return Trajectory(times=np.array(times), states=np.array(states))


class ExactEvolution:
    """Spectral evaluation of exp(−i·t·H)·ψ₀ at arbitrary times.

    Diagonalizes H once; every sample is then exact to roundoff with no
    step-to-step error accumulation, which is what makes it usable as the
    reference trajectory inside drift experiments.
    """

    def __init__(self, h: HermitianOperator):
        self._w, self._v = eigh_or_raise(h.matrix)

    def states_at(self, psi0: StateVector, times) -> np.ndarray:
        c0 = self._v.conj().T @ psi0.amplitudes
        times = np.asarray(times, dtype=float)
        phases = np.exp(-1j * np.outer(times, self._w))
        return (phases * c0) @ self._v.T

    def state_at(self, psi0: StateVector, t: float) -> StateVector:
        return StateVector(self.states_at(psi0, [t])[0])
