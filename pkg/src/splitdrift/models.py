"""Concrete Hamiltonians and their splittings.

Grid models discretize H = kinetic + potential on a periodic box
x ∈ [−L, L) with N points per axis.  The kinetic operator is spectral:
the diagonal momentum-squared operator conjugated with the discrete
Fourier transform, so its eigenstructure is exact and all observed
time-discretization error belongs to the schemes, not the grid.

The 2D quartic model uses V = ½·q₁²·q₂², whose split parts do not
commute — the regime in which finite-order unitary schemes must trade
energy-expectation conservation for unitarity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError
from .operators import PAULI_X, PAULI_Z, HermitianOperator, StateVector

#: dense eigendecomposition stays a feasible exact oracle up to here
MAX_HILBERT_DIM = 4096

SPLIT_SUM_RTOL = 1e-10


def quartic_potential(q1, q2):
    """½·q1²·q2² (broadcasts over arrays)."""
    return 0.5 * q1**2 * q2**2


def harmonic_potential(q, omega: float = 1.0):
    """½·ω²·q²."""
    return 0.5 * omega**2 * q**2


#: named potentials usable in GridModel; each takes the meshgrid coords
POTENTIALS = {
    "zero": lambda *coords, **params: np.zeros_like(coords[0]),
    "harmonic": lambda q, omega=1.0: harmonic_potential(q, omega),
    "quartic_cross": lambda q1, q2: quartic_potential(q1, q2),
}


@dataclass(frozen=True)
class GridModel:
    """Periodic grid discretization of a kinetic+potential Hamiltonian.

    ndim: 1 or 2 spatial dimensions; n: points per axis (power of two);
    half_width: box half-width L, grid x ∈ [−L, L) with spacing 2L/n.
    """

    ndim: int
    n: int
    half_width: float
    potential: str
    potential_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ndim not in (1, 2):
            raise ValueError(f"ndim must be 1 or 2, got {self.ndim}")
        if self.n < 2 or self.n & (self.n - 1) != 0:
            raise ValueError(f"n must be a power of two >= 2, got {self.n}")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.potential not in POTENTIALS:
            raise ValueError(
                f"unknown potential {self.potential!r}; "
                f"known: {sorted(POTENTIALS)}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def hilbert_dim(self) -> int:
        return self.n**self.ndim

    def axis(self) -> np.ndarray:
        """Grid coordinates −L, −L+h, …, L−h along one axis."""
        return -self.half_width + self.spacing * np.arange(self.n)

    def meshgrid(self) -> list[np.ndarray]:
        return list(np.meshgrid(*([self.axis()] * self.ndim), indexing="ij"))

    def potential_values(self) -> np.ndarray:
        """V on the grid, same shape as the meshgrid."""
        return np.asarray(
            POTENTIALS[self.potential](*self.meshgrid(), **self.potential_params),
            dtype=float)

    @property
    def model_id(self) -> str:
        params = "".join(
            f"-{k}{v:g}" for k, v in sorted(self.potential_params.items()))
        return (f"grid{self.ndim}d-n{self.n}-L{self.half_width:g}"
                f"-{self.potential}{params}")


@dataclass(frozen=True)
class SplitHamiltonian:
    """Ordered Hermitian parts A₁…A_l with Σ A_j = total.

    The sum identity is the first-order consistency requirement every
    composition scheme inherits; it is enforced at construction.
    """

    parts: tuple
    total: HermitianOperator

    def __post_init__(self):
        parts = tuple(self.parts)
        if len(parts) < 1:
            raise ValueError("a split needs at least one part")
        dims = {p.dim for p in parts} | {self.total.dim}
        if len(dims) != 1:
            raise DimensionMismatchError(f"inconsistent part dims: {dims}")
        acc = np.zeros_like(self.total.matrix)
        for p in parts:
            acc = acc + p.matrix
        defect = float(np.linalg.norm(acc - self.total.matrix))
        if defect > SPLIT_SUM_RTOL * max(1.0, self.total.norm()):
            raise ValueError(
                f"parts do not sum to the total: defect {defect:.3e}")
        object.__setattr__(self, "parts", parts)

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    @property
    def dim(self) -> int:
        return self.total.dim


def momentum_values(n: int, half_width: float) -> np.ndarray:
    """Momentum grid k = π·m/L for m ∈ [−n/2, n/2), in FFT ordering."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=2.0 * half_width / n)


def kinetic_matrix(n: int, half_width: float) -> np.ndarray:
    """Dense 1D spectral kinetic operator p²/2 = F†·diag(k²/2)·F."""
    f = scipy.linalg.dft(n, scale="sqrtn")
    k2 = momentum_values(n, half_width) ** 2 / 2.0
    return f.conj().T @ (k2[:, None] * f)


def build_grid_hamiltonian(model: GridModel,
                           max_dim: int = MAX_HILBERT_DIM) -> SplitHamiltonian:
    """Two-part split A₁ = kinetic, A₂ = potential for a grid model."""
    dim = model.hilbert_dim
    if dim > max_dim:
        raise ValueError(
            f"Hilbert dimension {dim} exceeds the configured maximum "
            f"{max_dim}; reduce n or ndim")
    t1 = kinetic_matrix(model.n, model.half_width)
    if model.ndim == 1:
        kinetic = t1
    else:
        eye = np.eye(model.n)
        kinetic = np.kron(t1, eye) + np.kron(eye, t1)
    v = np.diag(model.potential_values().reshape(-1))
    a1 = HermitianOperator(kinetic)
    a2 = HermitianOperator(v)
    return SplitHamiltonian(parts=(a1, a2), total=a1 + a2)


def gaussian_packet(model: GridModel,
                    center=None,
                    width=None,
                    momentum=None,
                    boundary_tol: float = 1e-8) -> StateVector:
    """Normalized Gaussian wavepacket ψ ∝ exp(−(x−x₀)²/(4σ²) + i·k₀·x).

    Warns when the relative probability density on the outermost grid
    layer exceeds ``boundary_tol``: the box truncates the potential, so
    experiments must start well inside it.
    """
    center = np.broadcast_to(np.asarray(
        center if center is not None else 0.0, dtype=float), (model.ndim,))
    width = np.broadcast_to(np.asarray(
        width if width is not None else 1.0, dtype=float), (model.ndim,))
    momentum = np.broadcast_to(np.asarray(
        momentum if momentum is not None else 0.0, dtype=float), (model.ndim,))
    if np.any(width <= 0):
        raise ValueError(f"packet width must be positive, got {width}")
    psi = np.ones(model.meshgrid()[0].shape, dtype=complex)
    for ax, grid in enumerate(model.meshgrid()):
        psi = psi * np.exp(-((grid - center[ax]) ** 2) / (4.0 * width[ax] ** 2)
                           + 1j * momentum[ax] * grid)
    psi = psi.reshape(-1)
    psi = psi / np.linalg.norm(psi)
    density = (np.abs(psi) ** 2).reshape([model.n] * model.ndim)
    edge = np.zeros_like(density, dtype=bool)
    for ax in range(model.ndim):
        edge[(slice(None),) * ax + (0,)] = True
        edge[(slice(None),) * ax + (-1,)] = True
    boundary_density = float(density[edge].max())
    if boundary_density > boundary_tol:
        warnings.warn(
            f"wavepacket density {boundary_density:.2e} at the box boundary "
            f"exceeds {boundary_tol:.0e}; the periodic box will distort the "
            "dynamics — enlarge half_width or shrink the packet",
            stacklevel=2)
    return StateVector(psi)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Hermitian matrix with Gaussian entries, (G + G†)/2."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2.0


def toy_model(name: str, *, seed: int | None = None, dim: int | None = None,
              parts=None) -> SplitHamiltonian:
    """Small algebraic splits for oracle tests.

    pauli_xz          → parts (σx, σz), maximally noncommuting 2×2 case
    random_hermitian  → seeded two-part split of a random Hermitian matrix
    diagonal          → commuting diagonal parts from explicit entries
    """
    if name == "pauli_xz":
        a = HermitianOperator(PAULI_X)
        b = HermitianOperator(PAULI_Z)
        return SplitHamiltonian(parts=(a, b), total=a + b)
    if name == "random_hermitian":
        if seed is None or dim is None:
            raise ValueError("random_hermitian requires seed and dim")
        rng = np.random.default_rng(seed)
        a = HermitianOperator(random_hermitian(rng, dim))
        b = HermitianOperator(random_hermitian(rng, dim))
        return SplitHamiltonian(parts=(a, b), total=a + b)
    if name == "diagonal":
        if not parts:
            raise ValueError("diagonal requires a list of diagonal entries")
        ops = tuple(HermitianOperator(np.diag(np.asarray(d, dtype=float)))
                    for d in parts)
        total = ops[0]
        for op in ops[1:]:
            total = total + op
        return SplitHamiltonian(parts=ops, total=total)
    raise ValueError(f"unknown toy model {name!r}")
