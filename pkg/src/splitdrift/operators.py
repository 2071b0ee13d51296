"""Dense complex linear algebra kernel: Hermitian/unitary operators,
state vectors, matrix exponential/logarithm, commutators, expectations.

Conventions: ħ = 1 throughout, so a time step Δt enters exponentials as
x = -i·Δt.  All operators are dense square complex matrices; the single
exponential backend is spectral decomposition (exact to roundoff at the
dimensions this package targets, ≤ 4096).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BranchCutError,
    DimensionMismatchError,
    EigendecompositionError,
    HermiticityError,
    UnitarityError,
)

HERMITICITY_RTOL = 1e-12
UNITARITY_ATOL_PER_DIM = 1e-12
#: eigenvalue phases of a unitary closer than this to ±π are refused
BRANCH_CUT_MARGIN = 1e-6

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_matrix(op) -> np.ndarray:
    """Unwrap HermitianOperator/UnitaryOperator/ndarray to a complex array."""
    if isinstance(op, (HermitianOperator, UnitaryOperator)):
        return op.matrix
    return np.asarray(op, dtype=complex)


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix (energy units with ħ = 1).

    The constructor symmetrizes (M + M†)/2 when the Hermiticity defect is
    below ``HERMITICITY_RTOL`` relative to the Frobenius norm and refuses
    the matrix otherwise, so instances stay exactly Hermitian through
    arithmetic.  Instances are immutable and safe to share.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatchError(
                f"expected a square matrix, got shape {m.shape}")
        scale = max(1.0, float(np.linalg.norm(m)))
        defect = float(np.linalg.norm(m - m.conj().T))
        if defect > HERMITICITY_RTOL * scale:
            raise HermiticityError(
                f"Hermiticity defect {defect:.3e} exceeds "
                f"{HERMITICITY_RTOL:.0e} * {scale:.3e}")
        object.__setattr__(self, "matrix", _freeze((m + m.conj().T) / 2.0))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.matrix))

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(eigh_or_raise(self.matrix)[0])))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + as_matrix(other))

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix - as_matrix(other))

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.matrix * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True)
class UnitaryOperator:
    """Dense unitary matrix; ‖U†U − I‖_F ≤ dim·1e−12 enforced at construction."""

    matrix: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatchError(
                f"expected a square matrix, got shape {u.shape}")
        dim = u.shape[0]
        defect = float(np.linalg.norm(u.conj().T @ u - np.eye(dim)))
        if defect > dim * UNITARITY_ATOL_PER_DIM:
            raise UnitarityError(
                f"unitarity defect {defect:.3e} exceeds dim*1e-12 = "
                f"{dim * UNITARITY_ATOL_PER_DIM:.3e}")
        object.__setattr__(self, "matrix", _freeze(u))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class StateVector:
    """Complex state vector |Ψ⟩.

    Unit norm is *not* enforced here: unitary evolution preserves it to
    roundoff, while the non-unitary first-order stepper is expected to
    violate it, and that violation is exactly what drift reports record.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if psi.size < 1:
            raise DimensionMismatchError("state vector must be non-empty")
        object.__setattr__(self, "amplitudes", _freeze(psi))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n)

    def overlap(self, other: "StateVector") -> complex:
        """⟨self|other⟩."""
        if other.dim != self.dim:
            raise DimensionMismatchError(
                f"state dims differ: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def eigh_or_raise(matrix: np.ndarray):
    """Hermitian eigendecomposition with a diagnostic on LAPACK failure."""
    try:
        return np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionError(
            f"eigendecomposition failed to converge on a "
            f"{matrix.shape[0]}x{matrix.shape[0]} matrix "
            f"(norm {np.linalg.norm(matrix):.3e}): {exc}") from exc


def _exp_hermitian_times(matrix: np.ndarray, x: complex) -> np.ndarray:
    """exp(x·M) for Hermitian M via spectral decomposition.

    Exactly diagonal matrices are exponentiated entrywise, which keeps
    diagonal potential/stage operators cheap at large dimension.
    """
    if np.count_nonzero(matrix - np.diag(np.diagonal(matrix))) == 0:
        return np.diag(np.exp(x * np.diagonal(matrix).real))
    w, v = eigh_or_raise(matrix)
    return (v * np.exp(x * w)) @ v.conj().T


def expm(op: HermitianOperator, x: complex):
    """exp(x·M) for Hermitian M.

    Returns a UnitaryOperator when x is purely imaginary (the physical
    case x = -i·Δt), otherwise the raw matrix.
    """
    x = complex(x)
    result = _exp_hermitian_times(as_matrix(op), x)
    if x.real == 0.0:
        return UnitaryOperator(result)
    return result


def logm_unitary(u) -> np.ndarray:
    """Principal matrix logarithm of a unitary; returns an anti-Hermitian matrix.

    Refuses when any eigenvalue phase lies within ``BRANCH_CUT_MARGIN`` of
    ±π rather than silently picking a branch.
    """
    m = as_matrix(u)
    try:
        t, q = scipy.linalg.schur(m, output="complex")
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigendecompositionError(f"Schur decomposition failed: {exc}") from exc
    phases = np.angle(np.diagonal(t))
    if np.any(np.pi - np.abs(phases) < BRANCH_CUT_MARGIN):
        raise BranchCutError(
            "an eigenvalue phase of the unitary is within "
            f"{BRANCH_CUT_MARGIN:.0e} of ±π; reduce the time step so the "
            "principal branch is well separated")
    log_diag = 1j * phases
    out = (q * log_diag) @ q.conj().T
    # exact anti-Hermitization removes the O(eps) Schur noise
    return (out - out.conj().T) / 2.0


def commutator(a, b) -> np.ndarray:
    """[A, B] = AB − BA.  Anti-Hermitian for Hermitian inputs."""
    am, bm = as_matrix(a), as_matrix(b)
    if am.shape != bm.shape:
        raise DimensionMismatchError(
            f"commutator of shapes {am.shape} and {bm.shape}")
    return am @ bm - bm @ am


def hermitian_commutator(a, b) -> HermitianOperator:
    """i·[A, B], which is Hermitian when A and B are."""
    return HermitianOperator(1j * commutator(a, b))


def energy_expectation(h, psi: StateVector) -> float:
    """Re⟨Ψ|H|Ψ⟩ (not normalized by ‖Ψ‖²).

    The imaginary part is a pure roundoff artifact for Hermitian H; it is
    checked against 1e−12·‖H‖·‖Ψ‖² as an internal-consistency guard.
    """
    hm = as_matrix(h)
    if hm.shape[0] != psi.dim:
        raise DimensionMismatchError(
            f"operator dim {hm.shape[0]} vs state dim {psi.dim}")
    value = complex(np.vdot(psi.amplitudes, hm @ psi.amplitudes))
    bound = 1e-12 * np.linalg.norm(hm) * psi.norm**2
    if abs(value.imag) > bound:
        raise HermiticityError(
            f"imaginary part {value.imag:.3e} of ⟨H⟩ exceeds the roundoff "
            f"bound {bound:.3e}; operator is not Hermitian enough")
    return float(value.real)
