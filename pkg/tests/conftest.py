"""Shared fixtures and independent oracle implementations.

The oracles deliberately avoid the library's eigendecomposition code
paths: the matrix exponential is summed as a scaled-and-squared Taylor
series, quadratic forms are explicit double loops, and the commutant
check works entrywise in the eigenbasis.  Library results are compared
against these, and where useful also against scipy's general-purpose
expm/logm, so an error in the library's eigh route cannot hide.
"""

from __future__ import annotations

import numpy as np
import pytest

from splitdrift import (
    GridModel,
    HermitianOperator,
    SplitHamiltonian,
    StateVector,
    build_grid_hamiltonian,
    gaussian_packet,
    toy_model,
)


def taylor_expm(matrix, x=1.0) -> np.ndarray:
    """exp(x·M) by scaling-and-squaring on the plain Taylor series."""
    a = np.asarray(matrix, dtype=complex) * x
    norm = float(np.linalg.norm(a, 1))
    squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 1.0 else 0
    a = a / 2.0**squarings
    dim = a.shape[0]
    out = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for j in range(1, 60):
        term = term @ a / j
        out = out + term
        if np.linalg.norm(term) < 1e-20 * max(1.0, np.linalg.norm(out)):
            break
    for _ in range(squarings):
        out = out @ out
    return out


def loop_quadratic_form(h, psi) -> complex:
    """⟨ψ|H|ψ⟩ as an explicit double loop."""
    h = np.asarray(h)
    psi = np.asarray(psi)
    acc = 0.0 + 0.0j
    for i in range(len(psi)):
        for j in range(len(psi)):
            acc += np.conj(psi[i]) * h[i, j] * psi[j]
    return acc


def brute_force_commutant(phi, h, tol=1e-10,
                          degeneracy_rtol=1e-8) -> tuple[bool, bool]:
    """Entrywise-in-eigenbasis reference for the commutant test.

    [Φ,H] in H's eigenbasis has entries Φ̃ᵢⱼ·(wⱼ − wᵢ); Φ is a function
    of H iff Φ̃ is zero across eigenvalue groups and a scalar multiple of
    the identity inside each group.
    """
    phi = np.asarray(phi, dtype=complex)
    h = np.asarray(h, dtype=complex)
    w, v = np.linalg.eigh(h)
    phi_e = v.conj().T @ phi @ v
    p_norm = float(np.linalg.norm(phi))
    h_norm = float(np.linalg.norm(h))
    comm = phi_e * (w[None, :] - w[:, None])
    commutes = float(np.linalg.norm(comm)) <= tol * max(p_norm * h_norm,
                                                        1e-300)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    groups = []
    start = 0
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > degeneracy_rtol * scale:
            groups.append(list(range(start, i)))
            start = i
    groups.append(list(range(start, len(w))))
    residual = phi_e.copy()
    for group in groups:
        mean = np.mean([phi_e[i, i] for i in group])
        for i in group:
            residual[i, i] -= mean
    is_function = float(np.linalg.norm(residual)) <= tol * max(p_norm, 1e-300)
    return bool(commutes), bool(is_function)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260815)


@pytest.fixture
def pauli_split() -> SplitHamiltonian:
    return toy_model("pauli_xz")


@pytest.fixture
def diagonal_split() -> SplitHamiltonian:
    return toy_model("diagonal",
                     parts=[[0.3, -1.2, 2.5, 0.7], [1.1, 0.4, -0.8, 1.9]])


@pytest.fixture
def random_split() -> SplitHamiltonian:
    return toy_model("random_hermitian", seed=11, dim=6)


@pytest.fixture
def pauli_state() -> StateVector:
    return StateVector(np.array([1.0, 0.5 + 0.5j], dtype=complex)).normalized()


@pytest.fixture(scope="session")
def quartic16():
    """Quartic cross model at N = 16 (dim 256), shared across tests."""
    model = GridModel(ndim=2, n=16, half_width=6.0,
                      potential="quartic_cross")
    return model, build_grid_hamiltonian(model)


@pytest.fixture(scope="session")
def quartic32():
    """The headline model: N = 32 (dim 1024) quartic cross, with the
    calibrated packet."""
    model = GridModel(ndim=2, n=32, half_width=6.0,
                      potential="quartic_cross")
    split = build_grid_hamiltonian(model)
    packet = gaussian_packet(model, center=(1.5, 1.5), width=0.7)
    return model, split, packet


def random_hermitian_pair(rng: np.random.Generator, dim: int):
    def one():
        g = rng.standard_normal((dim, dim)) \
            + 1j * rng.standard_normal((dim, dim))
        return HermitianOperator((g + g.conj().T) / 2.0)
    return one(), one()
