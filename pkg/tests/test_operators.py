"""Operator layer: validation, exponentials, logarithms, expectations."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from splitdrift import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    BranchCutError,
    HermiticityError,
    HermitianOperator,
    StateVector,
    UnitarityError,
    UnitaryOperator,
    commutator,
    energy_expectation,
    expm,
    hermitian_commutator,
    logm_unitary,
)
from conftest import loop_quadratic_form, taylor_expm


def test_hermitian_accepts_and_symmetrizes_roundoff():
    m = np.array([[1.0, 0.5 + 1e-14j], [0.5, 2.0]], dtype=complex)
    op = HermitianOperator(m)
    assert np.allclose(op.matrix, op.matrix.conj().T)


def test_hermitian_rejects_gross_violation():
    with pytest.raises(HermiticityError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_norm_is_frobenius():
    op = HermitianOperator(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert op.norm() == pytest.approx(2.0, abs=1e-15)


def test_spectral_radius_of_diagonal():
    op = HermitianOperator(np.diag([3.0, -7.0, 2.0]))
    assert op.spectral_radius() == pytest.approx(7.0, abs=1e-12)


def test_hermitian_arithmetic():
    a = HermitianOperator(np.diag([1.0, 2.0]))
    b = HermitianOperator(PAULI_X)
    s = a + b
    assert np.allclose(s.matrix, np.array([[1.0, 1.0], [1.0, 2.0]]))
    d = a - b
    assert np.allclose(d.matrix, np.array([[1.0, -1.0], [-1.0, 2.0]]))
    scaled = 2.0 * a
    assert np.allclose(scaled.matrix, np.diag([2.0, 4.0]))


def test_unitary_rejects_non_unitary():
    with pytest.raises(UnitarityError):
        UnitaryOperator(np.array([[1.0, 0.0], [0.0, 1.5]]))


def test_state_vector_normalized_and_overlap():
    psi = StateVector(np.array([3.0, 4.0j]))
    assert psi.norm == pytest.approx(5.0)
    unit = psi.normalized()
    assert unit.norm == pytest.approx(1.0, abs=1e-15)
    assert abs(unit.overlap(unit)) == pytest.approx(1.0, abs=1e-14)


def test_pauli_commutator_identity():
    # [σx, σz] = −2i·σy
    assert np.allclose(commutator(PAULI_X, PAULI_Z), -2j * PAULI_Y,
                       atol=1e-15)


def test_hermitian_commutator_is_hermitian(rng):
    a, b = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            for _ in range(2))
    a = HermitianOperator((a + a.conj().T) / 2)
    b = HermitianOperator((b + b.conj().T) / 2)
    c = hermitian_commutator(a, b)
    assert np.allclose(c.matrix, c.matrix.conj().T, atol=1e-13)


def test_expm_matches_taylor_oracle(rng):
    g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    h = HermitianOperator((g + g.conj().T) / 2)
    for x in (-0.7j, 0.3, -1.3j):
        got = expm(h, x)
        want = taylor_expm(h.matrix, x)
        got_m = got.matrix if hasattr(got, "matrix") else np.asarray(got)
        assert np.linalg.norm(got_m - want) < 1e-12 * np.linalg.norm(want)


def test_expm_imaginary_returns_unitary(pauli_split):
    u = expm(pauli_split.total, -0.4j)
    assert isinstance(u, UnitaryOperator)
    umat = u.matrix
    assert np.linalg.norm(umat.conj().T @ umat - np.eye(2)) < 1e-13


def test_expm_diagonal_fast_path_matches_dense():
    diag = HermitianOperator(np.diag([0.2, -1.1, 3.0]))
    fast = expm(diag, -0.5j).matrix
    dense = taylor_expm(diag.matrix, -0.5j)
    assert np.linalg.norm(fast - dense) < 1e-13


def test_logm_inverts_expm(rng):
    g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = HermitianOperator((g + g.conj().T) / 2)
    dt = 0.9 / h.spectral_radius()
    u = expm(h, -1j * dt)
    recovered = logm_unitary(u) / (-1j * dt)
    assert np.linalg.norm(recovered - h.matrix) < 1e-11 * max(1.0, h.norm())


def test_logm_matches_scipy(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (g + g.conj().T) / 2
    u = UnitaryOperator(taylor_expm(h, -0.3j))
    ours = logm_unitary(u)
    ref = scipy.linalg.logm(u.matrix)
    assert np.linalg.norm(ours - ref) < 1e-10


def test_logm_rejects_phase_at_branch_cut():
    # Eigenphase exactly π sits on the cut of the principal logarithm.
    u = UnitaryOperator(np.diag([1.0, -1.0]).astype(complex))
    with pytest.raises(BranchCutError):
        logm_unitary(u)


def test_energy_expectation_matches_double_loop(rng):
    g = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    h = HermitianOperator((g + g.conj().T) / 2)
    psi = StateVector(rng.standard_normal(7)
                      + 1j * rng.standard_normal(7)).normalized()
    want = loop_quadratic_form(h.matrix, psi.amplitudes)
    assert abs(want.imag) < 1e-12
    got = energy_expectation(h, psi)
    assert got == pytest.approx(want.real, abs=1e-12)


def test_dimension_mismatch_raises(pauli_split):
    psi = StateVector(np.ones(3, dtype=complex))
    with pytest.raises(Exception):
        energy_expectation(pauli_split.total, psi)
