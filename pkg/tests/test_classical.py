"""Symplectic leapfrog on the classical quartic cross model."""

from __future__ import annotations

import numpy as np
import pytest

from splitdrift import (
    BENIGN_STATE,
    STIFF_STATE,
    ClassicalState,
    NumericalError,
    classical_drift_experiment,
    classical_energy,
    leapfrog_jacobian,
    leapfrog_step,
)


def test_energy_spot_values():
    assert classical_energy(ClassicalState(0.0, 0.0, 0.0, 0.0)) == 0.0
    assert classical_energy(STIFF_STATE) == pytest.approx(2.0, abs=1e-14)
    assert classical_energy(BENIGN_STATE) == pytest.approx(0.5, abs=1e-15)
    assert classical_energy(ClassicalState(1.0, 1.0, 1.0, 1.0)) \
        == pytest.approx(1.5, abs=1e-15)


def test_state_rejects_non_finite():
    with pytest.raises(ValueError):
        ClassicalState(float("nan"), 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        ClassicalState(0.0, float("inf"), 0.0, 0.0)


def test_free_flight_along_potential_valley():
    # On the q₂ = 0, p₂ = 0 line the force vanishes identically, so one
    # step is exact free flight with no roundoff at all.
    state = ClassicalState(0.7, 0.0, 1.3, 0.0)
    out = leapfrog_step(state, 0.25)
    assert out.q1 == 0.7 + 0.25 * 1.3
    assert out.q2 == 0.0 and out.p2 == 0.0
    assert out.p1 == 1.3
    assert out.t == 0.25


def test_step_advances_time():
    state = ClassicalState(1.0, 1.0, 0.0, 0.0, t=3.0)
    assert leapfrog_step(state, 0.5).t == pytest.approx(3.5)


def test_time_reversibility(rng):
    # Integrate forward, flip momenta, integrate the same number of
    # steps: a reversible integrator returns to the start to roundoff.
    dt, steps = 1e-3, 100
    for _ in range(10):
        start = ClassicalState(*rng.uniform(-1.5, 1.5, size=4))
        state = start
        for _ in range(steps):
            state = leapfrog_step(state, dt)
        state = ClassicalState(state.q1, state.q2, -state.p1, -state.p2)
        for _ in range(steps):
            state = leapfrog_step(state, dt)
        back = np.array([state.q1, state.q2, -state.p1, -state.p2])
        scale = max(1.0, float(np.linalg.norm(start.as_array())))
        assert np.linalg.norm(back - start.as_array()) < 1e-12 * scale


def test_jacobian_determinant_is_one(rng):
    for _ in range(10):
        state = ClassicalState(*rng.uniform(-1.5, 1.5, size=4))
        jac = leapfrog_jacobian(state, 1e-3)
        assert abs(np.linalg.det(jac) - 1.0) < 1e-8


def test_energy_error_is_second_order():
    dts = [4e-3, 2e-3, 1e-3, 5e-4]
    errors = []
    for dt in dts:
        report = classical_drift_experiment(
            BENIGN_STATE, dt, int(round(10.0 / dt)), sample_every=10)
        errors.append(report.max_relative_energy_error())
    slope = np.polyfit(np.log(dts), np.log(errors), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.3)


def test_benign_orbit_energy_error_is_bounded():
    report = classical_drift_experiment(BENIGN_STATE, 1e-3, 100_000,
                                        sample_every=100)
    rel = report.relative_energy_error()
    assert report.max_relative_energy_error() < 1e-6
    # oscillatory, not secular: the late half is no worse than the early
    half = len(rel) // 2
    assert np.max(rel[half:]) <= 2.0 * np.max(rel[:half])


def test_stiff_orbit_amplifies_energy_error():
    stiff = classical_drift_experiment(STIFF_STATE, 1e-3, 100_000,
                                       sample_every=100)
    benign = classical_drift_experiment(BENIGN_STATE, 1e-3, 100_000,
                                        sample_every=100)
    ratio = stiff.max_relative_energy_error() \
        / benign.max_relative_energy_error()
    assert ratio >= 100.0


def test_drift_report_shape_and_metadata():
    report = classical_drift_experiment(
        ClassicalState(1.0, 1.0, 0.0, 0.0, t=5.0), 0.1, 10, sample_every=3)
    assert report.classical
    assert report.norm is None and report.fidelity is None
    assert report.scheme_name == "leapfrog"
    assert report.model_id == "classical-quartic_cross"
    assert np.allclose(report.times, [5.0, 5.3, 5.6, 5.9, 6.0], atol=1e-12)


def test_blowup_aborts_with_step_index():
    with pytest.raises(NumericalError, match="step"):
        classical_drift_experiment(STIFF_STATE, 0.5, 1000)


def test_drift_input_validation():
    with pytest.raises(ValueError):
        classical_drift_experiment(BENIGN_STATE, -0.1, 10)
    with pytest.raises(ValueError):
        classical_drift_experiment(BENIGN_STATE, 0.1, 0)
    with pytest.raises(ValueError):
        classical_drift_experiment(BENIGN_STATE, 0.1, 10, sample_every=0)
