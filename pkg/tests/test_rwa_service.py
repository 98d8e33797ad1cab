import math

import numpy as np
import pytest
from scipy import special

from models.detector import DetectorParams
from utils.errors import PhysicsError


def test_lorentz_coefficients_at_strong_drive(rwa):
    D0, D2 = rwa.lorentz_coefficients(0.8)
    assert D0 == pytest.approx(0.8125, abs=5e-4)
    assert D2 == pytest.approx(0.1985, abs=2e-3)
    assert 0.8 * D0 == pytest.approx(0.65, abs=1e-3)


def test_lorentz_series_agrees_with_quadrature(rwa):
    for xi in (0.1, 0.5, 0.8):
        assert rwa.lorentz_series(xi) == pytest.approx(rwa.lorentz_coefficients(xi), rel=1e-6)


def test_weak_drive_limits(rwa):
    D0, D2 = rwa.lorentz_coefficients(1e-3)
    assert D0 == pytest.approx(1.0 - 1e-6 / 4, abs=1e-9)
    assert D2 == pytest.approx(1e-6 / 4, rel=1e-3)
    assert rwa.lorentz_coefficients(0.0) == (1.0, 0.0)
    assert rwa.lorentz_series(0.0) == pytest.approx((1.0, 0.0))


@pytest.mark.parametrize("xi", [1.0, 1.2, -0.1])
def test_superluminal_xi_is_rejected(rwa, xi):
    with pytest.raises(PhysicsError):
        rwa.lorentz_coefficients(xi)


def test_drive_coefficient_and_series_cross_check(rwa):
    C1 = rwa.drive_coefficient(0.8, 1.65)
    assert C1 == pytest.approx(0.428, abs=5e-3)
    assert rwa.drive_series_coefficient(0.8, 1.65) == pytest.approx(C1, rel=5e-3)
    assert rwa.drive_coefficient(0.0, 1.65) == 0.0


def test_solve_resonance(rwa):
    assert rwa.solve_resonance(0.8, 0.8) == pytest.approx(1.65, abs=1e-3)


def test_renormalized_coupling_reference_values(rwa, detector_params):
    c = rwa.renormalized_coupling(detector_params)
    assert c.omega_d == pytest.approx(0.65, abs=1e-3)
    assert c.B == pytest.approx(0.048, abs=1e-3)
    assert c.lam == pytest.approx(0.0021, rel=0.03)
    assert c.interaction_sign == 1


def test_renormalized_coupling_formula(rwa, detector_params):
    c = rwa.renormalized_coupling(detector_params)
    expected = 0.5 * detector_params.lambda0 * c.C1 * (1.0 - c.B ** 2 / 4 - c.B / 2)
    assert c.lam == pytest.approx(expected, rel=1e-3)


def test_large_damping_warns(rwa, caplog):
    p = DetectorParams(xi=0.3, omega_d0=0.8, lambda0=0.01, Omega_m=1.8, gamma=0.2)
    rwa.renormalized_coupling(p)
    assert any("not small" in r.message for r in caplog.records)


def test_single_mode_validity_first_near_resonance(rwa, detector_params):
    pairs = rwa.single_mode_validity(detector_params, k_max=40, n_max=40)
    first = pairs[0]
    assert (first.k, first.n) == (21, 34)
    assert first.detuning < 2e-3
    assert first.flagged
    assert all((r.k, r.n) != (1, 1) for r in pairs)
    assert [r.detuning for r in pairs] == sorted(r.detuning for r in pairs)
    assert len(pairs) == 40 * 40 - 1


def test_single_mode_validity_warns_off_resonance(rwa, caplog):
    p = DetectorParams(xi=0.8, omega_d0=0.8, lambda0=0.01, Omega_m=1.7, gamma=0.005)
    rwa.single_mode_validity(p, 5, 5)
    assert any("off the resonance" in r.message for r in caplog.records)


def test_detector_hamiltonian_coefficients(rwa, detector_params):
    h = rwa.detector_hamiltonian(detector_params)
    Omega = detector_params.Omega_m
    assert h.omega_a(3.0) == 1.0
    assert h.omega_b(0.0) == pytest.approx(0.8)
    quarter_period = math.pi / (2.0 * Omega)
    assert h.omega_b(quarter_period) == pytest.approx(0.8 * math.sqrt(1.0 - 0.64))
    assert h.g(0.0) == pytest.approx(0.01 * math.sin(0.8 / Omega))
    assert h.g(quarter_period) == pytest.approx(0.0, abs=1e-15)
    assert h.period == pytest.approx(2.0 * np.pi / Omega)


@pytest.mark.parametrize("xi", [0.1, 0.3, 0.5])
def test_second_harmonic_reconstructs_the_lorentz_factor(rwa, xi):
    D0, D2 = rwa.lorentz_coefficients(xi)
    theta = np.linspace(0.0, 2.0 * np.pi, 1000)
    exact = np.sqrt(1.0 - (xi * np.sin(theta)) ** 2)
    assert np.max(np.abs(D0 + D2 * np.cos(2.0 * theta) - exact)) < xi ** 4 / 8.0


def test_D0_falls_monotonically_with_speed(rwa):
    values = [rwa.lorentz_coefficients(xi)[0] for xi in np.linspace(0.0, 0.99, 34)]
    assert values[0] == 1.0
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_coupling_is_odd_in_the_bare_coupling(rwa):
    Omega_m = rwa.solve_resonance(0.8, 0.8)
    up = rwa.reduce(0.8, 0.8, 0.01, Omega_m)
    down = rwa.reduce(0.8, 0.8, -0.01, Omega_m)
    assert down.lam == pytest.approx(-up.lam, rel=1e-12)
    assert (up.interaction_sign, down.interaction_sign) == (1, -1)
    assert rwa.reduce(0.0, 0.8, 0.01, 1.8).lam == 0.0


def test_small_speed_limits(rwa):
    assert rwa.drive_coefficient(0.01, 1.65) == pytest.approx(0.01 / 1.65, rel=0.01)

    Omega_m = rwa.solve_resonance(0.1, 0.8)
    lam = rwa.reduce(0.1, 0.8, 0.01, Omega_m).lam
    assert lam == pytest.approx(0.5 * 0.01 * 2.0 * special.j1(0.1 / Omega_m), rel=0.02)


def test_single_mode_validity_exact_degeneracy(rwa):
    p = DetectorParams(xi=0.0, omega_d0=1.0, lambda0=0.01, Omega_m=2.0, gamma=0.005)
    pairs = rwa.single_mode_validity(p, k_max=5, n_max=9)
    first = pairs[0]
    assert (first.k, first.n) == (2, 3)
    assert first.detuning == 0.0
    assert first.flagged
    assert [(r.k, r.n) for r in pairs if r.detuning == 0.0] == [(2, 3), (3, 5), (4, 7), (5, 9)]
