import math

import numpy as np
import pytest

from models.gaussian_state import (
    CovarianceMatrix,
    MomentVector,
    check_physical,
    covariance_to_moments,
    detector_redshift,
    effective_temperature,
    log_negativity,
    moments_to_covariance,
    partial_transpose,
    steady_state_moments,
    symplectic_eigenvalues,
)
from utils.errors import PhysicsError


def test_vacuum_covariance_is_half_identity():
    g = moments_to_covariance(MomentVector.vacuum())
    np.testing.assert_allclose(g.gamma, 0.5 * np.eye(4), atol=1e-15)
    assert symplectic_eigenvalues(g) == pytest.approx((0.5, 0.5))
    assert log_negativity(g) == pytest.approx(0.0, abs=1e-12)


def test_steady_state_values():
    v = steady_state_moments(0.4)
    assert v.n_a == pytest.approx(0.888889, abs=1e-6)
    assert v.n_b == pytest.approx(v.n_a)
    assert v["adbd"] == pytest.approx(1.111111j, abs=1e-6)
    assert v["ab"] == pytest.approx(np.conj(v["adbd"]))
    assert steady_state_moments(0.48).n_a == pytest.approx(5.878, abs=1e-3)


@pytest.mark.parametrize("eta", [0.5, 0.6, -0.5])
def test_steady_state_rejects_instability(eta):
    with pytest.raises(PhysicsError):
        steady_state_moments(eta)


def test_log_negativity_matches_closed_form():
    for eta in np.linspace(0.0, 0.49, 50):
        g = moments_to_covariance(steady_state_moments(eta))
        assert log_negativity(g) == pytest.approx(math.log2(1.0 + 2.0 * eta), abs=1e-9)
    assert round(log_negativity(moments_to_covariance(steady_state_moments(0.4))), 4) == 0.8480


def test_log_negativity_limits():
    assert log_negativity(moments_to_covariance(steady_state_moments(0.0))) == pytest.approx(0.0, abs=1e-12)
    assert log_negativity(moments_to_covariance(steady_state_moments(0.49999))) == pytest.approx(1.0, abs=1e-4)


def test_effective_temperature_at_reference_eta():
    n = steady_state_moments(0.4).n_a
    assert effective_temperature(n, 1.0) == pytest.approx(1.3267, abs=1e-4)


def test_effective_temperature_divergence_trend():
    for eta in np.linspace(0.45, 0.495, 10):
        T = effective_temperature(steady_state_moments(eta).n_a, 1.0)
        assert T == pytest.approx(1.0 / (4.0 * (1.0 - 2.0 * eta)), rel=0.10)


def test_effective_temperature_needs_occupation():
    with pytest.raises(PhysicsError):
        effective_temperature(0.0, 1.0)


def test_round_trip_through_covariance():
    rng = np.random.default_rng(7)
    for _ in range(20):
        eta = rng.uniform(0.0, 0.49)
        v = steady_state_moments(eta).rotate(*rng.uniform(0.0, 2.0 * np.pi, size=2))
        back = covariance_to_moments(moments_to_covariance(v))
        np.testing.assert_allclose(back.entries, v.entries, atol=1e-12)


def test_local_rotation_keeps_entanglement():
    v = steady_state_moments(0.3)
    reference = log_negativity(moments_to_covariance(v))
    rng = np.random.default_rng(11)
    for phi_a, phi_b in rng.uniform(0.0, 2.0 * np.pi, size=(20, 2)):
        rotated = v.rotate(phi_a, phi_b)
        assert rotated.n_a == pytest.approx(v.n_a)
        assert abs(rotated["adbd"]) == pytest.approx(abs(v["adbd"]))
        assert log_negativity(moments_to_covariance(rotated)) == pytest.approx(reference, abs=1e-9)


def test_thermal_state_is_separable():
    g = CovarianceMatrix(2.5 * np.eye(4))
    check_physical(g)
    assert log_negativity(g) == 0.0
    assert symplectic_eigenvalues(partial_transpose(g)) == pytest.approx((2.5, 2.5))


def test_sub_vacuum_covariance_is_rejected():
    g = CovarianceMatrix(0.1 * np.eye(4))
    assert not g.is_physical()
    with pytest.raises(PhysicsError, match="eigenvalue"):
        check_physical(g)


def test_asymmetric_covariance_is_rejected():
    gamma = 0.5 * np.eye(4)
    gamma[0, 1] = 0.1
    with pytest.raises(PhysicsError):
        CovarianceMatrix(gamma)


def test_complex_occupation_is_rejected():
    v = MomentVector.from_dict({"ada": 0.3 + 1e-3j, "bdb": 0.3})
    with pytest.raises(PhysicsError):
        moments_to_covariance(v)


def test_unknown_moment_label():
    with pytest.raises(ValueError):
        MomentVector.from_dict({"abc": 1.0})


def test_detector_redshift():
    assert detector_redshift(0.8125, 0.1985, 1.65, 0.0) == pytest.approx(1.0 + 0.1985 / 0.8125)
    quarter = np.pi / (4.0 * 1.65)
    assert detector_redshift(0.8125, 0.1985, 1.65, quarter) == pytest.approx(1.0)
