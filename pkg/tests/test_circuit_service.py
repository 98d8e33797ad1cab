from dataclasses import FrozenInstanceError, replace

import numpy as np
import pytest

from models.circuit import CircuitSpec, calibrated_inductance
from services.circuit_service import FLUX_QUANTUM, composite_gauss, converged_gauss
from utils.errors import PhysicsError


def test_calibrated_wave_speed(reference_spec):
    assert reference_spec.bare_cavity_omega / (2 * np.pi) == pytest.approx(4.5e9, rel=1e-12)
    assert reference_spec.wave_speed == pytest.approx(2 * 4.5e9 * 0.011)
    assert calibrated_inductance(1e-10, 0.011, 4.5e9) == pytest.approx(reference_spec.ind_per_len)
    assert reference_spec.channel_ratio == pytest.approx(np.sqrt(41.0))


def test_gauss_rules_integrate_cosines():
    assert composite_gauss(np.cos, 0.0, np.pi / 2) == pytest.approx(1.0, abs=1e-14)
    assert converged_gauss(lambda x: np.cos(40.0 * x) ** 2, 0.0, 1.0) == pytest.approx(
        0.5 + np.sin(80.0) / 160.0, rel=1e-10
    )
    assert composite_gauss(np.cos, 1.0, 1.0) == 0.0


def test_reference_mode_frequencies(reference_modes):
    f1, f2 = (m.frequency_hz for m in reference_modes)
    assert f1 == pytest.approx(3.8e9, rel=0.05)
    assert f2 == pytest.approx(5.7e9, rel=0.06)
    assert f1 < f2


def test_coupling_shifts_modes_below_bare_resonators(reference_spec, reference_modes):
    assert reference_modes[0].omega < reference_spec.bare_cavity_omega
    assert reference_modes[1].omega < reference_spec.bare_detector_omega


def test_reference_coupling_strength(circuit, reference_spec, reference_modes):
    couplings = circuit.coupling_matrix(reference_spec, reference_modes)
    assert couplings.shape == (2, 2)
    np.testing.assert_allclose(couplings, couplings.T)
    assert abs(couplings[0, 1]) == pytest.approx(0.04, rel=0.10)


def test_modes_solve_the_matching_conditions(circuit, reference_spec, reference_modes):
    for mode in reference_modes:
        m = circuit.matching_matrix(reference_spec, mode.omega)
        residual = np.linalg.norm(m @ mode.coefficients)
        assert residual <= 1e-8 * np.linalg.norm(m) * np.linalg.norm(mode.coefficients)


def test_mode_functions_are_continuous_at_the_overlap(reference_modes):
    eps = 1e-12
    scale = FLUX_QUANTUM / (2 * np.pi)
    for mode in reference_modes:
        for phi, ell in ((mode.phi_c, mode.ell_c), (mode.phi_d, mode.ell_d)):
            assert float(phi(ell - eps)) == pytest.approx(float(phi(ell + eps)), abs=1e-6 * scale)
        # open conductor ends carry no current
        assert float(mode.dphi_c(0.0)) == pytest.approx(0.0, abs=1e-9 * scale * mode.k)
        assert float(mode.dphi_d(0.0)) == pytest.approx(0.0, abs=1e-9 * scale * mode.k)
        assert float(mode.dphi_c(mode.ell_c + mode.L_m)) == pytest.approx(0.0, abs=1e-6 * scale * mode.k)
        assert float(mode.dphi_d(mode.ell_d + mode.L_m)) == pytest.approx(0.0, abs=1e-6 * scale * mode.k)


def test_modes_are_orthogonal_and_normalized(circuit, reference_spec, reference_modes):
    gram = circuit.gram_matrix(reference_spec, reference_modes)
    off = abs(gram[0, 1]) / np.sqrt(gram[0, 0] * gram[1, 1])
    assert off < 1e-6
    for i, mode in enumerate(reference_modes):
        assert mode.is_normalized
        assert mode.C_n == pytest.approx((2 * np.pi / FLUX_QUANTUM) ** 2 * gram[i, i], rel=1e-9)
        x = np.linspace(0.0, reference_spec.L_c, 20001)
        xd = np.linspace(0.0, reference_spec.L_d, 20001)
        peak = max(np.max(np.abs(mode.phi_c(x))), np.max(np.abs(mode.phi_d(xd))))
        assert peak == pytest.approx(FLUX_QUANTUM / (2 * np.pi), rel=1e-3)


def test_unnormalized_mode_is_rejected(circuit, reference_spec, reference_modes):
    bare = [replace(m, C_n=None) for m in reference_modes]
    with pytest.raises(PhysicsError, match="not normalized"):
        circuit.coupling_matrix(reference_spec, bare)


def test_pump_coupling_from_direct_inputs(circuit, reference_spec):
    lam, detuning = circuit.pump_coupling(reference_spec, -0.04, 2 * np.pi * 3.8e9, 2 * np.pi * 5.7e9)
    assert lam == pytest.approx(2.45e4, rel=0.10)
    assert detuning == pytest.approx((10e9 - 9.5e9) / 10e9, rel=1e-9)


def test_pump_coupling_from_computed_modes(circuit, reference_spec, reference_modes):
    couplings = circuit.coupling_matrix(reference_spec, reference_modes)
    lam, _ = circuit.pump_coupling(reference_spec, couplings[0, 1], reference_modes[0].omega,
                                   reference_modes[1].omega)
    assert abs(lam) == pytest.approx(2.45e4, rel=0.15)


def test_coupling_sweep_shape(circuit, reference_spec):
    values = np.array([1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 75.0, 150.0]) * 1e-6
    sweep = circuit.coupling_sweep(reference_spec, values[::-1], threads=2)
    assert list(sweep["L_m_um"]) == pytest.approx(list(values * 1e6))
    lam12 = dict(zip(sweep["L_m_um"].round(6), sweep["lambda12"].abs()))
    assert lam12[2.0] / lam12[1.0] == pytest.approx(2.0, rel=0.05)
    assert 1.7 < lam12[10.0] / lam12[5.0] < 2.0
    below = [lam12[v] for v in (5.0, 10.0, 20.0, 40.0)]
    assert below == sorted(below)
    assert lam12[150.0] / lam12[75.0] < 2.0
    assert set(sweep.columns) == {"L_m_um", "f1_GHz", "f2_GHz", "lambda11", "lambda12", "lambda22"}


def test_coupling_peaks_near_ninety_microns(circuit, reference_spec):
    sweep = circuit.coupling_sweep(reference_spec, np.arange(50, 131, 10) * 1e-6, threads=2)
    peak = sweep["L_m_um"].iloc[int(sweep["lambda12"].abs().to_numpy().argmax())]
    assert 70.0 <= peak <= 110.0


def test_weak_coupling_limit_recovers_bare_resonators(circuit, reference_spec):
    for spec in (reference_spec.with_changes(fbar_cap_per_len=2e-13), reference_spec.with_changes(L_m=1e-9)):
        modes = circuit.solve_normal_modes(spec, 2)
        assert modes[0].omega == pytest.approx(spec.bare_cavity_omega, rel=1e-3)
        assert modes[1].omega == pytest.approx(spec.bare_detector_omega, rel=1e-3)


def test_coupling_falls_with_fbar_capacitance(circuit, reference_spec):
    previous = None
    for cap_m in (2e-9, 2e-10, 2e-11):
        spec = reference_spec.with_changes(fbar_cap_per_len=cap_m, L_m=20e-6)
        modes = circuit.solve_normal_modes(spec, 2)
        lam12 = abs(circuit.coupling_matrix(spec, modes)[0, 1])
        if previous is not None:
            assert lam12 < previous
        previous = lam12


def test_port_splits_and_samples(circuit, reference_spec, reference_modes):
    splits = circuit.port_splits(reference_modes)
    assert all(0.0 < s < 1.0 for s in splits)

    table = circuit.sample_modes(reference_spec, reference_modes, n_points=1101)
    assert list(table.columns) == ["x_m", "phi_c_1", "phi_d_1", "phi_c_2", "phi_d_2"]
    assert table["x_m"].iloc[0] == 0.0
    assert table["x_m"].iloc[-1] == pytest.approx(reference_spec.L_c)
    before_detector = table["x_m"] < reference_spec.L_c - reference_spec.L_d
    assert table.loc[before_detector, "phi_d_1"].isna().all()
    assert table["phi_c_1"].notna().all()


def test_spec_validation(circuit, reference_spec):
    with pytest.raises(PhysicsError):
        reference_spec.with_changes(L_m=0.009).validate()
    with pytest.raises(PhysicsError):
        reference_spec.with_changes(fbar_thickness=0.0).validate()
    warnings = reference_spec.with_changes(drive_amplitude=50e-9).validate()
    assert any("A/D" in w for w in warnings)
    assert reference_spec.validate() == []
    with pytest.raises(PhysicsError):
        circuit.solve_normal_modes(reference_spec, 1)


def test_reference_spec_is_frozen():
    spec = CircuitSpec.reference()
    with pytest.raises(FrozenInstanceError):
        spec.L_m = 1e-6


def test_fbar_dilatational_frequency(circuit, reference_spec):
    assert circuit.fbar_frequency(reference_spec) / (2 * np.pi) == pytest.approx(10e9)
    thicker = reference_spec.with_changes(fbar_thickness=1e-6)
    assert circuit.fbar_frequency(thicker) == pytest.approx(0.5 * circuit.fbar_frequency(reference_spec))
