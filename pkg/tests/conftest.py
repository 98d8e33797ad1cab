"""
Shared fixtures for the simulator tests
"""

import logging

import pytest

from models.circuit import CircuitSpec
from models.detector import DetectorParams
from models.measurement import MeasurementParams
from services.circuit_service import CircuitService
from services.langevin_service import LangevinService
from services.rwa_service import RwaService
from services.spectra_service import SpectraService


@pytest.fixture
def rwa():
    return RwaService()


@pytest.fixture
def langevin():
    return LangevinService()


@pytest.fixture(scope="session")
def circuit():
    return CircuitService()


@pytest.fixture
def spectra():
    return SpectraService()


@pytest.fixture
def detector_params():
    """Strongly relativistic detector, drive on resonance, eta = 0.4"""
    D0 = 0.8125
    omega_d0 = 0.8
    return DetectorParams(xi=0.8, omega_d0=omega_d0, lambda0=0.01, Omega_m=1.0 + omega_d0 * D0,
                          gamma=0.00209 / 0.4)


@pytest.fixture(scope="session")
def reference_spec():
    return CircuitSpec.reference()


@pytest.fixture(scope="session")
def reference_modes(circuit, reference_spec):
    return circuit.solve_normal_modes(reference_spec, 2)


@pytest.fixture
def measurement():
    return MeasurementParams.reference()


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Temporary output and log directories, wired through the environment"""
    out = tmp_path / "output"
    monkeypatch.setenv("UNRUH_SIM_OUTPUT_DIR", str(out))
    monkeypatch.setenv("UNRUH_SIM_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("UNRUH_SIM_THREADS", "1")
    yield out
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, "unruh_sim", False)]:
        root.removeHandler(handler)
        handler.close()
