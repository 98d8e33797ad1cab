"""
Circuit Commands - Scenarios for the FBAR-coupled resonators: normal modes and coupling sweeps
"""

import logging
from typing import Callable, Dict

import numpy as np

from models.circuit import CircuitSpec, calibrated_inductance
from models.run_config import RunConfig, ScenarioOutput
from utils.errors import ConfigError


def circuit_spec_from(config: RunConfig, L_m: float = None) -> CircuitSpec:
    """Circuit parameters in SI, inductance calibrated from f_cal_GHz unless given"""
    cap = config["C_pF_per_m"]
    ind = config["L_uH_per_m"]
    if ind is None:
        ind = calibrated_inductance(cap, config["L_c_mm"], config["f_cal_GHz"])
    return CircuitSpec(
        cap_per_len=cap,
        ind_per_len=ind,
        fbar_cap_per_len=config["Cm_pF_per_m"],
        L_c=config["L_c_mm"],
        L_d=config["L_d_mm"],
        L_m=config["L_m_um"] if L_m is None else L_m,
        fbar_thickness=config["D_nm"],
        drive_amplitude=config["A_pm"],
        sound_speed=config["v_l_m_per_s"],
    )


class CircuitCommands:
    def __init__(self, sim):
        self.sim = sim
        self.logger = logging.getLogger(__name__)

    def scenarios(self) -> Dict[str, Callable[[RunConfig], ScenarioOutput]]:
        return {
            "circuit-modes": self.circuit_modes,
            "coupling-sweep": self.coupling_sweep,
        }

    def circuit_modes(self, config: RunConfig) -> ScenarioOutput:
        """Sampled mode functions; frequencies, couplings and the pump rate go to the sidecar"""
        circuit = self.sim.circuit
        spec = circuit_spec_from(config)
        modes = circuit.solve_normal_modes(spec, config["n_modes"])
        couplings = circuit.coupling_matrix(spec, modes)
        gram = circuit.gram_matrix(spec, modes)
        lam, detuning = circuit.pump_coupling(spec, couplings[0, 1], modes[0].omega, modes[1].omega)

        diagonal = np.sqrt(np.outer(np.diag(gram), np.diag(gram)))
        residual = np.abs(gram - np.diag(np.diag(gram))) / diagonal
        table = circuit.sample_modes(spec, modes, config["sample_points"])
        units = {col: "Wb" for col in table.columns}
        units["x_m"] = "m"

        return ScenarioOutput(
            name="circuit-modes",
            table=table,
            units=units,
            metadata={
                "frequencies_GHz": [m.frequency_hz / 1e9 for m in modes],
                "C_n_F": [m.C_n for m in modes],
                "coupling_matrix": couplings.tolist(),
                "orthogonality_residual": float(np.max(residual)),
                "pump_coupling_per_s": lam,
                "fbar_frequency_GHz": circuit.fbar_frequency(spec) / (2.0 * np.pi) / 1e9,
                "drive_detuning": detuning,
                "port_splits": circuit.port_splits(modes),
                "wave_speed_m_per_s": spec.wave_speed,
            },
            comments=["x is the cavity conductor coordinate; the detector conductor starts at L_c - L_d"],
        )

    def coupling_sweep(self, config: RunConfig) -> ScenarioOutput:
        """lambda_11, lambda_12, lambda_22 and f1, f2 against the FBAR overlap length"""
        lo, hi, n = config["L_m_min_um"], config["L_m_max_um"], config["n_points"]
        if not 0 < lo <= hi or n < 1:
            raise ConfigError(f"need 0 < L_m_min_um <= L_m_max_um and n_points >= 1, got {lo}, {hi}, {n}",
                              field="L_m_min_um")
        spec = circuit_spec_from(config, L_m=lo)
        table = self.sim.circuit.coupling_sweep(spec, np.linspace(lo, hi, n), threads=self.sim.threads)
        return ScenarioOutput(
            name="coupling-sweep",
            table=table,
            units={"L_m_um": "um", "f1_GHz": "GHz", "f2_GHz": "GHz"},
        )
