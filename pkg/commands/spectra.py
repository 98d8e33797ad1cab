"""
Spectra Commands - Scenarios for the measured output: cross-correlated spectrum and two-mode squeezing
"""

import logging
from typing import Callable, Dict

import numpy as np

from models.measurement import MeasurementParams
from models.run_config import RunConfig, ScenarioOutput
from services.spectra_service import bose_occupation


def measurement_params_from(config: RunConfig) -> MeasurementParams:
    f_to_omega = 2.0 * np.pi
    return MeasurementParams.from_quality_factor(
        omega1=f_to_omega * config["f1_GHz"],
        omega2=f_to_omega * config["f2_GHz"],
        lam=config["lambda_per_s"],
        Q=config["Q"],
        temperature=config["temperature_mK"],
        split1=config["split_c1"],
        split2=config["split_c2"],
        Z_T=config["Z_T_ohm"],
    )


class SpectraCommands:
    def __init__(self, sim):
        self.sim = sim
        self.logger = logging.getLogger(__name__)

    def scenarios(self) -> Dict[str, Callable[[RunConfig], ScenarioOutput]]:
        return {
            "spectrum": self.spectrum,
            "squeezing": self.squeezing,
        }

    def spectrum(self, config: RunConfig) -> ScenarioOutput:
        spectra = self.sim.spectra
        p = measurement_params_from(config)
        grid = spectra.frequency_grid(p, config["points_per_lobe"], config["span_linewidths"])
        result = spectra.cross_spectrum(p, grid)

        bands = []
        for mode, omega_n in ((1, p.omega1), (2, p.omega2)):
            # whole lobe, kept just inside the grid edges
            width = 2.0 * config["span_linewidths"] * (p.gamma1 if mode == 1 else p.gamma2) * (1.0 - 1e-9)
            bands.append({
                "mode": mode,
                "band_power_W": spectra.band_power(result, omega_n, width),
                "lobe_fwhm_rad_per_s": spectra.lobe_fwhm(p, mode),
            })

        return ScenarioOutput(
            name="spectrum",
            table=result.as_frame(),
            units={"omega_Hz": "Hz", "S_cd_over_kB_mK": "mK", "N_cd_per_Hz": "1/Hz"},
            metadata={
                "peaks": spectra.peak_summary(result, p),
                "bands": bands,
                "gamma1_per_s": p.gamma1,
                "gamma2_per_s": p.gamma2,
            },
        )

    def squeezing(self, config: RunConfig) -> ScenarioOutput:
        """Joint-quadrature variances on a (theta, T) grid with the thermal squeezing threshold"""
        spectra = self.sim.spectra
        p = measurement_params_from(config)
        thetas = np.linspace(0.0, 2.0 * np.pi, config["n_theta"])
        temperatures = np.linspace(0.0, config["T_max_mK"], config["n_temperature"])
        table = spectra.squeezing_map(p, thetas, temperatures)
        nbar_threshold, T_threshold = spectra.squeezing_threshold(p)
        dx1, dx2 = spectra.squeezing_variances(p, config["theta_rad"])

        return ScenarioOutput(
            name="squeezing",
            table=table,
            units={"theta_rad": "rad", "temperature_mK": "mK"},
            metadata={
                "nbar_threshold": nbar_threshold,
                "T_threshold_mK": T_threshold * 1e3,
                "dX1_sq_at_theta": dx1,
                "dX2_sq_at_theta": dx2,
                "nbar_at_temperature": float(bose_occupation(p.omega1, p.temperature)
                                             + bose_occupation(p.omega2, p.temperature)),
            },
        )
