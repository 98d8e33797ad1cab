"""
Dynamics Commands - Scenarios for the moving detector: RWA coefficients, moment evolution, steady states
"""

import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from models.detector import DetectorParams, RwaCoefficients
from models.gaussian_state import (
    MomentVector,
    detector_redshift,
    effective_temperature,
    log_negativity,
    moments_to_covariance,
    steady_state_moments,
)
from models.run_config import RunConfig, ScenarioOutput
from utils.errors import PhysicsError
from utils.logger import log_warnings

VALIDITY_REPORT_SIZE = 10
FULL_SWEEP_COLUMNS = ("ada_full", "bdb_full", "E_N_full", "T_eff_cavity_full", "T_eff_detector_full",
                      "ada_full_rel_dev")


class DynamicsCommands:
    def __init__(self, sim):
        self.sim = sim
        self.logger = logging.getLogger(__name__)

    def scenarios(self) -> Dict[str, Callable[[RunConfig], ScenarioOutput]]:
        return {
            "rwa-coeffs": self.rwa_coeffs,
            "evolve": self.evolve,
            "steady-state": self.steady_state,
            "entanglement-sweep": self.entanglement_sweep,
            "many-detectors": self.many_detectors,
        }

    def detector_setup(self, config: RunConfig, eta: Optional[float] = None) -> Tuple[DetectorParams, RwaCoefficients]:
        """Resolve the drive frequency and damping that config leaves to defaults; eta overrides gamma_wc"""
        rwa = self.sim.rwa
        xi, omega_d0, lambda0 = config["xi"], config["omega_d0_wc"], config["lambda0_wc"]
        Omega_m = config.get("Omega_m_wc")
        if Omega_m is None:
            Omega_m = rwa.solve_resonance(xi, omega_d0)
        coefficients = rwa.reduce(xi, omega_d0, lambda0, Omega_m)

        gamma = config.get("gamma_wc") if eta is None else None
        if gamma is None:
            eta = config["eta"] if eta is None else eta
            if eta <= 0:
                raise PhysicsError(f"eta must be positive to set the damping, got {eta:.6g}")
            gamma = abs(coefficients.lam) / eta
        params = DetectorParams(xi=xi, omega_d0=omega_d0, lambda0=lambda0, Omega_m=Omega_m, gamma=gamma)
        log_warnings(self.logger, params.validate(), "detector")
        return params, coefficients

    def rwa_coeffs(self, config: RunConfig) -> ScenarioOutput:
        """Harmonic coefficients, renormalized coupling and their series cross-checks"""
        rwa = self.sim.rwa
        params, c = self.detector_setup(config)
        D0_series, D2_series = rwa.lorentz_series(params.xi)
        pairs = rwa.single_mode_validity(params, config["k_max"], config["n_max"])

        table = pd.DataFrame([{
            "xi": params.xi,
            "omega_d0": params.omega_d0,
            "lambda0": params.lambda0,
            "Omega_m": params.Omega_m,
            "gamma": params.gamma,
            "D0": c.D0,
            "D2": c.D2,
            "D0_series": D0_series,
            "D2_series": D2_series,
            "C1": c.C1,
            "C1_series": rwa.drive_series_coefficient(params.xi, params.Omega_m),
            "B": c.B,
            "omega_d": c.omega_d,
            "lambda": c.lam,
            "eta": c.lam / params.gamma,
        }])
        nearest = [r._asdict() for r in pairs[:VALIDITY_REPORT_SIZE]]
        return ScenarioOutput(
            name="rwa-coeffs",
            table=table,
            units={col: "omega_c" for col in ("omega_d0", "lambda0", "Omega_m", "gamma", "omega_d", "lambda")},
            metadata={"interaction_sign": c.interaction_sign, "nearest_resonances": nearest},
        )

    def evolve(self, config: RunConfig) -> ScenarioOutput:
        """Cavity and detector occupations from the vacuum, RWA and/or full lab-frame dynamics"""
        params, c = self.detector_setup(config)
        langevin = self.sim.langevin
        gamma, lam = params.gamma, c.lam
        t_end = config["t_end_per_gamma"] / gamma
        times = np.linspace(0.0, t_end, config["n_samples"])
        tol = config["tolerance"]

        redshift = detector_redshift(c.D0, c.D2, params.Omega_m, times)
        data = {"t": times, "redshift": redshift}
        if config["model"] in ("rwa", "both"):
            closed = [langevin.closed_form_moments(lam, gamma, t) for t in times]
            data["ada_rwa_closed"] = np.array([v.n_a for v in closed])
            rwa_run = langevin.integrate_moments(
                langevin.rwa_moment_ode(lam, gamma), MomentVector.vacuum(), t_end, tol=tol, t_eval=times
            )
            data["ada_rwa"] = rwa_run.occupation_a
            data["E_N_rwa"] = rwa_run.log_negativity()
            data["T_d_rwa"] = rwa_run.effective_temperature("bdb", c.omega_d, redshift)
        if config["model"] in ("full", "both"):
            full_run = langevin.integrate_moments(
                langevin.full_moment_ode(self.sim.rwa.detector_hamiltonian(params), gamma),
                MomentVector.vacuum(), t_end, tol=tol, t_eval=times,
            )
            data["ada_full"] = full_run.occupation_a
            data["bdb_full"] = full_run.occupation_b
            data["E_N_full"] = full_run.log_negativity()
            data["T_d_full"] = full_run.effective_temperature("bdb", c.omega_d, redshift)

        eta = lam / gamma
        if abs(eta) < 0.5:
            data["ada_steady"] = np.full_like(times, steady_state_moments(eta).n_a)

        return ScenarioOutput(
            name="evolve",
            table=pd.DataFrame(data),
            units={"t": "1/omega_c", "T_d_rwa": "hbar omega_d / k_B", "T_d_full": "hbar omega_d / k_B"},
            metadata={"lambda": lam, "gamma": gamma, "eta": eta, "Omega_m": params.Omega_m, "D0": c.D0, "D2": c.D2},
        )

    def steady_state(self, config: RunConfig) -> ScenarioOutput:
        """Steady state three ways: analytic, linear solve and long-time integration"""
        langevin = self.sim.langevin
        eta = config["eta"]
        gamma = config["gamma_wc"] if config["gamma_wc"] is not None else 1.0
        lam = eta * gamma

        analytic = steady_state_moments(eta)
        ode = langevin.rwa_moment_ode(lam, gamma)
        solved = langevin.steady_state(ode)
        t_end = config["relaxation_times"] / (gamma - 2.0 * abs(lam))
        integrated = langevin.integrate_moments(
            ode, MomentVector.vacuum(), t_end, tol=config["tolerance"], n_samples=2
        ).final

        covariance = moments_to_covariance(solved)
        table = pd.DataFrame([{
            "eta": eta,
            "lambda": lam,
            "gamma": gamma,
            "ada_analytic": analytic.n_a,
            "ada_linear_solve": solved.n_a,
            "ada_integrated": integrated.n_a,
            "adbd_im": float(solved["adbd"].imag),
            "E_N": log_negativity(covariance),
            "E_N_closed_form": math.log2(1.0 + 2.0 * abs(eta)),
            "T_eff_cavity": effective_temperature(solved.n_a, 1.0) if solved.n_a > 0 else np.nan,
        }])
        return ScenarioOutput(
            name="steady-state",
            table=table,
            units={"lambda": "omega_c", "gamma": "omega_c", "T_eff_cavity": "hbar omega_c / k_B"},
            metadata={"t_end": t_end},
        )

    def entanglement_sweep(self, config: RunConfig) -> ScenarioOutput:
        """Log-negativity and effective temperatures against eta: RWA steady states and/or the relaxed full model"""
        langevin = self.sim.langevin
        gamma = config["gamma_wc"] if config["gamma_wc"] is not None else 1.0
        etas = np.linspace(config["eta_min"], config["eta_max"], config["eta_points"])
        if np.max(np.abs(etas)) >= 0.5:
            raise PhysicsError("eta grid reaches the parametric instability at eta = 1/2")
        model = config["model"]

        D0, D2 = self.sim.rwa.lorentz_coefficients(config["xi"])
        # detector temperature swings between the turning points and the centre of the oscillation
        hot = float(detector_redshift(D0, D2, 1.0, 0.0))
        cold = float(detector_redshift(D0, D2, 1.0, np.pi / 2.0))

        rows = []
        for i, eta in enumerate(etas):
            row = {"eta": eta}
            if model in ("rwa", "both"):
                state = langevin.steady_state(langevin.rwa_moment_ode(eta * gamma, gamma))
                n = state.n_a
                temperature = effective_temperature(n, 1.0) if n > 0 else np.nan
                row.update({
                    "ada": n,
                    "E_N": log_negativity(moments_to_covariance(state)),
                    "E_N_closed_form": math.log2(1.0 + 2.0 * abs(eta)),
                    "T_eff_cavity": temperature,
                    "T_eff_divergence": 1.0 / (4.0 * (1.0 - 2.0 * abs(eta))),
                    "T_d_max": hot * temperature,
                    "T_d_min": cold * temperature,
                })
            if model in ("full", "both"):
                if eta > 0 and i % config["full_every"] == 0:
                    row.update(self.full_sweep_point(config, eta))
                else:
                    row.update(dict.fromkeys(FULL_SWEEP_COLUMNS, np.nan))
            rows.append(row)

        units = {col: "hbar omega_c / k_B" for col in ("T_eff_cavity", "T_eff_divergence", "T_eff_cavity_full")}
        units.update({col: "hbar omega_d / k_B" for col in ("T_d_max", "T_d_min", "T_eff_detector_full")})
        return ScenarioOutput(
            name="entanglement-sweep",
            table=pd.DataFrame(rows),
            units=units,
            metadata={"model": model, "D0": D0, "D2": D2},
        )

    def full_sweep_point(self, config: RunConfig, eta: float) -> Dict[str, float]:
        """Window averages of the lab-frame dynamics relaxed from the vacuum at damping lambda / eta"""
        langevin = self.sim.langevin
        params, c = self.detector_setup(config, eta=eta)
        ode = langevin.full_moment_ode(self.sim.rwa.detector_hamiltonian(params), params.gamma)
        window = langevin.relax_to_late_window(
            ode, params.gamma - 2.0 * abs(c.lam), config["relaxation_times"],
            tol=config["tolerance"], n_samples=config["n_samples"],
        )
        ada = window.late_time_mean("ada", fraction=1.0)
        bdb = window.late_time_mean("bdb", fraction=1.0)
        self.logger.info(f"Full model at eta={eta:.4g}: <a+a> = {ada:.6g}")
        return {
            "ada_full": ada,
            "bdb_full": bdb,
            "E_N_full": float(np.mean(window.log_negativity())),
            "T_eff_cavity_full": effective_temperature(ada, 1.0),
            "T_eff_detector_full": effective_temperature(bdb, c.omega_d),
            "ada_full_rel_dev": ada / steady_state_moments(eta).n_a - 1.0,
        }

    def many_detectors(self, config: RunConfig) -> ScenarioOutput:
        """Cavity occupation for N detectors against the collective-mode ODE"""
        langevin = self.sim.langevin
        eta = config["eta"]
        gamma = config["gamma_wc"] if config["gamma_wc"] is not None else 1.0
        rows = []
        for N in config["N_values"]:
            occupation, eta_crit = langevin.many_detector_scaling(eta * gamma, gamma, N)
            collective = langevin.steady_state(langevin.collective_moment_ode(eta * gamma, gamma, N))
            rows.append({
                "N": N,
                "eta": eta,
                "ada_formula": occupation,
                "ada_collective_ode": collective.n_a,
                "ada_single_equivalent": steady_state_moments(math.sqrt(N) * eta).n_a,
                "eta_crit": eta_crit,
            })
        return ScenarioOutput(name="many-detectors", table=pd.DataFrame(rows), units={})
