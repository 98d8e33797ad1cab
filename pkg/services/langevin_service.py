"""
Langevin Service - Builds, solves and integrates the second-moment equations of the damped two-mode system
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from models.gaussian_state import MomentVector, moments_to_covariance
from models.moment_ode import (
    COUPLING_CONSTANT,
    COUPLING_DRIFT,
    FREE_DRIFT_A,
    FREE_DRIFT_B,
    PAIR_CONSTANT,
    PAIR_DRIFT,
    Modulation,
    MomentOde,
    MomentTrajectory,
    QuadraticHamiltonianCoeffs,
)
from utils.errors import ConfigError, NumericalError, PhysicsError
from utils.logger import ContextLogger

MIN_TOL = 1e-12
MAX_TOL = 1e-4


def _growth_integral(rate: float, t: float) -> float:
    """(1 - exp(-rate t)) / rate, continued to t at rate = 0"""
    x = rate * t
    if abs(x) < 1e-8:
        return t * (1.0 - 0.5 * x)
    return -math.expm1(-x) / rate


class LangevinService:
    def __init__(self, method: str = "DOP853"):
        self.logger = logging.getLogger(__name__)
        self.method = method

    def rwa_moment_ode(self, lam: float, gamma: float) -> MomentOde:
        """Constant drift for lam (a†b† + ab) with equal damping gamma"""
        if gamma <= 0:
            raise PhysicsError(f"gamma must be positive, got {gamma:.6g}")
        drift = -gamma * np.eye(10, dtype=complex) + lam * PAIR_DRIFT
        return MomentOde(gamma=gamma, drift0=drift, constant0=lam * PAIR_CONSTANT)

    def collective_moment_ode(self, lam: float, gamma: float, N: int) -> MomentOde:
        """N identical detectors act as one collective mode coupled with sqrt(N) lam"""
        if N < 1:
            raise PhysicsError(f"number of detectors must be at least 1, got {N}")
        return self.rwa_moment_ode(math.sqrt(N) * lam, gamma)

    def full_moment_ode(self, h: QuadraticHamiltonianCoeffs, gamma: float) -> MomentOde:
        """Moment equations for omega_a a†a + omega_b b†b + g (a + a†)(b + b†) with vacuum damping"""
        if gamma < 0:
            raise PhysicsError(f"gamma must be non-negative, got {gamma:.6g}")
        zero = np.zeros(10, dtype=complex)
        return MomentOde(
            gamma=gamma,
            drift0=-gamma * np.eye(10, dtype=complex),
            constant0=zero,
            modulations=(
                Modulation(h.omega_a, FREE_DRIFT_A, zero),
                Modulation(h.omega_b, FREE_DRIFT_B, zero),
                Modulation(h.g, COUPLING_DRIFT, COUPLING_CONSTANT),
            ),
        )

    def spectral_abscissa(self, ode: MomentOde) -> float:
        if not ode.is_autonomous:
            raise PhysicsError("spectral abscissa needs a constant-coefficient moment ODE")
        return float(np.max(np.linalg.eigvals(ode.drift0).real))

    def steady_state(self, ode: MomentOde) -> MomentVector:
        """V(inf) = -M^{-1} K"""
        abscissa = self.spectral_abscissa(ode)
        scale = max(1.0, float(np.max(np.abs(ode.drift0))))
        if abscissa >= -1e-12 * scale:
            raise PhysicsError(
                f"Drift spectral abscissa {abscissa:.3e} >= 0: at or beyond parametric instability"
            )
        try:
            v = np.linalg.solve(ode.drift0, -ode.constant0)
        except np.linalg.LinAlgError as e:
            raise PhysicsError(f"Singular drift, at or beyond parametric instability: {e}") from e
        return MomentVector(v)

    def instability_threshold(self, gamma: float = 1.0, tol: float = 1e-10) -> float:
        """eta where the spectral abscissa of the RWA drift changes sign"""

        def abscissa(eta: float) -> float:
            return self.spectral_abscissa(self.rwa_moment_ode(eta * gamma, gamma))

        return float(optimize.bisect(abscissa, 0.0, 1.0, xtol=tol))

    def closed_form_moments(self, lam: float, gamma: float, t: float) -> MomentVector:
        """Moments at time t from the vacuum under the RWA equations"""
        if t < 0:
            raise PhysicsError(f"time must be non-negative, got {t:.6g}")
        slow = _growth_integral(gamma - 2.0 * lam, t)
        fast = _growth_integral(gamma + 2.0 * lam, t)
        occupation = 0.5 * lam * (slow - fast)
        pair = 0.5j * lam * (slow + fast)
        return MomentVector.from_dict({"ada": occupation, "bdb": occupation, "adbd": pair, "ab": np.conj(pair)})

    def integrate_moments(self, ode: MomentOde, v0: MomentVector, t_end: float, tol: float = 1e-8,
                          n_samples: int = 201, t_eval: Optional[Sequence[float]] = None,
                          check_physicality: bool = True, max_step: float = np.inf) -> MomentTrajectory:
        """Adaptive Runge-Kutta integration with samples from the dense output"""
        if not MIN_TOL <= tol <= MAX_TOL:
            raise ConfigError(f"tolerance {tol:.3g} outside [{MIN_TOL:g}, {MAX_TOL:g}]", field="tolerance")
        if t_end <= 0:
            raise ConfigError(f"t_end must be positive, got {t_end:.6g}", field="t_end")
        times = np.linspace(0.0, t_end, n_samples) if t_eval is None else np.asarray(t_eval, dtype=float)

        with ContextLogger(self.logger, f"integrate_moments(t_end={t_end:.4g}, tol={tol:.0e})"):
            sol = integrate.solve_ivp(
                ode.rhs,
                (0.0, t_end),
                np.asarray(v0.entries, dtype=complex),
                method=self.method,
                t_eval=times,
                rtol=tol,
                atol=tol * 1e-3,
                max_step=max_step,
            )
        if not sol.success:
            failed_at = float(sol.t[-1]) if len(sol.t) else 0.0
            raise NumericalError(f"moment integration failed: {sol.message}", time=failed_at)

        trajectory = MomentTrajectory(times=sol.t, moments=sol.y.T.copy())
        if check_physicality:
            covariances = []
            for i in range(len(trajectory)):
                try:
                    covariances.append(moments_to_covariance(trajectory.state(i)))
                except PhysicsError as e:
                    raise PhysicsError(f"state at t={trajectory.times[i]:.6g} is not physical: {e}") from e
            trajectory.covariances = covariances
        return trajectory

    def relax_to_late_window(self, ode: MomentOde, relaxation_rate: float, relaxation_times: float,
                             tol: float = 1e-8, n_samples: int = 201, fraction: float = 0.2) -> MomentTrajectory:
        """
        Integrate from the vacuum for relaxation_times / relaxation_rate and keep
        only the samples in the last `fraction` of that horizon.

        For a time-dependent ODE the window averages stand in for a steady state.
        """
        if relaxation_rate <= 0:
            raise PhysicsError(f"relaxation rate {relaxation_rate:.3e} <= 0: at or beyond parametric instability")
        if not 0.0 < fraction <= 1.0:
            raise ConfigError(f"window fraction {fraction:.3g} outside (0, 1]", field="fraction")
        t_end = relaxation_times / relaxation_rate
        window = np.linspace((1.0 - fraction) * t_end, t_end, n_samples)
        self.logger.debug(f"Relaxing over t_end={t_end:.4g}, averaging the last {fraction:.0%}")
        return self.integrate_moments(ode, MomentVector.vacuum(), t_end, tol=tol, t_eval=window)

    def many_detector_scaling(self, lam: float, gamma: float, N: int) -> Tuple[float, float]:
        """Steady cavity occupation for N detectors and the collective instability boundary"""
        if N < 1:
            raise PhysicsError(f"number of detectors must be at least 1, got {N}")
        eta = lam / gamma
        if 4.0 * N * eta ** 2 >= 1.0:
            raise PhysicsError(f"4 N eta^2 = {4.0 * N * eta ** 2:.6g} >= 1: collective parametric instability")
        occupation = 2.0 * N * eta ** 2 / (1.0 - 4.0 * N * eta ** 2)
        eta_crit = 1.0 / (2.0 * math.sqrt(N))
        return occupation, eta_crit
