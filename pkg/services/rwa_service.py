"""
RWA Service - Harmonic expansion of the moving detector and its pair-creation parameters
"""

import logging
import math
from typing import List, Tuple

import numpy as np
from scipy import integrate, special

from models.detector import DetectorParams, ModeResonance, RwaCoefficients
from models.moment_ode import QuadraticHamiltonianCoeffs
from utils.errors import PhysicsError
from utils.logger import log_warnings

QUAD_TOL = 1e-12
DETUNING_FACTOR = 10.0


def _check_xi(xi: float):
    if not 0.0 <= xi < 1.0:
        raise PhysicsError(f"xi={xi:.6g} outside [0, 1): detector would move superluminally")


def _lorentz_factor(theta, xi):
    return np.sqrt(1.0 - (xi * np.sin(theta)) ** 2)


class RwaService:
    def __init__(self, quad_tol: float = QUAD_TOL, detuning_factor: float = DETUNING_FACTOR):
        self.logger = logging.getLogger(__name__)
        self.quad_tol = quad_tol
        self.detuning_factor = detuning_factor

    def _quad(self, func, a: float, b: float, weight_cos: float = None) -> float:
        kwargs = dict(epsabs=self.quad_tol, epsrel=self.quad_tol, limit=400)
        if weight_cos is not None:
            kwargs.update(weight="cos", wvar=weight_cos)
        value, error = integrate.quad(func, a, b, **kwargs)
        if error > 10 * self.quad_tol:
            self.logger.warning(f"Quadrature error estimate {error:.2e} above tolerance {self.quad_tol:.0e}")
        return value

    def lorentz_coefficients(self, xi: float) -> Tuple[float, float]:
        """D0 and D2 of dtau/dt = D0 + D2 cos(2 theta) + ..."""
        _check_xi(xi)
        if xi == 0.0:
            return 1.0, 0.0
        D0 = self._quad(lambda th: _lorentz_factor(th, xi), 0.0, np.pi) / np.pi
        D2 = 2.0 * self._quad(lambda th: _lorentz_factor(th, xi), 0.0, np.pi, weight_cos=2.0) / np.pi
        return float(D0), float(D2)

    def lorentz_series(self, xi: float, n_terms: int = 40) -> Tuple[float, float]:
        """D0 and D2 from the binomial expansion of sqrt(1 - xi^2 sin^2)"""
        _check_xi(xi)
        n = np.arange(n_terms + 1)
        weights = special.binom(0.5, n) * (xi / 2.0) ** (2 * n)
        D0 = np.sum((-1.0) ** n * weights * special.comb(2 * n, n))
        D2 = np.sum(2.0 * (-1.0) ** (n + 1) * weights * special.comb(2 * n, n - 1))
        return float(D0), float(D2)

    def drive_coefficient(self, xi: float, Omega_m: float) -> float:
        """First cosine harmonic of (dtau/dt) sin[(xi/Omega_m) cos(Omega_m t)] over one period"""
        _check_xi(xi)
        if Omega_m <= 0:
            raise PhysicsError(f"Omega_m must be positive, got {Omega_m:.6g}")
        if xi == 0.0:
            return 0.0
        x = xi / Omega_m

        def drive(theta):
            return _lorentz_factor(theta, xi) * np.sin(x * np.cos(theta))

        return float(self._quad(drive, 0.0, 2.0 * np.pi, weight_cos=1.0) / np.pi)

    def drive_series_coefficient(self, xi: float, Omega_m: float) -> float:
        """C1 from the truncated products of the Lorentz and Jacobi-Anger series"""
        D0, D2 = self.lorentz_coefficients(xi)
        x = xi / Omega_m
        return float(2.0 * D0 * special.jv(1, x) + D2 * (special.jv(1, x) - special.jv(3, x)))

    def solve_resonance(self, xi: float, omega_d0: float) -> float:
        """Drive frequency Omega_m = 1 + omega_d0 D0(xi)"""
        D0, _ = self.lorentz_coefficients(xi)
        return 1.0 + omega_d0 * D0

    def renormalized_coupling(self, p: DetectorParams) -> RwaCoefficients:
        """Assemble D0, D2, C1, B, omega_d and the renormalized coupling lambda"""
        log_warnings(self.logger, p.validate(), "detector")
        return self.reduce(p.xi, p.omega_d0, p.lambda0, p.Omega_m)

    def reduce(self, xi: float, omega_d0: float, lambda0: float, Omega_m: float) -> RwaCoefficients:
        D0, D2 = self.lorentz_coefficients(xi)
        C1 = self.drive_coefficient(xi, Omega_m)
        B = omega_d0 * D2 / (2.0 * Omega_m)
        if B >= 1.0:
            self.logger.warning(f"Jacobi-Anger argument B={B:.3g} >= 1; the reduction assumes B < 1")

        lam = 0.5 * lambda0 * C1 * (special.j0(B) - special.j1(B))
        coefficients = RwaCoefficients(
            D0=D0, D2=D2, C1=C1, B=float(B), omega_d=omega_d0 * D0, lam=float(lam),
            interaction_sign=1 if lam >= 0 else -1,
        )
        self.logger.debug(f"RWA coefficients for xi={xi}: {coefficients}")
        return coefficients

    def single_mode_validity(self, p: DetectorParams, k_max: int, n_max: int) -> List[ModeResonance]:
        """Harmonic/mode pairs (k, n) sorted by |(k - n) + (k - 1) omega_d|, the intended (1, 1) left out"""
        if k_max < 1 or n_max < 1:
            raise PhysicsError("k_max and n_max must be at least 1")
        D0, _ = self.lorentz_coefficients(p.xi)
        omega_d = p.omega_d0 * D0
        if abs(p.Omega_m - 1.0 - omega_d) > 1e-3:
            self.logger.warning(
                f"Omega_m={p.Omega_m:.6g} is off the resonance 1 + omega_d={1.0 + omega_d:.6g}"
            )

        threshold = self.detuning_factor * p.gamma
        pairs = []
        for k in range(1, k_max + 1):
            for n in range(1, n_max + 1):
                if (k, n) == (1, 1):
                    continue
                detuning = abs((k - n) + (k - 1) * omega_d)
                pairs.append(ModeResonance(k, n, detuning, detuning < threshold))
        pairs.sort(key=lambda r: (r.detuning, r.k, r.n))

        flagged = [r for r in pairs if r.flagged]
        if flagged:
            self.logger.info(f"{len(flagged)} harmonic/mode pairs within {threshold:.3g} of resonance")
        return pairs

    def detector_hamiltonian(self, p: DetectorParams) -> QuadraticHamiltonianCoeffs:
        """Exact lab-frame coefficients of the moving-detector Hamiltonian"""
        xi, Omega, x = p.xi, p.Omega_m, p.xi / p.Omega_m
        omega_d0, lambda0 = p.omega_d0, p.lambda0

        def omega_b(t: float) -> float:
            return omega_d0 * math.sqrt(1.0 - (xi * math.sin(Omega * t)) ** 2)

        def g(t: float) -> float:
            phase = Omega * t
            return lambda0 * math.sqrt(1.0 - (xi * math.sin(phase)) ** 2) * math.sin(x * math.cos(phase))

        return QuadraticHamiltonianCoeffs(
            omega_a=lambda t: 1.0,
            omega_b=omega_b,
            g=g,
            period=2.0 * np.pi / Omega,
        )
