"""
Spectra Service - Input-output response, cross-correlated emission spectra and two-mode squeezing
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import constants as cst
from scipy import integrate, optimize

from models.measurement import MeasurementParams, SpectrumResult
from utils.errors import ConfigError, NumericalError, PhysicsError
from utils.logger import log_warnings

DENOMINATOR_FLOOR = 1e-30
POINTS_PER_LOBE = 4001
LOBE_SPAN = 10.0
BAND_RTOL = 1e-3
MAX_GRID_DOUBLINGS = 8
THRESHOLD_XTOL = 1e-4  # K


def bose_occupation(omega, temperature: float):
    """Bose-Einstein occupation; exactly zero at T = 0"""
    omega = np.asarray(omega, dtype=float)
    if temperature <= 0:
        return np.zeros_like(omega)
    return 1.0 / np.expm1(cst.hbar * omega / (cst.k * temperature))


def _check_mode(mode: int):
    if mode not in (1, 2):
        raise ConfigError(f"mode must be 1 or 2, got {mode}", field="mode")


@dataclass(frozen=True)
class ModeResponse:
    """
    Linear response of a1(w) and a2(w) to the inputs c(w), d(w), c(Omega_m - w)† and d(Omega_m - w)†.
    """

    omega: float
    a1: Dict[str, complex]
    a2: Dict[str, complex]
    denominator1: complex
    denominator2: complex


class SpectraService:
    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def _denominator(self, p: MeasurementParams, omega, mode: int):
        detuning = np.asarray(omega, dtype=float) - (p.omega1 if mode == 1 else p.omega2)
        return (-1j * detuning + p.gamma1 / 2.0) * (-1j * detuning + p.gamma2 / 2.0) - p.lam ** 2

    def mode_response(self, p: MeasurementParams, omega: float) -> ModeResponse:
        """Fourier-domain solution of the two Langevin equations at frequency omega"""
        delta1 = self._denominator(p, omega, 1)
        delta2 = self._denominator(p, omega, 2)
        for mode, delta in ((1, delta1), (2, delta2)):
            if abs(delta) < DENOMINATOR_FLOOR:
                raise PhysicsError(f"response denominator of mode {mode} vanishes: at the parametric threshold")

        own1 = -1j * (omega - p.omega1) + p.gamma2 / 2.0
        own2 = -1j * (omega - p.omega2) + p.gamma1 / 2.0
        sq = np.sqrt
        a1 = {
            "c": 1j * own1 * sq(p.gamma_c1) / delta1,
            "d": -1j * own1 * sq(p.gamma_d1) / delta1,
            "c_idler": -p.lam * sq(p.gamma_c2) / delta1,
            "d_idler": -p.lam * sq(p.gamma_d2) / delta1,
        }
        a2 = {
            "c": 1j * own2 * sq(p.gamma_c2) / delta2,
            "d": 1j * own2 * sq(p.gamma_d2) / delta2,
            "c_idler": -p.lam * sq(p.gamma_c1) / delta2,
            "d_idler": p.lam * sq(p.gamma_d1) / delta2,
        }
        return ModeResponse(omega=omega, a1=a1, a2=a2, denominator1=complex(delta1), denominator2=complex(delta2))

    def output_commutator(self, p: MeasurementParams, omega: float, port: str = "c") -> float:
        """|alpha_c|^2 + |alpha_d|^2 - |beta_c|^2 - |beta_d|^2 of the output near the closer resonance"""
        if port not in ("c", "d"):
            raise ConfigError(f"unknown port {port!r}", field="port")
        response = self.mode_response(p, omega)
        near_one = abs(omega - p.omega1) <= abs(omega - p.omega2)
        coefficients = response.a1 if near_one else response.a2
        if near_one:
            # a_c_out = a_c_in + i sqrt(g_c1) a1 ; a_d_out = a_d_in - i sqrt(g_d1) a1
            factor = 1j * np.sqrt(p.gamma_c1) if port == "c" else -1j * np.sqrt(p.gamma_d1)
        else:
            factor = 1j * np.sqrt(p.gamma_c2) if port == "c" else 1j * np.sqrt(p.gamma_d2)
        alpha_c = factor * coefficients["c"] + (1.0 if port == "c" else 0.0)
        alpha_d = factor * coefficients["d"] + (1.0 if port == "d" else 0.0)
        beta_c = factor * coefficients["c_idler"]
        beta_d = factor * coefficients["d_idler"]
        return float(abs(alpha_c) ** 2 + abs(alpha_d) ** 2 - abs(beta_c) ** 2 - abs(beta_d) ** 2)

    def frequency_grid(self, p: MeasurementParams, points_per_lobe: int = POINTS_PER_LOBE,
                       span: float = LOBE_SPAN) -> np.ndarray:
        """Two uniform lobes of +-span linewidths around omega1 and omega2"""
        lobes = [
            np.linspace(p.omega1 - span * p.gamma1, p.omega1 + span * p.gamma1, points_per_lobe),
            np.linspace(p.omega2 - span * p.gamma2, p.omega2 + span * p.gamma2, points_per_lobe),
        ]
        return np.concatenate(lobes)

    def cross_spectrum(self, p: MeasurementParams, grid: np.ndarray = None) -> SpectrumResult:
        """Cross-correlated power spectral density S_cd and emission rate N_cd = S_cd / (hbar omega)"""
        log_warnings(self.logger, p.validate(), "measurement")
        grid = self.frequency_grid(p) if grid is None else np.asarray(grid, dtype=float)

        thermal = 2.0 * bose_occupation(grid, p.temperature) + 1.0
        lobe1 = -np.sqrt(p.gamma_c1 * p.gamma_d1) * p.gamma2 / np.abs(self._denominator(p, grid, 1)) ** 2
        lobe2 = np.sqrt(p.gamma_c2 * p.gamma_d2) * p.gamma1 / np.abs(self._denominator(p, grid, 2)) ** 2
        N_cd = thermal * p.lam ** 2 * (lobe1 + lobe2)
        S_cd = cst.hbar * grid * N_cd
        if not np.all(np.isfinite(N_cd)):
            raise NumericalError("cross spectrum is not finite on the grid")
        return SpectrumResult(freq_grid=grid, S_cd=S_cd, N_cd=N_cd, metadata=p.as_dict())

    def band_power(self, s: SpectrumResult, omega0: float, delta: float) -> float:
        """Integral of S_cd / (2 pi) over [omega0 - delta/2, omega0 + delta/2]"""
        lo, hi = omega0 - delta / 2.0, omega0 + delta / 2.0
        grid = s.freq_grid
        steps = np.diff(grid)
        breaks = np.where(steps > 10.0 * np.median(steps))[0]
        starts = np.concatenate(([0], breaks + 1))
        ends = np.concatenate((breaks, [len(grid) - 1]))
        for start, end in zip(starts, ends):
            if grid[start] <= lo and hi <= grid[end]:
                segment = slice(start, end + 1)
                break
        else:
            raise ConfigError(f"band [{lo:.6e}, {hi:.6e}] rad/s is not covered by the frequency grid", field="band")

        x = grid[segment]
        y = s.S_cd[segment]
        inside = (x > lo) & (x < hi)
        xs = np.concatenate(([lo], x[inside], [hi]))
        ys = np.concatenate(([np.interp(lo, x, y)], y[inside], [np.interp(hi, x, y)]))
        return float(integrate.trapezoid(ys, xs) / (2.0 * np.pi))

    def converged_band_power(self, p: MeasurementParams, omega0: float, delta: float,
                             points: int = POINTS_PER_LOBE) -> float:
        """Band power on a uniform band grid, doubled until it changes by less than 0.1%"""
        previous = None
        for _ in range(MAX_GRID_DOUBLINGS):
            grid = np.linspace(omega0 - delta / 2.0, omega0 + delta / 2.0, points)
            current = self.band_power(self.cross_spectrum(p, grid), omega0, delta)
            if previous is not None and abs(current - previous) <= BAND_RTOL * abs(current):
                return current
            previous, points = current, 2 * points - 1
        raise NumericalError(f"band power around {omega0:.6e} rad/s did not converge")

    def lobe_integral(self, p: MeasurementParams, mode: int = 1) -> float:
        """Closed form of the integral of 1/|Delta_n(omega)|^2 over one lobe"""
        _check_mode(mode)
        a, b = p.gamma1 / 2.0, p.gamma2 / 2.0
        return float(np.pi / ((a * b - p.lam ** 2) * (a + b)))

    def lobe_fwhm(self, p: MeasurementParams, mode: int = 1) -> float:
        """Full width at half maximum of either |N_cd| lobe at T = 0"""
        _check_mode(mode)
        a, b = p.gamma1 / 2.0, p.gamma2 / 2.0
        c = a * b - p.lam ** 2
        s2 = (a + b) ** 2
        # |Delta|^2 = (c - u)^2 + u s2 with u = detuning^2
        u = 0.5 * (-(s2 - 2.0 * c) + np.sqrt((s2 - 2.0 * c) ** 2 + 4.0 * c ** 2))
        return float(2.0 * np.sqrt(u))

    def _check_squeezing_stability(self, p: MeasurementParams):
        if p.lam ** 2 >= p.gamma1 * p.gamma2:
            raise PhysicsError("lambda^2 >= gamma_1 gamma_2: parametric instability, no stationary squeezing")

    def squeezing_variances(self, p: MeasurementParams, theta: float) -> Tuple[float, float]:
        """Variances of the joint quadrature X_1 at phase theta and of its complement at theta + pi"""
        self._check_squeezing_stability(p)
        thermal = 1.0 + float(bose_occupation(p.omega1, p.temperature) + bose_occupation(p.omega2, p.temperature))
        pump = 2.0 * p.lam / (p.gamma1 + p.gamma2)
        stability = 1.0 - p.lam ** 2 / (p.gamma1 * p.gamma2)
        dx1 = 0.25 * thermal * (1.0 - pump * np.sin(theta)) / stability
        dx2 = 0.25 * thermal * (1.0 + pump * np.sin(theta)) / stability
        return float(dx1), float(dx2)

    def squeezing_map(self, p: MeasurementParams, thetas: Sequence[float],
                      temperatures: Sequence[float]) -> pd.DataFrame:
        rows = []
        for temperature in temperatures:
            point = MeasurementParams(**{**p.as_dict(), "temperature": float(temperature)})
            for theta in thetas:
                dx1, dx2 = self.squeezing_variances(point, theta)
                rows.append({
                    "theta_rad": float(theta),
                    "temperature_mK": float(temperature) * 1e3,
                    "dX1_sq": dx1,
                    "dX2_sq": dx2,
                    "uncertainty_product": float(np.sqrt(dx1 * dx2)),
                })
        return pd.DataFrame(rows)

    def squeezing_threshold(self, p: MeasurementParams) -> Tuple[float, float]:
        """Largest n1 + n2 that still squeezes below vacuum, and the temperature reaching it"""
        self._check_squeezing_stability(p)
        pump = 2.0 * p.lam / (p.gamma1 + p.gamma2)
        stability = 1.0 - p.lam ** 2 / (p.gamma1 * p.gamma2)
        nbar_threshold = stability / (1.0 - pump) - 1.0
        if nbar_threshold <= 0:
            return float(nbar_threshold), 0.0

        def excess(temperature: float) -> float:
            total = bose_occupation(p.omega1, temperature) + bose_occupation(p.omega2, temperature)
            return float(total) - nbar_threshold

        upper = 1.0
        while excess(upper) < 0:
            upper *= 2.0
        T_threshold = optimize.bisect(excess, 0.0, upper, xtol=THRESHOLD_XTOL)
        return float(nbar_threshold), float(T_threshold)

    def peak_summary(self, s: SpectrumResult, p: MeasurementParams) -> List[Dict[str, float]]:
        """Peak |N_cd| of each lobe with its location and signed value"""
        summary = []
        for mode, omega_n, gamma_n in ((1, p.omega1, p.gamma1), (2, p.omega2, p.gamma2)):
            window = np.abs(s.freq_grid - omega_n) <= LOBE_SPAN * gamma_n
            if not np.any(window):
                continue
            idx = np.flatnonzero(window)[np.argmax(np.abs(s.N_cd[window]))]
            summary.append({
                "mode": mode,
                "omega_peak": float(s.freq_grid[idx]),
                "N_cd_peak": float(s.N_cd[idx]),
                "S_cd_over_kB_mK": float(s.S_cd[idx] / cst.k * 1e3),
            })
        return summary
