"""
Circuit Model - FBAR-coupled cavity/detector resonators and their normal modes
"""

from dataclasses import dataclass, asdict, replace
from typing import Dict, List, Optional

import numpy as np

from utils.errors import PhysicsError

AMPLITUDE_RATIO_WARNING = 0.01


def calibrated_inductance(cap_per_len: float, L_c: float, f_c: float) -> float:
    """Inductance per length that puts the bare cavity fundamental pi*v/L_c at 2*pi*f_c"""
    v = 2.0 * f_c * L_c
    return 1.0 / (v ** 2 * cap_per_len)


@dataclass(frozen=True)
class CircuitSpec:
    """Geometry and per-unit-length parameters, SI units"""

    cap_per_len: float
    ind_per_len: float
    fbar_cap_per_len: float
    L_c: float
    L_d: float
    L_m: float
    fbar_thickness: float
    drive_amplitude: float
    sound_speed: float

    @classmethod
    def reference(cls, L_m: float = 90e-6, f_c: float = 4.5e9) -> "CircuitSpec":
        """Silicon FBAR on 1.1 cm / 0.8 cm resonators, wave speed calibrated to f_c"""
        cap = 1e-10
        L_c = 0.011
        return cls(
            cap_per_len=cap,
            ind_per_len=calibrated_inductance(cap, L_c, f_c),
            fbar_cap_per_len=2e-9,
            L_c=L_c,
            L_d=0.008,
            L_m=L_m,
            fbar_thickness=500e-9,
            drive_amplitude=1e-11,
            sound_speed=1e4,
        )

    def with_changes(self, **changes) -> "CircuitSpec":
        return replace(self, **changes)

    @property
    def wave_speed(self) -> float:
        return 1.0 / np.sqrt(self.ind_per_len * self.cap_per_len)

    @property
    def channel_ratio(self) -> float:
        """k_a / k for the antisymmetric overlap channel"""
        return float(np.sqrt(1.0 + 2.0 * self.fbar_cap_per_len / self.cap_per_len))

    @property
    def bare_cavity_omega(self) -> float:
        return np.pi * self.wave_speed / self.L_c

    @property
    def bare_detector_omega(self) -> float:
        return np.pi * self.wave_speed / self.L_d

    def validate(self) -> List[str]:
        for name, value in self.as_dict().items():
            if name == "drive_amplitude":
                if value < 0:
                    raise PhysicsError(f"{name} must be non-negative, got {value:.6g}")
            elif value <= 0:
                raise PhysicsError(f"{name} must be positive, got {value:.6g}")
        if not (self.L_m < self.L_c and self.L_m < self.L_d):
            raise PhysicsError(f"overlap L_m={self.L_m:.6g} m must be shorter than both conductors")
        warnings = []
        ratio = self.drive_amplitude / self.fbar_thickness
        if ratio > AMPLITUDE_RATIO_WARNING:
            warnings.append(f"A/D={ratio:.3g} violates the small-displacement assumption A << D")
        return warnings

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class NormalMode:
    """
    One normal mode of the coupled resonators.

    Free segments carry alpha*cos(k x_c) on [0, ell_c] and beta*cos(k x_d) on
    [0, ell_d]. On the overlap, u = x_c - ell_c = x_d - ell_d in [0, L_m],
    Phi_c = S + A and Phi_d = S - A with S = s cos(k (L_m - u)) and
    A = p cos(k_a (L_m - u)).
    """

    index: int
    omega: float
    k: float
    k_a: float
    ell_c: float
    ell_d: float
    L_m: float
    coefficients: np.ndarray
    C_n: Optional[float] = None

    @property
    def frequency_hz(self) -> float:
        return self.omega / (2.0 * np.pi)

    @property
    def is_normalized(self) -> bool:
        return self.C_n is not None and self.C_n > 0

    def scaled(self, factor: float) -> "NormalMode":
        return replace(self, coefficients=self.coefficients * factor)

    def symmetric(self, u):
        s = self.coefficients[2]
        return s * np.cos(self.k * (self.L_m - np.asarray(u)))

    def antisymmetric(self, u):
        p = self.coefficients[3]
        return p * np.cos(self.k_a * (self.L_m - np.asarray(u)))

    def _piecewise(self, x, ell, free_amp, sign, derivative=False):
        x = np.asarray(x, dtype=float)
        u = x - ell
        if derivative:
            free = -free_amp * self.k * np.sin(self.k * x)
            s, p = self.coefficients[2], self.coefficients[3]
            overlap = (s * self.k * np.sin(self.k * (self.L_m - u))
                       + sign * p * self.k_a * np.sin(self.k_a * (self.L_m - u)))
        else:
            free = free_amp * np.cos(self.k * x)
            overlap = self.symmetric(u) + sign * self.antisymmetric(u)
        return np.where(x <= ell, free, overlap)

    def phi_c(self, x):
        return self._piecewise(x, self.ell_c, self.coefficients[0], 1.0)

    def phi_d(self, x):
        return self._piecewise(x, self.ell_d, self.coefficients[1], -1.0)

    def dphi_c(self, x):
        return self._piecewise(x, self.ell_c, self.coefficients[0], 1.0, derivative=True)

    def dphi_d(self, x):
        return self._piecewise(x, self.ell_d, self.coefficients[1], -1.0, derivative=True)
