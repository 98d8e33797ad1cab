"""
Measurement Model - transmission-line damping, temperature and spectra of the two-mode output
"""

from dataclasses import dataclass, asdict, field
from typing import Dict, List

import numpy as np
import pandas as pd
from scipy import constants as cst

from utils.errors import PhysicsError

LINEWIDTH_WARNING = 1e-2


@dataclass(frozen=True)
class MeasurementParams:
    """Angular frequencies and rates in rad/s, temperature in K"""

    omega1: float
    omega2: float
    lam: float
    Omega_m: float
    gamma_c1: float
    gamma_d1: float
    gamma_c2: float
    gamma_d2: float
    temperature: float = 0.0
    Z_T: float = 50.0

    @classmethod
    def from_quality_factor(cls, omega1: float, omega2: float, lam: float, Q: float = 1e5,
                            temperature: float = 0.0, split1: float = 0.5, split2: float = 0.5,
                            Z_T: float = 50.0) -> "MeasurementParams":
        """gamma_n = omega_n / Q, a fraction split_n of it through the cavity-side line"""
        for name, split in (("split1", split1), ("split2", split2)):
            if not 0.0 < split < 1.0:
                raise PhysicsError(f"{name}={split:.6g} must lie strictly between 0 and 1")
        gamma1 = omega1 / Q
        gamma2 = omega2 / Q
        return cls(
            omega1=omega1,
            omega2=omega2,
            lam=lam,
            Omega_m=omega1 + omega2,
            gamma_c1=split1 * gamma1,
            gamma_d1=(1.0 - split1) * gamma1,
            gamma_c2=split2 * gamma2,
            gamma_d2=(1.0 - split2) * gamma2,
            temperature=temperature,
            Z_T=Z_T,
        )

    @classmethod
    def reference(cls, **changes) -> "MeasurementParams":
        """3.8 / 5.7 GHz modes, lambda = 2.45e4 s^-1, Q = 1e5, T = 0, symmetric splits"""
        params = dict(omega1=2 * np.pi * 3.8e9, omega2=2 * np.pi * 5.7e9, lam=2.45e4)
        params.update(changes)
        return cls.from_quality_factor(**params)

    @property
    def gamma1(self) -> float:
        return self.gamma_c1 + self.gamma_d1

    @property
    def gamma2(self) -> float:
        return self.gamma_c2 + self.gamma_d2

    def validate(self, detuning_tol: float = 1e-3) -> List[str]:
        for name in ("gamma_c1", "gamma_d1", "gamma_c2", "gamma_d2", "omega1", "omega2", "Z_T"):
            if getattr(self, name) <= 0:
                raise PhysicsError(f"{name} must be positive, got {getattr(self, name):.6g}")
        if self.temperature < 0:
            raise PhysicsError(f"temperature must be non-negative, got {self.temperature:.6g}")
        warnings = []
        for n, (gamma, omega) in enumerate(((self.gamma1, self.omega1), (self.gamma2, self.omega2)), start=1):
            if gamma / omega > LINEWIDTH_WARNING:
                warnings.append(f"gamma_{n}/omega_{n}={gamma / omega:.3g} is not small")
        detuning = abs(self.Omega_m - self.omega1 - self.omega2) / self.Omega_m
        if detuning > detuning_tol:
            warnings.append(f"drive detuned from omega_1 + omega_2 by {detuning:.3g} (relative)")
        if self.lam ** 2 >= self.gamma1 * self.gamma2:
            warnings.append("lambda^2 >= gamma_1 gamma_2: beyond parametric instability")
        elif self.lam ** 2 > 0.25 * self.gamma1 * self.gamma2 * 0.9:
            warnings.append("lambda^2 within 10% of gamma_1 gamma_2 / 4")
        return warnings

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class SpectrumResult:
    """Cross-correlated spectrum on a frequency grid"""

    freq_grid: np.ndarray
    S_cd: np.ndarray
    N_cd: np.ndarray
    metadata: Dict = field(default_factory=dict)

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "omega_Hz": self.freq_grid / (2.0 * np.pi),
            "S_cd_over_kB_mK": self.S_cd / cst.k * 1e3,
            "N_cd_per_Hz": self.N_cd,
        })
