"""
Detector Model - parameters of the oscillating detector and its reduced pair-creation coefficients
"""

from dataclasses import dataclass, asdict
from typing import Dict, List, NamedTuple

from utils.errors import PhysicsError

GAMMA_WARNING = 0.1


@dataclass(frozen=True)
class DetectorParams:
    """Detector-cavity parameters; frequencies and rates in units of the cavity frequency"""

    xi: float
    omega_d0: float
    lambda0: float
    Omega_m: float
    gamma: float

    def validate(self) -> List[str]:
        """Raise on impossible parameters, return warnings for doubtful ones"""
        if not 0.0 <= self.xi < 1.0:
            raise PhysicsError(f"xi={self.xi:.6g} outside [0, 1): detector would move superluminally")
        for name in ("omega_d0", "Omega_m", "gamma"):
            if getattr(self, name) <= 0:
                raise PhysicsError(f"{name} must be positive, got {getattr(self, name):.6g}")
        warnings = []
        if self.gamma > GAMMA_WARNING:
            warnings.append(f"gamma={self.gamma:.3g} is not small compared with the cavity frequency")
        return warnings

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class RwaCoefficients:
    """Harmonic coefficients and renormalized pair-creation parameters"""

    D0: float
    D2: float
    C1: float
    B: float
    omega_d: float
    lam: float
    # +1: interaction reads +lam (a†b† + ab)
    interaction_sign: int = 1

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


class ModeResonance(NamedTuple):
    """One (harmonic k, cavity mode n) pair of the single-mode check"""

    k: int
    n: int
    detuning: float
    flagged: bool
