"""
Moment ODE Model - linear equations dV/dt = M(t) V + K(t) for the ten second moments
"""

from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Tuple, Union

import numpy as np
import pandas as pd

from models.gaussian_state import (
    MOMENT_INDEX,
    MOMENT_LABELS,
    CovarianceMatrix,
    MomentVector,
    effective_temperature,
    log_negativity,
    moments_to_covariance,
)

_I = MOMENT_INDEX


def _matrix(entries: List[Tuple[str, str, complex]]) -> np.ndarray:
    m = np.zeros((10, 10), dtype=complex)
    for row, col, value in entries:
        m[_I[row], _I[col]] += value
    return m


def _vector(entries: List[Tuple[str, complex]]) -> np.ndarray:
    k = np.zeros(10, dtype=complex)
    for label, value in entries:
        k[_I[label]] += value
    return k


# Free rotation per unit omega_a and omega_b
FREE_DRIFT_A = _matrix([
    ("aa", "aa", -2j), ("adad", "adad", 2j), ("ab", "ab", -1j),
    ("adb", "adb", 1j), ("abd", "abd", -1j), ("adbd", "adbd", 1j),
])
FREE_DRIFT_B = _matrix([
    ("ab", "ab", -1j), ("adb", "adb", -1j), ("abd", "abd", 1j),
    ("adbd", "adbd", 1j), ("bb", "bb", -2j), ("bdbd", "bdbd", 2j),
])

# Per unit g for the coupling g (a + a†)(b + b†)
COUPLING_DRIFT = _matrix([
    ("aa", "ab", -2j), ("aa", "abd", -2j),
    ("ada", "ab", 1j), ("ada", "abd", 1j), ("ada", "adb", -1j), ("ada", "adbd", -1j),
    ("adad", "adb", 2j), ("adad", "adbd", 2j),
    ("ab", "aa", -1j), ("ab", "ada", -1j), ("ab", "bb", -1j), ("ab", "bdb", -1j),
    ("adb", "bb", 1j), ("adb", "bdb", 1j), ("adb", "ada", -1j), ("adb", "adad", -1j),
    ("abd", "bdb", -1j), ("abd", "bdbd", -1j), ("abd", "aa", 1j), ("abd", "ada", 1j),
    ("adbd", "adad", 1j), ("adbd", "ada", 1j), ("adbd", "bdbd", 1j), ("adbd", "bdb", 1j),
    ("bb", "ab", -2j), ("bb", "adb", -2j),
    ("bdb", "ab", 1j), ("bdb", "adb", 1j), ("bdb", "abd", -1j), ("bdb", "adbd", -1j),
    ("bdbd", "abd", 2j), ("bdbd", "adbd", 2j),
])
COUPLING_CONSTANT = _vector([("ab", -1j), ("adbd", 1j)])

# Per unit lambda for the resonant interaction lambda (a†b† + ab)
PAIR_DRIFT = _matrix([
    ("aa", "abd", -2j),
    ("ada", "ab", 1j), ("ada", "adbd", -1j),
    ("adad", "adb", 2j),
    ("ab", "ada", -1j), ("ab", "bdb", -1j),
    ("adb", "bb", 1j), ("adb", "adad", -1j),
    ("abd", "bdbd", -1j), ("abd", "aa", 1j),
    ("adbd", "bdb", 1j), ("adbd", "ada", 1j),
    ("bb", "adb", -2j),
    ("bdb", "ab", 1j), ("bdb", "adbd", -1j),
    ("bdbd", "abd", 2j),
])
PAIR_CONSTANT = _vector([("ab", -1j), ("adbd", 1j)])


@dataclass(frozen=True)
class QuadraticHamiltonianCoeffs:
    """H(t) = omega_a(t) a†a + omega_b(t) b†b + g(t)(a† + a)(b† + b)"""

    omega_a: Callable[[float], float]
    omega_b: Callable[[float], float]
    g: Callable[[float], float]
    period: Optional[float] = None

    @classmethod
    def constant(cls, omega_a: float, omega_b: float, g: float) -> "QuadraticHamiltonianCoeffs":
        return cls(lambda t: omega_a, lambda t: omega_b, lambda t: g)


class Modulation(NamedTuple):
    """Time-dependent term coefficient(t) * (drift @ V + constant)"""

    coefficient: Callable[[float], float]
    drift: np.ndarray
    constant: np.ndarray


@dataclass(frozen=True)
class MomentOde:
    """dV/dt = M(t) V + K(t), split into a constant part and scalar modulations"""

    gamma: float
    drift0: np.ndarray
    constant0: np.ndarray
    modulations: Tuple[Modulation, ...] = field(default_factory=tuple)

    def __post_init__(self):
        # modulations stacked for a batched rhs
        if self.modulations:
            drifts = np.stack([mod.drift for mod in self.modulations])
            constants = np.stack([mod.constant for mod in self.modulations])
        else:
            drifts = np.zeros((0, 10, 10), dtype=complex)
            constants = np.zeros((0, 10), dtype=complex)
        object.__setattr__(self, "_drifts", drifts)
        object.__setattr__(self, "_constants", constants)

    @property
    def is_autonomous(self) -> bool:
        return not self.modulations

    def drift(self, t: float = 0.0) -> np.ndarray:
        m = self.drift0.copy()
        for mod in self.modulations:
            m = m + mod.coefficient(t) * mod.drift
        return m

    def constant(self, t: float = 0.0) -> np.ndarray:
        k = self.constant0.copy()
        for mod in self.modulations:
            k = k + mod.coefficient(t) * mod.constant
        return k

    def coefficients(self, t: float) -> np.ndarray:
        return np.array([mod.coefficient(t) for mod in self.modulations], dtype=float)

    def rhs(self, t: float, v: np.ndarray) -> np.ndarray:
        out = self.drift0 @ v + self.constant0
        if self.modulations:
            out = out + self.coefficients(t) @ (self._drifts @ v + self._constants)
        return out


@dataclass
class MomentTrajectory:
    """Sampled solution of a moment ODE"""

    times: np.ndarray
    moments: np.ndarray
    covariances: Optional[List[CovarianceMatrix]] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> MomentVector:
        return MomentVector(self.moments[i])

    @property
    def final(self) -> MomentVector:
        return self.state(-1)

    def series(self, label: str) -> np.ndarray:
        return self.moments[:, MOMENT_INDEX[label]]

    @property
    def occupation_a(self) -> np.ndarray:
        return self.series("ada").real

    @property
    def occupation_b(self) -> np.ndarray:
        return self.series("bdb").real

    def late_time_mean(self, label: str = "ada", fraction: float = 0.2) -> float:
        """Mean of the real part over the last `fraction` of the samples"""
        start = int(len(self.times) * (1.0 - fraction))
        return float(np.mean(self.series(label)[start:].real))

    def covariance(self, i: int) -> CovarianceMatrix:
        if self.covariances is not None:
            return self.covariances[i]
        return moments_to_covariance(self.state(i))

    def log_negativity(self) -> np.ndarray:
        return np.array([log_negativity(self.covariance(i)) for i in range(len(self))])

    def effective_temperature(self, label: str = "ada", mode_freq: float = 1.0,
                              redshift: Union[float, np.ndarray] = 1.0) -> np.ndarray:
        """k_B T / (hbar omega) per sample, NaN where the occupation vanishes"""
        occupation = self.series(label).real
        factors = np.broadcast_to(np.asarray(redshift, dtype=float), occupation.shape)
        return np.array([
            effective_temperature(n, mode_freq, r) if n > 0 else np.nan for n, r in zip(occupation, factors)
        ])

    def as_frame(self) -> pd.DataFrame:
        data = {"t": self.times}
        for label in MOMENT_LABELS:
            column = self.series(label)
            data[f"{label}_re"] = column.real
            data[f"{label}_im"] = column.imag
        return pd.DataFrame(data)
