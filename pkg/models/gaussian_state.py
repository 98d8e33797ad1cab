"""
Gaussian State Model - second moments, quadrature covariance and entanglement of the two-mode state
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from utils.errors import NumericalError, PhysicsError

logger = logging.getLogger(__name__)

MOMENT_LABELS = ("aa", "ada", "adad", "ab", "adb", "abd", "adbd", "bb", "bdb", "bdbd")
MOMENT_INDEX = {label: i for i, label in enumerate(MOMENT_LABELS)}

PHYSICALITY_TOL = -1e-9
SYMMETRY_TOL = 1e-12

# (X_a, P_a, X_b, P_b) = QUADRATURE_TRANSFORM @ (a, a†, b, b†)
QUADRATURE_TRANSFORM = np.array([
    [1, 1, 0, 0],
    [-1j, 1j, 0, 0],
    [0, 0, 1, 1],
    [0, 0, -1j, 1j],
]) / np.sqrt(2.0)
_INVERSE_TRANSFORM = np.linalg.inv(QUADRATURE_TRANSFORM)

SYMPLECTIC_FORM = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
PARTIAL_TRANSPOSE = np.diag([-1.0, 1.0, 1.0, 1.0])

# Phase picked up by each moment under a -> e^{i theta_a} a, b -> e^{i theta_b} b
_ROTATION_WEIGHTS = np.array([
    (2, 0), (0, 0), (-2, 0), (1, 1), (-1, 1), (1, -1), (-1, -1), (0, 2), (0, 0), (0, -2),
])


@dataclass(frozen=True)
class MomentVector:
    """The ten normal-ordered second moments of modes a and b"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex).reshape(-1)
        if entries.shape != (10,):
            raise ValueError(f"MomentVector needs 10 entries, got {entries.shape[0]}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def vacuum(cls) -> "MomentVector":
        return cls(np.zeros(10, dtype=complex))

    @classmethod
    def from_dict(cls, values: Dict[str, complex]) -> "MomentVector":
        unknown = set(values) - set(MOMENT_LABELS)
        if unknown:
            raise ValueError(f"Unknown moment labels: {sorted(unknown)}")
        return cls(np.array([values.get(label, 0.0) for label in MOMENT_LABELS], dtype=complex))

    def __getitem__(self, label: str) -> complex:
        return self.entries[MOMENT_INDEX[label]]

    def as_dict(self) -> Dict[str, complex]:
        return {label: complex(value) for label, value in zip(MOMENT_LABELS, self.entries)}

    @property
    def n_a(self) -> float:
        return float(self.entries[1].real)

    @property
    def n_b(self) -> float:
        return float(self.entries[8].real)

    def rotate(self, theta_a: float, theta_b: float) -> "MomentVector":
        """Apply the local phase rotation a -> e^{i theta_a} a, b -> e^{i theta_b} b"""
        phases = np.exp(1j * (_ROTATION_WEIGHTS[:, 0] * theta_a + _ROTATION_WEIGHTS[:, 1] * theta_b))
        return MomentVector(self.entries * phases)

    def check_invariants(self, tol: float = 1e-10):
        """Occupations real, conjugate pairs consistent"""
        v = self.entries
        scale = 1.0 + float(np.max(np.abs(v)))
        for label in ("ada", "bdb"):
            if abs(self[label].imag) > tol * scale:
                raise PhysicsError(f"<{label}> has imaginary part {self[label].imag:.3e}")
        for left, right in (("adad", "aa"), ("bdbd", "bb"), ("adbd", "ab"), ("abd", "adb")):
            if abs(self[left] - np.conj(self[right])) > 1e-8 * scale:
                raise PhysicsError(f"<{left}> is not the conjugate of <{right}>")


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric quadrature covariance over (X_a, P_a, X_b, P_b); vacuum is I/2"""

    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.shape != (4, 4):
            raise ValueError(f"Covariance matrix must be 4x4, got {gamma.shape}")
        if np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(gamma)))):
            raise PhysicsError("Covariance matrix is not symmetric")
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def vacuum(cls) -> "CovarianceMatrix":
        return cls(0.5 * np.eye(4))

    def physicality_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.gamma + 0.5j * SYMPLECTIC_FORM)

    def is_physical(self) -> bool:
        return bool(self.physicality_eigenvalues().min() >= PHYSICALITY_TOL)


def check_physical(g: CovarianceMatrix):
    """Raise PhysicsError unless gamma + (i/2) Omega is positive semidefinite"""
    eigenvalues = g.physicality_eigenvalues()
    worst = float(eigenvalues.min())
    if worst < PHYSICALITY_TOL:
        raise PhysicsError(
            f"Non-physical state: eigenvalue {worst:.6e} of gamma + (i/2)Omega is below {PHYSICALITY_TOL:g}"
        )


def _symmetrized_moments(v: MomentVector) -> np.ndarray:
    """Matrix of <{c_i, c_j}>/2 for c = (a, a†, b, b†)"""
    aa, ada, adad, ab, adb, abd, adbd, bb, bdb, bdbd = v.entries
    return np.array([
        [aa, ada + 0.5, ab, abd],
        [ada + 0.5, adad, adb, adbd],
        [ab, adb, bb, bdb + 0.5],
        [abd, adbd, bdb + 0.5, bdbd],
    ], dtype=complex)


def moments_to_covariance(v: MomentVector) -> CovarianceMatrix:
    """Assemble the covariance matrix from normal-ordered moments (zero first moments)"""
    v.check_invariants()
    full = QUADRATURE_TRANSFORM @ _symmetrized_moments(v) @ QUADRATURE_TRANSFORM.T
    if np.max(np.abs(full.imag)) > 1e-8 * (1.0 + np.max(np.abs(full.real))):
        raise PhysicsError("Moments give a complex covariance matrix")
    gamma = full.real
    g = CovarianceMatrix(0.5 * (gamma + gamma.T))
    check_physical(g)
    return g


def covariance_to_moments(g: CovarianceMatrix) -> MomentVector:
    """Inverse of moments_to_covariance"""
    s = _INVERSE_TRANSFORM @ g.gamma @ _INVERSE_TRANSFORM.T
    return MomentVector(np.array([
        s[0, 0], s[0, 1] - 0.5, s[1, 1], s[0, 2], s[1, 2],
        s[0, 3], s[1, 3], s[2, 2], s[2, 3] - 0.5, s[3, 3],
    ]))


def partial_transpose(g: CovarianceMatrix) -> CovarianceMatrix:
    """Flip the sign of X_a: Lambda gamma Lambda with Lambda = diag(-1, 1, 1, 1)"""
    return CovarianceMatrix(PARTIAL_TRANSPOSE @ g.gamma @ PARTIAL_TRANSPOSE)


def symplectic_eigenvalues(g: CovarianceMatrix) -> Tuple[float, float]:
    """The two symplectic eigenvalues, ascending"""
    eigenvalues = np.sort(np.linalg.eigvals(1j * SYMPLECTIC_FORM @ g.gamma).real)
    # all four are computed; they must come in +-nu pairs
    mismatch = np.max(np.abs(eigenvalues + eigenvalues[::-1]))
    if mismatch > 1e-8 * max(1.0, float(np.max(np.abs(eigenvalues)))):
        raise NumericalError(f"symplectic spectrum is not paired (mismatch {mismatch:.3e})")
    nu = np.sort(np.abs(eigenvalues))[::2]
    return float(nu[0]), float(nu[1])


def log_negativity(g: CovarianceMatrix) -> float:
    """Logarithmic negativity from the partially transposed symplectic spectrum"""
    check_physical(g)
    nu = symplectic_eigenvalues(partial_transpose(g))
    return float(sum(max(0.0, -np.log2(2.0 * n)) for n in nu))


def effective_temperature(occupation: float, mode_freq: float, redshift_factor: float = 1.0) -> float:
    """k_B T / (hbar omega) of a mode with the given occupation"""
    if occupation <= 0:
        raise PhysicsError(f"Effective temperature undefined for occupation {occupation:.6g} <= 0")
    if mode_freq <= 0:
        raise PhysicsError(f"Mode frequency must be positive, got {mode_freq:.6g}")
    return float(redshift_factor / np.log1p(1.0 / occupation))


def detector_redshift(D0: float, D2: float, Omega_m: float, t):
    """Time-dilation factor 1 + (D2/D0) cos(2 Omega_m t) of the detector frequency; t may be an array"""
    if D0 <= 0:
        raise PhysicsError(f"D0 must be positive, got {D0:.6g}")
    return 1.0 + (D2 / D0) * np.cos(2.0 * Omega_m * np.asarray(t, dtype=float))


def steady_state_moments(eta: float) -> MomentVector:
    """Analytic steady state of the resonant pair-creation model at eta = lambda/gamma"""
    if not 0 <= abs(eta) < 0.5:
        raise PhysicsError(f"eta={eta:.6g} is at or beyond parametric instability (|eta| >= 1/2)")
    denominator = 1.0 - 4.0 * eta ** 2
    occupation = 2.0 * eta ** 2 / denominator
    pair = 1j * eta / denominator
    return MomentVector.from_dict({"ada": occupation, "bdb": occupation, "adbd": pair, "ab": np.conj(pair)})
