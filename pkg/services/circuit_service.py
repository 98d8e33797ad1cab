"""
Circuit Service - Normal modes of the FBAR-coupled resonators, their couplings and the pump strength
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import constants as cst
from scipy import optimize

from models.circuit import CircuitSpec, NormalMode
from utils.errors import NumericalError, PhysicsError
from utils.logger import log_warnings

FLUX_QUANTUM = cst.h / (2.0 * cst.e)

GRID_POINTS_PER_MODE = 200
MAX_GRID_DOUBLINGS = 6
MAX_RANGE_EXTENSIONS = 8
ROOT_RTOL = 1e-12
DEGENERACY_RTOL = 1e-6
QUAD_PANELS = 64
QUAD_ORDER = 8
QUAD_RTOL = 1e-10
MAX_PANEL_DOUBLINGS = 8


def composite_gauss(func: Callable, a: float, b: float, panels: int = QUAD_PANELS,
                    order: int = QUAD_ORDER) -> float:
    """Composite Gauss-Legendre rule with equal panels"""
    if b <= a:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return float(np.sum(w * func(x)))


def converged_gauss(func: Callable, a: float, b: float, rtol: float = QUAD_RTOL,
                    panels: int = QUAD_PANELS) -> float:
    """Panel doubling until two successive composite rules agree"""
    previous = composite_gauss(func, a, b, panels)
    scale = composite_gauss(lambda x: np.abs(func(x)), a, b, panels)
    for _ in range(MAX_PANEL_DOUBLINGS):
        panels *= 2
        current = composite_gauss(func, a, b, panels)
        if abs(current - previous) <= rtol * max(abs(current), scale, np.finfo(float).tiny):
            return current
        previous = current
    raise NumericalError(f"composite quadrature on [{a:.4g}, {b:.4g}] did not converge to {rtol:g}")


class CircuitService:
    def __init__(self, points_per_mode: int = GRID_POINTS_PER_MODE):
        self.logger = logging.getLogger(__name__)
        self.points_per_mode = points_per_mode

    def fbar_frequency(self, spec: CircuitSpec) -> float:
        """Angular frequency pi v_l / D of the fundamental dilatational mode"""
        return float(np.pi * spec.sound_speed / spec.fbar_thickness)

    def _wavenumbers(self, spec: CircuitSpec, omega):
        k = np.asarray(omega) / spec.wave_speed
        return k, spec.channel_ratio * k

    def matching_matrix(self, spec: CircuitSpec, omega) -> np.ndarray:
        """Continuity of flux and current at the overlap edge for unknowns (alpha, beta, s, p)"""
        k, k_a = self._wavenumbers(spec, omega)
        r = spec.channel_ratio
        ell_c, ell_d, L_m = spec.L_c - spec.L_m, spec.L_d - spec.L_m, spec.L_m
        c_s, s_s = np.cos(k * L_m), np.sin(k * L_m)
        c_a, s_a = np.cos(k_a * L_m), np.sin(k_a * L_m)
        zero = np.zeros_like(k)
        rows = [
            [np.cos(k * ell_c), zero, -c_s, -c_a],
            [zero, np.cos(k * ell_d), -c_s, c_a],
            [np.sin(k * ell_c), zero, s_s, r * s_a],
            [zero, np.sin(k * ell_d), s_s, -r * s_a],
        ]
        m = np.array(rows, dtype=float)
        return np.moveaxis(m, (0, 1), (-2, -1))

    def matching_determinant(self, spec: CircuitSpec, omega) -> np.ndarray:
        return np.linalg.det(self.matching_matrix(spec, omega))

    def _bracket_roots(self, spec: CircuitSpec, omega_hi: float, points: int) -> List[Tuple[float, float]]:
        omega_lo = 1e-3 * spec.bare_cavity_omega * min(spec.L_c, spec.L_d) / max(spec.L_c, spec.L_d)
        grid = np.linspace(omega_lo, omega_hi, points)
        det = self.matching_determinant(spec, grid)
        idx = np.where(np.sign(det[:-1]) * np.sign(det[1:]) < 0)[0]
        brackets = [(grid[i], grid[i + 1]) for i in idx]
        brackets += [(grid[i], grid[i]) for i in np.where(det[1:-1] == 0.0)[0] + 1]
        return sorted(brackets)

    def _find_frequencies(self, spec: CircuitSpec, n_modes: int) -> np.ndarray:
        omega_ref = np.pi * spec.wave_speed / (spec.L_c + spec.L_d)
        omega_hi = (n_modes + 2) * omega_ref
        for _ in range(MAX_RANGE_EXTENSIONS):
            points = self.points_per_mode * (n_modes + 2)
            brackets = self._bracket_roots(spec, omega_hi, points)
            for _ in range(MAX_GRID_DOUBLINGS):
                finer = self._bracket_roots(spec, omega_hi, 2 * points)
                if len(finer) == len(brackets):
                    break
                self.logger.debug(f"Root count changed {len(brackets)} -> {len(finer)}; refining grid")
                brackets, points = finer, 2 * points
            if len(brackets) >= n_modes:
                break
            omega_hi *= 2.0
        else:
            raise NumericalError(f"located {len(brackets)} of {n_modes} normal modes")

        def det(w):
            return float(self.matching_determinant(spec, w))

        roots = []
        for lo, hi in brackets[:n_modes]:
            roots.append(lo if lo == hi else optimize.brentq(det, lo, hi, xtol=1e-300, rtol=ROOT_RTOL))
        roots = np.array(roots)
        gaps = np.diff(roots) / roots[1:]
        if np.any(gaps < DEGENERACY_RTOL):
            raise NumericalError(f"unresolved near-degenerate normal modes near {roots[1:][gaps < DEGENERACY_RTOL]}")
        return roots

    def _build_mode(self, spec: CircuitSpec, index: int, omega: float) -> NormalMode:
        _, _, vh = np.linalg.svd(self.matching_matrix(spec, omega))
        coefficients = vh[-1].copy()
        # Sign: flux positive at the line-coupled end of the cavity conductor
        anchor = coefficients[0] if abs(coefficients[0]) > 1e-8 * np.max(np.abs(coefficients)) else coefficients[1]
        if anchor < 0:
            coefficients = -coefficients
        k, k_a = self._wavenumbers(spec, omega)
        return NormalMode(
            index=index,
            omega=float(omega),
            k=float(k),
            k_a=float(k_a),
            ell_c=spec.L_c - spec.L_m,
            ell_d=spec.L_d - spec.L_m,
            L_m=spec.L_m,
            coefficients=coefficients,
        )

    def inner_product(self, spec: CircuitSpec, m: NormalMode, n: NormalMode) -> float:
        """Capacitance-weighted inner product of two mode functions"""
        cap, cap_m = spec.cap_per_len, spec.fbar_cap_per_len
        ell_c, ell_d = spec.L_c - spec.L_m, spec.L_d - spec.L_m
        total = cap * converged_gauss(lambda x: m.phi_c(x) * n.phi_c(x), 0.0, ell_c)
        total += cap * converged_gauss(lambda x: m.phi_d(x) * n.phi_d(x), 0.0, ell_d)
        total += cap * converged_gauss(
            lambda u: m.phi_c(ell_c + u) * n.phi_c(ell_c + u) + m.phi_d(ell_d + u) * n.phi_d(ell_d + u),
            0.0, spec.L_m,
        )
        total += 4.0 * cap_m * converged_gauss(lambda u: m.antisymmetric(u) * n.antisymmetric(u), 0.0, spec.L_m)
        return float(total)

    def gram_matrix(self, spec: CircuitSpec, modes: Sequence[NormalMode]) -> np.ndarray:
        size = len(modes)
        gram = np.zeros((size, size))
        for i in range(size):
            for j in range(i, size):
                gram[i, j] = gram[j, i] = self.inner_product(spec, modes[i], modes[j])
        return gram

    def _peak_flux(self, spec: CircuitSpec, mode: NormalMode, n_points: int = 4001) -> float:
        xc = np.linspace(0.0, spec.L_c, n_points)
        xd = np.linspace(0.0, spec.L_d, n_points)
        return float(max(np.max(np.abs(mode.phi_c(xc))), np.max(np.abs(mode.phi_d(xd)))))

    def solve_normal_modes(self, spec: CircuitSpec, n_modes: int = 2) -> List[NormalMode]:
        """Lowest normal modes, scaled to peak flux Phi_0/(2 pi) and carrying C_n"""
        if n_modes < 2:
            raise PhysicsError(f"n_modes must be at least 2, got {n_modes}")
        log_warnings(self.logger, spec.validate(), "circuit")

        frequencies = self._find_frequencies(spec, n_modes)
        modes = []
        for index, omega in enumerate(frequencies, start=1):
            mode = self._build_mode(spec, index, omega)
            mode = mode.scaled(FLUX_QUANTUM / (2.0 * np.pi) / self._peak_flux(spec, mode))
            mode.C_n = (2.0 * np.pi / FLUX_QUANTUM) ** 2 * self.inner_product(spec, mode, mode)
            modes.append(mode)

        self.logger.info(
            "Normal modes: " + ", ".join(f"f{m.index}={m.frequency_hz / 1e9:.4f} GHz" for m in modes)
        )
        return modes

    def coupling_matrix(self, spec: CircuitSpec, modes: Sequence[NormalMode]) -> np.ndarray:
        """Dimensionless couplings lambda_nn' from the flux difference across the FBAR"""
        for mode in modes:
            if not mode.is_normalized:
                raise PhysicsError(f"mode {mode.index} is not normalized")
        size = len(modes)
        prefactor = (np.pi / FLUX_QUANTUM) ** 2 * spec.fbar_cap_per_len
        couplings = np.zeros((size, size))
        for i in range(size):
            for j in range(i, size):
                m, n = modes[i], modes[j]
                # Phi_d - Phi_c = -2 A on the overlap
                overlap = converged_gauss(lambda u: 4.0 * m.antisymmetric(u) * n.antisymmetric(u), 0.0, spec.L_m)
                couplings[i, j] = couplings[j, i] = prefactor * overlap / np.sqrt(m.C_n * n.C_n)
        return couplings

    def pump_coupling(self, spec: CircuitSpec, lambda12: float, omega1: float,
                      omega2: float) -> Tuple[float, float]:
        """Pair-creation rate lambda = -lambda12 sqrt(omega1 omega2) A / D and the relative drive detuning"""
        lam = -lambda12 * np.sqrt(omega1 * omega2) * spec.drive_amplitude / spec.fbar_thickness
        Omega_m = self.fbar_frequency(spec)
        detuning = (Omega_m - omega1 - omega2) / Omega_m
        if abs(detuning) > 1e-3:
            self.logger.info(f"FBAR drive detuned from omega1 + omega2 by {detuning:.3g} (relative)")
        return float(lam), float(detuning)

    def port_splits(self, modes: Sequence[NormalMode]) -> List[float]:
        """Fraction of each mode's damping through the cavity-side line, from the end fluxes"""
        splits = []
        for mode in modes:
            end_c = float(mode.phi_c(0.0)) ** 2
            end_d = float(mode.phi_d(0.0)) ** 2
            splits.append(end_c / (end_c + end_d))
        return splits

    def sample_modes(self, spec: CircuitSpec, modes: Sequence[NormalMode], n_points: int = 1101) -> pd.DataFrame:
        """Mode functions on the shared coordinate x = x_c = x_d + L_c - L_d"""
        offset = spec.L_c - spec.L_d
        x = np.linspace(min(0.0, offset), max(spec.L_c, spec.L_d + offset), n_points)
        data = {"x_m": x}
        for mode in modes:
            on_c = (x >= 0.0) & (x <= spec.L_c)
            on_d = (x >= offset) & (x <= spec.L_d + offset)
            data[f"phi_c_{mode.index}"] = np.where(on_c, mode.phi_c(np.clip(x, 0.0, spec.L_c)), np.nan)
            data[f"phi_d_{mode.index}"] = np.where(on_d, mode.phi_d(np.clip(x - offset, 0.0, spec.L_d)), np.nan)
        return pd.DataFrame(data)

    def _sweep_point(self, spec: CircuitSpec, L_m: float) -> Dict[str, float]:
        point = spec.with_changes(L_m=L_m)
        modes = self.solve_normal_modes(point, 2)
        couplings = self.coupling_matrix(point, modes)
        return {
            "L_m_um": L_m * 1e6,
            "f1_GHz": modes[0].frequency_hz / 1e9,
            "f2_GHz": modes[1].frequency_hz / 1e9,
            "lambda11": couplings[0, 0],
            "lambda12": couplings[0, 1],
            "lambda22": couplings[1, 1],
        }

    def coupling_sweep(self, spec: CircuitSpec, L_m_values: Sequence[float], threads: int = 1) -> pd.DataFrame:
        """Couplings and frequencies versus overlap length, ordered by L_m"""
        values = sorted(float(v) for v in L_m_values)
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            rows = list(pool.map(lambda L_m: self._sweep_point(spec, L_m), values))
        return pd.DataFrame(rows)
