import logging
import math
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as la
from scipy.optimize import linear_sum_assignment

from common.Errors import NumericalFailure, ShapeMismatch, SizeCapExceeded
from config.Configuration import Caps, Configuration, Tolerances
from logger.Logger import init_logger
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import CanonicalSystem, PopescuSystem
from spectral.TransferOperator import KolmogorovResult, SpectralReport, TransferOperator
from utils.Utilities import word_products


def hermitian_basis(k: int) -> List[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of the Hermitian k x k matrices."""
    basis: List[np.ndarray] = []
    for i in range(k):
        unit: np.ndarray = np.zeros((k, k), dtype=complex)
        unit[i, i] = 1.0
        basis.append(unit)
    for i in range(k):
        for j in range(i + 1, k):
            symmetric: np.ndarray = np.zeros((k, k), dtype=complex)
            symmetric[i, j] = symmetric[j, i] = 1 / np.sqrt(2)
            antisymmetric: np.ndarray = np.zeros((k, k), dtype=complex)
            antisymmetric[i, j] = 1j / np.sqrt(2)
            antisymmetric[j, i] = -1j / np.sqrt(2)
            basis.extend([symmetric, antisymmetric])
    return basis


class TransferSpectral(object):

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()

        self.tolerances: Tolerances = self.config.tolerances
        self.caps: Caps = self.config.caps

    def build_transfer(self, csys: CanonicalSystem) -> TransferOperator:
        mat: np.ndarray = PopescuCore.superoperator(csys.v)
        mat.setflags(write=False)
        return TransferOperator(mat=mat, k=csys.k)

    def fixed_dimension(self, top: TransferOperator, tol: Optional[float] = None) -> int:
        rcond: float = self.tolerances.spectral if tol is None else tol
        return int(la.null_space(top.mat - np.eye(top.mat.shape[0]), rcond=rcond).shape[1])

    def spectral_report(self, top: TransferOperator, tol: Optional[float] = None) -> SpectralReport:
        tol = self.tolerances.spectral if tol is None else tol
        try:
            raw: np.ndarray = la.eigvals(top.mat)
        except la.LinAlgError as exc:
            raise NumericalFailure(f'Transfer spectrum did not converge: {exc}')

        eigenvalues: List[complex] = sorted((complex(value) for value in raw),
                                            key=lambda value: (-round(abs(value), 10), round(np.angle(value), 10)))
        radius: float = abs(eigenvalues[0])
        if abs(radius - 1.0) > max(1e-6, 100 * tol):
            raise NumericalFailure(f'Transfer operator has spectral radius {radius:.12g}, expected 1')

        peripheral: List[complex] = [value for value in eigenvalues if abs(value) >= 1 - tol]

        # Only the Omega direction is removed: one copy of the eigenvalue closest to 1
        remaining: List[complex] = list(eigenvalues)
        remaining.pop(int(np.argmin([abs(value - 1) for value in remaining])))
        alpha: float = min(max((abs(value) for value in remaining), default=0.0), 1.0)
        if alpha >= 1 - tol:
            alpha = 1.0

        report: SpectralReport = SpectralReport(eigenvalues=tuple(eigenvalues),
                                                peripheral=tuple(peripheral),
                                                alpha=alpha,
                                                gauge_period=self._roots_of_unity_order(peripheral),
                                                fixed_dim=self.fixed_dimension(top, tol),
                                                correlation_length=self.correlation_length(alpha))
        self.logger.debug(f'Spectral report: alpha={alpha:.12g}, peripheral={len(peripheral)}, '
                          f'period={report.gauge_period}, fixed_dim={report.fixed_dim}')
        return report

    def _roots_of_unity_order(self, peripheral: List[complex]) -> Optional[int]:
        m: int = len(peripheral)
        if m == 0:
            return None
        turns: List[Fraction] = []
        for value in peripheral:
            exact: float = (np.angle(value) / (2 * np.pi)) % 1.0
            snapped: Fraction = Fraction(exact).limit_denominator(self.caps.max_period_denominator)
            if abs(float(snapped) - exact) > self.tolerances.root_snap:
                return None
            turns.append(snapped % 1)
        if sorted(turns) != [Fraction(j, m) for j in range(m)]:
            return None
        return m

    @staticmethod
    def correlation_length(alpha: float) -> float:
        if alpha <= 0.0:
            return 0.0
        if alpha >= 1.0:
            return math.inf
        return -1.0 / math.log(alpha)

    def ergodicity_check(self, csys: CanonicalSystem) -> bool:
        fixed_dim: int = self.fixed_dimension(self.build_transfer(csys))
        if fixed_dim != csys.fixed_dim:
            self.logger.debug(f'{csys.name}: input fixed space of dimension {csys.fixed_dim}, '
                              f'{fixed_dim} on the support of the extremal invariant state')
        return csys.ergodic and fixed_dim == 1

    def kolmogorov_check(self, csys: CanonicalSystem, n_max: Optional[int] = None) -> KolmogorovResult:
        n_max = self.config.certification.kolmogorov_steps if n_max is None else n_max
        top: TransferOperator = self.build_transfer(csys)
        report: SpectralReport = self.spectral_report(top)

        k: int = csys.k
        basis: np.ndarray = np.asarray(hermitian_basis(k))
        rho: np.ndarray = csys.rho
        phi: np.ndarray = np.einsum('ab,xba->x', rho, basis)
        product_of_means: np.ndarray = np.outer(phi, phi)

        iterates: List[float] = []
        current: np.ndarray = basis.reshape(len(basis), k * k)
        for _ in range(n_max):
            current = current @ top.mat.T
            moved: np.ndarray = current.reshape(len(basis), k, k)
            joint: np.ndarray = np.einsum('ab,xbc,yca->xy', rho, moved, moved, optimize=True)
            iterates.append(float(np.max(np.abs(joint - product_of_means))))

        return KolmogorovResult(spectral_pass=report.mixing, iterates=tuple(iterates))

    def gauge_group_detect(self, csys: CanonicalSystem, word_len_max: Optional[int] = None) -> Optional[int]:
        """
        gcd of the length differences |I| - |J| over word pairs with phi_0(v_I v_J*) != 0.
        None stands for the whole circle (every unequal length pair vanishes).
        """
        word_len_max = self.caps.gauge_word_len if word_len_max is None else word_len_max
        if csys.d ** word_len_max > self.caps.max_window_dim:
            raise SizeCapExceeded(f'gauge words of length {word_len_max} over d={csys.d}',
                                  csys.d ** word_len_max, self.caps.max_window_dim)

        products: List[np.ndarray] = [word_products(csys.v, length) for length in range(word_len_max + 1)]
        g: int = 0
        for longer in range(1, word_len_max + 1):
            rho_long: np.ndarray = np.einsum('ab,ibc->iac', csys.rho, products[longer])
            for shorter in range(longer):
                if g and (longer - shorter) % g == 0:
                    continue
                values: np.ndarray = np.einsum('iac,jac->ij', rho_long, products[shorter].conj(), optimize=True)
                if np.max(np.abs(values)) > self.tolerances.compare:
                    g = math.gcd(g, longer - shorter)
        self.logger.debug(f'{csys.name}: gauge gcd {g or "INFINITE"} up to word length {word_len_max}')
        return g or None

    def block_system(self, csys: CanonicalSystem, m: int) -> PopescuSystem:
        if m < 1:
            raise ShapeMismatch(f'Block size must be at least 1, got {m}')
        if csys.d ** m > self.caps.max_window_dim:
            raise SizeCapExceeded(f'block of {m} sites over d={csys.d}', csys.d ** m, self.caps.max_window_dim)
        letters: np.ndarray = word_products(csys.v, m)
        return PopescuSystem.from_matrices(list(letters), tol=csys.tol, name=f'{csys.name}^{m}',
                                           metadata=dict(csys.base.metadata, block=str(m)))

    def spectra_match(self, first: np.ndarray, second: np.ndarray) -> Tuple[bool, float]:
        """Multiset distance between two spectra by optimal pairing."""
        a: np.ndarray = np.asarray(first, dtype=complex)
        b: np.ndarray = np.asarray(second, dtype=complex)
        if a.shape != b.shape:
            return False, math.inf
        cost: np.ndarray = np.abs(a[:, np.newaxis] - b[np.newaxis, :])
        rows, columns = linear_sum_assignment(cost)
        distance: float = float(cost[rows, columns].max()) if len(rows) else 0.0
        return distance <= max(1e-9, self.tolerances.compare), distance
