from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class TransferOperator(object):
    """x -> sum_k v_k x v_k* as a k^2 x k^2 matrix acting on row-major vectorized matrices."""
    mat: np.ndarray
    k: int
    basis: str = 'matrix-units/row-major'

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (self.mat @ np.asarray(x, dtype=complex).reshape(-1)).reshape(self.k, self.k)

    def power(self, exponent: int) -> TransferOperator:
        return TransferOperator(mat=np.linalg.matrix_power(self.mat, exponent), k=self.k, basis=self.basis)


@dataclass(frozen=True)
class SpectralReport(object):
    eigenvalues: Tuple[complex, ...]    # sorted by modulus (descending), then phase
    peripheral: Tuple[complex, ...]     # |lambda| >= 1 - tol
    alpha: float                        # largest modulus once one copy of eigenvalue 1 is removed
    gauge_period: Optional[int]         # m when the peripheral set is exactly the simple m-th roots of unity
    fixed_dim: int
    correlation_length: float

    @property
    def spectral_radius(self) -> float:
        return abs(self.eigenvalues[0]) if self.eigenvalues else 0.0

    @property
    def mixing(self) -> bool:
        return len(self.peripheral) == 1 and self.fixed_dim == 1


@dataclass(frozen=True)
class KolmogorovResult(object):
    spectral_pass: bool
    iterates: Tuple[float, ...]         # iterates[i] is the defect after n = i + 1 steps
