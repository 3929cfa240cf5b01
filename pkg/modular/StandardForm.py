from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from popescu.PopescuSystem import MultiIndex

'''
Standard form of (M_k, phi_0) on vectorized k x k matrices (row-major, vec(A X B) = (A kron B^T) vec(X)):
the cyclic separating vector is vec(rho^{1/2}), M acts by left and the commutant by right multiplication.
'''


@dataclass(frozen=True, eq=False)
class StandardForm(object):
    k: int
    omega_vec: np.ndarray

    @property
    def dim(self) -> int:
        return self.k * self.k

    def left_action(self, x: np.ndarray) -> np.ndarray:
        return np.kron(x, np.eye(self.k))

    def right_action(self, a: np.ndarray) -> np.ndarray:
        return np.kron(np.eye(self.k), np.asarray(a).T)

    def j_action(self, vector: np.ndarray) -> np.ndarray:
        """Antilinear J: vec(A) -> vec(A*)."""
        return vector.reshape(self.k, self.k).conj().T.reshape(-1)

    def vector_state(self, operator: np.ndarray) -> complex:
        return complex(self.omega_vec.conj() @ operator @ self.omega_vec)


@dataclass(frozen=True, eq=False)
class ModularData(object):
    rho: np.ndarray
    rho_half: np.ndarray
    rho_inv_half: np.ndarray
    condition: float

    def sigma_i_half(self, x: np.ndarray) -> np.ndarray:
        return self.rho_inv_half @ x @ self.rho_half

    def sigma_minus_i_half(self, x: np.ndarray) -> np.ndarray:
        return self.rho_half @ x @ self.rho_inv_half

    def delta_action(self, vector: np.ndarray) -> np.ndarray:
        """Delta: vec(A) -> vec(rho A rho^{-1})."""
        k: int = self.rho.shape[0]
        matrix: np.ndarray = vector.reshape(k, k)
        return (self.rho @ matrix @ self.rho_inv_half @ self.rho_inv_half).reshape(-1)

    def delta_matrix(self) -> np.ndarray:
        rho_inv: np.ndarray = self.rho_inv_half @ self.rho_inv_half
        return np.kron(self.rho, rho_inv.T)

    def j_action(self, vector: np.ndarray) -> np.ndarray:
        k: int = self.rho.shape[0]
        return vector.reshape(k, k).conj().T.reshape(-1)


@dataclass(frozen=True, eq=False)
class DualSystem(object):
    """
    Dual letters w_k = rho^{1/2} v_k rho^{-1/2}. The dual Popescu operators are the right
    multiplications by w_k on the standard form.
    """
    w: Tuple[np.ndarray, ...]
    condition: float
    normalization_residual: float

    @property
    def d(self) -> int:
        return len(self.w)

    @property
    def k(self) -> int:
        return self.w[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        return np.asarray(self.w)

    def word(self, word: MultiIndex) -> np.ndarray:
        product: np.ndarray = np.eye(self.k, dtype=complex)
        for letter in word:
            product = product @ self.w[letter]
        return product

    def tilde_v(self, letter: int) -> np.ndarray:
        """Matrix of the dual operator on the k^2 dimensional standard form."""
        return np.kron(np.eye(self.k), self.w[letter].T)


@dataclass(frozen=True, eq=False)
class KmsSpace(object):
    """
    k x k matrices with the KMS inner product <<x, y>> = tr(rho^{1/2} x* rho^{1/2} y) = x_vec^H gram y_vec,
    where x_vec is the row-major matrix-unit vector. T_mat is tau in the orthonormal coordinates
    gram^{1/2} x_vec, so it is Hermitian exactly when tau is KMS symmetric.
    """
    k: int
    gram: np.ndarray
    gram_half: np.ndarray
    gram_inv_half: np.ndarray
    T_mat: np.ndarray

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        return self.gram_half @ np.asarray(x, dtype=complex).reshape(-1)

    @property
    def identity_vector(self) -> np.ndarray:
        return self.coordinates(np.eye(self.k, dtype=complex))

    def inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.asarray(x).reshape(-1).conj() @ self.gram @ np.asarray(y).reshape(-1))

    def basis(self) -> Sequence[np.ndarray]:
        """Matrices orthonormal for the KMS inner product, the preimages of the unit coordinates."""
        return [self.gram_inv_half[:, a].reshape(self.k, self.k) for a in range(self.k * self.k)]
