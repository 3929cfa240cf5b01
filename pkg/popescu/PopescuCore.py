import logging
from typing import List, Optional

import numpy as np
import scipy.linalg as la

from common.Errors import (CuntzRelationViolated, LetterOutOfRange, NumericalFailure, ShapeMismatch,
                           SizeCapExceeded, SupportCompressionBrokeCuntz)
from config.Configuration import Configuration, Tolerances, Caps
from logger.Logger import init_logger
from popescu.PopescuSystem import CanonicalSystem, InvariantState, MultiIndex, PopescuSystem
from utils.Utilities import operator_norm, span_dimension


class PopescuCore(object):
    """
    Validation, the Markov map tau(x) = sum_k v_k x v_k*, its trace dual and the reduction
    of a Popescu system to the support of its invariant state.

    Matrices are vectorized row-major, vec(A X B) = (A kron B^T) vec(X).
    """

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()

        self.tolerances: Tolerances = self.config.tolerances
        self.caps: Caps = self.config.caps

    @staticmethod
    def superoperator(v) -> np.ndarray:
        letters: np.ndarray = np.asarray(v)
        k: int = letters.shape[1]
        matrix: np.ndarray = np.zeros((k * k, k * k), dtype=complex)
        for op in letters:
            matrix += np.kron(op, op.conj())
        return matrix

    @staticmethod
    def cuntz_residual(v) -> float:
        letters: np.ndarray = np.asarray(v)
        total: np.ndarray = np.einsum('lab,lcb->ac', letters, letters.conj())
        return operator_norm(total - np.eye(letters.shape[1]))

    def validate(self, sys: PopescuSystem) -> PopescuSystem:
        if sys.d < 2:
            raise ShapeMismatch(f'Alphabet size must be at least 2, got {sys.d}')
        k: int = sys.v[0].shape[0]
        for idx, op in enumerate(sys.v):
            if op.ndim != 2 or op.shape != (k, k):
                raise ShapeMismatch(f'v[{idx}] has shape {op.shape}, expected ({k}, {k})')
        if k > self.caps.max_bond_dim:
            raise SizeCapExceeded('bond dimension', k, self.caps.max_bond_dim)

        residual: float = self.cuntz_residual(sys.v)
        self.logger.debug(f'Validating {sys.name}: d={sys.d}, k={k}, Cuntz residual {residual:.3e}')
        if residual > sys.tol:
            raise CuntzRelationViolated(residual, sys.tol)

        return sys.with_residual(residual)

    @staticmethod
    def _check_operand(sys: PopescuSystem, x: np.ndarray) -> np.ndarray:
        operand: np.ndarray = np.asarray(x, dtype=complex)
        if operand.shape != (sys.k, sys.k):
            raise ShapeMismatch(f'Operand has shape {operand.shape}, expected ({sys.k}, {sys.k})')
        return operand

    def cp_map_apply(self, sys: PopescuSystem, x: np.ndarray) -> np.ndarray:
        operand: np.ndarray = self._check_operand(sys, x)
        letters: np.ndarray = sys.stacked
        return np.einsum('lab,bc,ldc->ad', letters, operand, letters.conj())

    def predual_apply(self, sys: PopescuSystem, rho_in: np.ndarray) -> np.ndarray:
        operand: np.ndarray = self._check_operand(sys, rho_in)
        letters: np.ndarray = sys.stacked
        return np.einsum('lba,bc,lcd->ad', letters.conj(), operand, letters)

    def word_operator(self, sys: PopescuSystem, word: MultiIndex) -> np.ndarray:
        product: np.ndarray = np.eye(sys.k, dtype=complex)
        for letter in word:
            if not 0 <= letter < sys.d:
                raise LetterOutOfRange(f'Letter {letter} of word {word} is outside [0, {sys.d})')
            product = product @ sys.v[letter]
        return product

    def fixed_space(self, sys: PopescuSystem) -> np.ndarray:
        """Orthonormal basis (columns, vectorized) of the eigenvalue-1 eigenspace of the predual."""
        predual: np.ndarray = self.superoperator(sys.v).conj().T
        try:
            return la.null_space(predual - np.eye(predual.shape[0]), rcond=self.tolerances.spectral)
        except (la.LinAlgError, ValueError) as exc:
            raise NumericalFailure(f'Fixed point solve did not converge: {exc}')

    def invariant_state(self, sys: PopescuSystem) -> InvariantState:
        k: int = sys.k
        predual: np.ndarray = self.superoperator(sys.v).conj().T
        right: np.ndarray = self.fixed_space(sys)
        try:
            left: np.ndarray = la.null_space(predual.conj().T - np.eye(k * k), rcond=self.tolerances.spectral)
        except (la.LinAlgError, ValueError) as exc:
            raise NumericalFailure(f'Fixed point solve did not converge: {exc}')

        fixed_dim: int = right.shape[1]
        if fixed_dim == 0 or left.shape[1] != fixed_dim:
            raise NumericalFailure(f'Eigenvalue 1 not resolved: right/left fixed spaces of dimension '
                                   f'{fixed_dim}/{left.shape[1]}')

        # Spectral projection onto the fixed space, applied to the maximally mixed state
        overlap: np.ndarray = left.conj().T @ right
        projected: np.ndarray = right @ la.solve(overlap, left.conj().T @ (np.eye(k).reshape(-1) / k))
        rho: np.ndarray = self._normalized_positive(projected.reshape(k, k))

        if fixed_dim > 1:
            self.logger.info(f'{sys.name}: fixed space of dimension {fixed_dim}, reducing to an extremal fixed point')
            rho = self._extremal_fixed_point(sys, rho, right)

        residual: float = operator_norm(self.predual_apply(sys, rho) - rho)
        if residual > 10 * max(sys.tol, self.tolerances.spectral):
            raise NumericalFailure(f'Invariant state residual {residual:.3e} is too large')

        return InvariantState(rho=rho, fixed_dim=fixed_dim, residual=residual)

    def _normalized_positive(self, matrix: np.ndarray) -> np.ndarray:
        hermitian: np.ndarray = (matrix + matrix.conj().T) / 2
        trace: float = float(np.trace(hermitian).real)
        if abs(trace) < self.tolerances.eigen_floor:
            raise NumericalFailure('Fixed point has vanishing trace')
        eigenvalues, vectors = la.eigh(hermitian / trace)
        clipped: np.ndarray = np.maximum(eigenvalues, 0.0)
        positive: np.ndarray = (vectors * clipped) @ vectors.conj().T
        return positive / np.trace(positive).real

    def _hermitian_fixed_points(self, sys: PopescuSystem, basis: np.ndarray) -> List[np.ndarray]:
        k: int = sys.k
        points: List[np.ndarray] = []
        for column in basis.T:
            x: np.ndarray = column.reshape(k, k)
            points.append((x + x.conj().T) / 2)
            points.append((x - x.conj().T) / 2j)
        return [p for p in points if la.norm(p) > self.tolerances.support]

    def _extremal_fixed_point(self, sys: PopescuSystem, rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
        """
        Pushes a positive fixed point along other Hermitian fixed points to the boundary of the
        positive cone until no fixed point supported inside its support is left besides itself.
        """
        candidates: List[np.ndarray] = self._hermitian_fixed_points(sys, basis)
        tol: float = max(sys.tol, self.tolerances.spectral)

        for _ in range(sys.k):
            eigenvalues, vectors = la.eigh(rho)
            support: np.ndarray = vectors[:, eigenvalues > self.tolerances.support]
            if support.shape[1] <= 1:
                break
            compressed_rho: np.ndarray = support.conj().T @ rho @ support
            inv_root: np.ndarray = la.inv(la.sqrtm(compressed_rho))

            reduced: bool = False
            for hermitian in candidates:
                compressed: np.ndarray = support.conj().T @ hermitian @ support
                lifted: np.ndarray = support @ compressed @ support.conj().T
                if operator_norm(self.predual_apply(sys, lifted) - lifted) > tol:
                    continue
                relative: np.ndarray = inv_root @ compressed @ inv_root
                mu: np.ndarray = la.eigvalsh((relative + relative.conj().T) / 2)
                if mu.max() - mu.min() < tol:
                    continue
                direction, scale = (compressed, mu.max()) if mu.max() > 0 else (-compressed, -mu.min())
                boundary: np.ndarray = compressed_rho - direction / scale
                rho = self._normalized_positive(support @ boundary @ support.conj().T)
                reduced = True
                break
            if not reduced:
                break

        return rho

    def canonicalize(self,
                     sys: PopescuSystem,
                     max_word_len: Optional[int] = None) -> CanonicalSystem:
        state: InvariantState = self.invariant_state(sys)
        eigenvalues, vectors = la.eigh(state.rho)
        keep: np.ndarray = eigenvalues > self.tolerances.support

        if keep.all():
            compressed: PopescuSystem = sys
            rho: np.ndarray = state.rho
        else:
            support: np.ndarray = vectors[:, keep]
            self.logger.debug(f'{sys.name}: compressing bond space {sys.k} -> {support.shape[1]}')
            matrices: List[np.ndarray] = [support.conj().T @ op @ support for op in sys.v]
            residual: float = self.cuntz_residual(matrices)
            if residual > sys.tol:
                raise SupportCompressionBrokeCuntz(residual)
            compressed = PopescuSystem.from_matrices(matrices, tol=sys.tol, name=sys.name,
                                                     metadata=sys.metadata).with_residual(residual)
            rho = support.conj().T @ state.rho @ support
            rho = (rho + rho.conj().T) / 2
            rho = rho / np.trace(rho).real

        word_cap: int = max_word_len if max_word_len is not None else 2 * compressed.k ** 2
        algebra_dim: int = span_dimension(compressed.v, word_cap, self.tolerances.support)

        rho_frozen: np.ndarray = np.array(rho, dtype=complex)
        rho_frozen.setflags(write=False)
        return CanonicalSystem(base=compressed,
                               rho=rho_frozen,
                               ergodic=state.unique,
                               fixed_dim=state.fixed_dim,
                               algebra_dim=algebra_dim,
                               original_k=sys.k)
