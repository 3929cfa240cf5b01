import hashlib
from enum import Enum

from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.linalg as la


class FileUtilities(object):

    class Mode(Enum):
        ReadText = 'rt'
        ReadBinary = 'rb'
        Overwrite = 'w'

    @staticmethod
    def read_text(file_path: str) -> str:
        with open(file_path, FileUtilities.Mode.ReadText.value, encoding='utf-8') as file:
            return file.read()

    @staticmethod
    def write_text(file_path: str,
                   text: str,
                   mode: Mode = Mode.Overwrite) -> None:
        # newline='' keeps the bytes identical across platforms
        with open(file_path, mode.value, encoding='utf-8', newline='') as file:
            file.write(text)

    @staticmethod
    def sha256(file_path: str) -> str:
        with open(file_path, FileUtilities.Mode.ReadBinary.value) as file:
            return hashlib.sha256(file.read()).hexdigest()


def word_products(matrices: Sequence[np.ndarray], length: int) -> np.ndarray:
    """
    Products v_I = v_{i_1} ... v_{i_m} for every word of the given length

    :param matrices: the d letters, each k x k
    :param length: word length m >= 0
    :return: array of shape (d^m, k, k) indexed by words in lexicographic order, first letter most significant
    """
    letters: np.ndarray = np.asarray(matrices)
    k: int = letters.shape[1]
    products: np.ndarray = np.eye(k, dtype=complex)[np.newaxis, :, :]
    for _ in range(length):
        products = np.einsum('wab,lbc->wlac', products, letters).reshape(-1, k, k)
    return products


def reversed_word_products(matrices: Sequence[np.ndarray], length: int) -> np.ndarray:
    """Products v_{i_m} ... v_{i_1}, indexed by the unreversed word (i_1, ..., i_m)."""
    letters: np.ndarray = np.asarray(matrices)
    k: int = letters.shape[1]
    products: np.ndarray = np.eye(k, dtype=complex)[np.newaxis, :, :]
    for _ in range(length):
        products = np.einsum('lab,wbc->wlac', letters, products).reshape(-1, k, k)
    return products


def psd_sqrt_pair(rho: np.ndarray, floor: float) -> Tuple[np.ndarray, np.ndarray, float]:
    """rho^{1/2}, rho^{-1/2} and the condition number of rho (eigenvalues floored)."""
    eigenvalues, vectors = la.eigh((rho + rho.conj().T) / 2)
    clipped: np.ndarray = np.maximum(eigenvalues, floor)
    root: np.ndarray = (vectors * np.sqrt(clipped)) @ vectors.conj().T
    inverse_root: np.ndarray = (vectors / np.sqrt(clipped)) @ vectors.conj().T
    return root, inverse_root, float(clipped.max() / clipped.min())


def positive_part(hermitian: np.ndarray, clip: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
    """Unique positive and negative parts, hermitian = plus - minus."""
    eigenvalues, vectors = la.eigh((hermitian + hermitian.conj().T) / 2)
    plus: np.ndarray = np.where(eigenvalues > clip, eigenvalues, 0.0)
    minus: np.ndarray = np.where(eigenvalues < -clip, -eigenvalues, 0.0)
    return (vectors * plus) @ vectors.conj().T, (vectors * minus) @ vectors.conj().T


def gram_factor(psd: np.ndarray, clip: float = 1e-12) -> np.ndarray:
    """Matrix b with psd = b* b, rows indexed by the retained eigenvectors."""
    eigenvalues, vectors = la.eigh((psd + psd.conj().T) / 2)
    keep: np.ndarray = eigenvalues > clip
    return np.sqrt(eigenvalues[keep])[:, np.newaxis] * vectors[:, keep].conj().T


def operator_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(la.norm(matrix, 2))


def span_dimension(generators: Sequence[np.ndarray],
                   max_word_len: int,
                   tol: float = 1e-10) -> int:
    """
    Dimension of the complex span of all words in the generators and their adjoints

    Words are grown one letter at a time from the identity. The loop stops as soon as the rank
    does not grow any more or the word length reaches max_word_len.
    """
    letters: List[np.ndarray] = list(generators) + [g.conj().T for g in generators]
    k: int = letters[0].shape[0]
    basis: np.ndarray = la.orth(np.eye(k, dtype=complex).reshape(-1, 1), rcond=tol)
    frontier: List[np.ndarray] = [np.eye(k, dtype=complex)]

    for _ in range(max_word_len):
        products: List[np.ndarray] = [word @ letter for word in frontier for letter in letters]
        candidates: List[np.ndarray] = [p / la.norm(p) for p in products if la.norm(p) > tol]
        if not candidates:
            break
        stacked: np.ndarray = np.column_stack([basis] + [c.reshape(-1, 1) for c in candidates])
        grown: np.ndarray = la.orth(stacked, rcond=tol)
        if grown.shape[1] == basis.shape[1] or grown.shape[1] == k * k:
            basis = grown
            break
        # Keep only the new directions as the next frontier
        projector: np.ndarray = basis @ basis.conj().T
        residuals: np.ndarray = grown - projector @ grown
        fresh: np.ndarray = la.orth(residuals, rcond=tol)
        frontier = [fresh[:, j].reshape(k, k) for j in range(fresh.shape[1])]
        basis = grown

    return int(basis.shape[1])


def entries_norm(entries: Sequence[Tuple[int, int, complex]]) -> float:
    """Spectral norm of a sparse matrix given as (row, column, value) triples."""
    if not entries:
        return 0.0
    rows: List[int] = sorted({row for row, _, _ in entries})
    columns: List[int] = sorted({column for _, column, _ in entries})
    row_index: Dict[int, int] = {row: index for index, row in enumerate(rows)}
    column_index: Dict[int, int] = {column: index for index, column in enumerate(columns)}
    dense: np.ndarray = np.zeros((len(rows), len(columns)), dtype=complex)
    for row, column, value in entries:
        dense[row_index[row], column_index[column]] += value
    return operator_norm(dense)
