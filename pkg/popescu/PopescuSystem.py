from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np


def _frozen(matrix: np.ndarray) -> np.ndarray:
    array: np.ndarray = np.array(matrix, dtype=complex, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class MultiIndex(object):
    letters: Tuple[int, ...] = ()

    @staticmethod
    def of(*letters: int) -> MultiIndex:
        return MultiIndex(tuple(int(letter) for letter in letters))

    def reversed(self) -> MultiIndex:
        return MultiIndex(tuple(reversed(self.letters)))

    def __add__(self, other: MultiIndex) -> MultiIndex:
        return MultiIndex(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return f'({",".join(str(letter) for letter in self.letters)})'


@dataclass(frozen=True, eq=False)
class PopescuSystem(object):
    """
    d bond operators v_0 .. v_{d-1} on a k dimensional bond space with sum_k v_k v_k* = I

    `residual` is filled in by PopescuCore.validate and stays None on unchecked systems.
    """
    v: Tuple[np.ndarray, ...]
    tol: float = 1e-9
    name: str = 'unnamed'
    residual: Optional[float] = None
    metadata: Dict[str, str] = field(default_factory=dict)

    @staticmethod
    def from_matrices(matrices: Sequence[np.ndarray],
                      tol: float = 1e-9,
                      name: str = 'unnamed',
                      metadata: Optional[Dict[str, str]] = None) -> PopescuSystem:
        return PopescuSystem(v=tuple(_frozen(np.atleast_2d(m)) for m in matrices),
                             tol=tol,
                             name=name,
                             metadata=dict(metadata or {}))

    @property
    def d(self) -> int:
        return len(self.v)

    @property
    def k(self) -> int:
        return self.v[0].shape[0] if self.v else 0

    @property
    def stacked(self) -> np.ndarray:
        return np.asarray(self.v)

    def with_residual(self, residual: float) -> PopescuSystem:
        return PopescuSystem(v=self.v, tol=self.tol, name=self.name, residual=residual, metadata=self.metadata)

    def __repr__(self) -> str:
        return f'PopescuSystem(name={self.name}, d={self.d}, k={self.k}, residual={self.residual})'


@dataclass(frozen=True, eq=False)
class InvariantState(object):
    rho: np.ndarray
    fixed_dim: int
    residual: float

    @property
    def unique(self) -> bool:
        return self.fixed_dim == 1


@dataclass(frozen=True, eq=False)
class CanonicalSystem(object):
    base: PopescuSystem     # compressed to the support of rho
    rho: np.ndarray         # faithful invariant density on the compressed space
    ergodic: bool
    fixed_dim: int
    algebra_dim: int
    original_k: int

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def v(self) -> Tuple[np.ndarray, ...]:
        return self.base.v

    @property
    def tol(self) -> float:
        return self.base.tol

    @property
    def name(self) -> str:
        return self.base.name

    def __repr__(self) -> str:
        return (f'CanonicalSystem(name={self.name}, d={self.d}, k={self.k} (from {self.original_k}), '
                f'ergodic={self.ergodic}, fixed_dim={self.fixed_dim}, algebra_dim={self.algebra_dim})')
