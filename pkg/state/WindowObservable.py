from __future__ import annotations

from dataclasses import dataclass
from numbers import Number
from typing import Sequence, Tuple

import numpy as np

from common.Errors import ShapeMismatch


def _frozen(matrix: np.ndarray) -> np.ndarray:
    array: np.ndarray = np.array(matrix, dtype=complex, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class WindowObservable(object):
    """
    Local observable Q on the sites first_site .. first_site + n_sites - 1

    `matrix` is Q in the product basis, rows and columns indexed by words I = (i_1, .., i_n) read
    left to right along the chain (first site most significant), so that
    Q = sum_{I,J} matrix[I, J] e^{i_1}_{j_1} (x) .. (x) e^{i_n}_{j_n}.
    """
    first_site: int
    n_sites: int
    d: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.n_sites < 1 or self.d < 1:
            raise ShapeMismatch(f'Window needs n_sites >= 1 and d >= 1, got n_sites={self.n_sites}, d={self.d}')
        dim: int = self.d ** self.n_sites
        if self.matrix.shape != (dim, dim):
            raise ShapeMismatch(f'Coefficient matrix has shape {self.matrix.shape}, '
                                f'expected ({dim}, {dim}) for d={self.d}, n_sites={self.n_sites}')

    @staticmethod
    def from_matrix(matrix: np.ndarray, d: int, first_site: int = 0) -> WindowObservable:
        array: np.ndarray = np.atleast_2d(np.asarray(matrix, dtype=complex))
        n_sites: int = 1
        while d ** n_sites < array.shape[0]:
            n_sites += 1
        return WindowObservable(first_site=first_site, n_sites=n_sites, d=d, matrix=_frozen(array))

    @staticmethod
    def from_tensor(tensor: np.ndarray, first_site: int = 0) -> WindowObservable:
        """Builds the observable from coefficients q[i_1 .. i_n, j_1 .. j_n] of shape (d,..,d; d,..,d)."""
        array: np.ndarray = np.asarray(tensor, dtype=complex)
        if array.ndim < 2 or array.ndim % 2 or len(set(array.shape)) != 1:
            raise ShapeMismatch(f'Coefficient tensor of shape {array.shape} is not (d,..,d; d,..,d)')
        d: int = array.shape[0]
        n_sites: int = array.ndim // 2
        return WindowObservable(first_site=first_site, n_sites=n_sites, d=d,
                                matrix=_frozen(array.reshape(d ** n_sites, d ** n_sites)))

    @staticmethod
    def identity(d: int, n_sites: int = 1, first_site: int = 0) -> WindowObservable:
        return WindowObservable(first_site=first_site, n_sites=n_sites, d=d,
                                matrix=_frozen(np.eye(d ** n_sites)))

    @staticmethod
    def single_site(op: np.ndarray, site: int = 0) -> WindowObservable:
        array: np.ndarray = np.asarray(op, dtype=complex)
        return WindowObservable(first_site=site, n_sites=1, d=array.shape[0], matrix=_frozen(array))

    @staticmethod
    def matrix_unit(d: int, upper: Sequence[int], lower: Sequence[int], first_site: int = 0) -> WindowObservable:
        """e^{i_1}_{j_1} (x) .. (x) e^{i_n}_{j_n} with upper = I and lower = J."""
        if len(upper) != len(lower) or not upper:
            raise ShapeMismatch(f'Matrix unit needs two words of equal nonzero length, got {upper} and {lower}')
        n_sites: int = len(upper)
        row: int = int(np.ravel_multi_index(tuple(upper), (d,) * n_sites))
        column: int = int(np.ravel_multi_index(tuple(lower), (d,) * n_sites))
        matrix: np.ndarray = np.zeros((d ** n_sites, d ** n_sites), dtype=complex)
        matrix[row, column] = 1.0
        return WindowObservable(first_site=first_site, n_sites=n_sites, d=d, matrix=_frozen(matrix))

    @property
    def last_site(self) -> int:
        return self.first_site + self.n_sites - 1

    @property
    def dim(self) -> int:
        return self.d ** self.n_sites

    @property
    def tensor(self) -> np.ndarray:
        return self.matrix.reshape((self.d,) * (2 * self.n_sites))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=tol, rtol=0.0))

    def adjoint(self) -> WindowObservable:
        return WindowObservable(self.first_site, self.n_sites, self.d, _frozen(self.matrix.conj().T))

    def transpose(self) -> WindowObservable:
        return WindowObservable(self.first_site, self.n_sites, self.d, _frozen(self.matrix.T))

    def mirrored(self) -> WindowObservable:
        """Reflection around the bond between sites 0 and 1 with complex conjugated coefficients."""
        n: int = self.n_sites
        order = list(reversed(range(n))) + list(reversed(range(n, 2 * n)))
        matrix: np.ndarray = self.tensor.transpose(order).reshape(self.matrix.shape).conj()
        return WindowObservable(1 - self.last_site, n, self.d, _frozen(matrix))

    def shifted(self, offset: int) -> WindowObservable:
        return WindowObservable(self.first_site + offset, self.n_sites, self.d, self.matrix)

    def placed_at(self, first_site: int) -> WindowObservable:
        return self.shifted(first_site - self.first_site)

    def extended(self, first_site: int, n_sites: int) -> WindowObservable:
        """The same operator on a larger window, padded with identities."""
        if first_site > self.first_site or first_site + n_sites - 1 < self.last_site:
            raise ShapeMismatch(f'Window [{first_site}, {first_site + n_sites - 1}] does not cover '
                                f'[{self.first_site}, {self.last_site}]')
        before: np.ndarray = np.eye(self.d ** (self.first_site - first_site))
        after: np.ndarray = np.eye(self.d ** (first_site + n_sites - 1 - self.last_site))
        matrix: np.ndarray = np.kron(np.kron(before, self.matrix), after)
        return WindowObservable(first_site, n_sites, self.d, _frozen(matrix))

    def tensor_with(self, other: WindowObservable) -> WindowObservable:
        """Product of two observables on disjoint windows, identities filling any sites between them."""
        self._check_alphabet(other)
        left, right = (self, other) if self.first_site <= other.first_site else (other, self)
        if right.first_site <= left.last_site:
            raise ShapeMismatch(f'Windows [{left.first_site}, {left.last_site}] and '
                                f'[{right.first_site}, {right.last_site}] overlap')
        between: np.ndarray = np.eye(self.d ** (right.first_site - left.last_site - 1))
        matrix: np.ndarray = np.kron(np.kron(left.matrix, between), right.matrix)
        return WindowObservable(left.first_site, right.last_site - left.first_site + 1, self.d, _frozen(matrix))

    def _check_alphabet(self, other: WindowObservable) -> None:
        if other.d != self.d:
            raise ShapeMismatch(f'Observables over different site dimensions {self.d} and {other.d}')

    def _common_window(self, other: WindowObservable):
        first: int = min(self.first_site, other.first_site)
        n_sites: int = max(self.last_site, other.last_site) - first + 1
        return self.extended(first, n_sites), other.extended(first, n_sites)

    def __add__(self, other: WindowObservable) -> WindowObservable:
        self._check_alphabet(other)
        left, right = self._common_window(other)
        return WindowObservable(left.first_site, left.n_sites, self.d, _frozen(left.matrix + right.matrix))

    def __sub__(self, other: WindowObservable) -> WindowObservable:
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, Number):
            return WindowObservable(self.first_site, self.n_sites, self.d, _frozen(complex(other) * self.matrix))
        if isinstance(other, WindowObservable):
            self._check_alphabet(other)
            left, right = self._common_window(other)
            return WindowObservable(left.first_site, left.n_sites, self.d, _frozen(left.matrix @ right.matrix))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __repr__(self) -> str:
        return f'WindowObservable(sites=[{self.first_site}, {self.last_site}], d={self.d})'


@dataclass(frozen=True, eq=False)
class ReducedDensity(object):
    n_sites: int
    d: int
    sigma: np.ndarray

    def partial_trace_last(self) -> ReducedDensity:
        tensor: np.ndarray = self.sigma.reshape(self.d ** (self.n_sites - 1), self.d,
                                                self.d ** (self.n_sites - 1), self.d)
        return ReducedDensity(self.n_sites - 1, self.d, _frozen(np.einsum('aibi->ab', tensor)))

    def partial_trace_first(self) -> ReducedDensity:
        tensor: np.ndarray = self.sigma.reshape(self.d, self.d ** (self.n_sites - 1),
                                                self.d, self.d ** (self.n_sites - 1))
        return ReducedDensity(self.n_sites - 1, self.d, _frozen(np.einsum('iaib->ab', tensor)))

    def reflected(self) -> np.ndarray:
        """sigma with the site order reversed on both the ket and the bra side."""
        n: int = self.n_sites
        tensor: np.ndarray = self.sigma.reshape((self.d,) * (2 * n))
        order = list(reversed(range(n))) + list(reversed(range(n, 2 * n)))
        return tensor.transpose(order).reshape(self.sigma.shape)

    def expectation(self, observable: WindowObservable) -> complex:
        return complex(np.trace(self.sigma @ observable.matrix))


@dataclass(frozen=True)
class NormReport(object):
    operator_norm: float     # spectral norm of Q in the product basis
    coefficient_norm: float  # spectral norm of the reshuffled coefficient matrix q(I',J'|I,J)
    two_sided: bool

    @property
    def discrepancy(self) -> float:
        return abs(self.operator_norm - self.coefficient_norm)


@dataclass(frozen=True)
class WindowCount(object):
    d: int
    n: int          # sites on each side of the bond
    samples: int


@dataclass(frozen=True)
class NormSurvey(object):
    samples: int
    counterexamples: int
    max_discrepancy: float
    windows: Tuple[WindowCount, ...] = ()

    @property
    def max_n(self) -> int:
        return max((window.n for window in self.windows), default=0)


@dataclass(frozen=True, eq=False)
class BondObservable(object):
    """
    Two sided observable around the bond between sites 0 and 1: `matrix` acts on the n left sites
    followed by the n right sites, and the halves sit `gap` sites away from the bond, on
    [-gap-n+1, -gap] and [gap+1, gap+n].
    """
    n: int
    d: int
    matrix: np.ndarray
    gap: int = 0

    def __post_init__(self) -> None:
        dim: int = self.d ** (2 * self.n)
        if self.matrix.shape != (dim, dim):
            raise ShapeMismatch(f'Two sided coefficients have shape {self.matrix.shape}, expected ({dim}, {dim})')
        if self.gap < 0:
            raise ShapeMismatch(f'Bond observable gap must be non-negative, got {self.gap}')

    @staticmethod
    def around_bond(observable: WindowObservable, gap: int = 0) -> BondObservable:
        if observable.n_sites % 2 or observable.first_site != 1 - observable.n_sites // 2:
            raise ShapeMismatch(f'Observable on [{observable.first_site}, {observable.last_site}] is not '
                                f'a symmetric window around the bond')
        return BondObservable(n=observable.n_sites // 2, d=observable.d, matrix=observable.matrix, gap=gap)

    @property
    def window(self) -> WindowObservable:
        return WindowObservable(first_site=1 - self.n, n_sites=2 * self.n, d=self.d, matrix=self.matrix)

    def joint_window(self) -> WindowObservable:
        """The observable on [-gap-n+1, gap+n] with identities on the 2 gap sites in between."""
        half: int = self.d ** self.n
        middle: np.ndarray = np.eye(self.d ** (2 * self.gap))
        tensor: np.ndarray = self.matrix.reshape(half, half, half, half)
        joint: np.ndarray = np.einsum('aibj,mn->amibnj', tensor, middle).reshape(
            half * half * middle.shape[0], half * half * middle.shape[0])
        return WindowObservable(first_site=-self.gap - self.n + 1, n_sites=2 * self.n + 2 * self.gap,
                                d=self.d, matrix=_frozen(joint))

    def reflected(self) -> BondObservable:
        """J(Q): sites mirrored around the bond, coefficients conjugated."""
        sites: int = 2 * self.n
        tensor: np.ndarray = self.matrix.reshape((self.d,) * (2 * sites))
        order = list(reversed(range(sites))) + list(reversed(range(sites, 2 * sites)))
        mirrored: np.ndarray = tensor.transpose(order).reshape(self.matrix.shape).conj()
        return BondObservable(n=self.n, d=self.d, matrix=_frozen(mirrored), gap=self.gap)
