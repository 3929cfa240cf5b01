import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.Errors import LengthMismatch, OverlapError, ShapeMismatch, SizeCapExceeded
from config.Configuration import Caps, Configuration, Tolerances
from logger.Logger import init_logger
from modular.StandardForm import DualSystem
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import CanonicalSystem, MultiIndex
from state.WindowObservable import (BondObservable, NormReport, NormSurvey, ReducedDensity, WindowCount,
                                    WindowObservable)
from utils.Utilities import operator_norm, psd_sqrt_pair, word_products


class StateEvaluator(object):
    """
    Evaluates the translation invariant chain state

        omega(e^{i_1}_{j_1} (x) .. (x) e^{i_n}_{j_n}) = tr(rho v_I v_J*)

    with I = (i_1, .., i_n) read left to right along the chain.
    """

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()
        self.core: PopescuCore = PopescuCore()

        self.tolerances: Tolerances = self.config.tolerances
        self.caps: Caps = self.config.caps

    def check_window(self, d: int, n_sites: int) -> None:
        if n_sites < 1:
            raise ShapeMismatch(f'Window needs at least one site, got {n_sites}')
        if d ** n_sites > self.caps.max_window_dim:
            raise SizeCapExceeded(f'window of {n_sites} sites over d={d}', d ** n_sites, self.caps.max_window_dim)

    @staticmethod
    def _check_alphabet(csys: CanonicalSystem, observable: WindowObservable) -> None:
        if observable.d != csys.d:
            raise ShapeMismatch(f'Observable acts on sites of dimension {observable.d}, the system has d={csys.d}')

    def matrix_element(self, csys: CanonicalSystem, upper: MultiIndex, lower: MultiIndex) -> complex:
        if len(upper) != len(lower):
            raise LengthMismatch(f'Matrix unit words {upper} and {lower} differ in length')
        v_upper: np.ndarray = self.core.word_operator(csys.base, upper)
        v_lower: np.ndarray = self.core.word_operator(csys.base, lower)
        return complex(np.trace(csys.rho @ v_upper @ v_lower.conj().T))

    def reduced_density(self, csys: CanonicalSystem, n: int) -> ReducedDensity:
        self.check_window(csys.d, n)
        words: np.ndarray = word_products(csys.v, n)
        # sigma[J, I] = tr(rho v_I v_J*) so that tr(sigma Q) = sum q[I, J] tr(rho v_I v_J*)
        sigma: np.ndarray = np.einsum('ab,ibc,jac->ji', csys.rho, words, words.conj(), optimize=True)
        sigma = (sigma + sigma.conj().T) / 2
        sigma.setflags(write=False)
        return ReducedDensity(n_sites=n, d=csys.d, sigma=sigma)

    def window_map(self, csys: CanonicalSystem, observable: WindowObservable, x: np.ndarray) -> np.ndarray:
        """E_Q(x) = sum_{I,J} q[I, J] v_I x v_J*."""
        self._check_alphabet(csys, observable)
        self.check_window(csys.d, observable.n_sites)
        words: np.ndarray = word_products(csys.v, observable.n_sites)
        return np.einsum('ij,iab,bc,jdc->ad', observable.matrix, words, x, words.conj(), optimize=True)

    def expectation(self, csys: CanonicalSystem, observable: WindowObservable) -> complex:
        identity: np.ndarray = np.eye(csys.k, dtype=complex)
        return complex(np.trace(csys.rho @ self.window_map(csys, observable, identity)))

    def transfer_power(self, csys: CanonicalSystem, x: np.ndarray, power: int) -> np.ndarray:
        result: np.ndarray = np.asarray(x, dtype=complex)
        for _ in range(power):
            result = self.core.cp_map_apply(csys.base, result)
        return result

    @staticmethod
    def joint_window(first: WindowObservable, second: WindowObservable, gap: int) -> WindowObservable:
        """first (x) id^{gap} (x) second, starting at the first window's site."""
        if gap < 0:
            raise OverlapError(f'Gap {gap} makes the windows overlap')
        return first.tensor_with(second.placed_at(first.last_site + gap + 1))

    def two_point(self,
                  csys: CanonicalSystem,
                  first: WindowObservable,
                  second: WindowObservable,
                  gap: int) -> complex:
        """omega(Q1 theta_gap(Q2)) with `gap` empty sites between the end of Q1 and the start of Q2."""
        if gap < 0:
            raise OverlapError(f'Gap {gap} makes the windows overlap')
        identity: np.ndarray = np.eye(csys.k, dtype=complex)
        inner: np.ndarray = self.window_map(csys, second, identity)
        bridged: np.ndarray = self.transfer_power(csys, inner, gap)
        return complex(np.trace(csys.rho @ self.window_map(csys, first, bridged)))

    def connected_two_point(self,
                            csys: CanonicalSystem,
                            first: WindowObservable,
                            second: WindowObservable,
                            gap: int) -> complex:
        return self.two_point(csys, first, second, gap) - self.expectation(csys, first) * self.expectation(csys, second)

    def left_operator(self, dual: DualSystem, observable: WindowObservable) -> np.ndarray:
        """sum_{K,L} q[K, L] w_L* w_K for a window read left to right and ending at the bond."""
        self.check_window(dual.d, observable.n_sites)
        words: np.ndarray = word_products(dual.w, observable.n_sites)
        return np.einsum('kl,lba,kbc->ac', observable.matrix, words.conj(), words, optimize=True)

    def two_sided_eval(self,
                       csys: CanonicalSystem,
                       dual: DualSystem,
                       left: WindowObservable,
                       right: WindowObservable) -> complex:
        """
        omega(left (x) right) for a left window ending at site 0 and a right window starting at site 1,
        evaluated in the standard form as <Omega, right-window primal words and left-window dual words Omega>.
        """
        if left.last_site != 0 or right.first_site != 1:
            raise ShapeMismatch(f'Two sided evaluation needs the left window to end at 0 and the right one to '
                                f'start at 1, got [{left.first_site}, {left.last_site}] and '
                                f'[{right.first_site}, {right.last_site}]')
        self._check_alphabet(csys, left)
        self._check_alphabet(csys, right)
        rho_half, _, _ = psd_sqrt_pair(csys.rho, self.tolerances.eigen_floor)
        primal: np.ndarray = self.window_map(csys, right, np.eye(csys.k, dtype=complex))
        mirrored: np.ndarray = self.left_operator(dual, left)
        return complex(np.trace(rho_half @ primal @ rho_half @ mirrored))

    def bond_eval(self,
                  csys: CanonicalSystem,
                  dual: DualSystem,
                  observable: BondObservable) -> complex:
        """
        omega of a two sided observable: the right half through the primal words, bridged by
        tau^{2 gap}, the left half through the dual words acting on the commutant side
        """
        if observable.d != csys.d:
            raise ShapeMismatch(f'Observable acts on sites of dimension {observable.d}, the system has d={csys.d}')
        n: int = observable.n
        self.check_window(csys.d, 2 * n)
        dim: int = csys.d ** n
        rho_half, _, _ = psd_sqrt_pair(csys.rho, self.tolerances.eigen_floor)

        primal: np.ndarray = word_products(csys.v, n)
        dual_words: np.ndarray = word_products(dual.w, n)
        right_blocks: np.ndarray = np.einsum('iab,jcb->ijac', primal, primal.conj())
        transfer: np.ndarray = np.linalg.matrix_power(PopescuCore.superoperator(csys.v), 2 * observable.gap)
        k: int = csys.k
        right_blocks = (right_blocks.reshape(dim * dim, k * k) @ transfer.T).reshape(dim, dim, k, k)
        right_blocks = np.einsum('ab,ijbc,cd->ijad', rho_half, right_blocks, rho_half)
        left_blocks: np.ndarray = np.einsum('yba,xbc->xyac', dual_words.conj(), dual_words)
        q4: np.ndarray = observable.matrix.reshape(dim, dim, dim, dim)
        return complex(np.einsum('xiyj,ijab,xyba->', q4, right_blocks, left_blocks, optimize=True))

    def window_operator_norm(self, observable: WindowObservable, two_sided: bool = False) -> NormReport:
        """
        Operator norm of Q, always taken from Q in the product basis. For a two sided window the
        spectral norm of the coefficient matrix q(I', J' | I, J) is reported next to it.
        """
        self.check_window(observable.d, observable.n_sites)
        op_norm: float = operator_norm(observable.matrix)
        if not two_sided:
            return NormReport(operator_norm=op_norm, coefficient_norm=op_norm, two_sided=False)

        if observable.n_sites % 2:
            raise ShapeMismatch(f'Two sided window needs an even number of sites, got {observable.n_sites}')
        half: int = observable.d ** (observable.n_sites // 2)
        coefficients: np.ndarray = (observable.matrix.reshape(half, half, half, half)
                                    .transpose(0, 2, 1, 3)
                                    .reshape(half * half, half * half))
        return NormReport(operator_norm=op_norm, coefficient_norm=operator_norm(coefficients), two_sided=True)

    def norm_comparison_survey(self,
                               samples: int = 200,
                               seed: Optional[int] = None,
                               dimensions: Sequence[int] = (2, 3),
                               half_widths: Sequence[int] = (1, 2)) -> NormSurvey:
        """
        Compares the two norms on random Hermitian two sided windows, cycling through every
        (d, n) pair so each site dimension is sampled with n sites on each side of the bond.
        """
        rng: np.random.Generator = np.random.default_rng(
            self.config.certification.random_seed if seed is None else seed)
        shapes: List[Tuple[int, int]] = [(d, n) for n in half_widths for d in dimensions]
        counts: Dict[Tuple[int, int], int] = {shape: 0 for shape in shapes}
        counterexamples: int = 0
        worst: float = 0.0
        for sample in range(samples):
            d, n = shapes[sample % len(shapes)]
            dim: int = d ** (2 * n)
            raw: np.ndarray = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            observable: WindowObservable = WindowObservable.from_matrix((raw + raw.conj().T) / 2, d,
                                                                        first_site=1 - n)
            report: NormReport = self.window_operator_norm(observable, two_sided=True)
            counts[(d, n)] += 1
            worst = max(worst, report.discrepancy)
            if report.discrepancy > 1e-8:
                counterexamples += 1
                self.logger.info(f'Norm comparison counterexample #{sample} (d={d}, n={n}): operator norm '
                                 f'{report.operator_norm:.12g}, coefficient norm {report.coefficient_norm:.12g}')
        self.logger.info(f'Norm comparison survey: {counterexamples}/{samples} windows differ, '
                         f'largest gap {worst:.3e}')
        return NormSurvey(samples=samples,
                          counterexamples=counterexamples,
                          max_discrepancy=worst,
                          windows=tuple(WindowCount(d=d, n=n, samples=count)
                                        for (d, n), count in sorted(counts.items()) if count))
