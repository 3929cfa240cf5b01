import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from certification.CertificateReport import (CertificateReport, DecayCertificate, DecaySample, PurityCertificate,
                                             ReflectionResult, SplitBoundRow, SplitCertificate)
from certification.Verdicts import Verdict
from common.Errors import AlphaIsOne, NotDetailedBalance, NumericalFailure, ShapeMismatch
from config.Configuration import CertificationConfig, Caps, Configuration, Tolerances
from logger.Logger import init_logger
from modular.ModularDual import DeltaTriviality, ModularDual
from modular.StandardForm import DualSystem, KmsSpace, ModularData
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import CanonicalSystem
from spectral.TransferOperator import KolmogorovResult, SpectralReport
from spectral.TransferSpectral import TransferSpectral
from state.StateEvaluator import StateEvaluator
from state.WindowObservable import BondObservable, ReducedDensity, WindowObservable
from utils.Utilities import entries_norm, gram_factor, positive_part, reversed_word_products, word_products


class Certifier(object):
    """Symmetry detectors and the purity, decay, reflection positivity and split certificates."""

    # Coefficient patterns of the even basis on the block (R, C): E_RR, E_RC + E_CR, i(E_RC - E_CR)
    EVEN_PATTERNS: Dict[str, np.ndarray] = {
        'diagonal': np.array([[1, 0], [0, 0]], dtype=complex),
        'symmetric': np.array([[0, 1], [1, 0]], dtype=complex),
        'antisymmetric': np.array([[0, 1j], [-1j, 0]], dtype=complex),
    }

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()

        self.tolerances: Tolerances = self.config.tolerances
        self.caps: Caps = self.config.caps
        self.settings: CertificationConfig = self.config.certification

        self.core: PopescuCore = PopescuCore()
        self.state: StateEvaluator = StateEvaluator()
        self.spectral: TransferSpectral = TransferSpectral()
        self.modular: ModularDual = ModularDual()

    def _symmetry_tol(self, csys: CanonicalSystem) -> float:
        return max(self.tolerances.compare, 10 * csys.tol)

    def max_depth(self, d: int, requested: int, sites_per_step: int = 1) -> int:
        depth: int = max(requested, 1)
        while depth > 1 and d ** (sites_per_step * depth) > self.caps.max_window_dim:
            depth -= 1
        return depth

    def _densities(self, csys: CanonicalSystem, n_max: Optional[int]) -> List[ReducedDensity]:
        n_max = self.settings.symmetry_depth if n_max is None else n_max
        return [self.state.reduced_density(csys, n) for n in range(1, n_max + 1)]

    def is_real(self, csys: CanonicalSystem, n_max: Optional[int] = None) -> bool:
        tol: float = self._symmetry_tol(csys)
        return all(np.allclose(density.sigma, density.sigma.T, atol=tol, rtol=0.0)
                   for density in self._densities(csys, n_max))

    def is_lattice_symmetric(self, csys: CanonicalSystem, n_max: Optional[int] = None) -> bool:
        tol: float = self._symmetry_tol(csys)
        return all(np.allclose(density.sigma, density.reflected(), atol=tol, rtol=0.0)
                   for density in self._densities(csys, n_max))

    def _cross_check(self, csys: CanonicalSystem, state_side: bool, kms: KmsSpace) -> Tuple[bool, float]:
        symmetric, defect = self.modular.detailed_balance_check(kms)
        if symmetric != state_side:
            self.logger.warning(f'{csys.name}: detailed balance from the state ({state_side}) disagrees with the '
                                f'KMS symmetry of tau ({symmetric}, defect {defect:.3e})')
        return symmetric, defect

    def detailed_balance(self, csys: CanonicalSystem, kms: Optional[KmsSpace] = None) -> bool:
        verdict: bool = self.is_real(csys) and self.is_lattice_symmetric(csys)
        if kms is None:
            kms = self.modular.kms_space(csys, self.modular.modular_data(csys))
        self._cross_check(csys, verdict, kms)
        return verdict

    def reflection_gram(self,
                        csys: CanonicalSystem,
                        dual: DualSystem,
                        observables: Sequence[WindowObservable]) -> np.ndarray:
        """G[a, b] = omega(J(x_a) x_b) for right window observables x_a on [1, n]."""
        mirrored: List[WindowObservable] = [observable.mirrored() for observable in observables]
        gram: np.ndarray = np.zeros((len(observables), len(observables)), dtype=complex)
        for a, left in enumerate(mirrored):
            for b, right in enumerate(observables):
                gram[a, b] = self.state.two_sided_eval(csys, dual, left, right)
        return gram

    def matrix_unit_reflection_gram(self, csys: CanonicalSystem, dual: DualSystem, n: int) -> np.ndarray:
        """reflection_gram over all matrix units e^I_J of [1, n], index I * d^n + J."""
        self.state.check_window(csys.d, 2 * n)
        k: int = csys.k
        rho_half, _, _ = self._rho_roots(csys)
        primal: np.ndarray = word_products(csys.v, n)
        mirrored: np.ndarray = reversed_word_products(dual.w, n)
        right: np.ndarray = np.einsum('iab,jcb->ijac', primal, primal.conj()).reshape(-1, k, k)
        left: np.ndarray = np.einsum('jba,ibc->ijac', mirrored.conj(), mirrored).reshape(-1, k, k)
        weighted: np.ndarray = np.einsum('ab,xbc,cd->xad', rho_half, right, rho_half, optimize=True)
        return np.einsum('bpq,aqp->ab', weighted, left, optimize=True)

    def _rho_roots(self, csys: CanonicalSystem) -> Tuple[np.ndarray, np.ndarray, float]:
        mod: ModularData = self.modular.modular_data(csys)
        return mod.rho_half, mod.rho_inv_half, mod.condition

    def reflection_positivity_check(self,
                                    csys: CanonicalSystem,
                                    dual: DualSystem,
                                    n: Optional[int] = None) -> ReflectionResult:
        n = self.settings.window if n is None else n
        gram: np.ndarray = self.matrix_unit_reflection_gram(csys, dual, n)
        min_eig: float = float(la.eigvalsh((gram + gram.conj().T) / 2).min())
        return ReflectionResult(psd=min_eig >= -1e-9, min_eig=min_eig, size=gram.shape[0], gram=gram)

    def purity_certificate(self, csys: CanonicalSystem) -> PurityCertificate:
        kolmogorov: KolmogorovResult = self.spectral.kolmogorov_check(csys)
        if kolmogorov.spectral_pass and csys.ergodic:
            return PurityCertificate(verdict=Verdict.Purity.Pure, reason=None, iterates=kolmogorov.iterates)

        report: SpectralReport = self.spectral.spectral_report(self.spectral.build_transfer(csys))
        if not csys.ergodic or report.fixed_dim > 1:
            reason: str = Verdict.Reason.NonErgodic.value
        elif report.gauge_period is not None and report.gauge_period > 1:
            reason = Verdict.Reason.PeripheralPeriod.with_argument(report.gauge_period)
        else:
            reason = Verdict.Reason.PeripheralSpectrum.value
        self.logger.debug(f'{csys.name}: not pure, {reason}')
        return PurityCertificate(verdict=Verdict.Purity.NotPure, reason=reason, iterates=kolmogorov.iterates)

    @staticmethod
    def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
        raw: np.ndarray = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return (raw + raw.conj().T) / 2

    def decay_certificate(self,
                          csys: CanonicalSystem,
                          delta_margin: Optional[float] = None,
                          steps: Optional[int] = None,
                          seed: Optional[int] = None,
                          pairs: int = 4) -> DecayCertificate:
        """
        Certified exponent delta* = -ln(alpha) - margin, with samples
        e^{delta* j} max |omega(Q1 theta_j(Q2)) - omega(Q1) omega(Q2)| over random single site pairs.
        With alpha = 0 the raw connected correlations are recorded.
        """
        delta_margin = self.settings.delta_margin if delta_margin is None else delta_margin
        steps = self.settings.decay_steps if steps is None else steps
        report: SpectralReport = self.spectral.spectral_report(self.spectral.build_transfer(csys))
        alpha: float = report.alpha
        if alpha >= 1 - self.tolerances.spectral:
            raise AlphaIsOne(f'{csys.name}: second spectral modulus is 1, no exponential decay can be certified')
        if not report.mixing:
            self.logger.warning(f'{csys.name}: decay certificate requested for a state that is not pure')

        delta_star: float = math.inf if alpha == 0.0 else -math.log(alpha) - delta_margin
        rng: np.random.Generator = np.random.default_rng(self.settings.random_seed if seed is None else seed)
        observables: List[Tuple[WindowObservable, WindowObservable]] = [
            (WindowObservable.single_site(self.random_hermitian(rng, csys.d), 0),
             WindowObservable.single_site(self.random_hermitian(rng, csys.d), 0))
            for _ in range(pairs)]

        samples: List[DecaySample] = []
        for distance in range(1, steps + 1):
            worst: float = max(abs(self.state.connected_two_point(csys, first, second, distance - 1))
                               for first, second in observables)
            weight: float = 1.0 if math.isinf(delta_star) else math.exp(delta_star * distance)
            samples.append(DecaySample(distance=distance, value=weight * worst))

        head: float = samples[0].value if samples else 0.0
        bounded: bool = all(sample.value <= head * (1 + 1e-6) + self.tolerances.compare for sample in samples)
        if not bounded:
            self.logger.warning(f'{csys.name}: weighted correlations are not bounded by the first sample')
        return DecayCertificate(alpha=alpha, delta_star=delta_star, samples=tuple(samples), bounded=bounded)

    @staticmethod
    def theta_hat(observable: WindowObservable, k: int) -> BondObservable:
        if k < 0:
            raise ShapeMismatch(f'Shift must be non-negative, got {k}')
        return BondObservable.around_bond(observable, gap=k)

    @staticmethod
    def even_odd_decomposition(observable: BondObservable) -> Tuple[BondObservable, BondObservable]:
        reflected: BondObservable = observable.reflected()
        even: BondObservable = BondObservable(observable.n, observable.d,
                                              (observable.matrix + reflected.matrix) / 2, observable.gap)
        odd: BondObservable = BondObservable(observable.n, observable.d,
                                             (observable.matrix - reflected.matrix) / 2, observable.gap)
        return even, odd

    def product_eval(self, csys: CanonicalSystem, observable: BondObservable) -> complex:
        """omega_L (x) omega_R on a two sided observable."""
        sigma: np.ndarray = self.state.reduced_density(csys, observable.n).sigma
        dim: int = csys.d ** observable.n
        q4: np.ndarray = observable.matrix.reshape(dim, dim, dim, dim)
        return complex(np.einsum('xiyj,yx,ji->', q4, sigma, sigma))

    def sampled_discrepancy(self, csys: CanonicalSystem, dual: DualSystem, window: int, gap: int) -> float:
        """|omega - omega_L (x) omega_R| on theta_gap of a seeded random even observable of unit norm."""
        rng: np.random.Generator = np.random.default_rng(self.settings.random_seed)
        dim: int = csys.d ** (2 * window)
        raw: BondObservable = BondObservable(n=window, d=csys.d, matrix=self.random_hermitian(rng, dim))
        even, _ = self.even_odd_decomposition(raw)
        shifted: BondObservable = BondObservable(n=window, d=csys.d, gap=gap,
                                                 matrix=even.matrix / np.linalg.norm(even.matrix, 2))
        return float(abs(self.state.bond_eval(csys, dual, shifted) - self.product_eval(csys, shifted)))

    def split_bound_check(self,
                          csys: CanonicalSystem,
                          dual: DualSystem,
                          n: Optional[int] = None,
                          k_max: Optional[int] = None,
                          strict: bool = False,
                          detailed_balance: Optional[bool] = None) -> SplitCertificate:
        n = self.settings.window if n is None else n
        k_max = self.settings.gap_max if k_max is None else k_max

        report: SpectralReport = self.spectral.spectral_report(self.spectral.build_transfer(csys))
        reason: Optional[str] = None
        if not (report.mixing and csys.ergodic):
            reason = Verdict.Reason.NotPure.value
        elif report.alpha >= 1.0:
            reason = Verdict.Reason.AlphaIsOne.value
        elif not (self.detailed_balance(csys) if detailed_balance is None else detailed_balance):
            reason = Verdict.Reason.NotDetailedBalance.value
            if strict:
                raise NotDetailedBalance(f'{csys.name}: the state is not real and lattice symmetric')
        if reason is not None:
            if strict and reason == Verdict.Reason.AlphaIsOne.value:
                raise AlphaIsOne(f'{csys.name}: alpha = 1')
            return SplitCertificate(verdict=Verdict.Split.NotApplicable, reason=reason)

        mod: ModularData = self.modular.modular_data(csys)
        rows: List[SplitBoundRow] = []
        pairing_residual: float = 0.0
        for window in range(1, n + 1):
            self.state.check_window(csys.d, 2 * window)
            window_rows, residual = self._split_rows(csys, mod, dual, window, report.alpha, k_max)
            rows.extend(window_rows)
            pairing_residual = max(pairing_residual, residual)

        failed: List[SplitBoundRow] = [row for row in rows if not row.passes]
        for row in failed:
            self.logger.warning(f'{csys.name}: split bound violated at n={row.n}, k={row.k}: '
                                f'{row.measured:.3e} > {row.bound:.3e}')
        sampled: float = self.sampled_discrepancy(csys, dual, n, k_max)
        self.logger.debug(f'{csys.name}: sampled split discrepancy {sampled:.3e} at n={n}, k={k_max}')
        verdict: Verdict.Split = Verdict.Split.Failed if failed else Verdict.Split.Certified
        return SplitCertificate(verdict=verdict,
                                reason=Verdict.Reason.BoundViolated.value if failed else None,
                                rows=tuple(rows),
                                pairing_residual=pairing_residual,
                                sampled_discrepancy=sampled)

    def _even_basis(self, d: int, window: int) -> List[Tuple[int, int, str, float]]:
        """(R, C, pattern, ||Q||) for every element of the even basis on [-window+1, window]."""
        dim: int = d ** window
        reversal: np.ndarray = np.array([np.ravel_multi_index(tuple(reversed(np.unravel_index(index, (d,) * window))),
                                                              (d,) * window) for index in range(dim)])

        def unit(left: int, right: int) -> Tuple[int, int]:
            # J(e^{I'}_{J'}) (x) e^I_J as a matrix unit of the 2 * window sites
            upper_left, lower_left = divmod(left, dim)
            upper_right, lower_right = divmod(right, dim)
            return reversal[upper_left] * dim + upper_right, reversal[lower_left] * dim + lower_right

        basis: List[Tuple[int, int, str, float]] = []
        pairs: int = dim * dim
        for first in range(pairs):
            basis.append((first, first, 'diagonal', 1.0))
            for second in range(first + 1, pairs):
                a_row, a_column = unit(first, second)
                b_row, b_column = unit(second, first)
                for name in ('symmetric', 'antisymmetric'):
                    pattern: np.ndarray = self.EVEN_PATTERNS[name]
                    norm: float = entries_norm([(a_row, a_column, pattern[0, 1]), (b_row, b_column, pattern[1, 0])])
                    basis.append((first, second, name, norm))
        return basis

    def _split_rows(self,
                    csys: CanonicalSystem,
                    mod: ModularData,
                    dual: DualSystem,
                    window: int,
                    alpha: float,
                    k_max: int) -> Tuple[List[SplitBoundRow], float]:
        k: int = csys.k
        rho_half: np.ndarray = mod.rho_half
        identity: np.ndarray = np.eye(k, dtype=complex)

        primal: np.ndarray = word_products(csys.v, window)
        blocks: np.ndarray = np.einsum('iab,jcb->ijac', primal, primal.conj()).reshape(-1, k, k)
        mirrored: np.ndarray = reversed_word_products(dual.w, window)
        dual_blocks: np.ndarray = np.einsum('jba,ibc->ijac', mirrored.conj(), mirrored).reshape(-1, k, k)

        # direct side: tr(rho^{1/2} tau^{2k}(X_C) rho^{1/2} B_R) with B_R the mirrored dual word pair
        left: np.ndarray = np.einsum('ab,rbc,cd->rad', rho_half, dual_blocks, rho_half, optimize=True)
        left_mean: np.ndarray = np.einsum('raa->r', left)
        right_mean: np.ndarray = np.einsum('ab,cba->c', mod.rho, blocks)
        # chain side: <<X_R, (tau^{2k} - phi_0) X_C>>
        pairing: np.ndarray = np.einsum('ab,rcb,cd->rad', rho_half, blocks.conj(), rho_half, optimize=True)
        gram0: np.ndarray = np.einsum('rab,cba->rc', pairing, blocks, optimize=True)
        direct0: np.ndarray = np.einsum('rab,cba->rc', left, blocks, optimize=True)
        pairing_residual: float = float(np.max(np.abs(direct0 - gram0)))

        basis: List[Tuple[int, int, str, float]] = self._even_basis(csys.d, window)
        first: np.ndarray = np.array([element[0] for element in basis])
        second: np.ndarray = np.array([element[1] for element in basis])
        norms: np.ndarray = np.array([element[3] for element in basis])
        names: List[str] = [element[2] for element in basis]

        factors: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
        for name, pattern in self.EVEN_PATTERNS.items():
            plus, minus = positive_part(pattern)
            b_plus, b_minus = gram_factor(plus), gram_factor(minus)
            factors[name] = (b_plus.conj().T @ b_plus, b_minus.conj().T @ b_minus)
        coefficient = np.array([self.EVEN_PATTERNS[name] for name in names])
        signed = np.array([factors[name][0] - factors[name][1] for name in names])
        absolute = np.array([factors[name][0] + factors[name][1] for name in names])

        def on_blocks(weights: np.ndarray, matrix: np.ndarray) -> np.ndarray:
            return (weights[:, 0, 0] * matrix[first, first] + weights[:, 0, 1] * matrix[first, second]
                    + weights[:, 1, 0] * matrix[second, first] + weights[:, 1, 1] * matrix[second, second])

        positive_mass: np.ndarray = np.abs(on_blocks(absolute, gram0).real)

        transfer: np.ndarray = PopescuCore.superoperator(csys.v)
        step: np.ndarray = transfer @ transfer
        moved: np.ndarray = blocks.reshape(len(blocks), k * k)
        rows: List[SplitBoundRow] = []
        for gap in range(1, k_max + 1):
            moved = moved @ step.T
            evolved: np.ndarray = moved.reshape(len(blocks), k, k)
            direct: np.ndarray = (np.einsum('rab,cba->rc', left, evolved, optimize=True)
                                  - np.outer(left_mean, right_mean))
            centered: np.ndarray = evolved - right_mean[:, np.newaxis, np.newaxis] * identity
            chain: np.ndarray = np.einsum('rab,cba->rc', pairing, centered, optimize=True)

            measured: np.ndarray = np.abs(on_blocks(coefficient, direct))
            chained: np.ndarray = on_blocks(signed, chain)
            decay: float = alpha ** (2 * gap)
            bounds: np.ndarray = 2 * decay * norms
            worst: int = int(np.argmax(measured - bounds))
            rows.append(SplitBoundRow(n=window,
                                      k=gap,
                                      measured=float(measured[worst]),
                                      norm_scale=float(norms[worst]),
                                      bound=float(bounds[worst]),
                                      chain_value=float(abs(chained[worst])),
                                      chain_residual=float(np.max(np.abs(on_blocks(coefficient, direct) - chained))),
                                      chain_bound=float(decay * positive_mass[worst]),
                                      passes=bool(np.all(measured <= bounds + 1e-8))))
        return rows, pairing_residual

    def full_report(self,
                    csys: CanonicalSystem,
                    window: Optional[int] = None,
                    gap_max: Optional[int] = None) -> CertificateReport:
        window = self.settings.window if window is None else window
        notes: List[str] = []
        top = self.spectral.build_transfer(csys)
        spectral: SpectralReport = self.spectral.spectral_report(top)
        purity: PurityCertificate = self.purity_certificate(csys)
        gauge: Optional[int] = self.spectral.gauge_group_detect(csys, self.max_depth(csys.d, self.caps.gauge_word_len))

        depth: int = self.max_depth(csys.d, self.settings.symmetry_depth)
        if depth < self.settings.symmetry_depth:
            notes.append(f'symmetry detectors limited to depth {depth} by the window cap')
        real: bool = self.is_real(csys, depth)
        lattice: bool = self.is_lattice_symmetric(csys, depth)

        mod: ModularData = self.modular.modular_data(csys)
        dual: DualSystem = self.modular.dual_system(csys, mod)
        kms: KmsSpace = self.modular.kms_space(csys, mod)
        detailed_balance: bool = real and lattice
        kms_symmetric, kms_defect = self._cross_check(csys, detailed_balance, kms)
        if kms_symmetric != detailed_balance:
            notes.append('state detailed balance and KMS symmetry disagree')
        kms_matched, kms_distance = self.spectral.spectra_match(la.eigvals(kms.T_mat), np.array(spectral.eigenvalues))
        if not kms_matched:
            self.logger.warning(f'{csys.name}: KMS spectrum differs from the transfer spectrum by {kms_distance:.3e}')
            notes.append('KMS spectrum differs from the transfer spectrum')

        bond_window: int = self.max_depth(csys.d, window, sites_per_step=2)
        if bond_window < window:
            notes.append(f'two sided windows limited to {bond_window} sites per side by the window cap')
        reflection: ReflectionResult = self.reflection_positivity_check(csys, dual, bond_window)
        haag_bond, haag_span = self.modular.haag_duality_bond_check(dual)
        t_gap: float = self.modular.T_gap(kms)
        if abs(t_gap - spectral.alpha) > 1e-6:
            self.logger.warning(f'{csys.name}: KMS gap {t_gap:.12g} differs from alpha {spectral.alpha:.12g}')
            notes.append('KMS gap differs from the transfer alpha')
        delta: DeltaTriviality = self.modular.delta_triviality_check(csys, mod)

        decay: Optional[DecayCertificate] = None
        try:
            decay = self.decay_certificate(csys)
        except AlphaIsOne as exc:
            notes.append(f'decay: {exc.message}')

        split: SplitCertificate = self.split_bound_check(csys, dual, bond_window, gap_max,
                                                         detailed_balance=detailed_balance)

        report: CertificateReport = CertificateReport(name=csys.name,
                                                      d=csys.d,
                                                      k=csys.k,
                                                      original_k=csys.original_k,
                                                      ergodic=csys.ergodic,
                                                      fixed_dim=csys.fixed_dim,
                                                      algebra_dim=csys.algebra_dim,
                                                      pure=purity,
                                                      gauge_g=gauge,
                                                      real=real,
                                                      lattice_symmetric=lattice,
                                                      detailed_balance=detailed_balance,
                                                      kms_symmetric=kms_symmetric,
                                                      kms_defect=kms_defect,
                                                      kms_spectrum_distance=kms_distance,
                                                      reflection=reflection,
                                                      haag_bond=haag_bond,
                                                      haag_span_dim=haag_span,
                                                      alpha=spectral.alpha,
                                                      t_gap=t_gap,
                                                      delta=delta,
                                                      decay=decay,
                                                      split=split,
                                                      spectral=spectral,
                                                      symmetry_depth=depth,
                                                      notes=notes)
        violations: List[str] = report.violations()
        if violations:
            raise NumericalFailure(f'{csys.name}: inconsistent certificate ({"; ".join(violations)})')
        return report
