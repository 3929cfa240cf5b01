import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.linalg as la

from common.Errors import NumericalFailure, RhoSingular, SizeCapExceeded
from config.Configuration import Caps, Configuration, Tolerances
from logger.Logger import init_logger
from modular.StandardForm import DualSystem, KmsSpace, ModularData, StandardForm
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import CanonicalSystem
from utils.Utilities import operator_norm, psd_sqrt_pair, span_dimension, word_products


@dataclass(frozen=True)
class DeltaTriviality(object):
    delta_is_identity: bool
    all_v_selfadjoint: bool
    degenerate: bool            # k = 1, Delta is trivially the identity

    @property
    def consistent(self) -> bool:
        return self.degenerate or self.delta_is_identity == self.all_v_selfadjoint


class ModularDual(object):
    """
    Finite dimensional modular theory of (M_k, phi_0) with phi_0 = tr(rho .):

        Delta vec(A) = vec(rho A rho^{-1}),  J vec(A) = vec(A*),  sigma_{i/2}(x) = rho^{-1/2} x rho^{1/2}

    and the dual letters w_k = rho^{1/2} v_k rho^{-1/2} acting by right multiplication.
    """

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()
        self.core: PopescuCore = PopescuCore()

        self.tolerances: Tolerances = self.config.tolerances
        self.caps: Caps = self.config.caps

    def modular_data(self, csys: CanonicalSystem) -> ModularData:
        smallest: float = float(la.eigvalsh(csys.rho).min())
        if smallest < self.tolerances.eigen_floor:
            raise RhoSingular(f'{csys.name}: invariant density has eigenvalue {smallest:.3e}, '
                              f'the system is not in canonical form')
        rho_half, rho_inv_half, condition = psd_sqrt_pair(csys.rho, self.tolerances.eigen_floor)
        if condition > 1e6:
            self.logger.warning(f'{csys.name}: invariant density is ill conditioned ({condition:.3e})')
        return ModularData(rho=np.asarray(csys.rho), rho_half=rho_half, rho_inv_half=rho_inv_half,
                           condition=condition)

    def standard_form(self, csys: CanonicalSystem, mod: Optional[ModularData] = None) -> StandardForm:
        mod = self.modular_data(csys) if mod is None else mod
        omega_vec: np.ndarray = mod.rho_half.reshape(-1).astype(complex)
        return StandardForm(k=csys.k, omega_vec=omega_vec)

    def dual_system(self, csys: CanonicalSystem, mod: ModularData) -> DualSystem:
        w: Tuple[np.ndarray, ...] = tuple(mod.rho_half @ v @ mod.rho_inv_half for v in csys.v)
        stacked: np.ndarray = np.asarray(w)
        residual: float = operator_norm(np.einsum('lba,lbc->ac', stacked.conj(), stacked) - np.eye(csys.k))
        if residual > max(10 * csys.tol, 1e-8):
            raise NumericalFailure(f'{csys.name}: dual letters violate sum w* w = I by {residual:.3e} '
                                   f'(rho condition number {mod.condition:.3e})')
        for letter in w:
            letter.setflags(write=False)
        return DualSystem(w=w, condition=mod.condition, normalization_residual=residual)

    def word_identity_residual(self, csys: CanonicalSystem, dual: DualSystem, max_len: int = 3) -> float:
        """
        Largest gap between phi_0(v_I v_J*) and the vector state of the reversed dual words
        <Omega, v~_{rev I} v~*_{rev J} Omega> = tr(rho w_J* w_I), over all |I|, |J| <= max_len.
        """
        primal = [word_products(csys.v, length) for length in range(max_len + 1)]
        mirrored = [word_products(dual.w, length) for length in range(max_len + 1)]
        worst: float = 0.0
        for upper in range(max_len + 1):
            for lower in range(max_len + 1):
                direct: np.ndarray = np.einsum('ab,ibc,jac->ij', csys.rho, primal[upper], primal[lower].conj(),
                                               optimize=True)
                reflected: np.ndarray = np.einsum('ab,jcb,ica->ij', csys.rho, mirrored[lower].conj(),
                                                  mirrored[upper], optimize=True)
                worst = max(worst, float(np.max(np.abs(direct - reflected))))
        return worst

    def dual_vector_defect(self, sf: StandardForm, csys: CanonicalSystem, dual: DualSystem) -> float:
        """max_k |v~_k* Omega - v_k* Omega|."""
        worst: float = 0.0
        for letter, w in zip(csys.v, dual.w):
            dual_side: np.ndarray = sf.right_action(w.conj().T) @ sf.omega_vec
            primal_side: np.ndarray = sf.left_action(letter.conj().T) @ sf.omega_vec
            worst = max(worst, float(la.norm(dual_side - primal_side)))
        return worst

    def kms_adjoint_map(self, csys: CanonicalSystem, mod: ModularData) -> Callable[[np.ndarray], np.ndarray]:
        def tau_tilde(y: np.ndarray) -> np.ndarray:
            inner: np.ndarray = self.core.predual_apply(csys.base, mod.rho_half @ y @ mod.rho_half)
            return mod.rho_inv_half @ inner @ mod.rho_inv_half
        return tau_tilde

    def kms_adjoint_residual(self, csys: CanonicalSystem, mod: ModularData, x: np.ndarray, y: np.ndarray) -> float:
        """|phi_0(tau(x) sigma_{-i/2}(y)) - phi_0(sigma_{i/2}(x) tau~(y))|"""
        tau_tilde = self.kms_adjoint_map(csys, mod)
        left: complex = np.trace(csys.rho @ self.core.cp_map_apply(csys.base, x) @ mod.sigma_minus_i_half(y))
        right: complex = np.trace(csys.rho @ mod.sigma_i_half(x) @ tau_tilde(y))
        return float(abs(left - right))

    def kms_space(self, csys: CanonicalSystem, mod: ModularData) -> KmsSpace:
        gram: np.ndarray = np.kron(mod.rho_half, mod.rho_half.T)
        smallest: float = float(la.eigvalsh((gram + gram.conj().T) / 2).min())
        if smallest < -1e-10:
            raise NumericalFailure(f'{csys.name}: KMS Gram matrix has eigenvalue {smallest:.3e}')
        # gram^{1/2} = rho^{1/4} (x) (rho^{1/4})^T
        quarter, inverse_quarter, _ = psd_sqrt_pair(mod.rho_half, np.sqrt(self.tolerances.eigen_floor))
        gram_half: np.ndarray = np.kron(quarter, quarter.T)
        gram_inv_half: np.ndarray = np.kron(inverse_quarter, inverse_quarter.T)
        T_mat: np.ndarray = gram_half @ PopescuCore.superoperator(csys.v) @ gram_inv_half
        return KmsSpace(k=csys.k, gram=gram, gram_half=gram_half, gram_inv_half=gram_inv_half, T_mat=T_mat)

    def detailed_balance_check(self, kms: KmsSpace, tol: Optional[float] = None) -> Tuple[bool, float]:
        tol = self.tolerances.compare if tol is None else tol
        defect: float = operator_norm(kms.T_mat - kms.T_mat.conj().T)
        return defect <= tol, defect

    def T_gap(self, kms: KmsSpace) -> float:
        # the unit vector of the identity is fixed by T_mat and by its adjoint
        identity: np.ndarray = kms.identity_vector
        reduced: np.ndarray = kms.T_mat - np.outer(identity, identity.conj())
        if reduced.size == 0:
            return 0.0
        radius: float = float(np.max(np.abs(la.eigvals(reduced))))
        return 0.0 if radius < self.tolerances.compare else min(radius, 1.0)

    def haag_duality_bond_check(self, dual: DualSystem, cap: Optional[int] = None) -> Tuple[bool, int]:
        if dual.k > self.caps.max_bond_dim:
            raise SizeCapExceeded('bond dimension', dual.k, self.caps.max_bond_dim)
        cap = 2 * dual.k ** 2 if cap is None else cap
        span_dim: int = span_dimension(dual.w, cap, self.tolerances.support)
        return span_dim == dual.k ** 2, span_dim

    def delta_triviality_check(self, csys: CanonicalSystem, mod: ModularData) -> DeltaTriviality:
        tol: float = max(self.tolerances.spectral, 10 * csys.tol)
        delta_is_identity: bool = operator_norm(mod.rho - np.eye(csys.k) / csys.k) <= tol
        self_adjoint: bool = max(operator_norm(v - v.conj().T) for v in csys.v) <= tol
        return DeltaTriviality(delta_is_identity=delta_is_identity,
                               all_v_selfadjoint=self_adjoint,
                               degenerate=csys.k == 1)

    @staticmethod
    def kms_pairing(mod: ModularData, x: np.ndarray, y: np.ndarray) -> complex:
        """<Omega, J x J y Omega> = tr(rho^{1/2} x* rho^{1/2} y)"""
        return complex(np.trace(mod.rho_half @ np.asarray(x).conj().T @ mod.rho_half @ y))

    @staticmethod
    def dual_relation_defect(csys: CanonicalSystem, dual: DualSystem) -> float:
        """max_k ||v_k - w_k*||, zero exactly when v_k = J v~_k J."""
        return max(operator_norm(v - w.conj().T) for v, w in zip(csys.v, dual.w))

    def kms_symmetry_residual(self, csys: CanonicalSystem, mod: ModularData, samples: int = 20,
                              seed: Optional[int] = None) -> float:
        rng: np.random.Generator = np.random.default_rng(
            self.config.certification.random_seed if seed is None else seed)
        worst: float = 0.0
        for _ in range(samples):
            x: np.ndarray = rng.normal(size=(csys.k, csys.k)) + 1j * rng.normal(size=(csys.k, csys.k))
            y: np.ndarray = rng.normal(size=(csys.k, csys.k)) + 1j * rng.normal(size=(csys.k, csys.k))
            forward: complex = self.kms_pairing(mod, x, self.core.cp_map_apply(csys.base, y))
            backward: complex = self.kms_pairing(mod, self.core.cp_map_apply(csys.base, x), y)
            worst = max(worst, abs(forward - backward))
        return worst
