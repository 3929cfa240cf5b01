from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from certification.Verdicts import Verdict
from modular.ModularDual import DeltaTriviality
from spectral.TransferOperator import SpectralReport


@dataclass(frozen=True)
class PurityCertificate(object):
    verdict: Verdict.Purity
    reason: Optional[str]
    iterates: Tuple[float, ...]


@dataclass(frozen=True)
class DecaySample(object):
    distance: int       # Q2 sits `distance` sites to the right of Q1
    value: float        # e^{delta* distance} |omega(Q1 theta(Q2)) - omega(Q1) omega(Q2)|


@dataclass(frozen=True)
class DecayCertificate(object):
    alpha: float
    delta_star: float
    samples: Tuple[DecaySample, ...]
    bounded: bool       # every sample is bounded by the first one


@dataclass(frozen=True, eq=False)
class ReflectionResult(object):
    psd: bool
    min_eig: float
    size: int
    gram: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SplitBoundRow(object):
    n: int
    k: int
    measured: float         # worst |omega(theta_k(Q)) - omega_L (x) omega_R(theta_k(Q))| over the even basis
    norm_scale: float       # ||Q|| of that basis element
    bound: float            # 2 alpha^{2k} ||Q||
    chain_value: float      # the same discrepancy through the KMS pairing of the b*b factors
    chain_residual: float   # worst |direct - chain| over the basis
    chain_bound: float      # alpha^{2k} (omega(Q+) + omega(Q-))
    passes: bool


@dataclass(frozen=True)
class SplitCertificate(object):
    verdict: Verdict.Split
    reason: Optional[str]
    rows: Tuple[SplitBoundRow, ...] = ()
    pairing_residual: float = 0.0
    sampled_discrepancy: float = 0.0    # the same discrepancy on a random even observable at the largest n and k


@dataclass(frozen=True)
class CertificateReport(object):
    name: str
    d: int
    k: int
    original_k: int
    ergodic: bool
    fixed_dim: int
    algebra_dim: int
    pure: PurityCertificate
    gauge_g: Optional[int]
    real: bool
    lattice_symmetric: bool
    detailed_balance: bool
    kms_symmetric: bool
    kms_defect: float
    kms_spectrum_distance: float     # optimal pairing distance between the KMS and transfer spectra
    reflection: ReflectionResult
    haag_bond: bool
    haag_span_dim: int
    alpha: float
    t_gap: float
    delta: DeltaTriviality
    decay: Optional[DecayCertificate]
    split: SplitCertificate
    spectral: SpectralReport
    symmetry_depth: int
    notes: List[str] = field(default_factory=list)

    @property
    def reflection_positive(self) -> bool:
        return self.reflection.psd

    def violations(self) -> List[str]:
        found: List[str] = []
        if self.detailed_balance and not (self.real and self.lattice_symmetric):
            found.append('detailed balance without real and lattice symmetric')
        if self.pure.verdict == Verdict.Purity.Pure and not self.ergodic:
            found.append('pure but not ergodic')
        if self.split.verdict == Verdict.Split.Certified and self.alpha >= 1.0:
            found.append('split certified with alpha = 1')
        return found

    def failures(self) -> List[str]:
        """Certificates that were attempted and did not hold."""
        found: List[str] = []
        if self.split.verdict == Verdict.Split.Failed:
            found.append(f'split certificate failed ({self.split.reason})')
        if self.decay is not None and not self.decay.bounded:
            found.append('decay samples unbounded')
        return found
