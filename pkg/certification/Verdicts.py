from __future__ import annotations
from enum import Enum


class Verdict(object):

    class Purity(Enum):
        Pure = 'PURE'
        NotPure = 'NOT_PURE'

        @staticmethod
        def from_string(value: str) -> Verdict.Purity:
            for verdict in Verdict.Purity:
                if verdict.value == value:
                    return verdict
            raise ValueError(f'Value "{value}" is unsupported')

        def __str__(self) -> str:
            return self.value

        def __repr__(self) -> str:
            return self.value

    class Split(Enum):
        Certified = 'CERTIFIED'
        NotApplicable = 'NOT_APPLICABLE'
        Failed = 'FAILED'

        @staticmethod
        def from_string(value: str) -> Verdict.Split:
            for verdict in Verdict.Split:
                if verdict.value == value:
                    return verdict
            raise ValueError(f'Value "{value}" is unsupported')

        def __str__(self) -> str:
            return self.value

        def __repr__(self) -> str:
            return self.value

    class Reason(Enum):
        NonErgodic = 'NON_ERGODIC'
        PeripheralPeriod = 'PERIPHERAL_PERIOD'
        PeripheralSpectrum = 'PERIPHERAL_SPECTRUM'
        NotPure = 'NOT_PURE'
        AlphaIsOne = 'ALPHA_IS_ONE'
        NotDetailedBalance = 'NOT_DETAILED_BALANCE'
        BoundViolated = 'BOUND_VIOLATED'

        def with_argument(self, argument) -> str:
            return f'{self.value}({argument})'

        def __str__(self) -> str:
            return self.value

        def __repr__(self) -> str:
            return self.value
