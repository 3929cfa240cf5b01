from __future__ import annotations
from typing import Optional

'''
Exceptions raised by the certification services. Every error carries the exit code
the command line maps it to: 1 usage, 2 invalid input, 3 numerical failure.
'''


class CertificationError(RuntimeError):
    EXIT_CODE: int = 3

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message: str = message


class UsageError(CertificationError):
    EXIT_CODE: int = 1


class InputError(CertificationError):
    EXIT_CODE: int = 2


class NumericalError(CertificationError):
    EXIT_CODE: int = 3


class ShapeMismatch(InputError):
    pass


class CuntzRelationViolated(InputError):

    def __init__(self, residual: float, tol: float) -> None:
        super().__init__(f'||sum v_k v_k* - I|| = {residual:.3e} exceeds tolerance {tol:.1e}')
        self.residual: float = residual


class LetterOutOfRange(InputError):
    pass


class LengthMismatch(InputError):
    pass


class OverlapError(InputError):
    pass


class SizeCapExceeded(InputError):

    def __init__(self, what: str, size: int, cap: int) -> None:
        super().__init__(f'{what}: size {size} exceeds the configured cap {cap}')
        self.size: int = size
        self.cap: int = cap


class UnknownExample(InputError):
    pass


class ParseError(InputError):

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(f'{field}: {message}' if field else message)
        self.field: Optional[str] = field


class IoError(InputError):
    pass


class NumericalFailure(NumericalError):
    pass


class SupportCompressionBrokeCuntz(NumericalError):

    def __init__(self, residual: float) -> None:
        super().__init__(f'Compression to the support of rho broke the Cuntz relation (residual {residual:.3e})')
        self.residual: float = residual


class RhoSingular(NumericalError):
    pass


class AlphaIsOne(NumericalError):
    pass


class NotDetailedBalance(NumericalError):
    pass
