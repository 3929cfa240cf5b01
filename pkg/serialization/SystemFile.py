import json
import logging
from numbers import Real
from typing import Any, Dict, List, Optional

import numpy as np

from common.Errors import IoError, ParseError
from config.Configuration import Configuration
from logger.Logger import init_logger
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import PopescuSystem
from utils.Utilities import FileUtilities

'''
System files are JSON documents

    {"name": "aklt", "d": 3, "bond_dim": 2,
     "matrices": [[[[re, im], ...], ...], ...],
     "metadata": {"key": "value"}}

with matrices[letter][row][column] = [re, im]. Letters are 0-based.
'''


class SystemFile(object):
    REQUIRED_FIELDS: List[str] = ['name', 'd', 'bond_dim', 'matrices']

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()
        self.core: PopescuCore = PopescuCore()

    def parse_system(self, path: str) -> PopescuSystem:
        try:
            text: str = FileUtilities.read_text(path)
        except OSError as exc:
            raise IoError(f'Cannot read system file {path}: {exc.strerror}')
        try:
            document: Any = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f'invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}', field=path)

        self.logger.debug(f'Parsing system file {path}')
        return self.core.validate(self.from_document(document, source=path))

    def from_document(self, document: Any, source: str = '<document>') -> PopescuSystem:
        if not isinstance(document, dict):
            raise ParseError('top level value must be an object', field=source)
        for name in self.REQUIRED_FIELDS:
            if name not in document:
                raise ParseError('missing field', field=name)

        name: Any = document['name']
        if not isinstance(name, str) or not name:
            raise ParseError('must be a non-empty string', field='name')
        d: int = self._integer(document['d'], 'd')
        bond_dim: int = self._integer(document['bond_dim'], 'bond_dim')

        raw: Any = document['matrices']
        if not isinstance(raw, list) or len(raw) != d:
            raise ParseError(f'expected a list of {d} matrices', field='matrices')
        matrices: List[np.ndarray] = [self._matrix(entry, bond_dim, f'matrices[{letter}]')
                                      for letter, entry in enumerate(raw)]

        metadata: Any = document.get('metadata', {}) or {}
        if not isinstance(metadata, dict):
            raise ParseError('must be an object', field='metadata')

        return PopescuSystem.from_matrices(matrices,
                                           tol=self.config.tolerances.cuntz,
                                           name=name,
                                           metadata={str(key): str(value) for key, value in metadata.items()})

    @staticmethod
    def _integer(value: Any, field: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ParseError(f'must be a positive integer, got {json.dumps(value)}', field=field)
        return value

    def _matrix(self, value: Any, bond_dim: int, field: str) -> np.ndarray:
        if not isinstance(value, list) or len(value) != bond_dim:
            raise ParseError(f'expected {bond_dim} rows', field=field)
        matrix: np.ndarray = np.zeros((bond_dim, bond_dim), dtype=complex)
        for row, row_value in enumerate(value):
            if not isinstance(row_value, list) or len(row_value) != bond_dim:
                raise ParseError(f'expected {bond_dim} entries', field=f'{field}[{row}]')
            for column, entry in enumerate(row_value):
                matrix[row, column] = self._entry(entry, f'{field}[{row}][{column}]')
        return matrix

    @staticmethod
    def _entry(value: Any, field: str) -> complex:
        if (not isinstance(value, list) or len(value) != 2
                or any(isinstance(part, bool) or not isinstance(part, Real) for part in value)):
            raise ParseError(f'expected a pair [re, im] of numbers, got {json.dumps(value)}', field=field)
        return complex(float(value[0]), float(value[1]))

    @staticmethod
    def to_document(sys: PopescuSystem) -> Dict[str, Any]:
        return {
            'name': sys.name,
            'd': sys.d,
            'bond_dim': sys.k,
            'matrices': [[[[float(entry.real), float(entry.imag)] for entry in row] for row in op] for op in sys.v],
            'metadata': dict(sorted(sys.metadata.items())),
        }

    def dumps(self, sys: PopescuSystem) -> str:
        # Floats keep their shortest round-trip representation, parse(emit(sys)) is exact
        return json.dumps(self.to_document(sys), indent=2, sort_keys=False, allow_nan=False) + '\n'

    def emit(self, sys: PopescuSystem, path: Optional[str] = None) -> str:
        text: str = self.dumps(sys)
        if path:
            try:
                FileUtilities.write_text(path, text)
            except OSError as exc:
                raise IoError(f'Cannot write system file {path}: {exc.strerror}')
            self.logger.debug(f'System {sys.name} written to {path}')
        return text
