import re
from typing import Dict, List, Optional, Tuple

import numpy as np

from common.Errors import ParseError, ShapeMismatch
from state.WindowObservable import WindowObservable

'''
Text form of window observables, see docs/observable_grammar.md

    observable := term (('+' | '-') term)*
    term       := [scalar ['*']] factor ('*' factor)*
    factor     := name ['@' site]
    name       := 'Sx' | 'Sy' | 'Sz' | 'Sp' | 'Sm' | 'Id' | 'e(' int ',' int ')'
'''


def spin_matrices(d: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin s = (d - 1) / 2 operators Sx, Sy, Sz in the basis m = s, s - 1, .., -s."""
    s: float = (d - 1) / 2
    m: np.ndarray = s - np.arange(d)
    raising: np.ndarray = np.zeros((d, d), dtype=complex)
    for row in range(1, d):
        raising[row - 1, row] = np.sqrt(s * (s + 1) - m[row] * (m[row] + 1))
    sx: np.ndarray = (raising + raising.conj().T) / 2
    sy: np.ndarray = (raising - raising.conj().T) / 2j
    sz: np.ndarray = np.diag(m).astype(complex)
    return sx, sy, sz


class ObservableParser(object):

    TOKEN = re.compile(r'\s*(?:'
                       r'(?P<unit>e\(\s*\d+\s*,\s*\d+\s*\))'
                       r'|(?P<name>Sx|Sy|Sz|Sp|Sm|Id)'
                       r'|(?P<scalar>\(\s*[-+]?[\d.eEj+\-\s]+\)|\d+\.?\d*(?:[eE][-+]?\d+)?j?|\.\d+(?:[eE][-+]?\d+)?j?)'
                       r'|(?P<op>[@*+\-]))')

    def __init__(self, d: int) -> None:
        self.d: int = d
        sx, sy, sz = spin_matrices(d)
        self.named: Dict[str, np.ndarray] = {
            'Sx': sx,
            'Sy': sy,
            'Sz': sz,
            'Sp': sx + 1j * sy,
            'Sm': sx - 1j * sy,
            'Id': np.eye(d, dtype=complex),
        }

    def parse(self, text: str, field: str = 'obs') -> WindowObservable:
        tokens: List[Tuple[str, str, int]] = self._tokenize(text, field)
        if not tokens:
            raise ParseError('empty observable', field)

        position: int = 0
        total: Optional[WindowObservable] = None
        sign: float = 1.0
        if tokens[0][0] == 'op' and tokens[0][1] in '+-':
            sign = -1.0 if tokens[0][1] == '-' else 1.0
            position = 1
        while position < len(tokens):
            term, position = self._term(tokens, position, field)
            term = sign * term
            total = term if total is None else total + term
            if position < len(tokens):
                kind, value, offset = tokens[position]
                if kind != 'op' or value not in '+-':
                    raise ParseError(f'expected "+" or "-" at offset {offset}, got "{value}"', field)
                sign = 1.0 if value == '+' else -1.0
                position += 1
                if position == len(tokens):
                    raise ParseError(f'dangling "{value}" at offset {offset}', field)
        return total

    def _tokenize(self, text: str, field: str) -> List[Tuple[str, str, int]]:
        tokens: List[Tuple[str, str, int]] = []
        offset: int = 0
        stripped: str = text.rstrip()
        while offset < len(stripped):
            match: Optional[re.Match] = self.TOKEN.match(stripped, offset)
            if not match or match.end() == offset:
                raise ParseError(f'unexpected character "{stripped[offset]}" at offset {offset}', field)
            kind: str = match.lastgroup
            tokens.append((kind, match.group(kind), match.start(kind)))
            offset = match.end()
        return tokens

    def _term(self, tokens: List[Tuple[str, str, int]], position: int, field: str) -> Tuple[WindowObservable, int]:
        scalar: complex = 1.0
        kind, value, offset = tokens[position]
        if kind == 'scalar':
            scalar = self._scalar(value, offset, field)
            position += 1
            if position < len(tokens) and tokens[position][1] == '*':
                position += 1

        product: Optional[WindowObservable] = None
        while True:
            factor, position = self._factor(tokens, position, field)
            product = factor if product is None else product * factor
            if position < len(tokens) and tokens[position][1] == '*':
                position += 1
                continue
            break
        return scalar * product, position

    def _factor(self, tokens: List[Tuple[str, str, int]], position: int, field: str) -> Tuple[WindowObservable, int]:
        if position >= len(tokens):
            raise ParseError('expected an operator name at the end of input', field)
        kind, value, offset = tokens[position]
        if kind == 'name':
            op: np.ndarray = self.named[value]
        elif kind == 'unit':
            row, column = (int(part) for part in value[2:-1].split(','))
            if not (0 <= row < self.d and 0 <= column < self.d):
                raise ParseError(f'{value} at offset {offset} is outside the site dimension {self.d}', field)
            op = np.zeros((self.d, self.d), dtype=complex)
            op[row, column] = 1.0
        else:
            raise ParseError(f'expected an operator name at offset {offset}, got "{value}"', field)
        position += 1

        site: int = 0
        if position < len(tokens) and tokens[position][1] == '@':
            position += 1
            if position >= len(tokens) or tokens[position][0] not in ('scalar', 'op'):
                raise ParseError(f'expected a site after "@" at offset {offset}', field)
            site, position = self._site(tokens, position, field)
        return WindowObservable.single_site(op, site), position

    @staticmethod
    def _site(tokens: List[Tuple[str, str, int]], position: int, field: str) -> Tuple[int, int]:
        kind, value, offset = tokens[position]
        negative: bool = False
        if kind == 'op' and value == '-':
            negative = True
            position += 1
            if position >= len(tokens):
                raise ParseError(f'expected a site index at offset {offset}', field)
            kind, value, offset = tokens[position]
        if not value.lstrip('-').isdigit():
            raise ParseError(f'site index "{value}" at offset {offset} is not an integer', field)
        site: int = int(value)
        return (-site if negative else site), position + 1

    @staticmethod
    def _scalar(value: str, offset: int, field: str) -> complex:
        try:
            return complex(value.replace(' ', ''))
        except ValueError as _:
            raise ParseError(f'"{value}" at offset {offset} is not a number', field)

    @staticmethod
    def parse_for(d: int, text: str, field: str = 'obs') -> WindowObservable:
        try:
            return ObservableParser(d).parse(text, field)
        except ShapeMismatch as exc:
            raise ParseError(exc.message, field)
