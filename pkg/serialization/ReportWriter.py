import dataclasses
import json
import logging
import math
import sys
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from certification.CertificateReport import CertificateReport
from common.Errors import IoError
from config.Configuration import Configuration
from logger.Logger import init_logger
from utils.Utilities import FileUtilities


class ReportWriter(object):
    """
    Deterministic report serialization: numbers rounded to 12 significant digits, -0.0 folded into 0.0,
    complex values as [re, im], non-finite values as null and object keys sorted.
    """

    SCHEMA_VERSION: int = 1
    SIGNIFICANT_DIGITS: int = 12
    OMITTED_FIELDS: List[str] = ['gram']

    class Format(Enum):
        Json = 'json'
        Text = 'text'

        @staticmethod
        def from_string(value: str):
            for fmt in ReportWriter.Format:
                if fmt.value == value:
                    return fmt
            raise ValueError(f'Value "{value}" is unsupported')

        def __str__(self) -> str:
            return self.value

    def __init__(self, tool_version: str) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()
        self.tool_version: str = tool_version

    @classmethod
    def number(cls, value: float) -> Optional[float]:
        if not math.isfinite(value):
            return None
        rounded: float = float(f'{value:.{cls.SIGNIFICANT_DIGITS}g}')
        return 0.0 if rounded == 0.0 else rounded

    @classmethod
    def encode(cls, value: Any) -> Any:
        if value is None or isinstance(value, (str, bool, np.bool_)):
            return bool(value) if isinstance(value, np.bool_) else value
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            return cls.number(float(value))
        if isinstance(value, (complex, np.complexfloating)):
            return [cls.number(float(value.real)), cls.number(float(value.imag))]
        if isinstance(value, np.ndarray):
            return cls.encode(value.tolist())
        if dataclasses.is_dataclass(value):
            return {field.name: cls.encode(getattr(value, field.name))
                    for field in dataclasses.fields(value) if field.name not in cls.OMITTED_FIELDS}
        if isinstance(value, dict):
            return {str(key): cls.encode(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [cls.encode(item) for item in value]
        raise TypeError(f'Cannot encode {type(value).__name__} in a report')

    @classmethod
    def certificate_payload(cls, report: CertificateReport) -> Dict[str, Any]:
        payload: Dict[str, Any] = cls.encode(report)
        payload['gauge_g'] = 'INFINITE' if report.gauge_g is None else report.gauge_g
        payload['reflection_positive'] = report.reflection_positive
        return payload

    def document(self,
                 command: str,
                 result: Dict[str, Any],
                 input_path: Optional[str] = None,
                 arguments: Optional[Dict[str, Any]] = None,
                 timing: Optional[float] = None) -> Dict[str, Any]:
        document: Dict[str, Any] = {
            'schema_version': self.SCHEMA_VERSION,
            'tool_version': self.tool_version,
            'command': command,
            'input': input_path,
            'input_sha256': FileUtilities.sha256(input_path) if input_path else None,
            'parameters': self.encode(dict(self.config.parameters(), arguments=arguments or {})),
            'result': self.encode(result),
        }
        if timing is not None:
            document['timing'] = {'seconds': self.number(timing)}
        return document

    @staticmethod
    def render_json(document: Dict[str, Any]) -> str:
        return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + '\n'

    def render_text(self, document: Dict[str, Any]) -> str:
        lines: List[str] = []
        self._flatten('', document, lines)
        return '\n'.join(lines) + '\n'

    def _flatten(self, prefix: str, value: Any, lines: List[str]) -> None:
        if isinstance(value, dict) and value:
            for key in sorted(value):
                self._flatten(f'{prefix}.{key}' if prefix else key, value[key], lines)
        elif isinstance(value, list) and value and all(isinstance(item, dict) for item in value):
            # rows of a table, one column per key
            columns: List[str] = sorted({key for item in value for key in item})
            cells: List[List[str]] = [[json.dumps(item.get(column), sort_keys=True) for column in columns]
                                      for item in value]
            widths: List[int] = [max([len(column)] + [len(row[index]) for row in cells])
                                 for index, column in enumerate(columns)]
            lines.append(f'{prefix}:')
            lines.append('  ' + '  '.join(column.rjust(width) for column, width in zip(columns, widths)))
            for row in cells:
                lines.append('  ' + '  '.join(cell.rjust(width) for cell, width in zip(row, widths)))
        else:
            lines.append(f'{prefix}: {json.dumps(value, sort_keys=True)}')

    def render(self, document: Dict[str, Any], fmt: Format) -> str:
        return self.render_json(document) if fmt == ReportWriter.Format.Json else self.render_text(document)

    def emit_report(self, document: Dict[str, Any], fmt: Format, dest: Optional[str] = None) -> None:
        text: str = self.render(document, fmt)
        if not dest:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        try:
            FileUtilities.write_text(dest, text)
        except OSError as exc:
            raise IoError(f'Cannot write report {dest}: {exc.strerror}')
        self.logger.debug(f'Report written to {dest}')
