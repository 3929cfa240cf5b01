import argparse
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from catalog.ExamplesCatalog import ExamplesCatalog
from certification.CertificateReport import CertificateReport
from certification.Certifier import Certifier
from common.Errors import CertificationError, NumericalFailure, UsageError
from config.Configuration import Configuration
from logger.Logger import init_logger
from modular.ModularDual import ModularDual
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import CanonicalSystem, PopescuSystem
from serialization.ReportWriter import ReportWriter
from serialization.SystemFile import SystemFile
from spectral.TransferOperator import SpectralReport
from spectral.TransferSpectral import TransferSpectral
from state.ObservableParser import ObservableParser
from state.StateEvaluator import StateEvaluator
from state.WindowObservable import NormReport, WindowObservable


class CertificationTool(object):
    TOOL_VERSION: str = '1.0.0'
    EXIT_FAILED: int = 4

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()

        self.core: PopescuCore = PopescuCore()
        self.state: StateEvaluator = StateEvaluator()
        self.spectral: TransferSpectral = TransferSpectral()
        self.modular: ModularDual = ModularDual()
        self.certifier: Certifier = Certifier()
        self.catalog: ExamplesCatalog = ExamplesCatalog()
        self.system_file: SystemFile = SystemFile()
        self.writer: ReportWriter = ReportWriter(self.TOOL_VERSION)

    def canonical(self, path: str, max_word_len: Optional[int] = None) -> CanonicalSystem:
        system: PopescuSystem = self.system_file.parse_system(path)
        return self.core.canonicalize(system, max_word_len)

    def validate(self, params: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
        system: PopescuSystem = self.system_file.parse_system(params.file)
        return {'name': system.name, 'd': system.d, 'bond_dim': system.k, 'cuntz_residual': system.residual,
                'valid': True}, 0

    def analyze(self, params: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
        csys: CanonicalSystem = self.canonical(params.file, params.max_word_len)
        report: SpectralReport = self.spectral.spectral_report(self.spectral.build_transfer(csys))
        word_len: int = self.certifier.max_depth(csys.d, params.max_word_len or self.config.caps.gauge_word_len)
        gauge: Optional[int] = self.spectral.gauge_group_detect(csys, word_len)
        depth: int = self.certifier.max_depth(csys.d, self.config.certification.symmetry_depth)
        real: bool = self.certifier.is_real(csys, depth)
        lattice: bool = self.certifier.is_lattice_symmetric(csys, depth)
        return {
            'name': csys.name,
            'd': csys.d,
            'k': csys.k,
            'original_k': csys.original_k,
            'ergodic': csys.ergodic,
            'fixed_dim': csys.fixed_dim,
            'algebra_dim': csys.algebra_dim,
            'rho': csys.rho,
            'spectral': report,
            'gauge_g': 'INFINITE' if gauge is None else gauge,
            'gauge_word_len': word_len,
            'purity': self.certifier.purity_certificate(csys),
            'real': real,
            'lattice_symmetric': lattice,
            'detailed_balance': real and lattice,
            'symmetry_depth': depth,
        }, 0

    def correlations(self, params: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
        csys: CanonicalSystem = self.canonical(params.file)
        first: WindowObservable = ObservableParser.parse_for(csys.d, params.obs, field='--obs')
        second: WindowObservable = (first if params.obs2 is None
                                    else ObservableParser.parse_for(csys.d, params.obs2, field='--obs2'))
        gap_max: int = self.config.certification.gap_max if params.gap_max is None else params.gap_max
        rows: List[Dict[str, Any]] = []
        for gap in range(gap_max + 1):
            rows.append({'gap': gap,
                         'value': self.state.two_point(csys, first, second, gap),
                         'connected': self.state.connected_two_point(csys, first, second, gap)})
        return {'name': csys.name, 'obs': params.obs, 'obs2': params.obs2 or params.obs,
                'expectation_obs': self.state.expectation(csys, first),
                'expectation_obs2': self.state.expectation(csys, second),
                'rows': rows}, 0

    def certify(self, params: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
        csys: CanonicalSystem = self.canonical(params.file)
        report: CertificateReport = self.certifier.full_report(csys, params.window, params.gap_max)
        failures: List[str] = report.failures()
        for failure in failures:
            self.logger.error(f'{csys.name}: {failure}')
        return ReportWriter.certificate_payload(report), self.EXIT_FAILED if failures else 0

    def norm(self, params: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
        system: PopescuSystem = self.system_file.parse_system(params.file)
        observable: WindowObservable = ObservableParser.parse_for(system.d, params.obs, field='--obs')
        report: NormReport = self.state.window_operator_norm(observable, two_sided=params.two_sided)
        return {'obs': params.obs, 'first_site': observable.first_site, 'n_sites': observable.n_sites,
                'norm': report, 'discrepancy': report.discrepancy}, 0

    def examples(self, params: argparse.Namespace) -> int:
        if not params.name:
            sys.stdout.write(''.join(f'{name}\n' for name in ExamplesCatalog.NAMES))
            return 0
        text: str = self.system_file.emit(self.catalog.build(params.name, params.seed), params.out)
        if not params.out:
            sys.stdout.write(text)
        return 0

    def run(self, params: argparse.Namespace) -> int:
        if params.command == 'examples':
            return self.examples(params)

        commands: Dict[str, Callable[[argparse.Namespace], Tuple[Dict[str, Any], int]]] = {
            'validate': self.validate,
            'analyze': self.analyze,
            'correlations': self.correlations,
            'certify': self.certify,
            'norm': self.norm,
        }
        started: float = time.perf_counter()
        result, exit_code = commands[params.command](params)
        elapsed: Optional[float] = time.perf_counter() - started if params.with_timing else None

        document: Dict[str, Any] = self.writer.document(command=params.command,
                                                        result=result,
                                                        input_path=params.file,
                                                        arguments=command_arguments(params),
                                                        timing=elapsed)
        self.writer.emit_report(document, ReportWriter.Format.from_string(params.format), params.out)
        return exit_code


class CertifyArgumentParser(argparse.ArgumentParser):

    def error(self, message: str):
        raise UsageError(message)


def command_arguments(params: argparse.Namespace) -> Dict[str, Any]:
    ignored: List[str] = ['command', 'file', 'format', 'out', 'with_timing']
    return {key: value for key, value in sorted(vars(params).items()) if key not in ignored}


def build_parser() -> argparse.ArgumentParser:
    common = CertifyArgumentParser(add_help=False)
    common.add_argument('--tol-cuntz', type=float, help='Accepted ||sum v v* - I|| (env TOL_CUNTZ)')
    common.add_argument('--tol-spectral', type=float, help='Unit circle clustering tolerance (env TOL_SPECTRAL)')
    common.add_argument('--tol-compare', type=float, help='Comparison tolerance (env TOL_COMPARE)')
    common.add_argument('--format', choices=['json', 'text'], default='json', help='Report format')
    common.add_argument('--out', help='Write the result to this file instead of standard output')
    common.add_argument('--with-timing', action='store_true', help='Record the wall time in the report')

    parser = CertifyArgumentParser(prog='Certify.py',
                                   description='Certify purity, decay, reflection positivity and the split '
                                               'property of finitely correlated states')
    subparsers = parser.add_subparsers(dest='command', parser_class=CertifyArgumentParser)
    subparsers.required = True

    validate = subparsers.add_parser('validate', parents=[common], help='Check a system file')
    validate.add_argument('file')

    analyze = subparsers.add_parser('analyze', parents=[common], help='Spectral and symmetry report')
    analyze.add_argument('file')
    analyze.add_argument('--max-word-len', type=int, help='Word length cap for the algebra span and gauge detection')

    correlations = subparsers.add_parser('correlations', parents=[common], help='Two point functions')
    correlations.add_argument('file')
    correlations.add_argument('--obs', required=True, help='Observable, e.g. "Sz@0" or "0.5 Sp@0 * Sm@1"')
    correlations.add_argument('--obs2', help='Second observable, defaults to --obs')
    correlations.add_argument('--gap-max', type=int, help='Largest gap between the two windows')

    certify = subparsers.add_parser('certify', parents=[common], help='Full certificate report')
    certify.add_argument('file')
    certify.add_argument('--window', type=int, help='Sites per side of the bond')
    certify.add_argument('--gap-max', type=int, help='Largest shift of the split table')

    examples = subparsers.add_parser('examples', parents=[common], help='Emit a catalog system file')
    examples.add_argument('--name', help=f'One of {", ".join(ExamplesCatalog.NAMES)}; lists them when omitted')
    examples.add_argument('--seed', type=int, help='Seed of random_ergodic')

    norm = subparsers.add_parser('norm', parents=[common], help='Operator norm of a window observable')
    norm.add_argument('file')
    norm.add_argument('--obs', required=True)
    norm.add_argument('--two-sided', action='store_true', help='Also report the norm of the coefficient matrix')
    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    parser: argparse.ArgumentParser = build_parser()
    try:
        params: argparse.Namespace = parser.parse_args(argv)
        for name in ('window', 'gap_max', 'max_word_len'):
            value: Optional[int] = getattr(params, name, None)
            if value is not None and value < (0 if name == 'gap_max' else 1):
                raise UsageError(f'--{name.replace("_", "-")} must be positive, got {value}')

        # Every invocation starts from the file and the environment, flags applied last
        Configuration.reset()
        config: Configuration = Configuration.get_configuration()
        config.override(cuntz=params.tol_cuntz, spectral=params.tol_spectral, compare=params.tol_compare)
        return CertificationTool().run(params)
    except CertificationError as exc:
        init_logger().error(exc.message)
        return exc.EXIT_CODE
    except RuntimeError as exc:
        # configuration problems, the logger cannot be set up without a configuration
        sys.stderr.write(f'{exc}\n')
        return UsageError.EXIT_CODE
    except (np.linalg.LinAlgError, ValueError) as exc:
        failure: NumericalFailure = NumericalFailure(f'Numerical failure: {exc}')
        init_logger().error(failure.message)
        return failure.EXIT_CODE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0


if __name__ == '__main__':
    sys.exit(run_cli())
