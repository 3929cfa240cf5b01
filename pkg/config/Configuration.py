from __future__ import annotations

import configparser
import os

from dataclasses import asdict, dataclass, replace
from typing import Dict, Optional


@dataclass(frozen=True)
class Tolerances(object):
    cuntz: float         # ||sum v v* - I|| accepted by validate
    spectral: float      # clustering of eigenvalues around the unit circle
    compare: float       # entrywise comparison of derived quantities
    support: float       # eigenvalues of rho below this are outside the support
    eigen_floor: float   # floor used for rho^{-1/2}
    root_snap: float     # phase snapping for the roots-of-unity test


@dataclass(frozen=True)
class Caps(object):
    max_window_dim: int
    max_bond_dim: int
    gauge_word_len: int
    max_period_denominator: int


@dataclass(frozen=True)
class CertificationConfig(object):
    window: int
    gap_max: int
    symmetry_depth: int
    kolmogorov_steps: int
    decay_steps: int
    delta_margin: float
    random_seed: int


@dataclass(frozen=True)
class LoggingConfig(object):
    level: str
    logs_dir: Optional[str]


class Configuration(object):
    __instance__: Configuration = None
    __initialized__: bool = False

    CONFIG_FILE_NAME: str = 'default.conf'
    ENV_OVERRIDES: Dict[str, str] = {'TOL_CUNTZ': 'cuntz',
                                     'TOL_SPECTRAL': 'spectral',
                                     'TOL_COMPARE': 'compare'}

    def __new__(cls, *args, **kwargs) -> Configuration:
        if cls.__instance__ is None:
            cls.__instance__ = super(Configuration, cls).__new__(cls)
        return cls.__instance__

    def __init__(self):
        if self.__initialized__:
            return
        self.__initialized__ = True

        self.config_dir: str = os.path.dirname(os.path.realpath(__file__))
        self.tolerances: Tolerances = None
        self.caps: Caps = None
        self.certification: CertificationConfig = None
        self.logging: LoggingConfig = None

    def __parse_configuration(self):
        config = configparser.ConfigParser()

        config_file_path: str = os.environ.get('CERTIFY_CONFIG', f'{self.config_dir}/{self.CONFIG_FILE_NAME}')
        if not config.read(config_file_path):
            raise RuntimeError(f'Failed to read configuration file {config_file_path}')

        tol_section: configparser.SectionProxy = config['tolerances']
        self.tolerances = Tolerances(cuntz=tol_section.getfloat('tol_cuntz', 1e-9),
                                     spectral=tol_section.getfloat('tol_spectral', 1e-8),
                                     compare=tol_section.getfloat('tol_compare', 1e-9),
                                     support=tol_section.getfloat('support_tol', 1e-10),
                                     eigen_floor=tol_section.getfloat('eigen_floor', 1e-12),
                                     root_snap=tol_section.getfloat('root_snap', 1e-6))

        caps_section: configparser.SectionProxy = config['caps']
        self.caps = Caps(max_window_dim=caps_section.getint('max_window_dim', 4096),
                         max_bond_dim=caps_section.getint('max_bond_dim', 60),
                         gauge_word_len=caps_section.getint('gauge_word_len', 4),
                         max_period_denominator=caps_section.getint('max_period_denominator', 64))

        cert_section: configparser.SectionProxy = config['certification']
        self.certification = CertificationConfig(window=cert_section.getint('window', 2),
                                                 gap_max=cert_section.getint('gap_max', 6),
                                                 symmetry_depth=cert_section.getint('symmetry_depth', 4),
                                                 kolmogorov_steps=cert_section.getint('kolmogorov_steps', 8),
                                                 decay_steps=cert_section.getint('decay_steps', 12),
                                                 delta_margin=cert_section.getfloat('delta_margin', 0.05),
                                                 random_seed=cert_section.getint('random_seed', 20240601))

        logging_section: configparser.SectionProxy = config['logging']
        self.logging = LoggingConfig(level=logging_section.get('level', 'WARNING'),
                                     logs_dir=logging_section.get('logs_dir', None) or None)

        self.__apply_environment()

    def __apply_environment(self) -> None:
        overrides: Dict[str, float] = {}
        for variable, field in self.ENV_OVERRIDES.items():
            value: Optional[str] = os.environ.get(variable)
            if value:
                try:
                    overrides[field] = float(value)
                except ValueError as _:
                    raise RuntimeError(f'Environment variable {variable}="{value}" is not a number')
        if overrides:
            self.tolerances = replace(self.tolerances, **overrides)

    def override(self,
                 cuntz: Optional[float] = None,
                 spectral: Optional[float] = None,
                 compare: Optional[float] = None) -> None:
        # Command line flags win over the file and the environment
        overrides: Dict[str, float] = {name: value for name, value in
                                       (('cuntz', cuntz), ('spectral', spectral), ('compare', compare))
                                       if value is not None}
        if overrides:
            self.tolerances = replace(self.tolerances, **overrides)

    def parameters(self) -> Dict[str, Dict]:
        return {
            'tolerances': asdict(self.tolerances),
            'caps': asdict(self.caps),
            'certification': asdict(self.certification),
        }

    @classmethod
    def get_configuration(cls) -> Configuration:
        if not Configuration.__instance__ or Configuration.__instance__.tolerances is None:
            Configuration.__instance__ = Configuration()
            Configuration.__instance__.__parse_configuration()
        return Configuration.__instance__

    @classmethod
    def reset(cls) -> None:
        cls.__instance__ = None
        cls.__initialized__ = False

    def __repr__(self) -> str:
        return (f'Configuration(\n\t{self.tolerances}\n\t{self.caps}'
                f'\n\t{self.certification}\n\t{self.logging}\n)')
