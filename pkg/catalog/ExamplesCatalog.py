import logging
import re
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as la

from common.Errors import UnknownExample
from config.Configuration import Configuration
from logger.Logger import init_logger
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import PopescuSystem

SIGMA_X: np.ndarray = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y: np.ndarray = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z: np.ndarray = np.array([[1, 0], [0, -1]], dtype=complex)


class ExamplesCatalog(object):
    """Shipped Popescu systems, each one validated before it is handed out."""

    NAMES: Tuple[str, ...] = ('aklt', 'neel_flip', 'product_pure', 'ghz_mixture', 'markov_chain', 'random_ergodic')

    # Doubly stochastic, so the letters are not self adjoint while the chain stays ergodic
    MARKOV_TRANSITIONS: np.ndarray = np.array([[0.1, 0.6, 0.3],
                                               [0.3, 0.1, 0.6],
                                               [0.6, 0.3, 0.1]])

    SEEDED_NAME: re.Pattern = re.compile(r'^random_ergodic\((?P<seed>\d+)\)$')

    def __init__(self) -> None:
        self.config: Configuration = Configuration.get_configuration()
        self.logger: logging.Logger = init_logger()
        self.core: PopescuCore = PopescuCore()

        self.builders: Dict[str, Callable[[], List[np.ndarray]]] = {
            'aklt': self.aklt,
            'neel_flip': self.neel_flip,
            'product_pure': self.product_pure,
            'ghz_mixture': self.ghz_mixture,
            'markov_chain': self.markov_chain,
        }

    def build(self, name: str, seed: Optional[int] = None) -> PopescuSystem:
        """
        Builds and validates a catalog example

        :param name: one of NAMES, or random_ergodic(<seed>)
        :param seed: seed for random_ergodic, the configured random seed when omitted
        :return: validated PopescuSystem
        """
        seeded: Optional[re.Match] = self.SEEDED_NAME.match(name)
        if seeded:
            name, seed = 'random_ergodic', int(seeded.group('seed'))

        metadata: Dict[str, str] = {'source': 'catalog'}
        if name == 'random_ergodic':
            seed = self.config.certification.random_seed if seed is None else seed
            matrices: List[np.ndarray] = self.random_ergodic(seed)
            metadata['seed'] = str(seed)
        elif name in self.builders:
            matrices = self.builders[name]()
        else:
            raise UnknownExample(f'Unknown example "{name}", expected one of {", ".join(self.NAMES)}')

        if name == 'aklt':
            metadata['gauge'] = 'cartesian'
        self.logger.debug(f'Building catalog example {name}')
        return self.core.validate(PopescuSystem.from_matrices(matrices,
                                                              tol=self.config.tolerances.cuntz,
                                                              name=name,
                                                              metadata=metadata))

    @staticmethod
    def aklt() -> List[np.ndarray]:
        """
        Spin one valence bond chain in the Cartesian gauge, letters sigma_z, sigma_x, sigma_y over sqrt(3).
        A unitary on the site index maps them to the spherical letters sqrt(2/3) sigma+, -sigma_z / sqrt(3),
        -sqrt(2/3) sigma-, which leaves the transfer operator unchanged.
        """
        return [SIGMA_Z / np.sqrt(3), SIGMA_X / np.sqrt(3), SIGMA_Y / np.sqrt(3)]

    @staticmethod
    def neel_flip() -> List[np.ndarray]:
        return [np.array([[0, 1], [0, 0]], dtype=complex), np.array([[0, 0], [1, 0]], dtype=complex)]

    @staticmethod
    def product_pure() -> List[np.ndarray]:
        return [np.array([[1 / np.sqrt(2)]], dtype=complex), np.array([[1 / np.sqrt(2)]], dtype=complex)]

    @staticmethod
    def ghz_mixture() -> List[np.ndarray]:
        return [np.eye(2, dtype=complex) / np.sqrt(2), SIGMA_X / np.sqrt(2)]

    @classmethod
    def markov_chain(cls) -> List[np.ndarray]:
        """
        Classical chain with transitions P. Letter i is the single row v_i = sum_a sqrt(P[i, a]) |i><a|,
        rank one rather than diagonal, and sum_i v_i v_i* = I because every row of P sums to one.
        """
        roots: np.ndarray = np.sqrt(cls.MARKOV_TRANSITIONS)
        letters: List[np.ndarray] = []
        for i in range(roots.shape[0]):
            letter: np.ndarray = np.zeros(roots.shape, dtype=complex)
            letter[i, :] = roots[i]
            letters.append(letter)
        return letters

    @staticmethod
    def random_ergodic(seed: int, d: int = 2, k: int = 2) -> List[np.ndarray]:
        """Adjoints of the blocks of a random (d k) x k isometry, generic hence ergodic with full rank rho."""
        rng: np.random.Generator = np.random.default_rng(seed)
        raw: np.ndarray = rng.normal(size=(d * k, k)) + 1j * rng.normal(size=(d * k, k))
        isometry, _ = la.qr(raw, mode='economic')
        return [block.conj().T for block in isometry.reshape(d, k, k)]
