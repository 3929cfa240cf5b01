from typing import Callable, Optional

import numpy as np
import pytest

from catalog.ExamplesCatalog import ExamplesCatalog
from config.Configuration import Configuration
from modular.ModularDual import ModularDual
from modular.StandardForm import DualSystem
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import CanonicalSystem

ERGODIC_EXAMPLES = ['aklt', 'neel_flip', 'product_pure', 'markov_chain', 'random_ergodic']


@pytest.fixture(autouse=True)
def fresh_configuration(monkeypatch):
    for variable in Configuration.ENV_OVERRIDES:
        monkeypatch.delenv(variable, raising=False)
    monkeypatch.delenv('CERTIFY_CONFIG', raising=False)
    Configuration.reset()
    yield
    Configuration.reset()


@pytest.fixture
def core() -> PopescuCore:
    return PopescuCore()


@pytest.fixture
def catalog() -> ExamplesCatalog:
    return ExamplesCatalog()


@pytest.fixture
def canonical(core, catalog) -> Callable[..., CanonicalSystem]:
    def build(name: str, seed: Optional[int] = None) -> CanonicalSystem:
        return core.canonicalize(catalog.build(name, seed))
    return build


@pytest.fixture
def aklt(canonical) -> CanonicalSystem:
    return canonical('aklt')


@pytest.fixture
def neel(canonical) -> CanonicalSystem:
    return canonical('neel_flip')


@pytest.fixture
def product(canonical) -> CanonicalSystem:
    return canonical('product_pure')


@pytest.fixture
def markov(canonical) -> CanonicalSystem:
    return canonical('markov_chain')


@pytest.fixture
def dual_of() -> Callable[[CanonicalSystem], DualSystem]:
    modular: ModularDual = ModularDual()

    def build(csys: CanonicalSystem) -> DualSystem:
        return modular.dual_system(csys, modular.modular_data(csys))
    return build


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
