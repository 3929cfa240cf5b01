import itertools

import numpy as np
import pytest

from catalog.ExamplesCatalog import ExamplesCatalog
from common.Errors import CuntzRelationViolated, LetterOutOfRange, ShapeMismatch, SizeCapExceeded
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import MultiIndex, PopescuSystem
from state.StateEvaluator import StateEvaluator


def padded_aklt() -> list:
    """AKLT letters on a 3 dimensional bond space whose third direction is transient."""
    rows: list = [np.zeros(2), np.array([1, 0]) / np.sqrt(2), np.array([-1j, 0]) / np.sqrt(2)]
    letters: list = []
    for op, row in zip(ExamplesCatalog.aklt(), rows):
        letter: np.ndarray = np.zeros((3, 3), dtype=complex)
        letter[:2, :2] = op
        letter[2, :2] = row
        letters.append(letter)
    return letters


def test_validate_records_residual(catalog):
    for name in catalog.NAMES:
        system = catalog.build(name)
        assert system.residual is not None
        assert system.residual <= 1e-12


def test_validate_rejects_non_cuntz_family(core):
    with pytest.raises(CuntzRelationViolated) as error:
        core.validate(PopescuSystem.from_matrices([[[1.0]], [[1.0]]]))
    assert error.value.residual == pytest.approx(1.0)


def test_validate_rejects_bad_shapes(core):
    with pytest.raises(ShapeMismatch):
        core.validate(PopescuSystem.from_matrices([np.eye(2)]))
    with pytest.raises(ShapeMismatch):
        core.validate(PopescuSystem.from_matrices([np.eye(2) / np.sqrt(2), np.eye(3) / np.sqrt(2)]))


def test_validate_enforces_bond_cap(core):
    letters = [np.eye(61) / np.sqrt(2)] * 2
    with pytest.raises(SizeCapExceeded):
        core.validate(PopescuSystem.from_matrices(letters))


def test_markov_map_is_unital_and_predual_preserves_trace(core, catalog, rng):
    for name in catalog.NAMES:
        system = catalog.build(name)
        identity = np.eye(system.k)
        assert np.abs(core.cp_map_apply(system, identity) - identity).max() < 1e-12

        raw = rng.normal(size=(system.k, system.k)) + 1j * rng.normal(size=(system.k, system.k))
        assert abs(np.trace(core.predual_apply(system, raw)) - np.trace(raw)) < 1e-12


def test_cp_map_rejects_wrong_operand(core, catalog):
    with pytest.raises(ShapeMismatch):
        core.cp_map_apply(catalog.build('aklt'), np.eye(3))


def test_neel_flip_moves_population(core, catalog):
    system = catalog.build('neel_flip')
    e00 = np.array([[1, 0], [0, 0]], dtype=complex)
    e11 = np.array([[0, 0], [0, 1]], dtype=complex)
    assert np.abs(core.cp_map_apply(system, e00) - e11).max() < 1e-15


def test_aklt_invariant_state(core, catalog):
    state = core.invariant_state(catalog.build('aklt'))
    assert state.fixed_dim == 1
    assert state.unique
    assert state.residual <= 1e-12
    assert np.abs(state.rho - np.eye(2) / 2).max() < 1e-12


def test_product_state_invariant_state(core, catalog):
    state = core.invariant_state(catalog.build('product_pure'))
    assert state.fixed_dim == 1
    assert np.abs(state.rho - 1.0).max() < 1e-12


def test_mixture_has_two_dimensional_fixed_space(core, catalog):
    system = catalog.build('ghz_mixture')
    state = core.invariant_state(system)
    assert state.fixed_dim == 2

    # an extremal point of the invariant states is a rank one projection onto a sigma_x eigenvector
    eigenvalues = np.linalg.eigvalsh(state.rho)
    assert eigenvalues == pytest.approx([0.0, 1.0], abs=1e-9)
    assert np.abs(core.predual_apply(system, state.rho) - state.rho).max() < 1e-9


def test_canonicalize_mixture_keeps_fixed_dimension(core, catalog):
    csys = core.canonicalize(catalog.build('ghz_mixture'))
    assert not csys.ergodic
    assert csys.fixed_dim == 2
    assert csys.k == 1
    assert csys.original_k == 2
    assert np.abs(csys.rho - 1.0).max() < 1e-12


def test_canonicalize_full_rank_is_identity(core, catalog):
    system = catalog.build('neel_flip')
    csys = core.canonicalize(system)
    assert csys.base is system
    assert csys.ergodic
    assert csys.algebra_dim == 4


def test_canonicalize_compresses_decoupled_direction(core, catalog):
    padded = core.validate(PopescuSystem.from_matrices(padded_aklt(), name='padded'))
    csys = core.canonicalize(padded)
    reference = core.canonicalize(catalog.build('aklt'))
    assert csys.k == 2
    assert csys.original_k == 3
    assert csys.ergodic

    evaluator = StateEvaluator()
    for length in range(1, 4):
        for upper, lower in itertools.product(itertools.product(range(3), repeat=length), repeat=2):
            value = evaluator.matrix_element(csys, MultiIndex.of(*upper), MultiIndex.of(*lower))
            expected = evaluator.matrix_element(reference, MultiIndex.of(*upper), MultiIndex.of(*lower))
            assert abs(value - expected) < 1e-10


def test_canonicalize_is_idempotent(core, catalog):
    for name in ('aklt', 'markov_chain', 'random_ergodic', 'ghz_mixture'):
        once = core.canonicalize(catalog.build(name))
        twice = core.canonicalize(once.base)
        assert twice.k == once.k
        assert np.abs(twice.rho - once.rho).max() < 1e-9
        assert all(np.abs(a - b).max() < 1e-12 for a, b in zip(twice.v, once.v))


def test_algebra_dimension_bounded_by_full_matrix_algebra(core, catalog):
    for name in catalog.NAMES:
        csys = core.canonicalize(catalog.build(name))
        assert 1 <= csys.algebra_dim <= csys.k ** 2


def test_word_operator(core, catalog, rng):
    neel = catalog.build('neel_flip')
    assert np.array_equal(core.word_operator(neel, MultiIndex.of()), np.eye(2))
    assert np.abs(core.word_operator(neel, MultiIndex.of(0, 1)) - np.diag([1, 0])).max() < 1e-15

    product = catalog.build('product_pure')
    assert core.word_operator(product, MultiIndex.of(0, 0, 1))[0, 0] == pytest.approx(2 ** -1.5)

    aklt = catalog.build('aklt')
    for _ in range(10):
        first = MultiIndex(tuple(int(letter) for letter in rng.integers(0, 3, size=rng.integers(0, 4))))
        second = MultiIndex(tuple(int(letter) for letter in rng.integers(0, 3, size=rng.integers(0, 4))))
        joined = core.word_operator(aklt, first + second)
        assert np.abs(joined - core.word_operator(aklt, first) @ core.word_operator(aklt, second)).max() < 1e-14


def test_word_operator_rejects_foreign_letter(core, catalog):
    with pytest.raises(LetterOutOfRange):
        core.word_operator(catalog.build('aklt'), MultiIndex.of(0, 3))


def test_multi_index_reversal_is_an_involution():
    word = MultiIndex.of(0, 2, 1)
    assert word.reversed() == MultiIndex.of(1, 2, 0)
    assert word.reversed().reversed() == word
    assert len(word + MultiIndex.of(1)) == 4
    assert str(word) == '(0,2,1)'


def test_superoperator_matches_cp_map(catalog, rng):
    system = catalog.build('random_ergodic')
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    vectorized = PopescuCore.superoperator(system.v) @ x.reshape(-1)
    assert np.abs(vectorized.reshape(2, 2) - PopescuCore().cp_map_apply(system, x)).max() < 1e-12
