import numpy as np
import pytest

from certification.Certifier import Certifier
from common.Errors import LengthMismatch, OverlapError, ShapeMismatch, SizeCapExceeded
from popescu.PopescuSystem import MultiIndex
from state.ObservableParser import ObservableParser
from state.StateEvaluator import StateEvaluator
from state.WindowObservable import BondObservable, WindowObservable
from tests.conftest import ERGODIC_EXAMPLES


@pytest.fixture
def evaluator() -> StateEvaluator:
    return StateEvaluator()


def test_matrix_element_of_aklt(evaluator, aklt):
    assert abs(evaluator.matrix_element(aklt, MultiIndex.of(1), MultiIndex.of(1)) - 1 / 3) < 1e-12
    assert abs(evaluator.matrix_element(aklt, MultiIndex.of(0), MultiIndex.of(2))) < 1e-12
    with pytest.raises(LengthMismatch):
        evaluator.matrix_element(aklt, MultiIndex.of(0, 1), MultiIndex.of(0))


def test_single_site_density_of_aklt_is_maximally_mixed(evaluator, aklt):
    sigma = evaluator.reduced_density(aklt, 1).sigma
    assert np.abs(sigma - np.eye(3) / 3).max() < 1e-12


@pytest.mark.parametrize('name', ERGODIC_EXAMPLES + ['ghz_mixture'])
def test_reduced_densities_are_consistent(evaluator, canonical, name):
    csys = canonical(name)
    densities = [evaluator.reduced_density(csys, n) for n in range(1, 5)]
    for density in densities:
        assert abs(np.trace(density.sigma) - 1) < 1e-10
        assert np.linalg.eigvalsh(density.sigma).min() > -1e-10
    for smaller, larger in zip(densities, densities[1:]):
        assert np.abs(larger.partial_trace_last().sigma - smaller.sigma).max() < 1e-10
        assert np.abs(larger.partial_trace_first().sigma - smaller.sigma).max() < 1e-10


def test_expectation_matches_reduced_density(evaluator, canonical, rng):
    csys = canonical('random_ergodic')
    raw = Certifier.random_hermitian(rng, 4)
    observable = WindowObservable.from_matrix(raw, 2, first_site=3)
    expected = evaluator.reduced_density(csys, 2).expectation(observable)
    assert abs(evaluator.expectation(csys, observable) - expected) < 1e-12
    assert abs(evaluator.expectation(csys, WindowObservable.identity(2, 3)) - 1) < 1e-12


def test_aklt_matrix_unit_correlations_decay_with_minus_one_third(evaluator, aklt):
    unit = ObservableParser.parse_for(3, 'e(0,1)@0')
    assert abs(evaluator.expectation(aklt, unit)) < 1e-12
    for gap in range(6):
        value = evaluator.two_point(aklt, unit, unit, gap)
        assert abs(value - (-1 / 3) ** gap / 9) < 1e-12
        assert abs(evaluator.connected_two_point(aklt, unit, unit, gap) - value) < 1e-12


def test_neel_correlations_oscillate(evaluator, neel):
    sz = ObservableParser.parse_for(2, 'Sz@0')
    assert abs(evaluator.expectation(neel, sz)) < 1e-15
    for gap in range(8):
        expected = -0.25 if gap % 2 == 0 else 0.25
        assert abs(evaluator.two_point(neel, sz, sz, gap) - expected) < 1e-12


def test_product_state_factorizes(evaluator, product, rng):
    first = WindowObservable.single_site(Certifier.random_hermitian(rng, 2))
    second = WindowObservable.single_site(Certifier.random_hermitian(rng, 2))
    for gap in range(5):
        assert abs(evaluator.connected_two_point(product, first, second, gap)) < 1e-12


def test_two_point_equals_joint_window(evaluator, canonical, rng):
    csys = canonical('markov_chain')
    first = WindowObservable.from_matrix(Certifier.random_hermitian(rng, 9), 3)
    second = WindowObservable.single_site(Certifier.random_hermitian(rng, 3))
    for gap in range(3):
        joint = StateEvaluator.joint_window(first, second, gap)
        assert joint.n_sites == 3 + gap
        expected = evaluator.reduced_density(csys, joint.n_sites).expectation(joint.placed_at(0))
        assert abs(evaluator.two_point(csys, first, second, gap) - expected) < 1e-12


def test_negative_gap_is_an_overlap(evaluator, aklt):
    unit = WindowObservable.identity(3)
    with pytest.raises(OverlapError):
        evaluator.two_point(aklt, unit, unit, -1)


def test_window_cap(evaluator, aklt):
    with pytest.raises(SizeCapExceeded):
        evaluator.reduced_density(aklt, 8)
    with pytest.raises(ShapeMismatch):
        evaluator.reduced_density(aklt, 0)


def test_alphabet_mismatch(evaluator, aklt):
    with pytest.raises(ShapeMismatch):
        evaluator.expectation(aklt, ObservableParser.parse_for(2, 'Sz@0'))


@pytest.mark.parametrize('name', ['aklt', 'random_ergodic', 'markov_chain'])
def test_two_sided_eval_matches_two_point(evaluator, canonical, dual_of, rng, name):
    csys = canonical(name)
    dual = dual_of(csys)
    d = csys.d
    left = WindowObservable.from_matrix(Certifier.random_hermitian(rng, d * d), d, first_site=-1)
    right = WindowObservable.single_site(Certifier.random_hermitian(rng, d), site=1)
    direct = evaluator.two_point(csys, left, right, 0)
    assert abs(evaluator.two_sided_eval(csys, dual, left, right) - direct) < 1e-10


def test_two_sided_eval_requires_bond_windows(evaluator, aklt, dual_of):
    dual = dual_of(aklt)
    with pytest.raises(ShapeMismatch):
        evaluator.two_sided_eval(aklt, dual, WindowObservable.identity(3, first_site=1),
                                 WindowObservable.identity(3, first_site=2))


@pytest.mark.parametrize('gap', [0, 1, 2])
def test_bond_eval_matches_joint_window(evaluator, canonical, dual_of, rng, gap):
    csys = canonical('random_ergodic')
    raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    observable = BondObservable(n=1, d=2, matrix=raw, gap=gap)
    joint = observable.joint_window()
    expected = evaluator.reduced_density(csys, joint.n_sites).expectation(joint)
    assert abs(evaluator.bond_eval(csys, dual_of(csys), observable) - expected) < 1e-10


def test_window_operator_norm_of_staggered_product(evaluator):
    observable = ObservableParser.parse_for(2, 'Sz@0 * Sz@1')
    report = evaluator.window_operator_norm(observable, two_sided=True)
    assert report.operator_norm == pytest.approx(0.25)
    assert report.coefficient_norm == pytest.approx(0.5)
    assert report.discrepancy == pytest.approx(0.25)

    single = evaluator.window_operator_norm(ObservableParser.parse_for(2, 'Sz@0'))
    assert single.operator_norm == pytest.approx(0.5)
    assert not single.two_sided
    with pytest.raises(ShapeMismatch):
        evaluator.window_operator_norm(ObservableParser.parse_for(2, 'Sz@0'), two_sided=True)


def test_norm_comparison_survey_finds_counterexamples(evaluator):
    survey = evaluator.norm_comparison_survey(samples=20, seed=7)
    assert survey.samples == 20
    assert 0 < survey.counterexamples <= 20
    assert survey.max_discrepancy > 1e-8


def test_norm_comparison_survey_covers_both_half_widths(evaluator):
    survey = evaluator.norm_comparison_survey(samples=20, seed=7)
    assert survey.max_n == 2
    assert [(window.d, window.n, window.samples) for window in survey.windows] == [
        (2, 1, 5), (2, 2, 5), (3, 1, 5), (3, 2, 5)]

    narrow = evaluator.norm_comparison_survey(samples=4, seed=7, dimensions=(2,), half_widths=(1,))
    assert narrow.max_n == 1
    assert [(window.d, window.n) for window in narrow.windows] == [(2, 1)]
