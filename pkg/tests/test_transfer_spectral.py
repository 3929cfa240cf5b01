import math

import numpy as np
import pytest

from catalog.ExamplesCatalog import ExamplesCatalog
from common.Errors import ShapeMismatch, SizeCapExceeded
from popescu.PopescuCore import PopescuCore
from spectral.TransferSpectral import TransferSpectral, hermitian_basis
from tests.conftest import ERGODIC_EXAMPLES


@pytest.fixture
def spectral() -> TransferSpectral:
    return TransferSpectral()


def report_of(spectral, csys):
    return spectral.spectral_report(spectral.build_transfer(csys))


def test_transfer_operator_applies_the_markov_map(spectral, canonical, rng):
    csys = canonical('random_ergodic')
    top = spectral.build_transfer(csys)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.abs(top.apply(x) - PopescuCore().cp_map_apply(csys.base, x)).max() < 1e-12
    assert np.abs(top.power(3).apply(x) - top.apply(top.apply(top.apply(x)))).max() < 1e-12


def test_aklt_spectrum(spectral, aklt):
    report = report_of(spectral, aklt)
    assert np.abs(np.array(report.eigenvalues) - np.array([1, -1 / 3, -1 / 3, -1 / 3])).max() < 1e-10
    assert len(report.peripheral) == 1
    assert abs(report.peripheral[0] - 1) < 1e-10
    assert report.alpha == pytest.approx(1 / 3, abs=1e-10)
    assert report.gauge_period == 1
    assert report.fixed_dim == 1
    assert report.mixing
    assert report.correlation_length == pytest.approx(1 / math.log(3))
    assert report.spectral_radius == pytest.approx(1.0)


def test_neel_spectrum_is_periodic(spectral, neel):
    report = report_of(spectral, neel)
    assert sorted(value.real for value in report.peripheral) == pytest.approx([-1, 1])
    assert report.gauge_period == 2
    assert report.alpha == 1.0
    assert report.fixed_dim == 1
    assert not report.mixing
    assert math.isinf(report.correlation_length)


def test_product_state_has_no_decay_rate(spectral, product):
    report = report_of(spectral, product)
    assert report.alpha == 0.0
    assert report.correlation_length == 0.0


def test_markov_chain_decay_rate(spectral, markov):
    report = report_of(spectral, markov)
    assert report.mixing
    # the circulant transition matrix has eigenvalues 1 and -0.35 +- 0.15 sqrt(3) i
    assert report.alpha == pytest.approx(math.sqrt(0.19), abs=1e-10)
    assert report.gauge_period == 1


def test_ergodicity(spectral, canonical):
    for name in ERGODIC_EXAMPLES:
        assert spectral.ergodicity_check(canonical(name))
    assert not spectral.ergodicity_check(canonical('ghz_mixture'))


def test_kolmogorov_iterates_follow_alpha(spectral, aklt):
    result = spectral.kolmogorov_check(aklt, n_max=8)
    assert result.spectral_pass
    assert len(result.iterates) == 8
    constant = result.iterates[0] / (1 / 3)
    for n, defect in enumerate(result.iterates, start=1):
        assert defect <= constant * (1 / 3) ** n + 1e-12


def test_kolmogorov_fails_for_periodic_chain(spectral, neel):
    result = spectral.kolmogorov_check(neel, n_max=6)
    assert not result.spectral_pass
    assert min(result.iterates) >= 0.2


def test_hermitian_basis_is_orthonormal():
    basis = hermitian_basis(3)
    assert len(basis) == 9
    gram = np.array([[np.trace(a.conj().T @ b) for b in basis] for a in basis])
    assert np.abs(gram - np.eye(9)).max() < 1e-15
    assert all(np.abs(element - element.conj().T).max() == 0 for element in basis)


def test_gauge_group(spectral, aklt, neel, product):
    # z x y has a non vanishing expectation, so lengths 2 and 3 both occur and the gcd is 1
    assert spectral.gauge_group_detect(aklt) == 1
    assert spectral.gauge_group_detect(neel) == 2
    assert spectral.gauge_group_detect(product) == 1


def test_gauge_word_cap(spectral, aklt):
    with pytest.raises(SizeCapExceeded):
        spectral.gauge_group_detect(aklt, 8)


def test_blocked_system_squares_alpha(spectral, core, aklt):
    blocked = core.canonicalize(core.validate(spectral.block_system(aklt, 2)))
    assert blocked.d == 9
    assert report_of(spectral, blocked).alpha == pytest.approx(1 / 9, abs=1e-10)
    with pytest.raises(ShapeMismatch):
        spectral.block_system(aklt, 0)


def test_blocked_neel_chain_is_not_ergodic(spectral, core, neel):
    blocked = core.canonicalize(core.validate(spectral.block_system(neel, 2)))
    assert blocked.fixed_dim == 2
    assert not blocked.ergodic


def test_spectra_match(spectral):
    matched, distance = spectral.spectra_match(np.array([1, -1j, 0.5]), np.array([0.5, 1, -1j]))
    assert matched
    assert distance == pytest.approx(0.0)
    matched, distance = spectral.spectra_match(np.array([1, 0.5]), np.array([1]))
    assert not matched
    assert math.isinf(distance)


@pytest.mark.parametrize('name', ['aklt', 'markov_chain', 'random_ergodic'])
@pytest.mark.parametrize('m', [2, 3])
def test_blocked_transfer_is_a_power(spectral, core, canonical, name, m):
    csys = canonical(name)
    power = spectral.build_transfer(csys).power(m).mat
    block = spectral.block_system(csys, m)
    assert np.abs(PopescuCore.superoperator(block.v) - power).max() < 1e-10

    blocked = spectral.build_transfer(core.canonicalize(core.validate(block)))
    matched, distance = spectral.spectra_match(np.linalg.eigvals(blocked.mat), np.linalg.eigvals(power))
    assert matched, distance


@pytest.mark.parametrize('name', ExamplesCatalog.NAMES)
def test_spectral_radius_is_one(spectral, canonical, name):
    assert abs(report_of(spectral, canonical(name)).spectral_radius - 1) < 1e-9


@pytest.mark.parametrize('seed', range(20))
def test_random_ergodic_spectral_radius_is_one(spectral, canonical, seed):
    report = report_of(spectral, canonical('random_ergodic', seed))
    assert abs(report.spectral_radius - 1) < 1e-9
    assert report.alpha < 1


@pytest.mark.parametrize('name', ['neel_flip', 'aklt'])
def test_gauge_gcd_only_shrinks_with_longer_words(spectral, canonical, name):
    csys = canonical(name)
    found = [spectral.gauge_group_detect(csys, length) for length in range(1, 8)]
    for shorter, longer in zip(found, found[1:]):
        if longer is None:
            assert shorter is None
        else:
            assert (shorter or 0) % longer == 0
    assert found[-1] == (2 if name == 'neel_flip' else 1)
