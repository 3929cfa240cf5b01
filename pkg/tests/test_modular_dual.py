import numpy as np
import pytest

from catalog.ExamplesCatalog import SIGMA_X
from common.Errors import RhoSingular
from modular.ModularDual import ModularDual
from modular.StandardForm import DualSystem
from popescu.PopescuCore import PopescuCore
from popescu.PopescuSystem import CanonicalSystem, PopescuSystem
from spectral.TransferSpectral import TransferSpectral
from tests.conftest import ERGODIC_EXAMPLES


@pytest.fixture
def modular() -> ModularDual:
    return ModularDual()


def random_matrix(rng, k):
    return rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))


@pytest.mark.parametrize('name', ERGODIC_EXAMPLES)
def test_standard_form_identities(modular, canonical, rng, name):
    csys = canonical(name)
    mod = modular.modular_data(csys)
    sf = modular.standard_form(csys, mod)
    omega = sf.omega_vec
    assert abs(np.vdot(omega, omega) - 1) < 1e-12
    assert np.abs(sf.j_action(omega) - omega).max() < 1e-12
    assert np.abs(mod.delta_action(omega) - omega).max() < 1e-10
    assert np.abs(mod.delta_matrix() @ omega - omega).max() < 1e-10

    vector = random_matrix(rng, csys.k).reshape(-1)
    assert np.abs(sf.j_action(sf.j_action(vector)) - vector).max() == 0

    x = random_matrix(rng, csys.k)
    assert abs(sf.vector_state(sf.left_action(x)) - np.trace(csys.rho @ x)) < 1e-12


@pytest.mark.parametrize('name', ERGODIC_EXAMPLES)
def test_dual_letters(modular, canonical, name):
    csys = canonical(name)
    mod = modular.modular_data(csys)
    dual = modular.dual_system(csys, mod)
    assert dual.d == csys.d
    assert dual.normalization_residual <= 1e-8
    assert modular.dual_vector_defect(modular.standard_form(csys, mod), csys, dual) <= 1e-10

    sf = modular.standard_form(csys, mod)
    for v in csys.v:
        for letter in range(dual.d):
            commutator = (sf.left_action(v) @ dual.tilde_v(letter) - dual.tilde_v(letter) @ sf.left_action(v))
            assert np.abs(commutator).max() < 1e-12


@pytest.mark.parametrize('name', ERGODIC_EXAMPLES)
def test_word_identity_through_dual_words(modular, canonical, name):
    csys = canonical(name)
    dual = modular.dual_system(csys, modular.modular_data(csys))
    assert modular.word_identity_residual(csys, dual, max_len=3) <= 1e-9


@pytest.mark.parametrize('seed', range(20))
def test_word_identity_on_random_systems(modular, canonical, seed):
    csys = canonical('random_ergodic', seed)
    dual = modular.dual_system(csys, modular.modular_data(csys))
    assert modular.word_identity_residual(csys, dual, max_len=3) <= 1e-9


def test_opposite_modular_sign_breaks_word_identity(modular, markov):
    mod = modular.modular_data(markov)
    dual = modular.dual_system(markov, mod)
    assert modular.word_identity_residual(markov, dual) <= 1e-9

    flipped = tuple(mod.rho_inv_half @ v @ mod.rho_half for v in markov.v)
    reversed_sign = DualSystem(w=flipped, condition=dual.condition, normalization_residual=0.0)
    assert modular.word_identity_residual(markov, reversed_sign) > 1e-3


@pytest.mark.parametrize('name', ERGODIC_EXAMPLES)
def test_kms_adjoint_map(modular, canonical, rng, name):
    csys = canonical(name)
    mod = modular.modular_data(csys)
    tau_tilde = modular.kms_adjoint_map(csys, mod)
    identity = np.eye(csys.k)
    assert np.abs(tau_tilde(identity) - identity).max() < 1e-10

    for _ in range(100):
        x, y = random_matrix(rng, csys.k), random_matrix(rng, csys.k)
        assert modular.kms_adjoint_residual(csys, mod, x, y) <= 1e-9
        assert abs(np.trace(csys.rho @ tau_tilde(y)) - np.trace(csys.rho @ y)) < 1e-10


@pytest.mark.parametrize('name', ERGODIC_EXAMPLES)
def test_kms_spectrum_equals_transfer_spectrum(modular, canonical, name):
    csys = canonical(name)
    kms = modular.kms_space(csys, modular.modular_data(csys))
    spectral = TransferSpectral()
    report = spectral.spectral_report(spectral.build_transfer(csys))
    matched, distance = spectral.spectra_match(np.linalg.eigvals(kms.T_mat), np.array(report.eigenvalues))
    assert matched, distance


def test_kms_matrix_is_hermitian_under_detailed_balance(modular, aklt, markov):
    kms = modular.kms_space(aklt, modular.modular_data(aklt))
    assert np.abs(kms.T_mat - kms.T_mat.conj().T).max() < 1e-12
    assert np.allclose(np.linalg.eigvalsh(kms.T_mat), [-1 / 3, -1 / 3, -1 / 3, 1], atol=1e-10)

    chain = modular.kms_space(markov, modular.modular_data(markov))
    assert np.abs(chain.T_mat - chain.T_mat.conj().T).max() > 1e-6


def test_kms_coordinates_are_orthonormal(modular, canonical):
    csys = canonical('random_ergodic')
    kms = modular.kms_space(csys, modular.modular_data(csys))
    basis = kms.basis()
    gram = np.array([[kms.inner(x, y) for y in basis] for x in basis])
    assert np.abs(gram - np.eye(len(basis))).max() < 1e-10
    assert abs(np.vdot(kms.identity_vector, kms.identity_vector) - 1) < 1e-12
    assert np.abs(kms.T_mat @ kms.identity_vector - kms.identity_vector).max() < 1e-10
    assert not np.allclose(kms.T_mat, PopescuCore.superoperator(csys.v), atol=1e-6)


def test_kms_inner_product(modular, markov, rng):
    mod = modular.modular_data(markov)
    kms = modular.kms_space(markov, mod)
    sf = modular.standard_form(markov, mod)
    x, y = random_matrix(rng, 3), random_matrix(rng, 3)
    assert abs(kms.inner(x, y) - ModularDual.kms_pairing(mod, x, y)) < 1e-12
    reflected = sf.vector_state(sf.right_action(x.conj().T) @ sf.left_action(y))
    assert abs(reflected - ModularDual.kms_pairing(mod, x, y)) < 1e-12
    assert abs(kms.inner(x, x).imag) < 1e-12
    assert kms.inner(x, x).real > 0
    assert len(kms.basis()) == 9


def test_detailed_balance_and_gap(modular, canonical):
    expectations = {'aklt': (True, 1 / 3), 'neel_flip': (True, 1.0), 'product_pure': (True, 0.0),
                    'markov_chain': (False, np.sqrt(0.19))}
    for name, (symmetric, gap) in expectations.items():
        csys = canonical(name)
        kms = modular.kms_space(csys, modular.modular_data(csys))
        assert modular.detailed_balance_check(kms)[0] is symmetric
        assert modular.T_gap(kms) == pytest.approx(gap, abs=1e-9)


def test_kms_symmetry_under_detailed_balance(modular, aklt, markov):
    assert modular.kms_symmetry_residual(aklt, modular.modular_data(aklt)) <= 1e-9
    assert modular.kms_symmetry_residual(markov, modular.modular_data(markov)) > 1e-6


def test_haag_duality_at_the_bond(modular, aklt, product):
    assert modular.haag_duality_bond_check(modular.dual_system(aklt, modular.modular_data(aklt))) == (True, 4)
    assert modular.haag_duality_bond_check(modular.dual_system(product, modular.modular_data(product)))[0]


def test_reducible_dual_breaks_haag_duality(modular):
    letters = [np.diag([1, 1]) / np.sqrt(2), np.diag([1, -1]) / np.sqrt(2)]
    system = PopescuCore().validate(PopescuSystem.from_matrices(letters, name='diagonal'))
    csys = CanonicalSystem(base=system, rho=np.eye(2) / 2, ergodic=False, fixed_dim=2, algebra_dim=2,
                           original_k=2)
    holds, span = modular.haag_duality_bond_check(modular.dual_system(csys, modular.modular_data(csys)))
    assert not holds
    assert span == 2


def test_delta_triviality(modular, canonical):
    aklt = canonical('aklt')
    delta = modular.delta_triviality_check(aklt, modular.modular_data(aklt))
    assert (delta.delta_is_identity, delta.all_v_selfadjoint) == (True, True)
    assert delta.consistent

    generic = canonical('random_ergodic')
    delta = modular.delta_triviality_check(generic, modular.modular_data(generic))
    assert (delta.delta_is_identity, delta.all_v_selfadjoint) == (False, False)

    # trace state without self adjoint letters, the converse direction does not hold
    neel = canonical('neel_flip')
    delta = modular.delta_triviality_check(neel, modular.modular_data(neel))
    assert (delta.delta_is_identity, delta.all_v_selfadjoint) == (True, False)
    assert not delta.consistent

    product = canonical('product_pure')
    assert modular.delta_triviality_check(product, modular.modular_data(product)).degenerate


def test_dual_relation(modular, aklt, markov):
    assert ModularDual.dual_relation_defect(aklt, modular.dual_system(aklt, modular.modular_data(aklt))) < 1e-12
    assert ModularDual.dual_relation_defect(markov, modular.dual_system(markov, modular.modular_data(markov))) > 1e-3


def test_singular_density_is_rejected(modular):
    system = PopescuCore().validate(PopescuSystem.from_matrices([np.eye(2) / np.sqrt(2), SIGMA_X / np.sqrt(2)]))
    csys = CanonicalSystem(base=system, rho=np.diag([1.0, 0.0]), ergodic=False, fixed_dim=2, algebra_dim=2,
                           original_k=2)
    with pytest.raises(RhoSingular):
        modular.modular_data(csys)


def test_tomita_relation(modular, markov, rng):
    mod = modular.modular_data(markov)
    x = random_matrix(rng, 3)
    # J Delta^{1/2} x Omega = x* Omega with Delta^{1/2} x Omega = sigma_{-i/2}(x) Omega
    moved = mod.j_action((mod.sigma_minus_i_half(x) @ mod.rho_half).reshape(-1))
    assert np.abs(moved - (x.conj().T @ mod.rho_half).reshape(-1)).max() < 1e-10
    assert np.abs(mod.sigma_i_half(mod.sigma_minus_i_half(x)) - x).max() < 1e-10
