import numpy as np
import pytest
from core.errors import DimensionGuardError, DuplicateModeError, InvariantError, PreconditionError
from core.fock import (annihilation, build_fock, check_gl_coincidence, check_truncated_ccr, creation,
                       fock_dimension, free_field, gl_deformed_creation, lattice_modes, measure_weights,
                       momentum_operator, number_operator, reference_space, translated_amplitudes,
                       wedge_localized_amplitudes)
from core.geometry import random_skew, warp_matrix
from core.spectral import adjoint_action, warp


@pytest.fixture(scope="module")
def F():
    return reference_space()


def test_reference_space_dimension(F):
    assert F.n_modes == 3
    assert F.dim == 10
    assert fock_dimension(3, 2) == 10
    assert F.spacetime_dim == 2
    assert F.vacuum()[0] == 1.0


def test_lattice_modes_lie_on_the_shell():
    modes = lattice_modes(3, 1, 0.5, 2.0)
    assert len(modes) == 9
    for m in modes:
        p = m.four_momentum
        assert p[0] ** 2 - p[1:] @ p[1:] == pytest.approx(4.0)
        assert np.linalg.norm(m.velocity[1:]) < 1.0


def test_dimension_guard():
    with pytest.raises(DimensionGuardError):
        reference_space(K=3, cutoff=4, max_dim=50)


def test_duplicate_modes_rejected():
    with pytest.raises(DuplicateModeError):
        build_fock([0.0, 1.0, 1.0], 1.0, 2)


def test_non_positive_mass_rejected():
    with pytest.raises(InvariantError):
        build_fock([0.0], 0.0, 1)


def test_ladder_operators_are_adjoint(F):
    for i in range(F.n_modes):
        np.testing.assert_array_equal(annihilation(F, i), creation(F, i).conj().T)


def test_creation_respects_cutoff(F):
    top = F.sector_projector(F.cutoff)
    for i in range(F.n_modes):
        np.testing.assert_array_equal(creation(F, i) @ top, np.zeros((F.dim, F.dim)))


def test_number_operator_counts_creations(F):
    N = number_operator(F)
    state = creation(F, 0) @ creation(F, 2) @ F.vacuum()
    np.testing.assert_allclose(N @ state, 2 * state)


def test_momentum_operator_on_one_particle_states(F):
    for mode in range(F.n_modes):
        psi = F.one_particle_state(mode)
        for mu in range(2):
            np.testing.assert_allclose(momentum_operator(F, mu) @ psi, F.mode_momentum(mode)[mu] * psi)


def test_truncated_ccr(F):
    r = check_truncated_ccr(F)
    assert r.passed
    assert r.residual < 1e-12


def test_free_field_is_hermitian(F):
    phi = free_field(F, np.array([1.0 + 2.0j, -0.5, 0.3j]))
    np.testing.assert_allclose(phi, phi.conj().T, atol=1e-15)


def test_free_field_one_particle_weights(F):
    amps = np.array([1.0, 2.0, 3.0])
    phi = free_field(F, amps)
    one = F.sector_projector(1) @ phi @ F.vacuum()
    w = measure_weights(F)
    for mode in range(F.n_modes):
        assert np.vdot(F.one_particle_state(mode), one) == pytest.approx(w[mode] * amps[mode])


def test_translated_amplitudes_implement_translations(F):
    rng = np.random.default_rng(0)
    h = rng.normal(size=F.n_modes) + 1j * rng.normal(size=F.n_modes)
    x = rng.normal(size=2)
    np.testing.assert_allclose(free_field(F, translated_amplitudes(F, h, x)),
                               adjoint_action(F.spectral, x, free_field(F, h)), atol=1e-12)


def test_gl_twist_reference_value(F):
    # a*(p) on |q>, p = (sqrt 2, 1), q = (sqrt 2, -1): pQq = -2 sqrt 2 for kappa = 1
    p_mode, q_mode = F.mode_of_spatial((1.0,)), F.mode_of_spatial((-1.0,))
    Q = warp_matrix(1.0, 2)
    psi = F.one_particle_state(q_mode)
    twisted = gl_deformed_creation(F, p_mode, Q) @ psi
    plain = creation(F, p_mode) @ psi
    np.testing.assert_allclose(twisted, np.exp(-2j * np.sqrt(2.0)) * plain, atol=1e-14)
    np.testing.assert_allclose(warp(F.spectral, Q, creation(F, p_mode)) @ psi, twisted, atol=1e-12)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 2.0])
def test_gl_coincidence_for_q_kappa(F, kappa):
    assert check_gl_coincidence(F, warp_matrix(kappa, 2)).passed


def test_gl_coincidence_for_random_skew_matrices():
    rng = np.random.default_rng(1)
    F2 = reference_space(K=2)
    assert F2.dim == 21
    for _ in range(5):
        assert check_gl_coincidence(F2, random_skew(rng, 2)).passed


def test_one_particle_state_index(F):
    for mode in range(F.n_modes):
        psi = F.one_particle_state(mode)
        assert np.linalg.norm(F.sector_projector(1) @ psi) == pytest.approx(1.0)
        np.testing.assert_allclose(creation(F, mode) @ F.vacuum(), psi)


def test_wedge_localized_amplitudes_are_mirror_images(F):
    right, left = wedge_localized_amplitudes(F, np.pi / 2)
    np.testing.assert_allclose(np.abs(right), np.exp(-0.5 * np.array([m.spatial[0] ** 2 for m in F.modes])))
    np.testing.assert_allclose(right, np.conj(left), atol=1e-15)
    with pytest.raises(PreconditionError):
        wedge_localized_amplitudes(F, 0.0)
