import numpy as np
import pytest
from core.errors import PreconditionError
from core.fock import creation, free_field, reference_space, translated_amplitudes, wedge_localized_amplitudes
from core.geometry import (LorentzTransform, PoincareElement, Wedge, causal_complement, pi_rotation,
                           standard_wedge, warp_matrix)
from core.spectral import random_decomposition, random_operator, warp
from core.wedge_algebra import (WedgeAlgebra, check_adjoint_stability, check_assignment_covariance,
                                check_definition_consistency, check_isotony, check_kappa_zero, check_locality,
                                check_reeh_schlieder, close_under_adjoint, deform_for_wedge, matrix_units,
                                mirror_model, monomials, span_residual, swap_operator, tensor_split_model,
                                validate_germ, warp_matrix_for_wedge)


@pytest.fixture(scope="module")
def F():
    return reference_space()


@pytest.fixture
def mirror():
    return mirror_model(np.random.default_rng(11), 2)


def test_warp_matrix_for_standard_and_left_wedges():
    W0 = standard_wedge(2)
    np.testing.assert_array_equal(warp_matrix_for_wedge(W0, 1.5).matrix, warp_matrix(1.5, 2).matrix)
    np.testing.assert_array_equal(warp_matrix_for_wedge(causal_complement(W0), 1.5).matrix,
                                  -warp_matrix(1.5, 2).matrix)


def test_complement_in_d3_gets_negated_warp_matrix():
    W0c = causal_complement(standard_wedge(3))
    np.testing.assert_allclose(warp_matrix_for_wedge(W0c, 1.0).matrix, -warp_matrix(1.0, 3).matrix, atol=1e-15)


def test_deform_needs_physical_decomposition():
    rng = np.random.default_rng(0)
    S = random_decomposition(rng, 3, 2, physical=False)
    with pytest.raises(PreconditionError):
        deform_for_wedge(standard_wedge(2), random_operator(rng, 3), S, 1.0)


def test_close_under_adjoint_adds_missing_adjoints(F):
    gens = close_under_adjoint([creation(F, 0), free_field(F, np.ones(F.n_modes))])
    assert len(gens) == 3


def test_monomials_count():
    units = matrix_units(2)
    assert len(monomials(units[:2], 2)) == 1 + 2 + 4
    r, cond = span_residual(np.eye(2), monomials(units, 1))
    assert r < 1e-12 and cond >= 1.0


def test_definition_consistency_on_fock(F):
    A = free_field(F, np.array([1.0, 0.5j, -0.2]))
    lam = PoincareElement(LorentzTransform.boost(2, 0.4), np.array([0.3, -0.1]))
    alt = lam @ PoincareElement.pure_lorentz(LorentzTransform.boost(2, -0.7))
    for left in (False, True):
        assert check_definition_consistency(Wedge(lam, left), A, F.spectral, 1.0, alt).passed


def test_definition_consistency_rejects_other_frames(F):
    A = free_field(F, np.ones(F.n_modes))
    with pytest.raises(PreconditionError):
        check_definition_consistency(standard_wedge(2), A, F.spectral, 1.0,
                                     PoincareElement.pure_translation([0.0, 1.0]))


def test_isotony_on_translated_wedge(F):
    h = np.array([1.0, 0.5 - 0.5j, 0.25j])
    a = np.array([0.2, 1.0])
    W0 = standard_wedge(2)
    phi, phi_a = free_field(F, h), free_field(F, translated_amplitudes(F, h, a))
    r = check_isotony(W0.translate(a), W0, [phi_a], [phi, phi_a], F.spectral, 1.0, degree_cap=2)
    assert r.passed
    assert r.params["warp_matrix_gap"] == 0.0


def test_isotony_preconditions(F):
    W0 = standard_wedge(2)
    phi = free_field(F, np.ones(F.n_modes))
    with pytest.raises(PreconditionError):
        check_isotony(W0, W0.translate([0.0, 1.0]), [phi], [phi], F.spectral, 1.0)
    with pytest.raises(PreconditionError):
        check_isotony(causal_complement(W0.translate([0.0, 1.0])), W0, [phi], [phi], F.spectral, 1.0)


@pytest.mark.parametrize("d", [2, 3])
def test_locality_on_tensor_split(d):
    rng = np.random.default_rng(d)
    _, _, S = tensor_split_model(rng, d, 2, 3)
    A = [np.kron(random_operator(rng, 2), np.eye(3))]
    B = [np.kron(np.eye(2), random_operator(rng, 3))]
    r = check_locality(A, B, S, 1.0)
    assert r.passed and r.hard
    assert r.params["hypothesis_residual"] < 1e-12


def test_locality_on_mirror_model(mirror):
    rng = np.random.default_rng(12)
    r = check_locality([mirror.left(random_operator(rng, 2))], [mirror.right(random_operator(rng, 2))],
                       mirror.spectral, 1.0)
    assert r.passed


def test_locality_reports_failed_hypothesis():
    rng = np.random.default_rng(13)
    S = random_decomposition(rng, 4, 2, k=4, physical=True)
    r = check_locality([random_operator(rng, 4)], [random_operator(rng, 4)], S, 1.0)
    assert not r.passed
    assert r.params["failure"] == "hypothesis"


def test_free_field_locality_is_soft(F):
    right, left = wedge_localized_amplitudes(F, np.pi / 2)
    A, B = [free_field(F, right)], [free_field(F, left)]
    C = F.below_cutoff_projector()
    r = check_locality(A, B, F.spectral, 1.0, exact=False, compress=C)
    assert r.passed and not r.hard
    assert r.params["hypothesis_residual"] > 1e-6
    assert "conclusion_residual" in r.params
    # equal-time fields at spacelike separation commute below the cutoff
    assert check_locality(A, B, F.spectral, 0.0, exact=False, compress=C).params["conclusion_residual"] < 1e-10


def test_reeh_schlieder_on_fock(F):
    gens = [creation(F, i) for i in range(F.n_modes)]
    r = check_reeh_schlieder(gens, F.spectral, 1.0, degree_cap=2)
    assert r.passed
    assert r.params["vacuum_residual"] < 1e-12


def test_assignment_covariance_with_translations(F):
    from core.spectral import ExtendedRep
    A = free_field(F, np.array([0.3, 1.0, -0.4j]))
    W = Wedge(PoincareElement(LorentzTransform.boost(2, 0.2), np.array([0.1, 0.4])), True)
    lam = PoincareElement.pure_translation([1.0, -0.5])
    assert check_assignment_covariance(W, A, ExtendedRep(F.spectral), 1.0, lam).passed


def test_assignment_covariance_with_pi_rotation(mirror):
    rng = np.random.default_rng(14)
    A = mirror.left(random_operator(rng, 2))
    W = Wedge(PoincareElement(LorentzTransform.rotation(3, 0.3), np.array([0.0, 0.2, 0.1])))
    lam = PoincareElement(pi_rotation(3), np.array([0.5, -0.2, 0.3]))
    assert check_assignment_covariance(W, A, mirror.rep, 1.0, lam).passed


def test_adjoint_stability(F):
    alg = WedgeAlgebra.build(standard_wedge(2), [creation(F, 1)], F.spectral, 1.0, 2)
    assert len(alg.generators) == 2
    assert check_adjoint_stability(alg).passed


def test_kappa_zero_recovers_undeformed(F):
    gens = [free_field(F, np.ones(F.n_modes)), creation(F, 0)]
    r = check_kappa_zero(Wedge(PoincareElement.identity(2), True), gens, F.spectral)
    assert r.residual == 0.0


def test_swap_intertwines_mirror_momenta(mirror):
    V = swap_operator(2)
    np.testing.assert_array_equal(V @ V, np.eye(4))
    assert mirror.rep.intertwining_residual(mirror.rep.actions[0]) < 1e-12


def test_germ_conditions_hold_on_mirror_model(mirror):
    W0 = standard_wedge(3)
    gens = [deform_for_wedge(W0, mirror.left(E), mirror.spectral, 1.0) for E in matrix_units(2)]
    preserving = [PoincareElement.pure_translation([0.0, 1.0, 0.5])]
    reflecting = [PoincareElement(pi_rotation(3), np.array([0.0, -1.0, 0.2]))]
    r = validate_germ(gens, mirror.spectral, preserving, reflecting, rep=mirror.rep)
    assert r.passed
    assert r.params["condition_a_passed"] and r.params["condition_b_passed"]


def test_germ_full_algebra_fails_condition_b(mirror):
    preserving = [PoincareElement.pure_translation([0.0, 1.0, 0.0])]
    reflecting = [PoincareElement(pi_rotation(3), np.array([0.0, -1.0, 0.0]))]
    r = validate_germ(matrix_units(4), mirror.spectral, preserving, reflecting, degree_cap=1, rep=mirror.rep)
    assert r.params["condition_a_passed"]
    assert not r.params["condition_b_passed"]
    assert not r.passed


def test_germ_rejects_wrong_elements(mirror):
    with pytest.raises(PreconditionError):
        validate_germ(matrix_units(4), mirror.spectral, [PoincareElement.pure_translation([0.0, -1.0, 0.0])], [],
                      rep=mirror.rep)


def test_empty_germ_is_vacuous(mirror):
    r = validate_germ([], mirror.spectral, [], [])
    assert r.passed
    assert r.notes == "vacuous"


def test_deformed_generators_match_direct_warp(F):
    A = creation(F, 2)
    W = Wedge(PoincareElement(LorentzTransform.boost(2, 0.5), np.zeros(2)))
    np.testing.assert_allclose(deform_for_wedge(W, A, F.spectral, 1.0),
                               warp(F.spectral, warp_matrix_for_wedge(W, 1.0), A), atol=1e-15)
