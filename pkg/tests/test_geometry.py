import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from core.errors import DimensionMismatchError, InvariantError, SkewnessError
from core.geometry import (LorentzTransform, PoincareElement, SkewWarpMatrix, Wedge, causal_complement,
                           check_fact_iii, check_wedge_frame_consistency, metric, minkowski_inner, pi_rotation,
                           random_lorentz, same_direction, sample_forward_cone, sample_wedge_points, standard_wedge,
                           transform_Q, vector, warp_matrix, wedge_contains, wedge_equal, wedge_reflector_sample,
                           wedge_stabilizer_sample, wedge_subset)

SEEDS = st.integers(min_value=0, max_value=2**31 - 1)
DIMS = st.integers(min_value=2, max_value=5)


def test_minkowski_inner_signature():
    assert minkowski_inner(vector(1, 0), vector(1, 0)) == 1.0
    assert minkowski_inner(vector(0, 1, 0), vector(0, 1, 0)) == -1.0
    assert minkowski_inner(vector(2, 1, 1), vector(1, 1, 0)) == 1.0
    with pytest.raises(DimensionMismatchError):
        minkowski_inner(vector(1, 0), vector(1, 0, 0))


def test_vector_rejects_scalars():
    with pytest.raises(DimensionMismatchError):
        vector(1.0)


@settings(deadline=None, max_examples=50)
@given(seed=SEEDS, d=DIMS)
def test_lorentz_preserves_inner_product(seed, d):
    rng = np.random.default_rng(seed)
    L = random_lorentz(rng, d, max_rapidity=0.7, factors=2)
    x, y = rng.normal(size=d), rng.normal(size=d)
    assert abs(minkowski_inner(L.apply(x), L.apply(y)) - minkowski_inner(x, y)) < 1e-10


def test_lorentz_rejects_non_isometry_and_reflections():
    with pytest.raises(InvariantError):
        LorentzTransform(np.diag([1.0, 2.0]))
    with pytest.raises(InvariantError):
        LorentzTransform(np.diag([1.0, -1.0]))
    with pytest.raises(InvariantError):
        LorentzTransform(np.diag([-1.0, 1.0]))


@settings(deadline=None, max_examples=30)
@given(seed=SEEDS, d=DIMS)
def test_poincare_composition_law(seed, d):
    rng = np.random.default_rng(seed)
    a = PoincareElement(random_lorentz(rng, d, 0.5, 2), rng.normal(size=d))
    b = PoincareElement(random_lorentz(rng, d, 0.5, 2), rng.normal(size=d))
    x = rng.normal(size=d)
    np.testing.assert_allclose((a @ b).apply(x), a.apply(b.apply(x)), atol=1e-10)
    np.testing.assert_allclose((a.inverse() @ a).apply(x), x, atol=1e-10)


def test_warp_matrix_shape_and_form():
    Q = warp_matrix(1.5, 3)
    assert Q.matrix[0, 1] == Q.matrix[1, 0] == 1.5
    assert np.count_nonzero(Q.matrix) == 2
    gQ = metric(3) @ Q.matrix
    np.testing.assert_array_equal(gQ, -gQ.T)
    p, q = vector(2.0, 1.0, 0.5), vector(3.0, -1.0, 2.0)
    assert Q.form(p, q) == pytest.approx(1.5 * (p[0] * q[1] - p[1] * q[0]))
    assert Q.form(p, p) == pytest.approx(0.0)


def test_warp_matrix_rejects_negative_kappa_and_low_dim():
    with pytest.raises(InvariantError):
        warp_matrix(-1.0, 2)
    with pytest.raises(DimensionMismatchError):
        warp_matrix(1.0, 1)


def test_non_skew_matrix_rejected():
    with pytest.raises(SkewnessError):
        SkewWarpMatrix(np.eye(2))


def test_standard_wedge_membership():
    W0 = standard_wedge(2)
    assert W0.contains([0.0, 1.0])
    assert W0.contains([0.5, 1.0])
    assert W0.contains([1.0, 1.0])           # edge of the wedge
    assert not W0.contains([2.0, 1.0])
    assert not W0.contains([0.0, -1.0])
    assert W0.contains([0.0, 0.0])
    assert wedge_contains(W0.translate([0.0, 2.0]), [0.0, 3.0])
    assert not wedge_contains(W0.translate([0.0, 2.0]), [0.0, 1.0])


@settings(deadline=None, max_examples=30)
@given(seed=SEEDS, d=DIMS)
def test_wedge_edges_are_null(seed, d):
    rng = np.random.default_rng(seed)
    W = Wedge(PoincareElement(random_lorentz(rng, d, 0.5, 2), rng.normal(size=d)), d == 2 and seed % 2 == 1)
    gram = W.covectors @ metric(d) @ W.covectors.T
    scale = float(np.abs(W.covectors).max()) ** 2
    np.testing.assert_allclose(np.diag(gram), 0.0, atol=1e-10 * scale)
    assert abs(gram[0, 1]) > 1e-6


def test_causal_complement_d2_toggles_class():
    W0 = standard_wedge(2)
    W0c = causal_complement(W0)
    assert W0c.is_left_class
    assert W0c.contains([0.0, -1.0])
    assert not W0c.contains([0.0, 1.0])
    assert wedge_equal(causal_complement(W0c), W0)


def test_causal_complement_d3_is_pi_rotation():
    W0 = standard_wedge(3)
    W0c = causal_complement(W0)
    assert W0c.contains([0.0, -1.0, 5.0])
    assert not W0c.contains([0.0, 1.0, 0.0])
    assert wedge_equal(W0c, W0.apply(PoincareElement.pure_lorentz(pi_rotation(3))))


def test_left_class_only_in_two_dimensions():
    with pytest.raises(InvariantError):
        Wedge(PoincareElement.identity(3), True)


def test_inward_translation_is_subset():
    W0 = standard_wedge(2)
    assert wedge_subset(W0.translate([0.0, 1.0]), W0)
    assert not wedge_subset(W0.translate([0.0, -1.0]), W0)
    assert not wedge_subset(W0, causal_complement(W0))
    assert same_direction(W0.translate([0.3, 2.0]), W0)


def test_boost_along_x1_stabilizes_standard_wedge():
    W0 = standard_wedge(3)
    B = PoincareElement.pure_lorentz(LorentzTransform.boost(3, 1.3, 1))
    assert wedge_equal(W0.apply(B), W0)


@settings(deadline=None, max_examples=30)
@given(seed=SEEDS, d=DIMS)
def test_sampled_wedge_points_lie_inside(seed, d):
    rng = np.random.default_rng(seed)
    W = Wedge(PoincareElement(random_lorentz(rng, d, 0.5, 2), rng.normal(size=d)))
    pts = sample_wedge_points(rng, W, 25)
    assert W.contains_many(pts).all()
    assert all(W.contains_via_representative(x) for x in pts)


@settings(deadline=None, max_examples=30)
@given(seed=SEEDS, d=DIMS, kappa=st.floats(min_value=0.0, max_value=3.0))
def test_stabilizer_commutes_with_warp_matrix(seed, d, kappa):
    rng = np.random.default_rng(seed)
    lam = wedge_stabilizer_sample(rng, d)
    assert wedge_subset(standard_wedge(d).apply(lam), standard_wedge(d))
    Q = warp_matrix(kappa, d)
    np.testing.assert_allclose(transform_Q(lam.lorentz, Q).matrix, Q.matrix, atol=1e-12 * max(1.0, kappa) * 50)


@settings(deadline=None, max_examples=30)
@given(seed=SEEDS, d=st.integers(min_value=3, max_value=5), kappa=st.floats(min_value=0.0, max_value=3.0))
def test_reflector_flips_warp_matrix(seed, d, kappa):
    rng = np.random.default_rng(seed)
    lam = wedge_reflector_sample(rng, d)
    W0 = standard_wedge(d)
    assert wedge_subset(W0.apply(lam), causal_complement(W0))
    Q = warp_matrix(kappa, d)
    np.testing.assert_allclose(transform_Q(lam.lorentz, Q).matrix, -Q.matrix, atol=1e-12 * max(1.0, kappa) * 50)


def test_reflector_does_not_exist_in_d2():
    with pytest.raises(DimensionMismatchError):
        wedge_reflector_sample(np.random.default_rng(0), 2)


def test_warp_matrix_maps_forward_cone_into_wedge():
    rng = np.random.default_rng(3)
    for d in (2, 3, 4):
        Q = warp_matrix(0.7, d)
        W0 = standard_wedge(d)
        assert W0.contains_many(sample_forward_cone(rng, d, 500) @ Q.matrix.T).all()


@pytest.mark.parametrize("d", [2, 3, 4])
def test_fact_iii_report(d):
    r = check_fact_iii(1.0, d, 2000, np.random.default_rng(1), 500)
    assert r.passed
    assert r.params["violations"] == 0
    assert r.check_id == f"fact_iii[d={d},kappa=1]"


def test_fact_iii_needs_positive_kappa():
    with pytest.raises(InvariantError):
        check_fact_iii(0.0, 2, 10)


def test_frame_consistency_for_equal_wedges():
    lam = PoincareElement(LorentzTransform.rotation(3, 0.4), np.array([0.1, 0.2, 0.3]))
    mu = PoincareElement.pure_lorentz(LorentzTransform.boost(3, 0.8, 1))
    ok, r = check_wedge_frame_consistency(lam, lam @ mu, 2.0)
    assert ok and r < 1e-12
    ok, r = check_wedge_frame_consistency(lam, PoincareElement.identity(3), 2.0)
    assert not ok and r == float("inf")
