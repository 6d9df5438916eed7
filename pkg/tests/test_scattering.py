import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from core.errors import InvariantError, OffShellError, PrecedenceError, SectorError
from core.fock import creation, reference_space
from core.geometry import LorentzTransform, warp_matrix
from core.scattering import (CesaroDemo, HeppPacketSpec, VelocitySupport, cesaro_average_factor,
                             cesaro_convergence_demo, check_hepp_shell, check_sign_lemma, deformed_two_particle,
                             hepp_filter, hepp_packet_operator, lorentz_breaking_witness, one_particle_coefficients,
                             phase_table, precedes, reference_packets, rotation_witness_scan, s_kernel_ratio,
                             s_matrix_element, sharp_phase, velocity_support)
from core.spectral import random_operator

SQRT2 = np.sqrt(2.0)
P_LEFT = np.array([SQRT2, -1.0])
P_RIGHT = np.array([SQRT2, 1.0])


@pytest.fixture(scope="module")
def F():
    return reference_space()


@pytest.fixture(scope="module")
def modes(F):
    return F.mode_of_spatial((-1.0,)), F.mode_of_spatial((0.0,)), F.mode_of_spatial((1.0,))


def test_reference_phase_is_two_root_two():
    ph = sharp_phase(P_LEFT, P_RIGHT, 1.0, "in")
    assert ph.phase == pytest.approx(np.exp(2j * SQRT2), abs=1e-12)
    assert ph.angle == pytest.approx(2 * SQRT2)
    out = sharp_phase(P_LEFT, P_RIGHT, 1.0, "out")
    assert out.phase == pytest.approx(np.conj(ph.phase), abs=1e-15)


def test_sharp_phase_rejects_off_shell_and_mixed_masses():
    with pytest.raises(OffShellError):
        sharp_phase(np.array([1.0, 2.0]), P_RIGHT, 1.0, "in")
    with pytest.raises(OffShellError):
        sharp_phase(P_LEFT, np.array([np.sqrt(5.0), 1.0]), 1.0, "in")
    with pytest.raises(OffShellError):
        sharp_phase(P_LEFT, P_RIGHT, 1.0, "in", mass=2.0)


def test_phase_direction_validated():
    with pytest.raises(InvariantError):
        sharp_phase(P_LEFT, P_RIGHT, 1.0, "sideways")


def test_velocity_precedence(F, modes):
    left, rest, right = modes
    v = {i: VelocitySupport(F.modes[i].velocity) for i in modes}
    assert precedes(v[right], v[left])
    assert precedes(v[rest], v[left])
    assert not precedes(v[left], v[right])
    assert not precedes(v[rest], v[rest])


def test_velocity_support_of_empty_packet(F):
    with pytest.raises(PrecedenceError):
        velocity_support(F, np.zeros(F.n_modes))


def test_sign_lemma_on_lattice(F):
    r = check_sign_lemma(F, 1.0)
    assert r.passed
    assert r.params["configurations"] == 3
    assert check_sign_lemma(reference_space(d=3), 0.5).passed


def test_deformed_in_state_carries_sharp_phase(F, modes):
    left, _, right = modes
    Q = warp_matrix(1.0, 2)
    state = deformed_two_particle(F, F.one_particle_state(left), F.one_particle_state(right), Q, "in")
    plain = creation(F, left) @ creation(F, right) @ F.vacuum()
    np.testing.assert_allclose(state, np.exp(2j * SQRT2) * plain, atol=1e-12)


def test_deformed_out_state_carries_conjugate_phase(F, modes):
    left, _, right = modes
    Q = warp_matrix(1.0, 2)
    state = deformed_two_particle(F, F.one_particle_state(right), F.one_particle_state(left), Q, "out")
    plain = creation(F, left) @ creation(F, right) @ F.vacuum()
    np.testing.assert_allclose(state, np.exp(-2j * SQRT2) * plain, atol=1e-12)


def test_deformed_state_checks_precedence(F, modes):
    left, _, right = modes
    Q = warp_matrix(1.0, 2)
    with pytest.raises(PrecedenceError):
        deformed_two_particle(F, F.one_particle_state(right), F.one_particle_state(left), Q, "in")
    with pytest.raises(ValueError):
        deformed_two_particle(F, F.one_particle_state(right), F.one_particle_state(left), Q, "both")


def test_deformed_state_rejects_two_particle_input(F, modes):
    left, _, right = modes
    two = creation(F, left) @ creation(F, right) @ F.vacuum()
    with pytest.raises(SectorError):
        deformed_two_particle(F, two, F.one_particle_state(right), warp_matrix(1.0, 2))


def test_one_particle_coefficients(F):
    psi = 0.6 * F.one_particle_state(0) + 0.8j * F.one_particle_state(2)
    np.testing.assert_allclose(one_particle_coefficients(F, psi), [0.6, 0.0, 0.8j])


def test_s_matrix_element_matches_kernel(F, modes):
    left, _, right = modes
    s = s_matrix_element(F, left, right, 1.0)
    assert s == pytest.approx(np.exp(4j * SQRT2), abs=1e-12)
    assert s == pytest.approx(s_kernel_ratio(P_LEFT, P_RIGHT, P_LEFT, P_RIGHT, 1.0), abs=1e-12)


@settings(deadline=None, max_examples=50)
@given(seed=st.integers(min_value=0, max_value=2**31 - 1), kappa=st.floats(min_value=0.0, max_value=5.0))
def test_kernel_ratio_is_unimodular(seed, kappa):
    rng = np.random.default_rng(seed)
    k = rng.normal(scale=2.0, size=(4, 2))
    moms = np.column_stack([np.sqrt(np.sum(k ** 2, axis=1) + 1.0), k])
    assert abs(abs(s_kernel_ratio(*moms, kappa)) - 1.0) < 1e-14


def test_rotation_scan_witness_value():
    p = np.array([SQRT2, 1.0, 0.0])
    q = np.array([SQRT2, 0.0, 1.0])
    best, angle = rotation_witness_scan(p, q, 1.0)
    assert best == pytest.approx(2.0 - SQRT2, abs=1e-12)
    assert angle == pytest.approx(np.pi / 4)
    assert rotation_witness_scan(p, q, 0.0)[0] == 0.0


def test_boosts_do_not_break_d2_phase():
    L = LorentzTransform.boost(2, 0.9)
    assert lorentz_breaking_witness(P_LEFT, P_RIGHT, L, 1.0) < 1e-12


def test_phase_table_rows(F):
    rows = phase_table(F, 1.0, witness_pairs=[(np.array([SQRT2, 1.0, 0.0]), np.array([SQRT2, 0.0, 1.0]))])
    lattice = [r for r in rows if r.d == 2]
    assert len(lattice) == 6
    ref = [r for r in lattice if r.p.startswith("(1.41421,-1") and r.q.startswith("(1.41421,1")
           and r.direction == "in"]
    assert len(ref) == 1
    assert complex(ref[0].phase_re, ref[0].phase_im) == pytest.approx(np.exp(2j * SQRT2), abs=1e-12)
    (witness,) = [r for r in rows if r.d == 3]
    assert witness.witness == pytest.approx(2.0 - SQRT2, abs=1e-12)


def test_hepp_filter_drops_off_lattice_transfers(F):
    filt = hepp_filter(F, HeppPacketSpec(np.ones(F.n_modes)))
    assert filt.off_lattice.any()
    np.testing.assert_array_equal(filt.weights[filt.off_lattice], 0.0)
    assert filt.dropped(np.zeros((F.dim, F.dim))) == 0


def test_hepp_packet_one_particle_component_is_static(F):
    f, _, A = reference_packets(F)
    r = check_hepp_shell(F, A, HeppPacketSpec(f), [0.0, 1.0, 10.0, 100.0])
    assert r.passed


def test_hepp_shell_reports_off_lattice_drops(F):
    f, _, A = reference_packets(F)
    packet = HeppPacketSpec(f)
    r = check_hepp_shell(F, A, packet, [0.0, 1.0])
    assert r.params["off_lattice_dropped"] == hepp_filter(F, packet).dropped(A)
    X = random_operator(np.random.default_rng(4), F.dim)
    assert check_hepp_shell(F, X, packet, [0.0, 1.0]).params["off_lattice_dropped"] > 0


def test_hepp_packet_operator_picks_the_packet_mode(F, modes):
    left, _, _ = modes
    f, _, A = reference_packets(F)
    psi = F.sector_projector(1) @ hepp_packet_operator(F, A, HeppPacketSpec(f)) @ F.vacuum()
    support = np.flatnonzero(np.abs(psi) > 1e-14)
    np.testing.assert_array_equal(support, [np.flatnonzero(F.one_particle_state(left))[0]])


def test_energy_window_validated():
    with pytest.raises(InvariantError):
        HeppPacketSpec(np.ones(3), energy_window=-1.0)


@pytest.mark.parametrize("direction", ["in", "out"])
def test_cesaro_factor_limits(direction):
    nu = np.array([0.0, 1.0, -2.0])
    np.testing.assert_array_equal(cesaro_average_factor(nu, 0.0, direction), np.ones(3))
    f = cesaro_average_factor(nu, 1e8, direction)
    assert f[0] == 1.0
    assert np.abs(f[1:]).max() < 1e-7


def test_cesaro_factor_exact_value():
    f = cesaro_average_factor(np.array([np.pi]), 1.0, "in")
    assert f[0] == pytest.approx((1 - np.exp(-1j * np.pi)) / (1j * np.pi))


def test_cesaro_demo_limit_matches_deformed_state(F):
    f, f_prime, A = reference_packets(F)
    demo = cesaro_convergence_demo(F, A, A, f, f_prime, 1.0, [1.0, 10.0, 100.0], "in")
    assert list(demo.table.columns) == ["T", "deviation", "kappa", "direction"]
    assert len(demo.table) == 3
    assert demo.target_residual < 1e-10


def test_cesaro_shrinking_needs_every_step_to_shrink():
    def demo(deviation):
        table = pd.DataFrame({"T": [1.0, 10.0, 100.0], "deviation": deviation, "kappa": 1.0, "direction": "in"})
        return CesaroDemo(table, np.zeros(1), 0.0)
    assert demo([0.5, 0.2, 0.1]).shrinking()
    assert demo([0.5, 0.5, 0.1]).shrinking()
    # endpoints alone would call this one shrinking
    assert not demo([0.5, 0.9, 0.1]).shrinking(1e-12)
    assert demo([0.5, 0.5 + 1e-13, 0.1]).shrinking(1e-12)


def test_cesaro_demo_requires_ordered_packets(F):
    f, f_prime, A = reference_packets(F)
    with pytest.raises(PrecedenceError):
        cesaro_convergence_demo(F, A, A, f_prime, f, 1.0, [1.0], "in")


def test_kappa_zero_two_particle_state_is_plain(F, modes):
    left, _, right = modes
    state = deformed_two_particle(F, F.one_particle_state(left), F.one_particle_state(right), warp_matrix(0.0, 2))
    np.testing.assert_allclose(state, creation(F, left) @ creation(F, right) @ F.vacuum(), atol=1e-14)
