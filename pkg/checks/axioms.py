"""Axiom battery: the deformed wedge net on the Fock models and on synthetic models."""
from __future__ import annotations
from typing import List
import logging
import numpy as np
from checks.models import fock_model, fock_models, mild_poincare, random_amplitudes, x1_boost
from core.errors import PreconditionError
from core.fock import (check_gl_coincidence, check_truncated_ccr, creation, free_field, gl_deformed_creation,
                       translated_amplitudes, wedge_localized_amplitudes)
from core.geometry import PoincareElement, Wedge, pi_rotation, random_skew, standard_wedge, warp_matrix
from core.scattering import deformed_two_particle, sharp_phase
from core.schema import CheckReport, RunConfig, make_report
from core.spectral import ExtendedRep, random_decomposition, random_operator, relative_residual
from core.wedge_algebra import (WedgeAlgebra, check_adjoint_stability, check_assignment_covariance,
                                check_definition_consistency, check_isotony, check_kappa_zero, check_locality,
                                check_reeh_schlieder, mirror_model, tensor_split_model)

logger = logging.getLogger(__name__)

def _tag(F, kappa=None) -> str:
    base = f"d={F.spacetime_dim},K={(F.n_modes - 1) // 2},dim={F.dim}"
    return base if kappa is None else f"{base},kappa={kappa:g}"

# -------------------------
# FREE FIELD
# -------------------------
def gl_coincidence(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """Warped creation operators against a*(p) e^{ipQP}, for Q_kappa and random skew Q."""
    tol = config.tolerances.exact
    out = []
    for F in fock_models(config):
        for kappa in config.model.kappas:
            out.append(check_gl_coincidence(F, warp_matrix(kappa, 2), tol, f"gl_coincidence[{_tag(F, kappa)}]"))
        reports = [check_gl_coincidence(F, random_skew(rng, 2), tol) for _ in range(config.battery.gl_random_q)]
        worst = max(r.residual for r in reports)
        out.append(make_report(f"gl_coincidence[{_tag(F)},random_q={len(reports)}]", worst, tol,
                               params={"dim": F.dim, "instances": len(reports)}))
    return out

def truncated_ccr(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    return [check_truncated_ccr(F, config.tolerances.exact, f"truncated_ccr[{_tag(F)}]") for F in fock_models(config)]

# -------------------------
# NET PROPERTIES
# -------------------------
def definition_consistency(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    out = []
    for F in fock_models(config):
        A = free_field(F, random_amplitudes(rng, F))
        for kappa in config.model.kappas:
            worst = 0.0
            for left in (False, True):
                for _ in range(5):
                    lam = PoincareElement(x1_boost(rng, 2).lorentz, rng.normal(size=2))
                    W = Wedge(lam, left)
                    alt = lam @ x1_boost(rng, 2)
                    worst = max(worst, check_definition_consistency(W, A, F.spectral, kappa, alt, tol).residual)
            out.append(make_report(f"definition_consistency[{_tag(F, kappa)}]", worst, tol,
                                   params={"dim": F.dim, "kappa": kappa, "wedges": 10}))
    mm = mirror_model(rng, 2)
    A = mm.left(random_operator(rng, 2))
    for kappa in config.model.kappas:
        worst = 0.0
        for _ in range(10):
            lam = mild_poincare(rng, 3)
            worst = max(worst, check_definition_consistency(Wedge(lam), A, mm.spectral, kappa,
                                                            lam @ x1_boost(rng, 3), tol).residual)
        out.append(make_report(f"definition_consistency[mirror,d=3,kappa={kappa:g}]", worst, tol,
                               params={"dim": mm.spectral.dim, "kappa": kappa, "wedges": 10}))
    # a frame that lands on another wedge must be rejected
    F = fock_model(config)
    W = standard_wedge(2)
    try:
        check_definition_consistency(W, free_field(F, np.ones(F.n_modes)), F.spectral, config.model.kappas[0],
                                     PoincareElement.pure_translation([0.0, -1.0]), tol)
        rejected = False
    except PreconditionError:
        rejected = True
    out.append(make_report("definition_consistency[control]", 0.0 if rejected else 1.0, 0.5, passed=rejected,
                           notes="alt maps W0 to a different wedge; rejection expected"))
    return out

def isotony(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """W1 = W2 + a with a in the direction of W2: A_kappa(W1) inside A_kappa(W2)."""
    tol = config.tolerances.span
    D = config.model.degree_cap
    out = []
    for F in fock_models(config):
        h = random_amplitudes(rng, F)
        for kappa in config.model.kappas:
            worst, cond = 0.0, 1.0
            for lam in (PoincareElement.identity(2), PoincareElement(x1_boost(rng, 2).lorentz, rng.normal(size=2))):
                W2 = Wedge(lam)
                a = lam.lorentz.apply([0.0, 1.0 + rng.random()])
                W1 = W2.translate(a)
                phi = free_field(F, h)
                phi_a = free_field(F, translated_amplitudes(F, h, a))
                for W_small, gens_small in ((W1, [phi_a]), (W2, [phi, phi_a])):
                    r = check_isotony(W_small, W2, gens_small, [phi, phi_a], F.spectral, kappa, D, tol)
                    worst, cond = max(worst, r.residual), max(cond, r.params["condition_number"])
            out.append(make_report(f"isotony[{_tag(F, kappa)}]", worst, tol,
                                   params={"dim": F.dim, "kappa": kappa, "degree_cap": D, "condition_number": cond}))
    return out

def assignment_covariance(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    out = []
    for F in fock_models(config):
        rep = ExtendedRep(F.spectral)
        A = free_field(F, random_amplitudes(rng, F))
        for kappa in config.model.kappas:
            worst = 0.0
            for _ in range(10):
                W = Wedge(mild_poincare(rng, 2), bool(rng.random() < 0.5))
                lam = PoincareElement.pure_translation(rng.normal(size=2))
                worst = max(worst, check_assignment_covariance(W, A, rep, kappa, lam, tol).residual)
            out.append(make_report(f"assignment_covariance[{_tag(F, kappa)}]", worst, tol,
                                   params={"dim": F.dim, "kappa": kappa, "instances": 10,
                                           "intertwiners": "translations"}))
    mm = mirror_model(rng, 2)
    A = mm.left(random_operator(rng, 2))
    R = pi_rotation(3)
    for kappa in config.model.kappas:
        worst = 0.0
        for i in range(10):
            W = Wedge(mild_poincare(rng, 3))
            lam = PoincareElement(R, rng.normal(size=3)) if i % 2 == 0 else PoincareElement.pure_translation(
                rng.normal(size=3))
            worst = max(worst, check_assignment_covariance(W, A, mm.rep, kappa, lam, tol).residual)
        out.append(make_report(f"assignment_covariance[mirror,d=3,kappa={kappa:g}]", worst, tol,
                               params={"dim": mm.spectral.dim, "kappa": kappa, "instances": 10,
                                       "intertwiners": "translations, pi rotation"}))
    return out

def locality_exact(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """Tensor-split and mirror instances, where the spectral hypothesis holds exactly."""
    tol = config.tolerances.exact
    out = []
    for kappa in config.model.kappas:
        for d in (2, 3):
            worst_h, worst_c, failed = 0.0, 0.0, 0
            for _ in range(10):
                a, b = int(rng.integers(2, 4)), int(rng.integers(2, 4))
                _, _, S = tensor_split_model(rng, d, a, b)
                A_gens = [np.kron(random_operator(rng, a), np.eye(b)) for _ in range(2)]
                B_gens = [np.kron(np.eye(a), random_operator(rng, b)) for _ in range(2)]
                r = check_locality(A_gens, B_gens, S, kappa, tol=tol)
                worst_h = max(worst_h, r.params["hypothesis_residual"])
                worst_c = max(worst_c, r.params["conclusion_residual"])
                failed += not r.passed
            out.append(make_report(f"locality_exact[tensor,d={d},kappa={kappa:g}]", worst_c, tol,
                                   passed=failed == 0, params={"hypothesis_residual": worst_h, "instances": 10}))
        mm = mirror_model(rng, 2)
        r = check_locality([mm.left(random_operator(rng, 2)) for _ in range(2)],
                           [mm.right(random_operator(rng, 2)) for _ in range(2)], mm.spectral, kappa, tol=tol,
                           check_id=f"locality_exact[mirror,d=3,kappa={kappa:g}]")
        out.append(r)
    return out

def locality_free_field(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """Fields smeared with profiles centred deep in W0 and W0' on refined lattices.

    (h, c) are reported per K, not asserted; the kappa = 0 commutator is carried alongside.
    """
    out = []
    kappa = max(config.model.kappas)
    shift = np.pi / (2 * config.model.lattice_delta)
    for K in (1, 2, 3, 4):
        F = fock_model(config, K)
        right, left = wedge_localized_amplitudes(F, shift)
        A, B = [free_field(F, right)], [free_field(F, left)]
        C = F.below_cutoff_projector()
        r = check_locality(A, B, F.spectral, kappa, exact=False, compress=C, tol=config.tolerances.exact,
                           check_id=f"locality_free_field[{_tag(F, kappa)}]")
        undeformed = check_locality(A, B, F.spectral, 0.0, exact=False, compress=C)
        r.params.update(K=K, shift=shift, undeformed_commutator=undeformed.params["conclusion_residual"])
        logger.debug("free-field locality K=%d: h=%.3g c=%.3g", K, r.params["hypothesis_residual"],
                     r.params["conclusion_residual"])
        out.append(r)
    return out

def reeh_schlieder(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol, span_tol = config.tolerances.exact, config.tolerances.span
    D = config.model.degree_cap
    out = []
    for F in fock_models(config):
        gens = [creation(F, i) for i in range(F.n_modes)]
        for kappa in config.model.kappas:
            out.append(check_reeh_schlieder(gens, F.spectral, kappa, degree_cap=D, tol=tol, span_tol=span_tol,
                                            check_id=f"reeh_schlieder[{_tag(F, kappa)}]"))
    for kappa in config.model.kappas:
        worst_vac, worst_span = 0.0, 0.0
        for _ in range(5):
            S = random_decomposition(rng, 6, int(rng.integers(2, 4)), physical=True)
            r = check_reeh_schlieder([random_operator(rng, 6)], S, kappa, degree_cap=D, tol=tol, span_tol=span_tol)
            worst_vac = max(worst_vac, r.params["vacuum_residual"])
            worst_span = max(worst_span, r.params["containment_residual"])
        out.append(make_report(f"reeh_schlieder[synthetic,kappa={kappa:g}]", worst_vac, tol,
                               passed=worst_vac < tol and worst_span < span_tol,
                               params={"vacuum_residual": worst_vac, "containment_residual": worst_span}))
    return out

def adjoint_stability(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    for F in fock_models(config):
        gens = [free_field(F, random_amplitudes(rng, F)), creation(F, 0)]
        for kappa in config.model.kappas:
            W = Wedge(mild_poincare(rng, 2), bool(rng.random() < 0.5))
            alg = WedgeAlgebra.build(W, gens, F.spectral, kappa, config.model.degree_cap)
            out.append(check_adjoint_stability(alg, config.tolerances.exact,
                                               f"adjoint_stability[{_tag(F, kappa)}]"))
    return out

def kappa_zero(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """kappa = 0 leaves wedge generators, warped creators and two-particle states untouched."""
    tol = config.tolerances.unit
    out = []
    for F in fock_models(config):
        gens = [free_field(F, random_amplitudes(rng, F)), creation(F, 0), random_operator(rng, F.dim)]
        worst = 0.0
        for _ in range(5):
            W = Wedge(mild_poincare(rng, 2), bool(rng.random() < 0.5))
            worst = max(worst, check_kappa_zero(W, gens, F.spectral, tol).residual)
        Q0 = warp_matrix(0.0, 2)
        for mode in range(F.n_modes):
            a_dag = creation(F, mode)
            worst = max(worst, relative_residual(gl_deformed_creation(F, mode, Q0) - a_dag, a_dag))
        psi1, psi2 = F.one_particle_state(0), F.one_particle_state(F.n_modes - 1)
        plain = creation(F, 0) @ creation(F, F.n_modes - 1) @ F.vacuum()
        worst = max(worst, float(np.abs(deformed_two_particle(F, psi1, psi2, Q0) - plain).max()))
        p, q = F.modes[0].four_momentum, F.modes[-1].four_momentum
        worst = max(worst, abs(sharp_phase(p, q, 0.0, "in").phase - 1.0))
        out.append(make_report(f"kappa_zero[{_tag(F)}]", worst, tol, params={"dim": F.dim}))
    return out

FAMILIES = {
    "gl_coincidence": gl_coincidence,
    "truncated_ccr": truncated_ccr,
    "definition_consistency": definition_consistency,
    "isotony": isotony,
    "assignment_covariance": assignment_covariance,
    "locality_exact": locality_exact,
    "locality_free_field": locality_free_field,
    "reeh_schlieder": reeh_schlieder,
    "adjoint_stability": adjoint_stability,
    "kappa_zero": kappa_zero,
}
