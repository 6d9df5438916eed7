"""Scattering battery: two-particle phases, Lorentz breaking and the Hepp construction."""
from __future__ import annotations
from typing import List, Tuple
import logging
import numpy as np
from checks.models import fock_model, fock_models
from core.errors import PrecedenceError
from core.fock import TruncatedFockSpace, creation
from core.geometry import random_lorentz, warp_matrix
from core.scattering import (HeppPacketSpec, VelocitySupport, cesaro_convergence_demo, check_hepp_shell,
                             check_sign_lemma, deformed_two_particle, lorentz_breaking_witness, phase_table,
                             precedes, reference_packets, rotation_witness_scan, s_kernel_ratio, s_matrix_element,
                             sharp_phase)
from core.schema import CheckReport, PhaseRow, RunConfig, make_report

logger = logging.getLogger(__name__)

# d = 3 pair whose rotation scan peaks at pi/4 with witness (2 - sqrt 2) kappa
WITNESS_PAIR = (np.array([np.sqrt(2.0), 1.0, 0.0]), np.array([np.sqrt(2.0), 0.0, 1.0]))

def _tag(F: TruncatedFockSpace, kappa=None) -> str:
    base = f"d={F.spacetime_dim},dim={F.dim}"
    return base if kappa is None else f"{base},kappa={kappa:g}"

def _in_pairs(F: TruncatedFockSpace) -> List[Tuple[int, int]]:
    """(p, q) mode pairs with q's velocity strictly preceding p's."""
    return [(a, b) for a, mp in enumerate(F.modes) for b, mq in enumerate(F.modes)
            if precedes(VelocitySupport(mq.velocity), VelocitySupport(mp.velocity))]

def _plain_pair(F: TruncatedFockSpace, a: int, b: int) -> np.ndarray:
    return creation(F, a) @ creation(F, b) @ F.vacuum()

def _shell_momenta(rng: np.random.Generator, d: int, n: int, mass: float = 1.0, spread: float = 2.0) -> np.ndarray:
    k = rng.normal(scale=spread, size=(n, d - 1))
    return np.column_stack([np.sqrt(np.sum(k ** 2, axis=1) + mass ** 2), k])

# -------------------------
# SHARP-MOMENTUM PHASES
# -------------------------
def sharp_phase_equivalence(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    out = []
    for F in fock_models(config):
        pairs = _in_pairs(F)
        for kappa in config.model.kappas:
            Q = warp_matrix(kappa, 2)
            worst = 0.0
            for a, b in pairs:
                p, q = F.modes[a].four_momentum, F.modes[b].four_momentum
                state = deformed_two_particle(F, F.one_particle_state(a), F.one_particle_state(b), Q, "in")
                expected = sharp_phase(p, q, kappa, "in", mass=F.mass).phase * _plain_pair(F, a, b)
                worst = max(worst, float(np.abs(state - expected).max()))
            out.append(make_report(f"sharp_phase_equivalence[{_tag(F, kappa)}]", worst, tol,
                                   params={"pairs": len(pairs), "kappa": kappa}))
    # reference pair p = (sqrt 2, -1), q = (sqrt 2, 1): |pQq| = 2 sqrt(2) kappa
    F = fock_model(config)
    a, b = F.mode_of_spatial((-1.0,)), F.mode_of_spatial((1.0,))
    if a is not None and b is not None:
        for kappa in config.model.kappas:
            ph = sharp_phase(F.modes[a].four_momentum, F.modes[b].four_momentum, kappa, "in")
            expected = np.exp(2j * np.sqrt(2.0) * kappa)
            out.append(make_report(f"sharp_phase_equivalence[reference,kappa={kappa:g}]",
                                   abs(ph.phase - expected), config.tolerances.phase,
                                   params={"angle": ph.angle, "expected_angle": 2 * np.sqrt(2.0) * kappa}))
    return out

def out_in_conjugation(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    out = []
    for F in fock_models(config):
        pairs = _in_pairs(F)
        for kappa in config.model.kappas:
            Q = warp_matrix(kappa, 2)
            worst = 0.0
            for a, b in pairs:
                p, q = F.modes[a].four_momentum, F.modes[b].four_momentum
                # out: the faster particle comes first
                state = deformed_two_particle(F, F.one_particle_state(b), F.one_particle_state(a), Q, "out")
                ph_out = sharp_phase(p, q, kappa, "out", mass=F.mass).phase
                ph_in = sharp_phase(p, q, kappa, "in", mass=F.mass).phase
                worst = max(worst, float(np.abs(state - ph_out * _plain_pair(F, a, b)).max()),
                            abs(ph_out - np.conj(ph_in)))
            out.append(make_report(f"out_in_conjugation[{_tag(F, kappa)}]", worst, tol,
                                   params={"pairs": len(pairs), "kappa": kappa}))
    return out

def sign_lemma(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    for F in fock_models(config) + [fock_model(config, 1, d=3)]:
        for kappa in config.model.kappas:
            out.append(check_sign_lemma(F, kappa, f"sign_lemma[{_tag(F, kappa)}]"))
    return out

def kernel_ratio_modulus(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.unit
    out = []
    for d in (2, 3):
        for kappa in config.model.kappas:
            moms = _shell_momenta(rng, d, 4 * 50)
            worst = max(abs(abs(s_kernel_ratio(*moms[4 * i:4 * i + 4], kappa)) - 1.0) for i in range(50))
            out.append(make_report(f"kernel_ratio_modulus[d={d},kappa={kappa:g}]", worst, tol,
                                   params={"instances": 50, "kappa": kappa}))
    return out

def s_matrix_crosscheck(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """<out|in> on the lattice against the kernel relation e^{2i|pQq|}."""
    tol = config.tolerances.exact
    out = []
    for F in fock_models(config):
        pairs = _in_pairs(F)
        for kappa in config.model.kappas:
            worst = 0.0
            for a, b in pairs:
                p, q = F.modes[a].four_momentum, F.modes[b].four_momentum
                worst = max(worst, abs(s_matrix_element(F, a, b, kappa) - s_kernel_ratio(p, q, p, q, kappa)))
            out.append(make_report(f"s_matrix_crosscheck[{_tag(F, kappa)}]", worst, tol,
                                   params={"pairs": len(pairs), "kappa": kappa}))
    return out

# -------------------------
# LORENTZ BREAKING
# -------------------------
def lorentz_breaking(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    p, q = WITNESS_PAIR
    for kappa in config.model.kappas:
        best, angle = rotation_witness_scan(p, q, kappa)
        expected = (2.0 - np.sqrt(2.0)) * kappa
        residual = max(abs(best - expected), abs(angle - np.pi / 4))
        params = {"max_witness": best, "expected": expected, "angle": angle, "kappa": kappa}
        if kappa == 0:
            out.append(make_report(f"lorentz_breaking[reference,kappa={kappa:g}]", residual,
                                   config.tolerances.phase, params=params,
                                   passed=best < config.tolerances.exact,
                                   notes="kappa = 0: no breaking expected"))
            continue
        out.append(make_report(f"lorentz_breaking[reference,kappa={kappa:g}]", residual, config.tolerances.phase,
                               params=params, passed=residual < config.tolerances.phase and best > 0.1 * kappa))
    F = fock_model(config, 1, d=3)
    pairs = _in_pairs(F)
    for kappa in config.model.kappas:
        if kappa == 0:
            continue
        best = max(rotation_witness_scan(F.modes[a].four_momentum, F.modes[b].four_momentum, kappa)[0]
                   for a, b in pairs)
        # residual is the shortfall below the 0.1 kappa threshold
        out.append(make_report(f"lorentz_breaking[{_tag(F, kappa)}]", max(0.0, 0.1 * kappa - best),
                               config.tolerances.exact, passed=best > 0.1 * kappa,
                               params={"max_witness": best, "threshold": 0.1 * kappa, "pairs": len(pairs)}))
    return out

def lorentz_breaking_d2(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """In d = 2, pQq is boost invariant, so the witness vanishes."""
    tol = config.tolerances.exact
    out = []
    for kappa in config.model.kappas:
        moms = _shell_momenta(rng, 2, 100)
        worst = 0.0
        for i in range(50):
            L = random_lorentz(rng, 2, max_rapidity=0.5, factors=2)
            p, q = moms[2 * i], moms[2 * i + 1]
            scale = max(1.0, float(np.abs(L.matrix).max()) ** 2 * float(p[0] * q[0]))
            worst = max(worst, lorentz_breaking_witness(p, q, L, kappa) / scale)
        out.append(make_report(f"lorentz_breaking_d2[kappa={kappa:g}]", worst, tol,
                               params={"instances": 50, "kappa": kappa}))
    return out

# -------------------------
# HEPP CONSTRUCTION
# -------------------------
def hepp_shell(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    times = [0.0] + list(config.battery.cesaro_times)
    for F in fock_models(config):
        f, f_prime, A = reference_packets(F)
        for name, amps in (("f", f), ("f_prime", f_prime), ("spread", np.ones(F.n_modes))):
            out.append(check_hepp_shell(F, A, HeppPacketSpec(amps), times, config.tolerances.exact,
                                        f"hepp_shell[{_tag(F)},packet={name}]"))
    return out

def cesaro(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """Averaged two-particle vectors against their limit; reported, not asserted."""
    out = []
    T_grid = list(config.battery.cesaro_times)
    for F in fock_models(config):
        f, f_prime, A = reference_packets(F)
        for kappa in config.model.kappas:
            for direction, (g, g_prime) in (("in", (f, f_prime)), ("out", (f_prime, f))):
                check_id = f"cesaro[{_tag(F, kappa)},direction={direction}]"
                try:
                    demo = cesaro_convergence_demo(F, A, A, g, g_prime, kappa, T_grid, direction)
                except PrecedenceError as err:
                    logger.warning("%s: %s", check_id, err)
                    out.append(make_report(check_id, float("inf"), config.tolerances.span, passed=False,
                                           hard=False, notes=str(err)))
                    continue
                dev = demo.table["deviation"].tolist()
                shrinking = demo.shrinking(config.tolerances.exact)
                out.append(make_report(check_id, demo.target_residual, config.tolerances.span,
                                       passed=demo.target_residual < config.tolerances.span and shrinking,
                                       hard=False,
                                       params={"T": T_grid, "deviation": dev, "shrinking": shrinking, **demo.meta},
                                       notes="finite-T averages; limit compared with the deformed two-particle state"))
    return out

def phase_rows(config: RunConfig) -> List[PhaseRow]:
    rows: List[PhaseRow] = []
    F = fock_model(config)
    for kappa in config.model.kappas:
        rows.extend(phase_table(F, kappa, witness_pairs=[WITNESS_PAIR]))
    return rows

FAMILIES = {
    "sharp_phase_equivalence": sharp_phase_equivalence,
    "out_in_conjugation": out_in_conjugation,
    "sign_lemma": sign_lemma,
    "kernel_ratio_modulus": kernel_ratio_modulus,
    "s_matrix_crosscheck": s_matrix_crosscheck,
    "lorentz_breaking": lorentz_breaking,
    "lorentz_breaking_d2": lorentz_breaking_d2,
    "hepp_shell": hepp_shell,
    "cesaro": cesaro,
}
