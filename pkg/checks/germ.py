"""Germ battery: conditions (a) and (b) on the mirror model."""
from __future__ import annotations
from typing import List
import numpy as np
from core.geometry import PoincareElement, pi_rotation, sample_wedge_points, standard_wedge, causal_complement
from core.schema import CheckReport, RunConfig, make_report
from core.wedge_algebra import deform_for_wedge, matrix_units, mirror_model, validate_germ

def _elements(rng: np.random.Generator, n: int = 5):
    """Translations into W0 preserve it; (R_pi, a') with a' in W0' reflect it."""
    W0 = standard_wedge(3)
    preserving = [PoincareElement.pure_translation(a) for a in sample_wedge_points(rng, W0, n)]
    R = pi_rotation(3)
    reflecting = [PoincareElement(R, a) for a in sample_wedge_points(rng, causal_complement(W0), n)]
    return preserving, reflecting

def germ(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """Deformed matrix units of the first factor, localized in W0."""
    out = []
    mm = mirror_model(rng, 2)
    W0 = standard_wedge(3)
    preserving, reflecting = _elements(rng)
    for kappa in config.model.kappas:
        gens = [deform_for_wedge(W0, mm.left(E), mm.spectral, kappa) for E in matrix_units(mm.side_dim)]
        out.append(validate_germ(gens, mm.spectral, preserving, reflecting, config.model.degree_cap, mm.rep,
                                 config.tolerances.span, f"germ[mirror,d=3,kappa={kappa:g}]"))
    return out

def germ_full_algebra(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """All of B(H) is stable under translations but not local: (a) must hold and (b) fail."""
    mm = mirror_model(rng, 2)
    preserving, reflecting = _elements(rng)
    n = mm.spectral.dim
    r = validate_germ(matrix_units(n), mm.spectral, preserving, reflecting, 1, mm.rep, config.tolerances.span,
                      "germ_full_algebra[mirror,d=3]")
    expected = bool(r.params["condition_a_passed"]) and not r.params["condition_b_passed"]
    return [make_report("germ_full_algebra[mirror,d=3]", r.params["condition_b_residual"], config.tolerances.span,
                        passed=expected, params=r.params, notes="control: condition (b) expected to fail")]

def germ_empty(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    mm = mirror_model(rng, 2)
    return [validate_germ([], mm.spectral, [], [], check_id="germ_empty[mirror,d=3]")]

FAMILIES = {
    "germ": germ,
    "germ_full_algebra": germ_full_algebra,
    "germ_empty": germ_empty,
}
