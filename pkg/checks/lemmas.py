"""Lemma battery: randomized finite models for the identities of the warp engine."""
from __future__ import annotations
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List
import logging
import numpy as np
from core.geometry import LorentzTransform, PoincareElement, SkewWarpMatrix, random_skew
from core.schema import CheckReport, RunConfig, make_report
from core.spectral import (ExtendedRep, LorentzAction, SpectralDecomposition, check_adjoint, check_commutation,
                           check_composition, check_covariance, check_left_right, check_spectral_calculus,
                           check_vacuum_fixed_point, random_decomposition, random_momenta, random_operator,
                           random_unitary, relative_residual, warped_sum)
from core.wedge_algebra import tensor_split_model
from report_utils import rng_for

logger = logging.getLogger(__name__)

@dataclass(eq=False)
class RandomModel:
    spectral: SpectralDecomposition
    Q: SkewWarpMatrix
    F: np.ndarray

def model_battery(config: RunConfig) -> List[RandomModel]:
    """The shared battery; seeded independently of the family so every lemma sees the same models."""
    return _battery(config.seed, config.battery.random_models, config.battery.max_model_dim)

@lru_cache(maxsize=4)
def _battery(seed: int, count: int, max_dim: int) -> List[RandomModel]:
    rng = rng_for(seed, "lemmas", "battery")
    out = []
    for _ in range(count):
        n = int(rng.integers(2, max_dim + 1))
        d = int(rng.integers(2, 5))
        S = random_decomposition(rng, n, d)
        out.append(RandomModel(S, random_skew(rng, d), random_operator(rng, n)))
    return out

def _aggregate(check_id: str, reports: List[CheckReport], tol: float, **params) -> CheckReport:
    worst = max(reports, key=lambda r: r.residual)
    failures = sum(not r.passed for r in reports)
    return make_report(check_id, worst.residual, tol, passed=failures == 0,
                       params={"instances": len(reports), "failures": failures,
                               "worst_index": reports.index(worst), **params})

# -------------------------
# BATTERIES
# -------------------------
def left_right(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    battery = model_battery(config)
    tol = config.tolerances.exact
    reports = [check_left_right(m.spectral, m.Q, m.F, tol) for m in battery]
    return [_aggregate(f"left_right[models={len(battery)}]", reports, tol,
                       max_dim=max(m.spectral.dim for m in battery))]

def left_right_negative(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """A non-skew Q must separate the two integration orders in most trials."""
    battery = model_battery(config)
    separated = 0
    for m in battery:
        d = m.spectral.spacetime_dim
        Q = rng.normal(size=(d, d))
        left = warped_sum(m.spectral, Q, m.F, "left")
        right = warped_sum(m.spectral, Q, m.F, "right")
        separated += relative_residual(left - right, m.F) > 1e-3
    fraction = separated / len(battery)
    target = config.battery.negative_control_fraction
    return [make_report(f"left_right_negative[models={len(battery)}]", 1.0 - fraction, 1.0 - target,
                        passed=fraction >= target, params={"separated_fraction": fraction, "required": target},
                        notes="non-skew control")]

def adjoint(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    battery = model_battery(config)
    tol = config.tolerances.exact
    reports = [check_adjoint(m.spectral, m.Q, m.F, tol) for m in battery]
    return [_aggregate(f"adjoint[models={len(battery)}]", reports, tol)]

def composition(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    battery = model_battery(config)
    tol = config.tolerances.exact
    reports = [check_composition(m.spectral, m.Q, random_skew(rng, m.spectral.spacetime_dim), m.F, tol)
               for m in battery]
    return [_aggregate(f"composition[models={len(battery)}]", reports, tol)]

def commutation(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """Tensor-split instances, where the spectral hypothesis holds exactly."""
    tol = config.tolerances.exact
    reports = []
    for _ in range(config.battery.commutation_instances):
        d = int(rng.integers(2, 4))
        a, b = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        _, _, S = tensor_split_model(rng, d, a, b)
        F = np.kron(random_operator(rng, a), np.eye(b))
        G = np.kron(np.eye(a), random_operator(rng, b))
        reports.append(check_commutation(S, random_skew(rng, d), F, G, tol))
    out = [_aggregate(f"commutation[instances={len(reports)}]", reports, tol,
                      max_hypothesis_residual=max(r.params["hypothesis_residual"] for r in reports))]
    return out

def commutation_control(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """A generic 3x3 model violates the hypothesis; the check must say so rather than pass."""
    S = random_decomposition(rng, 3, 2, k=3)
    r = check_commutation(S, random_skew(rng, 2), random_operator(rng, 3), random_operator(rng, 3),
                          config.tolerances.exact)
    flagged = r.params.get("failure") == "hypothesis"
    return [make_report("commutation_control[dim=3]", r.residual, config.tolerances.exact, passed=flagged,
                        params=r.params, notes="counterexample: hypothesis expected to fail")]

def rotation_closed_rep(rng: np.random.Generator, order: int, seeds: int) -> ExtendedRep:
    """d = 3 spectrum made of orbits of the rotation by 2 pi / order; V permutes the orbit columns."""
    R = LorentzTransform.rotation(3, 2 * np.pi / order, 1, 2)
    pts = [np.zeros(3)]
    for p in random_momenta(rng, seeds, 3):
        for _ in range(order):
            pts.append(p)
            p = R.apply(p)
    n = len(pts)
    perm = np.zeros((n, n))
    perm[0, 0] = 1.0
    for s in range(seeds):
        for j in range(order):
            perm[1 + s * order + (j + 1) % order, 1 + s * order + j] = 1.0
    B = random_unitary(rng, n)
    S = SpectralDecomposition(np.array(pts), B, np.arange(n))
    V = B @ perm @ B.conj().T
    return ExtendedRep(S, [LorentzAction(R, V, S)])

def covariance_rotation(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    reports = []
    for _ in range(config.battery.covariance_instances):
        rep = rotation_closed_rep(rng, int(rng.integers(2, 5)), int(rng.integers(1, 4)))
        lam = PoincareElement(rep.actions[0].lorentz, rng.normal(size=3))
        reports.append(check_covariance(rep, random_skew(rng, 3), random_operator(rng, rep.base.dim), lam, tol))
    return [_aggregate(f"covariance_rotation[d=3,instances={len(reports)}]", reports, tol)]

def boost_pair_rep(rng: np.random.Generator, n: int, rapidity: float) -> ExtendedRep:
    """d = 2 boost between two models: the image carries the boosted momenta in a rotated basis."""
    S = random_decomposition(rng, n, 2, physical=True)
    L = LorentzTransform.boost(2, rapidity)
    V = random_unitary(rng, n)
    image = SpectralDecomposition(S.momenta @ L.matrix.T, V @ S.basis, S.labels, physical=True)
    return ExtendedRep(S, [LorentzAction(L, V, image)])

def covariance_boost(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    reports = []
    for _ in range(config.battery.covariance_instances):
        n = int(rng.integers(2, 12))
        rep = boost_pair_rep(rng, n, rng.uniform(-1.5, 1.5))
        lam = PoincareElement(rep.actions[0].lorentz, rng.normal(size=2))
        reports.append(check_covariance(rep, random_skew(rng, 2), random_operator(rng, n), lam, tol))
    return [_aggregate(f"covariance_boost[d=2,instances={len(reports)}]", reports, tol)]

def vacuum_fixed_point(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    reports = []
    for _ in range(20):
        n, d = int(rng.integers(2, 30)), int(rng.integers(2, 5))
        S = random_decomposition(rng, n, d, physical=True)
        reports.append(check_vacuum_fixed_point(S, random_skew(rng, d), random_operator(rng, n), tol))
    return [_aggregate(f"vacuum_fixed_point[instances={len(reports)}]", reports, tol)]

def spectral_calculus(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    reports = []
    for _ in range(20):
        n, d = int(rng.integers(2, 30)), int(rng.integers(2, 5))
        S = random_decomposition(rng, n, d)
        x = rng.normal(size=d)
        reports.append(check_spectral_calculus(S, lambda p: np.exp(1j * (p[0] * x[0] - p[1:] @ x[1:])), tol))
    return [_aggregate(f"spectral_calculus[instances={len(reports)}]", reports, tol)]

FAMILIES: Dict[str, object] = {
    "left_right": left_right,
    "left_right_negative": left_right_negative,
    "adjoint": adjoint,
    "composition": composition,
    "commutation": commutation,
    "commutation_control": commutation_control,
    "covariance_rotation": covariance_rotation,
    "covariance_boost": covariance_boost,
    "vacuum_fixed_point": vacuum_fixed_point,
    "spectral_calculus": spectral_calculus,
}
