"""Geometry battery: Minkowski arithmetic, wedges and the three warp-matrix facts."""
from __future__ import annotations
from typing import Callable, Dict, List
import logging
import numpy as np
from core.geometry import (PoincareElement, Wedge, causal_complement, check_fact_iii,
                           check_wedge_frame_consistency, metric, minkowski_inner, random_lorentz,
                           random_poincare, sample_forward_cone, sample_wedge_points, standard_wedge,
                           transform_Q, warp_matrix, wedge_equal, wedge_reflector_sample,
                           wedge_stabilizer_sample, wedge_subset)
from core.schema import CheckReport, RunConfig, make_report

logger = logging.getLogger(__name__)

Family = Callable[[RunConfig, np.random.Generator], List[CheckReport]]

def _dims(config: RunConfig) -> List[int]:
    return sorted({2, 3, config.model.dim})

def _lorentz_samples(config: RunConfig) -> int:
    return min(config.battery.random_models, 200)

# -------------------------
# MINKOWSKI ARITHMETIC
# -------------------------
def inner_product_invariance(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    out = []
    for d in _dims(config):
        worst = 0.0
        for _ in range(_lorentz_samples(config)):
            L = random_lorentz(rng, d)
            x, y = rng.normal(size=d), rng.normal(size=d)
            scale = max(1.0, float(np.abs(L.matrix).max()) ** 2)
            worst = max(worst, abs(minkowski_inner(L.apply(x), L.apply(y)) - minkowski_inner(x, y)) / scale)
        out.append(make_report(f"inner_product_invariance[d={d}]", worst, tol, params={"d": d}))
    return out

def poincare_group(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    tol = config.tolerances.exact
    out = []
    for d in _dims(config):
        worst = 0.0
        for _ in range(_lorentz_samples(config)):
            a, b, c = (random_poincare(rng, d) for _ in range(3))
            x = rng.normal(size=d)
            scale = max(1.0, float(np.abs(a.lorentz.matrix).max() * np.abs(b.lorentz.matrix).max()
                                   * np.abs(c.lorentz.matrix).max()))
            assoc = np.abs(((a @ b) @ c).apply(x) - (a @ (b @ c)).apply(x)).max()
            inv = np.abs((a.inverse() @ a).apply(x) - x).max()
            worst = max(worst, float(assoc) / scale, float(inv) / scale)
        out.append(make_report(f"poincare_group[d={d}]", worst, tol, params={"d": d}))
    return out

def skewness(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    for d in _dims(config):
        for kappa in config.model.kappas:
            gQ = metric(d) @ warp_matrix(kappa, d).matrix
            out.append(make_report(f"skewness[d={d},kappa={kappa:g}]", float(np.abs(gQ + gQ.T).max()),
                                   config.tolerances.exact, params={"d": d, "kappa": kappa}))
    return out

# -------------------------
# WEDGES
# -------------------------
def wedge_membership(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """Half-space membership against the representative pull-back, on random wedges."""
    out = []
    n = min(config.battery.fact_samples, 2000)
    for d in _dims(config):
        disagreements = 0
        for _ in range(20):
            W = Wedge(random_poincare(rng, d), bool(d == 2 and rng.random() < 0.5))
            xs = rng.normal(scale=3.0, size=(n // 20, d))
            inside = W.contains_many(xs)
            disagreements += sum(bool(inside[i]) != W.contains_via_representative(x) for i, x in enumerate(xs))
            disagreements += int(np.count_nonzero(~W.contains_many(sample_wedge_points(rng, W, 10))))
        W0 = standard_wedge(d)
        xs = rng.normal(scale=3.0, size=(n, d))
        disagreements += int(np.count_nonzero(W0.contains_many(xs) != (xs[:, 1] >= np.abs(xs[:, 0]))))
        out.append(make_report(f"wedge_membership[d={d}]", float(disagreements), 1.0,
                               params={"d": d, "points": 2 * n, "disagreements": disagreements}))
    return out

def causal_complement_battery(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    for d in _dims(config):
        W0 = standard_wedge(d)
        W0c = causal_complement(W0)
        xs = sample_wedge_points(rng, W0, 500)
        failures = int(np.count_nonzero(~W0c.contains_many(-xs)))
        failures += int(np.count_nonzero(W0c.contains_many(xs[xs[:, 1] > np.abs(xs[:, 0]) + 1e-6])))
        for _ in range(20):
            W = Wedge(random_poincare(rng, d))
            failures += int(not wedge_equal(causal_complement(causal_complement(W)), W))
            # points of W and W' are spacelike separated (or lightlike on the edge)
            a, b = sample_wedge_points(rng, W, 20), sample_wedge_points(rng, causal_complement(W), 20)
            diff = a[:, None, :] - b[None, :, :]
            sep = diff[..., 0] ** 2 - np.sum(diff[..., 1:] ** 2, axis=-1)
            failures += int(np.count_nonzero(sep > 1e-9 * np.maximum(1.0, np.sum(diff ** 2, axis=-1))))
        out.append(make_report(f"causal_complement[d={d}]", float(failures), 1.0,
                               params={"d": d, "failures": failures}))
    return out

def wedge_subset_battery(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    for d in _dims(config):
        W0 = standard_wedge(d)
        errors = 0
        inward = sample_wedge_points(rng, W0, 50)
        errors += sum(not wedge_subset(W0.translate(a), W0) for a in inward)
        outward = inward.copy()
        outward[:, 1] = -np.abs(inward[:, 1]) - 0.5
        errors += sum(wedge_subset(W0.translate(a), W0) for a in outward)
        errors += int(wedge_subset(W0, causal_complement(W0)))
        out.append(make_report(f"wedge_subset[d={d}]", float(errors), 1.0, params={"d": d, "errors": errors}))
    return out

# -------------------------
# WARP-MATRIX FACTS
# -------------------------
def fact_i(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """lambda W0 in W0 forces L Q_kappa L^-1 = Q_kappa."""
    out = []
    for d in _dims(config):
        W0 = standard_wedge(d)
        samples = [wedge_stabilizer_sample(rng, d) for _ in range(_lorentz_samples(config))]
        bad_precondition = sum(not wedge_subset(W0.apply(lam), W0) for lam in samples)
        for kappa in config.model.kappas:
            Q = warp_matrix(kappa, d)
            worst = max(float(np.abs(transform_Q(lam.lorentz, Q).matrix - Q.matrix).max()) for lam in samples)
            out.append(make_report(f"fact_i[d={d},kappa={kappa:g}]", worst, config.tolerances.exact,
                                   params={"d": d, "kappa": kappa, "samples": len(samples),
                                           "precondition_failures": bad_precondition},
                                   passed=worst < config.tolerances.exact and bad_precondition == 0))
    return out

def fact_i_corollary(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    for d in _dims(config):
        for kappa in config.model.kappas:
            worst, frames_equal = 0.0, True
            for _ in range(50):
                lam = PoincareElement(random_lorentz(rng, d, max_rapidity=0.5, factors=2), rng.normal(size=d))
                mu = PoincareElement.pure_lorentz(wedge_stabilizer_sample(rng, d).lorentz)
                ok, r = check_wedge_frame_consistency(lam, lam @ mu, kappa, config.tolerances.exact)
                frames_equal &= np.isfinite(r)
                worst = max(worst, r)
            out.append(make_report(f"fact_i_corollary[d={d},kappa={kappa:g}]", worst, config.tolerances.exact,
                                   params={"d": d, "kappa": kappa},
                                   passed=bool(frames_equal) and worst < config.tolerances.exact))
    return out

def fact_ii(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """lambda' W0 in W0' forces L Q_kappa L^-1 = -Q_kappa (d >= 3)."""
    out = []
    for d in (d for d in _dims(config) if d >= 3):
        W0 = standard_wedge(d)
        samples = [wedge_reflector_sample(rng, d) for _ in range(_lorentz_samples(config))]
        bad_precondition = sum(not wedge_subset(W0.apply(lam), causal_complement(W0)) for lam in samples)
        for kappa in config.model.kappas:
            Q = warp_matrix(kappa, d)
            worst = max(float(np.abs(transform_Q(lam.lorentz, Q).matrix + Q.matrix).max()) for lam in samples)
            out.append(make_report(f"fact_ii[d={d},kappa={kappa:g}]", worst, config.tolerances.exact,
                                   params={"d": d, "kappa": kappa, "samples": len(samples),
                                           "precondition_failures": bad_precondition},
                                   passed=worst < config.tolerances.exact and bad_precondition == 0))
    return out

def fact_iii(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    out = []
    for d in _dims(config):
        for kappa in config.model.kappas:
            if kappa <= 0:
                out.append(make_report(f"fact_iii[d={d},kappa={kappa:g}]", 0.0, config.tolerances.sampling,
                                       params={"d": d, "kappa": kappa}, notes="kappa = 0: Q V+ = {0}, skipped"))
                continue
            out.append(check_fact_iii(kappa, d, config.battery.fact_samples, rng,
                                      config.battery.surjectivity_samples, config.tolerances.sampling))
    return out

def shifted_complement(config: RunConfig, rng: np.random.Generator) -> List[CheckReport]:
    """W0 + Q_kappa p in W0 for p in V+, hence W0' in (W0 + Q_kappa p)'."""
    out = []
    for d in _dims(config):
        W0 = standard_wedge(d)
        W0c = causal_complement(W0)
        for kappa in config.model.kappas:
            Q = warp_matrix(kappa, d)
            ps = sample_forward_cone(rng, d, 200)
            failures = sum(not wedge_subset(W0.translate(Q.apply(p)), W0) for p in ps)
            failures += sum(not wedge_subset(W0c, causal_complement(W0.translate(Q.apply(p)))) for p in ps)
            out.append(make_report(f"shifted_complement[d={d},kappa={kappa:g}]", float(failures), 1.0,
                                   params={"d": d, "kappa": kappa, "samples": len(ps), "failures": failures}))
    return out

FAMILIES: Dict[str, Family] = {
    "inner_product_invariance": inner_product_invariance,
    "poincare_group": poincare_group,
    "skewness": skewness,
    "wedge_membership": wedge_membership,
    "causal_complement": causal_complement_battery,
    "wedge_subset": wedge_subset_battery,
    "fact_i": fact_i,
    "fact_i_corollary": fact_i_corollary,
    "fact_ii": fact_ii,
    "fact_iii": fact_iii,
    "shifted_complement": shifted_complement,
}
