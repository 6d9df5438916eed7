"""Deformed wedge algebras A_kappa(W) and the net properties they are checked against.

Algebra membership is tested as membership in the linear span of generator
monomials up to a degree cap D, with a least-squares residual.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional, Sequence, Tuple
import logging
import numpy as np
from core.errors import PreconditionError
from core.geometry import (PoincareElement, SkewWarpMatrix, Wedge, pi_rotation,
                           causal_complement, same_direction, standard_wedge, transform_Q, warp_matrix,
                           wedge_equal, wedge_subset)
from core.schema import CheckReport, make_report
from core.spectral import (ExtendedRep, LorentzAction, OperatorMatrix, SpectralDecomposition, as_operator,
                           commutator, hypothesis_scan, opnorm, random_momenta, random_unitary,
                           relative_residual, tensor_product, warp)

logger = logging.getLogger(__name__)

TOL = 1e-12
SPAN_TOL = 1e-10
MAX_MONOMIALS = 5000

# -------------------------
# WARP MATRIX PER WEDGE
# -------------------------
def warp_matrix_for_wedge(W: Wedge, kappa: float) -> SkewWarpMatrix:
    """Lambda Q_kappa Lambda^-1 for W = lambda W0; d = 2 left wedges get -Q_kappa (conjugated likewise)."""
    Q = transform_Q(W.lorentz, warp_matrix(kappa, W.dim))
    return -Q if W.is_left_class else Q

def deform_for_wedge(W: Wedge, A, S: SpectralDecomposition, kappa: float) -> OperatorMatrix:
    if not S.physical:
        raise PreconditionError("deformed wedge algebras need a physical decomposition")
    return warp(S, warp_matrix_for_wedge(W, kappa), A)

def close_under_adjoint(generators: Sequence[np.ndarray], tol: float = TOL) -> List[OperatorMatrix]:
    out = [as_operator(g) for g in generators]
    for g in list(out):
        gs = g.conj().T
        if not any(relative_residual(gs - h, h) < tol for h in out):
            out.append(gs)
    return out

@dataclass(eq=False)
class WedgeAlgebra:
    wedge: Wedge
    generators: List[OperatorMatrix]
    warp_matrix: SkewWarpMatrix
    spectral: SpectralDecomposition
    degree_cap: int = 3
    deformed: List[OperatorMatrix] = field(default_factory=list, repr=False)

    @classmethod
    def build(cls, W: Wedge, generators: Sequence[np.ndarray], S: SpectralDecomposition, kappa: float,
              degree_cap: int = 3) -> "WedgeAlgebra":
        gens = close_under_adjoint([as_operator(g, S.dim) for g in generators])
        Q = warp_matrix_for_wedge(W, kappa)
        if not S.physical:
            raise PreconditionError("deformed wedge algebras need a physical decomposition")
        return cls(W, gens, Q, S, degree_cap, [warp(S, Q, g) for g in gens])

    def monomials(self, deformed: bool = True) -> List[OperatorMatrix]:
        return monomials(self.deformed if deformed else self.generators, self.degree_cap)

    def span_residual(self, X) -> Tuple[float, float]:
        return span_residual(X, self.monomials())

# -------------------------
# MONOMIAL SPANS
# -------------------------
def monomials(generators: Sequence[np.ndarray], degree_cap: int) -> List[OperatorMatrix]:
    """1 and every word of length 1..D in the generators."""
    gens = [np.asarray(g, dtype=complex) for g in generators]
    n = gens[0].shape[0] if gens else 0
    count = sum(len(gens) ** k for k in range(degree_cap + 1))
    if count > MAX_MONOMIALS:
        raise PreconditionError(f"{count} monomials exceed the limit {MAX_MONOMIALS}; lower the degree cap")
    out = [np.eye(n, dtype=complex)]
    layer = [np.eye(n, dtype=complex)]
    for _ in range(degree_cap):
        layer = [w @ g for w, g in product(layer, gens)]
        out.extend(layer)
    return out

def span_residual(target, spanning: Sequence[np.ndarray]) -> Tuple[float, float]:
    """(relative least-squares residual of ``target`` in span(spanning), condition number of the span)."""
    t = np.asarray(target, dtype=complex).ravel()
    if not spanning:
        return float(np.linalg.norm(t)) / max(1.0, float(np.linalg.norm(t))), float("inf")
    M = np.column_stack([np.asarray(s, dtype=complex).ravel() for s in spanning])
    y, _, rank, sv = np.linalg.lstsq(M, t, rcond=None)
    r = float(np.linalg.norm(M @ y - t)) / max(1.0, float(np.linalg.norm(t)))
    kept = sv[sv > sv[0] * max(M.shape) * np.finfo(float).eps] if sv.size else sv
    cond = float(kept[0] / kept[-1]) if kept.size else float("inf")
    return r, cond

def vector_span_residual(target, spanning: Sequence[np.ndarray]) -> float:
    t = np.asarray(target, dtype=complex)
    if not spanning:
        return float(np.linalg.norm(t))
    M = np.column_stack(spanning)
    y, *_ = np.linalg.lstsq(M, t, rcond=None)
    return float(np.linalg.norm(M @ y - t)) / max(1.0, float(np.linalg.norm(t)))

# -------------------------
# NET PROPERTIES
# -------------------------
def check_definition_consistency(W: Wedge, A, S: SpectralDecomposition, kappa: float, alt: PoincareElement,
                                 tol: float = TOL, check_id: str = "definition_consistency") -> CheckReport:
    if not wedge_equal(Wedge(alt, W.is_left_class), W):
        raise PreconditionError("alt does not map the standard wedge onto W")
    lhs = deform_for_wedge(W, A, S, kappa)
    rhs = deform_for_wedge(Wedge(alt, W.is_left_class), A, S, kappa)
    return make_report(check_id, relative_residual(lhs - rhs, A), tol,
                       params={"dim": S.dim, "kappa": kappa, "alt_lorentz": alt.lorentz.matrix})

def check_isotony(W1: Wedge, W2: Wedge, gens1: Sequence[np.ndarray], gens2: Sequence[np.ndarray],
                  S: SpectralDecomposition, kappa: float, degree_cap: int = 3, tol: float = SPAN_TOL,
                  check_id: str = "isotony") -> CheckReport:
    if not wedge_subset(W1, W2):
        raise PreconditionError("W1 is not contained in W2")
    if not same_direction(W1, W2):
        raise PreconditionError("W1 and W2 must differ by a pure translation")
    small = WedgeAlgebra.build(W1, gens1, S, kappa, degree_cap)
    big = WedgeAlgebra.build(W2, gens2, S, kappa, degree_cap)
    span = big.monomials()
    worst, cond = 0.0, 1.0
    for X in small.deformed:
        r, c = span_residual(X, span)
        worst, cond = max(worst, r), max(cond, c)
    warp_gap = float(np.abs(small.warp_matrix.matrix - big.warp_matrix.matrix).max())
    return make_report(check_id, max(worst, warp_gap), tol,
                       params={"dim": S.dim, "kappa": kappa, "degree_cap": degree_cap, "monomials": len(span),
                               "condition_number": cond, "warp_matrix_gap": warp_gap})

def check_locality(A_gens: Sequence[np.ndarray], B_gens: Sequence[np.ndarray], S: SpectralDecomposition,
                   kappa: float, exact: bool = True, compress: Optional[np.ndarray] = None, tol: float = TOL,
                   check_id: str = "locality") -> CheckReport:
    """A attached to W0 (warped with Q_kappa), B to W0' (warped with -Q_kappa).

    Stage one scans the spectral hypothesis (h), stage two measures the deformed commutator (c).
    Approximate instances (``exact=False``) are reported as soft results.
    """
    Q = warp_matrix(kappa, S.spacetime_dim)
    C = np.eye(S.dim) if compress is None else np.asarray(compress)
    h, c = 0.0, 0.0
    for A in A_gens:
        AQ = warp(S, Q, A)
        for B in B_gens:
            scale = max(1.0, opnorm(A) * opnorm(B))
            h = max(h, hypothesis_scan(S, Q, A, B, compress=compress))
            c = max(c, opnorm(commutator(AQ, warp(S, -Q, B)) @ C) / scale)
    params = {"dim": S.dim, "kappa": kappa, "hypothesis_residual": h, "conclusion_residual": c,
              "pairs": len(A_gens) * len(B_gens)}
    if not exact:
        return make_report(check_id, c, tol, params=params, passed=True, hard=False,
                           notes="approximate wedge localization; reported, not asserted")
    if h >= tol:
        params["failure"] = "hypothesis"
        return make_report(check_id, h, tol, params=params, passed=False,
                           notes="spectral hypothesis fails on an instance declared exact")
    return make_report(check_id, c, tol, params=params)

def check_reeh_schlieder(A_gens: Sequence[np.ndarray], S: SpectralDecomposition, kappa: float,
                         W: Optional[Wedge] = None, degree_cap: int = 3, tol: float = TOL,
                         span_tol: float = SPAN_TOL, check_id: str = "reeh_schlieder") -> CheckReport:
    """A_Q Omega = A Omega, and the deformed cyclic subspace contains the undeformed one."""
    W = W or standard_wedge(S.spacetime_dim)
    alg = WedgeAlgebra.build(W, A_gens, S, kappa, degree_cap)
    omega = S.vacuum
    vac = max((float(np.linalg.norm(X @ omega - A @ omega)) / max(1.0, opnorm(A))
               for A, X in zip(alg.generators, alg.deformed)), default=0.0)
    deformed_vectors = [M @ omega for M in alg.monomials(deformed=True)]
    contain = max((vector_span_residual(M @ omega, deformed_vectors) for M in alg.monomials(deformed=False)),
                  default=0.0)
    params = {"dim": S.dim, "kappa": kappa, "vacuum_residual": vac, "containment_residual": contain,
              "degree_cap": degree_cap}
    return make_report(check_id, vac, tol, params=params, passed=vac < tol and contain < span_tol)

def check_assignment_covariance(W: Wedge, A, R: ExtendedRep, kappa: float, lam: PoincareElement,
                                tol: float = TOL, check_id: str = "assignment_covariance") -> CheckReport:
    """U(lambda) A_kappa(W) U(lambda)^-1 = A_kappa(lambda W) at the generator level."""
    U, image = R.unitary(lam)
    lhs = U @ deform_for_wedge(W, A, R.base, kappa) @ U.conj().T
    rhs = deform_for_wedge(W.apply(lam), U @ as_operator(A, R.base.dim) @ U.conj().T, image, kappa)
    return make_report(check_id, relative_residual(lhs - rhs, A), tol,
                       params={"dim": R.base.dim, "kappa": kappa, "translation": lam.translation,
                               "lorentz": lam.lorentz.matrix})

def check_adjoint_stability(alg: WedgeAlgebra, tol: float = TOL,
                            check_id: str = "adjoint_stability") -> CheckReport:
    worst = 0.0
    for X in alg.deformed:
        Xs = X.conj().T
        worst = max(worst, min(relative_residual(Xs - Y, X) for Y in alg.deformed))
    return make_report(check_id, worst, tol, params={"dim": alg.spectral.dim, "generators": len(alg.deformed)})

def check_kappa_zero(W: Wedge, gens: Sequence[np.ndarray], S: SpectralDecomposition, tol: float = 1e-14,
                     check_id: str = "kappa_zero") -> CheckReport:
    worst = max((relative_residual(deform_for_wedge(W, A, S, 0.0) - A, A) for A in gens), default=0.0)
    return make_report(check_id, worst, tol, params={"dim": S.dim, "generators": len(gens)})

# -------------------------
# GERM CONDITIONS
# -------------------------
def validate_germ(G_gens: Sequence[np.ndarray], S: SpectralDecomposition,
                  wedge_preserving: Sequence[PoincareElement], wedge_reflecting: Sequence[PoincareElement],
                  degree_cap: int = 3, rep: Optional[ExtendedRep] = None, tol: float = SPAN_TOL,
                  check_id: str = "germ") -> CheckReport:
    """(a) alpha_lambda(G) in G for lambda W0 in W0; (b) alpha_lambda'(G) in G' for lambda' W0 in W0'."""
    d = S.spacetime_dim
    W0 = standard_wedge(d)
    W0c = causal_complement(W0)
    for lam in wedge_preserving:
        if not wedge_subset(W0.apply(lam), W0):
            raise PreconditionError("a wedge-preserving element does not map W0 into W0")
    for lam in wedge_reflecting:
        if not wedge_subset(W0.apply(lam), W0c):
            raise PreconditionError("a wedge-reflecting element does not map W0 into W0'")
    rep = rep or ExtendedRep(S)
    gens = [as_operator(g, S.dim) for g in G_gens]
    params = {"dim": S.dim, "generators": len(gens), "degree_cap": degree_cap,
              "wedge_preserving": len(wedge_preserving), "wedge_reflecting": len(wedge_reflecting)}
    if not gens or (not wedge_preserving and not wedge_reflecting):
        logger.warning("germ check %s is vacuous: no generators or no Poincare elements", check_id)
        return make_report(check_id, 0.0, tol, params=params, passed=True, notes="vacuous")

    def _alpha(lam: PoincareElement, X: np.ndarray) -> np.ndarray:
        U, image = rep.unitary(lam)
        if image is not S:
            raise PreconditionError("germ checks need Poincare unitaries acting on the germ's own space")
        return U @ X @ U.conj().T

    span = monomials(gens, degree_cap) if wedge_preserving else []
    cond_a, cond = 0.0, 1.0
    for lam in wedge_preserving:
        for G in gens:
            r, c = span_residual(_alpha(lam, G), span)
            cond_a, cond = max(cond_a, r), max(cond, c)
    cond_b = 0.0
    for lam in wedge_reflecting:
        for G in gens:
            moved = _alpha(lam, G)
            for H in gens:
                cond_b = max(cond_b, opnorm(commutator(moved, H)) / max(1.0, opnorm(G) * opnorm(H)))
    params.update({"condition_a_residual": cond_a, "condition_b_residual": cond_b, "condition_number": cond,
                   "condition_a_passed": cond_a < tol, "condition_b_passed": cond_b < tol})
    return make_report(check_id, max(cond_a, cond_b), tol, params=params)

# -------------------------
# SYNTHETIC MODELS
# -------------------------
@dataclass(eq=False)
class MirrorModel:
    """H_A (x) H_A in d = 3 where the second factor carries the pi-rotated momenta.

    The swap of factors intertwines the pi rotation in the (1,2)-plane, so the
    model carries a unitary for every lambda' mapping W0 onto W0' + a.
    """
    side: SpectralDecomposition
    mirror: SpectralDecomposition
    spectral: SpectralDecomposition
    rep: ExtendedRep
    swap: np.ndarray

    @property
    def side_dim(self) -> int:
        return self.side.dim

    def left(self, X) -> OperatorMatrix:
        return np.kron(as_operator(X, self.side_dim), np.eye(self.side_dim))

    def right(self, Y) -> OperatorMatrix:
        return np.kron(np.eye(self.side_dim), as_operator(Y, self.side_dim))

def swap_operator(n: int) -> np.ndarray:
    V = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            V[j * n + i, i * n + j] = 1.0
    return V

def mirror_model(rng: np.random.Generator, side_dim: int = 2, points: Optional[int] = None) -> MirrorModel:
    d = 3
    k = points or side_dim
    momenta = random_momenta(rng, min(k, side_dim), d, physical=True)
    labels = np.concatenate([np.arange(len(momenta)), rng.integers(0, len(momenta), size=side_dim - len(momenta))])
    basis = random_unitary(rng, side_dim)
    side = SpectralDecomposition(momenta, basis, labels, physical=True)
    R = pi_rotation(d)
    mirror = SpectralDecomposition(momenta @ R.matrix.T, basis, labels, physical=True)
    S = tensor_product(side, mirror)
    V = swap_operator(side_dim)
    rep = ExtendedRep(S, [LorentzAction(R, V.astype(complex), S)])
    return MirrorModel(side, mirror, S, rep, V)

def tensor_split_model(rng: np.random.Generator, d: int, dim_a: int, dim_b: int) -> Tuple[
        SpectralDecomposition, SpectralDecomposition, SpectralDecomposition]:
    """Two independent physical factors; X (x) 1 and 1 (x) Y satisfy the spectral hypothesis exactly."""
    def _factor(n: int) -> SpectralDecomposition:
        k = int(rng.integers(1, n + 1))
        pts = random_momenta(rng, k, d, physical=True)
        labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
        rng.shuffle(labels)
        return SpectralDecomposition(pts, random_unitary(rng, n), labels, physical=True)
    SA, SB = _factor(dim_a), _factor(dim_b)
    return SA, SB, tensor_product(SA, SB)

def matrix_units(n: int) -> List[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1.0
            out.append(E)
    return out
