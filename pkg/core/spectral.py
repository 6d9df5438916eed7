"""Finite-dimensional spectral calculus and the warped-convolution engine.

A ``SpectralDecomposition`` stores an orthonormal eigenbasis of the translation
unitaries together with the momentum label of every basis vector; the
projections E_j are the sums of the rank-one projectors sharing a label. In
that basis every identity used by the warp engine is a Hadamard product with a
phase matrix, so the finite sums are evaluated exactly instead of being
approximated.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple
import logging
import numpy as np
from core.errors import (DimensionMismatchError, InvariantError, MissingIntertwinerError,
                         PreconditionError, WarpMismatchError)
from core.geometry import (LorentzTransform, PoincareElement, SkewWarpMatrix, as_warp_matrix,
                           metric, minkowski_inner, transform_Q)
from core.schema import CheckReport, make_report

logger = logging.getLogger(__name__)

TOL = 1e-12
MERGE_TOL = 1e-9
WARP_AGREEMENT_TOL = 1e-10

OperatorMatrix = np.ndarray

def as_operator(F, n: Optional[int] = None) -> OperatorMatrix:
    F = np.asarray(F, dtype=complex)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise DimensionMismatchError(f"operators must be square matrices, got shape {F.shape}")
    if n is not None and F.shape[0] != n:
        raise DimensionMismatchError(f"operator acts on dimension {F.shape[0]}, model has {n}")
    if not np.all(np.isfinite(F)):
        raise InvariantError("operator has non-finite entries")
    return F

def opnorm(A: np.ndarray) -> float:
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))

def relative_residual(diff: np.ndarray, reference: np.ndarray) -> float:
    return opnorm(diff) / max(1.0, opnorm(reference))

def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A

# -------------------------
# SPECTRAL DECOMPOSITION
# -------------------------
def group_momenta(points: np.ndarray, tol: float = MERGE_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Merge rows closer than ``tol`` in max-norm; returns (distinct momenta, label per row)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    reps: List[np.ndarray] = []
    labels = np.empty(len(points), dtype=int)
    for i, p in enumerate(points):
        if reps:
            dist = np.abs(np.asarray(reps) - p).max(axis=1)
            j = int(np.argmin(dist))
            if dist[j] < tol:
                labels[i] = j
                continue
        labels[i] = len(reps)
        reps.append(p)
    return np.asarray(reps).reshape(len(reps), points.shape[1]), labels

@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    momenta: np.ndarray                  # (k, d) distinct spectral points
    basis: np.ndarray                    # (n, n) unitary, columns are joint eigenvectors
    labels: np.ndarray                   # (n,) spectral point of each column
    physical: bool = False
    vacuum: Optional[np.ndarray] = None
    basis_momenta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        momenta = np.atleast_2d(np.asarray(self.momenta, dtype=float))
        basis = np.asarray(self.basis, dtype=complex)
        labels = np.asarray(self.labels, dtype=int)
        n = basis.shape[0]
        if basis.shape != (n, n) or labels.shape != (n,):
            raise DimensionMismatchError("basis must be n x n with one label per column")
        if np.abs(basis.conj().T @ basis - np.eye(n)).max() > TOL * max(1, n):
            raise InvariantError("spectral basis is not orthonormal")
        if labels.min(initial=0) < 0 or labels.max(initial=-1) >= len(momenta):
            raise InvariantError("label outside the list of spectral points")
        if len(np.unique(labels)) != len(momenta):
            raise InvariantError("every spectral point needs a nonzero projection")
        distinct, _ = group_momenta(momenta, MERGE_TOL)
        if len(distinct) != len(momenta):
            raise InvariantError("spectral points must be pairwise distinct")
        vac = None
        if self.physical:
            spatial = np.linalg.norm(momenta[:, 1:], axis=1)
            if np.any(momenta[:, 0] < spatial - TOL * np.maximum(1.0, spatial)):
                raise InvariantError("physical spectrum must lie in the closed forward cone")
            zero = np.flatnonzero(np.abs(momenta).max(axis=1) < MERGE_TOL)
            if zero.size != 1:
                raise InvariantError("physical spectrum must contain the point p = 0")
            cols = np.flatnonzero(labels == zero[0])
            vac = basis[:, cols[0]] if self.vacuum is None else np.asarray(self.vacuum, dtype=complex)
            if abs(np.linalg.norm(vac) - 1) > TOL * n:
                raise InvariantError("vacuum must be a unit vector")
            E0 = basis[:, cols] @ basis[:, cols].conj().T
            if np.abs(E0 @ vac - vac).max() > TOL * n:
                raise InvariantError("vacuum must be translation invariant")
        for name, value in (("momenta", momenta), ("basis", basis), ("labels", labels)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "vacuum", vac)
        bm = momenta[labels]
        bm.setflags(write=False)
        object.__setattr__(self, "basis_momenta", bm)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def spacetime_dim(self) -> int:
        return self.momenta.shape[1]

    @property
    def n_points(self) -> int:
        return self.momenta.shape[0]

    @classmethod
    def from_momenta(cls, basis_momenta, basis=None, physical: bool = False, vacuum=None,
                     merge_tol: float = MERGE_TOL) -> "SpectralDecomposition":
        bm = np.atleast_2d(np.asarray(basis_momenta, dtype=float))
        momenta, labels = group_momenta(bm, merge_tol)
        basis = np.eye(len(bm), dtype=complex) if basis is None else basis
        return cls(momenta, basis, labels, physical, vacuum)

    @classmethod
    def from_projections(cls, points: Sequence[Tuple[np.ndarray, np.ndarray]], physical: bool = False,
                         vacuum=None) -> "SpectralDecomposition":
        momenta, columns, labels = [], [], []
        for j, (p, E) in enumerate(points):
            E = as_operator(E)
            if np.abs(E - E.conj().T).max() > TOL * E.shape[0]:
                raise InvariantError(f"projection for point {j} is not self-adjoint")
            if np.abs(E @ E - E).max() > TOL * E.shape[0]:
                raise InvariantError(f"projection for point {j} is not idempotent")
            w, v = np.linalg.eigh(E)
            rng_cols = v[:, w > 0.5]
            if rng_cols.shape[1] == 0:
                raise InvariantError(f"projection for point {j} is zero")
            momenta.append(np.asarray(p, dtype=float))
            columns.append(rng_cols)
            labels.extend([j] * rng_cols.shape[1])
        basis = np.hstack(columns)
        if basis.shape[0] != basis.shape[1]:
            raise InvariantError("projections do not resolve the identity")
        return cls(np.asarray(momenta), basis, np.asarray(labels), physical, vacuum)

    def projection(self, j: int) -> OperatorMatrix:
        cols = self.basis[:, self.labels == j]
        return cols @ cols.conj().T

    def points(self) -> Iterator[Tuple[np.ndarray, OperatorMatrix]]:
        for j in range(self.n_points):
            yield self.momenta[j], self.projection(j)

    def point_index(self, p, tol: float = MERGE_TOL) -> Optional[int]:
        dist = np.abs(self.momenta - np.asarray(p, dtype=float)).max(axis=1)
        j = int(np.argmin(dist))
        return j if dist[j] < tol else None

    def to_spectral(self, F) -> np.ndarray:
        return self.basis.conj().T @ F @ self.basis

    def from_spectral(self, X) -> np.ndarray:
        return self.basis @ X @ self.basis.conj().T

    def function_of_P(self, f: Callable[[np.ndarray], complex]) -> OperatorMatrix:
        values = np.array([f(p) for p in self.momenta], dtype=complex)[self.labels]
        return (self.basis * values) @ self.basis.conj().T

    def restrict(self, columns: Sequence[int], physical: bool = False) -> "SpectralDecomposition":
        """The decomposition of the invariant subspace spanned by the given basis columns, in their coordinates."""
        cols = np.asarray(columns, dtype=int)
        return SpectralDecomposition.from_momenta(self.basis_momenta[cols], physical=physical)

    def check_invariants(self) -> float:
        """Max deviation of the projection-valued-measure identities (should be ~1e-15)."""
        n = self.dim
        Es = [self.projection(j) for j in range(self.n_points)]
        r = np.abs(sum(Es) - np.eye(n)).max()
        for i, Ei in enumerate(Es):
            r = max(r, np.abs(Ei @ Ei - Ei).max(), np.abs(Ei.conj().T - Ei).max())
            for Ej in Es[i + 1:]:
                r = max(r, np.abs(Ei @ Ej).max())
        return float(r)

def tensor_product(SA: SpectralDecomposition, SB: SpectralDecomposition,
                   merge_tol: float = MERGE_TOL) -> SpectralDecomposition:
    """U = U_A (x) U_B on H_A (x) H_B; total momenta add."""
    bm = (SA.basis_momenta[:, None, :] + SB.basis_momenta[None, :, :]).reshape(-1, SA.spacetime_dim)
    vac = None
    if SA.physical and SB.physical:
        vac = np.kron(SA.vacuum, SB.vacuum)
    return SpectralDecomposition.from_momenta(bm, np.kron(SA.basis, SB.basis),
                                              SA.physical and SB.physical, vac, merge_tol)

# -------------------------
# TRANSLATIONS
# -------------------------
def _phases(S: SpectralDecomposition, x) -> np.ndarray:
    return np.exp(1j * minkowski_inner(S.basis_momenta, np.asarray(x, dtype=float)))

def translation_unitary(S: SpectralDecomposition, x) -> OperatorMatrix:
    x = np.asarray(x, dtype=float)
    if x.shape != (S.spacetime_dim,):
        raise DimensionMismatchError(f"translation needs {S.spacetime_dim} components")
    return (S.basis * _phases(S, x)) @ S.basis.conj().T

def adjoint_action(S: SpectralDecomposition, x, F) -> OperatorMatrix:
    F = as_operator(F, S.dim)
    e = _phases(S, x)
    Fh = S.to_spectral(F)
    return S.from_spectral(e[:, None] * Fh * e.conj()[None, :])

# -------------------------
# WARPED CONVOLUTIONS
# -------------------------
def _pair_forms(S: SpectralDecomposition, Q: np.ndarray) -> np.ndarray:
    """inner[a, b] = p_a Q p_b for the momenta of basis columns a, b."""
    P = S.basis_momenta
    return P @ metric(S.spacetime_dim) @ (P @ Q.T).T

def warped_sum(S: SpectralDecomposition, Q, F, side: str = "right") -> OperatorMatrix:
    """Sum_j E_j alpha_{Qp_j}(F) (right) or Sum_j alpha_{Qp_j}(F) E_j (left) for any d x d matrix Q.

    No skewness check is made here; the public warps go through ``as_warp_matrix``.
    """
    Q = np.asarray(Q.matrix if isinstance(Q, SkewWarpMatrix) else Q, dtype=float)
    if Q.shape != (S.spacetime_dim, S.spacetime_dim):
        raise DimensionMismatchError(f"warp matrix must be {S.spacetime_dim} x {S.spacetime_dim}")
    F = as_operator(F, S.dim)
    if not Q.any():
        return F.copy()
    inner = _pair_forms(S, Q)
    diag = np.diag(inner)
    if side == "right":
        # row a sits in E_j with p_j = p_a: phase (p_a - p_b) Q p_a
        phase = diag[:, None] - inner.T
    elif side == "left":
        # column b sits in E_j with p_j = p_b: phase (p_a - p_b) Q p_b
        phase = inner - diag[None, :]
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return S.from_spectral(S.to_spectral(F) * np.exp(1j * phase))

def warp_left(S: SpectralDecomposition, Q, F) -> OperatorMatrix:
    return warped_sum(S, as_warp_matrix(Q), F, "left")

def warp_right(S: SpectralDecomposition, Q, F) -> OperatorMatrix:
    return warped_sum(S, as_warp_matrix(Q), F, "right")

def warp(S: SpectralDecomposition, Q, F, tol: float = WARP_AGREEMENT_TOL) -> OperatorMatrix:
    """The canonical deformation F_Q; both integration orders are computed and must agree."""
    Q = as_warp_matrix(Q)
    left = warped_sum(S, Q, F, "left")
    right = warped_sum(S, Q, F, "right")
    r = relative_residual(left - right, right)
    if r > tol:
        raise WarpMismatchError(f"left and right warps differ by {r:.3e}")
    return right

# -------------------------
# EXTENDED (POINCARE) REPRESENTATIONS
# -------------------------
@dataclass(frozen=True, eq=False)
class LorentzAction:
    """A unitary V from ``source`` to ``image`` with V E(p) V^-1 = E'(Lambda p)."""
    lorentz: LorentzTransform
    unitary: np.ndarray
    image: SpectralDecomposition

@dataclass(eq=False)
class ExtendedRep:
    base: SpectralDecomposition
    actions: List[LorentzAction] = field(default_factory=list)

    def intertwiner(self, L: LorentzTransform, tol: float = 1e-10) -> LorentzAction:
        if np.abs(L.matrix - np.eye(L.dim)).max() < tol:
            return LorentzAction(L, np.eye(self.base.dim, dtype=complex), self.base)
        for act in self.actions:
            if np.abs(act.lorentz.matrix - L.matrix).max() < tol:
                return act
        raise MissingIntertwinerError("model carries no unitary for this Lorentz transformation")

    def unitary(self, lam: PoincareElement) -> Tuple[OperatorMatrix, SpectralDecomposition]:
        """U(lambda) = U'(x) V(Lambda) together with the decomposition it lands in."""
        act = self.intertwiner(lam.lorentz)
        return translation_unitary(act.image, lam.translation) @ act.unitary, act.image

    def intertwining_residual(self, act: LorentzAction) -> float:
        V = act.unitary
        r = float(np.abs(V.conj().T @ V - np.eye(V.shape[0])).max())
        for j, (p, E) in enumerate(self.base.points()):
            k = act.image.point_index(act.lorentz.apply(p))
            if k is None:
                return float("inf")
            r = max(r, float(np.abs(V @ E @ V.conj().T - act.image.projection(k)).max()))
        return r

# -------------------------
# RANDOM MODELS
# -------------------------
def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))

def random_operator(rng: np.random.Generator, n: int) -> OperatorMatrix:
    F = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return F / opnorm(F)

def random_momenta(rng: np.random.Generator, k: int, d: int, physical: bool = False) -> np.ndarray:
    if not physical:
        return rng.normal(size=(k, d))
    spatial = rng.normal(size=(k, d - 1))
    p0 = np.linalg.norm(spatial, axis=1) + rng.exponential(size=k)
    pts = np.column_stack([p0, spatial])
    pts[0] = 0.0
    return pts

def random_decomposition(rng: np.random.Generator, n: int, d: int, k: Optional[int] = None,
                         physical: bool = False) -> SpectralDecomposition:
    k = k or int(rng.integers(1, n + 1))
    k = min(k, n)
    momenta = random_momenta(rng, k, d, physical)
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(labels)
    basis = random_unitary(rng, n)
    return SpectralDecomposition(momenta, basis, labels, physical)

# -------------------------
# CHECKS
# -------------------------
def check_left_right(S: SpectralDecomposition, Q, F, tol: float = TOL, check_id: str = "left_right") -> CheckReport:
    left = warp_left(S, Q, F)
    right = warp_right(S, Q, F)
    return make_report(check_id, relative_residual(left - right, F), tol,
                       params={"dim": S.dim, "points": S.n_points, "d": S.spacetime_dim})

def check_adjoint(S: SpectralDecomposition, Q, F, tol: float = TOL, check_id: str = "adjoint") -> CheckReport:
    F = as_operator(F, S.dim)
    lhs = warp(S, Q, F).conj().T
    rhs = warp(S, Q, F.conj().T)
    return make_report(check_id, relative_residual(lhs - rhs, F), tol, params={"dim": S.dim})

def check_composition(S: SpectralDecomposition, Q1, Q2, F, tol: float = TOL,
                      check_id: str = "composition") -> CheckReport:
    Q1, Q2 = as_warp_matrix(Q1), as_warp_matrix(Q2)
    lhs = warp(S, Q2, warp(S, Q1, F))
    rhs = warp(S, Q1 + Q2, F)
    return make_report(check_id, relative_residual(lhs - rhs, F), tol, params={"dim": S.dim})

def hypothesis_scan(S: SpectralDecomposition, Q, F, G, compress: Optional[np.ndarray] = None) -> float:
    """max over p, q in sp U of ||[alpha_{Qp}(F), alpha_{-Qq}(G)] C||, C = 1 unless ``compress`` is given."""
    Q = as_warp_matrix(Q)
    Fh, Gh = S.to_spectral(as_operator(F, S.dim)), S.to_spectral(as_operator(G, S.dim))
    shifts = S.momenta @ Q.matrix.T
    phases = [np.exp(1j * minkowski_inner(S.basis_momenta, x)) for x in shifts]
    Ch = np.eye(S.dim) if compress is None else S.to_spectral(as_operator(compress, S.dim))
    worst = 0.0
    for ep in phases:
        Fp = ep[:, None] * Fh * ep.conj()[None, :]
        for eq in phases:
            # alpha_{-Qq}: conjugate phases
            Gq = eq.conj()[:, None] * Gh * eq[None, :]
            worst = max(worst, opnorm(commutator(Fp, Gq) @ Ch))
    return worst / max(1.0, opnorm(Fh) * opnorm(Gh))

def check_commutation(S: SpectralDecomposition, Q, F, G, tol: float = TOL,
                      check_id: str = "commutation") -> CheckReport:
    Q = as_warp_matrix(Q)
    h = hypothesis_scan(S, Q, F, G)
    params = {"dim": S.dim, "points": S.n_points, "hypothesis_residual": h}
    if h >= tol:
        params["failure"] = "hypothesis"
        return make_report(check_id, h, tol, params=params, passed=False,
                           notes="spectral hypothesis fails; no claim on the conclusion")
    FQ, GmQ = warp(S, Q, F), warp(S, -Q, G)
    c = opnorm(commutator(FQ, GmQ)) / max(1.0, opnorm(F) * opnorm(G))
    params["conclusion_residual"] = c
    if c >= tol:
        params["failure"] = "conclusion"
    return make_report(check_id, c, tol, params=params)

def check_covariance(R: ExtendedRep, Q, F, lam: PoincareElement, tol: float = TOL,
                     check_id: str = "covariance") -> CheckReport:
    Q = as_warp_matrix(Q)
    U, image = R.unitary(lam)
    lhs = U @ warp(R.base, Q, F) @ U.conj().T
    rhs = warp(image, transform_Q(lam.lorentz, Q), U @ as_operator(F, R.base.dim) @ U.conj().T)
    return make_report(check_id, relative_residual(lhs - rhs, F), tol,
                       params={"dim": R.base.dim, "d": R.base.spacetime_dim,
                               "translation": lam.translation, "lorentz": lam.lorentz.matrix})

def check_vacuum_fixed_point(S: SpectralDecomposition, Q, F, tol: float = TOL,
                             check_id: str = "vacuum_fixed_point") -> CheckReport:
    if not S.physical:
        raise PreconditionError("vacuum checks need a physical decomposition")
    F = as_operator(F, S.dim)
    r = float(np.linalg.norm(warp(S, Q, F) @ S.vacuum - F @ S.vacuum)) / max(1.0, opnorm(F))
    return make_report(check_id, r, tol, params={"dim": S.dim})

def check_spectral_calculus(S: SpectralDecomposition, f: Callable[[np.ndarray], complex], tol: float = TOL,
                            check_id: str = "spectral_calculus") -> CheckReport:
    fP = S.function_of_P(f)
    r = 0.0
    for p, E in S.points():
        r = max(r, opnorm(E @ fP - f(p) * E), opnorm(fP @ E - f(p) * E))
    return make_report(check_id, r, tol, params={"dim": S.dim, "points": S.n_points})
