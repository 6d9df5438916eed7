"""Exact Minkowski-space geometry: vectors, Lorentz/Poincare elements, wedges and warp matrices.

Vectors are plain ``numpy`` arrays with index 0 the time component. Wedges are
stored as a Poincare representative plus the two null half-spaces bounding
them, so inclusion and equality are decided by cone arithmetic rather than by
sampling.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Optional, Tuple
import logging
import numpy as np
from core.errors import DimensionMismatchError, InvariantError, SkewnessError
from core.schema import CheckReport, make_report

logger = logging.getLogger(__name__)

TOL = 1e-12

MinkowskiVector = np.ndarray

# -------------------------
# VECTORS & METRIC
# -------------------------
def metric(d: int) -> np.ndarray:
    g = -np.eye(d)
    g[0, 0] = 1.0
    return g

def vector(*components: float) -> MinkowskiVector:
    v = np.asarray(components, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DimensionMismatchError("a Minkowski vector needs d >= 2 components")
    return v

def as_vector(x, d: Optional[int] = None) -> MinkowskiVector:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DimensionMismatchError(f"expected a 1-d vector with >= 2 components, got shape {v.shape}")
    if d is not None and v.size != d:
        raise DimensionMismatchError(f"expected {d} components, got {v.size}")
    return v

def minkowski_inner(x, y) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    return x[..., 0] * y[..., 0] - np.sum(x[..., 1:] * y[..., 1:], axis=-1)

# -------------------------
# LORENTZ & POINCARE
# -------------------------
@dataclass(frozen=True, eq=False)
class LorentzTransform:
    matrix: np.ndarray
    orthochronous_proper: bool = True

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise DimensionMismatchError(f"Lorentz matrix must be d x d with d >= 2, got {m.shape}")
        g = metric(m.shape[0])
        scale = max(1.0, float(np.abs(m).max()) ** 2)
        if np.abs(m.T @ g @ m - g).max() > TOL * scale:
            raise InvariantError("matrix does not preserve the Lorentz form")
        if self.orthochronous_proper:
            if np.linalg.det(m) < 0 or m[0, 0] < 1 - TOL:
                raise InvariantError("matrix is not proper orthochronous")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, d: int) -> "LorentzTransform":
        return cls(np.eye(d))

    @classmethod
    def boost(cls, d: int, rapidity: float, axis: int = 1) -> "LorentzTransform":
        if not 1 <= axis < d:
            raise DimensionMismatchError(f"boost axis {axis} outside 1..{d - 1}")
        m = np.eye(d)
        ch, sh = np.cosh(rapidity), np.sinh(rapidity)
        m[0, 0] = m[axis, axis] = ch
        m[0, axis] = m[axis, 0] = sh
        return cls(m)

    @classmethod
    def rotation(cls, d: int, angle: float, i: int = 1, j: int = 2) -> "LorentzTransform":
        if not (1 <= i < d and 1 <= j < d and i != j):
            raise DimensionMismatchError(f"rotation plane ({i},{j}) invalid for d={d}")
        m = np.eye(d)
        c, s = np.cos(angle), np.sin(angle)
        m[i, i] = m[j, j] = c
        m[i, j], m[j, i] = -s, s
        return cls(m)

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def compose(self, other: "LorentzTransform") -> "LorentzTransform":
        return LorentzTransform(self.matrix @ other.matrix,
                                self.orthochronous_proper and other.orthochronous_proper)

    def inverse(self) -> "LorentzTransform":
        g = metric(self.dim)
        return LorentzTransform(g @ self.matrix.T @ g, self.orthochronous_proper)

    def __matmul__(self, other: "LorentzTransform") -> "LorentzTransform":
        return self.compose(other)

@dataclass(frozen=True, eq=False)
class PoincareElement:
    lorentz: LorentzTransform
    translation: np.ndarray

    def __post_init__(self):
        a = as_vector(self.translation, self.lorentz.dim).copy()
        a.setflags(write=False)
        object.__setattr__(self, "translation", a)

    @property
    def dim(self) -> int:
        return self.lorentz.dim

    @classmethod
    def identity(cls, d: int) -> "PoincareElement":
        return cls(LorentzTransform.identity(d), np.zeros(d))

    @classmethod
    def pure_translation(cls, a) -> "PoincareElement":
        a = as_vector(a)
        return cls(LorentzTransform.identity(a.size), a)

    @classmethod
    def pure_lorentz(cls, L: LorentzTransform) -> "PoincareElement":
        return cls(L, np.zeros(L.dim))

    def apply(self, x) -> np.ndarray:
        return self.lorentz.apply(x) + self.translation

    def compose(self, other: "PoincareElement") -> "PoincareElement":
        # (L1, x1)(L2, x2) = (L1 L2, x1 + L1 x2)
        return PoincareElement(self.lorentz @ other.lorentz,
                               self.translation + self.lorentz.apply(other.translation))

    def inverse(self) -> "PoincareElement":
        inv = self.lorentz.inverse()
        return PoincareElement(inv, -inv.apply(self.translation))

    def __matmul__(self, other: "PoincareElement") -> "PoincareElement":
        return self.compose(other)

# -------------------------
# WARP MATRICES
# -------------------------
@dataclass(frozen=True, eq=False)
class SkewWarpMatrix:
    matrix: np.ndarray
    kappa: Optional[float] = None

    def __post_init__(self):
        q = np.array(self.matrix, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 2:
            raise DimensionMismatchError(f"warp matrix must be d x d with d >= 2, got {q.shape}")
        gq = metric(q.shape[0]) @ q
        if np.abs(gq + gq.T).max() > TOL * max(1.0, float(np.abs(q).max())):
            raise SkewnessError("matrix is not skew symmetric with respect to the Lorentz form")
        q.setflags(write=False)
        object.__setattr__(self, "matrix", q)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, p) -> np.ndarray:
        return self.matrix @ np.asarray(p, dtype=float)

    def form(self, p, q) -> float:
        """pQq, the Lorentz product of p with Qq."""
        return float(minkowski_inner(p, self.apply(q)))

    def __neg__(self) -> "SkewWarpMatrix":
        return SkewWarpMatrix(-self.matrix, None)

    def __add__(self, other: "SkewWarpMatrix") -> "SkewWarpMatrix":
        return SkewWarpMatrix(self.matrix + other.matrix, None)

    def __mul__(self, s: float) -> "SkewWarpMatrix":
        return SkewWarpMatrix(s * self.matrix, None)

    __rmul__ = __mul__

def warp_matrix(kappa: float, d: int) -> SkewWarpMatrix:
    if d < 2:
        raise DimensionMismatchError("warp matrices need d >= 2")
    if kappa < 0:
        raise InvariantError("kappa must be >= 0")
    q = np.zeros((d, d))
    q[0, 1] = q[1, 0] = kappa
    return SkewWarpMatrix(q, float(kappa))

def as_warp_matrix(Q) -> SkewWarpMatrix:
    return Q if isinstance(Q, SkewWarpMatrix) else SkewWarpMatrix(np.asarray(Q, dtype=float))

def transform_Q(L: LorentzTransform, Q: SkewWarpMatrix) -> SkewWarpMatrix:
    if L.dim != Q.dim:
        raise DimensionMismatchError(f"dimension mismatch: {L.dim} vs {Q.dim}")
    return SkewWarpMatrix(L.matrix @ Q.matrix @ L.inverse().matrix)

def random_skew(rng: np.random.Generator, d: int, scale: float = 1.0) -> SkewWarpMatrix:
    a = rng.normal(scale=scale, size=(d, d))
    return SkewWarpMatrix(metric(d) @ (a - a.T))

# -------------------------
# WEDGES
# -------------------------
# W0 = {x1 - x0 >= 0} n {x1 + x0 >= 0}; rows are Euclidean covectors c with c.x >= 0
def _standard_covectors(d: int) -> np.ndarray:
    c = np.zeros((2, d))
    c[0, 0], c[0, 1] = -1.0, 1.0
    c[1, 0], c[1, 1] = 1.0, 1.0
    return c

def pi_rotation(d: int) -> LorentzTransform:
    return LorentzTransform.rotation(d, np.pi, 1, 2)

@dataclass(frozen=True, eq=False)
class Wedge:
    representative: PoincareElement
    is_left_class: bool = False   # d = 2 only: W = lambda W0'
    covectors: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d = self.representative.dim
        if self.is_left_class and d != 2:
            raise InvariantError("left-class wedges exist only in d = 2; use a rotation for d > 2")
        c0 = _standard_covectors(d)
        if self.is_left_class:
            c0 = -c0
        # x in lambda W0  <=>  c0 . L^-1 (x - a) >= 0  <=>  (L^-T c0) . x >= (L^-T c0) . a
        cov = c0 @ self.representative.lorentz.inverse().matrix
        off = cov @ self.representative.translation
        cov.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "covectors", cov)
        object.__setattr__(self, "offsets", off)

    @property
    def dim(self) -> int:
        return self.representative.dim

    @property
    def lorentz(self) -> LorentzTransform:
        return self.representative.lorentz

    def contains(self, x, tol: float = TOL) -> bool:
        x = as_vector(x, self.dim)
        return bool(np.all(self.covectors @ x >= self.offsets - tol * max(1.0, float(np.abs(x).max()))))

    def contains_many(self, xs: np.ndarray, tol: float = TOL) -> np.ndarray:
        xs = np.atleast_2d(xs)
        scale = np.maximum(1.0, np.abs(xs).max(axis=1))
        return np.all(xs @ self.covectors.T >= self.offsets - tol * scale[:, None], axis=1)

    def contains_via_representative(self, x, tol: float = TOL) -> bool:
        y = self.representative.inverse().apply(as_vector(x, self.dim))
        if self.is_left_class:
            y = -y
        return bool(y[1] >= abs(y[0]) - tol * max(1.0, float(np.abs(y).max())))

    def apply(self, lam: PoincareElement) -> "Wedge":
        return Wedge(lam @ self.representative, self.is_left_class)

    def translate(self, a) -> "Wedge":
        return self.apply(PoincareElement.pure_translation(a))

def standard_wedge(d: int) -> Wedge:
    return Wedge(PoincareElement.identity(d))

def wedge_contains(W: Wedge, x) -> bool:
    return W.contains(x)

def causal_complement(W: Wedge) -> Wedge:
    if W.dim == 2:
        return Wedge(W.representative, not W.is_left_class)
    rot = PoincareElement.pure_lorentz(pi_rotation(W.dim))
    return Wedge(W.representative @ rot)

def _halfspace_contains(W: Wedge, c: np.ndarray, b: float, tol: float) -> bool:
    # inf_{x in W} c.x is finite iff c = y1 c1 + y2 c2 with y >= 0; the infimum is then y . offsets
    basis = W.covectors.T
    y, *_ = np.linalg.lstsq(basis, c, rcond=None)
    scale = max(1.0, float(np.abs(c).max()))
    if np.abs(basis @ y - c).max() > tol * scale or np.any(y < -tol * scale):
        return False
    return bool(y @ W.offsets >= b - tol * max(1.0, abs(b), float(np.abs(W.offsets).max())))

def wedge_subset(W1: Wedge, W2: Wedge, tol: float = 1e-10) -> bool:
    if W1.dim != W2.dim:
        raise DimensionMismatchError(f"dimension mismatch: {W1.dim} vs {W2.dim}")
    return all(_halfspace_contains(W1, c, b, tol) for c, b in zip(W2.covectors, W2.offsets))

def wedge_equal(W1: Wedge, W2: Wedge, tol: float = 1e-10) -> bool:
    return wedge_subset(W1, W2, tol) and wedge_subset(W2, W1, tol)

def same_direction(W1: Wedge, W2: Wedge, tol: float = 1e-10) -> bool:
    """True iff the wedges differ by a pure translation."""
    a, b = W1.covectors, W2.covectors
    scale = np.abs(a).max(axis=1, keepdims=True)
    return bool(np.abs(a / scale - b / np.abs(b).max(axis=1, keepdims=True)).max() < tol)

# -------------------------
# SAMPLERS
# -------------------------
def sample_forward_cone(rng: np.random.Generator, d: int, n: int, null_fraction: float = 0.1) -> np.ndarray:
    spatial = rng.normal(size=(n, d - 1))
    excess = rng.exponential(size=n)
    excess[rng.random(n) < null_fraction] = 0.0
    p0 = np.linalg.norm(spatial, axis=1) + excess
    return np.column_stack([p0, spatial])

def sample_wedge_points(rng: np.random.Generator, W: Wedge, n: int) -> np.ndarray:
    d = W.dim
    y = rng.normal(scale=2.0, size=(n, d))
    y[:, 1] = np.abs(y[:, 0]) + rng.exponential(size=n)
    if W.is_left_class:
        y = -y
    lam = W.representative
    return y @ lam.lorentz.matrix.T + lam.translation

def random_lorentz(rng: np.random.Generator, d: int, max_rapidity: float = 1.0, factors: int = 4) -> LorentzTransform:
    L = LorentzTransform.identity(d)
    for _ in range(factors):
        L = L @ LorentzTransform.boost(d, rng.uniform(-max_rapidity, max_rapidity), int(rng.integers(1, d)))
        if d >= 3:
            i, j = rng.choice(np.arange(1, d), size=2, replace=False)
            L = L @ LorentzTransform.rotation(d, rng.uniform(0, 2 * np.pi), int(i), int(j))
    return L

def random_poincare(rng: np.random.Generator, d: int) -> PoincareElement:
    return PoincareElement(random_lorentz(rng, d), rng.normal(size=d))

def wedge_stabilizer_sample(rng: np.random.Generator, d: int) -> PoincareElement:
    """A random lambda with lambda W0 subset W0: boosts along x1, rotations fixing (x0, x1), inward shifts."""
    L = LorentzTransform.boost(d, rng.uniform(-2.0, 2.0), 1)
    if d >= 4:
        L = L @ LorentzTransform.rotation(d, rng.uniform(0, 2 * np.pi), 2, 3)
    a = np.zeros(d)
    a[0] = rng.normal()
    a[1] = abs(a[0]) + rng.exponential()
    a[2:] = rng.normal(size=d - 2)
    return PoincareElement(L, a)

def wedge_reflector_sample(rng: np.random.Generator, d: int) -> PoincareElement:
    """A random lambda' with lambda' W0 subset W0' (d >= 3)."""
    if d < 3:
        raise DimensionMismatchError("no proper orthochronous lambda' maps W0 into W0' in d = 2")
    mu = wedge_stabilizer_sample(rng, d)
    rot = PoincareElement.pure_lorentz(pi_rotation(d))
    return rot @ mu

# -------------------------
# FACT CHECKS
# -------------------------
def check_fact_iii(kappa: float, d: int, samples: int, rng: Optional[np.random.Generator] = None,
                   surjectivity_samples: Optional[int] = None, tol: float = TOL) -> CheckReport:
    if kappa <= 0:
        raise InvariantError("fact (iii) needs kappa > 0")
    rng = rng or np.random.default_rng(0)
    Q = warp_matrix(kappa, d)
    W0 = standard_wedge(d)
    ps = sample_forward_cone(rng, d, samples)
    images = ps @ Q.matrix.T
    inside = W0.contains_many(images, tol)
    violations = int(np.count_nonzero(~inside))
    margin = np.minimum(images @ W0.covectors[0], images @ W0.covectors[1])
    residual = float(max(0.0, -margin.min()))
    params = {"kappa": kappa, "d": d, "samples": samples, "violations": violations}
    notes = ""
    surj_fail = 0
    if d == 2:
        n = surjectivity_samples or samples
        xs = sample_wedge_points(rng, W0, n)
        pre = np.column_stack([xs[:, 1] / kappa, xs[:, 0] / kappa])
        in_cone = pre[:, 0] >= np.abs(pre[:, 1]) - tol * np.maximum(1.0, np.abs(pre).max(axis=1))
        back = pre @ Q.matrix.T
        err = np.abs(back - xs).max(axis=1) / np.maximum(1.0, np.abs(xs).max(axis=1))
        surj_fail = int(np.count_nonzero(~in_cone | (err > tol)))
        residual = max(residual, float(err.max()))
        params["surjectivity_samples"] = n
        params["surjectivity_failures"] = surj_fail
    else:
        notes = "d > 2: Q_kappa V+ is a 2-plane inside W0; only the inclusion is verified"
    return make_report(f"fact_iii[d={d},kappa={kappa:g}]", residual, tol, params=params,
                       passed=violations == 0 and surj_fail == 0, notes=notes)

def check_wedge_frame_consistency(lam1: PoincareElement, lam2: PoincareElement, kappa: float,
                                  tol: float = TOL) -> Tuple[bool, float]:
    """Equal wedges lambda1 W0 = lambda2 W0 must carry the same Lambda Q_kappa Lambda^-1."""
    d = lam1.dim
    W1, W2 = Wedge(lam1), Wedge(lam2)
    if not wedge_equal(W1, W2):
        return False, float("inf")
    Q = warp_matrix(kappa, d)
    diff = transform_Q(lam1.lorentz, Q).matrix - transform_Q(lam2.lorentz, Q).matrix
    r = float(np.abs(diff).max())
    return r < tol, r
