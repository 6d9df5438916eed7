"""Truncated bosonic Fock space over a finite lattice of mass-shell momenta.

Basis states are occupation vectors ordered by particle number, then
lexicographically by the multiset of mode indices, so the vacuum is index 0.
Operators that would push a state above the cutoff map it to zero; with that
convention a and a* stay exact adjoints.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import numpy as np
from core.errors import (DimensionGuardError, DimensionMismatchError, DuplicateModeError, InvariantError,
                         PreconditionError)
from core.geometry import as_warp_matrix, metric
from core.schema import CheckReport, make_report
from core.spectral import (MERGE_TOL, OperatorMatrix, SpectralDecomposition, opnorm,
                           relative_residual, warp)

logger = logging.getLogger(__name__)

TOL = 1e-12
DEFAULT_MAX_DIM = 5000

# -------------------------
# MODES & STATES
# -------------------------
@dataclass(frozen=True)
class MassShellPoint:
    spatial: Tuple[float, ...]
    mass: float

    def __post_init__(self):
        if self.mass <= 0:
            raise InvariantError("mass must be positive")
        object.__setattr__(self, "spatial", tuple(float(s) for s in self.spatial))

    @property
    def energy(self) -> float:
        return float(np.sqrt(np.dot(self.spatial, self.spatial) + self.mass ** 2))

    @property
    def four_momentum(self) -> np.ndarray:
        return np.array((self.energy, *self.spatial))

    @property
    def velocity(self) -> np.ndarray:
        return np.array((1.0, *(np.asarray(self.spatial) / self.energy)))

def lattice_modes(d: int, K: int, delta: float, mass: float) -> List[MassShellPoint]:
    """Spatial momenta {-K*delta, ..., K*delta}^(d-1)."""
    if d < 2:
        raise DimensionMismatchError("d >= 2 required")
    axis = [k * delta for k in range(-K, K + 1)]
    return [MassShellPoint(tuple(s), mass) for s in product(axis, repeat=d - 1)]

@dataclass(frozen=True)
class FockBasisState:
    occupations: Tuple[int, ...]

    @property
    def total_count(self) -> int:
        return sum(self.occupations)

    def modes(self) -> Tuple[int, ...]:
        return tuple(i for i, n in enumerate(self.occupations) for _ in range(n))

def fock_dimension(n_modes: int, cutoff: int) -> int:
    return comb(n_modes + cutoff, cutoff)

@dataclass(eq=False)
class TruncatedFockSpace:
    modes: List[MassShellPoint]
    cutoff: int
    basis: List[FockBasisState]
    spectral: SpectralDecomposition
    vacuum_index: int = 0
    index: Dict[Tuple[int, ...], int] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def mass(self) -> float:
        return self.modes[0].mass if self.modes else float("nan")

    @property
    def spacetime_dim(self) -> int:
        return self.spectral.spacetime_dim

    def mode_momentum(self, mode: int) -> np.ndarray:
        return self.modes[mode].four_momentum

    def state_momenta(self) -> np.ndarray:
        return self.spectral.basis_momenta

    def sector(self, n: int) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.basis) if s.total_count == n], dtype=int)

    def sector_projector(self, n: int) -> np.ndarray:
        P = np.zeros((self.dim, self.dim))
        idx = self.sector(n)
        P[idx, idx] = 1.0
        return P

    def below_cutoff_projector(self) -> np.ndarray:
        return np.diag([1.0 if s.total_count < self.cutoff else 0.0 for s in self.basis])

    def state_index(self, occupations: Sequence[int]) -> Optional[int]:
        return self.index.get(tuple(occupations))

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.vacuum_index] = 1.0
        return v

    def one_particle_state(self, mode: int) -> np.ndarray:
        occ = [0] * self.n_modes
        occ[mode] = 1
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[tuple(occ)]] = 1.0
        return v

    def mode_of_spatial(self, spatial, tol: float = MERGE_TOL) -> Optional[int]:
        for i, m in enumerate(self.modes):
            if np.abs(np.asarray(m.spatial) - np.asarray(spatial)).max(initial=0.0) < tol:
                return i
        return None

def build_fock(modes: Sequence, mass: float, cutoff: int, max_dim: int = DEFAULT_MAX_DIM) -> TruncatedFockSpace:
    """Enumerate the occupation basis and derive the physical spectral decomposition.

    ``modes`` are spatial momenta (tuples or scalars for d = 2) or ``MassShellPoint`` objects.
    """
    if mass <= 0:
        raise InvariantError("mass must be positive")
    if cutoff < 0:
        raise InvariantError("cutoff must be >= 0")
    points = [m if isinstance(m, MassShellPoint) else MassShellPoint(tuple(np.atleast_1d(m)), mass)
              for m in modes]
    keys = [p.spatial for p in points]
    if len(set(keys)) != len(keys):
        raise DuplicateModeError("modes must be distinct")
    if points and len({len(k) for k in keys}) != 1:
        raise DimensionMismatchError("all modes need the same number of spatial components")
    M = len(points)
    dim = fock_dimension(M, cutoff)
    if dim > max_dim:
        raise DimensionGuardError(f"Fock dimension {dim} exceeds the guard {max_dim}")
    d = len(keys[0]) + 1 if points else 2
    basis: List[FockBasisState] = []
    for n in range(cutoff + 1):
        for combo in combinations_with_replacement(range(M), n):
            occ = [0] * M
            for i in combo:
                occ[i] += 1
            basis.append(FockBasisState(tuple(occ)))
    shell = np.array([p.four_momentum for p in points]).reshape(M, d)
    totals = np.array([np.asarray(s.occupations, dtype=float) @ shell for s in basis]).reshape(len(basis), d)
    spectral = SpectralDecomposition.from_momenta(totals, physical=True)
    index = {s.occupations: i for i, s in enumerate(basis)}
    logger.debug("built Fock space: %d modes, cutoff %d, dim %d, %d spectral points",
                 M, cutoff, dim, spectral.n_points)
    return TruncatedFockSpace(points, cutoff, basis, spectral, 0, index)

def reference_space(K: int = 1, delta: float = 1.0, mass: float = 1.0, cutoff: int = 2, d: int = 2,
                    max_dim: int = DEFAULT_MAX_DIM) -> TruncatedFockSpace:
    return build_fock(lattice_modes(d, K, delta, mass), mass, cutoff, max_dim)

# -------------------------
# LADDER OPERATORS & FIELDS
# -------------------------
def creation(F: TruncatedFockSpace, mode: int) -> OperatorMatrix:
    if not 0 <= mode < F.n_modes:
        raise IndexError(f"mode {mode} outside 0..{F.n_modes - 1}")
    a_dag = np.zeros((F.dim, F.dim), dtype=complex)
    for j, s in enumerate(F.basis):
        if s.total_count >= F.cutoff:
            continue
        occ = list(s.occupations)
        occ[mode] += 1
        a_dag[F.index[tuple(occ)], j] = np.sqrt(occ[mode])
    return a_dag

def annihilation(F: TruncatedFockSpace, mode: int) -> OperatorMatrix:
    return creation(F, mode).conj().T

def number_operator(F: TruncatedFockSpace) -> OperatorMatrix:
    return np.diag([float(s.total_count) for s in F.basis]).astype(complex)

def momentum_operator(F: TruncatedFockSpace, mu: int) -> OperatorMatrix:
    return np.diag(F.state_momenta()[:, mu]).astype(complex)

def measure_weights(F: TruncatedFockSpace) -> np.ndarray:
    return np.array([(2 * m.energy) ** -0.5 for m in F.modes])

def free_field(F: TruncatedFockSpace, ftilde) -> OperatorMatrix:
    """phi(f) = sum_p w_p (f~(p) a*(p) + conj(f~(p)) a(p)),  w_p = (2 omega_p)^(-1/2)."""
    ftilde = np.asarray(ftilde, dtype=complex)
    if ftilde.shape != (F.n_modes,):
        raise DimensionMismatchError(f"need one amplitude per mode ({F.n_modes}), got {ftilde.shape}")
    w = measure_weights(F)
    phi = np.zeros((F.dim, F.dim), dtype=complex)
    for i in np.flatnonzero(ftilde):
        a_dag = creation(F, int(i))
        phi += w[i] * (ftilde[i] * a_dag + np.conj(ftilde[i]) * a_dag.conj().T)
    return phi

def translated_amplitudes(F: TruncatedFockSpace, ftilde, x) -> np.ndarray:
    """Amplitudes of f(. - x): f~(p) -> e^{ipx} f~(p), so that phi(f_x) = alpha_x(phi(f))."""
    shell = np.array([m.four_momentum for m in F.modes])
    return np.asarray(ftilde, dtype=complex) * np.exp(1j * (shell @ metric(F.spacetime_dim) @ np.asarray(x, float)))

def wedge_localized_amplitudes(F: TruncatedFockSpace, shift: float,
                               width: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Gaussian profile centred at x1 = +shift (inside W0) and at x1 = -shift (inside W0')."""
    if shift <= 0:
        raise PreconditionError("shift must be positive")
    spatial = np.array([m.spatial for m in F.modes], dtype=float)
    base = np.exp(-0.5 * width ** 2 * np.sum(spatial ** 2, axis=1))
    x = np.zeros(F.spacetime_dim)
    x[1] = shift
    return translated_amplitudes(F, base, x), translated_amplitudes(F, base, -x)

def gl_deformed_creation(F: TruncatedFockSpace, mode: int, Q) -> OperatorMatrix:
    """a*(p) exp(i pQP), computed without any spectral sum."""
    Q = as_warp_matrix(Q)
    p = F.mode_momentum(mode)
    P = F.state_momenta()
    # column b carries the ket momentum P_b: phase pQP_b = (QP_b) g p
    twist = np.exp(1j * (P @ Q.matrix.T) @ metric(F.spacetime_dim) @ p)
    return creation(F, mode) * twist[None, :]

# -------------------------
# CHECKS
# -------------------------
def check_gl_coincidence(F: TruncatedFockSpace, Q, tol: float = TOL, check_id: str = "gl_coincidence") -> CheckReport:
    Q = as_warp_matrix(Q)
    worst = 0.0
    for mode in range(F.n_modes):
        a_dag = creation(F, mode)
        worst = max(worst, relative_residual(warp(F.spectral, Q, a_dag) - gl_deformed_creation(F, mode, Q), a_dag))
    return make_report(check_id, worst, tol, params={"dim": F.dim, "modes": F.n_modes, "Q": Q.matrix})

def check_truncated_ccr(F: TruncatedFockSpace, tol: float = TOL, check_id: str = "truncated_ccr") -> CheckReport:
    """[a(p), a*(q)] = delta_pq on the sectors below the cutoff; the top sector is excluded by construction."""
    below = F.below_cutoff_projector()
    worst = 0.0
    ops = [creation(F, i) for i in range(F.n_modes)]
    for i, ai_dag in enumerate(ops):
        for j, aj_dag in enumerate(ops):
            c = ai_dag.conj().T @ aj_dag - aj_dag @ ai_dag.conj().T
            target = np.eye(F.dim) if i == j else np.zeros((F.dim, F.dim))
            worst = max(worst, opnorm((c - target) @ below))
    return make_report(check_id, worst, tol, params={"dim": F.dim, "cutoff": F.cutoff})
