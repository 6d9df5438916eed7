"""Two-particle scattering in the deformed free field.

Smearing integrals are evaluated in the spectral representation: the x-integral
of f_t(x) alpha_x(A) multiplies the matrix element between momenta P_a and P_b
by f~(k) e^{i(k0 - omega_k) t}, k = P_a - P_b. The (2 pi)^{d/2} normalization
is dropped. Time limits are replaced by exact Cesaro averages over each
frequency present in the finite model.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple
import logging
import numpy as np
import pandas as pd
from core.errors import DimensionMismatchError, InvariantError, OffShellError, PrecedenceError, SectorError
from core.fock import TruncatedFockSpace, creation, free_field
from core.geometry import LorentzTransform, as_warp_matrix, minkowski_inner, warp_matrix
from core.schema import CheckReport, PhaseRow, make_report
from core.spectral import OperatorMatrix, SpectralDecomposition, as_operator, tensor_product, warp

logger = logging.getLogger(__name__)

TOL = 1e-12
SHELL_TOL = 1e-9
Direction = Literal["in", "out"]

# -------------------------
# VELOCITY SUPPORTS
# -------------------------
@dataclass(frozen=True, eq=False)
class VelocitySupport:
    velocities: np.ndarray          # (k, d) rows (1, p/omega_p)

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if v.shape[0] == 0:
            raise InvariantError("velocity support is empty")
        if np.any(v[:, 0] != 1.0):
            raise InvariantError("velocities must have time component 1")
        if np.any(np.linalg.norm(v[:, 1:], axis=1) >= 1.0):
            raise InvariantError("velocities must be subluminal")
        v.setflags(write=False)
        object.__setattr__(self, "velocities", v)

    def __len__(self) -> int:
        return self.velocities.shape[0]

def velocity_support(F: TruncatedFockSpace, ftilde, tol: float = 0.0) -> VelocitySupport:
    amps = np.asarray(ftilde, dtype=complex)
    if amps.shape != (F.n_modes,):
        raise DimensionMismatchError(f"need one amplitude per mode ({F.n_modes}), got {amps.shape}")
    support = np.flatnonzero(np.abs(amps) > tol)
    if support.size == 0:
        raise PrecedenceError("test function has empty momentum support")
    return VelocitySupport(np.array([F.modes[i].velocity for i in support]))

def precedes(later: VelocitySupport, earlier: VelocitySupport) -> bool:
    """True iff every difference v' - v lies in the interior of W0: (v' - v)_1 > |(v' - v)_0| = 0."""
    diff = later.velocities[:, None, :] - earlier.velocities[None, :, :]
    return bool(np.all(diff[..., 1] > np.abs(diff[..., 0])))

# -------------------------
# HEPP PACKETS
# -------------------------
@dataclass(frozen=True, eq=False)
class HeppPacketSpec:
    amplitudes: np.ndarray          # f~ on the one-particle lattice, one entry per mode
    time: float = 0.0
    energy_window: Optional[float] = None   # keep transfers with |k0 - omega_k| <= window

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        if self.energy_window is not None and self.energy_window < 0:
            raise InvariantError("energy window must be >= 0")

@dataclass(eq=False)
class HeppFilter:
    """Per matrix element: f~ at the transfer and the frequency k0 - omega_k in spectral coordinates."""
    spectral: SpectralDecomposition
    weights: np.ndarray
    frequencies: np.ndarray
    off_lattice: np.ndarray

    def apply(self, A, t: float = 0.0) -> OperatorMatrix:
        S = self.spectral
        Ah = S.to_spectral(as_operator(A, S.dim))
        return S.from_spectral(Ah * self.weights * np.exp(1j * self.frequencies * t))

    def dropped(self, A, tol: float = TOL) -> int:
        Ah = self.spectral.to_spectral(as_operator(A, self.spectral.dim))
        return int(np.count_nonzero(self.off_lattice & (np.abs(Ah) > tol)))

def _mode_lookup(F: TruncatedFockSpace) -> Dict[Tuple[float, ...], int]:
    return {tuple(np.round(np.asarray(m.spatial), 9) + 0.0): i for i, m in enumerate(F.modes)}

def hepp_filter(F: TruncatedFockSpace, packet: HeppPacketSpec) -> HeppFilter:
    if packet.amplitudes.shape != (F.n_modes,):
        raise DimensionMismatchError(f"need one amplitude per mode ({F.n_modes}), got {packet.amplitudes.shape}")
    P = F.state_momenta()
    n = F.dim
    lookup = _mode_lookup(F)
    weights = np.zeros((n, n), dtype=complex)
    freqs = np.zeros((n, n))
    off = np.zeros((n, n), dtype=bool)
    for a in range(n):
        for b in range(n):
            k = P[a] - P[b]
            mode = lookup.get(tuple(np.round(k[1:], 9) + 0.0))
            if mode is None:
                off[a, b] = True
                continue
            nu = k[0] - F.modes[mode].energy
            if packet.energy_window is not None and abs(nu) > packet.energy_window:
                continue
            weights[a, b] = packet.amplitudes[mode]
            freqs[a, b] = nu
    return HeppFilter(F.spectral, weights, freqs, off)

def hepp_packet_operator(F: TruncatedFockSpace, A, packet: HeppPacketSpec) -> OperatorMatrix:
    """A(f_t) = int dx f_t(x) alpha_x(A), evaluated as a matrix-element filter."""
    filt = hepp_filter(F, packet)
    dropped = filt.dropped(A)
    if dropped:
        logger.debug("hepp packet: %d matrix elements with off-lattice transfer set to zero", dropped)
    return filt.apply(A, packet.time)

def hepp_packet_series(F: TruncatedFockSpace, A, packet: HeppPacketSpec,
                       times: Sequence[float]) -> List[OperatorMatrix]:
    filt = hepp_filter(F, packet)
    return [filt.apply(A, float(t)) for t in times]

def check_hepp_shell(F: TruncatedFockSpace, A, packet: HeppPacketSpec, times: Sequence[float],
                     tol: float = TOL, check_id: str = "hepp_shell") -> CheckReport:
    """The one-particle component of A(f_t) Omega does not depend on t."""
    one = F.sector_projector(1)
    omega = F.vacuum()
    full = [X @ omega for X in hepp_packet_series(F, A, packet, times)]
    states = [one @ s for s in full]
    ref = states[0]
    worst = max((float(np.linalg.norm(s - ref)) for s in states), default=0.0) / max(1.0, float(np.linalg.norm(ref)))
    spread = max((float(np.linalg.norm(s - full[0])) for s in full), default=0.0)
    return make_report(check_id, worst, tol, params={"dim": F.dim, "times": list(times),
                                                     "full_state_spread": spread,
                                                     "off_lattice_dropped": hepp_filter(F, packet).dropped(A)})

# -------------------------
# TWO-PARTICLE STATES
# -------------------------
@dataclass(frozen=True, eq=False)
class TwoParticlePhase:
    p: np.ndarray
    q: np.ndarray
    kappa: float
    direction: str
    phase: complex

    def __post_init__(self):
        if self.direction not in ("in", "out"):
            raise InvariantError(f"direction must be 'in' or 'out', got {self.direction!r}")
        if abs(abs(self.phase) - 1.0) > 1e-14:
            raise InvariantError("two-particle phase must be unimodular")

    @property
    def angle(self) -> float:
        return float(np.angle(self.phase))

def one_particle_decomposition(F: TruncatedFockSpace) -> SpectralDecomposition:
    return SpectralDecomposition.from_momenta(np.array([m.four_momentum for m in F.modes]))

def two_particle_decomposition(F: TruncatedFockSpace) -> SpectralDecomposition:
    """Spectral data of H1 (x) H1, unsymmetrized; total momenta add."""
    S1 = one_particle_decomposition(F)
    return tensor_product(S1, S1)

def one_particle_coefficients(F: TruncatedFockSpace, psi, tol: float = 1e-10) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (F.dim,):
        raise DimensionMismatchError(f"state must have dimension {F.dim}")
    outside = psi - F.sector_projector(1) @ psi
    if np.linalg.norm(outside) > tol * max(1.0, float(np.linalg.norm(psi))):
        raise SectorError("vector has components outside the one-particle sector")
    coeffs = np.zeros(F.n_modes, dtype=complex)
    for mode in range(F.n_modes):
        coeffs[mode] = psi[F.state_index([int(i == mode) for i in range(F.n_modes)])]
    return coeffs

def _symmetrizer(F: TruncatedFockSpace) -> np.ndarray:
    """|a> (x) |b>  ->  a*(a) a*(b) Omega."""
    M = F.n_modes
    if F.cutoff < 2:
        raise SectorError("two-particle states need a cutoff of at least 2")
    sym = np.zeros((F.dim, M * M), dtype=complex)
    omega = F.vacuum()
    ops = [creation(F, i) for i in range(M)]
    for a in range(M):
        for b in range(M):
            sym[:, a * M + b] = ops[a] @ ops[b] @ omega
    return sym

def deformed_two_particle(F: TruncatedFockSpace, psi1, psi2, Q, direction: Optional[Direction] = None,
                          support_tol: float = 1e-12) -> np.ndarray:
    """Sum_j E2_j (U(Q p_j) psi1 (x) psi2), symmetrized into the Fock two-particle sector.

    ``direction="in"`` requires psi2's velocity support to precede psi1's, ``"out"`` the reverse;
    ``None`` skips the precedence check.
    """
    Q = as_warp_matrix(Q)
    c1 = one_particle_coefficients(F, psi1)
    c2 = one_particle_coefficients(F, psi2)
    if direction not in ("in", "out", None):
        raise ValueError(f"direction must be 'in', 'out' or None, got {direction!r}")
    if direction is not None:
        g1 = velocity_support(F, c1, support_tol)
        g2 = velocity_support(F, c2, support_tol)
        later, earlier = (g2, g1) if direction == "in" else (g1, g2)
        if not precedes(later, earlier):
            raise PrecedenceError(f"velocity supports are not ordered for the {direction!r} configuration")
    S2 = two_particle_decomposition(F)
    v = np.kron(c1, c2)
    out = np.zeros_like(v)
    shell = one_particle_decomposition(F).basis_momenta
    for p, E in S2.points():
        # U(Qp) (x) 1 on E2_j: phase e^{i k Qp} on the first factor's momentum k
        first = np.exp(1j * minkowski_inner(shell, Q.apply(p)))
        out += np.kron(first, np.ones(F.n_modes)) * (E @ v)
    return _symmetrizer(F) @ out

def _shell_mass(p: np.ndarray, mass: Optional[float]) -> float:
    m2 = float(minkowski_inner(p, p))
    if p[0] <= 0 or m2 <= 0:
        raise OffShellError(f"momentum {p.tolist()} is not on a positive-mass shell")
    if mass is not None and abs(m2 - mass ** 2) > SHELL_TOL * max(1.0, mass ** 2, float(p[0]) ** 2):
        raise OffShellError(f"momentum {p.tolist()} is not on the mass-{mass:g} shell")
    return float(np.sqrt(m2))

def _on_shell(*ps, mass: Optional[float] = None) -> List[np.ndarray]:
    vecs = [np.asarray(p, dtype=float) for p in ps]
    if len({v.shape for v in vecs}) != 1:
        raise DimensionMismatchError("momenta must share one dimension")
    masses = [_shell_mass(v, mass) for v in vecs]
    if mass is None and max(masses) - min(masses) > SHELL_TOL * max(1.0, max(masses)):
        raise OffShellError("momenta lie on different mass shells")
    return vecs

def sharp_phase(p, q, kappa: float, direction: Direction, mass: Optional[float] = None) -> TwoParticlePhase:
    p, q = _on_shell(p, q, mass=mass)
    theta = abs(warp_matrix(kappa, p.shape[0]).form(p, q))
    sign = 1.0 if direction == "in" else -1.0
    return TwoParticlePhase(p, q, kappa, direction, complex(np.exp(1j * sign * theta)))

def s_kernel_ratio(p, q, p_out, q_out, kappa: float, mass: Optional[float] = None) -> complex:
    p, q, p_out, q_out = _on_shell(p, q, p_out, q_out, mass=mass)
    Q = warp_matrix(kappa, p.shape[0])
    return complex(np.exp(1j * (abs(Q.form(p, q)) + abs(Q.form(p_out, q_out)))))

def s_matrix_element(F: TruncatedFockSpace, p_mode: int, q_mode: int, kappa: float) -> complex:
    """<out|in> for sharp momenta; q's velocity must exceed p's along x1."""
    Q = warp_matrix(kappa, F.spacetime_dim)
    psi_p, psi_q = F.one_particle_state(p_mode), F.one_particle_state(q_mode)
    incoming = deformed_two_particle(F, psi_p, psi_q, Q, "in")
    outgoing = deformed_two_particle(F, psi_q, psi_p, Q, "out")
    return complex(np.vdot(outgoing, incoming))

# -------------------------
# LORENTZ BREAKING
# -------------------------
def lorentz_breaking_witness(p, q, L: LorentzTransform, kappa: float) -> float:
    p, q = _on_shell(p, q)
    if L.dim != p.shape[0]:
        raise DimensionMismatchError(f"dimension mismatch: {L.dim} vs {p.shape[0]}")
    if p.shape[0] < 3:
        logger.debug("d = 2: the phase is a 2x2 determinant and the witness vanishes")
    Q = warp_matrix(kappa, p.shape[0])
    return abs(abs(Q.form(L.apply(p), L.apply(q))) - abs(Q.form(p, q)))

def rotation_witness_scan(p, q, kappa: float, angles: Optional[Sequence[float]] = None,
                          i: int = 1, j: int = 2) -> Tuple[float, float]:
    """(max witness, maximizing angle) over rotations in the (i, j)-plane."""
    p = np.asarray(p, dtype=float)
    if p.shape[0] < 3:
        raise DimensionMismatchError("rotation scans need d >= 3")
    grid = np.linspace(0.0, np.pi / 2, 181)[1:-1] if angles is None else np.asarray(angles, dtype=float)
    values = [lorentz_breaking_witness(p, q, LorentzTransform.rotation(p.shape[0], th, i, j), kappa)
              for th in grid]
    k = int(np.argmax(values))
    return float(values[k]), float(grid[k])

# -------------------------
# CHECKS & TABLES
# -------------------------
def check_sign_lemma(F: TruncatedFockSpace, kappa: float, check_id: str = "sign_lemma") -> CheckReport:
    """pQq > 0 whenever {v_q} strictly precedes {v_p}, over every pair of lattice modes."""
    Q = warp_matrix(kappa, F.spacetime_dim)
    configs, worst = 0, 0.0
    for a, mp in enumerate(F.modes):
        for b, mq in enumerate(F.modes):
            if not precedes(VelocitySupport(mq.velocity), VelocitySupport(mp.velocity)):
                continue
            configs += 1
            form = Q.form(mp.four_momentum, mq.four_momentum)
            if kappa > 0:
                worst = max(worst, -form if form <= 0 else 0.0)
    return make_report(check_id, worst, TOL, params={"kappa": kappa, "modes": F.n_modes, "configurations": configs},
                       passed=worst == 0.0 and configs > 0)

def cesaro_average_factor(nu: np.ndarray, T: float, direction: Direction = "in", tol: float = 1e-12) -> np.ndarray:
    """(1/T) int e^{i nu t} dt over [-T, 0] (in) or [0, T] (out); 1 where nu = 0 or T = 0."""
    nu = np.asarray(nu, dtype=float)
    out = np.ones(nu.shape, dtype=complex)
    if T == 0:
        return out
    nz = np.abs(nu) > tol
    x = nu[nz] * T
    if direction == "in":
        out[nz] = (1 - np.exp(-1j * x)) / (1j * x)
    else:
        out[nz] = (np.exp(1j * x) - 1) / (1j * x)
    return out

@dataclass
class CesaroDemo:
    table: pd.DataFrame
    target: np.ndarray
    target_residual: float          # limit vector against deformed_two_particle
    meta: Dict[str, float] = field(default_factory=dict)

    def shrinking(self, tol: float = 0.0) -> bool:
        """Deviation never grows along the T grid (up to tol)."""
        steps = self.table["deviation"].diff().dropna()
        return bool((steps <= tol).all())

def cesaro_convergence_demo(F: TruncatedFockSpace, A, A_prime, f, f_prime, kappa: float,
                            T_grid: Sequence[float], direction: Direction = "in",
                            freq_tol: float = 1e-9) -> CesaroDemo:
    """Distance of the averaged A_Q(f_t) A'_{-Q}(f'_t) Omega from its limit, per T."""
    g, g_prime = velocity_support(F, f), velocity_support(F, f_prime)
    later, earlier = (g_prime, g) if direction == "in" else (g, g_prime)
    if not precedes(later, earlier):
        raise PrecedenceError(f"test functions are not ordered for the {direction!r} configuration")
    Q = warp_matrix(kappa, F.spacetime_dim)
    filt = hepp_filter(F, HeppPacketSpec(f))
    filt_p = hepp_filter(F, HeppPacketSpec(f_prime))
    S = F.spectral
    B = filt.weights * S.to_spectral(warp(S, Q, A))
    Bp = filt_p.weights * S.to_spectral(warp(S, -Q, A_prime))
    omega = S.basis.conj().T @ F.vacuum()
    vac_col = int(np.argmax(np.abs(omega)))
    # frequencies depend only on momenta, so every vacuum column shares the one of vac_col
    inner = Bp @ omega
    nu = filt.frequencies + filt_p.frequencies[:, vac_col][None, :]
    terms = B * inner[None, :]
    static = np.abs(nu) <= freq_tol
    target = (terms * static).sum(axis=1)
    rows = []
    for T in T_grid:
        avg = (terms * cesaro_average_factor(nu, float(T), direction, freq_tol)).sum(axis=1)
        rows.append({"T": float(T), "deviation": float(np.linalg.norm(avg - target)), "kappa": kappa,
                     "direction": direction})
    table = pd.DataFrame(rows, columns=["T", "deviation", "kappa", "direction"])
    one = F.sector_projector(1)
    psi1 = one @ filt.apply(A) @ F.vacuum()
    psi2 = one @ filt_p.apply(A_prime) @ F.vacuum()
    reference = deformed_two_particle(F, psi1, psi2, Q, direction)
    limit = S.basis @ target
    residual = float(np.linalg.norm(limit - reference)) / max(1.0, float(np.linalg.norm(reference)))
    oscillating = int(np.count_nonzero(~static & (np.abs(terms) > 0)))
    return CesaroDemo(table, limit, residual, {"oscillating_terms": oscillating})

def _fmt(p: np.ndarray) -> str:
    return "(" + ",".join(f"{x:.6g}" for x in p) + ")"

def phase_table(F: TruncatedFockSpace, kappa: float, witness_pairs: Sequence[Tuple[np.ndarray, np.ndarray]] = ()
                ) -> List[PhaseRow]:
    """In and out phases for every ordered pair of lattice modes in an admissible in-configuration."""
    rows: List[PhaseRow] = []
    d, m = F.spacetime_dim, F.mass
    for mp in F.modes:
        for mq in F.modes:
            if not precedes(VelocitySupport(mq.velocity), VelocitySupport(mp.velocity)):
                continue
            p, q = mp.four_momentum, mq.four_momentum
            witness = rotation_witness_scan(p, q, kappa)[0] if d >= 3 else 0.0
            for direction in ("in", "out"):
                ph = sharp_phase(p, q, kappa, direction, mass=m)
                rows.append(PhaseRow(d=d, m=m, kappa=kappa, p=_fmt(p), q=_fmt(q), direction=direction,
                                     phase_re=ph.phase.real, phase_im=ph.phase.imag, witness=witness))
    for p, q in witness_pairs:
        p, q = np.asarray(p, float), np.asarray(q, float)
        ph = sharp_phase(p, q, kappa, "in")
        rows.append(PhaseRow(d=p.shape[0], m=float(np.sqrt(minkowski_inner(p, p))), kappa=kappa, p=_fmt(p),
                             q=_fmt(q), direction="in", phase_re=ph.phase.real, phase_im=ph.phase.imag,
                             witness=rotation_witness_scan(p, q, kappa)[0]))
    return rows

def reference_packets(F: TruncatedFockSpace) -> Tuple[np.ndarray, np.ndarray, OperatorMatrix]:
    """f on spatial momentum -1, f' on +1 (d = 2), and A = phi(h) with h spread over every mode."""
    left = F.mode_of_spatial((-1.0,) + (0.0,) * (F.spacetime_dim - 2))
    right = F.mode_of_spatial((1.0,) + (0.0,) * (F.spacetime_dim - 2))
    if left is None or right is None:
        raise PrecedenceError("the lattice has no modes at spatial momentum -1 and +1 along x1")
    f = np.zeros(F.n_modes, dtype=complex)
    f_prime = np.zeros(F.n_modes, dtype=complex)
    f[left] = 1.0
    f_prime[right] = 1.0
    return f, f_prime, free_field(F, np.ones(F.n_modes))
