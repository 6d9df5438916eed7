from __future__ import annotations
from typing import List, Dict, Any, Optional, Literal
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from core.errors import ConfigError

# -------------------------
# RUN CONFIG (Single Source of Truth)
# -------------------------

class ModelParams(BaseModel):
    dim: int = Field(2, ge=2)
    mass: float = Field(1.0, gt=0)
    kappas: List[float] = Field(default_factory=lambda: [1.0])
    lattice_K: int = Field(1, ge=0)       # modes on {-K..K}^(d-1) * delta
    lattice_delta: float = Field(1.0, gt=0)
    cutoff: int = Field(2, ge=0)          # N_max
    max_dim: int = Field(5000, ge=1)      # dimension guard
    degree_cap: int = Field(3, ge=1)      # D

    @field_validator("kappas")
    @classmethod
    def _kappas_nonnegative(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one kappa is required")
        if any(k < 0 for k in v):
            raise ValueError("kappa must be >= 0")
        return v

class Tolerances(BaseModel):
    exact: float = 1e-12
    span: float = 1e-10
    phase: float = 1e-10
    unit: float = 1e-14
    merge: float = 1e-9
    sampling: float = 1e-12

class Battery(BaseModel):
    random_models: int = Field(200, ge=1)
    max_model_dim: int = Field(200, ge=2)
    commutation_instances: int = Field(50, ge=1)
    covariance_instances: int = Field(20, ge=1)
    fact_samples: int = Field(10_000, ge=1)
    surjectivity_samples: int = Field(1_000, ge=1)
    gl_random_q: int = Field(20, ge=1)
    negative_control_fraction: float = Field(0.9, ge=0, le=1)
    cesaro_times: List[float] = Field(default_factory=lambda: [1.0, 10.0, 100.0])

class RunConfig(BaseModel):
    model: ModelParams = Field(default_factory=ModelParams)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    battery: Battery = Field(default_factory=Battery)
    seed: int = 42
    suites: List[str] = Field(default_factory=lambda: ["all"])
    workers: int = Field(1, ge=1)
    record_timings: bool = False
    out: str = "reports"
    format: Literal["json", "csv", "text"] = "json"

    @field_validator("suites")
    @classmethod
    def _known_suites(cls, v: List[str]) -> List[str]:
        unknown = [s for s in v if s not in (*SUITES, "all")]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
        return v

    def selected_suites(self) -> List[str]:
        if "all" in self.suites:
            return list(SUITES)
        return [s for s in SUITES if s in self.suites]

SUITES = ("geometry", "lemmas", "axioms", "scattering", "germ")

# -------------------------
# REPORTS
# -------------------------

def _plain(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    return v

class CheckReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    check_id: str
    anchor: str = "plumbing"
    suite: str = ""
    params: Dict[str, Any] = Field(default_factory=dict)
    residual: float = 0.0
    tol: float = 0.0
    passed: bool = Field(True, alias="pass")
    hard: bool = True          # soft demonstrations never affect the exit status
    notes: str = ""
    runtime_ms: Optional[float] = None

    @field_validator("params", mode="before")
    @classmethod
    def _plain_params(cls, v: Any) -> Any:
        return _plain(v or {})

    @field_validator("residual", "tol", mode="before")
    @classmethod
    def _plain_float(cls, v: Any) -> float:
        return float(v)

    @property
    def family(self) -> str:
        return self.check_id.split("[", 1)[0]

class PhaseRow(BaseModel):
    d: int
    m: float
    kappa: float
    p: str
    q: str
    direction: str
    phase_re: float
    phase_im: float
    witness: float = 0.0

# -------------------------
# CHECK FAMILY -> ANCHOR MAP
# -------------------------
ANCHORS: Dict[str, str] = {
    # geometry
    "inner_product_invariance": "Lorentz inner product xy = x0y0 - sum xiyi",
    "poincare_group": "semidirect product (L,x)(L',x') = (LL', x + Lx')",
    "skewness": "Q_kappa is skew symmetric for the Lorentz form",
    "wedge_membership": "standard wedge W0 = {x1 >= |x0|}",
    "causal_complement": "causal complement W0' of the standard wedge",
    "wedge_subset": "isotony: W1 subset W2",
    "fact_i": "lambda W0 subset W0 implies L Q_kappa L^-1 = Q_kappa",
    "fact_i_corollary": "lambda1 W0 = lambda2 W0 implies equal warp matrices",
    "fact_ii": "lambda' W0 subset W0' implies L Q_kappa L^-1 = -Q_kappa",
    "fact_iii": "Q_kappa V+ = W0",
    "shifted_complement": "W0 + Q_kappa p subset W0 for p in V+",
    # lemmas
    "left_right": "left and right warped convolutions coincide",
    "left_right_negative": "left and right warped convolutions coincide (non-skew control)",
    "adjoint": "adjoints commute with the warped convolution",
    "composition": "(F_Q1)_Q2 = F_(Q1+Q2)",
    "commutation": "F_Q G_-Q = G_-Q F_Q under the spectral hypothesis",
    "commutation_control": "F_Q G_-Q = G_-Q F_Q under the spectral hypothesis (control)",
    "covariance_rotation": "alpha_lambda(F_Q) = (alpha_lambda F)_(L Q L^-1)",
    "covariance_boost": "alpha_lambda(F_Q) = (alpha_lambda F)_(L Q L^-1)",
    "vacuum_fixed_point": "A_Q Omega = A Omega",
    "spectral_calculus": "dE(p) f(P) = f(p) dE(p)",
    # axioms
    "gl_coincidence": "deformation coincides with the free-field twist",
    "truncated_ccr": "free-field realization of the wedge algebras",
    "definition_consistency": "deformed algebra independent of the chosen lambda",
    "isotony": "deformed isotony via pure translations",
    "assignment_covariance": "alpha_lambda(A_kappa(W)) = A_kappa(lambda W)",
    "locality_exact": "[alpha_Qp(A), alpha_-Qq(B)] = 0 implies wedge locality",
    "locality_free_field": "[alpha_Qp(A), alpha_-Qq(B)] = 0 implies wedge locality",
    "reeh_schlieder": "A_kappa(W) Omega contains A(W) Omega",
    "adjoint_stability": "each deformed wedge algebra is a *-algebra",
    "kappa_zero": "kappa = 0 recovers the undeformed theory",
    # scattering
    "sharp_phase_equivalence": "|p x_kappa q>in = exp(i|pQq|) |p x q>in",
    "out_in_conjugation": "|p x_kappa q>out = exp(-i|pQq|) |p x q>out",
    "sign_lemma": "precedence of velocity supports",
    "kernel_ratio_modulus": "cross sections unchanged by the deformation",
    "s_matrix_crosscheck": "elastic scattering kernel relation",
    "lorentz_breaking": "scattering breaks Lorentz symmetry for d > 2",
    "lorentz_breaking_d2": "scattering breaks Lorentz symmetry for d > 2",
    "hepp_shell": "single particle states A(f_t) Omega independent of t",
    "cesaro": "existence of the asymptotic two-particle limits",
    # germ
    "germ": "germ conditions (a) and (b)",
    "germ_full_algebra": "germ conditions (a) and (b)",
    "germ_empty": "germ conditions (a) and (b)",
}

def anchor_for(check_id: str) -> str:
    return ANCHORS.get(check_id.split("[", 1)[0], "plumbing")

def make_report(check_id: str, residual: float, tol: float, *, params: Optional[Dict[str, Any]] = None,
                passed: Optional[bool] = None, hard: bool = True, notes: str = "") -> CheckReport:
    residual = float(residual)
    ok = bool(residual < tol) if passed is None else bool(passed)
    return CheckReport(check_id=check_id, anchor=anchor_for(check_id), params=params or {},
                       residual=residual, tol=tol, passed=ok, hard=hard, notes=notes)

# -------------------------
# Helpers: dot get/set + flatten/unflatten
# -------------------------
def _split_key(k: str) -> List[str]:
    return k.split(".")

def dot_get(obj: Any, path: str, default=None):
    cur = obj
    for part in _split_key(path):
        if isinstance(cur, dict):
            cur = cur.get(part, default)
        else:
            cur = getattr(cur, part, default)
        if cur is default:
            break
    return cur

def dot_set(d: Dict[str, Any], path: str, value: Any):
    parts = _split_key(path)
    cur = d
    for p in parts[:-1]:
        if p not in cur or not isinstance(cur[p], dict):
            cur[p] = {}
        cur = cur[p]
    cur[parts[-1]] = value

def flatten_model(m: Any) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    def _rec(prefix: str, v: Any):
        if isinstance(v, BaseModel):
            for k, vv in v.model_dump().items():
                _rec(f"{prefix}.{k}" if prefix else k, vv)
        elif isinstance(v, dict):
            for k, vv in v.items():
                _rec(f"{prefix}.{k}" if prefix else k, vv)
        else:
            out[prefix] = v
    _rec("", m)
    return out

def unflatten_to_config(d: Dict[str, Any]) -> RunConfig:
    nested: Dict[str, Any] = {}
    for k, v in d.items():
        dot_set(nested, k, v)
    return RunConfig.model_validate(nested)

# -------------------------
# Aliases (short -> canonical)
# -------------------------
ALIASES: Dict[str, str] = {
    "d": "model.dim",
    "dim": "model.dim",
    "m": "model.mass",
    "mass": "model.mass",
    "kappa": "model.kappas",
    "kappas": "model.kappas",
    "K": "model.lattice_K",
    "delta": "model.lattice_delta",
    "N_max": "model.cutoff",
    "cutoff": "model.cutoff",
    "D": "model.degree_cap",
    "max_dim": "model.max_dim",
    "suite": "suites",
}

def apply_aliases(d: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(d)
    for src, dst in ALIASES.items():
        if src in out and src != dst:
            v = out.pop(src)
            out.setdefault(dst, v)
    return out

def coerce_and_fill(raw: Optional[Dict[str, Any]], base: Optional[RunConfig] = None) -> RunConfig:
    """Validate a (nested or dot-keyed) config mapping on top of ``base`` or the defaults."""
    raw = apply_aliases(flatten_model(raw or {}))
    template = base or RunConfig()
    flat = flatten_model(template)
    unknown = sorted(k for k in raw if k not in flat)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    flat.update(raw)
    # lists: coerce scalars and comma-separated strings -> lists
    for k, v in list(flat.items()):
        if isinstance(dot_get(template, k), list) and not isinstance(v, list):
            flat[k] = [x.strip() for x in v.split(",") if x.strip()] if isinstance(v, str) else [v]
    try:
        return unflatten_to_config(flat)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
