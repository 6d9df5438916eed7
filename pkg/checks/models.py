from __future__ import annotations
from functools import lru_cache
from typing import List, Optional
import numpy as np
from core.fock import TruncatedFockSpace, reference_space
from core.geometry import LorentzTransform, PoincareElement, random_lorentz
from core.schema import RunConfig

@lru_cache(maxsize=16)
def _fock(d: int, K: int, delta: float, mass: float, cutoff: int, max_dim: int) -> TruncatedFockSpace:
    return reference_space(K, delta, mass, cutoff, d, max_dim)

def fock_model(config: RunConfig, K: Optional[int] = None, d: int = 2) -> TruncatedFockSpace:
    m = config.model
    return _fock(d, m.lattice_K if K is None else K, m.lattice_delta, m.mass, m.cutoff, m.max_dim)

def fock_models(config: RunConfig) -> List[TruncatedFockSpace]:
    """The configured lattice and the K = 2 refinement, both in d = 2."""
    return [fock_model(config, K) for K in sorted({config.model.lattice_K, 2})]

def random_amplitudes(rng: np.random.Generator, F: TruncatedFockSpace) -> np.ndarray:
    return rng.normal(size=F.n_modes) + 1j * rng.normal(size=F.n_modes)

def mild_poincare(rng: np.random.Generator, d: int) -> PoincareElement:
    """Moderate rapidities keep the 1e-12 budgets meaningful."""
    return PoincareElement(random_lorentz(rng, d, max_rapidity=0.5, factors=2), rng.normal(size=d))

def x1_boost(rng: np.random.Generator, d: int) -> PoincareElement:
    return PoincareElement.pure_lorentz(LorentzTransform.boost(d, rng.uniform(-1.0, 1.0), 1))
