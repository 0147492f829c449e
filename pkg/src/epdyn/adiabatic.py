"""Coupled-mode systems with lossy auxiliary cavities and their
algebraic elimination.

The auxiliary modes decay fast; setting their amplitude derivatives to
zero and substituting back yields effective complex couplings among the
primary modes (a Schur complement of the non-Hermitian generator
H - (i/2) diag(kappa)).  With the phase of one auxiliary leg at pi/2 the
effective vertical couplings become J_ab -/+ Jt, which realizes the
nonreciprocal stub ribbon; the eight-mode ring configuration maps onto
the diamond model the same way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import EpdynError
from .models.stub import idx_a, idx_b, idx_c


def induced_coupling(j1: float, j2: float, kappa_aux: float) -> float:
    """Magnitude of the auxiliary-mediated coupling, 2 j1 j2 / kappa."""
    if kappa_aux <= 0:
        raise EpdynError("auxiliary decay must be positive")
    return 2.0 * j1 * j2 / kappa_aux


def induced_decay(j: float, kappa_aux: float) -> float:
    """Decay inherited from an auxiliary leg, 4 j^2 / kappa."""
    if kappa_aux <= 0:
        raise EpdynError("auxiliary decay must be positive")
    return 4.0 * j**2 / kappa_aux


def _as_tuple(x, n: int, name: str) -> tuple[float, ...]:
    if np.isscalar(x):
        return (float(x),) * n
    t = tuple(float(v) for v in x)
    if len(t) != n:
        raise EpdynError(f"{name} needs {n} entries, got {len(t)}")
    return t


@dataclass(frozen=True)
class AdiabaticStubConfig:
    """Stub-ribbon cavity array: cells of modes a_n, b_n with connector
    modes c_n, plus one lossy auxiliary d_n per cell coupled to a_n with
    phase theta and to b_n without."""

    N: int
    j_ab: tuple[float, ...] | float
    j_ad: tuple[float, ...] | float
    j_bd: tuple[float, ...] | float
    theta: float
    kappa_d: tuple[float, ...] | float
    J: float = 1.0
    kappa_a: tuple[float, ...] | float = 0.0
    kappa_b: tuple[float, ...] | float = 0.0
    kappa_c: tuple[float, ...] | float = 0.0

    def __post_init__(self):
        if self.N < 2:
            raise EpdynError("need at least two cells")
        for name in ("j_ab", "j_ad", "j_bd", "kappa_d", "kappa_a", "kappa_b"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name), self.N, name))
        object.__setattr__(self, "kappa_c", _as_tuple(self.kappa_c, self.N - 1, "kappa_c"))
        if any(k <= 0 for k in self.kappa_d):
            raise EpdynError("auxiliary decays kappa_d must be positive")

    @property
    def primary_dim(self) -> int:
        return 3 * self.N - 1

    @property
    def dim(self) -> int:
        return self.primary_dim + self.N


@dataclass(frozen=True)
class AdiabaticDiamondConfig:
    """Diamond-ring cavity array: primary modes (a, b, c, d) plus four
    lossy auxiliaries f1..f4, one per ring edge; the first leg of each
    auxiliary carries phase theta_x."""

    g: tuple[float, float, float, float]  # ring couplings G1..G4
    g_first: tuple[float, float, float, float]  # phased legs G_a1, G_b1, G_c1, G_d1
    g_second: tuple[float, float, float, float]  # plain legs G_b2, G_c2, G_d2, G_a2
    thetas: tuple[float, float, float, float]
    kappa_f: tuple[float, float, float, float]
    kappa_primary: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("g", "g_first", "g_second", "thetas", "kappa_f", "kappa_primary"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name), 4, name))
        if any(k <= 0 for k in self.kappa_f):
            raise EpdynError("auxiliary decays kappa_f must be positive")

    @property
    def primary_dim(self) -> int:
        return 4

    @property
    def dim(self) -> int:
        return 8


def build_full(config) -> tuple[np.ndarray, list[float]]:
    """Coherent coupling matrix and per-mode decay list; the evolution
    generator is H_full - (i/2) diag(kappa)."""
    if isinstance(config, AdiabaticStubConfig):
        return _build_full_stub(config)
    if isinstance(config, AdiabaticDiamondConfig):
        return _build_full_diamond(config)
    raise EpdynError(f"unsupported config type {type(config).__name__}")


def _build_full_stub(c: AdiabaticStubConfig):
    d = c.dim
    p = c.primary_dim
    H = np.zeros((d, d), dtype=np.complex128)
    kappa = [0.0] * d
    phase = np.exp(1j * c.theta)
    for n in range(1, c.N + 1):
        a, b, aux = idx_a(n), idx_b(n), p + n - 1
        H[a, b] = H[b, a] = c.j_ab[n - 1]
        H[a, aux] = c.j_ad[n - 1] * phase
        H[aux, a] = c.j_ad[n - 1] * np.conj(phase)
        H[b, aux] = H[aux, b] = c.j_bd[n - 1]
        kappa[a] = c.kappa_a[n - 1]
        kappa[b] = c.kappa_b[n - 1]
        kappa[aux] = c.kappa_d[n - 1]
    for n in range(1, c.N):
        cc = idx_c(n)
        H[cc, idx_b(n)] = H[idx_b(n), cc] = c.J
        H[cc, idx_b(n + 1)] = H[idx_b(n + 1), cc] = c.J
        kappa[cc] = c.kappa_c[n - 1]
    return H, kappa


def _build_full_diamond(c: AdiabaticDiamondConfig):
    H = np.zeros((8, 8), dtype=np.complex128)
    kappa = list(c.kappa_primary) + list(c.kappa_f)
    ring = [(0, 1), (1, 2), (2, 3), (3, 0)]  # (a,b), (b,c), (c,d), (d,a)
    for edge, (x, y) in enumerate(ring):
        H[x, y] = H[y, x] = c.g[edge]
        aux = 4 + edge
        ph = np.exp(1j * c.thetas[edge])
        H[x, aux] = c.g_first[edge] * ph
        H[aux, x] = c.g_first[edge] * np.conj(ph)
        H[y, aux] = H[aux, y] = c.g_second[edge]
    return H, kappa


def eliminate(
    H_full,
    decay,
    aux_indices,
    include_induced_decay: bool = True,
) -> np.ndarray:
    """Effective non-Hermitian generator on the primary modes.

    Schur complement of M = H - (i/2) diag(kappa) over the auxiliary
    block; equivalent to zeroing the auxiliary time derivatives and
    substituting back.  ``include_induced_decay=False`` drops the
    diagonal (decay) part the auxiliaries induce, keeping only the
    induced couplings.
    """
    H_full = linalg.as_square(H_full)
    decay = np.asarray(decay, dtype=float)
    aux = sorted(aux_indices)
    if any(decay[i] <= 0 for i in aux):
        raise EpdynError("auxiliary decay must be positive for elimination")
    n = H_full.shape[0]
    primary = [i for i in range(n) if i not in set(aux)]
    M = H_full - 0.5j * np.diag(decay)
    Mpp = M[np.ix_(primary, primary)]
    Mpa = M[np.ix_(primary, aux)]
    Map = M[np.ix_(aux, primary)]
    Maa = M[np.ix_(aux, aux)]
    S = Mpa @ np.linalg.solve(Maa, Map)
    if not include_induced_decay:
        S = S - np.diag(np.diag(S))
    return Mpp - S


def effective_model(config, include_induced_decay: bool = True) -> np.ndarray:
    H, kappa = build_full(config)
    aux = range(config.primary_dim, config.dim)
    return eliminate(H, kappa, aux, include_induced_decay)


def compare_full_vs_effective(
    config, psi0_primary, times, include_induced_decay: bool = True
) -> np.ndarray:
    """Normalized-trajectory mismatch of the full lossy system against
    the eliminated effective model, per time."""
    H, kappa = build_full(config)
    p = config.primary_dim
    psi0 = linalg.as_vector(psi0_primary)
    if psi0.shape[0] != p:
        raise EpdynError(f"initial state must live on the {p} primary modes")
    full0 = np.zeros(config.dim, dtype=np.complex128)
    full0[:p] = psi0
    M_full = H - 0.5j * np.diag(np.asarray(kappa, dtype=float))
    H_eff = eliminate(H, kappa, range(p, config.dim), include_induced_decay)

    errors = []
    for t in np.asarray(times, dtype=float):
        full = (linalg.expm(-1j * t * M_full) @ full0)[:p]
        eff = linalg.expm(-1j * t * H_eff) @ psi0
        nf, ne = np.linalg.norm(full), np.linalg.norm(eff)
        if nf == 0 or ne == 0:
            raise EpdynError("trajectory vanished; cannot normalize")
        errors.append(float(np.linalg.norm(full / nf - eff / ne)))
    return np.array(errors)
