"""Closed-form time evolution at exceptional points.

A plan captures the prefactors of an initial state in a pseudo-complete
basis; evolution is then an explicit polynomial-in-t superposition with
exponential phase factors per eigenvalue cluster — time is a parameter,
never a step size.  The matrix-exponential path is kept alongside as the
brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import ComplexSpectrum, EpdynError
from .pcr import PcrBasis, PcrPair

DEFAULT_COEFF_TOL_FACTOR = 1e-10
DEFAULT_REALITY_TOL_FACTOR = 1e-9


@dataclass(frozen=True)
class ChainPlan:
    eigenvalue: complex
    length: int
    zetas: tuple[complex, ...]  # zeta_1 .. zeta_N
    rights: tuple[np.ndarray, ...]  # nu_1 .. nu_N


@dataclass(frozen=True)
class PropagatorPlan:
    basis: PcrBasis
    chains: tuple[ChainPlan, ...]
    simple_prefactors: tuple[complex, ...]
    simple_eigenvalues: tuple[complex, ...]
    simple_rights: tuple[np.ndarray, ...]
    dim: int


@dataclass(frozen=True)
class EvolutionResult:
    times: np.ndarray
    states: tuple[np.ndarray, ...]
    norms: np.ndarray
    populations: np.ndarray  # shape (len(times), dim)


@dataclass(frozen=True)
class AsymptoticResult:
    """Long-time classification under a real spectrum.

    ``kind`` is "bounded" (all growth degrees zero), "direction" (a single
    dominant direction exists), or "per_chain" (several chains tie at the
    top degree with distinct eigenvalues, so the limit direction rotates;
    the leading component of each chain is reported separately).
    """

    kind: str
    degree: int
    direction: np.ndarray | None = None
    components: tuple[tuple[complex, np.ndarray], ...] = ()


def plan(basis: PcrBasis, psi0) -> PropagatorPlan:
    """Prefactors of ``psi0``: inner products against the dual lefts."""
    psi0 = linalg.as_vector(psi0)
    if psi0.shape[0] != basis.dim:
        raise EpdynError(
            f"initial state has dimension {psi0.shape[0]}, basis {basis.dim}"
        )
    by_chain: dict[int, list[PcrPair]] = {}
    for p in basis.chain_pairs():
        by_chain.setdefault(p.chain_id, []).append(p)
    chains = []
    for members in by_chain.values():
        members.sort(key=lambda p: p.position_in_chain)
        chains.append(
            ChainPlan(
                eigenvalue=members[0].eigenvalue,
                length=len(members),
                zetas=tuple(np.vdot(p.left, psi0) for p in members),
                rights=tuple(p.right for p in members),
            )
        )
    simples = basis.simple_pairs()
    return PropagatorPlan(
        basis=basis,
        chains=tuple(chains),
        simple_prefactors=tuple(np.vdot(p.left, psi0) for p in simples),
        simple_eigenvalues=tuple(p.eigenvalue for p in simples),
        simple_rights=tuple(p.right for p in simples),
        dim=basis.dim,
    )


def evolve_closed_form(p: PropagatorPlan, t: float) -> np.ndarray:
    out = np.zeros(p.dim, dtype=np.complex128)
    for ch in p.chains:
        phase = np.exp(-1j * ch.eigenvalue * t)
        for y in range(1, ch.length + 1):
            coeff = 0.0 + 0.0j
            for pp in range(0, ch.length - y + 1):
                coeff += (
                    (-1j) ** pp
                    * ch.zetas[y + pp - 1]
                    * t**pp
                    / math.factorial(pp)
                )
            out += coeff * phase * ch.rights[y - 1]
    for iota, E, w in zip(
        p.simple_prefactors, p.simple_eigenvalues, p.simple_rights
    ):
        out += iota * np.exp(-1j * E * t) * w
    return out


def evolve_oracle(H, psi0, t: float) -> np.ndarray:
    """Ground truth: expm(-i H t) applied to the state."""
    H = linalg.as_square(H)
    psi0 = linalg.as_vector(psi0)
    return linalg.expm(-1j * t * H) @ psi0


def evolve_grid(p: PropagatorPlan, times) -> EvolutionResult:
    times = np.asarray(times, dtype=float)
    if times.size and np.any(np.diff(times) <= 0):
        raise EpdynError("times must be strictly increasing")
    states = tuple(evolve_closed_form(p, t) for t in times)
    norms = np.array([np.linalg.norm(s) for s in states])
    pops = np.array([np.abs(s) ** 2 for s in states])
    return EvolutionResult(times, states, norms, pops)


def _coeff_tol(p: PropagatorPlan, coeff_tol: float | None) -> float:
    if coeff_tol is not None:
        return coeff_tol
    total = math.sqrt(
        sum(abs(z) ** 2 for ch in p.chains for z in ch.zetas)
        + sum(abs(i) ** 2 for i in p.simple_prefactors)
    )
    return DEFAULT_COEFF_TOL_FACTOR * max(1.0, total)


def growth_degree(p: PropagatorPlan, coeff_tol: float | None = None):
    """Per chain, per position: highest power of t with a surviving
    prefactor (None when the vector is absent from the evolution)."""
    tol = _coeff_tol(p, coeff_tol)
    degrees = []
    for ch in p.chains:
        per_pos = []
        for y in range(1, ch.length + 1):
            alive = [
                pp
                for pp in range(0, ch.length - y + 1)
                if abs(ch.zetas[y + pp - 1]) > tol
            ]
            per_pos.append(max(alive) if alive else None)
        degrees.append(tuple(per_pos))
    return tuple(degrees)


def asymptotic_direction(
    p: PropagatorPlan,
    H=None,
    reality_tol: float | None = None,
    coeff_tol: float | None = None,
) -> AsymptoticResult:
    """Dominant long-time direction in the real-spectrum regime."""
    if reality_tol is None:
        scale = 1.0
        if H is not None:
            scale = max(1.0, float(np.linalg.norm(np.asarray(H), 2)))
        reality_tol = DEFAULT_REALITY_TOL_FACTOR * scale
    eigs = [ch.eigenvalue for ch in p.chains] + list(p.simple_eigenvalues)
    worst = max((abs(e.imag) for e in eigs), default=0.0)
    if worst > reality_tol:
        raise ComplexSpectrum(
            f"max |Im E| = {worst:.3e} exceeds {reality_tol:.3e}; asymptotics "
            "are exponential, not polynomial"
        )
    tol = _coeff_tol(p, coeff_tol)
    degrees = growth_degree(p, coeff_tol)
    top = 0
    for per_pos in degrees:
        for d in per_pos:
            if d is not None:
                top = max(top, d)
    if top == 0:
        return AsymptoticResult(kind="bounded", degree=0)

    # Only position-1 vectors can carry the global top degree.
    components = []
    for ch in p.chains:
        if ch.length - 1 < top:
            continue
        zeta = ch.zetas[top]  # zeta_{1+top}
        if abs(zeta) <= tol:
            continue
        vec = (-1j) ** top * zeta * ch.rights[0] / math.factorial(top)
        components.append((ch.eigenvalue, vec))
    distinct = {round(e.real, 9) for e, _ in components}
    if len(distinct) > 1:
        comps = tuple(
            (e, v / np.linalg.norm(v)) for e, v in components
        )
        return AsymptoticResult(kind="per_chain", degree=top, components=comps)
    direction = np.sum([v for _, v in components], axis=0)
    direction = linalg.fix_phase(direction / np.linalg.norm(direction))
    return AsymptoticResult(kind="direction", degree=top, direction=direction)
