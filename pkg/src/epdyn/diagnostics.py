"""Observables and detectors.

Mode-nonorthogonality (Petermann) reports, density-matrix trajectories
with fidelity/purity series, population splitting ratios, symmetry
residuals, and the entangled-state transfer fidelities of the diamond
ring's crossed-chain scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import EpdynError, PairingAmbiguity
from .models.diamond import DiamondRingParams, diamond_analytic_basis
from .propagator import evolve_closed_form, plan

PETERMANN_CAP = 1e15


@dataclass(frozen=True)
class PetermannReport:
    per_mode: tuple[float, ...]
    average: float
    inverse_average: float
    diverged: bool


@dataclass(frozen=True)
class DensityTrajectory:
    """Density-matrix evolution rho(t) = e^{-iHt} rho0 e^{iH^dag t}.

    ``matrices`` are trace-normalized; ``diagonals`` are the diagonals of
    the raw, unnormalized rho(t) (these carry the polynomial growth whose
    roots are asymptotically linear), ``diagonals_normalized`` of the
    normalized one.  ``fidelity`` is <target|rho_nor|target> when a target
    was supplied.
    """

    times: np.ndarray
    matrices: tuple[np.ndarray, ...]
    purity: np.ndarray
    diagonals: np.ndarray  # shape (nt, dim), unnormalized
    diagonals_normalized: np.ndarray
    fidelity: np.ndarray | None = None


def _group_by_tol(values: np.ndarray, tol: float) -> list[list[int]]:
    order = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(values[i] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def petermann(
    spec: linalg.SpectralData,
    *,
    cap: float = PETERMANN_CAP,
    pairing_tol: float | None = None,
) -> PetermannReport:
    """Per-mode nonorthogonality factors K_m = <L|L><R|R>/|<L|R>|^2.

    Left and right modes are paired by eigenvalue proximity.  Inside a
    degenerate eigenvalue group the individual eigenvectors are gauge
    arbitrary, so the group's factors are computed basis-independently as
    1/sigma_i^2 for the principal angles sigma_i between the left and
    right eigensubspaces; this reduces to the per-mode formula when the
    group is a singleton.  Factors beyond ``cap`` are clipped and the
    report flagged as diverged.
    """
    w = spec.eigenvalues
    n = len(w)
    if pairing_tol is None:
        pairing_tol = 1e-8 * max(1.0, float(np.max(np.abs(w))) if n else 1.0)

    groups = _group_by_tol(w, pairing_tol)
    for a, b in zip(groups, groups[1:]):
        gap = abs(w[b[0]] - w[a[-1]])
        if gap < 10 * pairing_tol:
            raise PairingAmbiguity(
                f"adjacent eigenvalue groups separated by only {gap:.3e}; "
                "left/right matching is not clearly unique"
            )

    ks: dict[int, float] = {}
    for group in groups:
        QL, _ = np.linalg.qr(spec.left_vectors[:, group])
        QR, _ = np.linalg.qr(spec.right_vectors[:, group])
        sigma = np.linalg.svd(QL.conj().T @ QR, compute_uv=False)
        for idx, s in zip(group, sigma):
            ks[idx] = 1.0 / s**2 if s > 1.0 / math.sqrt(cap) else math.inf

    per_mode = []
    diverged = False
    for i in range(n):
        k = ks[i]
        if not math.isfinite(k) or k > cap:
            k = cap
            diverged = True
        per_mode.append(k)
    avg = float(np.mean(per_mode)) if per_mode else 1.0
    return PetermannReport(
        per_mode=tuple(per_mode),
        average=avg,
        inverse_average=1.0 / avg,
        diverged=diverged,
    )


def _check_density(rho: np.ndarray, tol: float = 1e-9):
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise EpdynError("initial density matrix is not Hermitian")
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if evals.min() < -tol:
        raise EpdynError("initial density matrix is not positive semidefinite")
    if abs(np.trace(rho) - 1.0) > tol:
        raise EpdynError("initial density matrix must have unit trace")


def density_evolve(H, rho0, times, target=None) -> DensityTrajectory:
    H = linalg.as_square(H)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    times = np.asarray(times, dtype=float)
    _check_density(rho0)
    if target is not None:
        target = linalg.as_vector(target)
        target = target / np.linalg.norm(target)

    mats, purity, diags, diags_nor, fids = [], [], [], [], []
    for t in times:
        U = linalg.expm(-1j * t * H)
        rho = U @ rho0 @ U.conj().T
        tr = float(np.trace(rho).real)
        rho_nor = rho / tr
        mats.append(rho_nor)
        purity.append(float(np.trace(rho_nor @ rho_nor).real))
        diags.append(np.diag(rho).real)
        diags_nor.append(np.diag(rho_nor).real)
        if target is not None:
            fids.append(float(np.vdot(target, rho_nor @ target).real))
    return DensityTrajectory(
        times=times,
        matrices=tuple(mats),
        purity=np.array(purity),
        diagonals=np.array(diags),
        diagonals_normalized=np.array(diags_nor),
        fidelity=np.array(fids) if target is not None else None,
    )


def analytic_mixed_fidelity(epsilon: float, weights, t: float) -> float:
    """Closed-form fidelity of a diagonal mixed state evolved at the
    third-order diamond exceptional point (real epsilon, unit kappa)."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,):
        raise EpdynError("expected four diagonal weights")
    if w.min() < -1e-12 or abs(w.sum() - 1.0) > 1e-9:
        raise EpdynError("weights must be nonnegative and sum to one")
    ca, cb, cc, cd = w
    e2 = epsilon**2
    quart = 4 * (cb + cd) * (1 + e2) ** 2 * t**4
    num = (cb + cd) + 8 * (ca + cc * e2) * t**2 + quart
    den = 2 + 4 * (2 * (ca + cc * e2) + (cb + cd) * (1 + e2)) * t**2 + quart
    return num / den


def splitting_ratio(populations, sites) -> list[float]:
    """Population percentages over ``sites``, renormalized to 100."""
    pops = np.asarray(populations, dtype=float)
    sel = pops[list(sites)]
    total = sel.sum()
    if total <= 0:
        raise EpdynError("no population on the requested sites")
    return [100.0 * p / total for p in sel]


def symmetry_residuals(H, operators: dict) -> dict[str, float]:
    """Spectral-norm defects of the named symmetries.

    ``operators`` maps any of "eta" (similarity to the adjoint), "gamma"
    (anticommuting chiral operator) and "parity" (antilinear symmetry,
    applied to the entrywise conjugate) to their matrices.
    """
    H = linalg.as_square(H)
    out = {}
    for name, op in operators.items():
        op = linalg.as_square(op)
        if op.shape != H.shape:
            raise EpdynError(f"operator {name!r} dimension mismatch")
        inv = np.linalg.inv(op)
        if name == "eta":
            out[name] = float(np.linalg.norm(inv @ H @ op - H.conj().T, 2))
        elif name == "gamma":
            out[name] = float(np.linalg.norm(op @ H @ inv + H, 2))
        elif name == "parity":
            out[name] = float(np.linalg.norm(op @ H.conj() @ inv - H, 2))
        else:
            raise EpdynError(f"unknown symmetry {name!r}")
    return out


def entanglement_transfer_fidelities(
    params: DiamondRingParams, psi0, times
) -> tuple[np.ndarray, np.ndarray]:
    """Fidelities of the normalized evolving state against the two
    coalescing entangled eigenstates of a crossed-chain scenario.

    Returns (initial-form series, target-form series): the first chain's
    bottom vector is the B/D-type entangled state, the second chain's the
    A/C-type one.
    """
    basis = diamond_analytic_basis(params)
    if not basis.scenario.startswith("double"):
        raise EpdynError(
            "transfer fidelities need a doubly degenerate second-order "
            f"scenario, got {basis.scenario}"
        )
    pcr = basis.pcr_basis()
    psi0 = linalg.as_vector(psi0)
    p = plan(pcr, psi0)
    bottoms = []
    for pair in pcr.chain_pairs():
        if pair.position_in_chain == 1:
            v = pair.right / np.linalg.norm(pair.right)
            bottoms.append((pair.chain_id, v))
    bottoms.sort(key=lambda cv: cv[0])
    v_init, v_target = bottoms[0][1], bottoms[1][1]

    f_init, f_target = [], []
    for t in np.asarray(times, dtype=float):
        psi = evolve_closed_form(p, t)
        psi = psi / np.linalg.norm(psi)
        f_init.append(abs(np.vdot(v_init, psi)) ** 2)
        f_target.append(abs(np.vdot(v_target, psi)) ** 2)
    return np.array(f_init), np.array(f_target)


def random_diagonal_weights(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Flat-Dirichlet diagonal weights for a random mixed state."""
    return rng.dirichlet(np.ones(dim))


def mixed_ensemble_series(
    H, target, times, n_states: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Mean fidelity and purity series over seeded random diagonal mixed
    states.  One matrix exponential per time point serves the whole
    ensemble."""
    H = linalg.as_square(H)
    dim = H.shape[0]
    target = linalg.as_vector(target)
    target = target / np.linalg.norm(target)
    rng = np.random.default_rng(seed)
    weights = np.array([random_diagonal_weights(rng, dim) for _ in range(n_states)])

    mean_f, mean_p = [], []
    for t in np.asarray(times, dtype=float):
        U = linalg.expm(-1j * t * H)
        gram = U.conj().T @ U  # <u_x|u_y>
        col_norms = np.diag(gram).real
        amp = np.abs(target.conj() @ U) ** 2  # |<target|u_x>|^2
        g2 = np.abs(gram) ** 2
        traces = weights @ col_norms
        fs = (weights @ amp) / traces
        ps = np.einsum("si,ij,sj->s", weights, g2, weights) / traces**2
        mean_f.append(float(np.mean(fs)))
        mean_p.append(float(np.mean(ps)))
    return np.array(mean_f), np.array(mean_p)


def fit_slope(times, values, window_fraction: float = 1 / 3) -> float:
    """Least-squares slope over the trailing fraction of the window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    n = len(times)
    start = n - max(2, int(math.ceil(n * window_fraction)))
    t, v = times[start:], values[start:]
    A = np.vstack([t, np.ones_like(t)]).T
    slope, _ = np.linalg.lstsq(A, v, rcond=None)[0]
    return float(slope)
