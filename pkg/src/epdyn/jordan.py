"""Eigenvalue clustering and numerical Jordan-chain construction.

Detects clusters of (near-)coincident eigenvalues, computes algebraic and
geometric multiplicities, and extracts right and left Jordan chains.  Chain
tops live in ker((H-E)^L) \\ ker((H-E)^{L-1}) and the rest of each chain is
generated downward by multiplication, which keeps the chain relations exact
to roundoff.  Chain lengths are cross-checked against the nullity sequence
of (H-E)^k on every detection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import ChainInconsistent

DEFAULT_CLUSTER_TOL_FACTOR = 1e-5
DEFAULT_CHAIN_RESIDUAL_TOL_FACTOR = 1e-8


@dataclass(frozen=True)
class EigenvalueCluster:
    value: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    member_indices: tuple[int, ...]

    @property
    def defective(self) -> bool:
        return self.geometric_multiplicity < self.algebraic_multiplicity


@dataclass(frozen=True)
class JordanChain:
    """A right chain (H-E)psi_1 = 0, (H-E)psi_k = psi_{k-1} together with
    the analogous left chain built on the adjoint at conj(E).

    Left and right chains of equal length are paired positionally here;
    the physically meaningful pairing (which may cross chains when several
    equal-length chains share one eigenvalue) is settled downstream.
    """

    eigenvalue: complex
    right_chain: tuple[np.ndarray, ...]
    left_chain: tuple[np.ndarray, ...]

    @property
    def length(self) -> int:
        return len(self.right_chain)


@dataclass(frozen=True)
class JordanStructure:
    """Complete cluster/chain decomposition of a matrix.

    ``chains[i]`` holds the defective chains (length >= 2) of cluster ``i``
    in descending length order; ``simple_modes[i]`` holds the leftover
    diagonalizable (left, right) vector pairs of that cluster.
    """

    clusters: tuple[EigenvalueCluster, ...]
    chains: tuple[tuple[JordanChain, ...], ...]
    simple_modes: tuple[tuple[tuple[np.ndarray, np.ndarray], ...], ...]
    dim: int = field(default=0)

    def cluster_count(self) -> int:
        return len(self.clusters)


def default_cluster_tol(H: np.ndarray) -> float:
    # Roundoff splits an order-N coalescence by ~eps**(1/N), so the
    # threshold must sit well above eps**(1/3) ~ 6e-6 relative.
    return DEFAULT_CLUSTER_TOL_FACTOR * max(1.0, float(np.linalg.norm(H, 2)))


def default_chain_residual_tol(H: np.ndarray) -> float:
    return DEFAULT_CHAIN_RESIDUAL_TOL_FACTOR * max(1.0, float(np.linalg.norm(H, 2)))


def cluster_eigenvalues(
    H, spectral: linalg.SpectralData, cluster_tol: float | None = None
) -> list[EigenvalueCluster]:
    """Single-linkage clustering of the eigenvalues of ``spectral``.

    Cluster centroid is the mean of members; geometric multiplicity is the
    nullity of H - centroid.
    """
    H = linalg.as_square(H)
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(H)
    w = spectral.eigenvalues
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(w[i] - w[j]) <= cluster_tol:
                parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    clusters = []
    for members in groups.values():
        centroid = complex(np.mean(w[members]))
        geo = H.shape[0] - linalg.rank(H - centroid * np.eye(H.shape[0]))
        clusters.append(
            EigenvalueCluster(centroid, len(members), geo, tuple(sorted(members)))
        )
    clusters.sort(key=lambda c: (c.value.real, c.value.imag))
    return clusters


def _power_kernels(A: np.ndarray, max_power: int, rank_tol: float):
    """Orthonormal kernel bases of A^k for k = 1..max_power.

    The significance cutoff is absolute, referenced to ||A||^k, so that a
    numerically-zero power (all singular values at roundoff) is correctly
    read as having a full kernel.
    """
    n = A.shape[0]
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    kernels = []
    P = np.eye(n, dtype=np.complex128)
    for k in range(1, max_power + 1):
        P = P @ A
        U, s, V = linalg.svd(P)
        cutoff = rank_tol * scale**k
        r = int(np.count_nonzero(s > cutoff))
        kernels.append(V[:, r:])
    return kernels


def _extract_chains(A: np.ndarray, alg: int, rank_tol: float):
    """Chain vectors of the nilpotent action of A restricted to its
    generalized kernel. Returns a list of chains (lists bottom-to-top),
    descending length."""
    n = A.shape[0]
    kernels = _power_kernels(A, alg, rank_tol)
    nullities = [0] + [K.shape[1] for K in kernels]
    weyr = [nullities[k] - nullities[k - 1] for k in range(1, len(nullities))]
    if nullities[-1] != alg:
        raise ChainInconsistent(
            f"generalized kernel dimension {nullities[-1]} != algebraic "
            f"multiplicity {alg}"
        )
    L = max(k for k in range(1, len(nullities)) if weyr[k - 1] > 0)

    chains: list[list[np.ndarray]] = []
    for k in range(L, 0, -1):
        have = sum(1 for c in chains if len(c) >= k)
        need = weyr[k - 1] - have
        if need < 0:
            raise ChainInconsistent("nullity sequence is not monotone concave")
        if need == 0:
            continue
        # Deflate ker(A^k) against ker(A^{k-1}) and the level-k vectors of
        # the longer chains already built, then pick tops from what remains.
        blockers = [kernels[k - 2]] if k >= 2 else []
        level_k = [c[k - 1] for c in chains if len(c) >= k]
        if level_k:
            blockers.append(np.column_stack(level_k))
        Kk = kernels[k - 1]
        if blockers:
            B = np.column_stack(blockers)
            Q, _ = np.linalg.qr(B)
            M = Kk - Q @ (Q.conj().T @ Kk)
        else:
            M = Kk
        U, s, V = linalg.svd(M)
        if s.size < need or s[need - 1] <= 1e-8:
            raise ChainInconsistent(
                f"could not isolate {need} chain tops at height {k}"
            )
        for j in range(need):
            top = U[:, j]
            chain = [top]
            for _ in range(k - 1):
                chain.append(A @ chain[-1])
            chain.reverse()  # bottom (true eigenvector) first
            nrm = np.linalg.norm(chain[0])
            if nrm <= 1e-13:
                raise ChainInconsistent("chain collapsed while descending")
            chain = [v / nrm for v in chain]
            phase_ref = linalg.fix_phase(chain[0])
            # fix_phase returns v * (|x|/x); recover that factor and apply
            # it chain-wide so the chain relations survive the gauge fix
            idx = int(np.argmax(np.abs(chain[0])))
            factor = phase_ref[idx] / chain[0][idx]
            chain = [v * factor for v in chain]
            chains.append(chain)
    chains.sort(key=lambda c: -len(c))
    return chains, weyr


def build_jordan_chains(
    H,
    cluster: EigenvalueCluster,
    rank_tol: float | None = None,
    chain_residual_tol: float | None = None,
) -> list[JordanChain]:
    """All Jordan chains (including length-1 ones) of one cluster.

    Right chains come from H - E, left chains from the adjoint at conj(E);
    equal-length left and right chains are paired in extraction order.
    """
    H = linalg.as_square(H)
    n = H.shape[0]
    if rank_tol is None:
        rank_tol = linalg.default_rank_tol(n)
    if chain_residual_tol is None:
        chain_residual_tol = default_chain_residual_tol(H)

    E = cluster.value
    A = H - E * np.eye(n)
    right, weyr_r = _extract_chains(A, cluster.algebraic_multiplicity, rank_tol)
    left, weyr_l = _extract_chains(
        A.conj().T, cluster.algebraic_multiplicity, rank_tol
    )
    if [len(c) for c in right] != [len(c) for c in left]:
        raise ChainInconsistent(
            "left/right chain length multisets disagree: "
            f"{[len(c) for c in right]} vs {[len(c) for c in left]}"
        )

    chains = []
    for rc, lc in zip(right, left):
        for k, v in enumerate(rc):
            target = rc[k - 1] if k else np.zeros(n, dtype=np.complex128)
            if np.linalg.norm(A @ v - target) > chain_residual_tol:
                raise ChainInconsistent(
                    f"right chain relation violated at position {k + 1}"
                )
        for k, v in enumerate(lc):
            target = lc[k - 1] if k else np.zeros(n, dtype=np.complex128)
            if np.linalg.norm(A.conj().T @ v - target) > chain_residual_tol:
                raise ChainInconsistent(
                    f"left chain relation violated at position {k + 1}"
                )
        chains.append(JordanChain(E, tuple(rc), tuple(lc)))
    return chains


def analyze(
    H,
    cluster_tol: float | None = None,
    rank_tol: float | None = None,
    chain_residual_tol: float | None = None,
    spectral: linalg.SpectralData | None = None,
) -> JordanStructure:
    """Full decomposition: clusters, defective chains, and simple modes."""
    H = linalg.as_square(H)
    if spectral is None:
        spectral = linalg.eig_general(H)
    clusters = cluster_eigenvalues(H, spectral, cluster_tol)

    all_chains = []
    all_simple = []
    total = 0
    for cl in clusters:
        chains = build_jordan_chains(H, cl, rank_tol, chain_residual_tol)
        defective = tuple(c for c in chains if c.length >= 2)
        simple = tuple(
            (c.left_chain[0], c.right_chain[0]) for c in chains if c.length == 1
        )
        got = sum(c.length for c in defective) + len(simple)
        if got != cl.algebraic_multiplicity:
            raise ChainInconsistent(
                f"cluster at {cl.value}: chain lengths sum to {got}, "
                f"algebraic multiplicity is {cl.algebraic_multiplicity}"
            )
        all_chains.append(defective)
        all_simple.append(simple)
        total += got
    if total != H.shape[0]:
        raise ChainInconsistent(
            f"chains cover dimension {total} of {H.shape[0]}"
        )
    return JordanStructure(
        tuple(clusters), tuple(all_chains), tuple(all_simple), H.shape[0]
    )


def ep_order(structure: JordanStructure, cluster_index: int) -> int:
    """Longest chain length in the cluster; 1 means nondefective."""
    chains = structure.chains[cluster_index]
    if not chains:
        return 1
    return max(c.length for c in chains)
