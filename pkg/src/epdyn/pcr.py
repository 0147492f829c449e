"""Pseudo-completeness relations for defective matrices.

Given a Jordan decomposition, this module redefines the chain and simple
vectors into biorthonormal (left, right) pairs whose outer products resolve
the identity even when ordinary biorthogonality collapses.  Within a chain
of length L the dual of the right vector at position n is the left vector
at position L+1-n; both sides are divided by the square root of the
chain's biorthogonal norm C, the rights receive Gram-Schmidt corrections
against lower redefined pairs, and every chain after the first (and every
simple mode sharing the eigenvalue) is first deflated against the pairs
already established in its cluster.

Conventions: a pair's ``left`` is stored as a ket; the dual functional is
``x -> np.vdot(left, x)`` and the closure matrix is
``sum(np.outer(p.right, p.left.conj()))``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import jordan as jordan_mod
from . import linalg
from .exceptions import AmbiguousPairing, ClosureFailure, ZeroBiorthogonalNorm

DEFAULT_NORM_TOL_FACTOR = 1e-10
DEFAULT_CLOSURE_TOL = 1e-10
AMBIGUITY_REL_TOL = 1e-6


@dataclass(frozen=True)
class PcrPair:
    left: np.ndarray
    right: np.ndarray
    kind: str  # "chain" or "simple"
    eigenvalue: complex
    chain_id: int | None = None
    position_in_chain: int | None = None  # 1 = coalescing eigenstate
    chain_length: int | None = None


@dataclass(frozen=True)
class PcrBasis:
    pairs: tuple[PcrPair, ...]
    closure_residual: float
    chain_residual: float
    dim: int
    # True when the cross-chain left-partner assignment policy for
    # equal-length degenerate chains was exercised; the chain residual is
    # advisory in that case.
    equal_multiplicity_policy: bool = field(default=False)

    def chain_pairs(self) -> list[PcrPair]:
        return [p for p in self.pairs if p.kind == "chain"]

    def simple_pairs(self) -> list[PcrPair]:
        return [p for p in self.pairs if p.kind == "simple"]

    def to_json(self) -> str:
        def encode(v: np.ndarray) -> list[float]:
            out = np.empty(2 * v.size)
            out[0::2] = v.real
            out[1::2] = v.imag
            return out.tolist()

        doc = {
            "dim": self.dim,
            "closure_residual": self.closure_residual,
            "chain_residual": self.chain_residual,
            "equal_multiplicity_policy": self.equal_multiplicity_policy,
            "pairs": [
                {
                    "left": encode(p.left),
                    "right": encode(p.right),
                    "kind": p.kind,
                    "eigenvalue": [p.eigenvalue.real, p.eigenvalue.imag],
                    "chain_id": p.chain_id,
                    "position_in_chain": p.position_in_chain,
                    "chain_length": p.chain_length,
                }
                for p in self.pairs
            ],
        }
        return json.dumps(doc)

    @staticmethod
    def from_json(text: str) -> "PcrBasis":
        doc = json.loads(text)

        def decode(a: list[float]) -> np.ndarray:
            arr = np.asarray(a)
            return arr[0::2] + 1j * arr[1::2]

        pairs = tuple(
            PcrPair(
                left=decode(d["left"]),
                right=decode(d["right"]),
                kind=d["kind"],
                eigenvalue=complex(d["eigenvalue"][0], d["eigenvalue"][1]),
                chain_id=d["chain_id"],
                position_in_chain=d["position_in_chain"],
                chain_length=d["chain_length"],
            )
            for d in doc["pairs"]
        )
        return PcrBasis(
            pairs,
            doc["closure_residual"],
            doc["chain_residual"],
            doc["dim"],
            doc["equal_multiplicity_policy"],
        )


def closure_matrix(pairs) -> np.ndarray:
    dim = len(pairs[0].right)
    P = np.zeros((dim, dim), dtype=np.complex128)
    for p in pairs:
        P += np.outer(p.right, p.left.conj())
    return P


def verify_closure(basis: PcrBasis, dim: int) -> float:
    """Spectral-norm distance of the pair sum from the identity."""
    P = closure_matrix(basis.pairs)
    return float(np.linalg.norm(P - np.eye(dim), 2))


def verify_chain_preservation(H, basis: PcrBasis) -> float:
    """Max chain defect ||(H - E) nu_n - nu_{n-1}|| over chain pairs.

    Advisory when the equal-multiplicity assignment policy fired: the
    redefined vectors need not obey the chain relations in that scenario.
    """
    H = linalg.as_square(H)
    worst = 0.0
    by_chain: dict[int, list[PcrPair]] = {}
    for p in basis.chain_pairs():
        by_chain.setdefault(p.chain_id, []).append(p)
    for chain in by_chain.values():
        chain.sort(key=lambda p: p.position_in_chain)
        for k, p in enumerate(chain):
            prev = chain[k - 1].right if k else np.zeros(basis.dim)
            defect = np.linalg.norm(
                (H - p.eigenvalue * np.eye(basis.dim)) @ p.right - prev
            )
            worst = max(worst, float(defect))
    return worst


def match_left_partners_equal_multiplicity(
    chains, ambiguity_tol: float = AMBIGUITY_REL_TOL
):
    """Assignment of left chains to right chains for equal-length chains
    sharing one eigenvalue.

    The left partner of a right chain need not come from the same chain's
    adjoint solve (the diagonal pattern), so the permutation maximizing the
    product of |<left top | right bottom>| overlaps is selected by
    exhaustive search.  This is a policy choice, not a derived rule.
    Returns ``perm`` with right chain ``i`` paired to left chain
    ``perm[i]``.
    """
    m = len(chains)
    if m < 2:
        return tuple(range(m))
    lengths = {c.length for c in chains}
    if len(lengths) != 1:
        raise ValueError("chains must share one length")
    overlaps = np.empty((m, m), dtype=np.complex128)
    for i, ci in enumerate(chains):
        for j, cj in enumerate(chains):
            overlaps[i, j] = np.vdot(ci.left_chain[-1], cj.right_chain[0])

    def score(perm):
        total = 0.0
        for j, i in enumerate(perm):
            a = abs(overlaps[i, j])
            if a <= 1e-14:
                return -math.inf
            total += math.log(a)
        return total

    scored = sorted(
        ((score(p), p) for p in itertools.permutations(range(m))),
        key=lambda sp: (-sp[0], sp[1]),
    )
    best, perm = scored[0]
    if best == -math.inf:
        raise ZeroBiorthogonalNorm(
            "no left/right chain assignment has nonzero overlaps"
        )
    if len(scored) > 1:
        second = scored[1][0]
        if second > -math.inf and best - second <= ambiguity_tol * max(
            1.0, abs(best)
        ):
            raise AmbiguousPairing(
                "two left-partner assignments score equally within tolerance"
            )
    return tuple(perm)


def _deflate_against(est, r, l):
    for p in est:
        r = r - np.vdot(p.left, r) * p.right
        l = l - np.conj(np.vdot(l, p.right)) * p.left
    return r, l


def build_pcr(
    H,
    structure: jordan_mod.JordanStructure | None = None,
    *,
    closure_tol: float = DEFAULT_CLOSURE_TOL,
    norm_tol_factor: float = DEFAULT_NORM_TOL_FACTOR,
    cluster_tol: float | None = None,
    rank_tol: float | None = None,
) -> PcrBasis:
    """Construct the pseudo-completeness basis of ``H``.

    Handles all four regimes with one deflation loop: a single chain, many
    chains at distinct eigenvalues, several chains at one eigenvalue
    (processed in descending length, each deflated against the pairs
    already fixed), and simple modes degenerate with chains (deflated the
    same way, then biorthonormalized among themselves with a greedy
    largest-overlap pivot).
    """
    H = linalg.as_square(H)
    if structure is None:
        structure = jordan_mod.analyze(H, cluster_tol, rank_tol)
    dim = structure.dim
    h_scale = max(1.0, float(np.linalg.norm(H, 2)))

    pairs: list[PcrPair] = []
    chain_counter = 0
    policy = False

    for ci, cluster in enumerate(structure.clusters):
        chains = list(structure.chains[ci])
        lefts = [c.left_chain for c in chains]

        by_len: dict[int, list[int]] = {}
        for idx, c in enumerate(chains):
            by_len.setdefault(c.length, []).append(idx)
        for idxs in by_len.values():
            if len(idxs) < 2:
                continue
            policy = True
            perm = match_left_partners_equal_multiplicity(
                [chains[i] for i in idxs]
            )
            assigned = [chains[idxs[perm[j]]].left_chain for j in range(len(idxs))]
            for j, idx in enumerate(idxs):
                lefts[idx] = assigned[j]

        est: list[PcrPair] = []
        for chain, left_chain in zip(chains, lefts):
            L = chain.length
            rs = [np.array(v) for v in chain.right_chain]
            ls = [np.array(v) for v in left_chain]
            for n in range(L):
                rs[n], ls[n] = _deflate_against(est, rs[n], ls[n])
            C = np.vdot(ls[-1], rs[0])
            norm_tol = norm_tol_factor * h_scale**L
            if abs(C) <= norm_tol:
                raise ZeroBiorthogonalNorm(
                    f"biorthogonal norm |C|={abs(C):.3e} below {norm_tol:.3e} "
                    f"for a length-{L} chain at E={chain.eigenvalue}"
                )
            s = np.sqrt(C)  # principal branch
            duals = [ls[L - 1 - n] / np.conj(s) for n in range(L)]
            nus: list[np.ndarray] = []
            for n in range(L):
                r = rs[n]
                for f in range(n):
                    r = r - np.vdot(duals[f], r) * nus[f]
                nus.append(r / s)
            chain_counter += 1
            new = [
                PcrPair(
                    left=duals[n],
                    right=nus[n],
                    kind="chain",
                    eigenvalue=chain.eigenvalue,
                    chain_id=chain_counter,
                    position_in_chain=n + 1,
                    chain_length=L,
                )
                for n in range(L)
            ]
            est.extend(new)
            pairs.extend(new)

        simples = structure.simple_modes[ci]
        srs = [np.array(r) for (_, r) in simples]
        sls = [np.array(l) for (l, _) in simples]
        for n in range(len(simples)):
            srs[n], sls[n] = _deflate_against(est, srs[n], sls[n])
        left_free = list(range(len(simples)))
        right_free = list(range(len(simples)))
        norm_tol = norm_tol_factor * h_scale
        while right_free:
            gram = np.array(
                [[np.vdot(sls[i], srs[j]) for j in right_free] for i in left_free]
            )
            a, b = np.unravel_index(int(np.argmax(np.abs(gram))), gram.shape)
            i, j = left_free[a], right_free[b]
            g = gram[a, b]
            if abs(g) <= norm_tol:
                raise ZeroBiorthogonalNorm(
                    f"simple-mode biorthogonal norm {abs(g):.3e} below "
                    f"{norm_tol:.3e} at E={cluster.value}"
                )
            sg = np.sqrt(g)
            pair = PcrPair(
                left=sls[i] / np.conj(sg),
                right=srs[j] / sg,
                kind="simple",
                eigenvalue=cluster.value,
            )
            est.append(pair)
            pairs.append(pair)
            left_free.remove(i)
            right_free.remove(j)
            for n in right_free:
                srs[n] = srs[n] - np.vdot(pair.left, srs[n]) * pair.right
            for n in left_free:
                sls[n] = sls[n] - np.conj(np.vdot(sls[n], pair.right)) * pair.left

    basis = PcrBasis(tuple(pairs), 0.0, 0.0, dim, policy)
    closure = verify_closure(basis, dim)
    chain_res = verify_chain_preservation(H, basis)
    basis = PcrBasis(tuple(pairs), closure, chain_res, dim, policy)
    if closure > closure_tol * h_scale:
        raise ClosureFailure(
            f"closure residual {closure:.3e} exceeds {closure_tol * h_scale:.3e}",
            residual=closure,
        )
    return basis


def gram_matrix(basis: PcrBasis) -> np.ndarray:
    """Full left-against-right Gram matrix <left_i | right_j>."""
    n = len(basis.pairs)
    G = np.empty((n, n), dtype=np.complex128)
    for i, pi in enumerate(basis.pairs):
        for j, pj in enumerate(basis.pairs):
            G[i, j] = np.vdot(pi.left, pj.right)
    return G
