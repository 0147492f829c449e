"""Stub-ribbon lattice with nonreciprocal vertical hoppings.

Unit cell n holds sites A_n, B_n, C_n (the last cell has no C).  A-B
hoppings inside a cell are nonreciprocal: J_n^u upward (B to A) and
J_n^d = lambda * J_n^u downward; all B-C hoppings are reciprocal with
strength J.  Basis ordering is (A_1, B_1, C_1, ..., A_N, B_N), dimension
3N - 1.  lambda = 1 is the Hermitian limit, lambda = 0 puts the model at a
second-order exceptional point on top of the (N-1)-fold zero-energy
degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import linalg
from ..exceptions import EpdynError
from ..pcr import PcrBasis, PcrPair, verify_chain_preservation, verify_closure


@dataclass(frozen=True)
class StubRibbonParams:
    N: int
    up_hoppings: tuple[float, ...]
    lam: float
    J: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise EpdynError("stub ribbon needs at least two unit cells")
        if len(self.up_hoppings) != self.N:
            raise EpdynError(
                f"expected {self.N} upward hoppings, got {len(self.up_hoppings)}"
            )
        if any(j <= 0 for j in self.up_hoppings):
            raise EpdynError("upward hoppings must be positive")
        # The physical regime is lambda in [0, 1] (1 = Hermitian limit,
        # 0 = maximal nonreciprocity); negative values are admitted for
        # spectral sweeps into the broken region.
        if not np.isfinite(self.lam):
            raise EpdynError("lambda must be finite")
        object.__setattr__(self, "up_hoppings", tuple(float(j) for j in self.up_hoppings))

    @property
    def dim(self) -> int:
        return 3 * self.N - 1

    def down_hopping(self, n: int) -> float:
        return self.lam * self.up_hoppings[n - 1]


def idx_a(n: int) -> int:
    return 3 * (n - 1)


def idx_b(n: int) -> int:
    return 3 * (n - 1) + 1


def idx_c(n: int) -> int:
    return 3 * (n - 1) + 2


def site_labels(params: StubRibbonParams) -> list[str]:
    labels = []
    for n in range(1, params.N + 1):
        labels.append(f"A{n}")
        labels.append(f"B{n}")
        if n < params.N:
            labels.append(f"C{n}")
    return labels


def site_index(params: StubRibbonParams, label: str) -> int:
    try:
        return site_labels(params).index(label)
    except ValueError:
        raise EpdynError(f"unknown site label {label!r}") from None


def build_stub(params: StubRibbonParams) -> np.ndarray:
    d = params.dim
    H = np.zeros((d, d), dtype=np.complex128)
    for n in range(1, params.N + 1):
        H[idx_a(n), idx_b(n)] = params.up_hoppings[n - 1]
        H[idx_b(n), idx_a(n)] = params.down_hopping(n)
    for n in range(1, params.N):
        H[idx_c(n), idx_b(n)] = H[idx_b(n), idx_c(n)] = params.J
        H[idx_c(n), idx_b(n + 1)] = H[idx_b(n + 1), idx_c(n)] = params.J
    return H


def stub_eta(params: StubRibbonParams) -> np.ndarray:
    """Diagonal intertwiner of the pseudo-Hermiticity relation
    eta^{-1} H eta = H^dagger; divergent at lambda = 0."""
    if params.lam == 0.0:
        raise EpdynError("eta diverges at lambda = 0")
    diag = np.ones(params.dim)
    for n in range(1, params.N + 1):
        diag[idx_a(n)] = params.up_hoppings[n - 1] / params.down_hopping(n)
    return np.diag(diag).astype(np.complex128)


def stub_gamma(params: StubRibbonParams) -> np.ndarray:
    """Chiral operator: -1 on B sites, +1 elsewhere."""
    diag = np.ones(params.dim)
    for n in range(1, params.N + 1):
        diag[idx_b(n)] = -1.0
    return np.diag(diag).astype(np.complex128)


def stub_hermitian_counterpart(params: StubRibbonParams) -> np.ndarray:
    """Spectrally equivalent Hermitian ribbon with A-B couplings
    sqrt(J^u J^d); related to the model by S^{-1} H S with S = sqrt(eta)."""
    if params.lam <= 0.0:
        raise EpdynError("Hermitian counterpart needs lambda > 0")
    d = params.dim
    H = np.zeros((d, d), dtype=np.complex128)
    for n in range(1, params.N + 1):
        g = np.sqrt(params.up_hoppings[n - 1] * params.down_hopping(n))
        H[idx_a(n), idx_b(n)] = H[idx_b(n), idx_a(n)] = g
    for n in range(1, params.N):
        H[idx_c(n), idx_b(n)] = H[idx_b(n), idx_c(n)] = params.J
        H[idx_c(n), idx_b(n + 1)] = H[idx_b(n + 1), idx_c(n)] = params.J
    return H


def stub_flat_band_states(params: StubRibbonParams) -> list[np.ndarray]:
    """The N-1 compact localized zero modes, supported on A_l, A_{l+1}, C_l."""
    if params.lam == 0.0:
        raise EpdynError("flat-band states require lambda > 0")
    states = []
    for l in range(1, params.N):
        v = np.zeros(params.dim, dtype=np.complex128)
        v[idx_a(l)] = 1.0 / params.down_hopping(l)
        v[idx_a(l + 1)] = 1.0 / params.down_hopping(l + 1)
        v[idx_c(l)] = -1.0 / params.J
        states.append(v)
    return states


def stub_dispersion(k: float, Lambda: float, J: float):
    """Band energies of the periodic Hermitian ribbon at momentum k."""
    root = np.sqrt(Lambda**2 + 2 * J**2 * (1 + np.cos(k)))
    return (0.0, root, -root)


@dataclass(frozen=True)
class StubEpBasis:
    """Analytic basis at the lambda = 0 exceptional point.

    ``chi``/``chi_a`` are the coalescing zero mode and its generalized
    partner; ``xi[l]`` are the surviving localized zero modes and
    ``varrho_tilde[l]`` their rewritten left partners; ``bulk`` holds the
    numerically biorthonormalized nonzero-energy pairs (left, right,
    eigenvalue).
    """

    params: StubRibbonParams
    xi: tuple[np.ndarray, ...]
    xi_tilde: tuple[np.ndarray, ...]
    varrho_tilde: tuple[np.ndarray, ...]
    chi: np.ndarray
    chi_a: np.ndarray
    chi_tilde: np.ndarray
    chi_a_tilde: np.ndarray
    bulk: tuple[tuple[np.ndarray, np.ndarray, complex], ...]

    def pcr_pairs(self) -> list[PcrPair]:
        """Normalized pairs realizing the closure relation.

        Stored lefts are kets whose conjugate transpose is the dual
        functional, matching the package-wide convention.
        """
        N = self.params.N
        root = np.sqrt(float(N))
        pairs = [
            PcrPair(
                left=self.chi_a_tilde.conj() / root,
                right=self.chi / root,
                kind="chain",
                eigenvalue=0.0,
                chain_id=1,
                position_in_chain=1,
                chain_length=2,
            ),
            PcrPair(
                left=self.chi_tilde.conj() / root,
                right=self.chi_a / root,
                kind="chain",
                eigenvalue=0.0,
                chain_id=1,
                position_in_chain=2,
                chain_length=2,
            ),
        ]
        for l in range(1, N):
            scale = np.sqrt(self.params.up_hoppings[l])
            pairs.append(
                PcrPair(
                    left=scale * self.varrho_tilde[l - 1].conj(),
                    right=scale * self.xi[l - 1],
                    kind="simple",
                    eigenvalue=0.0,
                )
            )
        for left, right, energy in self.bulk:
            pairs.append(
                PcrPair(left=left, right=right, kind="simple", eigenvalue=energy)
            )
        return pairs

    def pcr_basis(self) -> PcrBasis:
        pairs = tuple(self.pcr_pairs())
        H = build_stub(self.params)
        basis = PcrBasis(pairs, 0.0, 0.0, self.params.dim)
        closure = verify_closure(basis, self.params.dim)
        chain_res = verify_chain_preservation(H, basis)
        return PcrBasis(pairs, closure, chain_res, self.params.dim)


def stub_ep_basis(params: StubRibbonParams) -> StubEpBasis:
    if params.lam != 0.0:
        raise EpdynError("the analytic EP basis requires lambda = 0")
    N, d, J = params.N, params.dim, params.J
    ju = params.up_hoppings

    xi, xi_tilde = [], []
    for l in range(1, N):
        r = np.zeros(d, dtype=np.complex128)
        r[idx_a(l + 1)] = 1.0
        xi.append(r)
        lt = np.zeros(d, dtype=np.complex128)
        lt[idx_a(l)] = 1.0 / ju[l - 1]
        lt[idx_a(l + 1)] = 1.0 / ju[l]
        lt[idx_c(l)] = -1.0 / J
        xi_tilde.append(lt)
    varrho_tilde = []
    for l in range(1, N):
        acc = np.zeros(d, dtype=np.complex128)
        for s in range(1, l + 1):
            acc += (-1.0) ** (l + s) * xi_tilde[s - 1]
        varrho_tilde.append(acc)

    chi = np.zeros(d, dtype=np.complex128)
    chi_a = np.zeros(d, dtype=np.complex128)
    chi_tilde = np.zeros(d, dtype=np.complex128)
    chi_a_tilde = np.zeros(d, dtype=np.complex128)
    for n in range(1, N + 1):
        sign = (-1.0) ** (n + 1)
        chi[idx_a(n)] = sign * ju[n - 1]
        chi_a[idx_b(n)] = sign
        chi_tilde[idx_b(n)] = sign
    chi_a_tilde[idx_a(1)] = N / ju[0]
    for n in range(1, N):
        chi_a_tilde[idx_c(n)] = (-1.0) ** n * (N - n) / J

    # Nonzero-energy bulk pairs, biorthonormalized numerically.
    H = build_stub(params)
    spec = linalg.eig_general(H)
    scale = max(1.0, float(np.linalg.norm(H, 2)))
    bulk = []
    left_pool = [
        (spec.eigenvalues[k].conjugate(), spec.left_vectors[:, k])
        for k in range(d)
        if abs(spec.eigenvalues[k]) > 1e-6 * scale
    ]
    for k in range(d):
        E = spec.eigenvalues[k]
        if abs(E) <= 1e-6 * scale:
            continue
        r = spec.right_vectors[:, k]
        j = min(
            range(len(left_pool)), key=lambda i: abs(np.conj(left_pool[i][0]) - E)
        )
        _, l = left_pool.pop(j)
        g = np.vdot(l, r)
        sg = np.sqrt(g)
        bulk.append((l / np.conj(sg), r / sg, complex(E)))

    return StubEpBasis(
        params=params,
        xi=tuple(xi),
        xi_tilde=tuple(xi_tilde),
        varrho_tilde=tuple(varrho_tilde),
        chi=chi,
        chi_a=chi_a,
        chi_tilde=chi_tilde,
        chi_a_tilde=chi_a_tilde,
        bulk=tuple(bulk),
    )
