"""Four-site diamond ring with complex symmetric couplings.

Sites (A, B, C, D) are coupled around a plaquette by G+ = J + i*kappa on
A-B, eps*G+ on B-C, eps*G- on C-D and G- = J - i*kappa on D-A, with
G- = J - i*kappa.  The matrix is complex symmetric (H^T = H), so every
left eigenvector is the complex conjugate of a right one.  At kappa =
+-1 the ring sits at a third-order exceptional point at zero energy
(with one extra simple zero mode); at eps = +-i with kappa != +-1 the
same happens with the roles of the parameters swapped; at eps = +-i and
kappa = +-1 the zero eigenvalue instead carries two second-order chains
whose left partners cross between the chains.

The exceptional-point bases below are exact closed forms; tests check
them against the numerical construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import EpdynError
from ..pcr import PcrBasis, PcrPair, verify_chain_preservation, verify_closure

_EXACT_TOL = 1e-12


@dataclass(frozen=True)
class DiamondRingParams:
    eps_value: float
    kappa: float
    eps_is_imaginary: bool = False
    J: float = 1.0

    @property
    def eps(self) -> complex:
        return 1j * self.eps_value if self.eps_is_imaginary else complex(self.eps_value)

    @property
    def dim(self) -> int:
        return 4


def build_diamond(params: DiamondRingParams) -> np.ndarray:
    g_plus = params.J + 1j * params.kappa
    g_minus = params.J - 1j * params.kappa
    e = params.eps
    H = np.zeros((4, 4), dtype=np.complex128)
    H[0, 1] = H[1, 0] = g_plus
    H[1, 2] = H[2, 1] = e * g_plus
    H[2, 3] = H[3, 2] = e * g_minus
    H[3, 0] = H[0, 3] = g_minus
    return H


def diamond_pt_operator(params: DiamondRingParams) -> np.ndarray:
    """Parity part of the antilinear symmetry: P H* P^{-1} = H.

    Swaps B and D; acts on C with -1 when eps is imaginary.
    """
    theta = -1.0 if params.eps_is_imaginary else 1.0
    P = np.zeros((4, 4), dtype=np.complex128)
    P[0, 0] = 1.0
    P[1, 3] = 1.0
    P[2, 2] = theta
    P[3, 1] = 1.0
    return P


def diamond_eigenenergies(params: DiamondRingParams) -> tuple[complex, ...]:
    e = params.eps
    root = 1j * np.sqrt(complex(2 * (1 + e**2) * (params.kappa**2 - params.J**2)))
    return (complex(root), complex(-root), 0j, 0j)


@dataclass(frozen=True)
class DiamondEpBasis:
    """Closed-form exceptional-point basis of the diamond ring.

    ``chains`` lists the raw chain vectors bottom-to-top per chain and
    ``chain_duals`` the matching raw dual-functional vectors (the
    conjugate-transposed table partners, in the same order), all prior to
    the 1/sqrt(C) normalization.  ``simple``/``simple_norm`` hold the
    leftover eigenvector when the zero eigenvalue is not exhausted by the
    chains (third-order scenarios only).
    """

    params: DiamondRingParams
    scenario: str
    chains: tuple[tuple[np.ndarray, ...], ...]
    chain_duals: tuple[tuple[np.ndarray, ...], ...]
    C: complex
    simple: np.ndarray | None = None
    simple_norm: complex | None = None

    def pcr_pairs(self) -> list[PcrPair]:
        s = np.sqrt(self.C)
        pairs = []
        for cid, (rights, duals) in enumerate(
            zip(self.chains, self.chain_duals), start=1
        ):
            L = len(rights)
            for n in range(L):
                pairs.append(
                    PcrPair(
                        left=np.conj(duals[n] / s),
                        right=rights[n] / s,
                        kind="chain",
                        eigenvalue=0j,
                        chain_id=cid,
                        position_in_chain=n + 1,
                        chain_length=L,
                    )
                )
        if self.simple is not None:
            sg = np.sqrt(self.simple_norm)
            pairs.append(
                PcrPair(
                    left=np.conj(self.simple / sg),
                    right=self.simple / sg,
                    kind="simple",
                    eigenvalue=0j,
                )
            )
        return pairs

    def pcr_basis(self) -> PcrBasis:
        pairs = tuple(self.pcr_pairs())
        H = build_diamond(self.params)
        probe = PcrBasis(pairs, 0.0, 0.0, 4)
        closure = verify_closure(probe, 4)
        chain_res = verify_chain_preservation(H, probe)
        crossed = self.scenario.startswith("double")
        return PcrBasis(pairs, closure, chain_res, 4, crossed)


def _is(x: float, target: float) -> bool:
    return abs(x - target) <= _EXACT_TOL


def diamond_analytic_basis(params: DiamondRingParams) -> DiamondEpBasis:
    """Exact basis for the eight exceptional-point scenarios.

    Requires J = 1.  Raises when the parameters do not sit on one of
    them (e.g. real eps with |kappa| != 1, which is diagonalizable).
    """
    if not _is(params.J, 1.0):
        raise EpdynError("analytic basis is tabulated for J = 1")
    e = params.eps
    k = params.kappa
    at_ei = params.eps_is_imaginary and _is(abs(params.eps_value), 1.0)
    sign_e = 1.0 if params.eps_value >= 0 else -1.0
    at_k1 = _is(abs(k), 1.0)
    sign_k = 1.0 if k >= 0 else -1.0

    arr = lambda *vals: np.array(vals, dtype=np.complex128)

    if at_ei and at_k1:
        # Two crossed second-order chains at zero energy.
        if sign_e > 0 and sign_k > 0:
            C = 2 * (1 - 1j)
            psi1_1 = arr(0, 2j, 0, 2)
            phi2_1 = arr(1j, 0, -1j, 0)
            psi2_1 = arr(1, 0, 1, 0)
            psi1_2 = arr(-2j, 0, 2, 0)
            phi2_2 = arr(0, -1j, 0, -1j)
            psi2_2 = arr(0, -1, 0, 1)
            scen = "double-ep2:eps=i,kappa=+1"
        elif sign_e > 0 and sign_k < 0:
            C = 2 * (-1 - 1j)
            psi1_1 = arr(0, -2j, 0, 2)
            phi2_1 = arr(-1j, 0, -1j, 0)
            psi2_1 = arr(1, 0, -1, 0)
            psi1_2 = arr(-2j, 0, 2, 0)
            phi2_2 = arr(0, -1j, 0, -1j)
            psi2_2 = arr(0, 1, 0, -1)
            scen = "double-ep2:eps=i,kappa=-1"
        elif sign_e < 0 and sign_k > 0:
            C = 2 * (-1 + 1j)
            psi1_1 = arr(0, 2j, 0, 2)
            phi2_1 = arr(1j, 0, 1j, 0)
            psi2_1 = arr(1, 0, -1, 0)
            psi1_2 = arr(2j, 0, 2, 0)
            phi2_2 = arr(0, 1j, 0, 1j)
            psi2_2 = arr(0, 1, 0, -1)
            scen = "double-ep2:eps=-i,kappa=+1"
        else:
            C = 2 * (1 + 1j)
            psi1_1 = arr(0, -2j, 0, 2)
            phi2_1 = arr(-1j, 0, 1j, 0)
            psi2_1 = arr(1, 0, 1, 0)
            psi1_2 = arr(2j, 0, 2, 0)
            phi2_2 = arr(0, 1j, 0, 1j)
            psi2_2 = arr(0, -1, 0, 1)
            scen = "double-ep2:eps=-i,kappa=-1"
        return DiamondEpBasis(
            params=params,
            scenario=scen,
            chains=((psi1_1, phi2_1), (psi1_2, phi2_2)),
            # Dual partners cross between the chains and use the raw
            # (not redefined) top vectors.
            chain_duals=((psi2_2, psi1_2), (psi2_1, psi1_1)),
            C=complex(C),
        )

    if at_k1:
        # Third-order chain plus a simple zero mode; eps arbitrary != +-i.
        if abs(1 + e**2) <= _EXACT_TOL:
            raise EpdynError("eps = +-i with kappa = +-1 is the crossed case")
        if sign_k > 0:
            C = -2j * (1 + e**2)
            psi1 = arr(0, 2 * (1 + e**2), 0, -2j * (1 + e**2))
            psi2 = arr(1 - 1j, 0, e * (1 - 1j), 0)
            psi3 = arr(0, 0, 0, 1)
            phi3 = arr(0, -1j, 0, 0)
            scen = "ep3:kappa=+1"
        else:
            C = 2j * (1 + e**2)
            psi1 = arr(0, 2 * (1 + e**2), 0, 2j * (1 + e**2))
            psi2 = arr(1 + 1j, 0, e * (1 + 1j), 0)
            psi3 = arr(0, 0, 0, 1)
            phi3 = arr(0, 1j, 0, 0)
            scen = "ep3:kappa=-1"
        phi = arr(-e, 0, 1, 0)
        return DiamondEpBasis(
            params=params,
            scenario=scen,
            chains=((psi1, psi2, phi3),),
            chain_duals=((psi3, psi2, psi1),),
            C=complex(C),
            simple=phi,
            simple_norm=complex(1 + e**2),
        )

    if at_ei:
        # Third-order chain at eps = +-i with kappa away from +-1.
        C = 2 * (k**2 - 1)
        if sign_e > 0:
            psi1 = arr(-2j * (k**2 - 1), 0, 2 * (k**2 - 1), 0)
            psi3 = arr(0, 0, 1, 0)
            scen = "ep3:eps=i"
        else:
            psi1 = arr(-2j * (k**2 - 1), 0, 2 * (1 - k**2), 0)
            psi3 = arr(0, 0, -1, 0)
            scen = "ep3:eps=-i"
        psi2 = arr(0, 1j - k, 0, 1j + k)
        phi3 = arr(1j, 0, 0, 0)
        phi = arr(0, k + 1j, 0, k - 1j)
        return DiamondEpBasis(
            params=params,
            scenario=scen,
            chains=((psi1, psi2, phi3),),
            chain_duals=((psi3, psi2, psi1),),
            C=complex(C),
            simple=phi,
            simple_norm=complex(C),
        )

    raise EpdynError(
        "parameters are away from every tabulated exceptional point "
        "(need |kappa| = 1 or eps = +-i)"
    )
