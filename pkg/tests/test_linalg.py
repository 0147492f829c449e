import numpy as np
import pytest

from conftest import diamond, random_complex, stub4
from epdyn import linalg
from epdyn.exceptions import LinalgError
from epdyn.models.diamond import build_diamond
from epdyn.models.stub import build_stub
from oracles import eigenvalues_via_charpoly, expm_taylor, match_sorted, svd_via_eigh

J2 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


class TestEigGeneral:
    def test_diagonal(self):
        spec = linalg.eig_general(np.diag([1.0, 2.0j]))
        assert match_sorted(spec.eigenvalues, np.array([1.0, 2.0j])) < 1e-14
        # unit-basis eigenvectors up to phase
        for k in range(2):
            v = np.abs(spec.right_vectors[:, k])
            assert np.isclose(v.max(), 1.0) and np.isclose(v.min(), 0.0)

    def test_stub_spectrum_real(self):
        H = build_stub(stub4(0.5))
        spec = linalg.eig_general(H)
        assert np.max(np.abs(spec.eigenvalues.imag)) < 1e-10

    def test_random_matches_charpoly_oracle(self, rng):
        H = random_complex(rng, 6, 6)
        spec = linalg.eig_general(H)
        oracle = eigenvalues_via_charpoly(H)
        assert match_sorted(spec.eigenvalues, oracle) < 1e-8

    def test_residual_invariant(self, rng):
        for _ in range(5):
            H = random_complex(rng, 7, 7)
            spec = linalg.eig_general(H)
            scale = max(1.0, np.linalg.norm(H, 2))
            assert np.all(spec.residuals <= 1e-10 * scale)

    def test_sorted_by_real_then_imag(self, rng):
        spec = linalg.eig_general(random_complex(rng, 8, 8))
        w = spec.eigenvalues
        key = list(zip(w.real, w.imag))
        assert key == sorted(key)

    def test_near_defective_residuals_still_tight(self):
        # LAPACK alone leaks ~1e-8 residuals here; refinement must fix it
        H = build_stub(stub4(2.220446049250313e-16))
        spec = linalg.eig_general(H)
        assert np.all(spec.residuals <= 1e-10 * max(1.0, np.linalg.norm(H, 2)))

    def test_non_square_rejected(self):
        with pytest.raises(LinalgError):
            linalg.eig_general(np.zeros((2, 3)))


class TestSvdRank:
    def test_identity(self):
        _, s, _ = linalg.svd(np.eye(3))
        assert np.allclose(s, 1.0)

    def test_jordan_block(self):
        _, s, _ = linalg.svd(J2)
        assert np.allclose(s, [1.0, 0.0], atol=1e-15)

    def test_diamond_squared_single_direction(self):
        H = build_diamond(diamond(2.0, 1.0))
        A = H @ H
        _, s, _ = linalg.svd(A)
        tol = linalg.default_rank_tol(4) * s[0]
        assert np.count_nonzero(s > tol) == 1
        assert np.max(np.abs(s - svd_via_eigh(A))) < 1e-10 * s[0]

    def test_reconstruction_and_unitarity(self, rng):
        A = random_complex(rng, 5, 3)
        U, s, V = linalg.svd(A)
        rebuilt = U[:, : len(s)] @ np.diag(s) @ V[:, : len(s)].conj().T
        scale = np.linalg.norm(A, 2)
        assert np.linalg.norm(A - rebuilt, 2) <= 1e-12 * scale
        assert np.linalg.norm(U.conj().T @ U - np.eye(U.shape[1]), 2) < 1e-12
        assert np.linalg.norm(V.conj().T @ V - np.eye(V.shape[1]), 2) < 1e-12

    def test_rank_zero_matrix(self):
        assert linalg.rank(np.zeros((4, 4))) == 0

    def test_rank_jordan_block(self):
        assert linalg.rank(J2) == 1

    def test_rank_stub_ep(self):
        H = build_stub(stub4(0.0))
        assert linalg.rank(H) == 7  # nullity 4 = geometric multiplicity

    def test_rank_unitary_invariant(self, rng):
        A = random_complex(rng, 6, 6)
        A[:, 3] = A[:, 0] + A[:, 1]  # force rank 5
        Q, _ = np.linalg.qr(random_complex(rng, 6, 6))
        assert linalg.rank(Q @ A) == linalg.rank(A) == 5


class TestLstsq:
    def test_identity(self, rng):
        b = random_complex(rng, 4)
        x, res = linalg.lstsq_min_norm(np.eye(4), b)
        assert np.allclose(x, b) and res < 1e-14

    def test_nilpotent_chain_solve(self):
        x, res = linalg.lstsq_min_norm(J2, np.array([1.0, 0.0]))
        assert np.allclose(x, [0.0, 1.0]) and res < 1e-14

    def test_diamond_chain_solve_table_vector(self):
        H = build_diamond(diamond(2.0, 1.0))
        psi1 = np.array([0.0, 10.0, 0.0, -10.0j])
        psi2 = np.array([1.0 - 1j, 0.0, 2.0 * (1 - 1j), 0.0])
        x, res = linalg.lstsq_min_norm(H, psi1)
        assert res <= 1e-10
        # x - psi2 must lie in the kernel of H
        assert np.linalg.norm(H @ (x - psi2)) < 1e-10

    def test_min_norm_property(self, rng):
        A = random_complex(rng, 3, 5)
        b = random_complex(rng, 3)
        x, res = linalg.lstsq_min_norm(A, b)
        assert res < 1e-10
        K = linalg.kernel_basis(A)
        for k in range(K.shape[1]):
            other = x + 0.37 * K[:, k]
            assert np.linalg.norm(other) >= np.linalg.norm(x) - 1e-12


class TestExpm:
    def test_zero(self):
        assert np.allclose(linalg.expm(np.zeros((3, 3))), np.eye(3))

    def test_nilpotent(self):
        t = 2.7
        E = linalg.expm(-1j * t * J2)
        assert np.allclose(E, [[1.0, -1j * t], [0.0, 1.0]], atol=1e-14)

    def test_diamond_vs_taylor_oracle(self):
        H = build_diamond(diamond(2.0, 1.0))
        t = 3.0
        E = linalg.expm(-1j * t * H)
        assert np.linalg.norm(E - expm_taylor(-1j * t * H), 2) < 1e-9

    def test_inverse_identity(self, rng):
        # At norm 20 the round trip is only meaningful for generators whose
        # exponential is well-conditioned (the -iHt evolution case);
        # arbitrary non-normal matrices lose digits as e^{spread of Re E}.
        H = random_complex(rng, 5, 5)
        H = H + H.conj().T
        A = -1j * H * (20.0 / np.linalg.norm(H, 2))
        assert (
            np.linalg.norm(linalg.expm(A) @ linalg.expm(-A) - np.eye(5), 2) < 1e-10
        )
        B = random_complex(rng, 5, 5)
        B *= 10.0 / np.linalg.norm(B, 2)
        assert (
            np.linalg.norm(linalg.expm(B) @ linalg.expm(-B) - np.eye(5), 2) < 1e-9
        )


def test_fix_phase_first_entry_real_positive(rng):
    v = random_complex(rng, 5)
    out = linalg.fix_phase(v)
    assert abs(out[0].imag) < 1e-14 and out[0].real > 0
    assert np.isclose(np.linalg.norm(out), np.linalg.norm(v))
