"""Sanity checks for the independent oracles themselves."""

import numpy as np

from conftest import random_complex
from oracles import (
    charpoly_coeffs,
    durand_kerner,
    eigenvalues_via_charpoly,
    expm_taylor,
    match_sorted,
    svd_via_eigh,
)


def test_charpoly_coeffs_known():
    H = np.array([[2.0, 1.0], [0.0, 3.0]], dtype=complex)
    # det(xI - H) = x^2 - 5x + 6
    assert np.allclose(charpoly_coeffs(H), [1, -5, 6])


def test_durand_kerner_quadratic():
    roots = durand_kerner(np.array([1.0, 0.0, 1.0]))  # x^2 + 1
    assert match_sorted(roots, np.array([1j, -1j])) < 1e-12


def test_charpoly_roots_match_diagonal():
    vals = np.array([1.0, -2.0, 0.5 + 0.5j])
    H = np.diag(vals)
    assert match_sorted(eigenvalues_via_charpoly(H), vals) < 1e-10


def test_svd_oracle_diagonal():
    A = np.diag([3.0, 2.0, 0.0]).astype(complex)
    assert np.allclose(svd_via_eigh(A), [3.0, 2.0, 0.0], atol=1e-12)


def test_expm_taylor_scalar_and_nilpotent(rng):
    a = np.array([[0.3 - 0.2j]])
    assert abs(expm_taylor(a)[0, 0] - np.exp(0.3 - 0.2j)) < 1e-14
    J2 = np.array([[0, 1], [0, 0]], dtype=complex)
    assert np.allclose(expm_taylor(J2), np.eye(2) + J2, atol=1e-15)
