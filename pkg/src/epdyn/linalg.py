"""Dense complex linear algebra primitives.

All routines operate on plain ``numpy`` complex arrays and are pure
functions of their inputs, sized for matrices up to a few hundred rows.
Decompositions are delegated to LAPACK (via numpy/scipy); this module adds
the deterministic ordering, gauge fixing, and tolerance policy the rest of
the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceError, LinalgError, OverflowLinalgError

EPS = float(np.finfo(np.float64).eps)


def default_rank_tol(dim: int) -> float:
    """Relative rank threshold used everywhere a rank decision occurs."""
    return dim * EPS * 64


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise LinalgError(f"expected a matrix, got ndim={a.ndim}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise LinalgError("matrix has non-finite entries")
    return a


def as_square(a) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    return a


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise LinalgError(f"expected a vector, got ndim={v.ndim}")
    if not (np.all(np.isfinite(v.real)) and np.all(np.isfinite(v.imag))):
        raise LinalgError("vector has non-finite entries")
    return v


def fix_phase(v: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Deterministic gauge: rotate so the first significant entry is real
    positive. Returns a new array; zero vectors pass through unchanged."""
    threshold = tol if tol > 0 else EPS * max(1.0, float(np.linalg.norm(v)))
    for x in v:
        if abs(x) > threshold:
            return v * (abs(x) / x)
    return v.copy()


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition with independently computed left vectors.

    ``eigenvalues`` are sorted by (real, imag); ``left_vectors`` are
    eigenvectors of the adjoint ordered so that the conjugate of their
    eigenvalue follows the same sort. No biorthogonal pairing or
    normalization across left/right is promised here.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residuals: np.ndarray

    @property
    def dim(self) -> int:
        return self.right_vectors.shape[0]


def _lex_order(values: np.ndarray) -> np.ndarray:
    return np.lexsort((values.imag, values.real))


def _refine(A: np.ndarray, w: np.ndarray, v: np.ndarray, scale: float):
    """Inverse-iteration polish of eigenpairs whose residual is above the
    acceptance threshold.  Keeps a refined pair only when it improves."""
    n = A.shape[0]
    eye = np.eye(n)
    w = w.copy()
    v = v.copy()
    for k in range(n):
        res = np.linalg.norm(A @ v[:, k] - w[k] * v[:, k])
        if res <= 1e-12 * scale:
            continue
        x = v[:, k]
        wk = np.vdot(x, A @ x) / np.vdot(x, x)
        for _ in range(3):
            try:
                y = np.linalg.solve(A - wk * eye, x)
            except np.linalg.LinAlgError:
                break
            nrm = np.linalg.norm(y)
            if not np.isfinite(nrm) or nrm == 0.0:
                break
            x = y / nrm
            wk = np.vdot(x, A @ x) / np.vdot(x, x)
            if np.linalg.norm(A @ x - wk * x) <= 1e-14 * scale:
                break
        if np.linalg.norm(A @ x - wk * x) < res:
            v[:, k] = x
            w[k] = wk
    return w, v


def eig_general(H, *, balance: bool = False) -> SpectralData:
    """Full eigendecomposition of a general complex matrix.

    ``balance=True`` applies an explicit diagonal similarity scaling before
    the LAPACK solve (the LAPACK driver's own internal balancing is not
    configurable from here). Off by default: scaling can reshuffle the
    near-degenerate structure this package cares about.
    """
    H = as_square(H)
    n = H.shape[0]
    work = H
    inv_scale = None
    if balance and n > 1:
        work, scale = scipy.linalg.matrix_balance(H)
        inv_scale = scale

    try:
        w, vr = scipy.linalg.eig(work)
        wl, vl = scipy.linalg.eig(work.conj().T)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc

    if inv_scale is not None:
        vr = inv_scale @ vr
        vl = np.linalg.inv(inv_scale).conj().T @ vl

    # Near a defective cluster LAPACK's back-substitution can leak
    # sqrt(eps)-level errors into eigenvectors of well-separated
    # eigenvalues; a step or two of Rayleigh-quotient inverse iteration
    # restores full accuracy.
    scale = max(1.0, float(np.linalg.norm(H, 2)))
    w, vr = _refine(H, w, vr, scale)
    wl, vl = _refine(H.conj().T, wl, vl, scale)

    order = _lex_order(w)
    w = w[order]
    vr = vr[:, order]
    order_l = _lex_order(np.conj(wl))
    vl = vl[:, order_l]

    for k in range(n):
        vr[:, k] = fix_phase(vr[:, k] / np.linalg.norm(vr[:, k]))
        vl[:, k] = fix_phase(vl[:, k] / np.linalg.norm(vl[:, k]))

    residuals = np.array(
        [np.linalg.norm(H @ vr[:, k] - w[k] * vr[:, k]) for k in range(n)]
    )
    if np.any(residuals > 1e-10 * scale):
        raise ConvergenceError(
            "eigenpair residuals exceed 1e-10*max(1,||H||)", residuals=residuals
        )
    return SpectralData(w, vr, vl, residuals)


def svd(A):
    """SVD ``A = U @ diag(s) @ V.conj().T`` with descending singular values."""
    A = as_matrix(A)
    try:
        U, s, Vh = np.linalg.svd(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceError(f"SVD failed to converge: {exc}") from exc
    return U, s, Vh.conj().T


def rank(A, rank_tol: float | None = None) -> int:
    """Numerical rank: number of singular values above ``rank_tol * s_max``."""
    A = as_matrix(A)
    if rank_tol is None:
        rank_tol = default_rank_tol(max(A.shape))
    if rank_tol <= 0:
        raise LinalgError("rank_tol must be positive")
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def kernel_basis(A, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical null space of ``A``."""
    A = as_matrix(A)
    if rank_tol is None:
        rank_tol = default_rank_tol(max(A.shape))
    U, s, V = svd(A)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > rank_tol * s[0]))
    return V[:, r:]


def lstsq_min_norm(A, b, rank_tol: float | None = None):
    """Minimum-norm least-squares solution via rank-truncated pseudoinverse.

    Returns ``(x, residual)`` with ``residual = ||A x - b||``; inconsistent
    systems are reported through the residual, never raised.
    """
    A = as_matrix(A)
    b = as_vector(b)
    if A.shape[0] != b.shape[0]:
        raise LinalgError(
            f"incompatible shapes: A is {A.shape}, b has length {b.shape[0]}"
        )
    if rank_tol is None:
        rank_tol = default_rank_tol(max(A.shape))
    U, s, V = svd(A)
    if s.size and s[0] > 0.0:
        keep = s > rank_tol * s[0]
    else:
        keep = np.zeros_like(s, dtype=bool)
    coeffs = np.zeros(s.size, dtype=np.complex128)
    proj = U.conj().T @ b
    coeffs[keep] = proj[: s.size][keep] / s[keep]
    x = V[:, : s.size] @ coeffs
    residual = float(np.linalg.norm(A @ x - b))
    return x, residual


def expm(A) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a Pade approximant."""
    A = as_square(A)
    E = scipy.linalg.expm(A)
    if not (np.all(np.isfinite(E.real)) and np.all(np.isfinite(E.imag))):
        raise OverflowLinalgError(
            f"expm overflowed for matrix with norm {np.linalg.norm(A, 2):.3e}"
        )
    return E
