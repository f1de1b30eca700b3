"""Small eigensolvers: cyclic Jacobi for the 3x3/4x4 gate matrices and a
matrix-free Lanczos for ground energies of wide Pauli sums."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ArgumentError, NumericError

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 200


def jacobi_eigh(matrix, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """All eigenpairs of a small real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors in the columns,
    unsorted (diagonal order after convergence). Converged when the
    off-diagonal Frobenius mass drops below ``tol`` times the matrix scale.
    """
    a = np.array(matrix, dtype=float)
    k = a.shape[0]
    if a.shape != (k, k):
        raise ArgumentError(f"expected a square matrix, got {a.shape}")
    if not np.allclose(a, a.T, atol=1e-10, rtol=0):
        raise ArgumentError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(k)
    scale = max(1.0, float(np.sqrt(np.sum(a * a))))
    offdiag = ~np.eye(k, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(a[offdiag] ** 2)))
        if off < tol * scale:
            return np.diag(a).copy(), v
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) Givens rotation
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise NumericError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def canonical_sign(vec: np.ndarray) -> np.ndarray:
    """Flip ``vec`` so its first component of magnitude > 1e-8 is positive."""
    for x in vec:
        if abs(x) > 1e-8:
            return vec if x > 0 else -vec
    return vec


def symmetric_eigen_lowest(matrix) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a 3x3 or 4x4 real symmetric matrix.

    Ties between (numerically) equal lowest eigenvalues go to the lowest
    diagonal position after the sweep, which is deterministic.
    """
    a = np.asarray(matrix, dtype=float)
    if a.shape not in ((3, 3), (4, 4)):
        raise ArgumentError(f"expected a 3x3 or 4x4 matrix, got {a.shape}")
    w, v = jacobi_eigh(a)
    lo = float(np.min(w))
    idx = int(np.flatnonzero(w <= lo + 1e-12 * max(1.0, abs(lo)))[0])
    vec = v[:, idx]
    vec = vec / np.linalg.norm(vec)
    return float(w[idx]), canonical_sign(vec)


def lanczos_lowest(matvec: Callable[[np.ndarray], np.ndarray], dim: int, *, dtype=np.float64,
                   tol: float = 1e-10, max_iter: int = 300, seed: int = 12345) -> float:
    """Lowest eigenvalue of a Hermitian operator given only ``matvec``.

    Plain Lanczos with full reorthogonalization. Stops once the lowest Ritz
    value changes by less than ``tol`` between consecutive steps, or when the
    Krylov space becomes invariant.
    """
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(dim)
    if np.issubdtype(dtype, np.complexfloating):
        q = q + 1j * rng.standard_normal(dim)
    q = q.astype(dtype)
    q /= np.linalg.norm(q)
    m = min(max_iter, dim)
    basis = np.zeros((m, dim), dtype=dtype)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    prev = np.inf
    for j in range(m):
        basis[j] = q
        w = np.asarray(matvec(q))
        if not np.issubdtype(dtype, np.complexfloating):
            w = w.real
        w = w.astype(dtype, copy=False)
        alpha[j] = float(np.vdot(q, w).real)
        # two passes of classical Gram-Schmidt against the whole basis
        for _ in range(2):
            w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        b = float(np.linalg.norm(w))
        ritz = float(_tridiag_min(alpha[: j + 1], beta[:j]))
        if abs(ritz - prev) < tol or b < 1e-12:
            return ritz
        prev = ritz
        beta[j] = b
        q = w / b
    raise NumericError(f"Lanczos did not converge within {m} iterations")


def _tridiag_min(alpha: np.ndarray, beta: np.ndarray) -> float:
    k = alpha.size
    t = np.diag(alpha)
    if k > 1:
        t += np.diag(beta, 1) + np.diag(beta, -1)
    return np.linalg.eigvalsh(t)[0]
