"""Small dense complex linear algebra for the 2- and 4-dimensional spaces used here.

Matrices and vectors are plain numpy arrays. Only dimensions 2 (path or
polarization qubit) and 4 (path x polarization) are accepted.
"""
from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
JACOBI_TOL = 1e-14
_MAX_SWEEPS = 64
_DIMS = (2, 4)


class PreconditionError(ValueError):
    """An argument violates the documented precondition of an operation."""


def as_matrix(m, *, dims=_DIMS) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise PreconditionError(f"expected a square matrix of dim {dims}, got shape {m.shape}")
    return m


def as_vector(v, *, dims=_DIMS) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.shape[0] not in dims:
        raise PreconditionError(f"expected a vector of dim {dims}, got shape {v.shape}")
    return v


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    return bool(np.all(np.abs(m - dagger(m)) <= tol))


def _checked_hermitian(m) -> np.ndarray:
    m = as_matrix(m)
    if not is_hermitian(m):
        dev = float(np.max(np.abs(m - dagger(m))))
        raise PreconditionError(f"matrix is not Hermitian (max |M - M^H| = {dev:.3e})")
    return 0.5 * (m + dagger(m))


def _eig2(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # closed form for [[p, q], [conj(q), r]]; m assumed exactly Hermitian
    p = m[0, 0].real
    r = m[1, 1].real
    q = m[0, 1]
    mean = 0.5 * (p + r)
    half_gap = 0.5 * (p - r)
    radius = float(np.hypot(half_gap, abs(q)))
    if abs(q) == 0.0:
        if p <= r:
            return np.array([p, r]), np.eye(2, dtype=complex)
        return np.array([r, p]), np.array([[0, 1], [1, 0]], dtype=complex)
    # pick the form without cancellation
    if half_gap >= 0:
        upper = np.array([half_gap + radius, np.conj(q)], dtype=complex)
    else:
        upper = np.array([q, radius - half_gap], dtype=complex)
    upper /= np.linalg.norm(upper)
    lower = np.array([-np.conj(upper[1]), np.conj(upper[0])])
    vecs = np.column_stack([lower, upper])
    return np.array([mean - radius, mean + radius]), vecs


def _eig4_jacobi(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = m.copy()
    v = np.eye(4, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= JACOBI_TOL * scale:
            break
        for p in range(3):
            for q in range(p + 1, 4):
                if abs(a[p, q]) <= JACOBI_TOL * scale * 1e-3:
                    continue
                block = a[np.ix_([p, q], [p, q])]
                block = 0.5 * (block + dagger(block))
                _, w = _eig2(block)
                g = np.eye(4, dtype=complex)
                g[np.ix_([p, q], [p, q])] = w
                a = dagger(g) @ a @ g
                a = 0.5 * (a + dagger(a))
                v = v @ g
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    vals = np.real(np.diag(a))
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian 2x2 or 4x4 matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as orthonormal columns, so ``m @ V[:, i] == w[i] * V[:, i]``.
    """
    h = _checked_hermitian(m)
    if h.shape[0] == 2:
        return _eig2(h)
    return _eig4_jacobi(h)


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix, ``Tr sqrt(M^H M)``."""
    vals, _ = eig_hermitian(m)
    return float(np.sum(np.abs(vals)))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with the path factor ``a`` first, polarization ``b`` second."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim not in (1, 2) or a.shape[0] != 2:
        raise PreconditionError(f"tensor needs two dim-2 operands of the same kind, got {a.shape} and {b.shape}")
    if a.ndim == 2 and a.shape != (2, 2):
        raise PreconditionError(f"expected 2x2 matrices, got {a.shape}")
    return np.kron(a, b)


def partial_trace_pol(m) -> np.ndarray:
    """Trace out the polarization (second) factor of a 4x4 operator."""
    m = as_matrix(m, dims=(4,))
    return np.einsum("ikjk->ij", m.reshape(2, 2, 2, 2))


def ket_to_density(v) -> np.ndarray:
    v = as_vector(v)
    return np.outer(v, np.conj(v))


def is_unitary(u, tol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=complex)
    return bool(np.all(np.abs(dagger(u) @ u - np.eye(u.shape[-1])) <= tol))
