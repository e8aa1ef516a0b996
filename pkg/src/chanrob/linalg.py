"""Dense complex matrix kernel: Hermitian eigenproblems, tensor products,
partial trace/transpose, norms and fidelity.

Everything operates on plain ``numpy`` complex arrays.  Operators are small
(dimension <= ~64) and dense; all functions are pure.
"""
from __future__ import annotations

import numpy as np

HERMITICITY_ATOL = 1e-12
PSD_ATOL = 1e-9


class LinalgError(ValueError):
    """Raised when an operator violates a structural precondition."""


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise LinalgError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def hermitian(m, atol: float = HERMITICITY_ATOL) -> np.ndarray:
    """Validate Hermiticity within ``atol`` (max-norm) and return the
    symmetrized matrix (M + M†)/2."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise LinalgError(f"Hermitian operator must be square, got {m.shape}")
    dev = np.abs(m - m.conj().T).max()
    if dev > atol:
        raise LinalgError(f"matrix is not Hermitian: max |M - M†| = {dev:.3e} > {atol:.1e}")
    return 0.5 * (m + m.conj().T)


def kron(a, b) -> np.ndarray:
    """Kronecker product."""
    return np.kron(as_matrix(a), as_matrix(b))


def _check_bipartite(m: np.ndarray, dims: tuple[int, int]) -> None:
    d1, d2 = dims
    if m.shape[0] != d1 * d2:
        raise LinalgError(f"dimension mismatch: matrix is {m.shape[0]}x{m.shape[1]}, dims = {d1}x{d2}")


def partial_trace(m, dims: tuple[int, int], side: str = "first") -> np.ndarray:
    """Trace out one tensor factor of an operator on C^{d1} ⊗ C^{d2}.

    ``side`` names the factor that is traced *out*: ``"first"`` returns the
    reduced operator on the second factor, ``"second"`` the one on the first.
    """
    m = as_matrix(m)
    d1, d2 = dims
    _check_bipartite(m, dims)
    t = m.reshape(d1, d2, d1, d2)
    if side == "first":
        return np.trace(t, axis1=0, axis2=2)
    if side == "second":
        return np.trace(t, axis1=1, axis2=3)
    raise LinalgError(f"side must be 'first' or 'second', got {side!r}")


def partial_transpose(m, dims: tuple[int, int], side: str = "first") -> np.ndarray:
    """Transpose one tensor factor of an operator on C^{d1} ⊗ C^{d2}."""
    m = as_matrix(m)
    d1, d2 = dims
    _check_bipartite(m, dims)
    t = m.reshape(d1, d2, d1, d2)
    if side == "first":
        t = t.transpose(2, 1, 0, 3)
    elif side == "second":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise LinalgError(f"side must be 'first' or 'second', got {side!r}")
    return t.reshape(d1 * d2, d1 * d2)


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` real and sorted in descending
    order and ``v[:, k]`` the orthonormal eigenvector for ``w[k]``.
    """
    m = hermitian(m)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # iteration cap hit inside LAPACK
        raise LinalgError(f"Hermitian eigensolver failed to converge: {exc}") from exc
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = eig_hermitian(m)
    return float(np.abs(w).sum())


def min_eigenvalue(m) -> float:
    w, _ = eig_hermitian(m)
    return float(w[-1])


def is_psd(m, atol: float = PSD_ATOL) -> bool:
    return min_eigenvalue(m) >= -atol


def psd_sqrt(m, atol: float = PSD_ATOL) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues in [-atol, 0) are clipped to 0."""
    w, v = eig_hermitian(m)
    if w[-1] < -atol:
        raise LinalgError(f"matrix is not PSD: min eigenvalue {w[-1]:.3e} < -{atol:.1e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma, atol: float = PSD_ATOL) -> float:
    """Uhlmann fidelity F = (Tr |√ρ √σ|)².

    For unit-trace PSD inputs the value lies in [0, 1]; for subnormalized
    inputs it scales as Tr(ρ)·Tr(σ), so F(ρ, ρ) = Tr(ρ)².
    """
    r = psd_sqrt(rho, atol=atol)
    s = psd_sqrt(sigma, atol=atol)
    sv = np.linalg.svd(r @ s, compute_uv=False)
    return float(sv.sum() ** 2)


def root_fidelity(rho, sigma, atol: float = PSD_ATOL) -> float:
    """Tr |√ρ √σ| (the square root of :func:`fidelity`)."""
    return float(np.sqrt(fidelity(rho, sigma, atol=atol)))


def frobenius_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


# Constant operators used throughout.

def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


def swap(d: int = 2) -> np.ndarray:
    """SWAP operator on C^d ⊗ C^d, SWAP|ij> = |ji>."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s
