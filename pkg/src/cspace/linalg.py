"""Dense complex linear-algebra helpers shared by the rest of the package.

Matrices and vectors are plain ``numpy`` complex arrays. All comparisons are
tolerance based and use the max-norm of the difference.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

VERIFY_TOL = 1e-9
BUILD_TOL = 1e-12

# Pauli matrices used throughout.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def max_norm(m) -> float:
    a = np.asarray(m)
    return float(np.max(np.abs(a))) if a.size else 0.0


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of the Hermitian part of ``m``."""
    a = _square(m)
    herm = (a + a.conj().T) / 2
    return float(np.linalg.eigvalsh(herm)[0])


def is_hermitian_psd(m, tol: float = VERIFY_TOL) -> bool:
    a = _square(m)
    if max_norm(a - a.conj().T) > tol:
        return False
    return min_eigenvalue(a) >= -tol


def proportionality_to_identity(m, tol: float = VERIFY_TOL) -> Optional[complex]:
    """Return ``c`` with ``m == c * I`` within ``tol``, or ``None``.

    ``c`` is the normalized trace, so it is returned as a real number whenever
    its imaginary part is below ``tol``.
    """
    a = _square(m)
    n = a.shape[0]
    c = np.trace(a) / n
    if max_norm(a - c * np.eye(n)) > tol:
        return None
    if abs(c.imag) <= tol:
        return float(c.real)
    return complex(c)


def unitary_up_to_scale(m, tol: float = VERIFY_TOL) -> Optional[float]:
    """Return ``c > 0`` with ``m^dagger m == c**2 I`` within ``tol``, else ``None``."""
    a = _square(m)
    gram = a.conj().T @ a
    c2 = proportionality_to_identity(gram, tol)
    if c2 is None or isinstance(c2, complex) or c2 <= tol:
        return None
    return float(np.sqrt(c2))


def operator_norm(m) -> float:
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_isometry(dim_in: int, dim_out: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed isometry ``C^dim_in -> C^dim_out`` (``dim_out >= dim_in``)."""
    if dim_out < dim_in:
        raise ValueError("an isometry needs dim_out >= dim_in")
    g = rng.standard_normal((dim_out, dim_in)) + 1j * rng.standard_normal((dim_out, dim_in))
    q, r = np.linalg.qr(g)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density_matrix(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def zrot(theta: float) -> np.ndarray:
    """``exp(i Z theta / 2) = diag(e^{i theta/2}, e^{-i theta/2})``."""
    return np.diag([np.exp(1j * theta / 2), np.exp(-1j * theta / 2)])
