"""Single-qudit error channels in Kraus form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import BUILD_TOL, max_norm, random_isometry


class IncompleteChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """``rho -> sum_j F_j rho F_j^dagger`` with ``sum_j F_j^dagger F_j = I``."""

    kraus: np.ndarray
    tol: float = BUILD_TOL

    def __post_init__(self):
        ops = np.asarray(self.kraus, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] == 0:
            raise ValueError(f"Kraus operators must have shape (w, d, d), got {ops.shape}")
        if not np.all(np.isfinite(ops)):
            raise ValueError("Kraus operators have non-finite entries")
        dev = completeness_deviation(ops)
        if dev > self.tol:
            raise IncompleteChannelError(f"sum F^dagger F deviates from I by {dev:.3e}")
        ops.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return np.einsum("jab,bc,jdc->ad", self.kraus, rho, self.kraus.conj())

    def compose(self, other: "KrausChannel") -> "KrausChannel":
        """Channel applying ``other`` first, then ``self``."""
        ops = np.einsum("iab,jbc->ijac", self.kraus, other.kraus).reshape(-1, self.dim, self.dim)
        return KrausChannel(ops, max(self.tol, other.tol))


def completeness_deviation(ops) -> float:
    ops = np.asarray(ops, dtype=complex)
    gram = np.einsum("jba,jbc->ac", ops.conj(), ops)
    return max_norm(gram - np.eye(ops.shape[-1]))


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(np.eye(d, dtype=complex))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel(np.asarray(u, dtype=complex))


def swap_unitary(a: int, b: int, d: int) -> np.ndarray:
    if a == b:
        raise ValueError("swap error needs two distinct levels")
    if not (0 <= a < d and 0 <= b < d):
        raise ValueError(f"levels {a}, {b} out of range for d={d}")
    u = np.eye(d, dtype=complex)
    u[[a, b]] = u[[b, a]]
    return u


def swap_error(a: int, b: int, d: int) -> KrausChannel:
    """Unitary error exchanging levels ``a`` and ``b``."""
    return unitary_channel(swap_unitary(a, b, d))


def phase_unitary(d: int, s: int = 1) -> np.ndarray:
    """``V**s`` with ``V = sum_p exp(-2 pi i p / d) |p><p|``."""
    if d < 2 or s < 0:
        raise ValueError("need d >= 2 and s >= 0")
    p = np.arange(d)
    return np.diag(np.exp(-2j * np.pi * p * s / d))


def phase_error(d: int, s: int = 1) -> KrausChannel:
    return unitary_channel(phase_unitary(d, s))


def alpha_vector(theta: float, phi: float, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[0] = np.cos(theta / 2)
    v[1] = np.exp(1j * phi) * np.sin(theta / 2)
    return v


def beta_vector(theta: float, phi: float, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[0] = np.sin(theta / 2)
    v[1] = -np.exp(1j * phi) * np.cos(theta / 2)
    return v


def basis_rotation(theta: float, phi: float, d: int) -> np.ndarray:
    """Unitary mapping ``|0> -> |alpha>``, ``|1> -> |beta>`` and fixing ``|k>, k >= 2``."""
    if not 0 < theta < np.pi:
        raise ValueError(f"theta must lie strictly between 0 and pi, got {theta}")
    u = np.eye(d, dtype=complex)
    u[:, 0] = alpha_vector(theta, phi, d)
    u[:, 1] = beta_vector(theta, phi, d)
    return u


def f1_error(theta: float, phi: float, d: int = 3) -> KrausChannel:
    """The single-Kraus qutrit error used in the AKLT mixing counterexample.

    ``F_1 = U_M ( |+><0| - |-><1| + |2><2| )`` where ``U_M`` is
    :func:`basis_rotation`, so ``F_1|0> = (|alpha> + |beta>)/sqrt(2)`` and
    ``F_1|1> = -(|alpha> - |beta>)/sqrt(2)``.
    """
    if d != 3:
        raise ValueError("f1_error is only defined for qutrits (d=3)")
    inner = np.zeros((3, 3), dtype=complex)
    inner[:, 0] = np.array([1, 1, 0]) / np.sqrt(2)
    inner[:, 1] = -np.array([1, -1, 0]) / np.sqrt(2)
    inner[2, 2] = 1
    return unitary_channel(basis_rotation(theta, phi, d) @ inner)


def random_cptp(d: int, rank: int, seed: int) -> KrausChannel:
    """Kraus operators from the ``d x d`` blocks of a Haar-random isometry ``C^d -> C^(rank d)``."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    rng = np.random.default_rng(seed)
    v = random_isometry(d, rank * d, rng)
    return KrausChannel(v.reshape(rank, d, d))
