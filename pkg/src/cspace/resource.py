"""Matrix-product resource states and their dense expansion.

A resource is the open chain

    |Psi> = sum_k <L| A[k_N] ... A[k_1] |R> |k_N, ..., k_1>

with ``d`` physical levels and bond dimension ``D``. Site 1 (the first qudit to
be measured) is the *last* tensor factor of the dense vector, so the dense index
of ``|k_N, ..., k_1>`` is ``k_N d^(N-1) + ... + k_1``.

``left`` stores the ket ``|L>``; the bra is its conjugate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import BUILD_TOL, VERIFY_TOL, H, X, Z, ket, random_unitary, unitary_up_to_scale

MAX_DENSE = 10**6
MAX_W_DIM = 10**3


class SizeGuardError(ValueError):
    """Raised when a dense expansion would exceed the configured size guard."""


@dataclass(frozen=True, eq=False)
class ResourceMPS:
    tensors: np.ndarray
    left: np.ndarray
    right: np.ndarray
    n_sites: int = 4

    def __post_init__(self):
        tensors = np.asarray(self.tensors, dtype=complex)
        if tensors.ndim != 3 or tensors.shape[1] != tensors.shape[2]:
            raise ValueError(f"tensors must have shape (d, D, D), got {tensors.shape}")
        d, D, _ = tensors.shape
        if d < 2:
            raise ValueError("physical dimension d must be >= 2")
        left = np.asarray(self.left, dtype=complex).reshape(-1)
        right = np.asarray(self.right, dtype=complex).reshape(-1)
        if left.shape != (D,) or right.shape != (D,):
            raise ValueError(f"boundary vectors must have dimension D={D}")
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        for arr in (tensors, left, right):
            if not np.all(np.isfinite(arr)):
                raise ValueError("resource has non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "tensors", tensors)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def d(self) -> int:
        return self.tensors.shape[0]

    @property
    def D(self) -> int:
        return self.tensors.shape[1]

    def with_boundaries(self, left=None, right=None, n_sites: Optional[int] = None) -> "ResourceMPS":
        return ResourceMPS(
            self.tensors,
            self.left if left is None else left,
            self.right if right is None else right,
            self.n_sites if n_sites is None else n_sites,
        )

    def completeness(self) -> np.ndarray:
        """``sum_k A[k]^dagger A[k]``."""
        return np.einsum("kji,kjl->il", self.tensors.conj(), self.tensors)


def default_boundary(D: int) -> np.ndarray:
    return ket(0, D)


def aklt(n_sites: int = 4) -> ResourceMPS:
    """The spin-1 AKLT chain: ``A = (X, XZ, Z) / sqrt(3)``."""
    tensors = np.stack([X, X @ Z, Z]) / np.sqrt(3)
    return ResourceMPS(tensors, default_boundary(2), default_boundary(2), n_sites)


def cluster_1d(n_sites: int = 4) -> ResourceMPS:
    """Linear cluster state with ``A[0] = |0><+|`` and ``A[1] = |1><-|``.

    The boundaries ``<L| = <+|`` and ``|R> = |0>`` make the dense expansion equal
    (up to normalization) to the CZ chain applied to ``|+>^N``.
    """
    plus = H[:, 0]
    minus = H[:, 1]
    tensors = np.stack([np.outer(ket(0, 2), plus.conj()), np.outer(ket(1, 2), minus.conj())])
    return ResourceMPS(tensors, plus, ket(0, 2), n_sites)


def _check_angles(theta: float) -> None:
    if not 0 < theta < np.pi:
        raise ValueError(f"theta must lie strictly between 0 and pi, got {theta}")


def rotated_pair(A0: np.ndarray, A1: np.ndarray, theta: float, phi: float):
    """Branch operators ``A[alpha_{theta,phi}]`` and ``A[beta_{theta,phi}]``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    ph = np.exp(-1j * phi)
    return c * A0 + ph * s * A1, s * A0 - ph * c * A1


def branch_names(d: int) -> list[str]:
    return ["alpha", "beta"] + [str(k) for k in range(2, d)]


def branch_operators(mps: ResourceMPS, theta: float, phi: float) -> dict[str, np.ndarray]:
    a, b = rotated_pair(mps.tensors[0], mps.tensors[1], theta, phi)
    ops = {"alpha": a, "beta": b}
    for k in range(2, mps.d):
        ops[str(k)] = mps.tensors[k]
    return ops


def random_resource(
    d: int, D: int, theta: float, phi: float, seed: int, n_sites: int = 4
) -> ResourceMPS:
    """Random resource whose ``M_{theta,phi}`` branches are ``c * unitary`` exactly.

    Unitaries are Haar random, the constants are random positive numbers with
    ``sum c**2 = 1``, and ``A[0], A[1]`` are recovered by inverting the
    ``alpha/beta`` basis change.
    """
    if d < 2 or D < 1:
        raise ValueError("need d >= 2 and D >= 1")
    _check_angles(theta)
    rng = np.random.default_rng(seed)
    unitaries = [random_unitary(D, rng) for _ in range(d)]
    consts = np.abs(rng.standard_normal(d)) + 0.05
    consts /= np.linalg.norm(consts)
    branches = [c * u for c, u in zip(consts, unitaries)]
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    A0 = c * branches[0] + s * branches[1]
    A1 = np.exp(1j * phi) * (s * branches[0] - c * branches[1])
    tensors = np.stack([A0, A1] + branches[2:])
    return ResourceMPS(tensors, default_boundary(D), default_boundary(D), n_sites)


@dataclass
class ValidationReport:
    theta: float
    phi: float
    constants: dict[str, Optional[float]]
    normalization_C: float
    failing: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failing and abs(self.normalization_C - 1.0) <= VERIFY_TOL

    @property
    def unitary(self) -> dict[str, bool]:
        return {name: c is not None for name, c in self.constants.items()}

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "phi": self.phi,
            "constants": self.constants,
            "unitary": self.unitary,
            "normalization_C": self.normalization_C,
            "failing_branches": list(self.failing),
            "valid": self.valid,
        }


def validate(mps: ResourceMPS, theta: float, phi: float, tol: float = VERIFY_TOL) -> ValidationReport:
    """Check that every ``M_{theta,phi}`` branch operator is unitary up to a constant."""
    _check_angles(theta)
    constants: dict[str, Optional[float]] = {}
    failing = []
    for name, op in branch_operators(mps, theta, phi).items():
        c = unitary_up_to_scale(op, tol)
        constants[name] = c
        if c is None:
            failing.append(name)
    C = float(sum(c**2 for c in constants.values() if c is not None))
    return ValidationReport(theta, phi, constants, C, failing)


def boundary_map(mps: ResourceMPS, r: int = 1, guard: int = MAX_DENSE) -> np.ndarray:
    """Matrix whose rows are ``<L| A[k_N] ... A[k_r]`` over sites ``r..N``.

    Rows are ordered like the dense basis ``|k_N, ..., k_r>``; shape is
    ``(d**(N-r+1), D)``.
    """
    N, d = mps.n_sites, mps.d
    if not 1 <= r <= N:
        raise ValueError(f"site index r must satisfy 1 <= r <= N={N}")
    m = N - r + 1
    if d**m > guard:
        raise SizeGuardError(f"d**{m} = {d**m} exceeds size guard {guard}")
    # rows[idx] = <L| A[k_N] ... A[k_{N-j+1}] after j sites, idx over (k_N .. k_{N-j+1})
    rows = mps.left.conj()[None, :]
    for _ in range(m):
        rows = np.einsum("iD,kDE->ikE", rows, mps.tensors).reshape(-1, mps.D)
    return rows


def to_dense(mps: ResourceMPS, guard: int = MAX_DENSE) -> np.ndarray:
    """Unnormalized amplitudes ``<L|A[k_N]...A[k_1]|R>`` in the ``|k_N..k_1>`` basis."""
    return boundary_map(mps, 1, guard) @ mps.right


def to_dense_normalized(mps: ResourceMPS, guard: int = MAX_DENSE) -> np.ndarray:
    psi = to_dense(mps, guard)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("resource state has zero norm for these boundaries")
    return psi / norm


def conditional_W(mps: ResourceMPS, psi, r: int) -> np.ndarray:
    """Unnormalized operator ``W(|psi>)_r`` on sites ``r..N`` (dense ordering)."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (mps.D,):
        raise ValueError(f"psi must have dimension D={mps.D}")
    w = boundary_map(mps, r, MAX_W_DIM) @ psi
    return np.outer(w, w.conj())


def conditional_W_operator(mps: ResourceMPS, sigma, r: int, guard: int = MAX_W_DIM) -> np.ndarray:
    """Linear extension of ``W`` to a correlation-space operator ``sigma``."""
    M = boundary_map(mps, r, guard)
    return M @ np.asarray(sigma, dtype=complex) @ M.conj().T


def transfer_power(mps: ResourceMPS, sigma, times: int) -> np.ndarray:
    """Apply ``X -> sum_k A[k]^dagger X A[k]`` ``times`` times."""
    out = np.asarray(sigma, dtype=complex)
    for _ in range(times):
        out = np.einsum("kji,jl,klm->im", mps.tensors.conj(), out, mps.tensors)
    return out


__all__ = [
    "BUILD_TOL",
    "ResourceMPS",
    "SizeGuardError",
    "ValidationReport",
    "aklt",
    "boundary_map",
    "branch_names",
    "branch_operators",
    "cluster_1d",
    "conditional_W",
    "conditional_W_operator",
    "random_resource",
    "rotated_pair",
    "to_dense",
    "to_dense_normalized",
    "transfer_power",
    "validate",
]
