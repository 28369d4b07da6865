"""Measurement layer: branch operators and induced correlation-space Kraus maps.

Measuring a physical qudit with outcome ``|m>`` applies the branch operator
``A[m] = sum_k A[k] <m|k>`` to the correlation-space vector ``|R>``. With a Kraus
error ``{F_j}`` acting before the measurement the outcome-``s`` branch becomes
the family ``E_{j,s} = sum_k A[k] <m_s|F_j|k>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import KrausChannel, alpha_vector, beta_vector
from .cptp import SuperOperator
from .linalg import BUILD_TOL, VERIFY_TOL, max_norm, operator_norm, proportionality_to_identity, random_unitary
from .resource import ResourceMPS


class ZeroProbabilityBranch(ValueError):
    """The requested outcome has only vanishing Kraus elements."""


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal measurement basis; ``vectors[:, s]`` is ``|m_s>``."""

    vectors: np.ndarray
    label: str = "custom"
    theta: Optional[float] = None
    phi: Optional[float] = None

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("basis must be a square matrix of column vectors")
        if max_norm(v.conj().T @ v - np.eye(v.shape[0])) > BUILD_TOL:
            raise ValueError("basis vectors are not orthonormal")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def d(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, s: int) -> np.ndarray:
        return self.vectors[:, s]

    @classmethod
    def from_angles(cls, theta: float, phi: float, d: int) -> "MeasurementBasis":
        """``M_{theta,phi} = {|alpha>, |beta>, |2>, ..., |d-1>}``."""
        if not 0 < theta < np.pi:
            raise ValueError(f"theta must lie strictly between 0 and pi, got {theta}")
        v = np.eye(d, dtype=complex)
        v[:, 0] = alpha_vector(theta, phi, d)
        v[:, 1] = beta_vector(theta, phi, d)
        return cls(v, "M_theta_phi", theta, phi)

    @classmethod
    def computational(cls, d: int) -> "MeasurementBasis":
        # theta = 0 is excluded from M_{theta,phi}; the computational basis is its own object.
        return cls(np.eye(d, dtype=complex), "computational")

    @classmethod
    def random(cls, d: int, seed: int) -> "MeasurementBasis":
        return cls(random_unitary(d, np.random.default_rng(seed)), "random")

    def to_dict(self) -> dict:
        return {"label": self.label, "theta": self.theta, "phi": self.phi, "d": self.d}


def branch_operator(mps: ResourceMPS, m) -> np.ndarray:
    """``sum_k A[k] <m|k>``; the amplitudes of ``m`` enter conjugated."""
    m = np.asarray(m, dtype=complex).reshape(-1)
    if m.shape != (mps.d,):
        raise ValueError(f"measurement vector must have dimension d={mps.d}")
    return np.einsum("k,kij->ij", m.conj(), mps.tensors)


@dataclass(frozen=True, eq=False)
class InducedMap:
    """``kraus[s, j] = E_{j,s}``, each ``D x D``."""

    kraus: np.ndarray

    @property
    def D(self) -> int:
        return self.kraus.shape[-1]

    @property
    def n_outcomes(self) -> int:
        return self.kraus.shape[0]

    def outcome(self, s: int) -> np.ndarray:
        return self.kraus[s]

    def gram(self, s: Optional[int] = None) -> np.ndarray:
        ops = self.kraus.reshape(-1, self.D, self.D) if s is None else self.kraus[s]
        return np.einsum("jba,jbc->ac", ops.conj(), ops)


def induced_kraus(mps: ResourceMPS, ch: KrausChannel, basis: MeasurementBasis) -> InducedMap:
    if ch.dim != mps.d or basis.d != mps.d:
        raise ValueError(f"channel ({ch.dim}) and basis ({basis.d}) must match d={mps.d}")
    # coeff[s, j, k] = <m_s| F_j |k>
    coeff = np.einsum("as,jak->sjk", basis.vectors.conj(), ch.kraus)
    return InducedMap(np.einsum("sjk,kab->sjab", coeff, mps.tensors))


def tp_certificate(im: InducedMap) -> float:
    """``max |sum_{j,s} E^dagger E - I|``."""
    return max_norm(im.gram() - np.eye(im.D))


def mixed_map(im: InducedMap) -> SuperOperator:
    """``rho -> sum_{s,j} E_{j,s} rho E_{j,s}^dagger`` (outcomes traced out)."""
    return SuperOperator.from_kraus(im.kraus.reshape(-1, im.D, im.D))


@dataclass
class ConditionalMap:
    """The correlation-space map implemented when outcome ``s`` is observed.

    ``mode`` selects the normal form used by :meth:`__call__`:

    * ``"operator"``: Kraus family scaled by ``1/||.||`` so the largest
      eigenvalue of its Gram sum is 1 (for one Kraus element this is ``K/||K||``
      with the operator norm). Linear, TP iff the Gram sum is proportional to I.
    * ``"state"``: ``rho -> sum_j E rho E^dagger / tr(...)``; nonlinear unless the
      Gram sum is proportional to I. A zero-probability input maps to 0.
    """

    outcome: int
    kraus: np.ndarray
    mode: str = "operator"

    def __post_init__(self):
        if self.mode not in ("operator", "state"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def D(self) -> int:
        return self.kraus.shape[-1]

    @property
    def gram(self) -> np.ndarray:
        return np.einsum("jba,jbc->ac", self.kraus.conj(), self.kraus)

    @property
    def scale(self) -> float:
        return float(np.sqrt(max(np.linalg.eigvalsh(self.gram)[-1], 0.0)))

    @property
    def normalized_kraus(self) -> np.ndarray:
        return self.kraus / self.scale

    @property
    def gram_scale(self) -> Optional[float]:
        """``c`` with Gram ``= c I`` if it exists."""
        c = proportionality_to_identity(self.gram, VERIFY_TOL)
        return None if c is None or isinstance(c, complex) else c

    def is_tp(self, tol: float = VERIFY_TOL) -> bool:
        return proportionality_to_identity(self.gram, tol) is not None

    def operator_map(self) -> SuperOperator:
        return SuperOperator.from_kraus(self.normalized_kraus)

    def renormalized(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = np.einsum("jab,bc,jdc->ad", self.kraus, rho, self.kraus.conj())
        p = np.trace(out).real
        if p <= 1e-14:
            return np.zeros_like(out)
        return out / p

    def __call__(self, rho) -> np.ndarray:
        if self.mode == "state":
            return self.renormalized(rho)
        return self.operator_map().apply(rho)


def per_outcome_map(im: InducedMap, s: int, mode: str = "operator") -> ConditionalMap:
    if not 0 <= s < im.n_outcomes:
        raise ValueError(f"outcome {s} out of range")
    ops = im.outcome(s)
    if max(operator_norm(k) for k in ops) <= 1e-14:
        raise ZeroProbabilityBranch(f"outcome {s} has probability zero for every input")
    return ConditionalMap(s, ops, mode)
