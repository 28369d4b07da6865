"""Complete positivity, trace preservation and linearity of correlation-space maps.

Choi convention: ``J = sum_{a,b} Phi(|a><b|) (x) |a><b|`` with the output factor
first, so the identity map on ``C^D`` gives the unnormalized projector
``|Omega><Omega|`` with ``|Omega> = sum_a |a,a>`` (trace ``D``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .linalg import VERIFY_TOL, max_norm, min_eigenvalue, random_density_matrix


class Verdict(str, enum.Enum):
    LINEAR_CPTP = "LinearCPTP"
    CP_NOT_TP = "CPnotTP"
    NOT_CP = "NotCP"
    NON_LINEAR = "NonLinear"


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """A linear map ``C^{din x din} -> C^{dout x dout}``.

    Either ``kraus`` (shape ``(w, dout, din)``) or ``action`` (shape
    ``(din, din, dout, dout)`` with ``action[a, b] = Phi(|a><b|)``) is set.
    """

    dim_in: int
    dim_out: int
    kraus: Optional[np.ndarray] = None
    action: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.kraus is None) == (self.action is None):
            raise ValueError("give exactly one of kraus or action")
        if self.kraus is not None:
            k = np.asarray(self.kraus, dtype=complex)
            if k.ndim != 3 or k.shape[1:] != (self.dim_out, self.dim_in):
                raise ValueError(f"Kraus operators must have shape (w, {self.dim_out}, {self.dim_in})")
            object.__setattr__(self, "kraus", k)
        else:
            a = np.asarray(self.action, dtype=complex)
            shape = (self.dim_in, self.dim_in, self.dim_out, self.dim_out)
            if a.shape != shape:
                raise ValueError(f"action table must have shape {shape}")
            object.__setattr__(self, "action", a)

    @classmethod
    def from_kraus(cls, ops) -> "SuperOperator":
        ops = np.asarray(ops, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        return cls(ops.shape[2], ops.shape[1], kraus=ops)

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], dim: int) -> "SuperOperator":
        """Tabulate a map assumed linear on the matrix units ``|a><b|``."""
        table = None
        for a in range(dim):
            for b in range(dim):
                e = np.zeros((dim, dim), dtype=complex)
                e[a, b] = 1
                out = np.asarray(f(e), dtype=complex)
                if table is None:
                    table = np.zeros((dim, dim) + out.shape, dtype=complex)
                table[a, b] = out
        return cls(dim, table.shape[2], action=table)

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if self.kraus is not None:
            return np.einsum("jab,bc,jdc->ad", self.kraus, rho, self.kraus.conj())
        return np.einsum("ab,abij->ij", rho, self.action)

    def action_table(self) -> np.ndarray:
        if self.action is not None:
            return self.action
        k = self.kraus
        # Phi(|a><b|) = sum_j K_j[:, a] K_j[:, b]^*
        return np.einsum("jia,jkb->abik", k, k.conj())

    def gram(self) -> np.ndarray:
        """``sum_j K_j^dagger K_j`` for the Kraus form, else the partial-trace operator."""
        if self.kraus is not None:
            return np.einsum("jba,jbc->ac", self.kraus.conj(), self.kraus)
        return np.einsum("abii->ab", self.action)

    def compose(self, other: "SuperOperator") -> "SuperOperator":
        """Map applying ``other`` first, then ``self``."""
        if self.kraus is not None and other.kraus is not None:
            ops = np.einsum("iab,jbc->ijac", self.kraus, other.kraus)
            return SuperOperator.from_kraus(ops.reshape(-1, self.dim_out, other.dim_in))
        return SuperOperator.from_function(lambda e: self.apply(other.apply(e)), other.dim_in)


def choi(so: SuperOperator) -> np.ndarray:
    table = so.action_table()
    din, dout = so.dim_in, so.dim_out
    # J[(i,a),(k,b)] = Phi(|a><b|)[i,k]
    return np.einsum("abik->iakb", table).reshape(dout * din, dout * din)


def cp_min_eigenvalue(j: np.ndarray) -> float:
    return min_eigenvalue(j)


def is_cp(j: np.ndarray, tol: float = VERIFY_TOL) -> bool:
    j = np.asarray(j, dtype=complex)
    if max_norm(j - j.conj().T) > tol:
        return False
    return cp_min_eigenvalue(j) >= -tol


def tp_deviation(so: SuperOperator) -> float:
    """``max |sum K^dagger K - I|`` (or the partial-trace analogue for action tables).

    ``gram()`` of an action table is ``[tr Phi(|a><b|)]_{ab}``, which equals the
    transpose of ``sum K^dagger K``; both are compared with the identity.
    """
    return max_norm(so.gram() - np.eye(so.dim_in))


def is_tp(so: SuperOperator, tol: float = VERIFY_TOL) -> bool:
    return tp_deviation(so) <= tol


@dataclass
class LinearityProbe:
    deviation: float
    rho1: Optional[np.ndarray] = None
    rho2: Optional[np.ndarray] = None
    weight: Optional[float] = None


def _probe_pairs(dim: int, trials: int, rng: np.random.Generator):
    basis = [np.diag(np.eye(dim)[a]).astype(complex) for a in range(dim)]
    for a in range(dim):
        for b in range(a + 1, dim):
            yield basis[a], basis[b], 0.5
    for _ in range(trials):
        r1 = random_density_matrix(dim, rng, rank=int(rng.integers(1, dim + 1)))
        r2 = random_density_matrix(dim, rng, rank=int(rng.integers(1, dim + 1)))
        yield r1, r2, float(rng.uniform(0.05, 0.95))


def linearity_probe(
    f: Callable[[np.ndarray], np.ndarray], dim: int, trials: int = 50, seed: int = 0
) -> LinearityProbe:
    """Largest violation of ``f(l r1 + (1-l) r2) = l f(r1) + (1-l) f(r2)``.

    Pairs of computational basis states (``l = 1/2``) are always probed, followed
    by ``trials`` random pairs of density matrices. Violations are measured in
    Frobenius norm.
    """
    rng = np.random.default_rng(seed)
    worst = LinearityProbe(0.0)
    for r1, r2, lam in _probe_pairs(dim, trials, rng):
        mix = lam * r1 + (1 - lam) * r2
        dev = float(np.linalg.norm(f(mix) - lam * f(r1) - (1 - lam) * f(r2)))
        if dev > worst.deviation:
            worst = LinearityProbe(dev, r1, r2, lam)
    return worst


def _pure(v) -> np.ndarray:
    return np.outer(v, np.conj(v))


def linear_extension(f: Callable[[np.ndarray], np.ndarray], dim: int) -> SuperOperator:
    """Extend a map known on density matrices to all operators by polarization.

    ``|a><b| = (P(a+b) - P(a-b) + i P(a+ib) - i P(a-ib)) / 4`` with ``P(v) = |v><v|``.
    """
    eye = np.eye(dim, dtype=complex)

    def g(e):
        (a,), (b,) = np.nonzero(e)
        if a == b:
            return f(_pure(eye[a]))
        u, v = eye[a], eye[b]
        terms = [(1, u + v), (-1, u - v), (1j, u + 1j * v), (-1j, u - 1j * v)]
        return sum(c * f(_pure(w) / 2) for c, w in terms) / 2

    return SuperOperator.from_function(g, dim)


@dataclass
class MapClassification:
    verdict: Verdict
    tp_deviation: Optional[float]
    cp_min_eigenvalue: Optional[float]
    linearity_deviation: float
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "tp_deviation": self.tp_deviation,
            "cp_min_eigenvalue": self.cp_min_eigenvalue,
            "linearity_deviation": self.linearity_deviation,
        }


def classify(
    target: Union[SuperOperator, Callable[[np.ndarray], np.ndarray]],
    dim: Optional[int] = None,
    tol: float = VERIFY_TOL,
    trials: int = 50,
    seed: int = 0,
) -> MapClassification:
    """Classify a map as LinearCPTP, CPnotTP, NotCP or NonLinear.

    Callables are treated as operational maps on density matrices of size
    ``dim``: they are probed for linearity first and, if linear, tabulated by
    polarization.
    """
    if isinstance(target, SuperOperator):
        so, lin = target, 0.0
    else:
        if dim is None:
            raise ValueError("dim is required for operational maps")
        probe = linearity_probe(target, dim, trials, seed)
        lin = probe.deviation
        if lin > tol:
            witness = {"rho1": probe.rho1, "rho2": probe.rho2, "weight": probe.weight}
            return MapClassification(Verdict.NON_LINEAR, None, None, lin, witness)
        so = linear_extension(target, dim)
    j = choi(so)
    herm_dev = max_norm(j - j.conj().T)
    min_eig = cp_min_eigenvalue(j)
    tp_dev = tp_deviation(so)
    if herm_dev > tol or min_eig < -tol:
        verdict = Verdict.NOT_CP
    elif tp_dev > tol:
        verdict = Verdict.CP_NOT_TP
    else:
        verdict = Verdict.LINEAR_CPTP
    return MapClassification(verdict, tp_dev, min_eig, lin)
