"""Brute-force dense simulation used to cross-check correlation-space predictions.

Sites are 0-indexed from the measured end: site 0 is the first qudit ``k_1``,
which is the last tensor factor of the dense vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import KrausChannel
from .correlation import MeasurementBasis
from .cptp import SuperOperator, choi
from .resource import ResourceMPS, boundary_map, to_dense


class IllConditionedError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class DenseDensity:
    n: int
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.d**self.n, self.d**self.n):
            raise ValueError(f"matrix must be {self.d**self.n} x {self.d**self.n}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector(cls, psi, n: int, d: int) -> "DenseDensity":
        psi = np.asarray(psi, dtype=complex)
        return cls(n, d, np.outer(psi, psi.conj()))

    @classmethod
    def from_mps(cls, mps: ResourceMPS) -> "DenseDensity":
        """Unnormalized ``|Psi><Psi|``."""
        return cls.from_vector(to_dense(mps), mps.n_sites, mps.d)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "DenseDensity":
        tr = self.trace
        if tr <= 0:
            raise ValueError("cannot normalize a state with zero trace")
        return DenseDensity(self.n, self.d, self.matrix / tr)


def _check_site(rho: DenseDensity, site: int) -> None:
    if not 0 <= site < rho.n:
        raise ValueError(f"site {site} out of range for {rho.n} sites")


def _sandwich(rho: DenseDensity, left_op: np.ndarray, right_op: np.ndarray, site: int) -> np.ndarray:
    """``(I (x) L (x) I) rho (I (x) R (x) I)`` with ``L, R`` acting on ``site``.

    ``L`` may map ``C^d`` to ``C^e``, so the result has a possibly different
    local dimension on that site.
    """
    n, d = rho.n, rho.d
    axis = n - 1 - site
    t = rho.matrix.reshape((d,) * (2 * n))
    t = np.moveaxis(np.tensordot(left_op, t, axes=([1], [axis])), 0, axis)
    t = np.moveaxis(np.tensordot(t, right_op, axes=([n + axis], [0])), -1, n + axis)
    return t


def apply_channel_at(rho: DenseDensity, site: int, ch: KrausChannel) -> DenseDensity:
    _check_site(rho, site)
    if ch.dim != rho.d:
        raise ValueError(f"channel dimension {ch.dim} does not match d={rho.d}")
    dim = rho.d**rho.n
    out = sum(_sandwich(rho, f, f.conj().T, site).reshape(dim, dim) for f in ch.kraus)
    return DenseDensity(rho.n, rho.d, out)


def project_out(rho: DenseDensity, site: int, vector) -> DenseDensity:
    """Unnormalized ``(<m| (x) I) rho (|m> (x) I)`` on the remaining ``n - 1`` sites."""
    _check_site(rho, site)
    if rho.n < 2:
        raise ValueError("need at least two sites to keep a remainder")
    m = np.asarray(vector, dtype=complex).reshape(1, -1)
    t = _sandwich(rho, m.conj(), m.T, site)
    dim = rho.d ** (rho.n - 1)
    return DenseDensity(rho.n - 1, rho.d, t.reshape(dim, dim))


def partial_trace_site(rho: DenseDensity, site: int) -> DenseDensity:
    eye = np.eye(rho.d)
    out = sum(project_out(rho, site, eye[k]).matrix for k in range(rho.d))
    return DenseDensity(rho.n - 1, rho.d, out)


@dataclass
class Branch:
    outcome: int
    probability: float
    state: Optional[DenseDensity]

    @property
    def zero(self) -> bool:
        return self.state is None


def measure_at(rho: DenseDensity, site: int, basis: MeasurementBasis, eps: float = 1e-14) -> list[Branch]:
    """Born-rule branches; post-measurement states keep the measured site."""
    _check_site(rho, site)
    total = rho.trace
    dim = rho.d**rho.n
    branches = []
    for s in range(basis.d):
        p = np.outer(basis[s], basis[s].conj())
        unnorm = _sandwich(rho, p, p, site).reshape(dim, dim)
        prob = float(np.trace(unnorm).real) / total
        state = DenseDensity(rho.n, rho.d, unnorm / (prob * total)) if prob > eps else None
        branches.append(Branch(s, max(prob, 0.0), state))
    return branches


def dense_conditional_state(
    mps: ResourceMPS, ch: KrausChannel, basis: MeasurementBasis, outcome: Optional[int] = None
) -> DenseDensity:
    """Unnormalized state of sites ``2..N`` after the error and measurement on site 1.

    ``outcome=None`` traces the measurement record out.
    """
    rho = apply_channel_at(DenseDensity.from_mps(mps), 0, ch)
    if outcome is None:
        return partial_trace_site(rho, 0)
    return project_out(rho, 0, basis[outcome])


@dataclass
class Reconstruction:
    superop: SuperOperator
    condition_number: float


def _preparations(D: int):
    eye = np.eye(D, dtype=complex)
    preps = {("p", a): eye[a] for a in range(D)}
    for a in range(D):
        for b in range(a + 1, D):
            preps[("x", a, b)] = eye[a] + eye[b]
            preps[("y", a, b)] = eye[a] + 1j * eye[b]
    return preps


def reconstruct_induced_map(
    mps: ResourceMPS,
    ch: KrausChannel,
    basis: MeasurementBasis,
    n: int = 4,
    outcome: Optional[int] = None,
    max_condition: float = 1e8,
) -> Reconstruction:
    """Tomographically recover the correlation-space map from dense simulations.

    Each boundary preparation ``|R>`` is run through the dense pipeline; the
    reduced state equals ``M sigma M^dagger`` with ``M = boundary_map(r=2)``,
    which is inverted by least squares to get ``sigma = Phi(|R><R|)``.
    Off-diagonal images follow from the polarization identity.
    """
    D = mps.D
    base = mps.with_boundaries(n_sites=n)
    M = boundary_map(base, 2)
    lin = np.kron(M, M.conj())
    cond = float(np.linalg.cond(lin))
    if not np.isfinite(cond) or cond > max_condition:
        raise IllConditionedError(f"boundary map is ill conditioned (cond = {cond:.3e})")

    images = {}
    for key, vec in _preparations(D).items():
        reduced = dense_conditional_state(base.with_boundaries(right=vec), ch, basis, outcome)
        sol, *_ = np.linalg.lstsq(lin, reduced.matrix.reshape(-1), rcond=None)
        images[key] = sol.reshape(D, D)

    table = np.zeros((D, D, D, D), dtype=complex)
    for a in range(D):
        table[a, a] = images[("p", a)]
        for b in range(a + 1, D):
            diag = images[("p", a)] + images[("p", b)]
            re = images[("x", a, b)] - diag
            im = images[("y", a, b)] - diag
            table[a, b] = (re + 1j * im) / 2
            table[b, a] = (re - 1j * im) / 2
    return Reconstruction(SuperOperator(D, D, action=table), cond)


def choi_distance(a: SuperOperator, b: SuperOperator) -> float:
    return float(np.linalg.norm(choi(a) - choi(b)))


def single_kraus(so: SuperOperator) -> np.ndarray:
    """Kraus operator of a rank-one map, read off the top Choi eigenvector."""
    vals, vecs = np.linalg.eigh(choi(so))
    v = vecs[:, -1] * np.sqrt(max(vals[-1], 0.0))
    return v.reshape(so.dim_out, so.dim_in)
