"""Outcome mixing on the AKLT chain: byproduct sectors of the rotation protocol.

The protocol measures qutrits one after another. While every previous outcome
was ``2`` the qutrit is measured in the rotated basis ``M_{theta,phi}``
(branch operators ``X e^{iZ t/2}``, ``XZ e^{iZ t/2}``, ``Z`` up to ``1/sqrt(3)``);
once a rotation has happened the remaining qutrits are measured in the
computational basis (``X``, ``XZ``, ``Z``). The Pauli byproduct ``X^p Z^q`` is
recorded as a classical flag ``(p, q)``.

The ``Q_k`` matrices carry no ``1/sqrt(3)``; the physical branch operators of
steps ``2..r`` are ``Q_k / sqrt(3)``, so each sector Gram sum picks up the
overall factor ``3**(r-1)`` relative to the physical map (``step_weight``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import KrausChannel
from .correlation import MeasurementBasis, branch_operator, induced_kraus
from .cptp import MapClassification, SuperOperator, classify
from .linalg import VERIFY_TOL, X, Z, ket, max_norm, proportionality_to_identity, unitary_up_to_scale, zrot
from .resource import ResourceMPS, aklt, cluster_1d

MAX_R = 12
SECTORS = ((0, 0), (0, 1), (1, 0), (1, 1))


def f_parity(seq) -> int:
    return sum(s in (0, 1) for s in seq) % 2


def g_parity(seq) -> int:
    return sum(s in (1, 2) for s in seq) % 2


def h_flag(p: int, q: int, r: int) -> int:
    """1 for the sector that receives the all-``2`` (failed) sequence."""
    if r % 2 == 0:
        return int(p == 0 and q == 0)
    return int(p == 0 and q == 1)


def protocol_rotation(theta: float, phi: float) -> float:
    """Rotation angle ``t`` such that ``A[alpha_{theta,phi}] = X e^{iZ t/2} / sqrt(3)``.

    Only ``phi = pi/2`` (``t = -theta``) and ``phi = 3pi/2`` (``t = theta``)
    make the AKLT branches unitary up to a constant.
    """
    if abs(np.cos(phi)) > 1e-9:
        raise ValueError("the AKLT rotation protocol needs cos(phi) = 0")
    return -theta * float(np.sign(np.sin(phi)))


def q_operator(k: int, history, s_k: int, rotation: float) -> np.ndarray:
    """``Q_k(s_1, ..., s_{k-1}, s_k)`` for the protocol rotation angle ``rotation``."""
    history = tuple(history)
    if len(history) != k - 1:
        raise ValueError(f"step {k} needs {k - 1} previous outcomes, got {len(history)}")
    if s_k not in (0, 1, 2) or any(s not in (0, 1, 2) for s in history):
        raise ValueError("outcomes must lie in {0, 1, 2}")
    if s_k == 2:
        return Z.copy()
    base = X if s_k == 0 else X @ Z
    if all(s == 2 for s in history):
        return base @ zrot(rotation)
    return base.copy()


def sector_enumerate(r: int, p: int, q: int) -> list[tuple[int, ...]]:
    if r < 1 or r > MAX_R:
        raise ValueError(f"r must lie in 1..{MAX_R}")
    out = []
    for seq in itertools.product((0, 1, 2), repeat=r):
        if all(s == 2 for s in seq):
            continue
        if f_parity(seq) == p and g_parity(seq) == q:
            out.append(seq)
    return out


@dataclass
class SectorMap:
    sector: tuple[int, int]
    r: int
    theta: float
    phi: float
    kraus_like: np.ndarray
    n_success: int

    @property
    def gram(self) -> np.ndarray:
        k = self.kraus_like
        return np.einsum("jba,jbc->ac", k.conj(), k)

    @property
    def success_gram(self) -> np.ndarray:
        k = self.kraus_like[: self.n_success]
        return np.einsum("jba,jbc->ac", k.conj(), k)

    @property
    def has_failure_term(self) -> bool:
        return len(self.kraus_like) > self.n_success

    @property
    def step_weight(self) -> float:
        return 3.0 ** (-(self.r - 1))

    def renormalized(self, rho) -> np.ndarray:
        k = self.kraus_like
        out = np.einsum("jab,bc,jdc->ad", k, np.asarray(rho, dtype=complex), k.conj())
        p = np.trace(out).real
        return np.zeros_like(out) if p <= 1e-14 else out / p


def _is_aklt(mps: ResourceMPS) -> bool:
    ref = aklt()
    return mps.tensors.shape == ref.tensors.shape and max_norm(mps.tensors - ref.tensors) <= 1e-12


def sector_map(
    ch: KrausChannel, theta: float, phi: float, r: int, p: int, q: int, mps: Optional[ResourceMPS] = None
) -> SectorMap:
    """Correlation-space map for byproduct sector ``(p, q)`` after ``r`` measurements.

    The error ``ch`` hits the first qutrit, which is measured in ``M_{theta,phi}``.
    """
    mps = aklt() if mps is None else mps
    if not _is_aklt(mps):
        raise ValueError("the mixing protocol is defined for the AKLT resource only")
    rotation = protocol_rotation(theta, phi)
    E = induced_kraus(mps, ch, MeasurementBasis.from_angles(theta, phi, 3)).kraus
    ops = []
    for seq in sector_enumerate(r, p, q):
        tail = np.eye(2, dtype=complex)
        for k in range(2, r + 1):
            tail = q_operator(k, seq[: k - 1], seq[k - 1], rotation) @ tail
        ops.extend(tail @ e for e in E[seq[0]])
    n_success = len(ops)
    if h_flag(p, q, r):
        zr = np.linalg.matrix_power(Z, r - 1)
        ops.extend(zr @ e for e in E[2])
    return SectorMap((p, q), r, theta, phi, np.array(ops).reshape(-1, 2, 2), n_success)


def counterexample_decomposition(sm: SectorMap, tol: float = VERIFY_TOL):
    """Split the success Gram sum as ``c I + (2/3) P``.

    ``P = |1><1|`` for odd ``r`` and ``|0><0|`` for even ``r``. Returns
    ``(c, deviation)`` where ``c`` is ``None`` if the remainder is not
    proportional to the identity within ``tol``.
    """
    proj = np.outer(ket(1, 2), ket(1, 2)) if sm.r % 2 else np.outer(ket(0, 2), ket(0, 2))
    rest = sm.success_gram - (2 / 3) * proj
    c = np.trace(rest).real / 2
    dev = max_norm(rest - c * np.eye(2))
    return (c if proportionality_to_identity(rest, tol) is not None else None), dev


def classify_sector(sm: SectorMap, tol: float = VERIFY_TOL) -> MapClassification:
    """Classify the sector map renormalized by its own outcome probability."""
    return classify(sm.renormalized, dim=2, tol=tol)


def all_sectors(ch: KrausChannel, theta: float, phi: float, r: int) -> list[SectorMap]:
    return [sector_map(ch, theta, phi, r, p, q) for p, q in SECTORS]


def global_gram(ch: KrausChannel, theta: float, phi: float, r: int) -> np.ndarray:
    """Physical Gram sum over every sector including the failure term (should be I)."""
    sectors = all_sectors(ch, theta, phi, r)
    return sum(sm.step_weight * sm.gram for sm in sectors)


def protocol_map(ch: KrausChannel, theta: float, phi: float, r: int, keep_flags: bool = True) -> SuperOperator:
    """The whole protocol as one linear map, optionally keeping the ``(p, q)`` flag.

    With ``keep_flags`` the output is ``sigma (x) |pq><pq|`` on ``C^2 (x) C^4``.
    """
    ops = []
    for idx, sm in enumerate(all_sectors(ch, theta, phi, r)):
        scaled = np.sqrt(sm.step_weight) * sm.kraus_like
        if keep_flags:
            flag = ket(idx, 4)[:, None]
            scaled = np.array([np.kron(k, flag) for k in scaled])
        ops.append(scaled)
    return SuperOperator.from_kraus(np.concatenate(ops))


def byproduct_corrections(mps: ResourceMPS, basis: MeasurementBasis) -> list[np.ndarray]:
    """Unitaries mapping each noiseless branch onto the outcome-0 branch.

    Falls back to identities when some branch is not unitary up to a constant.
    """
    units = []
    for s in range(basis.d):
        b = branch_operator(mps, basis[s])
        c = unitary_up_to_scale(b)
        if c is None:
            return [np.eye(mps.D, dtype=complex)] * basis.d
        units.append(b / c)
    return [units[0] @ u.conj().T for u in units]


def cluster_mixing_control(
    ch: KrausChannel, basis: Optional[MeasurementBasis] = None, tol: float = VERIFY_TOL
) -> MapClassification:
    """Classify the feed-forward corrected, outcome-flagged map on the cluster state.

    Output is ``sum_{s,j} C_s E_{j,s} rho E_{j,s}^dagger C_s^dagger (x) |s><s|``.
    """
    mps = cluster_1d()
    if ch.dim != 2:
        raise ValueError("the cluster control needs a qubit channel")
    basis = MeasurementBasis.from_angles(np.pi / 2, 0.0, 2) if basis is None else basis
    E = induced_kraus(mps, ch, basis).kraus
    corr = byproduct_corrections(mps, basis)
    ops = [np.kron(corr[s] @ e, ket(s, 2)[:, None]) for s in range(2) for e in E[s]]
    return classify(SuperOperator.from_kraus(np.array(ops)), tol=tol)
