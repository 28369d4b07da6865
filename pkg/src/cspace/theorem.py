"""Non-TP witnesses for single-qudit errors on resources with ``d >= 3``.

Three unitary error families are applied to the measured qudit before
``M_{theta,phi}``:

* ``error1``: ``U_{1<->2}``, outcome ``|2>`` implements ``A[1]``;
* ``e3``: ``U_{0<->2} V^s``, outcome ``|alpha>`` mixes ``A[2]`` and ``A[1]``;
* ``e4``: ``U_{0<->1} U_{0<->2} V^t``, outcome ``|alpha>`` mixes ``A[1]`` and ``A[2]``.

If all induced single-outcome operations were trace preserving the phases
would have to satisfy ``2 phi + (t - s) 2pi/d = r pi`` for every ``s, t``,
which is impossible for ``d >= 3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .channels import KrausChannel, phase_unitary, swap_unitary, unitary_channel
from .correlation import MeasurementBasis, ZeroProbabilityBranch, induced_kraus, per_outcome_map
from .linalg import VERIFY_TOL, max_norm, proportionality_to_identity
from .resource import ResourceMPS, validate

DEFAULT_THETA_GRID = tuple(k * np.pi / 9 for k in range(1, 9))
DEFAULT_PHI_GRID = tuple(k * np.pi / 8 for k in range(16))


def make_grid(n_theta: int, n_phi: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    if n_theta < 1 or n_phi < 1:
        raise ValueError("grid sizes must be positive")
    thetas = tuple(k * np.pi / (n_theta + 1) for k in range(1, n_theta + 1))
    phis = tuple(2 * k * np.pi / n_phi for k in range(n_phi))
    return thetas, phis


@dataclass
class ResidualReport:
    step: str
    applicable: bool = True
    eta: Optional[float] = None
    xi: Optional[float] = None
    gamma: Optional[float] = None
    gamma_prime: Optional[float] = None
    delta: Optional[float] = None
    delta_prime: Optional[float] = None
    residual: Optional[np.ndarray] = None
    tp_deviation: float = 0.0
    operator: Optional[np.ndarray] = None

    @property
    def passes(self) -> bool:
        return self.tp_deviation <= VERIFY_TOL

    @property
    def residual_e3(self) -> Optional[np.ndarray]:
        return self.residual if self.step == "e3" else None

    @property
    def residual_e4(self) -> Optional[np.ndarray]:
        return self.residual if self.step == "e4" else None


def error1_unitary(d: int) -> np.ndarray:
    return swap_unitary(1, 2, d)


def e3_unitary(d: int, s: int) -> np.ndarray:
    return swap_unitary(0, 2, d) @ phase_unitary(d, s)


def e4_unitary(d: int, t: int) -> np.ndarray:
    return swap_unitary(0, 1, d) @ swap_unitary(0, 2, d) @ phase_unitary(d, t)


def _scalar(m) -> Optional[float]:
    c = proportionality_to_identity(m, VERIFY_TOL)
    return None if c is None or isinstance(c, complex) else c


def _normalized_deviation(gram: np.ndarray) -> tuple[float, float]:
    """Return ``(||K||**2, max|gram / ||K||**2 - I|)`` with the operator norm."""
    top = float(np.linalg.eigvalsh(gram)[-1])
    if top <= 1e-14:
        return 0.0, 0.0
    return top, max_norm(gram / top - np.eye(gram.shape[0]))


def _outcome_operator(mps: ResourceMPS, u: np.ndarray, theta: float, phi: float, outcome: int) -> np.ndarray:
    basis = MeasurementBasis.from_angles(theta, phi, mps.d)
    im = induced_kraus(mps, unitary_channel(u), basis)
    return im.outcome(outcome)[0]


def check_error1(mps: ResourceMPS, theta: float, phi: float) -> ResidualReport:
    """Outcome ``|2>`` after ``U_{1<->2}``: TP requires ``A[1]^dagger A[1] = eta I``."""
    if mps.d < 3:
        return ResidualReport("error1", applicable=False)
    k = _outcome_operator(mps, error1_unitary(mps.d), theta, phi, 2)
    gram = k.conj().T @ k
    _, dev = _normalized_deviation(gram)
    a1 = mps.tensors[1]
    return ResidualReport("error1", eta=_scalar(a1.conj().T @ a1), tp_deviation=dev, operator=k)


def _mixed_check(mps, theta, phi, u, step, phase):
    """Shared body of the e3/e4 checks.

    ``phase`` is the angle ``x`` in ``exp(-i x) A2^dag A1 + exp(i x) A1^dag A2``.
    """
    k = _outcome_operator(mps, u, theta, phi, 0)
    gram = k.conj().T @ k
    top, dev = _normalized_deviation(gram)
    a1, a2 = mps.tensors[1], mps.tensors[2]
    eta = _scalar(a1.conj().T @ a1)
    xi = _scalar(a2.conj().T @ a2)
    cross = np.exp(-1j * phase) * a2.conj().T @ a1 + np.exp(1j * phase) * a1.conj().T @ a2
    D = mps.D
    residual = cross - np.trace(cross) / D * np.eye(D)
    c2, s2 = np.cos(theta / 2) ** 2, np.sin(theta / 2) ** 2
    if step == "e3":
        w2, w1 = c2, s2
    else:
        w2, w1 = s2, c2
    prime = None
    if eta is not None and xi is not None:
        prime = 2 / np.sin(theta) * (top - xi * w2 - eta * w1)
    report = ResidualReport(step, eta=eta, xi=xi, residual=residual, tp_deviation=dev, operator=k)
    if step == "e3":
        report.gamma, report.gamma_prime = top, prime
    else:
        report.delta, report.delta_prime = top, prime
    return report


def check_e3(mps: ResourceMPS, theta: float, phi: float, s: int) -> ResidualReport:
    """Outcome ``|alpha>`` after ``U_{0<->2} V^s``.

    ``residual`` is the traceless part of
    ``exp(-i(phi - s w)) A2^dag A1 + exp(i(phi - s w)) A1^dag A2``, ``w = 2pi/d``.
    """
    if mps.d < 3:
        return ResidualReport("e3", applicable=False)
    w = 2 * np.pi / mps.d
    return _mixed_check(mps, theta, phi, e3_unitary(mps.d, s), "e3", phi - s * w)


def check_e4(mps: ResourceMPS, theta: float, phi: float, t: int) -> ResidualReport:
    """Outcome ``|alpha>`` after ``U_{0<->1} U_{0<->2} V^t``."""
    if mps.d < 3:
        return ResidualReport("e4", applicable=False)
    w = 2 * np.pi / mps.d
    return _mixed_check(mps, theta, phi, e4_unitary(mps.d, t), "e4", -(phi + t * w))


def phase_condition(phi: float, s: int, t: int, d: int, tol: float = 1e-9) -> Optional[int]:
    """Integer ``r`` with ``2 phi + (t - s) 2pi/d = r pi``, or ``None``."""
    x = (2 * phi + (t - s) * 2 * np.pi / d) / np.pi
    r = int(round(x))
    return r if abs(x - r) * np.pi <= tol else None


@dataclass
class Witness:
    channel: KrausChannel
    basis: MeasurementBasis
    outcome: int
    violation: float
    proof_step: str
    params: dict = field(default_factory=dict)
    resource_assumption_holds: bool = True

    def to_dict(self) -> dict:
        from .io import channel_to_dict

        return {
            "proof_step": self.proof_step,
            "params": dict(self.params),
            "theta": self.basis.theta,
            "phi": self.basis.phi,
            "outcome": self.outcome,
            "violation": self.violation,
            "resource_assumption_holds": self.resource_assumption_holds,
            "channel": channel_to_dict(self.channel),
        }


def error_families(d: int):
    yield "error1", {}, error1_unitary(d)
    for s in range(d):
        yield "e3", {"s": s}, e3_unitary(d, s)
    for t in range(d):
        yield "e4", {"t": t}, e4_unitary(d, t)


def find_nontp_witness(
    mps: ResourceMPS,
    theta_grid: Iterable[float] = DEFAULT_THETA_GRID,
    phi_grid: Iterable[float] = DEFAULT_PHI_GRID,
    threshold: float = 1e-6,
) -> Optional[Witness]:
    """Sweep the three error families over the grid and every outcome.

    Grid points where the resource satisfies the unitary-branch assumption are
    visited first, so a witness is reported there whenever one exists.
    Resources with ``d < 3`` have no such error family and yield ``None``.
    """
    if mps.d < 3:
        return None
    points = [(th, ph) for th in theta_grid for ph in phi_grid]
    holds = {p: validate(mps, *p).valid for p in points}
    ordered = [p for p in points if holds[p]] + [p for p in points if not holds[p]]
    for theta, phi in ordered:
        basis = MeasurementBasis.from_angles(theta, phi, mps.d)
        for step, params, u in error_families(mps.d):
            ch = unitary_channel(u)
            im = induced_kraus(mps, ch, basis)
            for s in range(mps.d):
                try:
                    cm = per_outcome_map(im, s)
                except ZeroProbabilityBranch:
                    continue
                _, dev = _normalized_deviation(cm.gram)
                if dev > threshold:
                    return Witness(ch, basis, s, dev, step, params, holds[(theta, phi)])
    return None
