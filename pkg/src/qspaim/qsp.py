"""Quantum signal processing algebra on a single qubit.

All gates are plain ``(2, 2)`` complex numpy arrays.  The conventions are

    W(a)  = [[a, i sqrt(1-a^2)], [i sqrt(1-a^2), a]] = R_x(-theta),  a = cos(theta/2)
    S(phi) = diag(e^{i phi}, e^{-i phi})             = R_z(-2 phi)

and the QSP unitary for phases ``(phi_0, ..., phi_d)`` is

    U = S(phi_0) W(a) S(phi_1) W(a) ... W(a) S(phi_d).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P

from .errors import DomainError

Unitary2 = np.ndarray

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# eta = arccos(-1/4) / 2
BB1_ETA = 0.5 * np.arccos(-0.25)


@dataclass(frozen=True)
class PhaseSequence:
    """Ordered QSP phases ``(phi_0, ..., phi_d)``; the degree is ``d``."""

    phases: tuple[float, ...]
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        phases = tuple(float(p) for p in self.phases)
        if len(phases) < 2:
            raise DomainError("a phase sequence needs at least two phases (d >= 1)")
        if not all(np.isfinite(phases)):
            raise DomainError("phases must be finite")
        object.__setattr__(self, "phases", phases)

    @property
    def degree(self) -> int:
        return len(self.phases) - 1

    def __len__(self):
        return len(self.phases)

    def __iter__(self):
        return iter(self.phases)


@dataclass(frozen=True)
class SignalPoint:
    """A signal value given both as the rotation angle and as ``a = cos(theta/2)``."""

    theta: float
    a: float

    @classmethod
    def from_theta(cls, theta: float) -> "SignalPoint":
        return cls(float(theta), float(np.cos(theta / 2)))

    @classmethod
    def from_a(cls, a: float) -> "SignalPoint":
        _check_signal(a)
        return cls(theta_from_a(a), float(a))


def theta_from_a(a: float) -> float:
    """Principal branch ``theta = 2 arccos(a)`` in ``[0, 2 pi]``."""
    _check_signal(a)
    return float(2.0 * np.arccos(a))


def _check_signal(a):
    if not np.isfinite(a) or abs(a) > 1.0:
        raise DomainError(f"signal a={a!r} must lie in [-1, 1]")


def rotation_gate(axis: str, angle: float) -> Unitary2:
    """``R_axis(angle) = exp(-i angle/2 sigma_axis)`` for ``axis`` in ``x``, ``y``, ``z``."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "z":
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)
    raise ValueError(f"unknown rotation axis {axis!r}")


def qsp_operator(kind: str, arg: float) -> Unitary2:
    """Signal rotation ``W(a)`` (``kind="W"``) or signal processing ``S(phi)`` (``kind="S"``)."""
    if kind == "W":
        _check_signal(arg)
        s = 1j * np.sqrt(1.0 - arg * arg)
        return np.array([[arg, s], [s, arg]], dtype=complex)
    if kind == "S":
        return np.array([[np.exp(1j * arg), 0], [0, np.exp(-1j * arg)]], dtype=complex)
    raise ValueError(f"unknown QSP operator {kind!r}")


def qsp_unitary(seq: PhaseSequence | Sequence[float], a: float) -> Unitary2:
    """Product ``S(phi_0) prod_k W(a) S(phi_k)`` in operator order."""
    phases = _phases(seq)
    w = qsp_operator("W", a)
    u = qsp_operator("S", phases[0])
    for phi in phases[1:]:
        u = u @ w @ qsp_operator("S", phi)
    return u


def qsp_rotation_form(seq: PhaseSequence | Sequence[float], a: float) -> Unitary2:
    """Same unitary written as ``R_z(-2 phi_0) prod_k R_x(-theta) R_z(-2 phi_k)``."""
    phases = _phases(seq)
    theta = theta_from_a(a)
    rx = rotation_gate("x", -theta)
    u = rotation_gate("z", -2 * phases[0])
    for phi in phases[1:]:
        u = u @ rx @ rotation_gate("z", -2 * phi)
    return u


def _phases(seq) -> tuple[float, ...]:
    if isinstance(seq, PhaseSequence):
        return seq.phases
    return PhaseSequence(tuple(seq)).phases


def reference_sequence(name: str) -> PhaseSequence:
    """Named presets: ``"chebyshev:<d>"`` (d+1 zeros) and ``"bb1"``."""
    key = name.strip().lower()
    if key == "bb1":
        eta = BB1_ETA
        return PhaseSequence((np.pi / 2, -eta, 2 * eta, 0.0, -2 * eta, eta), name="bb1")
    if key.startswith("chebyshev"):
        _, _, deg = key.partition(":")
        try:
            d = int(deg)
        except ValueError:
            raise ValueError(f"chebyshev preset needs an integer degree, got {name!r}") from None
        if d < 1:
            raise DomainError("chebyshev degree must be >= 1")
        return PhaseSequence((0.0,) * (d + 1), name=f"chebyshev:{d}")
    raise ValueError(f"unknown reference sequence {name!r}")


def chebyshev_value(d: int, a: float) -> float:
    """``T_d(a)`` by the three-term recursion."""
    if d < 0:
        raise DomainError("Chebyshev degree must be >= 0")
    t_prev, t = 1.0, float(a)
    if d == 0:
        return t_prev
    for _ in range(d - 1):
        t_prev, t = t, 2.0 * a * t - t_prev
    return t


def bb1_polynomial(a: float) -> float:
    """Closed-form BB1 polynomial ``a^2 (3a^8 - 15a^6 + 35a^4 - 45a^2 + 30) / 8``.

    Numerically this equals ``|<0|U_BB1|0>|^2`` rather than the matrix
    element itself.
    """
    a2 = a * a
    return a2 * (3 * a2**4 - 15 * a2**3 + 35 * a2**2 - 45 * a2 + 30) / 8.0


def is_unitary(u: Unitary2, atol: float = 1e-12) -> bool:
    return bool(
        np.allclose(u @ u.conj().T, IDENTITY, rtol=0, atol=atol)
        and abs(abs(np.linalg.det(u)) - 1.0) <= atol
    )


def phase_aligned_distance(u: Unitary2, v: Unitary2) -> float:
    """Frobenius distance ``min_g ||u - g v||`` over unit-modulus scalars ``g``."""
    overlap = np.vdot(v, u)
    g = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(u - g * v))


@dataclass
class PolynomialReport:
    """Monomial coefficients of ``M(a)`` and ``Q(a)`` recovered by least squares.

    ``m_coeffs[k]`` multiplies ``a**k``.  ``parity`` is ``d % 2`` when every
    wrong-parity coefficient is below the tolerance and ``None`` otherwise.
    """

    degree: int
    m_coeffs: np.ndarray
    q_coeffs: np.ndarray
    parity: int | None
    normalization_residual: float
    fit_residual: float
    ill_conditioned: bool
    nodes: np.ndarray = field(repr=False)

    def m(self, a):
        return P.polyval(a, self.m_coeffs)

    def q(self, a):
        return P.polyval(a, self.q_coeffs)


def chebyshev_nodes(n: int) -> np.ndarray:
    j = np.arange(n)
    return np.cos(np.pi * (j + 0.5) / n)


def _fit(x, y, deg):
    # Chebyshev basis keeps the normal equations well conditioned
    cheb = C.chebfit(x, y, deg)
    return C.cheb2poly(cheb)


def extract_polynomial(seq: PhaseSequence, grid_size: int | None = None, parity_tol: float = 1e-9,
                       fit_tol: float = 1e-6) -> PolynomialReport:
    d = seq.degree
    if grid_size is None:
        grid_size = max(4 * (d + 1), 32)
    if grid_size < 2 * (d + 1):
        raise DomainError(f"grid_size must be >= 2(d+1) = {2 * (d + 1)}")
    a = chebyshev_nodes(grid_size)
    us = np.array([qsp_unitary(seq, x) for x in a])
    u11, u12 = us[:, 0, 0], us[:, 0, 1]

    m = _fit(a, u11.real, d) + 1j * _fit(a, u11.imag, d)
    keep = (1.0 - a * a) >= 1e-6
    root = np.sqrt(1.0 - a[keep] ** 2)
    qdata = u12[keep] / (1j * root)
    if d >= 1:
        q = _fit(a[keep], qdata.real, d - 1) + 1j * _fit(a[keep], qdata.imag, d - 1)
    else:
        q = np.zeros(1, dtype=complex)

    m_fit = P.polyval(a, m)
    q_fit = P.polyval(a[keep], q)
    fit_residual = float(max(np.max(np.abs(m_fit - u11)), np.max(np.abs(q_fit - qdata))))
    norm_res = float(np.max(np.abs(np.abs(m_fit) ** 2 + (1 - a * a) * np.abs(P.polyval(a, q)) ** 2 - 1)))

    wrong_m = np.abs(m[(d + 1) % 2::2])
    wrong_q = np.abs(q[d % 2::2])
    ok = max(wrong_m.max(initial=0.0), wrong_q.max(initial=0.0)) <= parity_tol
    return PolynomialReport(
        degree=d,
        m_coeffs=m,
        q_coeffs=q,
        parity=d % 2 if ok else None,
        normalization_residual=norm_res,
        fit_residual=fit_residual,
        ill_conditioned=fit_residual > fit_tol,
        nodes=a,
    )
