"""Adiabatic-impulse model (AIM) of a driven two-level system.

The qubit Hamiltonian is ``H = (delta/2) X + (eps(t)/2) Z`` with hbar = 1.
AIM matrices act on the adiabatic basis ordered (upper, lower).  The basis
vectors are the real, continuous-in-eps eigenvectors

    |upper> = ( cos(g/2),  sin(g/2)),   |lower> = (sin(g/2), -cos(g/2)),
    g = atan2(delta, eps),

so that a downward crossing (+A -> -A) is described by ``N`` and an upward
crossing by its transpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma

from .errors import DomainError
from .qsp import Unitary2, rotation_gate

QUAD_ABS_TOL = 1e-10


@dataclass(frozen=True)
class QubitParams:
    """Gap ``delta`` and drive amplitude ``amplitude`` in units where hbar = 1.

    ``delta = 0`` is accepted for limit checks; otherwise ``amplitude > delta``.
    """

    delta: float = 1.0
    amplitude: float = 3.0

    def __post_init__(self):
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be >= 0, got {self.delta!r}")
        if not (self.amplitude > self.delta and math.isfinite(self.amplitude)):
            raise DomainError(f"amplitude must exceed delta, got A={self.amplitude!r}, delta={self.delta!r}")

    hbar = 1.0

    @property
    def t_r(self) -> float:
        """Resonant excitation period ``2 pi / delta``."""
        return 2 * math.pi / self.delta if self.delta > 0 else math.inf

    @property
    def omega_larmor(self) -> float:
        return math.hypot(self.amplitude, self.delta) / self.hbar

    @property
    def t_larmor(self) -> float:
        return 2 * math.pi / self.omega_larmor

    def gap(self, eps):
        """Instantaneous level splitting ``sqrt(eps^2 + delta^2)``."""
        return np.hypot(eps, self.delta)


@dataclass(frozen=True)
class AimCharacterization:
    """Everything the AIM needs to know about one anti-crossing passage."""

    omega: float
    v: float
    delta_adb: float
    stokes: float
    p: float
    t_coef: float
    r_coef: float
    omega_L: float
    t_L: float

    @property
    def theta(self) -> float:
        """x-rotation angle of the passage, ``2 arcsin(sqrt(P))`` in ``[0, pi]``."""
        return 2.0 * math.asin(min(1.0, self.t_coef))


def characterize(q: QubitParams, omega: float) -> AimCharacterization:
    """Characterize a half-cosine passage ``eps = +-A cos(omega t)``."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    v = q.amplitude * omega
    delta_adb = q.delta**2 / (4 * q.hbar * v)
    p = math.exp(-math.pi * q.delta**2 / (2 * q.amplitude * q.hbar * omega))
    omega_L = q.omega_larmor
    return AimCharacterization(
        omega=float(omega),
        v=v,
        delta_adb=delta_adb,
        stokes=stokes_phase(delta_adb),
        p=p,
        t_coef=math.sqrt(p),
        r_coef=math.sqrt(1.0 - p),
        omega_L=omega_L,
        t_L=2 * math.pi / omega_L,
    )


def stokes_phase(delta_adb: float) -> float:
    """``pi/4 + d (ln d - 1) + arg Gamma(1 - i d)`` on the continuous branch of arg."""
    if delta_adb < 0:
        raise DomainError("adiabaticity parameter must be >= 0")
    if delta_adb == 0:
        return math.pi / 4
    arg_gamma = float(loggamma(1 - 1j * delta_adb).imag)
    return math.pi / 4 + delta_adb * (math.log(delta_adb) - 1) + arg_gamma


def free_evolution(zeta: float) -> Unitary2:
    """Adiabatic evolution ``diag(e^{-i zeta}, e^{i zeta}) = R_z(2 zeta)``."""
    return np.array([[np.exp(-1j * zeta), 0], [0, np.exp(1j * zeta)]], dtype=complex)


def transition_matrix(char: AimCharacterization, inverse: bool = False) -> Unitary2:
    r, t, ph = char.r_coef, char.t_coef, char.stokes
    n = np.array([[r * np.exp(-1j * ph), -t], [t, r * np.exp(1j * ph)]], dtype=complex)
    return n.T.copy() if inverse else n


def single_lzsm_unitary(char: AimCharacterization, zeta1: float, zeta2: float,
                        inverse: bool = False) -> Unitary2:
    """``U(zeta2) N U(zeta1)`` for one passage."""
    return free_evolution(zeta2) @ transition_matrix(char, inverse) @ free_evolution(zeta1)


def lzsm_rotation_form(char: AimCharacterization, zeta1: float, zeta2: float,
                       inverse: bool = False) -> Unitary2:
    """Rotation decomposition ``R_z(2 zeta2 + phi_S) R_y(+-theta) R_z(2 zeta1 + phi_S)``.

    The middle factor is a y-rotation; an x-rotation only matches after the
    extra z-frames returned by :func:`x_rotation_frames`.
    """
    ph = char.stokes
    ry = rotation_gate("y", -char.theta if inverse else char.theta)
    return rotation_gate("z", 2 * zeta2 + ph) @ ry @ rotation_gate("z", 2 * zeta1 + ph)


def x_rotation_frames(char: AimCharacterization, inverse: bool = False) -> tuple[float, float]:
    """Angles ``(after, before)`` with ``N = R_z(after) R_x(-theta) R_z(before)`` up to a global phase."""
    ph = char.stokes
    if inverse:
        return ph + math.pi / 2, ph - math.pi / 2
    return ph + 1.5 * math.pi, ph - 1.5 * math.pi


@dataclass(frozen=True)
class DriveSegment:
    """One piece of the drive ``eps(t)``.

    ``kind == "const"`` holds ``epsilon`` for ``duration``.  ``kind ==
    "half_cosine"`` sweeps between the levels +-``amplitude`` in ``pi/omega``:
    ``direction="down"`` runs ``A cos(omega t)`` and ``"up"`` runs
    ``-A cos(omega t)``.
    """

    kind: str
    duration: float
    epsilon: float | None = None
    amplitude: float | None = None
    omega: float | None = None
    direction: str | None = None

    def __post_init__(self):
        if self.kind == "const":
            if self.epsilon is None or not math.isfinite(self.epsilon):
                raise ValueError("const segment needs a finite epsilon")
        elif self.kind == "half_cosine":
            if self.direction not in ("down", "up"):
                raise ValueError(f"direction must be 'down' or 'up', got {self.direction!r}")
            if not (self.omega and self.omega > 0 and self.amplitude and self.amplitude > 0):
                raise ValueError("half_cosine segment needs positive omega and amplitude")
            if self.duration != math.pi / self.omega:
                raise ValueError("half_cosine duration must equal pi/omega")
        else:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise ValueError(f"segment duration must be finite and >= 0, got {self.duration!r}")

    @classmethod
    def const(cls, epsilon: float, duration: float) -> "DriveSegment":
        return cls("const", float(duration), epsilon=float(epsilon))

    @classmethod
    def half_cosine(cls, amplitude: float, omega: float, direction: str) -> "DriveSegment":
        return cls("half_cosine", math.pi / omega, amplitude=float(amplitude),
                   omega=float(omega), direction=direction)

    @property
    def inverse(self) -> bool:
        """Upward crossings use the transposed transition matrix."""
        return self.kind == "half_cosine" and self.direction == "up"

    @property
    def eps_start(self) -> float:
        if self.kind == "const":
            return self.epsilon
        return self.amplitude if self.direction == "down" else -self.amplitude

    @property
    def eps_end(self) -> float:
        if self.kind == "const":
            return self.epsilon
        return -self.eps_start

    def epsilon_at(self, t):
        """Drive value at local time(s) ``t`` in ``[0, duration]``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "const":
            return np.full_like(t, self.epsilon)
        return self.eps_start * np.cos(self.omega * t)


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered drive segments with one role tag per segment."""

    qubit: QubitParams
    segments: tuple[DriveSegment, ...]
    annotations: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        ann = tuple(self.annotations) or ("",) * len(self.segments)
        if len(ann) != len(self.segments):
            raise ValueError("need exactly one annotation per segment")
        object.__setattr__(self, "annotations", ann)
        for i, (prev, nxt) in enumerate(zip(self.segments, self.segments[1:])):
            if prev.eps_end != nxt.eps_start:
                raise ValueError(
                    f"eps(t) jumps between segments {i} and {i + 1}: {prev.eps_end} -> {nxt.eps_start}"
                )

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        """Segment start times followed by the end time."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def epsilon(self, t):
        """Sample ``eps(t)`` at global times ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        edges = self.boundaries
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(self.segments) - 1)
        for i, seg in enumerate(self.segments):
            m = idx == i
            if m.any():
                out[m] = seg.epsilon_at(t[m] - edges[i])
        return out

    def crossing_times(self) -> np.ndarray:
        """Global times where a half-cosine passes eps = 0."""
        edges = self.boundaries
        return np.array([edges[i] + seg.duration / 2 for i, seg in enumerate(self.segments)
                         if seg.kind == "half_cosine"])


def adiabatic_phase(q: QubitParams, segment: DriveSegment, t_from: float, t_to: float) -> float:
    """``(1/2 hbar) int sqrt(eps^2 + delta^2) dt`` over a local interval of one segment."""
    eps = 1e-12 * max(1.0, segment.duration)
    if not (-eps <= t_from <= t_to <= segment.duration + eps):
        raise DomainError(f"interval [{t_from}, {t_to}] is outside the segment [0, {segment.duration}]")
    if t_to == t_from:
        return 0.0
    if segment.kind == "const":
        return float(q.gap(segment.epsilon)) * (t_to - t_from) / (2 * q.hbar)
    return _cosine_phase(q.delta, segment.amplitude, segment.omega, t_from, t_to) / q.hbar


@lru_cache(maxsize=4096)
def _cosine_phase(delta, amplitude, omega, t_from, t_to):
    f = lambda t: 0.5 * math.hypot(amplitude * math.cos(omega * t), delta)  # noqa: E731
    val, _ = quad(f, t_from, t_to, epsabs=QUAD_ABS_TOL, epsrel=0, limit=200)
    return val


def half_cosine_phase(q: QubitParams, omega: float) -> float:
    """Adiabatic phase over a full half-cosine passage (both sides of the crossing)."""
    seg = DriveSegment.half_cosine(q.amplitude, omega, "down")
    return adiabatic_phase(q, seg, 0.0, seg.duration)


def aim_playback(schedule: PulseSchedule) -> Unitary2:
    """AIM evolution operator of a whole schedule in the adiabatic basis.

    Plateaus contribute free evolution; each half-cosine contributes
    ``U(h) N U(h)`` with ``h`` the adiabatic phase from its start to the crossing.
    """
    q = schedule.qubit
    u = np.eye(2, dtype=complex)
    chars: dict[float, AimCharacterization] = {}
    for seg in schedule.segments:
        if seg.kind == "const":
            step = free_evolution(adiabatic_phase(q, seg, 0.0, seg.duration))
        else:
            char = chars.get(seg.omega)
            if char is None:
                char = chars[seg.omega] = characterize(q, seg.omega)
            h = adiabatic_phase(q, seg, 0.0, seg.duration / 2)
            step = single_lzsm_unitary(char, h, h, inverse=seg.inverse)
        u = step @ u
    return u
