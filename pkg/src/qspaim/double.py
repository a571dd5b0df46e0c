"""Double-passage compiler: arbitrary x-rotations from two 50/50 passages.

Two P = 1/2 passages with a tunable free-evolution phase between them act
like a Mach-Zehnder interferometer.  The phase between the beam splitters
sets the rotation angle, so the drive frequency never depends on ``theta``
and the block duration stays bounded.

A block starts and ends at eps = -A: upward passage (transposed N), plateau
``t_ad`` at +A, downward passage.  Padding plateaus ``t_in`` / ``t_fin`` at
-A square the block up to a pure ``R_x(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .aim import (
    AimCharacterization,
    DriveSegment,
    PulseSchedule,
    QubitParams,
    characterize,
    free_evolution,
    half_cosine_phase,
    transition_matrix,
)
from .errors import DomainError
from .qsp import PhaseSequence, Unitary2

TWO_PI = 2 * math.pi
_RESIDUE_SNAP = 1e-12


def _residue(x: float) -> float:
    r = x % TWO_PI
    return 0.0 if TWO_PI - r < _RESIDUE_SNAP else r


@dataclass(frozen=True)
class XGatePoint:
    """Drive working point with ``P = 1/2``.

    ``phi_st = phi_S + zeta_cos`` is the Stueckelberg phase between the two
    crossings.  The ideal X-gate point has ``phi_st = pi/2 (mod 2 pi)``;
    other values are absorbed into the block waits.
    """

    qubit: QubitParams
    omega: float
    char: AimCharacterization
    zeta_cos: float
    phi_st: float

    @property
    def phi_st_offset(self) -> float:
        """``phi_st - pi/2`` wrapped to ``(-pi, pi]``."""
        x = (self.phi_st - math.pi / 2) % TWO_PI
        return x - TWO_PI if x > math.pi else x


def half_probability_omega(q: QubitParams) -> float:
    return math.pi * q.delta**2 / (2 * q.hbar * q.amplitude * math.log(2.0))


def _point(q: QubitParams) -> XGatePoint:
    omega = half_probability_omega(q)
    char = characterize(q, omega)
    zeta_cos = half_cosine_phase(q, omega)
    return XGatePoint(q, omega, char, zeta_cos, char.stokes + zeta_cos)


def xgate_working_point(q: QubitParams, tune_amplitude: bool = False, xtol: float = 1e-12) -> XGatePoint:
    """``P = 1/2`` working point at amplitude ``q.amplitude``.

    With ``tune_amplitude`` the amplitude is moved to the nearest value where
    ``phi_st = pi/2 (mod 2 pi)`` holds as well, found by Brent's method.
    """
    base = _point(q)
    if not tune_amplitude:
        return base

    def excess(A, m):
        p = _point(QubitParams(q.delta, A))
        return p.phi_st - math.pi / 2 - TWO_PI * m

    best = None
    m0 = math.floor((base.phi_st - math.pi / 2) / TWO_PI)
    for m in (m0, m0 + 1):
        lo, hi = q.amplitude, q.amplitude
        # phi_st grows monotonically with A (roughly like A^2)
        while excess(lo, m) > 0:
            lo = max(q.delta * (1 + 1e-9), lo / 1.25)
            if lo <= q.delta * (1 + 1e-6):
                break
        while excess(hi, m) < 0:
            hi *= 1.25
        if excess(lo, m) > 0:
            continue
        A = brentq(excess, lo, hi, args=(m,), xtol=xtol, rtol=4 * np.finfo(float).eps)
        if best is None or abs(A - q.amplitude) < abs(best - q.amplitude):
            best = A
    if best is None:
        raise DomainError(f"no X-gate amplitude near A={q.amplitude}")
    return _point(QubitParams(q.delta, best))


@dataclass(frozen=True)
class DoubleBlockParams:
    """Phases and waits of one ``R_x(theta)`` block.

    Phases are the minimal non-negative representatives; each wait is
    ``2 * phase / Omega_L`` reduced modulo the Larmor period.
    """

    theta: float
    phi_in: float
    phi_fin: float
    phi_ad: float
    t_in: float
    t_ad: float
    t_fin: float
    t_mid: float
    char: AimCharacterization
    zeta_cos: float
    phi_st: float

    @property
    def zetas(self) -> tuple[float, float, float]:
        h = self.zeta_cos / 2
        return h, 2 * h, h


def xi_matrix(char: AimCharacterization, zetas: tuple[float, float, float], phi_ad: float,
              phi_in: float, phi_fin: float, first_inverse: bool = True) -> Unitary2:
    """``U(zeta3 + phi_fin) N U(zeta2 + phi_ad) N^T U(zeta1 + phi_in)``.

    ``first_inverse=False`` uses ``N`` for the first passage as well, which
    is only useful as a negative control.
    """
    z1, z2, z3 = zetas
    n = transition_matrix(char)
    n_first = transition_matrix(char, inverse=first_inverse)
    return (free_evolution(z3 + phi_fin) @ n @ free_evolution(z2 + phi_ad)
            @ n_first @ free_evolution(z1 + phi_in))


def rx_block(theta: float, point: XGatePoint) -> DoubleBlockParams:
    """Block parameters realizing ``R_x(theta)`` for ``theta`` in ``[0, 2 pi)``.

    With ``phi_st = pi/2`` the waits reduce to ``t_ad = {(theta+pi)/2pi} T_L``,
    ``t_in = t_fin = 3 T_L / 4`` and ``t_mid = T_L / 2``.
    """
    if not math.isfinite(theta):
        raise DomainError("theta must be finite")
    omega_L = point.char.omega_L
    two_ad = _residue(theta - 2 * point.phi_st)
    two_in = _residue(-point.phi_st)
    two_fin = _residue(two_in + TWO_PI)
    return DoubleBlockParams(
        theta=float(theta),
        phi_in=two_in / 2,
        phi_fin=two_in / 2 + math.pi,
        phi_ad=two_ad / 2,
        t_in=two_in / omega_L,
        t_ad=two_ad / omega_L,
        t_fin=two_fin / omega_L,
        t_mid=_residue(two_in + two_fin) / omega_L,
        char=point.char,
        zeta_cos=point.zeta_cos,
        phi_st=point.phi_st,
    )


def block_unitary(params: DoubleBlockParams) -> Unitary2:
    return xi_matrix(params.char, params.zetas, params.phi_ad, params.phi_in, params.phi_fin)


def build_double_schedule(seq: PhaseSequence, theta: float, q: QubitParams,
                          tune_amplitude: bool = False) -> PulseSchedule:
    return compile_double(seq, theta, q, tune_amplitude)[0]


def compile_double(seq: PhaseSequence, theta: float, q: QubitParams,
                   tune_amplitude: bool = False) -> tuple[PulseSchedule, DoubleBlockParams]:
    """Schedule whose AIM evolution equals the QSP unitary at ``a = cos(theta/2)``.

    Every ``W(a) = R_x(-theta)`` becomes one double-passage block; every
    ``S(phi_k)`` becomes a plateau at -A lasting ``{-2 phi_k / 2pi} T_L``.
    """
    point = xgate_working_point(q, tune_amplitude)
    qq = point.qubit
    A = qq.amplitude
    omega_L = qq.omega_larmor
    block = rx_block(_residue(-theta), point)
    d = seq.degree

    def z_plateau(phi):
        return DriveSegment.const(-A, _residue(-2 * phi) / omega_L)

    segments = [z_plateau(seq.phases[d]), DriveSegment.const(-A, block.t_in)]
    roles = ["z-phase", "pre-wait"]
    for i in range(d):
        if i > 0:
            segments += [DriveSegment.const(-A, block.t_mid), z_plateau(seq.phases[d - i])]
            roles += ["mid-wait", "z-phase"]
        segments += [
            DriveSegment.half_cosine(A, point.omega, "up"),
            DriveSegment.const(A, block.t_ad),
            DriveSegment.half_cosine(A, point.omega, "down"),
        ]
        roles += ["transition", "ad-wait", "transition"]
    segments += [DriveSegment.const(-A, block.t_fin), z_plateau(seq.phases[0])]
    roles += ["post-wait", "z-phase"]
    return PulseSchedule(qq, tuple(segments), tuple(roles)), block
