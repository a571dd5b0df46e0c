"""Direct QSP -> AIM compiler: one LZSM passage per signal rotation.

The rotation angle ``theta`` fixes the passage probability
``P = sin^2(theta/2)`` and with it the drive frequency.  Constant plateaus
at eps = +-A then supply the QSP z-phases.

Operator order: ``S(phi_d)`` acts first, so the plateau for ``phi_d`` is
played first in time and the plateau for ``phi_0`` last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aim import (
    DriveSegment,
    PulseSchedule,
    QubitParams,
    characterize,
    half_cosine_phase,
    x_rotation_frames,
)
from .errors import DivergentScheduleError
from .qsp import PhaseSequence

THETA_MIN = 0.05
TWO_PI = 2 * math.pi
# residues this close to 2 pi are treated as 0
_RESIDUE_SNAP = 1e-12


@dataclass(frozen=True)
class DirectCompileRequest:
    seq: PhaseSequence
    theta: float
    qubit: QubitParams
    winding: int = 0
    theta_min: float = THETA_MIN


@dataclass(frozen=True)
class PhaseSolution:
    """Solved drive parameters.

    ``T_const[k]`` is the plateau implementing ``phi_k``; ``T_s`` is the
    first plateau in time, i.e. ``T_const[d]``.  ``rx_sign = -1`` records
    that each passage realizes ``R_x(-theta) = W(a)`` after the z-frames are
    absorbed into the plateaus.
    """

    omega: float
    T_s: float
    T_const: tuple[float, ...]
    zeta_cos: float
    stokes: float
    total_duration: float
    t_L: float
    rx_sign: int = -1


def omega_for_theta(theta: float, q: QubitParams, theta_min: float = THETA_MIN) -> float:
    """Drive frequency giving ``P = sin^2(theta/2)`` at amplitude ``q.amplitude``."""
    if not math.isfinite(theta) or theta <= theta_min:
        raise DivergentScheduleError(theta, "P->0", theta_min)
    if theta >= math.pi - theta_min:
        raise DivergentScheduleError(theta, "P->1", theta_min)
    p = math.sin(theta / 2) ** 2
    return -math.pi * q.delta**2 / (2 * q.hbar * q.amplitude * math.log(p))


def _residue(x: float) -> float:
    r = x % TWO_PI
    return 0.0 if TWO_PI - r < _RESIDUE_SNAP else r


def _directions(d: int) -> list[str]:
    return ["down" if k % 2 == 0 else "up" for k in range(d)]


def solve_phase_durations(req: DirectCompileRequest) -> PhaseSolution:
    """Plateau durations that make the AIM product equal the QSP unitary.

    Each gap between passages must accumulate a z-angle ``-2 phi`` modulo
    2 pi.  The angle is the sum of the neighbouring passages' frames, the
    half-cosine adiabatic phases and ``2 zeta_const = Omega_L T``.  Interior
    gaps carry ``2 phi_S + pi + 2 zeta_cos``; the end gaps carry one frame
    and ``zeta_cos`` only.
    """
    q, seq = req.qubit, req.seq
    d = seq.degree
    omega = omega_for_theta(req.theta, q, req.theta_min)
    char = characterize(q, omega)
    zeta_cos = half_cosine_phase(q, omega)
    omega_L = q.omega_larmor
    frames = [x_rotation_frames(char, inverse=(s == "up")) for s in _directions(d)]

    by_slot = []
    for j in range(d + 1):
        fixed = 0.0
        if j > 0:
            fixed += frames[j - 1][0] + zeta_cos
        if j < d:
            fixed += frames[j][1] + zeta_cos
        target = -2 * seq.phases[d - j]
        by_slot.append(_residue(target - fixed) / omega_L + req.winding * char.t_L)

    t_const = tuple(reversed(by_slot))
    total = sum(t_const) + d * math.pi / omega
    return PhaseSolution(
        omega=omega,
        T_s=by_slot[0],
        T_const=t_const,
        zeta_cos=zeta_cos,
        stokes=char.stokes,
        total_duration=total,
        t_L=char.t_L,
    )


def build_direct_schedule(req: DirectCompileRequest, solution: PhaseSolution | None = None) -> PulseSchedule:
    """Plateau at +A, then ``d`` alternating (half-cosine, plateau) pairs."""
    sol = solution or solve_phase_durations(req)
    q = req.qubit
    d = req.seq.degree
    A = q.amplitude
    by_slot = list(reversed(sol.T_const))
    segments = [DriveSegment.const(A, by_slot[0])]
    roles = ["pre-wait"]
    level = A
    for j, direction in enumerate(_directions(d), start=1):
        segments.append(DriveSegment.half_cosine(A, sol.omega, direction))
        level = -level
        segments.append(DriveSegment.const(level, by_slot[j]))
        roles += ["transition", "post-wait" if j == d else "mid-wait"]
    return PulseSchedule(q, tuple(segments), tuple(roles))


def compile_direct(seq: PhaseSequence, theta: float, q: QubitParams, winding: int = 0,
                   theta_min: float = THETA_MIN) -> tuple[PulseSchedule, PhaseSolution]:
    req = DirectCompileRequest(seq, theta, q, winding, theta_min)
    sol = solve_phase_durations(req)
    return build_direct_schedule(req, sol), sol
