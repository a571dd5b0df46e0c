"""Closed-system propagation of ``H = (delta/2) X + (eps(t)/2) Z`` under a schedule."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .aim import PulseSchedule, QubitParams
from .direct import compile_direct
from .double import compile_double
from .errors import NumericError, QspAimError
from .qsp import PhaseSequence, qsp_unitary

# fixed-step RK4 norm loss per step scales like (h Omega_L / 2)^6; T_L/400 keeps
# the drift of the longest acceptance schedules below 1e-10
DEFAULT_STEPS_PER_LARMOR = 400
MIN_STEPS_PER_LARMOR = 200
MIN_STEPS_PER_CROSSING = 200


@numba.njit(cache=True, nogil=True)
def _rk4_segment(psi, delta, eps0, omega, is_cos, h, n, out, drift):
    """Integrate one segment in ``n`` steps of size ``h``; states go to ``out[0..n]``."""
    a = psi[0]
    b = psi[1]
    out[0, 0] = a
    out[0, 1] = b
    hd = 0.5 * delta
    for k in range(n):
        t = k * h
        if is_cos:
            e1 = 0.5 * eps0 * math.cos(omega * t)
            e2 = 0.5 * eps0 * math.cos(omega * (t + 0.5 * h))
            e3 = 0.5 * eps0 * math.cos(omega * (t + h))
        else:
            e1 = 0.5 * eps0
            e2 = e1
            e3 = e1
        k1a = -1j * (e1 * a + hd * b)
        k1b = -1j * (hd * a - e1 * b)
        ta = a + 0.5 * h * k1a
        tb = b + 0.5 * h * k1b
        k2a = -1j * (e2 * ta + hd * tb)
        k2b = -1j * (hd * ta - e2 * tb)
        ta = a + 0.5 * h * k2a
        tb = b + 0.5 * h * k2b
        k3a = -1j * (e2 * ta + hd * tb)
        k3b = -1j * (hd * ta - e2 * tb)
        ta = a + h * k3a
        tb = b + h * k3b
        k4a = -1j * (e3 * ta + hd * tb)
        k4b = -1j * (hd * ta - e3 * tb)
        a = a + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        b = b + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        out[k + 1, 0] = a
        out[k + 1, 1] = b
        dn = abs(a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag - 1.0)
        if dn > drift[0]:
            drift[0] = dn
    psi[0] = a
    psi[1] = b


def adiabatic_states(eps, delta):
    """Rows ``(upper, lower)`` of the adiabatic basis at detuning ``eps``."""
    g = math.atan2(delta, eps)
    c, s = math.cos(g / 2), math.sin(g / 2)
    return np.array([[c, s], [s, -c]], dtype=complex)


def ground_state(q: QubitParams, eps: float) -> np.ndarray:
    return adiabatic_states(eps, q.delta)[1].copy()


def p_minus(psi, eps: float, q: QubitParams, basis: str = "adiabatic") -> float:
    """Population of the lower level at detuning ``eps``.

    ``basis="adiabatic"`` projects on the instantaneous ground state, which
    for a ground-state start equals ``|M(a)|^2`` in the AIM picture.
    ``basis="diabatic"`` uses the lower-energy bare state instead.
    """
    psi = np.asarray(psi)
    if basis == "adiabatic":
        v = adiabatic_states(eps, q.delta)[1]
        return float(abs(np.vdot(v, psi)) ** 2)
    if basis == "diabatic":
        return float(abs(psi[1] if eps >= 0 else psi[0]) ** 2)
    raise ValueError(f"unknown basis {basis!r}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    p_minus: np.ndarray
    norm_drift: float
    final_state: np.ndarray = field(repr=False)
    steps: int = 0


def step_size(schedule: PulseSchedule, dt_max: float | None = None) -> tuple[float, float]:
    """Largest allowed step on plateaus and on half-cosines."""
    t_L = schedule.qubit.t_larmor
    h = t_L / DEFAULT_STEPS_PER_LARMOR if dt_max is None else min(dt_max, t_L / MIN_STEPS_PER_LARMOR)
    if not h > 0:
        raise NumericError(f"dt_max must be positive, got {dt_max!r}")
    h_cos = h
    for seg in schedule.segments:
        if seg.kind == "half_cosine":
            h_cos = min(h_cos, seg.duration / MIN_STEPS_PER_CROSSING)
    return h, h_cos


def propagate(schedule: PulseSchedule, psi0=None, dt_max: float | None = None,
              basis: str = "adiabatic") -> Trajectory:
    """Fixed-step RK4 through every segment; renormalizes once at the end."""
    q = schedule.qubit
    if not schedule.segments:
        raise NumericError("schedule has no segments")
    if psi0 is None:
        psi0 = ground_state(q, schedule.segments[0].eps_start)
    psi = np.array(psi0, dtype=complex)
    h_const, h_cos = step_size(schedule, dt_max)
    tiny = 10 * np.finfo(float).eps

    drift = np.zeros(1)
    chunks_t, chunks_psi, chunks_eps = [np.zeros(1)], [psi[None, :].copy()], [np.array([schedule.segments[0].eps_start])]
    t0 = 0.0
    steps = 0
    for seg in schedule.segments:
        if seg.duration == 0:
            continue
        if seg.duration < tiny:
            raise NumericError(f"segment of duration {seg.duration!r} underflows the step size")
        is_cos = seg.kind == "half_cosine"
        hmax = h_cos if is_cos else h_const
        n = max(1, math.ceil(seg.duration / hmax))
        h = seg.duration / n
        out = np.empty((n + 1, 2), dtype=complex)
        _rk4_segment(psi, q.delta, seg.eps_start, seg.omega if is_cos else 0.0, is_cos, h, n, out, drift)
        local = np.arange(1, n + 1) * h
        chunks_t.append(t0 + local)
        chunks_psi.append(out[1:])
        chunks_eps.append(seg.epsilon_at(local))
        t0 += seg.duration
        steps += n

    times = np.concatenate(chunks_t)
    states = np.concatenate(chunks_psi)
    eps = np.concatenate(chunks_eps)
    g = np.arctan2(q.delta, eps)
    if basis == "adiabatic":
        pm = np.abs(np.sin(g / 2) * states[:, 0] - np.cos(g / 2) * states[:, 1]) ** 2
    else:
        pm = np.where(eps >= 0, np.abs(states[:, 1]) ** 2, np.abs(states[:, 0]) ** 2)
    final = psi / np.linalg.norm(psi)
    return Trajectory(times, states, pm, float(drift[0]), final, steps)


def final_p_minus(schedule: PulseSchedule, dt_max: float | None = None, basis: str = "adiabatic") -> tuple[float, float]:
    """``(P_minus, norm drift)`` at the end of the schedule."""
    traj = propagate(schedule, dt_max=dt_max, basis=basis)
    eps_end = schedule.segments[-1].eps_end
    return p_minus(traj.final_state, eps_end, schedule.qubit, basis), traj.norm_drift


def schedule_duration(schedule: PulseSchedule) -> float:
    """Total duration in units of the resonant period ``T_r = 2 pi / delta``."""
    if not schedule.segments:
        return 0.0
    return schedule.duration / schedule.qubit.t_r


def ideal_p_minus(seq: PhaseSequence, theta: float) -> float:
    """``|M(a)|^2`` at ``a = cos(theta/2)``."""
    return float(abs(qsp_unitary(seq, math.cos(theta / 2))[0, 0]) ** 2)


def compile_schedule(seq: PhaseSequence, theta: float, q: QubitParams, mode: str, **kw) -> PulseSchedule:
    if mode == "direct":
        return compile_direct(seq, theta, q, **kw)[0]
    if mode == "double":
        return compile_double(seq, theta, q, **kw)[0]
    raise ValueError(f"mode {mode!r} does not produce a schedule")


@dataclass
class SweepResult:
    theta: np.ndarray
    a: np.ndarray
    p_ideal: np.ndarray
    p_sim: np.ndarray
    abs_err: np.ndarray
    duration_tr: np.ndarray
    norm_drift: np.ndarray
    reason: list[str]
    mode: str

    @property
    def max_abs_err(self) -> float:
        ok = np.isfinite(self.abs_err)
        return float(np.max(self.abs_err[ok])) if ok.any() else math.nan


def worker_count() -> int:
    try:
        n = int(os.environ.get("QSPAIM_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _sweep_point(seq, mode, q, theta, dt_max, basis):
    try:
        sched = compile_schedule(seq, theta, q, mode)
        p, drift = final_p_minus(sched, dt_max, basis)
        return p, schedule_duration(sched), drift, ""
    except QspAimError as exc:
        tag = getattr(exc, "limit", None)
        return math.nan, math.nan, math.nan, f"{type(exc).__name__}:{tag}" if tag else type(exc).__name__


def sweep_response(seq: PhaseSequence, mode: str, q: QubitParams, theta_grid, dt_max: float | None = None,
                   basis: str = "adiabatic", workers: int | None = None) -> SweepResult:
    """Compile and propagate at each theta; ``mode="ideal"`` skips the ODE."""
    theta = np.asarray(theta_grid, dtype=float)
    p_ideal = np.array([ideal_p_minus(seq, t) for t in theta])
    n = len(theta)
    if mode == "ideal":
        nan = np.full(n, math.nan)
        return SweepResult(theta, np.cos(theta / 2), p_ideal, p_ideal.copy(), np.zeros(n), nan,
                           np.zeros(n), [""] * n, mode)
    if mode not in ("direct", "double"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    workers = workers or worker_count()
    args = [(seq, mode, q, t, dt_max, basis) for t in theta]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda a: _sweep_point(*a), args))
    else:
        rows = [_sweep_point(*a) for a in args]
    p_sim = np.array([r[0] for r in rows])
    return SweepResult(
        theta=theta,
        a=np.cos(theta / 2),
        p_ideal=p_ideal,
        p_sim=p_sim,
        abs_err=np.abs(p_ideal - p_sim),
        duration_tr=np.array([r[1] for r in rows]),
        norm_drift=np.array([r[2] for r in rows]),
        reason=[r[3] for r in rows],
        mode=mode,
    )
