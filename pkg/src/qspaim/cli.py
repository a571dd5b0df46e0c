"""Command-line front end.

    qspaim curve    --phases bb1 --grid 101
    qspaim compile  --mode direct --phases bb1 --theta 1.0 --amplitude 3 --out s.json
    qspaim simulate --schedule s.json --out traj.csv
    qspaim sweep    --mode double --phases bb1 --amplitude 5 --grid 101

Exit codes: 0 success, 2 usage, 3 direct-compile divergence, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .aim import QubitParams
from .direct import compile_direct
from .double import compile_double
from .dynamics import p_minus, propagate, schedule_duration, sweep_response, compile_schedule
from .errors import DivergentScheduleError, DomainError, NumericError
from .qsp import PhaseSequence, bb1_polynomial, chebyshev_value, qsp_unitary, reference_sequence

EXIT_USAGE, EXIT_DIVERGENT, EXIT_NUMERIC = 2, 3, 4


class UsageError(Exception):
    pass


def parse_phases(spec: str) -> PhaseSequence:
    """``bb1``, ``chebyshev:<d>`` or a comma-separated list of radians."""
    spec = spec.strip()
    if not spec:
        raise UsageError("empty phase spec")
    if spec[0].isalpha():
        try:
            return reference_sequence(spec)
        except (ValueError, DomainError) as exc:
            raise UsageError(str(exc)) from None
    try:
        values = tuple(float(x) for x in spec.split(","))
        return PhaseSequence(values)
    except (ValueError, DomainError) as exc:
        raise UsageError(f"bad phase list {spec!r}: {exc}") from None


def closed_form(seq: PhaseSequence):
    """Closed-form curve for presets that have one, else ``None``."""
    if seq.name == "bb1":
        return bb1_polynomial
    if all(p == 0.0 for p in seq.phases):
        d = seq.degree
        return lambda a: chebyshev_value(d, a)
    return None


@dataclass
class RunConfig:
    command: str
    seq: PhaseSequence | None
    thetas: np.ndarray | None
    qubit: QubitParams | None
    mode: str | None
    out: str
    dt_max: float | None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        seq = parse_phases(args.phases) if getattr(args, "phases", None) is not None else None
        thetas = None
        if getattr(args, "grid", None) is not None:
            if args.grid < 2:
                raise UsageError("--grid must be >= 2")
            thetas = np.linspace(args.theta_min, args.theta_max, args.grid)
        qubit = None
        if getattr(args, "amplitude", None) is not None:
            if not args.amplitude > 1:
                raise UsageError("--amplitude (A/delta) must exceed 1")
            qubit = QubitParams(args.delta, args.amplitude * args.delta)
        dt = getattr(args, "dt_max", None)
        if dt is not None and not dt > 0:
            raise UsageError("--dt-max must be positive")
        return cls(args.command, seq, thetas, qubit, getattr(args, "mode", None),
                   getattr(args, "out", "-"), dt)


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_curve(args) -> int:
    cfg = RunConfig.from_args(args)
    seq, theta = cfg.seq, cfg.thetas
    a = np.cos(theta / 2)
    p = np.array([abs(qsp_unitary(seq, x)[0, 0]) ** 2 for x in a])
    poly = closed_form(seq)
    header = ["theta", "a", "P_ideal"]
    cols = [theta, a, p]
    summary = []
    m_poly = None
    if poly is not None:
        m_poly = np.array([poly(x) for x in a])
        header.append("M_poly")
        cols.append(m_poly)
    _emit(io.format_csv(header, zip(*cols), summary), cfg.out)
    if args.plot:
        from .plotting import plot_curve
        closed = m_poly if seq.name == "bb1" else (m_poly**2 if m_poly is not None else None)
        plot_curve(theta, p, args.plot, closed, label=seq.name)
    return 0


def _compile(args, qubit, seq):
    if args.mode == "direct":
        return compile_direct(seq, args.theta, qubit)[0]
    return compile_double(seq, args.theta, qubit, tune_amplitude=args.tune_amplitude)[0]


def cmd_compile(args) -> int:
    cfg = RunConfig.from_args(args)
    sched = _compile(args, cfg.qubit, cfg.seq)
    _emit(json.dumps(io.schedule_to_dict(sched), indent=2) + "\n", cfg.out)
    if args.emit_trace:
        t = np.linspace(0.0, sched.duration, args.trace_samples)
        eps = sched.epsilon(t)
        crossings = sched.crossing_times()
        summary = [f"duration_Tr={schedule_duration(sched):.12g}",
                   "crossings_Tr=" + " ".join(f"{x:.12g}" for x in crossings / sched.qubit.t_r)]
        Path(args.emit_trace).write_text(
            io.format_csv(["t", "t_Tr", "epsilon"], zip(t, t / sched.qubit.t_r, eps), summary))
    if args.plot:
        from .plotting import plot_schedule
        plot_schedule(sched, args.plot)
    return 0


def cmd_simulate(args) -> int:
    cfg = RunConfig.from_args(args)
    if args.schedule:
        sched = io.load_schedule(args.schedule)
    else:
        if cfg.seq is None or args.theta is None or cfg.qubit is None or args.mode is None:
            raise UsageError("simulate needs --schedule, or --mode/--phases/--theta/--amplitude")
        sched = _compile(args, cfg.qubit, cfg.seq)
    traj = propagate(sched, dt_max=cfg.dt_max, basis=args.basis)
    if not math.isfinite(traj.norm_drift) or not np.all(np.isfinite(traj.final_state)):
        raise NumericError("propagation produced non-finite amplitudes")
    t_r = sched.qubit.t_r
    stride = max(1, args.stride)
    idx = np.r_[np.arange(0, len(traj.times) - 1, stride), len(traj.times) - 1]
    eps = sched.epsilon(traj.times[idx])
    norm = np.sum(np.abs(traj.states[idx]) ** 2, axis=1)
    p_final = p_minus(traj.final_state, sched.segments[-1].eps_end, sched.qubit, args.basis)
    summary = [f"P_minus_final={p_final:.12g}", f"norm_drift={traj.norm_drift:.12g}",
               f"duration_Tr={schedule_duration(sched):.12g}", f"steps={traj.steps}"]
    rows = zip(traj.times[idx], traj.times[idx] / t_r, eps, traj.p_minus[idx], norm)
    _emit(io.format_csv(["t", "t_Tr", "epsilon", "P_minus", "norm"], rows, summary), cfg.out)
    if args.plot:
        from .plotting import plot_trajectory
        plot_trajectory(traj, t_r, args.plot)
    return 0


def cmd_sweep(args) -> int:
    cfg = RunConfig.from_args(args)
    res = sweep_response(cfg.seq, cfg.mode, cfg.qubit, cfg.thetas, dt_max=cfg.dt_max, basis=args.basis)
    header = ["theta", "P_ideal", "P_sim", "abs_err"]
    cols = [res.theta, res.p_ideal, res.p_sim, res.abs_err]
    durations = {}
    if args.both:
        for mode in ("direct", "double"):
            durations[mode] = np.array([_duration_or_nan(cfg.seq, t, cfg.qubit, mode) for t in res.theta])
            header.append(f"duration_{mode}_Tr")
            cols.append(durations[mode])
    else:
        header.append("duration_Tr")
        cols.append(res.duration_tr)
        durations[cfg.mode] = res.duration_tr
    header.append("reason")
    cols.append(res.reason)
    summary = [f"mode={cfg.mode} phases={args.phases} amplitude={args.amplitude:.12g} points={len(res.theta)}",
               f"max_abs_err={res.max_abs_err:.12g}"]
    if cfg.mode != "ideal":
        drift = res.norm_drift[np.isfinite(res.norm_drift)]
        summary.append(f"max_norm_drift={drift.max() if drift.size else math.nan:.12g}")
        summary.append(f"failed_points={sum(1 for r in res.reason if r)}")
    _emit(io.format_csv(header, zip(*cols), summary), cfg.out)
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(res.theta, res.p_ideal, res.p_sim, durations, args.plot)
    if cfg.mode != "ideal" and all(r == "NumericError" for r in res.reason):
        return EXIT_NUMERIC
    return 0


def _duration_or_nan(seq, theta, q, mode):
    try:
        return schedule_duration(compile_schedule(seq, theta, q, mode))
    except DivergentScheduleError:
        return math.nan


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qspaim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_default=None, theta_range=(0.0, 2 * math.pi)):
        p.add_argument("--phases", default="bb1", help="bb1, chebyshev:<d> or comma list (rad)")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        p.add_argument("--plot", default=None, help="also render a PNG figure to this path")
        if grid_default is not None:
            p.add_argument("--grid", type=int, default=grid_default)
            p.add_argument("--theta-min", type=float, default=theta_range[0])
            p.add_argument("--theta-max", type=float, default=theta_range[1])

    def qubit(p):
        p.add_argument("--amplitude", type=float, default=3.0, help="drive amplitude A in units of delta")
        p.add_argument("--delta", type=float, default=1.0)
        p.add_argument("--tune-amplitude", action="store_true",
                       help="double mode: move A to the exact X-gate point")

    p = sub.add_parser("curve", help="ideal QSP response |M(a)|^2 on a theta grid")
    common(p, grid_default=201)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("compile", help="compile one theta into a schedule JSON")
    common(p)
    qubit(p)
    p.add_argument("--mode", choices=("direct", "double"), required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--emit-trace", default=None, help="write eps(t) samples to this CSV")
    p.add_argument("--trace-samples", type=int, default=2001)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="propagate a schedule and write the trajectory")
    common(p)
    qubit(p)
    p.add_argument("--schedule", default=None, help="schedule JSON from 'compile'")
    p.add_argument("--mode", choices=("direct", "double"), default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--dt-max", type=float, default=None)
    p.add_argument("--basis", choices=("adiabatic", "diabatic"), default="adiabatic")
    p.add_argument("--stride", type=int, default=10, help="write every n-th step")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="simulated vs ideal response over a theta grid")
    common(p, grid_default=101, theta_range=(0.4, 2.7))
    qubit(p)
    p.add_argument("--mode", choices=("direct", "double", "ideal"), default="double")
    p.add_argument("--both", action="store_true", help="emit direct and double durations")
    p.add_argument("--dt-max", type=float, default=None)
    p.add_argument("--basis", choices=("adiabatic", "diabatic"), default="adiabatic")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DomainError as exc:
        parser.error(str(exc))
    except DivergentScheduleError as exc:
        print(f"qspaim: divergent schedule ({exc.limit}): {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except NumericError as exc:
        print(f"qspaim: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
