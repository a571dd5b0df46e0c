"""Compile quantum signal processing sequences into LZSM drive schedules."""

from .aim import (
    AimCharacterization,
    DriveSegment,
    PulseSchedule,
    QubitParams,
    adiabatic_phase,
    aim_playback,
    characterize,
    single_lzsm_unitary,
    stokes_phase,
    transition_matrix,
)
from .direct import DirectCompileRequest, PhaseSolution, build_direct_schedule, compile_direct, omega_for_theta, solve_phase_durations
from .double import DoubleBlockParams, build_double_schedule, compile_double, rx_block, xgate_working_point, xi_matrix
from .dynamics import SweepResult, Trajectory, propagate, schedule_duration, sweep_response
from .errors import DivergentScheduleError, DomainError, NumericError
from .qsp import (
    PhaseSequence,
    PolynomialReport,
    bb1_polynomial,
    chebyshev_value,
    extract_polynomial,
    phase_aligned_distance,
    qsp_operator,
    qsp_unitary,
    reference_sequence,
    rotation_gate,
)

__version__ = "0.1.0"
