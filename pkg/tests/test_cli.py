import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qspaim import QubitParams, aim_playback, compile_direct, phase_aligned_distance, reference_sequence
from qspaim.cli import main
from qspaim.io import load_schedule, read_csv, save_schedule, schedule_from_dict


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def columns(text):
    header, rows, summary = read_csv(text)
    cols = {h: [r[i] for r in rows] for i, h in enumerate(header)}
    return cols, summary


def test_curve_chebyshev2(capsys):
    code, out, _ = run(capsys, "curve", "--phases", "chebyshev:2", "--grid", "201")
    assert code == 0
    cols, _ = columns(out)
    a = np.array(cols["a"], float)
    assert len(a) == 201
    assert np.allclose(np.array(cols["P_ideal"], float), (2 * a**2 - 1) ** 2, atol=1e-11)


def test_curve_bb1_has_closed_form(capsys):
    _, out, _ = run(capsys, "curve", "--phases", "bb1", "--grid", "101")
    cols, _ = columns(out)
    assert "M_poly" in cols and len(cols["M_poly"]) == 101


def test_curve_literal_equals_preset(capsys):
    _, a, _ = run(capsys, "curve", "--phases", "0,0")
    _, b, _ = run(capsys, "curve", "--phases", "chebyshev:1")
    assert a == b


@pytest.mark.parametrize("phases", ["", "nonsense", "0.1", "1,x"])
def test_bad_phase_spec_is_usage_error(capsys, phases):
    with pytest.raises(SystemExit) as info:
        main(["curve", "--phases", phases])
    assert info.value.code == 2


def test_compile_direct_bb1(capsys, tmp_path):
    out = tmp_path / "s.json"
    trace = tmp_path / "trace.csv"
    code, _, _ = run(capsys, "compile", "--mode", "direct", "--phases", "bb1", "--theta", "1.0",
                     "--amplitude", "3", "--out", str(out), "--emit-trace", str(trace))
    assert code == 0
    data = json.loads(out.read_text())
    assert len(data["segments"]) == 11
    assert "units" in data
    _, summary = columns(trace.read_text())
    assert any(s.startswith("crossings_Tr=") and len(s.split("=")[1].split()) == 5 for s in summary)


def test_compile_divergent_exit_code(capsys):
    code, _, err = run(capsys, "compile", "--mode", "direct", "--theta", "0.001")
    assert code == 3
    assert "P->0" in err


def test_compile_double_theta_zero(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "compile", "--mode", "double", "--theta", "0", "--out", str(out))
    assert code == 0
    sched = load_schedule(out)
    assert math.isfinite(sched.duration)


def test_amplitude_must_exceed_delta(capsys):
    with pytest.raises(SystemExit) as info:
        main(["compile", "--mode", "direct", "--theta", "1", "--amplitude", "0.5"])
    assert info.value.code == 2


def test_simulate_from_schedule(capsys, tmp_path):
    path = tmp_path / "s.json"
    run(capsys, "compile", "--mode", "direct", "--phases", "chebyshev:2", "--theta", "1.2",
        "--amplitude", "5", "--out", str(path))
    code, out, _ = run(capsys, "simulate", "--schedule", str(path), "--stride", "50")
    assert code == 0
    cols, summary = columns(out)
    assert set(cols) == {"t", "t_Tr", "epsilon", "P_minus", "norm"}
    final = float(next(s for s in summary if s.startswith("P_minus_final")).split("=")[1])
    assert final == pytest.approx((2 * math.cos(0.6) ** 2 - 1) ** 2, abs=0.05)
    drift = float(next(s for s in summary if s.startswith("norm_drift")).split("=")[1])
    assert drift < 1e-9


def test_simulate_needs_input(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate"])
    assert info.value.code == 2


def test_sweep_ideal(capsys):
    _, out, _ = run(capsys, "sweep", "--mode", "ideal", "--grid", "11")
    cols, summary = columns(out)
    assert np.array_equal(np.array(cols["P_ideal"], float), np.array(cols["P_sim"], float))
    assert "max_abs_err=0" in summary


def test_sweep_double_summary(capsys):
    _, out, _ = run(capsys, "sweep", "--mode", "double", "--phases", "chebyshev:1", "--grid", "5", "--both")
    cols, summary = columns(out)
    assert "duration_direct_Tr" in cols and "duration_double_Tr" in cols
    assert any(s.startswith("max_abs_err=") for s in summary)
    assert any(s.startswith("max_norm_drift=") for s in summary)


def test_plot_outputs(capsys, tmp_path):
    png = tmp_path / "f.png"
    run(capsys, "sweep", "--mode", "direct", "--phases", "chebyshev:1", "--grid", "4", "--plot", str(png))
    assert png.stat().st_size > 1000


def test_schedule_json_roundtrip(tmp_path):
    sched, _ = compile_direct(reference_sequence("bb1"), 1.1, QubitParams(1.0, 4.0))
    path = tmp_path / "s.json"
    save_schedule(sched, path)
    back = load_schedule(path)
    assert back.segments == sched.segments
    assert phase_aligned_distance(aim_playback(back), aim_playback(sched)) < 1e-14


def test_schedule_json_rejects_bad_kind():
    with pytest.raises(ValueError):
        schedule_from_dict({"delta": 1, "amplitude": 3, "segments": [{"kind": "ramp", "duration": 1}]})


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "qspaim.cli", "curve", "--grid", "3"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[0].startswith("theta,a,P_ideal")
