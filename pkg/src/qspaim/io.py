"""Schedule JSON and CSV writers."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .aim import DriveSegment, PulseSchedule, QubitParams

UNITS = "hbar=1; energies (delta, amplitude, epsilon, omega) in rad per time unit; times in units of hbar/delta when delta=1"


def schedule_to_dict(schedule: PulseSchedule) -> dict:
    segs = []
    for seg in schedule.segments:
        if seg.kind == "const":
            segs.append({"kind": "const", "epsilon": seg.epsilon, "duration": seg.duration})
        else:
            segs.append({"kind": "half_cosine", "omega": seg.omega, "direction": seg.direction,
                         "duration": seg.duration})
    return {
        "units": UNITS,
        "delta": schedule.qubit.delta,
        "amplitude": schedule.qubit.amplitude,
        "segments": segs,
        "annotations": list(schedule.annotations),
    }


def schedule_from_dict(data: dict) -> PulseSchedule:
    q = QubitParams(float(data["delta"]), float(data["amplitude"]))
    segs = []
    for item in data["segments"]:
        kind = item["kind"]
        if kind == "const":
            segs.append(DriveSegment.const(item["epsilon"], item["duration"]))
        elif kind == "half_cosine":
            seg = DriveSegment.half_cosine(float(item.get("amplitude", q.amplitude)), item["omega"], item["direction"])
            if "duration" in item and item["duration"] != seg.duration:
                raise ValueError("half_cosine duration disagrees with pi/omega")
            segs.append(seg)
        else:
            raise ValueError(f"unknown segment kind {kind!r}")
    return PulseSchedule(q, tuple(segs), tuple(data.get("annotations", ())))


def save_schedule(schedule: PulseSchedule, path) -> None:
    Path(path).write_text(json.dumps(schedule_to_dict(schedule), indent=2) + "\n")


def load_schedule(path) -> PulseSchedule:
    return schedule_from_dict(json.loads(Path(path).read_text()))


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def format_csv(header: Sequence[str], rows: Iterable[Sequence], summary: Iterable[str] = ()) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    lines += [f"# {s}" for s in summary]
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> tuple[list[str], list[list[str]], list[str]]:
    """Split CSV text into header, rows and ``#`` summary lines."""
    header, rows, summary = None, [], []
    for line in text.splitlines():
        if line.startswith("#"):
            summary.append(line[1:].strip())
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    return header or [], rows, summary
