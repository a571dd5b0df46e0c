"""Figures written next to the CSV/JSON outputs.

Uses the non-interactive Agg backend; every function saves to ``path``
and closes its figure.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.4,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _figure(width=4.5, ratio=0.62):
    plt.rcParams.update(RC)
    return plt.subplots(figsize=(width, width * ratio))


def plot_curve(theta, p_ideal, path, m_poly=None, label="QSP"):
    fig, ax = _figure()
    ax.plot(theta, p_ideal, label=f"{label} $|M(a)|^2$")
    if m_poly is not None:
        ax.plot(theta, m_poly, "--", label="closed form")
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel(r"$P_-$")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False)
    fig.savefig(path)
    plt.close(fig)


def plot_schedule(schedule, path, samples=4000):
    t = np.linspace(0.0, schedule.duration, samples)
    t_r = schedule.qubit.t_r
    fig, ax = _figure(width=6.0, ratio=0.4)
    edges = schedule.boundaries
    for i, seg in enumerate(schedule.segments):
        m = (t >= edges[i]) & (t <= edges[i + 1])
        colour = "C0" if seg.kind == "half_cosine" else "C1"
        ax.plot(t[m] / t_r, schedule.epsilon(t[m]) / schedule.qubit.delta, color=colour)
    crossings = schedule.crossing_times()
    ax.plot(crossings / t_r, np.zeros_like(crossings), "x", color="C3", label="transition")
    ax.set_xlabel(r"$t / T_r$")
    ax.set_ylabel(r"$\varepsilon / \Delta$")
    ax.legend(frameon=False, loc="upper right")
    fig.savefig(path)
    plt.close(fig)


def plot_trajectory(traj, t_r, path):
    fig, ax = _figure(width=6.0, ratio=0.4)
    ax.plot(traj.times / t_r, traj.p_minus)
    ax.set_xlabel(r"$t / T_r$")
    ax.set_ylabel(r"$P_-$")
    ax.set_ylim(-0.02, 1.02)
    fig.savefig(path)
    plt.close(fig)


def plot_sweep(theta, p_ideal, p_sim, durations: dict, path):
    """Response curve on the left and schedule durations on the right."""
    plt.rcParams.update(RC)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    ax1.plot(theta, p_ideal, label="QSP")
    ax1.plot(theta, p_sim, ".", ms=3, label="simulation")
    ax1.set_xlabel(r"$\theta$ (rad)")
    ax1.set_ylabel(r"$P_-$")
    ax1.legend(frameon=False)
    for name, dur in durations.items():
        ax2.plot(theta, dur, label=name)
    ax2.set_xlabel(r"$\theta$ (rad)")
    ax2.set_ylabel(r"duration / $T_r$")
    ax2.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
