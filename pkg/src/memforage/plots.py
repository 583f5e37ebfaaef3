"""Static SVG charts of simulation traces.

Two chart kinds mirror the two quantities worth looking at: the per-site
voltage drops over time (how the gatherer share migrates between sites as
they deplete), and the normalized cumulative delivered charge per
strategy (how quickly each approach banks the environment's total).

Curves are decimated to a bounded number of points before drawing; a
full-resolution run can hold hundreds of thousands of steps and the shape
is what matters in a chart.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .engine import SimulationTrace

MAX_POINTS = 2000

_SVG_OPTS = {"format": "svg", "metadata": {"Date": None}}
matplotlib.rcParams["svg.hashsalt"] = "memforage"


def _decimate(n: int) -> np.ndarray:
    if n <= MAX_POINTS:
        return np.arange(n)
    idx = np.linspace(0, n - 1, MAX_POINTS).round().astype(int)
    return np.unique(idx)


def voltage_chart(trace: SimulationTrace, path: str | Path, title: str = "") -> None:
    """Per-site voltage drop vs time; one curve per site.

    At full depletion every site sits at the resistance ceiling, so the
    curves converge to supply_v / n_sites.
    """
    idx = _decimate(trace.n_records)
    fig, ax = plt.subplots(figsize=(8, 4.8))
    for i, label in enumerate(trace.site_labels):
        ax.plot(trace.times[idx], trace.v[idx, i], label=label, linewidth=1.2)
    ax.set_xlabel("time (reduced units)")
    ax.set_ylabel("voltage drop (reduced units)")
    ax.set_title(title or "Voltage share across sites")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SVG_OPTS)
    plt.close(fig)


def cumulative_chart(
    traces: Sequence[tuple[str, SimulationTrace]],
    path: str | Path,
    title: str = "",
) -> None:
    """Normalized cumulative delivered charge vs time, one curve per run.

    Every completed run ends at fraction 1 by construction; incomplete
    runs are rejected since their normalization is undefined.
    """
    if not traces:
        raise ValueError("need at least one trace to plot")
    fig, ax = plt.subplots(figsize=(8, 4.8))
    for label, trace in traces:
        if not trace.completed:
            plt.close(fig)
            raise ValueError(f"run {label!r} did not complete; cannot normalize")
        idx = _decimate(trace.n_records)
        fracs = trace.cum_charge / trace.cum_charge[-1]
        ax.plot(trace.times[idx], fracs[idx], label=label, linewidth=1.4)
    ax.set_xlabel("time (reduced units)")
    ax.set_ylabel("fraction of total gathered")
    ax.set_ylim(0, 1.05)
    ax.set_title(title or "Cumulative gathered resource by strategy")
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SVG_OPTS)
    plt.close(fig)
