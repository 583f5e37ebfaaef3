"""Resource-influx measures over traces and cross-strategy comparison.

The headline quantity is the normalized cumulative delivered charge: the
inclusive prefix sum of influx*dt divided by its value at the depletion
step, so every completed run ends exactly at 1.  Milestones invert that
curve: the earliest interpolated time at which a given fraction of the
total has arrived.

``compare`` runs the strategies on one environment and, for the built-in
environments, also evaluates a fixed list of expected qualitative
orderings, marking each AGREE or DISAGREE with the implemented times
shown.  One known divergence is deliberately surfaced rather than hidden:
in the rich environment the sequential strategy is expected to fully
deplete later than all-sites, but under both implemented sequential
wirings it finishes sooner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import SimulationTrace, simulate
from .strategies import (
    ALL_SITES,
    LEAFCUTTER,
    PARALLEL_RESIDUAL,
    SEQ_MODES,
    SEQUENTIAL,
    STRATEGIES,
    make_schedule,
)

MILESTONE_FRACTIONS = (0.25, 0.5, 0.75, 0.9)


def _record_index(trace: SimulationTrace, step: int) -> int:
    idx = int(np.searchsorted(trace.steps, step))
    if idx >= trace.n_records or trace.steps[idx] != step:
        raise ValueError(f"step {step} is not recorded in this trace")
    return idx


def influx(trace: SimulationTrace, step: int) -> float:
    """Total current into the nest at a recorded step: sum of branch currents."""
    return float(trace.influx[_record_index(trace, step)])


def _require_completed(trace: SimulationTrace) -> None:
    if not trace.completed:
        raise ValueError(
            "run did not reach full depletion; fractions are undefined; "
            "use trace.cum_charge for raw delivered charge"
        )


def cumulative_fraction(trace: SimulationTrace, step: int) -> float:
    """Fraction of the total delivered charge accumulated through a step.

    Nondecreasing in the step and exactly 1 at the depletion step.
    """
    _require_completed(trace)
    idx = _record_index(trace, step)
    return float(trace.cum_charge[idx] / trace.cum_charge[-1])


def _fraction_polyline(trace: SimulationTrace) -> tuple[np.ndarray, np.ndarray]:
    """Interpolation nodes (times, fractions) for milestone queries.

    The final node is anchored at the interpolated depletion event, where
    the fraction reaches 1: the trailing sliver of the last step beyond
    that instant carries only residual draw.
    """
    fracs = trace.cum_charge / trace.cum_charge[-1]
    times = trace.times.astype(float).copy()
    times[-1] = trace.depletion_time
    return times, fracs


def time_to_fraction(trace: SimulationTrace, frac: float) -> float:
    """Earliest interpolated time at which the cumulative fraction reaches frac."""
    if not 0 < frac <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {frac}")
    _require_completed(trace)
    times, fracs = _fraction_polyline(trace)
    if frac == 1.0:
        return float(times[-1])
    idx = int(np.searchsorted(fracs, frac, side="left"))
    if idx == 0:
        return float(times[0])
    t0, t1 = times[idx - 1], times[idx]
    f0, f1 = fracs[idx - 1], fracs[idx]
    return float(t0 + (frac - f0) * (t1 - t0) / (f1 - f0))


def fraction_at(trace: SimulationTrace, time: float) -> float:
    """Cumulative fraction at an arbitrary time, linearly interpolated.

    Useful for reporting early-surge behaviour at a chosen time window.
    """
    _require_completed(trace)
    times, fracs = _fraction_polyline(trace)
    return float(np.interp(time, times, fracs))


@dataclass(frozen=True)
class StrategySummary:
    """Depletion times and milestones of one run, for comparison tables."""

    strategy: str
    mode: str | None
    env_name: str | None
    dt: float
    completed: bool
    n_steps: int
    depletion_time: float | None
    site_depletion_times: dict[str, float]
    milestones: dict[float, float]
    total_delivered: float

    @property
    def key(self) -> str:
        return self.strategy if self.mode is None else f"{self.strategy}[{self.mode}]"

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "mode": self.mode,
            "environment": self.env_name,
            "dt": self.dt,
            "completed": self.completed,
            "n_steps": self.n_steps,
            "depletion_time": self.depletion_time,
            "site_depletion_times": self.site_depletion_times,
            "time_to_fraction": {str(f): t for f, t in self.milestones.items()},
            "total_delivered_charge": self.total_delivered,
        }


def summarize(
    trace: SimulationTrace,
    strategy: str,
    mode: str | None = None,
    env_name: str | None = None,
    milestones: Sequence[float] = MILESTONE_FRACTIONS,
) -> StrategySummary:
    """Condense a trace into the cross-strategy comparison quantities."""
    stones: dict[float, float] = {}
    if trace.completed:
        for f in milestones:
            stones[f] = time_to_fraction(trace, f)
        stones[1.0] = trace.depletion_time
    return StrategySummary(
        strategy=strategy,
        mode=mode,
        env_name=env_name,
        dt=trace.dt,
        completed=trace.completed,
        n_steps=int(trace.steps[-1]),
        depletion_time=trace.depletion_time,
        site_depletion_times=trace.site_depletion_times(),
        milestones=stones,
        total_delivered=float(trace.cum_charge[-1]),
    )


@dataclass(frozen=True)
class Relation:
    """One expected qualitative ordering checked against this implementation."""

    claim: str
    context: str
    expected: str
    implemented: str
    verdict: str

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "context": self.context,
            "expected": self.expected,
            "implemented": self.implemented,
            "verdict": self.verdict,
        }

    def format_line(self) -> str:
        return f"{self.claim}: {self.verdict} ({self.implemented})"


def _ordering_relation(
    claim: str,
    context: str,
    quantity: str,
    earlier: StrategySummary | None,
    later: StrategySummary | None,
    value,
) -> Relation | None:
    """AGREE when value(earlier) < value(later), with the times shown."""
    if earlier is None or later is None:
        return None
    expected = f"{quantity}({earlier.key}) < {quantity}({later.key})"
    a, b = value(earlier), value(later)
    if a is None or b is None:
        return Relation(claim, context, expected, "incomplete run", "UNDETERMINED")
    sign = "<" if a < b else ">="
    implemented = f"{quantity}({earlier.key})={a:.4f} {sign} {quantity}({later.key})={b:.4f}"
    verdict = "AGREE" if a < b else "DISAGREE"
    return Relation(claim, context, expected, implemented, verdict)


def _relations_for(env_name: str | None, by_key: dict[str, StrategySummary]) -> list[Relation]:
    def total(s: StrategySummary):
        return s.depletion_time

    def half(s: StrategySummary):
        return s.milestones.get(0.5)

    rels: list[Relation] = []
    all_sites = by_key.get(ALL_SITES)
    leafcutter = by_key.get(LEAFCUTTER)
    sequentials = [s for k, s in by_key.items() if s.strategy == SEQUENTIAL]

    if env_name == "rich":
        rels.append(
            _ordering_relation(
                "leafcutter reaches 50% of total before all-sites",
                env_name, "t50", leafcutter, all_sites, half,
            )
        )
        rels.append(
            _ordering_relation(
                "all-sites fully depletes before leafcutter",
                env_name, "D", all_sites, leafcutter, total,
            )
        )
        for seq in sequentials:
            rels.append(
                _ordering_relation(
                    f"sequential[{seq.mode}] slower than all-sites to full depletion",
                    env_name, "D", all_sites, seq, total,
                )
            )
    elif env_name == "poor":
        rels.append(
            _ordering_relation(
                "leafcutter fully depletes before all-sites",
                env_name, "D", leafcutter, all_sites, total,
            )
        )
        for seq in sequentials:
            rels.append(
                _ordering_relation(
                    f"leafcutter fully depletes before sequential[{seq.mode}]",
                    env_name, "D", leafcutter, seq, total,
                )
            )
            rels.append(
                _ordering_relation(
                    f"sequential[{seq.mode}] fully depletes before all-sites",
                    env_name, "D", seq, all_sites, total,
                )
            )
    return [r for r in rels if r is not None]


@dataclass(frozen=True)
class ComparisonReport:
    """Summaries for each strategy plus the expected-ordering verdicts."""

    env_name: str | None
    dt: float
    summaries: tuple[StrategySummary, ...]
    relations: tuple[Relation, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "environment": self.env_name,
            "dt": self.dt,
            "summaries": [s.to_dict() for s in self.summaries],
            "relations": [r.to_dict() for r in self.relations],
        }


def compare(
    env,
    strategies: Sequence[str] = STRATEGIES,
    dt: float | None = None,
    seq_modes: Sequence[str] = SEQ_MODES,
    max_steps: int | None = None,
    record_every: int = 1,
) -> ComparisonReport:
    """Run the strategies on one environment and assemble the report.

    Sequential runs once per wiring mode in ``seq_modes``.  Identical
    inputs produce identical summaries and relation verdicts.
    """
    cases: list[tuple[str, str | None]] = []
    for strategy in strategies:
        if strategy == SEQUENTIAL:
            cases += [(strategy, mode) for mode in seq_modes]
        elif strategy in (ALL_SITES, LEAFCUTTER):
            cases.append((strategy, None))
        else:
            raise ValueError(f"unknown strategy {strategy!r}")

    summaries = []
    for strategy, mode in cases:
        schedule = make_schedule(strategy, env, seq_mode=mode or PARALLEL_RESIDUAL)
        trace = simulate(env, schedule, dt=dt, max_steps=max_steps, record_every=record_every)
        summaries.append(summarize(trace, strategy, mode=mode, env_name=env.name))

    by_key = {s.key: s for s in summaries}
    relations = _relations_for(env.name, by_key)
    return ComparisonReport(
        env_name=env.name,
        dt=dt if dt is not None else env.dt,
        summaries=tuple(summaries),
        relations=tuple(relations),
    )
