"""Closed-form reference solutions for series-branch depletion.

Within one series branch all unclamped sites carry the same current, so
they share one common charge q.  With C clamped sites (each contributing
r_off) and unclamped on-resistances summing to S, the total branch
resistance is C*r_off + S*(1 + beta*r_off*q), and separating

    dq/dt = V / (C*r_off + S*(1 + beta*r_off*q))

gives the exact traversal time

    t = [(C*r_off + S)(q_b - q_a) + (S*beta*r_off/2)(q_b^2 - q_a^2)] / V.

Depletions split a run into phases at the successive depletion charges;
chaining phases yields exact per-site depletion times for any of the
three strategies.  These values are the ground truth the fixed-step
engine is validated against; nothing here touches the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence


def series_phase_time(
    clamped_count: int,
    active_r_sum: float,
    q_start: float,
    q_end: float,
    supply_v: float,
    r_off: float,
    beta: float,
) -> float:
    """Exact time for the common charge of a series branch to advance.

    ``clamped_count`` sites sit at r_off; ``active_r_sum`` is the sum of
    on-resistances of the unclamped sites.  Raises if no active site can
    advance the charge over a nonempty interval.
    """
    if q_start < 0 or q_end < q_start:
        raise ValueError(f"need 0 <= q_start <= q_end, got [{q_start}, {q_end}]")
    if active_r_sum < 0:
        raise ValueError(f"active_r_sum must be nonnegative, got {active_r_sum}")
    if active_r_sum == 0 and q_end > q_start:
        raise ValueError("no active site: charge cannot advance with active_r_sum == 0")
    if not supply_v > 0:
        raise ValueError(f"supply_v must be positive, got {supply_v}")
    a = clamped_count * r_off + active_r_sum
    b = active_r_sum * beta * r_off
    return (a * (q_end - q_start) + 0.5 * b * (q_end**2 - q_start**2)) / supply_v


class Phase(NamedTuple):
    """One constant-composition stretch of a series branch."""

    site: int
    clamped_count: int
    active_r_sum: float
    q_start: float
    q_end: float
    duration: float


@dataclass(frozen=True)
class PhasePlan:
    """Exact depletion schedule of one static series branch.

    ``site_times`` is the cumulative depletion time per site in input
    order; sites clamp in descending order of initial resistance.
    """

    phases: tuple[Phase, ...]
    site_times: tuple[float, ...]
    total_time: float


def _depletion_charge(r_on: float, r_off: float, beta: float) -> float:
    return (r_off - r_on) / (beta * r_on * r_off)


def series_depletion_plan(
    m0s: Sequence[float],
    supply_v: float,
    r_off: float = 100.0,
    beta: float = 1.0,
) -> PhasePlan:
    """Phase plan for all sites wired in one series branch from q = 0.

    Phases split at the successive depletion charges (ascending q*, i.e.
    descending initial resistance).  Duplicate initial resistances give
    zero-length phases: those sites deplete simultaneously.
    """
    if not m0s:
        raise ValueError("need at least one site")
    q_stars = [_depletion_charge(r, r_off, beta) for r in m0s]
    order = sorted(range(len(m0s)), key=lambda i: (q_stars[i], i))
    phases: list[Phase] = []
    site_times = [0.0] * len(m0s)
    t = 0.0
    q = 0.0
    active_sum = float(sum(m0s))
    clamped = 0
    for i in order:
        duration = series_phase_time(
            clamped, active_sum, q, q_stars[i], supply_v, r_off, beta
        )
        t += duration
        phases.append(
            Phase(
                site=i,
                clamped_count=clamped,
                active_r_sum=active_sum,
                q_start=q,
                q_end=q_stars[i],
                duration=duration,
            )
        )
        site_times[i] = t
        q = q_stars[i]
        active_sum -= m0s[i]
        clamped += 1
    return PhasePlan(phases=tuple(phases), site_times=tuple(site_times), total_time=t)


class _Segment(NamedTuple):
    """Closed-form delivered charge over one stretch of a strategy run.

    Within the segment one series branch advances its common charge from
    ``q_start`` under resistance a + b*q, while fully clamped residual
    branches add charge at the constant ``residual_rate``.
    """

    t_start: float
    t_end: float
    delivered_start: float
    a: float
    b: float
    q_start: float
    residual_rate: float
    supply_v: float

    def delivered_at(self, t: float) -> float:
        tau = t - self.t_start
        if self.a == 0.0 and self.b == 0.0:
            dq = 0.0
        elif self.b == 0.0:
            dq = self.supply_v / self.a * tau
        else:
            # q(tau) solves a*(q - q0) + (b/2)*(q^2 - q0^2) = V*tau; the
            # increment form avoids cancellation for small tau.
            root = math.sqrt((self.a + self.b * self.q_start) ** 2 + 2.0 * self.b * self.supply_v * tau)
            dq = 2.0 * self.supply_v * tau / (root + self.a + self.b * self.q_start)
        return self.delivered_start + dq + self.residual_rate * tau


@dataclass(frozen=True)
class StrategyOracle:
    """Exact depletion times and delivered-charge curve for one strategy."""

    strategy: str
    mode: str | None
    total_time: float
    site_times: tuple[float, ...]
    phases: tuple[tuple[str, float], ...]
    delivered_total: float
    segments: tuple[_Segment, ...]

    def delivered_at(self, t: float) -> float:
        """Charge delivered to the nest by time t, exactly."""
        if t < 0 or t > self.total_time * (1 + 1e-12):
            raise ValueError(f"t={t} outside [0, {self.total_time}]")
        for seg in self.segments:
            if t <= seg.t_end:
                return seg.delivered_at(t)
        return self.segments[-1].delivered_at(t)

    def time_to_fraction(self, frac: float) -> float:
        """Earliest time at which the delivered fraction reaches ``frac``."""
        if not 0 < frac <= 1:
            raise ValueError(f"fraction must be in (0, 1], got {frac}")
        target = frac * self.delivered_total
        lo, hi = 0.0, self.total_time
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.delivered_at(mid) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-14 * max(1.0, self.total_time):
                break
        return hi


def _segments_from_plan(
    plan: PhasePlan,
    supply_v: float,
    r_off: float,
    beta: float,
    t_offset: float,
    delivered_offset: float,
    residual_rate: float,
) -> tuple[list[_Segment], float, float]:
    """Segments for one static series branch plus constant residual draw."""
    segments = []
    t = t_offset
    delivered = delivered_offset
    for ph in plan.phases:
        a = ph.clamped_count * r_off + ph.active_r_sum
        b = ph.active_r_sum * beta * r_off
        seg = _Segment(
            t_start=t,
            t_end=t + ph.duration,
            delivered_start=delivered,
            a=a,
            b=b,
            q_start=ph.q_start,
            residual_rate=residual_rate,
            supply_v=supply_v,
        )
        segments.append(seg)
        t += ph.duration
        delivered += (ph.q_end - ph.q_start) + residual_rate * ph.duration
    return segments, t, delivered


def strategy_oracle_time(env, strategy: str, mode: str | None = None) -> StrategyOracle:
    """Exact total depletion time and per-phase breakdown for a strategy.

    ``env`` provides sites [(label, m0)], r_off, beta and supply_v; the
    strategy names match the schedule module.  The returned object also
    carries the exact delivered-charge curve for milestone computations.
    """
    m0s = [m0 for _, m0 in env.sites]
    labels = [label for label, _ in env.sites]
    v, r_off, beta = env.supply_v, env.r_off, env.beta
    n = len(m0s)
    order = sorted(range(n), key=lambda i: (m0s[i], i))
    residual_unit = v / r_off

    if strategy == "all-sites":
        plan = series_depletion_plan(m0s, v, r_off, beta)
        segments, _, delivered = _segments_from_plan(plan, v, r_off, beta, 0.0, 0.0, 0.0)
        phases = tuple(
            (f"deplete {labels[ph.site]}", ph.duration) for ph in plan.phases
        )
        return StrategyOracle(
            strategy=strategy,
            mode=None,
            total_time=plan.total_time,
            site_times=plan.site_times,
            phases=phases,
            delivered_total=delivered,
            segments=tuple(segments),
        )

    if strategy == "sequential":
        mode = mode or "parallel-residual"
        if mode not in ("parallel-residual", "shared-series"):
            raise ValueError(f"unknown sequential mode {mode!r}")
        site_times = [0.0] * n
        segments: list[_Segment] = []
        phases = []
        t = 0.0
        delivered = 0.0
        for k, i in enumerate(order):
            q_star = _depletion_charge(m0s[i], r_off, beta)
            clamped = k if mode == "shared-series" else 0
            duration = series_phase_time(clamped, m0s[i], 0.0, q_star, v, r_off, beta)
            residual_rate = k * residual_unit if mode == "parallel-residual" else 0.0
            a = clamped * r_off + m0s[i]
            b = m0s[i] * beta * r_off
            segments.append(
                _Segment(
                    t_start=t,
                    t_end=t + duration,
                    delivered_start=delivered,
                    a=a,
                    b=b,
                    q_start=0.0,
                    residual_rate=residual_rate,
                    supply_v=v,
                )
            )
            t += duration
            delivered += q_star + residual_rate * duration
            site_times[i] = t
            phases.append((f"deplete {labels[i]} singly", duration))
        return StrategyOracle(
            strategy=strategy,
            mode=mode,
            total_time=t,
            site_times=tuple(site_times),
            phases=tuple(phases),
            delivered_total=delivered,
            segments=tuple(segments),
        )

    if strategy == "leafcutter":
        best = order[0]
        q_star_best = _depletion_charge(m0s[best], r_off, beta)
        t1 = series_phase_time(0, m0s[best], 0.0, q_star_best, v, r_off, beta)
        seg1 = _Segment(
            t_start=0.0,
            t_end=t1,
            delivered_start=0.0,
            a=m0s[best],
            b=m0s[best] * beta * r_off,
            q_start=0.0,
            residual_rate=0.0,
            supply_v=v,
        )
        site_times = [0.0] * n
        site_times[best] = t1
        phases = [(f"deplete {labels[best]} singly", t1)]
        rest = [i for i in range(n) if i != best]
        if not rest:
            return StrategyOracle(
                strategy=strategy,
                mode=None,
                total_time=t1,
                site_times=tuple(site_times),
                phases=tuple(phases),
                delivered_total=q_star_best,
                segments=(seg1,),
            )
        plan = series_depletion_plan([m0s[i] for i in rest], v, r_off, beta)
        segments, total, delivered = _segments_from_plan(
            plan, v, r_off, beta, t1, q_star_best, residual_unit
        )
        for local, i in enumerate(rest):
            site_times[i] = t1 + plan.site_times[local]
        phases.append(("all-sites on remainder", plan.total_time))
        return StrategyOracle(
            strategy=strategy,
            mode=None,
            total_time=total,
            site_times=tuple(site_times),
            phases=tuple(phases),
            delivered_total=delivered,
            segments=(seg1, *segments),
        )

    raise ValueError(f"unknown strategy {strategy!r}")
