"""Series-branch circuit engine with fixed-step integration.

Sites are wired into branches across a constant supply voltage.  Within a
branch the sites are in series: they share one current, and the supply
voltage divides across them in proportion to their resistances.  Branches
are independent (each spans the full supply), so the total influx is the
sum of branch currents.

Integration is explicit Euler on accumulated charge with the branch
currents held constant over each step.  Because the current is constant
within a step, the instant a site's resistance reaches its ceiling can be
interpolated exactly from the charge deficit; these depletion events are
reported with interpolated times.  Topology changes requested by a
schedule take effect at the step boundary following the triggering event.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import NamedTuple, Protocol, Sequence

import numpy as np

from .devices import MemristorParams, MemristorState, depletion_charge, memristance


@dataclass(frozen=True)
class Topology:
    """Wiring of site indices into branches across the supply.

    Each branch is an ordered tuple of site indices in series.  A site may
    appear in at most one branch; a branch is never empty and there is
    always at least one branch.  Depleted sites wired alone form residual
    branches that draw the small current supply_v / r_off.
    """

    branches: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.branches:
            raise ValueError("topology must contain at least one branch")
        seen: set[int] = set()
        for branch in self.branches:
            if not branch:
                raise ValueError("topology must not contain an empty branch")
            for idx in branch:
                if idx in seen:
                    raise ValueError(f"site {idx} appears in more than one branch")
                seen.add(idx)

    def wired_sites(self) -> frozenset[int]:
        return frozenset(i for branch in self.branches for i in branch)


class DepletionEvent(NamedTuple):
    """A site reaching its resistance ceiling, with interpolated time."""

    site: int
    time: float


class TraceRecord(NamedTuple):
    """Snapshot of the circuit at one step boundary."""

    step: int
    time: float
    q: tuple[float, ...]
    m: tuple[float, ...]
    v: tuple[float, ...]
    branch_currents: tuple[float, ...]
    influx: float


@dataclass(frozen=True)
class SimulationState:
    """Full circuit state at a step boundary."""

    sites: tuple[MemristorState, ...]
    supply_v: float
    topology: Topology
    time: float = 0.0
    step: int = 0

    def __post_init__(self) -> None:
        if not self.supply_v > 0:
            raise ValueError(f"supply_v must be positive, got {self.supply_v}")


class Schedule(Protocol):
    """Map from the current depletion state to a topology."""

    def topology(self, clamped: Sequence[bool]) -> Topology: ...


def branch_current(
    branch: Sequence[int], sites: Sequence[MemristorState], supply_v: float
) -> float:
    """Current through one series branch: supply_v / sum of resistances.

    Resistances are bounded below by r_on > 0, so the current is finite.
    """
    if not branch:
        raise ValueError("branch must not be empty")
    total = 0.0
    for i in branch:
        total += memristance(sites[i])
    return supply_v / total


def voltages_across(
    branch: Sequence[int], sites: Sequence[MemristorState], supply_v: float
) -> list[float]:
    """Per-site voltage drops along one branch; they sum to supply_v."""
    current = branch_current(branch, sites, supply_v)
    return [current * memristance(sites[i]) for i in branch]


def allocation_share(
    site: int,
    topology: Topology,
    sites: Sequence[MemristorState],
    supply_v: float,
) -> float:
    """Fraction of total dissipated power attributed to one site.

    Share_i = I_b^2 * M_i / sum_j I_bj^2 * M_j over all wired sites.  In a
    single-branch topology this reduces to the site's voltage share
    V_i / supply_v.  Shares over all wired sites sum to 1.
    """
    power_site = None
    power_total = 0.0
    for branch in topology.branches:
        current = branch_current(branch, sites, supply_v)
        for i in branch:
            p = current * current * memristance(sites[i])
            power_total += p
            if i == site:
                power_site = p
    if power_site is None:
        raise ValueError(f"site {site} is not wired in the topology")
    if power_total == 0.0:
        raise ValueError("no power dissipated; allocation share undefined")
    return power_site / power_total


def snapshot(state: SimulationState) -> TraceRecord:
    """Instantaneous trace record for a state under its own topology."""
    n = len(state.sites)
    m = tuple(memristance(s) for s in state.sites)
    v = [0.0] * n
    currents = []
    influx = 0.0
    for branch in state.topology.branches:
        total = 0.0
        for i in branch:
            total += m[i]
        current = state.supply_v / total
        currents.append(current)
        influx += current
        for i in branch:
            v[i] = current * m[i]
    return TraceRecord(
        step=state.step,
        time=state.time,
        q=tuple(s.q for s in state.sites),
        m=m,
        v=tuple(v),
        branch_currents=tuple(currents),
        influx=influx,
    )


def step(
    state: SimulationState, dt: float
) -> tuple[SimulationState, TraceRecord, list[DepletionEvent]]:
    """Advance the circuit by one step of duration ``dt``.

    Branch currents are computed from the resistances at the start of the
    step and held constant; every wired site then receives q += I*dt.
    Sites crossing their depletion charge during the step produce events
    with exact within-step crossing times.  The topology is unchanged;
    callers running a schedule swap topologies between steps.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    sites = list(state.sites)
    events: list[DepletionEvent] = []
    for branch in state.topology.branches:
        current = branch_current(branch, sites, state.supply_v)
        dq = current * dt
        for i in branch:
            old = state.sites[i]
            new = MemristorState(params=old.params, q=old.q + dq, label=old.label)
            if new.clamped and not old.clamped:
                q_star = depletion_charge(old.params)
                events.append(
                    DepletionEvent(site=i, time=state.time + (q_star - old.q) / current)
                )
            sites[i] = new
    events.sort(key=lambda e: (e.time, e.site))
    new_state = SimulationState(
        sites=tuple(sites),
        supply_v=state.supply_v,
        topology=state.topology,
        time=state.time + dt,
        step=state.step + 1,
    )
    return new_state, snapshot(new_state), events


class SimulationTrace:
    """Immutable per-step history of one run.

    Columns are aligned with ``steps`` (record k is the state at time
    steps[k] * dt).  ``cum_charge[k]`` is the inclusive prefix sum
    ``sum_{j <= k} influx_j * dt`` of delivered charge.  ``events`` holds
    every depletion with its interpolated time, in chronological order,
    regardless of record thinning.  ``segments`` lists (start_step,
    topology) pairs: the topology in effect from that step boundary on.

    Per-site resistances ``m`` and voltages ``v`` are exact functions of
    the stored charges and branch currents; they are materialized lazily.
    """

    def __init__(
        self,
        *,
        site_labels: tuple[str, ...],
        site_r_on: tuple[float, ...],
        r_off: float,
        beta: float,
        supply_v: float,
        dt: float,
        record_every: int,
        steps: np.ndarray,
        times: np.ndarray,
        q: np.ndarray,
        influx: np.ndarray,
        cum_charge: np.ndarray,
        branch_currents_flat: np.ndarray,
        events: list[DepletionEvent],
        segments: list[tuple[int, Topology]],
        completed: bool,
        site_roff: tuple[float, ...] | None = None,
        site_beta: tuple[float, ...] | None = None,
    ) -> None:
        self.site_labels = site_labels
        self.site_r_on = site_r_on
        self.r_off = r_off
        self.beta = beta
        self.supply_v = supply_v
        self.dt = dt
        self.record_every = record_every
        self.steps = steps
        self.times = times
        self.q = q
        self.influx = influx
        self.cum_charge = cum_charge
        self._bc_flat = branch_currents_flat
        self.events = events
        self.segments = segments
        self.completed = completed
        self._site_roff = site_roff or (r_off,) * len(site_labels)
        self._site_beta = site_beta or (beta,) * len(site_labels)
        self._m: np.ndarray | None = None
        self._v: np.ndarray | None = None
        self._bc: list[tuple[float, ...]] | None = None
        for arr in (steps, times, q, influx, cum_charge, branch_currents_flat):
            arr.setflags(write=False)

    @property
    def n_sites(self) -> int:
        return len(self.site_labels)

    @property
    def n_records(self) -> int:
        return len(self.steps)

    def _segment_record_ranges(self) -> list[tuple[int, int, Topology]]:
        """(first_record, last_record_exclusive, topology) per segment."""
        bounds = [start for start, _ in self.segments[1:]]
        ranges = []
        lo = 0
        for k, (_, topo) in enumerate(self.segments):
            hi_step = bounds[k] if k < len(bounds) else None
            hi = (
                int(np.searchsorted(self.steps, hi_step))
                if hi_step is not None
                else self.n_records
            )
            ranges.append((lo, hi, topo))
            lo = hi
        return ranges

    @property
    def m(self) -> np.ndarray:
        """Per-site resistance at each record, [r_on, r_off]-bounded."""
        if self._m is None:
            ron = np.asarray(self.site_r_on)
            coef = ron * np.asarray(self._site_beta) * np.asarray(self._site_roff)
            m = np.minimum(ron + coef * self.q, np.asarray(self._site_roff))
            m.setflags(write=False)
            self._m = m
        return self._m

    @property
    def branch_currents(self) -> list[tuple[float, ...]]:
        """Branch currents at each record, ordered as the topology's branches."""
        if self._bc is None:
            out: list[tuple[float, ...]] = []
            pos = 0
            for lo, hi, topo in self._segment_record_ranges():
                nb = len(topo.branches)
                for _ in range(lo, hi):
                    out.append(tuple(self._bc_flat[pos : pos + nb]))
                    pos += nb
            self._bc = out
        return self._bc

    @property
    def v(self) -> np.ndarray:
        """Per-site voltage drop at each record; unwired sites read 0."""
        if self._v is None:
            v = np.zeros_like(self.q)
            m = self.m
            pos = 0
            for lo, hi, topo in self._segment_record_ranges():
                nb = len(topo.branches)
                rows = hi - lo
                if rows <= 0:
                    continue
                block = self._bc_flat[pos : pos + rows * nb].reshape(rows, nb)
                pos += rows * nb
                for b, branch in enumerate(topo.branches):
                    idx = list(branch)
                    v[lo:hi, idx] = block[:, b : b + 1] * m[lo:hi, idx]
            v.setflags(write=False)
            self._v = v
        return self._v

    @property
    def depletion_step(self) -> int | None:
        """Step index at which the last site clamped, for completed runs."""
        if not self.completed:
            return None
        return int(self.steps[-1])

    @property
    def depletion_time(self) -> float | None:
        """Interpolated time of the final depletion event."""
        if not self.completed or not self.events:
            return None
        return max(e.time for e in self.events)

    def site_depletion_times(self) -> dict[str, float]:
        """Interpolated depletion time per site label, for clamped sites."""
        return {self.site_labels[e.site]: e.time for e in self.events}

    def topology_at(self, record: int) -> Topology:
        """Topology in effect at a given record index."""
        step_no = int(self.steps[record])
        current = self.segments[0][1]
        for start, topo in self.segments:
            if start <= step_no:
                current = topo
            else:
                break
        return current


def run(
    state: SimulationState,
    schedule: Schedule,
    dt: float,
    max_steps: int,
    record_every: int = 1,
) -> SimulationTrace:
    """Advance under a schedule until every site is depleted.

    The given state is taken as the run's origin (time restarts at 0).
    The schedule is consulted at t=0 and after every step that produced
    depletion events; a changed topology takes effect at that step
    boundary.  Returns the full trace; if ``max_steps`` runs out first the
    trace is returned with ``completed=False``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if record_every < 1:
        raise ValueError(f"record_every must be >= 1, got {record_every}")

    n = len(state.sites)
    supply = state.supply_v
    params = [s.params for s in state.sites]
    labels = tuple(s.label for s in state.sites)
    ron = [p.r_on for p in params]
    roff = [p.r_off for p in params]
    coef = [p.r_on * p.beta * p.r_off for p in params]
    q_star = [depletion_charge(p) for p in params]

    q = [s.q for s in state.sites]
    m = [memristance(s) for s in state.sites]
    clamped = [s.clamped for s in state.sites]
    nclamped = sum(clamped)

    events: list[DepletionEvent] = [
        DepletionEvent(site=i, time=0.0) for i in range(n) if clamped[i]
    ]
    topo = schedule.topology(tuple(clamped))
    branches = [tuple(b) for b in topo.branches]
    segments: list[tuple[int, Topology]] = [(0, topo)]

    steps_buf = array("q")
    influx_buf = array("d")
    cum_buf = array("d")
    q_buf = array("d")
    bc_buf = array("d")
    steps_append = steps_buf.append
    influx_append = influx_buf.append
    cum_append = cum_buf.append
    q_extend = q_buf.extend
    bc_extend = bc_buf.extend

    nb = len(branches)
    sums = [0.0] * nb
    currents = [0.0] * nb
    for b, branch in enumerate(branches):
        total = 0.0
        for i in branch:
            total += m[i]
        sums[b] = total

    influx = 0.0
    for b in range(nb):
        current = supply / sums[b]
        currents[b] = current
        influx += current
    cum = influx * dt
    steps_append(0)
    influx_append(influx)
    cum_append(cum)
    q_extend(q)
    bc_extend(currents)

    step_no = 0
    last_recorded = 0
    while nclamped < n and step_no < max_steps:
        t_prev = step_no * dt
        step_no += 1
        new_events = None
        for b in range(nb):
            branch = branches[b]
            current = currents[b]
            dq = current * dt
            total = 0.0
            for i in branch:
                if clamped[i]:
                    q[i] += dq
                    total += roff[i]
                    continue
                q_old = q[i]
                qi = q_old + dq
                q[i] = qi
                if qi >= q_star[i]:
                    clamped[i] = True
                    nclamped += 1
                    if new_events is None:
                        new_events = []
                    new_events.append(
                        DepletionEvent(site=i, time=t_prev + (q_star[i] - q_old) / current)
                    )
                    m[i] = roff[i]
                    total += roff[i]
                    continue
                mi = ron[i] + coef[i] * qi
                if mi >= roff[i]:
                    mi = roff[i]
                m[i] = mi
                total += mi
            sums[b] = total
        if new_events is not None:
            new_events.sort(key=lambda e: (e.time, e.site))
            events.extend(new_events)
            new_topo = schedule.topology(tuple(clamped))
            if new_topo.branches != tuple(branches):
                branches = [tuple(b) for b in new_topo.branches]
                nb = len(branches)
                sums = [0.0] * nb
                currents = [0.0] * nb
                for b, branch in enumerate(branches):
                    total = 0.0
                    for i in branch:
                        total += m[i]
                    sums[b] = total
                segments.append((step_no, new_topo))
        influx = 0.0
        for b in range(nb):
            current = supply / sums[b]
            currents[b] = current
            influx += current
        cum += influx * dt
        if step_no % record_every == 0 or nclamped == n:
            steps_append(step_no)
            influx_append(influx)
            cum_append(cum)
            q_extend(q)
            bc_extend(currents)
            last_recorded = step_no
    if last_recorded != step_no:
        steps_append(step_no)
        influx_append(influx)
        cum_append(cum)
        q_extend(q)
        bc_extend(currents)

    steps_arr = np.frombuffer(steps_buf, dtype=np.int64).copy()
    return SimulationTrace(
        site_labels=labels,
        site_r_on=tuple(ron),
        r_off=params[0].r_off,
        beta=params[0].beta,
        supply_v=supply,
        dt=dt,
        record_every=record_every,
        steps=steps_arr,
        times=steps_arr * dt,
        q=np.frombuffer(q_buf, dtype=np.float64).reshape(-1, n).copy(),
        influx=np.frombuffer(influx_buf, dtype=np.float64).copy(),
        cum_charge=np.frombuffer(cum_buf, dtype=np.float64).copy(),
        branch_currents_flat=np.frombuffer(bc_buf, dtype=np.float64).copy(),
        events=events,
        segments=segments,
        completed=nclamped == n,
        site_roff=tuple(roff),
        site_beta=tuple(p.beta for p in params),
    )


def initial_state(env, schedule: Schedule) -> SimulationState:
    """Build the t=0 circuit state for an environment under a schedule."""
    sites = tuple(
        MemristorState(
            params=MemristorParams(r_on=m0, r_off=env.r_off, beta=env.beta),
            q=0.0,
            label=label,
        )
        for label, m0 in env.sites
    )
    topo = schedule.topology(tuple(s.clamped for s in sites))
    return SimulationState(sites=sites, supply_v=env.supply_v, topology=topo)


def simulate(
    env,
    schedule: Schedule,
    dt: float | None = None,
    max_steps: int | None = None,
    record_every: int = 1,
) -> SimulationTrace:
    """Run one environment to depletion under a schedule.

    ``dt`` and ``max_steps`` default to the environment's settings.
    """
    state = initial_state(env, schedule)
    return run(
        state,
        schedule,
        dt=env.dt if dt is None else dt,
        max_steps=env.max_steps if max_steps is None else max_steps,
        record_every=record_every,
    )
