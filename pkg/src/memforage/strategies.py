"""The three gathering strategies as event-driven topology schedules.

A schedule is a pure map from the current depletion state (which sites
have clamped) to a wiring of the sites across the supply:

* all-sites: every site in one series branch, for the whole run.
* sequential: one undepleted site at a time, richest first (lowest initial
  resistance).  Depleted sites keep drawing current; how they are wired is
  ambiguous for a one-at-a-time scheme, so both readings are available:
  ``parallel-residual`` (default) wires each depleted site alone across
  the supply, ``shared-series`` keeps them in series with the active site.
* leafcutter: the richest site runs alone first; once it depletes it
  becomes a residual branch and the remaining sites run as all-sites.

Richness ordering is ascending initial resistance, ties broken by site
index.
"""

from __future__ import annotations

from typing import Sequence

from .engine import Topology

ALL_SITES = "all-sites"
SEQUENTIAL = "sequential"
LEAFCUTTER = "leafcutter"
STRATEGIES = (ALL_SITES, SEQUENTIAL, LEAFCUTTER)

PARALLEL_RESIDUAL = "parallel-residual"
SHARED_SERIES = "shared-series"
SEQ_MODES = (PARALLEL_RESIDUAL, SHARED_SERIES)


def _richness_order(m0s: Sequence[float]) -> tuple[int, ...]:
    """Site indices sorted by ascending initial resistance, then index."""
    return tuple(sorted(range(len(m0s)), key=lambda i: (m0s[i], i)))


class AllSitesSchedule:
    """Constant topology: one series branch holding every site."""

    kind = ALL_SITES
    mode = None

    def __init__(self, n_sites: int) -> None:
        if n_sites < 1:
            raise ValueError("environment must contain at least one site")
        self._topology = Topology(branches=(tuple(range(n_sites)),))

    def topology(self, clamped: Sequence[bool]) -> Topology:
        return self._topology


class SequentialSchedule:
    """One site at a time in richness order, depleted sites left drawing."""

    kind = SEQUENTIAL

    def __init__(self, m0s: Sequence[float], mode: str = PARALLEL_RESIDUAL) -> None:
        if not m0s:
            raise ValueError("environment must contain at least one site")
        if mode not in SEQ_MODES:
            raise ValueError(f"unknown sequential mode {mode!r}; expected one of {SEQ_MODES}")
        self.mode = mode
        self._order = _richness_order(m0s)

    def topology(self, clamped: Sequence[bool]) -> Topology:
        active = next((i for i in self._order if not clamped[i]), None)
        if self.mode == PARALLEL_RESIDUAL:
            branches = [(i,) for i in self._order if clamped[i]]
            if active is not None:
                branches.append((active,))
            return Topology(branches=tuple(branches))
        chain = [i for i in self._order if clamped[i]]
        if active is not None:
            chain.append(active)
        return Topology(branches=(tuple(chain),))


class LeafcutterSchedule:
    """Best site alone first, then all-sites on the remainder.

    Phase 2 keeps subsequently depleted sites inside the series branch;
    only the original best site sits apart as a residual branch.
    """

    kind = LEAFCUTTER
    mode = None

    def __init__(self, m0s: Sequence[float]) -> None:
        if not m0s:
            raise ValueError("environment must contain at least one site")
        self._best = _richness_order(m0s)[0]
        self._rest = tuple(i for i in range(len(m0s)) if i != self._best)

    def topology(self, clamped: Sequence[bool]) -> Topology:
        if not clamped[self._best]:
            return Topology(branches=((self._best,),))
        branches: list[tuple[int, ...]] = []
        if self._rest:
            branches.append(self._rest)
        branches.append((self._best,))
        return Topology(branches=tuple(branches))


def all_sites_schedule(env) -> AllSitesSchedule:
    return AllSitesSchedule(len(env.sites))


def sequential_schedule(env, mode: str = PARALLEL_RESIDUAL) -> SequentialSchedule:
    return SequentialSchedule([m0 for _, m0 in env.sites], mode=mode)


def leafcutter_schedule(env) -> LeafcutterSchedule:
    return LeafcutterSchedule([m0 for _, m0 in env.sites])


def make_schedule(strategy: str, env, seq_mode: str = PARALLEL_RESIDUAL):
    """Build the schedule for a strategy name; mode applies to sequential."""
    if strategy == ALL_SITES:
        return all_sites_schedule(env)
    if strategy == SEQUENTIAL:
        return sequential_schedule(env, mode=seq_mode)
    if strategy == LEAFCUTTER:
        return leafcutter_schedule(env)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
