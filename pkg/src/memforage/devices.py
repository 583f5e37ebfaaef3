"""Single resource-site device model.

A resource site is a charge-controlled resistor: its resistance grows
linearly with the total charge that has flowed through it, from ``r_on``
(untouched site) up to a hard ceiling ``r_off`` (depleted site).  The
accumulated charge is the device's memory; resistance is always recomputed
from it, never stored separately, so the two can't drift apart.

All quantities are in reduced units.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class MemristorParams:
    """Device constants: resistance bounds and curvature.

    ``beta`` sets how fast resistance climbs with accumulated charge, i.e.
    how quickly a site gets harder to work as it is drawn down.
    """

    r_on: float
    r_off: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.r_on > 0:
            raise ValueError(f"r_on must be positive, got {self.r_on}")
        if not self.r_off >= self.r_on:
            raise ValueError(
                f"r_off must be >= r_on, got r_off={self.r_off} < r_on={self.r_on}"
            )
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class MemristorState:
    """One site's evolving state: accumulated charge plus a depletion flag.

    ``clamped`` is derived from ``q`` at construction, so it is always
    consistent: true exactly when the unbounded resistance has reached
    ``r_off``.  Charge may keep growing after that point (a depleted site
    still passes current); only the resistance stops changing.
    """

    params: MemristorParams
    q: float = 0.0
    label: str = ""
    clamped: bool = field(init=False, default=False)

    def __post_init__(self) -> None:
        if not self.q >= 0:
            raise ValueError(f"charge must be nonnegative, got q={self.q}")
        p = self.params
        unbounded = p.r_on + p.r_off * p.r_on * p.beta * self.q
        object.__setattr__(self, "clamped", unbounded >= p.r_off)


def memristance(state: MemristorState) -> float:
    """Instantaneous resistance of one site.

    M(q) = r_on + r_off * r_on * beta * q, capped at r_off.  Always in
    [r_on, r_off]; nondecreasing in q.
    """
    p = state.params
    m = p.r_on + p.r_off * p.r_on * p.beta * state.q
    return m if m < p.r_off else p.r_off


def depletion_charge(params: MemristorParams) -> float:
    """Charge at which resistance first hits r_off.

    Solving r_on + r_off*r_on*beta*q = r_off gives
    q* = (r_off - r_on) / (beta * r_on * r_off).  Zero when r_on == r_off.
    """
    return (params.r_off - params.r_on) / (params.beta * params.r_on * params.r_off)


def accumulate(state: MemristorState, current: float, dt: float) -> MemristorState:
    """Integrate charge for one step of duration ``dt`` at constant current.

    Returns a new state with q' = q + current*dt; the depletion flag is
    re-derived from the new charge.  Charge keeps integrating after the
    site clamps.
    """
    if current < 0:
        raise ValueError(f"current must be nonnegative, got {current}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return replace(state, q=state.q + current * dt)
