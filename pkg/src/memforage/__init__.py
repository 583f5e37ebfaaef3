"""memforage: gatherer allocation over resource sites as a memristor network.

Each known resource site is a charge-controlled resistor whose resistance
climbs from an initial value (rich site = low resistance) to a hard
ceiling as charge flows through it; hitting the ceiling means the site is
depleted.  Wiring the sites across a constant supply makes the supply
voltage a fixed pool of gatherers that redistributes itself as sites
deplete, and the summed current is the rate at which resource arrives.

Three wiring schedules implement three gathering strategies (all-sites,
sequential, leafcutter); a fixed-step engine integrates them, and a
closed-form solution of the same dynamics validates the engine exactly.
"""

from .devices import MemristorParams, MemristorState, accumulate, depletion_charge, memristance
from .engine import (
    DepletionEvent,
    SimulationState,
    SimulationTrace,
    Topology,
    allocation_share,
    branch_current,
    initial_state,
    run,
    simulate,
    step,
    voltages_across,
)
from .metrics import (
    ComparisonReport,
    StrategySummary,
    compare,
    cumulative_fraction,
    fraction_at,
    influx,
    summarize,
    time_to_fraction,
)
from .oracle import (
    PhasePlan,
    StrategyOracle,
    series_depletion_plan,
    series_phase_time,
    strategy_oracle_time,
)
from .scenario import (
    Environment,
    Site,
    load_scenario,
    preset,
    PRESET_NAMES,
    write_scenario,
    write_summary,
    write_trace,
)
from .strategies import (
    ALL_SITES,
    LEAFCUTTER,
    PARALLEL_RESIDUAL,
    SEQ_MODES,
    SEQUENTIAL,
    SHARED_SERIES,
    STRATEGIES,
    all_sites_schedule,
    leafcutter_schedule,
    make_schedule,
    sequential_schedule,
)

__version__ = "0.1.0"
