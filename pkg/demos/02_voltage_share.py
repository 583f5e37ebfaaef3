"""Voltage share under the all-sites strategy: who works where, and when.

With all five sites in one series branch, the supply voltage divides in
proportion to the sites' resistances: the voltage drop across a site is
the share of the gatherer pool assigned to it.  Counter-intuitively the
*worst* site (highest initial resistance) gets the majority of workers at
the start: every site yields its cheapest resource first, so the hard
site's high initial difficulty is where most of the pool's effort goes,
subsidized by the easy sites' productivity.  As each site depletes, its
share collapses toward the uniform residual and the workers migrate to
the next-worst site.  When everything is depleted the drops are equal.
"""

import pathlib

import memforage as mf
from memforage import metrics, plots

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

env = mf.preset("rich")
trace = mf.simulate(env, mf.make_schedule("all-sites", env), dt=0.01)

print("rich environment, all-sites strategy")
print(f"initial worker share per site (power fraction):")
state = mf.initial_state(env, mf.make_schedule("all-sites", env))
for i, label in enumerate(env.labels):
    share = mf.allocation_share(i, state.topology, state.sites, env.supply_v)
    print(f"  {label} (m0={env.m0s[i]:>4}): {share:.3f}")

print("\ndepletion order (worst site first):")
for event in trace.events:
    label = env.labels[event.site]
    print(f"  t={event.time:8.3f}  {label} (m0={env.m0s[event.site]})")

final_drops = trace.v[-1]
print(f"\nfinal voltage drops (all equal once depleted): {final_drops.round(6)}")
print(f"total time to deplete the environment: {trace.depletion_time:.3f}")
print(f"time to gather 50% of the total: {metrics.time_to_fraction(trace, 0.5):.3f}")

plots.voltage_chart(trace, OUT / "voltage_share_rich_all_sites.svg")
print(f"\nchart written to {OUT}/voltage_share_rich_all_sites.svg")
