"""A single resource site: resistance law, depletion, diminishing returns.

One site is one charge-controlled resistor.  Its resistance starts at the
site's initial value (low = rich, easy site) and climbs linearly with the
charge that has passed through it, until it hits the ceiling r_off = 100:
the site is depleted.  Driving it from a constant supply therefore gives
a current that decays as the site is worked; the law of diminishing
returns falls out of the circuit, no extra modelling needed.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import memforage as mf

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# --- the resistance law -----------------------------------------------------
params = mf.MemristorParams(r_on=0.5, r_off=100.0, beta=1.0)
q_star = mf.depletion_charge(params)
print(f"site with initial resistance {params.r_on}: depletion charge q* = {q_star}")

qs = np.linspace(0, 1.2 * q_star, 400)
ms = [mf.memristance(mf.MemristorState(params=params, q=q)) for q in qs]

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(qs, ms)
ax.axvline(q_star, color="k", linestyle=":", label=f"depletion at q*={q_star:.3f}")
ax.set_xlabel("accumulated charge (resource removed)")
ax.set_ylabel("resistance (difficulty)")
ax.set_title("Site difficulty grows linearly with extraction, then saturates")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "single_site_resistance.svg")
plt.close(fig)

# --- a singleton run: current decays as the site is worked ------------------
env = mf.Environment(sites=(mf.Site("lone", 0.5),), dt=0.01)
trace = mf.simulate(env, mf.make_schedule("all-sites", env))
print(f"time to deplete the lone site at supply {env.supply_v}: {trace.depletion_time:.4f}")
print(f"initial influx {trace.influx[0]:.3f} -> final residual draw {trace.influx[-1]:.3f}")

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(trace.times, trace.influx)
ax.set_xlabel("time")
ax.set_ylabel("current (gathering rate)")
ax.set_title("Gathering rate at one site: fast start, diminishing returns")
fig.tight_layout()
fig.savefig(OUT / "single_site_current.svg")
plt.close(fig)

print(f"charts written to {OUT}/")
