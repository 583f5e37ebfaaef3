"""Shared fixtures: cached simulation runs reused across test modules.

Full-resolution runs at dt=1e-3 take a few hundred milliseconds each, so
every (preset, strategy, mode, dt) combination is simulated once per
session and handed out read-only.
"""

from __future__ import annotations

import pytest

import memforage as mf

ALL_CASES = [
    ("all-sites", None),
    ("sequential", "parallel-residual"),
    ("sequential", "shared-series"),
    ("leafcutter", None),
]


def scaled_env(env: mf.Environment, supply_scale: float) -> mf.Environment:
    return mf.Environment(
        sites=env.sites,
        r_off=env.r_off,
        beta=env.beta,
        supply_v=env.supply_v * supply_scale,
        dt=env.dt,
        max_steps=env.max_steps,
        name=env.name,
    )


@pytest.fixture(scope="session")
def run_cache():
    cache: dict = {}

    def get(
        preset_name: str,
        strategy: str,
        mode: str | None = None,
        dt: float = 0.001,
        record_every: int = 1,
        supply_scale: float = 1.0,
    ) -> mf.SimulationTrace:
        key = (preset_name, strategy, mode, dt, record_every, supply_scale)
        if key not in cache:
            env = mf.preset(preset_name)
            if supply_scale != 1.0:
                env = scaled_env(env, supply_scale)
            schedule = mf.make_schedule(strategy, env, seq_mode=mode or "parallel-residual")
            cache[key] = mf.simulate(env, schedule, dt=dt, record_every=record_every)
        return cache[key]

    return get
