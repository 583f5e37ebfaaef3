"""Circuit engine: currents, voltage division, stepping, full runs."""

import numpy as np
import pytest

import memforage as mf
from memforage import (
    MemristorParams,
    MemristorState,
    SimulationState,
    Topology,
    allocation_share,
    branch_current,
    step,
    voltages_across,
)


def sites_from(m0s, r_off=100.0, beta=1.0):
    return tuple(
        MemristorState(params=MemristorParams(r_on=m0, r_off=r_off, beta=beta), label=f"site{i+1}")
        for i, m0 in enumerate(m0s)
    )


RICH = (1.0, 2.0, 0.5, 15.0, 4.0)


class TestTopology:
    def test_requires_a_branch(self):
        with pytest.raises(ValueError, match="at least one branch"):
            Topology(branches=())

    def test_rejects_empty_branch(self):
        with pytest.raises(ValueError, match="empty branch"):
            Topology(branches=((0,), ()))

    def test_rejects_duplicate_site(self):
        with pytest.raises(ValueError, match="more than one branch"):
            Topology(branches=((0, 1), (1,)))

    def test_wired_sites(self):
        topo = Topology(branches=((0, 2), (3,)))
        assert topo.wired_sites() == {0, 2, 3}


class TestBranchCurrent:
    def test_residual_draw(self):
        sites = sites_from([100.0])
        assert branch_current((0,), sites, 5.0) == pytest.approx(0.05, rel=1e-12)

    def test_rich_series_at_start(self):
        sites = sites_from(RICH)
        assert branch_current((0, 1, 2, 3, 4), sites, 5.0) == pytest.approx(
            5.0 / 22.5, rel=1e-12
        )

    def test_zero_supply(self):
        assert branch_current((0,), sites_from([10.0]), 0.0) == 0.0

    def test_empty_branch_rejected(self):
        with pytest.raises(ValueError):
            branch_current((), sites_from([1.0]), 5.0)


class TestVoltagesAcross:
    def test_singleton_takes_full_drop(self):
        assert voltages_across((0,), sites_from([42.0]), 5.0) == [pytest.approx(5.0)]

    def test_proportional_share(self):
        sites = sites_from(RICH)
        volts = voltages_across((0, 1, 2, 3, 4), sites, 5.0)
        assert volts[3] == pytest.approx(5.0 * 15.0 / 22.5, rel=1e-12)
        assert sum(volts) == pytest.approx(5.0, rel=1e-12)

    def test_fully_depleted_splits_evenly(self):
        sites = sites_from([100.0] * 5)
        volts = voltages_across((0, 1, 2, 3, 4), sites, 5.0)
        assert volts == pytest.approx([1.0] * 5, rel=1e-12)


class TestAllocationShare:
    def test_singleton(self):
        topo = Topology(branches=((0,),))
        assert allocation_share(0, topo, sites_from([3.0]), 5.0) == pytest.approx(1.0)

    def test_worst_site_draws_majority(self):
        topo = Topology(branches=((0, 1, 2, 3, 4),))
        share = allocation_share(3, topo, sites_from(RICH), 5.0)
        assert share == pytest.approx(15.0 / 22.5, rel=1e-12)

    def test_two_branch_power_split(self):
        # depleted best site alone (residual) against a fresh 4-site chain:
        # residual power 0.05^2*100 = 0.25, chain power (5/22)^2*22 = 25/22.
        sites = sites_from([1.0, 2.0, 0.5, 15.0, 4.0])
        depleted_best = MemristorState(params=sites[2].params, q=1.99, label="site3")
        sites = sites[:2] + (depleted_best,) + sites[3:]
        topo = Topology(branches=((0, 1, 3, 4), (2,)))
        share = allocation_share(2, topo, sites, 5.0)
        assert share == pytest.approx(0.25 / (0.25 + 25.0 / 22.0), rel=1e-12)
        total = sum(allocation_share(i, topo, sites, 5.0) for i in range(5))
        assert total == pytest.approx(1.0, rel=1e-12)

    def test_unwired_site_rejected(self):
        topo = Topology(branches=((0,),))
        with pytest.raises(ValueError, match="not wired"):
            allocation_share(1, topo, sites_from([1.0, 2.0]), 5.0)


class TestStep:
    def test_charge_increment(self):
        sites = sites_from([1.0, 2.0])
        state = SimulationState(sites=sites, supply_v=5.0, topology=Topology(branches=((0, 1),)))
        new, record, events = step(state, dt=0.1)
        current = 5.0 / 3.0
        assert new.sites[0].q == pytest.approx(current * 0.1, rel=1e-12)
        assert new.sites[0].q == new.sites[1].q
        assert record.influx == pytest.approx(
            branch_current((0, 1), new.sites, 5.0), rel=1e-12
        )
        assert events == []
        assert new.step == 1 and new.time == pytest.approx(0.1)

    def test_original_state_untouched(self):
        sites = sites_from([1.0])
        state = SimulationState(sites=sites, supply_v=5.0, topology=Topology(branches=((0,),)))
        step(state, dt=0.5)
        assert state.sites[0].q == 0.0 and state.step == 0

    def test_event_time_interpolated_exactly(self):
        # singleton at r_on=15: q* = 17/300, I = 5/15 at step start
        sites = sites_from([15.0])
        state = SimulationState(sites=sites, supply_v=5.0, topology=Topology(branches=((0,),)))
        new, _, events = step(state, dt=0.5)
        assert len(events) == 1
        q_star = 17.0 / 300.0
        assert events[0].time == pytest.approx(q_star / (5.0 / 15.0), rel=1e-12)
        assert new.sites[0].clamped

    def test_unwired_site_untouched(self):
        sites = sites_from([1.0, 2.0])
        state = SimulationState(sites=sites, supply_v=5.0, topology=Topology(branches=((0,),)))
        new, record, _ = step(state, dt=0.1)
        assert new.sites[1].q == 0.0
        assert record.v[1] == 0.0

    def test_rejects_nonpositive_dt(self):
        sites = sites_from([1.0])
        state = SimulationState(sites=sites, supply_v=5.0, topology=Topology(branches=((0,),)))
        with pytest.raises(ValueError):
            step(state, dt=0.0)


class TestRun:
    def test_already_depleted_site_events_at_zero(self):
        env = mf.Environment(sites=(mf.Site("only", 100.0),))
        trace = mf.simulate(env, mf.make_schedule("all-sites", env))
        assert trace.completed
        assert trace.events == [mf.DepletionEvent(site=0, time=0.0)]
        assert trace.depletion_time == 0.0
        assert trace.n_records == 1

    def test_max_steps_exhaustion_flagged(self):
        env = mf.preset("rich")
        trace = mf.simulate(env, mf.make_schedule("all-sites", env), max_steps=1)
        assert not trace.completed
        assert trace.depletion_time is None
        assert trace.depletion_step is None
        assert trace.n_records == 2

    def test_run_matches_repeated_step(self):
        env = mf.preset("rich")
        schedule = mf.make_schedule("all-sites", env)
        trace = mf.simulate(env, schedule, dt=0.05, max_steps=300)
        state = mf.initial_state(env, schedule)
        events = []
        for k in range(300):
            state, record, evs = step(state, 0.05)
            events.extend(evs)
            assert record.q == pytest.approx(tuple(trace.q[k + 1]), rel=1e-12, abs=1e-15)
            assert record.influx == pytest.approx(trace.influx[k + 1], rel=1e-12)
        for got, want in zip(events, trace.events):
            assert got.site == want.site
            assert got.time == pytest.approx(want.time, rel=1e-9)

    def test_depletion_order_descends_initial_resistance(self, run_cache):
        for preset_name in ("rich", "poor"):
            trace = run_cache(preset_name, "all-sites")
            env = mf.preset(preset_name)
            order = [env.m0s[e.site] for e in trace.events]
            assert order == sorted(env.m0s, reverse=True)

    def test_series_sites_share_charge_exactly(self, run_cache):
        trace = run_cache("rich", "all-sites")
        for i in range(1, trace.n_sites):
            assert np.array_equal(trace.q[:, 0], trace.q[:, i])

    def test_voltage_conservation_per_branch(self, run_cache):
        for strategy, mode in (("leafcutter", None), ("sequential", "parallel-residual")):
            trace = run_cache("rich", strategy, mode)
            v = trace.v
            for lo, hi, topo in trace._segment_record_ranges():
                for branch in topo.branches:
                    sums = v[lo:hi, list(branch)].sum(axis=1)
                    assert np.allclose(sums, trace.supply_v, rtol=1e-9, atol=0.0)

    def test_resistance_bounded_and_monotone(self, run_cache):
        trace = run_cache("rich", "leafcutter")
        m = trace.m
        assert (m <= trace.r_off).all()
        assert (m >= np.asarray(trace.site_r_on)).all()
        assert (np.diff(m, axis=0) >= 0.0).all()
        assert (np.diff(trace.cum_charge) > 0.0).all()

    def test_influx_is_sum_of_branch_currents(self, run_cache):
        trace = run_cache("rich", "sequential", "parallel-residual")
        for k in (0, trace.n_records // 2, trace.n_records - 1):
            assert trace.influx[k] == pytest.approx(sum(trace.branch_currents[k]), rel=1e-12)

    def test_supply_scaling_halves_event_times(self, run_cache):
        base = run_cache("rich", "all-sites")
        scaled = run_cache("rich", "all-sites", dt=0.0005, supply_scale=2.0)
        times_base = {e.site: e.time for e in base.events}
        times_scaled = {e.site: e.time for e in scaled.events}
        for site, t in times_base.items():
            assert times_scaled[site] == pytest.approx(t / 2.0, rel=1e-12)

    def test_record_thinning_keeps_events_and_final_step(self):
        env = mf.preset("rich")
        schedule = mf.make_schedule("all-sites", env)
        full = mf.simulate(env, schedule, dt=0.01)
        thin = mf.simulate(env, schedule, dt=0.01, record_every=1000)
        assert thin.n_records < full.n_records
        assert thin.steps[-1] == full.steps[-1]
        for a, b in zip(thin.events, full.events):
            assert a.site == b.site and a.time == b.time
        # thinned rows agree with the full trace at the same steps
        idx = np.searchsorted(full.steps, thin.steps)
        assert np.array_equal(full.q[idx], thin.q)
        assert np.array_equal(full.cum_charge[idx], thin.cum_charge)

    def test_engine_first_depletion_near_oracle(self, run_cache):
        trace = run_cache("rich", "all-sites")
        first = trace.events[0]
        assert first.site == 3
        assert first.time == pytest.approx(0.9775, rel=5e-3)

    def test_poor_total_near_oracle(self, run_cache):
        trace = run_cache("poor", "all-sites")
        assert trace.depletion_time == pytest.approx(179.1538650793651, rel=5e-3)

    def test_run_parameter_validation(self):
        env = mf.preset("rich")
        schedule = mf.make_schedule("all-sites", env)
        state = mf.initial_state(env, schedule)
        with pytest.raises(ValueError):
            mf.run(state, schedule, dt=0.0, max_steps=10)
        with pytest.raises(ValueError):
            mf.run(state, schedule, dt=0.1, max_steps=0)
        with pytest.raises(ValueError):
            mf.run(state, schedule, dt=0.1, max_steps=10, record_every=0)

    def test_supply_must_be_positive(self):
        with pytest.raises(ValueError, match="supply_v"):
            SimulationState(
                sites=sites_from([1.0]), supply_v=0.0, topology=Topology(branches=((0,),))
            )
