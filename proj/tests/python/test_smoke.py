"""End-to-end smoke tests for the Python bindings."""

import math

import pytest

import gridcarbon as gc


def test_version():
    assert gc.__version__


def test_synth_ring_validates_and_splits_ptdf():
    bundle = gc.synth_case("ring", buses=3, seed=1)
    report = gc.validate_case(bundle.grid)
    assert report.ok()
    assert len(gc.islands(bundle.grid)) == 1

    ptdf = gc.compute_case_ptdf(bundle.grid)
    # equal-reactance ring, slack b3: injection at b1 splits 1/3, 1/3, 2/3
    assert ptdf.value(0, 0) == pytest.approx(1.0 / 3.0)
    assert ptdf.value(1, 0) == pytest.approx(1.0 / 3.0)
    assert ptdf.value(2, 0) == pytest.approx(2.0 / 3.0)
    assert ptdf.value(0, 2) == 0.0  # slack column

    mat = ptdf.per_island[0].values
    assert mat.shape == (3, 3)


def test_lp_solver_bindings():
    lp = gc.LinearProgram()
    lp.add_variable("x", 0.0, 5.0, -1.0)
    sol = gc.solve_lp(lp)
    assert sol.status == gc.LpStatus.optimal
    assert sol.objective_value == pytest.approx(-5.0)
    assert sol.values[0] == pytest.approx(5.0)


def test_wind_curve():
    assert gc.wind_to_per_unit(2.0) == 0.0
    assert gc.wind_to_per_unit(16.0) == 0.0
    assert gc.wind_to_per_unit(10.0) == pytest.approx(973.0 / 3348.0)


def test_fleet_arithmetic():
    fleet = gc.FleetAssumptions()
    fleet.penetration = 1.0
    demand = gc.county_ev_demand("c", 365000.0, fleet)
    assert demand.e_c_daily_mwh == pytest.approx(8.9)
    assert gc.icv_emissions_annual_t(1000.0) == pytest.approx(8.9)


def test_two_area_dispatch_end_to_end():
    bundle = gc.synth_case("two-area", buses=4, seed=11)
    loads = gc.scale_bus_loads(bundle.grid, bundle.curves, 7)
    ptdf = gc.compute_case_ptdf(bundle.grid)
    base = gc.solve_model_one(bundle.grid, loads, ptdf)
    assert base.cost_total > 0.0
    assert base.max_residual <= 1e-6

    fleet = bundle.config.fleet
    fleet.penetration = 1.0
    demand = {
        d.fips: d.e_c_daily_mwh
        for d in gc.county_ev_demands(bundle.grid, fleet)
        if d.e_c_daily_mwh > 0.0
    }
    ev = gc.solve_model_two(bundle.grid, loads, base, demand, ptdf)
    assert ev.e_ev_t >= 0.0
    charged = {}
    for s, station in enumerate(ev.stations):
        fips = bundle.grid.counties[station.county].fips
        charged[fips] = charged.get(fips, 0.0) + sum(ev.charging[s])
    for fips, e_c in demand.items():
        assert charged[fips] == pytest.approx(e_c, abs=1e-6)

    induced = gc.congestion_induced(bundle.grid, loads, demand)
    assert induced >= 0.0


def test_sweep_rows_are_consistent():
    bundle = gc.synth_case("two-area", buses=4, seed=11)
    spec = gc.ScenarioSpec()
    spec.penetrations = [0.0, 1.0]
    spec.renewable_levels = [0.3]
    days = gc.DaySet()
    days.months = [7]
    spec.days = days
    out = gc.run_sweep(spec, bundle.grid, bundle.curves, bundle.config.fleet)
    assert len(out.rows) == 4
    for row in out.rows:
        assert row.status == "optimal"
        assert row.result.e_v_t == pytest.approx(row.result.e_ev_t + row.result.e_icv_t)
        assert row.result.congestion_induced_t >= 0.0
