#include <cmath>

#include "doctest.h"
#include "gridcarbon/io.hpp"
#include "gridcarbon/scenario.hpp"
#include "support/fixtures.hpp"

using namespace gridcarbon;
using testsupport::wind_case;
using testsupport::wind_case_demand;

namespace {

std::map<std::string, std::vector<double>> constant_history(double value) {
  return {{"R1", std::vector<double>(kHoursPerYear, value)}};
}

}  // namespace

TEST_CASE("representative days: mean over the month, normalized by annual peak") {
  SUBCASE("constant history gives constant unity curves") {
    auto curves = representative_days(constant_history(100.0));
    for (const auto& profile : curves.at("R1"))
      for (double v : profile) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("hour means divide by the annual peak") {
    // February hour-1 alternates 80/120 (mean 100); a single 200 spike in July
    auto history = constant_history(100.0);
    auto& h = history.at("R1");
    int feb_start = 31 * kHoursPerDay;
    for (int day = 0; day < 28; ++day)
      h[feb_start + day * kHoursPerDay] = (day % 2 == 0) ? 80.0 : 120.0;
    int july_start = (31 + 28 + 31 + 30 + 31 + 30) * kHoursPerDay;
    h[july_start + 12] = 200.0;
    auto curves = representative_days(history);
    CHECK(curves.at("R1")[1][0] == doctest::Approx(100.0 / 200.0));
    // invariant: everything in [0, 1]
    for (const auto& profile : curves.at("R1"))
      for (double v : profile) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
  }
  SUBCASE("incomplete history is rejected") {
    std::map<std::string, std::vector<double>> short_history = {
        {"R1", std::vector<double>(100, 1.0)}};
    CHECK_THROWS_AS(representative_days(short_history), Error);
  }
}

TEST_CASE("bus loads scale the regional curve by each peak") {
  GridCase grid = testsupport::two_bus_case(30.0);
  grid.loads.push_back({"d2", "b1", 10.0, "R1"});
  RegionalCurves curves;
  std::array<HourlyProfile, 12> months;
  months.fill(flat_profile(0.8));
  months[0][17] = 1.0;  // January peaks at hour 18
  curves["R1"] = months;

  HourlyLoads january = scale_bus_loads(grid, curves, 1);
  CHECK(january[0][0] == doctest::Approx(50.0 * 0.8));
  CHECK(january[0][17] == doctest::Approx(50.0));
  CHECK(january[1][17] == doctest::Approx(10.0));
  // same region, same shape: ratios equal the peak ratio
  for (int t = 0; t < kHoursPerDay; ++t)
    CHECK(january[1][t] * 5.0 == doctest::Approx(january[0][t]));

  SUBCASE("missing region curve") {
    grid.loads[0].region = "R9";
    CHECK_THROWS_AS(scale_bus_loads(grid, curves, 1), Error);
  }
}

TEST_CASE("season curves average their member months") {
  RegionalCurves curves;
  std::array<HourlyProfile, 12> months;
  for (int m = 0; m < 12; ++m) months[m] = flat_profile((m + 1) / 12.0);
  curves["R1"] = months;
  auto seasons = season_curves(curves);
  // winter = mean of Dec(12/12), Jan(1/12), Feb(2/12)
  CHECK(seasons.at("R1")[0][5] == doctest::Approx((12.0 + 1.0 + 2.0) / 36.0));
  // summer = mean of Jun, Jul, Aug
  CHECK(seasons.at("R1")[2][5] == doctest::Approx((6.0 + 7.0 + 8.0) / 36.0));
}

TEST_CASE("season day set carries calendar weights") {
  LoadedBundle bundle = synth_case(SynthTemplate::TwoArea, 4, 11);
  DaySet seasons;
  seasons.kind = DaySet::Kind::Seasons;
  auto days = build_days(bundle.grid, bundle.curves, seasons);
  REQUIRE(days.size() == 4);
  double total = 0.0;
  for (const auto& day : days) {
    total += day.weight_days;
    REQUIRE(day.loads.size() == bundle.grid.loads.size());
  }
  CHECK(total == doctest::Approx(365.0));
  CHECK(days[0].label == "winter");
  CHECK(days[0].weight_days == doctest::Approx(90.0));
  // winter loads equal peak times the mean of the Dec/Jan/Feb curves
  const auto& monthly = bundle.curves.at(bundle.grid.loads[0].region);
  double expected = bundle.grid.loads[0].peak_mw *
                    (monthly[11][5] + monthly[0][5] + monthly[1][5]) / 3.0;
  CHECK(days[0].loads[0][5] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("renewable scale factor solves the level equation") {
  CapacityMix mix;
  mix.variable_renewable_mw = 20.0;
  mix.hydro_mw = 10.0;
  mix.nonrenewable_mw = 70.0;
  SUBCASE("hand-solved target") {
    CHECK(renewable_scale_factor(mix, 0.5) == doctest::Approx(3.0));
  }
  SUBCASE("current level is a fixed point") {
    double current = mix.level();
    CHECK(renewable_scale_factor(mix, current) == doctest::Approx(1.0));
  }
  SUBCASE("target below the hydro floor is unreachable") {
    CapacityMix heavy_hydro;
    heavy_hydro.variable_renewable_mw = 10.0;
    heavy_hydro.hydro_mw = 50.0;
    heavy_hydro.nonrenewable_mw = 50.0;
    CHECK_THROWS_AS(renewable_scale_factor(heavy_hydro, 0.3), Error);
    try {
      renewable_scale_factor(heavy_hydro, 0.3);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnreachableLevel);
    }
  }
  SUBCASE("no variable renewables to scale") {
    CapacityMix none;
    none.nonrenewable_mw = 100.0;
    CHECK_THROWS_AS(renewable_scale_factor(none, 0.5), Error);
    try {
      renewable_scale_factor(none, 0.5);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoVariableRenewables);
    }
  }
}

TEST_CASE("applying the scale factor reproduces the target level") {
  GridCase grid = wind_case(30.0);  // wind 40 MW, gas 100 MW
  for (double target : {0.1, 0.3, 0.5, 0.75}) {
    double s = renewable_scale_factor(grid, target);
    GridCase scaled = apply_renewable_scaling(grid, s);
    CHECK(capacity_mix(scaled).level() == doctest::Approx(target).epsilon(1e-9));
  }
  SUBCASE("identity and zero scaling") {
    GridCase same = apply_renewable_scaling(grid, 1.0);
    CHECK(same.generators[0].capacity_mw == grid.generators[0].capacity_mw);
    GridCase zero = apply_renewable_scaling(grid, 0.0);
    CHECK(zero.generators[0].capacity_mw == 0.0);
    CHECK(zero.generators[1].capacity_mw == grid.generators[1].capacity_mw);
    GridCase tripled = apply_renewable_scaling(grid, 3.0);
    CHECK(tripled.generators[0].capacity_mw == doctest::Approx(120.0));
    for (int t = 0; t < kHoursPerDay; ++t)
      CHECK(tripled.generators[0].capability_profile[t] ==
            grid.generators[0].capability_profile[t]);
  }
}

TEST_CASE("annualization uses non-leap calendar days") {
  std::array<double, 12> flat;
  flat.fill(1.0);
  CHECK(annualize_monthly(flat) == doctest::Approx(365.0));
  std::array<double, 12> january_only{};
  january_only[0] = 2.0;
  CHECK(annualize_monthly(january_only) == doctest::Approx(62.0));
  std::array<double, 12> zero{};
  CHECK(annualize_monthly(zero) == doctest::Approx(0.0));
}

TEST_CASE("congestion-induced emissions") {
  SUBCASE("uncongested case measures zero") {
    CHECK(congestion_induced(wind_case(30.0), testsupport::no_loads(), wind_case_demand()) ==
          doctest::Approx(0.0));
  }
  SUBCASE("10 MW line induces the full 5 t") {
    CHECK(congestion_induced(wind_case(10.0), testsupport::no_loads(), wind_case_demand()) ==
          doctest::Approx(5.0).epsilon(1e-9));
  }
  SUBCASE("relaxed case as input is zero by construction") {
    CHECK(congestion_induced(relax_network(wind_case(10.0)), testsupport::no_loads(),
                             wind_case_demand()) == doctest::Approx(0.0));
  }
}

TEST_CASE("sweep over the two-area synthetic case") {
  LoadedBundle bundle = synth_case(SynthTemplate::TwoArea, 4, 11);
  ScenarioSpec spec;
  spec.penetrations = {0.0, 1.0};
  spec.renewable_levels = {0.2, 0.4};
  spec.days.months = {7};

  SweepOutput out = run_sweep(spec, bundle.grid, bundle.curves, bundle.config.fleet);
  REQUIRE(out.rows.size() == 8);  // 2 pens x 2 levels x 2 modes

  for (const auto& row : out.rows) {
    REQUIRE(row.status == "optimal");
    CHECK(row.result.congestion_induced_t >= 0.0);
    CHECK(row.result.e_v_t ==
          doctest::Approx(row.result.e_ev_t + row.result.e_icv_t).epsilon(1e-12));
    if (row.penetration == 0.0) {
      CHECK(row.result.e_ev_t == doctest::Approx(0.0));
      CHECK(row.result.e_v_t == doctest::Approx(row.result.e_icv_t));
    }
    if (row.mode == "relaxed") CHECK(row.result.congestion_induced_t == 0.0);
  }

  SUBCASE("deterministic repetition") {
    SweepOutput again = run_sweep(spec, bundle.grid, bundle.curves, bundle.config.fleet);
    REQUIRE(again.rows.size() == out.rows.size());
    for (size_t i = 0; i < out.rows.size(); ++i) {
      CHECK(again.rows[i].result.e_ev_t == out.rows[i].result.e_ev_t);
      CHECK(again.rows[i].result.e_v_t == out.rows[i].result.e_v_t);
      CHECK(again.rows[i].status == out.rows[i].status);
    }
  }

  SUBCASE("relaxed e_V is non-increasing in the renewable level") {
    double previous = kInf;
    for (const auto& row : out.rows) {
      if (row.mode != "relaxed" || row.penetration != 1.0) continue;
      CHECK(row.result.e_v_t <= previous + 1e-6);
      previous = row.result.e_v_t;
    }
  }
}

TEST_CASE("current-mix sweep point matches a single run") {
  LoadedBundle bundle = synth_case(SynthTemplate::TwoArea, 4, 11);
  ScenarioSpec spec;
  spec.penetrations = {1.0};
  spec.days.months = {7};  // levels empty: keep the current mix

  SweepOutput out = run_sweep(spec, bundle.grid, bundle.curves, bundle.config.fleet);
  REQUIRE(out.rows.size() == 2);
  CHECK(out.rows[0].renewable_level == doctest::Approx(capacity_mix(bundle.grid).level()));

  // single run of the same cell
  FleetAssumptions fleet = bundle.config.fleet;
  fleet.penetration = 1.0;
  EvDemand demand;
  for (const auto& d : county_ev_demands(bundle.grid, fleet))
    if (d.e_c_daily_mwh > 0.0) demand[d.fips] = d.e_c_daily_mwh;
  HourlyLoads july = scale_bus_loads(bundle.grid, bundle.curves, 7);
  PtdfSet ptdf = compute_case_ptdf(bundle.grid);
  BaseDispatch base = solve_model_one(bundle.grid, july, ptdf);
  EvDispatch ev = solve_model_two(bundle.grid, july, base, demand, ptdf);
  CHECK(out.rows[0].result.e_ev_t == doctest::Approx(31.0 * ev.e_ev_t).epsilon(1e-9));
}

TEST_CASE("infeasible sweep cells are recorded, not fatal") {
  LoadedBundle bundle = synth_case(SynthTemplate::TwoArea, 4, 11);
  GridCase tiny = bundle.grid;
  for (auto& g : tiny.generators) g.capacity_mw *= 1e-4;  // nothing can be served
  ScenarioSpec spec;
  spec.penetrations = {1.0};
  spec.days.months = {7};
  SweepOutput out = run_sweep(spec, tiny, bundle.curves, bundle.config.fleet);
  REQUIRE(out.rows.size() == 2);
  for (const auto& row : out.rows) CHECK(row.status != "optimal");
}

TEST_CASE("growth projection feeds the sweep") {
  LoadedBundle bundle = synth_case(SynthTemplate::TwoArea, 4, 11);
  ScenarioSpec spec;
  spec.penetrations = {0.0};
  spec.days.months = {7};
  spec.growth_years = 7;
  SweepOutput grown = run_sweep(spec, bundle.grid, bundle.curves, bundle.config.fleet);
  spec.growth_years = 0;
  SweepOutput flat = run_sweep(spec, bundle.grid, bundle.curves, bundle.config.fleet);
  // fuel growth raises ICV emissions by (1 + 0.0058)^7
  CHECK(grown.rows[0].result.e_icv_t ==
        doctest::Approx(flat.rows[0].result.e_icv_t * std::pow(1.0058, 7)).epsilon(1e-9));
}
