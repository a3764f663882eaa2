#pragma once

#include <string>
#include <vector>

#include "gridcarbon/dispatch.hpp"
#include "gridcarbon/grid.hpp"
#include "rng.hpp"

namespace testsupport {

using namespace gridcarbon;

/// Two buses, one line b1->b2, cheap generator at b1, expensive at b2, all
/// demand at b2. The hand-solved congestion fixture: with 50 MW of load in
/// hour 1 and capacity 30, the optimum is p = (30, 20) at cost $1300.
inline GridCase two_bus_case(double line_capacity_mw) {
  GridCase grid;
  grid.name = "two-bus";
  grid.loss_rate = 0.0;
  grid.buses = {{"b1", 138.0, "c1", "R1"}, {"b2", 138.0, "c2", "R1"}};
  grid.lines = {{"l1", "b1", "b2", 0.1, line_capacity_mw, 1.0, 345.0}};
  GenerationUnit a;
  a.id = "gA";
  a.bus = "b1";
  a.fuel = Fuel::Gas;
  a.capacity_mw = 100.0;
  a.cost_per_mwh = 10.0;
  a.emission_t_per_gwh = 300.0;
  a.ramp_up_mw_per_h = a.ramp_down_mw_per_h = 1000.0;
  GenerationUnit b = a;
  b.id = "gB";
  b.bus = "b2";
  b.cost_per_mwh = 50.0;
  b.emission_t_per_gwh = 700.0;
  grid.generators = {a, b};
  grid.loads = {{"d1", "b2", 50.0, "R1"}};
  grid.counties = {{"c1", "ST", 1.0, 0.0}, {"c2", "ST", 1.0, 0.0}};
  grid.slack_buses = {"b2"};
  return grid;
}

/// Loads for the two-bus fixture: 50 MW at hour 1, zero afterwards.
inline HourlyLoads two_bus_loads() {
  HourlyLoads loads(1, flat_profile(0.0));
  loads[0][0] = 50.0;
  return loads;
}

/// Two buses, wind at b1 available only in hour 1 (40 MW), a 500 t/GWh unit
/// at b2, no base load, and one county with charging at b2. With E_c = 20 MWh:
/// capacity 30 gives e_EV = 0 (all wind), capacity 10 gives e_EV = 5 t.
inline GridCase wind_case(double line_capacity_mw, double dirty_capacity_mw = 100.0) {
  GridCase grid;
  grid.name = "wind-case";
  grid.loss_rate = 0.0;
  grid.buses = {{"b1", 138.0, "c1", "R1"}, {"b2", 138.0, "c2", "R1"}};
  grid.lines = {{"l1", "b1", "b2", 0.1, line_capacity_mw, 1.0, 345.0}};
  GenerationUnit wind;
  wind.id = "gW";
  wind.bus = "b1";
  wind.fuel = Fuel::Wind;
  wind.capacity_mw = 40.0;
  wind.cost_per_mwh = 0.0;
  wind.emission_t_per_gwh = 0.0;
  wind.ramp_up_mw_per_h = wind.ramp_down_mw_per_h = 1000.0;
  wind.capability_profile = flat_profile(0.0);
  wind.capability_profile[0] = 1.0;
  GenerationUnit dirty;
  dirty.id = "gD";
  dirty.bus = "b2";
  dirty.fuel = Fuel::Gas;
  dirty.capacity_mw = dirty_capacity_mw;
  dirty.cost_per_mwh = 5.0;
  dirty.emission_t_per_gwh = 500.0;
  dirty.ramp_up_mw_per_h = dirty.ramp_down_mw_per_h = 1000.0;
  grid.generators = {wind, dirty};
  grid.counties = {{"c1", "ST", 1.0, 0.0}, {"c2", "ST", 1.0, 1000.0}};
  grid.slack_buses = {"b2"};
  return grid;
}

inline HourlyLoads no_loads() { return {}; }

inline EvDemand wind_case_demand(double e_c_mwh = 20.0) { return {{"c2", e_c_mwh}}; }

/// Equal-reactance three-bus ring, the canonical PTDF fixture. Lines are
/// (b1,b2), (b2,b3), (b1,b3); with slack b3, injecting at b1 splits 1/3,
/// 1/3, 2/3.
inline GridCase ring3_case() {
  GridCase grid;
  grid.name = "ring3";
  grid.buses = {{"b1", 138.0, "c1", "R1"}, {"b2", 138.0, "c1", "R1"},
                {"b3", 138.0, "c1", "R1"}};
  grid.lines = {{"l12", "b1", "b2", 1.0, 100.0, 10.0, 345.0},
                {"l23", "b2", "b3", 1.0, 100.0, 10.0, 345.0},
                {"l13", "b1", "b3", 1.0, 100.0, 10.0, 345.0}};
  grid.counties = {{"c1", "ST", 1.0, 0.0}};
  grid.slack_buses = {"b3"};
  return grid;
}

/// Random connected case (spanning tree plus chords, parallel lines allowed)
/// for PTDF property tests. No generators or loads.
inline GridCase random_connected_case(Rng& rng, int max_buses = 20) {
  int n = rng.range(2, max_buses);
  GridCase grid;
  grid.name = "random";
  for (int i = 1; i <= n; ++i)
    grid.buses.push_back({"b" + std::to_string(i), 138.0, "c1", "R1"});
  int line_id = 0;
  auto add_line = [&](int from, int to) {
    Line line;
    line.id = "l" + std::to_string(++line_id);
    line.from_bus = grid.buses[from].id;
    line.to_bus = grid.buses[to].id;
    line.reactance_pu = rng.uniform(0.1, 2.0);
    line.capacity_mw = 100.0;
    line.length_mi = 1.0;
    line.voltage_kv = 345.0;
    grid.lines.push_back(std::move(line));
  };
  for (int i = 1; i < n; ++i) add_line(rng.below(i), i);
  int chords = rng.below(n);
  for (int c = 0; c < chords; ++c) {
    int a = rng.below(n), b = rng.below(n);
    if (a != b) add_line(a, b);
  }
  grid.counties = {{"c1", "ST", 1.0, 0.0}};
  grid.slack_buses = {grid.buses[rng.below(n)].id};
  return grid;
}

/// Balanced injection vector (sums to zero) over all buses.
inline std::vector<double> random_balanced_injections(const GridCase& grid, Rng& rng) {
  std::vector<double> inj(grid.buses.size());
  double sum = 0.0;
  for (auto& v : inj) {
    v = rng.uniform(-50.0, 50.0);
    sum += v;
  }
  for (auto& v : inj) v -= sum / static_cast<double>(inj.size());
  return inj;
}

}  // namespace testsupport
