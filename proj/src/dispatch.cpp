#include "gridcarbon/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace gridcarbon {

const std::vector<std::string> kModelDeviationFlags = {
    "upgrade_emission_cap_without_loss_factor",
    "upgrade_balance_with_loss_factor",
};

namespace {

constexpr double kCoefficientDrop = 1e-12;

std::string hour_tag(int t) { return std::to_string(t + 1); }

/// Clamp tiny negative headroom coming from solver tolerances on the base.
double nonnegative(double x) { return x > 0.0 ? x : 0.0; }

struct CaseIndex {
  std::vector<int> gen_bus;          // per generator, case bus index
  std::vector<int> load_bus;         // per load
  std::vector<int> gen_island;       // per generator
  std::vector<int> load_island;      // per load
  int num_islands = 0;
};

CaseIndex index_case(const GridCase& grid, const PtdfSet& ptdf) {
  CaseIndex idx;
  idx.num_islands = static_cast<int>(ptdf.per_island.size());
  for (const auto& g : grid.generators) {
    int b = grid.bus_index(g.bus);
    if (b < 0) fail(ErrorCode::UnknownBus, "generator " + g.id + " references bus " + g.bus);
    idx.gen_bus.push_back(b);
    idx.gen_island.push_back(ptdf.bus_island[b]);
  }
  for (const auto& d : grid.loads) {
    int b = grid.bus_index(d.bus);
    if (b < 0) fail(ErrorCode::UnknownBus, "load " + d.id + " references bus " + d.bus);
    idx.load_bus.push_back(b);
    idx.load_island.push_back(ptdf.bus_island[b]);
  }
  return idx;
}

/// Constant load part of each line-hour flow: sum_i pi_d(l,i) * p_d_i(t).
std::vector<HourlyProfile> load_flow_terms(const GridCase& grid, const HourlyLoads& loads,
                                           const PtdfSet& ptdf, const CaseIndex& idx) {
  std::vector<HourlyProfile> terms(grid.lines.size(), flat_profile(0.0));
  for (size_t l = 0; l < grid.lines.size(); ++l) {
    for (size_t d = 0; d < grid.loads.size(); ++d) {
      double pi = ptdf.value(static_cast<int>(l), idx.load_bus[d]);
      if (std::abs(pi) <= kCoefficientDrop) continue;
      for (int t = 0; t < kHoursPerDay; ++t) terms[l][t] += pi * loads[d][t];
    }
  }
  return terms;
}

std::vector<HourlyProfile> island_load_totals(const GridCase& grid, const HourlyLoads& loads,
                                              const CaseIndex& idx) {
  std::vector<HourlyProfile> totals(idx.num_islands, flat_profile(0.0));
  for (size_t d = 0; d < grid.loads.size(); ++d)
    for (int t = 0; t < kHoursPerDay; ++t) totals[idx.load_island[d]][t] += loads[d][t];
  return totals;
}

void check_loads(const GridCase& grid, const HourlyLoads& loads) {
  if (loads.size() != grid.loads.size())
    fail(ErrorCode::MalformedProblem, "hourly loads do not match the case load list");
}

void add_ramp_rows(LinearProgram& lp, const GenerationUnit& gen, int gen_index,
                   const std::function<int(int, int)>& var, int gen_ordinal,
                   const HourlyProfile* base = nullptr) {
  // cyclic closure: hour 1 ramps against hour 24
  for (int t = 0; t < kHoursPerDay; ++t) {
    int prev = (t + kHoursPerDay - 1) % kHoursPerDay;
    double base_delta = base ? (*base)[t] - (*base)[prev] : 0.0;
    if (std::isfinite(gen.ramp_up_mw_per_h)) {
      double rhs = gen.ramp_up_mw_per_h - base_delta;
      if (rhs < 0.0 && rhs > -1e-7) rhs = 0.0;
      lp.add_row("rampu[" + gen.id + "][" + hour_tag(t) + "]", Relation::LessEq, rhs,
                 {{var(gen_ordinal, t), 1.0}, {var(gen_ordinal, prev), -1.0}});
    }
    if (std::isfinite(gen.ramp_down_mw_per_h)) {
      double rhs = -gen.ramp_down_mw_per_h - base_delta;
      if (rhs > 0.0 && rhs < 1e-7) rhs = 0.0;
      lp.add_row("rampd[" + gen.id + "][" + hour_tag(t) + "]", Relation::GreaterEq, rhs,
                 {{var(gen_ordinal, t), 1.0}, {var(gen_ordinal, prev), -1.0}});
    }
  }
  (void)gen_index;
}

}  // namespace

std::vector<Station> build_stations(const GridCase& grid, const EvDemand& demand,
                                    double voltage_threshold_kv) {
  for (const auto& [fips, e_c] : demand) {
    if (grid.county_index(fips) < 0)
      fail(ErrorCode::CrossReferenceError, "EV demand references unknown county " + fips);
    if (e_c < 0.0) fail(ErrorCode::MalformedProblem, "negative EV demand for county " + fips);
  }
  std::vector<Station> stations;
  for (int c = 0; c < static_cast<int>(grid.counties.size()); ++c) {
    auto it = demand.find(grid.counties[c].fips);
    if (it == demand.end() || it->second <= 0.0) continue;
    County probe = grid.counties[c];
    probe.annual_gallons = std::max(probe.annual_gallons, 1.0);  // demand > 0 must be placeable
    for (int b : charging_sites(grid, probe, voltage_threshold_kv))
      stations.push_back({c, b, grid.counties[c].fips + ":" + grid.buses[b].id});
  }
  return stations;
}

ModelOne build_model_one(const GridCase& grid, const HourlyLoads& loads, const PtdfSet& ptdf) {
  check_loads(grid, loads);
  CaseIndex idx = index_case(grid, ptdf);
  ModelOne model;
  model.num_generators = static_cast<int>(grid.generators.size());
  LinearProgram& lp = model.lp;
  double dt = grid.time_grid.dt_h;

  for (int j = 0; j < model.num_generators; ++j) {
    const GenerationUnit& g = grid.generators[j];
    for (int t = 0; t < kHoursPerDay; ++t)
      lp.add_variable("p[" + g.id + "][" + hour_tag(t) + "]", 0.0, g.max_power_mw(t),
                      g.cost_per_mwh * dt);
  }

  // hourly balance per island: (1-tau) * sum p = island load
  auto totals = island_load_totals(grid, loads, idx);
  double supply_factor = 1.0 - grid.loss_rate;
  for (int k = 0; k < idx.num_islands; ++k) {
    for (int t = 0; t < kHoursPerDay; ++t) {
      std::vector<std::pair<int, double>> coeffs;
      for (int j = 0; j < model.num_generators; ++j)
        if (idx.gen_island[j] == k) coeffs.emplace_back(model.var(j, t), supply_factor);
      lp.add_row("bal[" + std::to_string(k) + "][" + hour_tag(t) + "]", Relation::Equal,
                 totals[k][t], std::move(coeffs));
    }
  }

  // |flow| <= F expanded into two rows per line-hour; relaxed lines skipped
  auto load_terms = load_flow_terms(grid, loads, ptdf, idx);
  for (int l = 0; l < static_cast<int>(grid.lines.size()); ++l) {
    const Line& line = grid.lines[l];
    if (!std::isfinite(line.capacity_mw)) continue;
    std::vector<std::pair<int, double>> base_coeffs;
    for (int j = 0; j < model.num_generators; ++j) {
      double pi = ptdf.value(l, idx.gen_bus[j]);
      if (std::abs(pi) > kCoefficientDrop) base_coeffs.emplace_back(j, pi);
    }
    for (int t = 0; t < kHoursPerDay; ++t) {
      std::vector<std::pair<int, double>> coeffs;
      coeffs.reserve(base_coeffs.size());
      for (const auto& [j, pi] : base_coeffs) coeffs.emplace_back(model.var(j, t), pi);
      lp.add_row("flowp[" + line.id + "][" + hour_tag(t) + "]", Relation::LessEq,
                 line.capacity_mw + load_terms[l][t], coeffs);
      lp.add_row("flowm[" + line.id + "][" + hour_tag(t) + "]", Relation::GreaterEq,
                 -line.capacity_mw + load_terms[l][t], std::move(coeffs));
    }
  }

  for (int j = 0; j < model.num_generators; ++j)
    add_ramp_rows(lp, grid.generators[j], j,
                  [&model](int gen, int t) { return model.var(gen, t); }, j);

  return model;
}

BaseDispatch solve_model_one(const GridCase& grid, const HourlyLoads& loads, const PtdfSet& ptdf,
                             const SolveOptions& options) {
  ModelOne model = build_model_one(grid, loads, ptdf);
  LpSolution solution = solve_lp(model.lp, options);
  if (solution.status == LpStatus::Infeasible)
    fail(ErrorCode::InfeasibleBaseCase,
         "base dispatch infeasible, residual demand " + std::to_string(solution.infeasibility) +
             " MW-equivalent");
  if (solution.status == LpStatus::Unbounded)
    fail(ErrorCode::MalformedProblem, "base dispatch unbounded (negative cost cycle)");

  CaseIndex idx = index_case(grid, ptdf);
  BaseDispatch base;
  base.cost_total = solution.objective_value;
  base.max_residual = solution.max_primal_residual;
  base.lp_iterations = solution.iterations;
  base.p_star.assign(grid.generators.size(), flat_profile(0.0));
  double dt = grid.time_grid.dt_h;
  for (size_t j = 0; j < grid.generators.size(); ++j) {
    for (int t = 0; t < kHoursPerDay; ++t) {
      double p = solution.values[model.var(static_cast<int>(j), t)];
      base.p_star[j][t] = p;
      base.emissions_total_t += grid.generators[j].emission_t_per_gwh * p * dt * kTonnesPerUnit;
    }
  }
  auto load_terms = load_flow_terms(grid, loads, ptdf, idx);
  base.flows.assign(grid.lines.size(), flat_profile(0.0));
  for (size_t l = 0; l < grid.lines.size(); ++l) {
    for (int t = 0; t < kHoursPerDay; ++t) {
      double flow = -load_terms[l][t];
      for (size_t j = 0; j < grid.generators.size(); ++j) {
        double pi = ptdf.value(static_cast<int>(l), idx.gen_bus[j]);
        if (std::abs(pi) > kCoefficientDrop) flow += pi * base.p_star[j][t];
      }
      base.flows[l][t] = flow;
    }
  }
  return base;
}

ModelTwo build_model_two(const GridCase& grid, const HourlyLoads& loads,
                         const BaseDispatch& base, const EvDemand& demand, const PtdfSet& ptdf,
                         double voltage_threshold_kv) {
  check_loads(grid, loads);
  if (base.p_star.size() != grid.generators.size())
    fail(ErrorCode::MalformedProblem, "base dispatch does not match the case generator list");
  CaseIndex idx = index_case(grid, ptdf);
  ModelTwo model;
  model.num_generators = static_cast<int>(grid.generators.size());
  model.stations = build_stations(grid, demand, voltage_threshold_kv);
  model.base_emissions_t = base.emissions_total_t;
  LinearProgram& lp = model.lp;
  double dt = grid.time_grid.dt_h;

  // re-dispatch is additive only: delta_p >= 0, headroom-bounded
  for (int j = 0; j < model.num_generators; ++j) {
    const GenerationUnit& g = grid.generators[j];
    for (int t = 0; t < kHoursPerDay; ++t)
      lp.add_variable("dp[" + g.id + "][" + hour_tag(t) + "]", 0.0,
                      nonnegative(g.max_power_mw(t) - base.p_star[j][t]),
                      g.emission_t_per_gwh * dt * kTonnesPerUnit);
  }
  for (int k = 0; k < static_cast<int>(model.stations.size()); ++k) {
    const Station& st = model.stations[k];
    for (int t = 0; t < kHoursPerDay; ++t)
      lp.add_variable("pv[" + st.id + "][" + hour_tag(t) + "]", 0.0, kInf, 0.0);
  }

  double supply_factor = 1.0 - grid.loss_rate;
  auto totals = island_load_totals(grid, loads, idx);
  for (int k = 0; k < idx.num_islands; ++k) {
    for (int t = 0; t < kHoursPerDay; ++t) {
      std::vector<std::pair<int, double>> coeffs;
      double base_supply = 0.0;
      for (int j = 0; j < model.num_generators; ++j) {
        if (idx.gen_island[j] != k) continue;
        coeffs.emplace_back(model.delta_var(j, t), supply_factor);
        base_supply += supply_factor * base.p_star[j][t];
      }
      for (int s = 0; s < static_cast<int>(model.stations.size()); ++s)
        if (ptdf.bus_island[model.stations[s].bus] == k)
          coeffs.emplace_back(model.charge_var(s, t), -1.0);
      lp.add_row("bal[" + std::to_string(k) + "][" + hour_tag(t) + "]", Relation::Equal,
                 totals[k][t] - base_supply, std::move(coeffs));
    }
  }

  for (int l = 0; l < static_cast<int>(grid.lines.size()); ++l) {
    const Line& line = grid.lines[l];
    if (!std::isfinite(line.capacity_mw)) continue;
    std::vector<std::pair<int, double>> gen_coeffs;
    for (int j = 0; j < model.num_generators; ++j) {
      double pi = ptdf.value(l, idx.gen_bus[j]);
      if (std::abs(pi) > kCoefficientDrop) gen_coeffs.emplace_back(j, pi);
    }
    std::vector<std::pair<int, double>> station_coeffs;
    for (int s = 0; s < static_cast<int>(model.stations.size()); ++s) {
      double pi = ptdf.value(l, model.stations[s].bus);
      if (std::abs(pi) > kCoefficientDrop) station_coeffs.emplace_back(s, pi);
    }
    for (int t = 0; t < kHoursPerDay; ++t) {
      std::vector<std::pair<int, double>> coeffs;
      coeffs.reserve(gen_coeffs.size() + station_coeffs.size());
      for (const auto& [j, pi] : gen_coeffs) coeffs.emplace_back(model.delta_var(j, t), pi);
      for (const auto& [s, pi] : station_coeffs)
        coeffs.emplace_back(model.charge_var(s, t), -pi);
      lp.add_row("flowp[" + line.id + "][" + hour_tag(t) + "]", Relation::LessEq,
                 line.capacity_mw - base.flows[l][t], coeffs);
      lp.add_row("flowm[" + line.id + "][" + hour_tag(t) + "]", Relation::GreaterEq,
                 -line.capacity_mw - base.flows[l][t], std::move(coeffs));
    }
  }

  for (int j = 0; j < model.num_generators; ++j)
    add_ramp_rows(lp, grid.generators[j], j,
                  [&model](int gen, int t) { return model.delta_var(gen, t); }, j,
                  &base.p_star[j]);

  // each county's charging energy over the cycle equals its requirement E_c
  std::map<int, std::vector<int>> stations_by_county;
  for (int s = 0; s < static_cast<int>(model.stations.size()); ++s)
    stations_by_county[model.stations[s].county].push_back(s);
  for (const auto& [county, members] : stations_by_county) {
    std::vector<std::pair<int, double>> coeffs;
    for (int s : members)
      for (int t = 0; t < kHoursPerDay; ++t) coeffs.emplace_back(model.charge_var(s, t), dt);
    lp.add_row("energy[" + grid.counties[county].fips + "]", Relation::Equal,
               demand.at(grid.counties[county].fips), std::move(coeffs));
  }

  return model;
}

EvDispatch solve_model_two(const GridCase& grid, const HourlyLoads& loads,
                           const BaseDispatch& base, const EvDemand& demand, const PtdfSet& ptdf,
                           double voltage_threshold_kv, const SolveOptions& options) {
  ModelTwo model = build_model_two(grid, loads, base, demand, ptdf, voltage_threshold_kv);
  LpSolution solution = solve_lp(model.lp, options);
  if (solution.status == LpStatus::Infeasible)
    fail(ErrorCode::InfeasibleEvDemand,
         "EV energy requirement undeliverable, residual " +
             std::to_string(solution.infeasibility));
  if (solution.status == LpStatus::Unbounded)
    fail(ErrorCode::MalformedProblem, "re-dispatch model unbounded");

  EvDispatch ev;
  ev.stations = model.stations;
  ev.lp_iterations = solution.iterations;
  ev.delta_p.assign(grid.generators.size(), flat_profile(0.0));
  ev.charging.assign(model.stations.size(), flat_profile(0.0));
  double dt = grid.time_grid.dt_h;
  for (size_t j = 0; j < grid.generators.size(); ++j)
    for (int t = 0; t < kHoursPerDay; ++t) {
      double dp = solution.values[model.delta_var(static_cast<int>(j), t)];
      ev.delta_p[j][t] = dp;
      ev.e_ev_t += grid.generators[j].emission_t_per_gwh * dp * dt * kTonnesPerUnit;
    }
  for (size_t s = 0; s < model.stations.size(); ++s)
    for (int t = 0; t < kHoursPerDay; ++t)
      ev.charging[s][t] = solution.values[model.charge_var(static_cast<int>(s), t)];

  CaseIndex idx = index_case(grid, ptdf);
  ev.flows.assign(grid.lines.size(), flat_profile(0.0));
  for (size_t l = 0; l < grid.lines.size(); ++l)
    for (int t = 0; t < kHoursPerDay; ++t) {
      double flow = base.flows[l][t];
      for (size_t j = 0; j < grid.generators.size(); ++j) {
        double pi = ptdf.value(static_cast<int>(l), idx.gen_bus[j]);
        if (std::abs(pi) > kCoefficientDrop) flow += pi * ev.delta_p[j][t];
      }
      for (size_t s = 0; s < model.stations.size(); ++s) {
        double pi = ptdf.value(static_cast<int>(l), model.stations[s].bus);
        if (std::abs(pi) > kCoefficientDrop) flow -= pi * ev.charging[s][t];
      }
      ev.flows[l][t] = flow;
    }

  ev.emissions_total_t = base.emissions_total_t + ev.e_ev_t;
  ev.feasible_slack = check_solution(model.lp, solution);
  return ev;
}

double ev_emissions(const GridCase& grid, const BaseDispatch& base, const EvDispatch& ev) {
  double dt = grid.time_grid.dt_h;
  double after = 0.0, before = 0.0;
  for (size_t j = 0; j < grid.generators.size(); ++j) {
    double rate = grid.generators[j].emission_t_per_gwh;
    for (int t = 0; t < kHoursPerDay; ++t) {
      after += rate * (base.p_star[j][t] + ev.delta_p[j][t]) * dt * kTonnesPerUnit;
      before += rate * base.p_star[j][t] * dt * kTonnesPerUnit;
    }
  }
  return after - before;
}

GridCase relax_network(const GridCase& grid) {
  GridCase relaxed = grid;
  for (auto& line : relaxed.lines) line.capacity_mw = kInf;
  return relaxed;
}

int ModelThree::ops_offset(int day) const {
  int per_day = (num_generators + static_cast<int>(stations.size())) * kHoursPerDay;
  return static_cast<int>(upgradable_lines.size()) + day * per_day;
}

int ModelThree::delta_var(int day, int gen, int hour) const {
  return ops_offset(day) + gen * kHoursPerDay + hour;
}

int ModelThree::charge_var(int day, int station, int hour) const {
  return ops_offset(day) + (num_generators + station) * kHoursPerDay + hour;
}

ModelThree build_model_three(const GridCase& grid, const std::vector<HourlyLoads>& days,
                             const std::vector<BaseDispatch>& bases, const EvDemand& demand,
                             double e_ev_max_t, const PtdfSet& ptdf,
                             double voltage_threshold_kv) {
  if (days.empty() || days.size() != bases.size())
    fail(ErrorCode::MalformedProblem, "upgrade model needs matching day and base lists");
  for (const auto& day : days) check_loads(grid, day);

  CaseIndex idx = index_case(grid, ptdf);
  ModelThree model;
  model.num_generators = static_cast<int>(grid.generators.size());
  model.num_days = static_cast<int>(days.size());
  model.stations = build_stations(grid, demand, voltage_threshold_kv);
  for (int l = 0; l < static_cast<int>(grid.lines.size()); ++l) {
    const Line& line = grid.lines[l];
    if (line.voltage_kv > voltage_threshold_kv && std::isfinite(line.capacity_mw))
      model.upgradable_lines.push_back(l);
  }
  LinearProgram& lp = model.lp;
  double dt = grid.time_grid.dt_h;

  // shared capacity increments, cost = line length (MW*mile objective)
  std::vector<int> delta_f_of_line(grid.lines.size(), -1);
  for (size_t u = 0; u < model.upgradable_lines.size(); ++u) {
    const Line& line = grid.lines[model.upgradable_lines[u]];
    delta_f_of_line[model.upgradable_lines[u]] = static_cast<int>(u);
    lp.add_variable("dF[" + line.id + "]", 0.0, kInf, line.length_mi);
  }

  double supply_factor = 1.0 - grid.loss_rate;
  for (int d = 0; d < model.num_days; ++d) {
    const HourlyLoads& loads = days[d];
    const BaseDispatch& base = bases[d];
    if (base.p_star.size() != grid.generators.size())
      fail(ErrorCode::MalformedProblem, "day " + std::to_string(d) + " base dispatch mismatch");
    std::string day_tag = "d" + std::to_string(d + 1);

    for (int j = 0; j < model.num_generators; ++j) {
      const GenerationUnit& g = grid.generators[j];
      for (int t = 0; t < kHoursPerDay; ++t)
        lp.add_variable("dp[" + day_tag + "][" + g.id + "][" + hour_tag(t) + "]", 0.0,
                        nonnegative(g.max_power_mw(t) - base.p_star[j][t]), 0.0);
    }
    for (const Station& st : model.stations)
      for (int t = 0; t < kHoursPerDay; ++t)
        lp.add_variable("pv[" + day_tag + "][" + st.id + "][" + hour_tag(t) + "]", 0.0, kInf,
                        0.0);

    // per-day EV emission cap, dimensionally matched to the EV accounting
    // identity rather than the printed cap row (see deviation flags)
    {
      std::vector<std::pair<int, double>> coeffs;
      for (int j = 0; j < model.num_generators; ++j) {
        double w = grid.generators[j].emission_t_per_gwh * dt * kTonnesPerUnit;
        if (w <= 0.0) continue;
        for (int t = 0; t < kHoursPerDay; ++t)
          coeffs.emplace_back(model.delta_var(d, j, t), w);
      }
      lp.add_row("cap[" + day_tag + "]", Relation::LessEq, e_ev_max_t, std::move(coeffs));
    }

    auto totals = island_load_totals(grid, loads, idx);
    for (int k = 0; k < idx.num_islands; ++k) {
      for (int t = 0; t < kHoursPerDay; ++t) {
        std::vector<std::pair<int, double>> coeffs;
        double base_supply = 0.0;
        for (int j = 0; j < model.num_generators; ++j) {
          if (idx.gen_island[j] != k) continue;
          coeffs.emplace_back(model.delta_var(d, j, t), supply_factor);
          base_supply += supply_factor * base.p_star[j][t];
        }
        for (int s = 0; s < static_cast<int>(model.stations.size()); ++s)
          if (ptdf.bus_island[model.stations[s].bus] == k)
            coeffs.emplace_back(model.charge_var(d, s, t), -1.0);
        lp.add_row("bal[" + day_tag + "][" + std::to_string(k) + "][" + hour_tag(t) + "]",
                   Relation::Equal, totals[k][t] - base_supply, std::move(coeffs));
      }
    }

    for (int l = 0; l < static_cast<int>(grid.lines.size()); ++l) {
      const Line& line = grid.lines[l];
      if (!std::isfinite(line.capacity_mw)) continue;
      std::vector<std::pair<int, double>> gen_coeffs, station_coeffs;
      for (int j = 0; j < model.num_generators; ++j) {
        double pi = ptdf.value(l, idx.gen_bus[j]);
        if (std::abs(pi) > kCoefficientDrop) gen_coeffs.emplace_back(j, pi);
      }
      for (int s = 0; s < static_cast<int>(model.stations.size()); ++s) {
        double pi = ptdf.value(l, model.stations[s].bus);
        if (std::abs(pi) > kCoefficientDrop) station_coeffs.emplace_back(s, pi);
      }
      for (int t = 0; t < kHoursPerDay; ++t) {
        std::vector<std::pair<int, double>> plus, minus;
        for (const auto& [j, pi] : gen_coeffs) plus.emplace_back(model.delta_var(d, j, t), pi);
        for (const auto& [s, pi] : station_coeffs)
          plus.emplace_back(model.charge_var(d, s, t), -pi);
        minus = plus;
        if (delta_f_of_line[l] >= 0) {
          plus.emplace_back(model.delta_f_var(delta_f_of_line[l]), -1.0);
          minus.emplace_back(model.delta_f_var(delta_f_of_line[l]), 1.0);
        }
        lp.add_row("flowp[" + day_tag + "][" + line.id + "][" + hour_tag(t) + "]",
                   Relation::LessEq, line.capacity_mw - base.flows[l][t], std::move(plus));
        lp.add_row("flowm[" + day_tag + "][" + line.id + "][" + hour_tag(t) + "]",
                   Relation::GreaterEq, -line.capacity_mw - base.flows[l][t], std::move(minus));
      }
    }

    for (int j = 0; j < model.num_generators; ++j)
      add_ramp_rows(lp, grid.generators[j], j,
                    [&model, d](int gen, int t) { return model.delta_var(d, gen, t); }, j,
                    &base.p_star[j]);

    std::map<int, std::vector<int>> stations_by_county;
    for (int s = 0; s < static_cast<int>(model.stations.size()); ++s)
      stations_by_county[model.stations[s].county].push_back(s);
    for (const auto& [county, members] : stations_by_county) {
      std::vector<std::pair<int, double>> coeffs;
      for (int s : members)
        for (int t = 0; t < kHoursPerDay; ++t)
          coeffs.emplace_back(model.charge_var(d, s, t), dt);
      lp.add_row("energy[" + day_tag + "][" + grid.counties[county].fips + "]", Relation::Equal,
                 demand.at(grid.counties[county].fips), std::move(coeffs));
    }
  }

  return model;
}

UpgradePlan solve_model_three(const GridCase& grid, const std::vector<HourlyLoads>& days,
                              const std::vector<BaseDispatch>& bases, const EvDemand& demand,
                              double e_ev_max_t, const PtdfSet& ptdf,
                              double voltage_threshold_kv, const SolveOptions& options) {
  ModelThree model =
      build_model_three(grid, days, bases, demand, e_ev_max_t, ptdf, voltage_threshold_kv);
  LpSolution solution = solve_lp(model.lp, options);
  if (solution.status == LpStatus::Infeasible)
    fail(ErrorCode::InfeasibleTarget,
         "emission target " + std::to_string(e_ev_max_t) +
             " t unattainable with the upgradable line set, residual " +
             std::to_string(solution.infeasibility));
  if (solution.status == LpStatus::Unbounded)
    fail(ErrorCode::MalformedProblem, "upgrade model unbounded");

  UpgradePlan plan;
  plan.deviation_flags = kModelDeviationFlags;
  plan.delta_f_mw.assign(grid.lines.size(), 0.0);
  for (size_t u = 0; u < model.upgradable_lines.size(); ++u) {
    double df = solution.values[model.delta_f_var(static_cast<int>(u))];
    if (df < 1e-9) df = 0.0;
    int l = model.upgradable_lines[u];
    plan.delta_f_mw[l] = df;
    plan.objective_mw_mile += df * grid.lines[l].length_mi;
    if (df > 0.0) plan.binding_lines.push_back(l);
  }
  double dt = grid.time_grid.dt_h;
  for (int d = 0; d < model.num_days; ++d) {
    double day_e_ev = 0.0;
    for (int j = 0; j < model.num_generators; ++j) {
      double rate = grid.generators[j].emission_t_per_gwh;
      for (int t = 0; t < kHoursPerDay; ++t)
        day_e_ev +=
            rate * solution.values[model.delta_var(d, j, t)] * dt * kTonnesPerUnit;
    }
    plan.achieved_e_ev_t = std::max(plan.achieved_e_ev_t, day_e_ev);
  }
  return plan;
}

UpgradePlan upgrade_envelope(const GridCase& grid, const std::vector<UpgradePlan>& plans) {
  if (plans.empty()) fail(ErrorCode::MalformedProblem, "no plans to envelope");
  UpgradePlan envelope;
  envelope.deviation_flags = plans.front().deviation_flags;
  envelope.delta_f_mw.assign(grid.lines.size(), 0.0);
  for (const auto& plan : plans) {
    if (plan.delta_f_mw.size() != grid.lines.size())
      fail(ErrorCode::MalformedProblem, "plan line set does not match the case");
    for (size_t l = 0; l < grid.lines.size(); ++l)
      envelope.delta_f_mw[l] = std::max(envelope.delta_f_mw[l], plan.delta_f_mw[l]);
    envelope.achieved_e_ev_t = std::max(envelope.achieved_e_ev_t, plan.achieved_e_ev_t);
  }
  for (size_t l = 0; l < grid.lines.size(); ++l) {
    if (envelope.delta_f_mw[l] > 0.0) {
      envelope.binding_lines.push_back(static_cast<int>(l));
      envelope.objective_mw_mile += envelope.delta_f_mw[l] * grid.lines[l].length_mi;
    }
  }
  return envelope;
}

GridCase apply_upgrade(const GridCase& grid, const UpgradePlan& plan) {
  if (plan.delta_f_mw.size() != grid.lines.size())
    fail(ErrorCode::MalformedProblem, "plan line set does not match the case");
  GridCase upgraded = grid;
  for (size_t l = 0; l < grid.lines.size(); ++l)
    if (std::isfinite(upgraded.lines[l].capacity_mw))
      upgraded.lines[l].capacity_mw += plan.delta_f_mw[l];
  return upgraded;
}

}  // namespace gridcarbon
