#include "gridcarbon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gridcarbon {

const std::array<std::array<int, 3>, 4> kSeasonMonths = {{
    {{12, 1, 2}},  // winter
    {{3, 4, 5}},   // spring
    {{6, 7, 8}},   // summer
    {{9, 10, 11}}, // fall
}};

RegionalCurves representative_days(
    const std::map<std::string, std::vector<double>>& hourly_history) {
  RegionalCurves curves;
  for (const auto& [region, history] : hourly_history) {
    if (static_cast<int>(history.size()) != kHoursPerYear)
      fail(ErrorCode::IncompleteHistory,
           "region " + region + " has " + std::to_string(history.size()) +
               " hourly values, expected " + std::to_string(kHoursPerYear));
    double peak = 0.0;
    for (double v : history) peak = std::max(peak, v);
    std::array<HourlyProfile, 12> monthly;
    int offset = 0;
    for (int m = 0; m < 12; ++m) {
      HourlyProfile sum = flat_profile(0.0);
      for (int day = 0; day < kDaysInMonth[m]; ++day)
        for (int h = 0; h < kHoursPerDay; ++h)
          sum[h] += history[offset + day * kHoursPerDay + h];
      for (int h = 0; h < kHoursPerDay; ++h) {
        double mean = sum[h] / kDaysInMonth[m];
        monthly[m][h] = peak > 0.0 ? mean / peak : 0.0;
      }
      offset += kDaysInMonth[m] * kHoursPerDay;
    }
    curves[region] = monthly;
  }
  return curves;
}

HourlyLoads scale_bus_loads(const GridCase& grid, const RegionalCurves& curves, int month) {
  if (month < 1 || month > 12)
    fail(ErrorCode::MalformedProblem, "month must be in 1..12, got " + std::to_string(month));
  HourlyLoads loads(grid.loads.size(), flat_profile(0.0));
  for (size_t d = 0; d < grid.loads.size(); ++d) {
    auto it = curves.find(grid.loads[d].region);
    if (it == curves.end())
      fail(ErrorCode::MissingRegionCurve,
           "load " + grid.loads[d].id + " region " + grid.loads[d].region + " has no curve");
    const HourlyProfile& curve = it->second[month - 1];
    for (int t = 0; t < kHoursPerDay; ++t) loads[d][t] = grid.loads[d].peak_mw * curve[t];
  }
  return loads;
}

std::map<std::string, std::array<HourlyProfile, 4>> season_curves(const RegionalCurves& curves) {
  std::map<std::string, std::array<HourlyProfile, 4>> seasons;
  for (const auto& [region, monthly] : curves) {
    std::array<HourlyProfile, 4> out;
    for (int s = 0; s < 4; ++s) {
      out[s] = flat_profile(0.0);
      for (int m : kSeasonMonths[s])
        for (int h = 0; h < kHoursPerDay; ++h) out[s][h] += monthly[m - 1][h] / 3.0;
    }
    seasons[region] = out;
  }
  return seasons;
}

std::vector<WeightedDay> build_days(const GridCase& grid, const RegionalCurves& curves,
                                    const DaySet& days) {
  std::vector<WeightedDay> out;
  if (days.kind == DaySet::Kind::Months) {
    for (int month : days.months) {
      WeightedDay day;
      day.label = "month" + std::to_string(month);
      day.weight_days = kDaysInMonth.at(month - 1);
      day.loads = scale_bus_loads(grid, curves, month);
      out.push_back(std::move(day));
    }
    return out;
  }
  auto seasons = season_curves(curves);
  static const char* names[4] = {"winter", "spring", "summer", "fall"};
  for (int s = 0; s < 4; ++s) {
    WeightedDay day;
    day.label = names[s];
    day.weight_days = kDaysInSeason[s];
    day.loads.assign(grid.loads.size(), flat_profile(0.0));
    for (size_t d = 0; d < grid.loads.size(); ++d) {
      auto it = seasons.find(grid.loads[d].region);
      if (it == seasons.end())
        fail(ErrorCode::MissingRegionCurve,
             "load " + grid.loads[d].id + " region " + grid.loads[d].region + " has no curve");
      for (int t = 0; t < kHoursPerDay; ++t)
        day.loads[d][t] = grid.loads[d].peak_mw * it->second[s][t];
    }
    out.push_back(std::move(day));
  }
  return out;
}

namespace {

CapacityMix mix_over(const GridCase& grid, const std::vector<char>& gen_selected) {
  CapacityMix mix;
  for (size_t j = 0; j < grid.generators.size(); ++j) {
    if (!gen_selected[j]) continue;
    const GenerationUnit& g = grid.generators[j];
    if (is_variable_renewable(g.fuel))
      mix.variable_renewable_mw += g.capacity_mw;
    else if (g.fuel == Fuel::Hydro)
      mix.hydro_mw += g.capacity_mw;
    else
      mix.nonrenewable_mw += g.capacity_mw;
  }
  return mix;
}

}  // namespace

CapacityMix capacity_mix(const GridCase& grid) {
  return mix_over(grid, std::vector<char>(grid.generators.size(), 1));
}

CapacityMix capacity_mix(const GridCase& grid, const std::vector<int>& island_buses) {
  std::vector<char> in_island(grid.buses.size(), 0);
  for (int b : island_buses) in_island[b] = 1;
  std::vector<char> selected(grid.generators.size(), 0);
  for (size_t j = 0; j < grid.generators.size(); ++j) {
    int b = grid.bus_index(grid.generators[j].bus);
    if (b >= 0 && in_island[b]) selected[j] = 1;
  }
  return mix_over(grid, selected);
}

double renewable_scale_factor(const CapacityMix& mix, double target_level) {
  if (!(target_level >= 0.0 && target_level < 1.0))
    fail(ErrorCode::MalformedProblem, "renewable target must be in [0,1)");
  if (!(mix.variable_renewable_mw > 0.0))
    fail(ErrorCode::NoVariableRenewables, "no solar or wind capacity to scale");
  double s = (target_level * (mix.hydro_mw + mix.nonrenewable_mw) - mix.hydro_mw) /
             ((1.0 - target_level) * mix.variable_renewable_mw);
  if (s < 0.0)
    fail(ErrorCode::UnreachableLevel,
         "target " + std::to_string(target_level) + " below the hydro-only floor " +
             std::to_string(mix.hydro_mw / std::max(mix.hydro_mw + mix.nonrenewable_mw, 1e-30)));
  return s;
}

double renewable_scale_factor(const GridCase& grid, double target_level) {
  return renewable_scale_factor(capacity_mix(grid), target_level);
}

GridCase apply_renewable_scaling(const GridCase& grid, double s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    fail(ErrorCode::MalformedProblem, "scale factor must be >= 0");
  GridCase scaled = grid;
  for (auto& g : scaled.generators)
    if (is_variable_renewable(g.fuel)) g.capacity_mw *= s;
  return scaled;
}

GridCase scale_to_renewable_level(const GridCase& grid, double target_level) {
  GridCase scaled = grid;
  for (const auto& island : islands(grid)) {
    double s = renewable_scale_factor(capacity_mix(grid, island), target_level);
    std::vector<char> in_island(grid.buses.size(), 0);
    for (int b : island) in_island[b] = 1;
    for (auto& g : scaled.generators) {
      int b = grid.bus_index(g.bus);
      if (b >= 0 && in_island[b] && is_variable_renewable(g.fuel)) g.capacity_mw *= s;
    }
  }
  return scaled;
}

double annualize_monthly(const std::array<double, 12>& daily) {
  double total = 0.0;
  for (int m = 0; m < 12; ++m) total += kDaysInMonth[m] * daily[m];
  return total;
}

double congestion_induced(const GridCase& grid, const HourlyLoads& loads, const EvDemand& demand,
                          double voltage_threshold_kv) {
  PtdfSet ptdf = compute_case_ptdf(grid);

  BaseDispatch base = solve_model_one(grid, loads, ptdf);
  EvDispatch constrained = solve_model_two(grid, loads, base, demand, ptdf,
                                           voltage_threshold_kv);

  // The relaxed comparison keeps the base schedule fixed and drops only the
  // line limits. Re-dispatch is additive (delta_p >= 0), so re-running the
  // economic base on the relaxed network can absorb clean headroom into the
  // base schedule and make the difference sign-indefinite; holding p* fixed
  // makes the excess attributable to line limits alone, and nonnegative.
  GridCase relaxed_case = relax_network(grid);
  EvDispatch relaxed =
      solve_model_two(relaxed_case, loads, base, demand, ptdf, voltage_threshold_kv);

  double induced = constrained.e_ev_t - relaxed.e_ev_t;
  if (induced < 0.0 && induced >= -1e-6) induced = 0.0;
  return induced;
}

void ScenarioSpec::validate() const {
  for (double p : penetrations)
    if (!(p >= 0.0 && p <= 1.0))
      fail(ErrorCode::MalformedProblem, "penetration must be in [0,1]");
  for (double r : renewable_levels)
    if (!(r >= 0.0 && r < 1.0))
      fail(ErrorCode::MalformedProblem, "renewable level must be in [0,1)");
  if (!include_constrained && !include_relaxed)
    fail(ErrorCode::MalformedProblem, "sweep must include at least one mode");
  if (days.kind == DaySet::Kind::Months) {
    if (days.months.empty()) fail(ErrorCode::MalformedProblem, "empty month set");
    for (int m : days.months)
      if (m < 1 || m > 12) fail(ErrorCode::MalformedProblem, "month out of range");
  }
  if (growth_years < 0) fail(ErrorCode::MalformedProblem, "growth_years must be >= 0");
}

namespace {

struct CellOutcome {
  double e_ev_annual_t = 0.0;
  double congestion_annual_t = 0.0;  // constrained cells only
  std::string status = "optimal";
};

/// Constrained cell: Models I/II per day plus the fixed-base relaxed Model II
/// that prices the congestion overhead.
CellOutcome constrained_cell(const GridCase& grid, const std::vector<WeightedDay>& days,
                             const EvDemand& demand, const PtdfSet& ptdf,
                             double voltage_threshold_kv) {
  CellOutcome outcome;
  GridCase relaxed_case = relax_network(grid);
  try {
    for (const auto& day : days) {
      BaseDispatch base = solve_model_one(grid, day.loads, ptdf);
      EvDispatch ev =
          solve_model_two(grid, day.loads, base, demand, ptdf, voltage_threshold_kv);
      EvDispatch free_flow =
          solve_model_two(relaxed_case, day.loads, base, demand, ptdf, voltage_threshold_kv);
      outcome.e_ev_annual_t += day.weight_days * ev.e_ev_t;
      outcome.congestion_annual_t += day.weight_days * (ev.e_ev_t - free_flow.e_ev_t);
    }
    if (outcome.congestion_annual_t < 0.0 && outcome.congestion_annual_t >= -1e-6)
      outcome.congestion_annual_t = 0.0;
  } catch (const Error& e) {
    outcome.status = to_string(e.code());
  }
  return outcome;
}

/// Relaxed (adequate-capacity) cell: the whole pipeline without line limits.
CellOutcome relaxed_cell(const GridCase& grid, const std::vector<WeightedDay>& days,
                         const EvDemand& demand, const PtdfSet& ptdf,
                         double voltage_threshold_kv) {
  CellOutcome outcome;
  try {
    for (const auto& day : days) {
      BaseDispatch base = solve_model_one(grid, day.loads, ptdf);
      EvDispatch ev =
          solve_model_two(grid, day.loads, base, demand, ptdf, voltage_threshold_kv);
      outcome.e_ev_annual_t += day.weight_days * ev.e_ev_t;
    }
  } catch (const Error& e) {
    outcome.status = to_string(e.code());
  }
  return outcome;
}

}  // namespace

SweepOutput run_sweep(const ScenarioSpec& spec, const GridCase& grid,
                      const RegionalCurves& curves, const FleetAssumptions& fleet) {
  spec.validate();
  SweepOutput output;

  GridCase study = grid;
  if (spec.growth_years > 0) {
    for (auto& load : study.loads)
      load.peak_mw = project_growth(load.peak_mw, spec.load_growth_rate, spec.growth_years);
    for (auto& county : study.counties)
      county.annual_gallons =
          project_growth(county.annual_gallons, spec.fuel_growth_rate, spec.growth_years);
  }

  output.metadata["annualization"] = "calendar_days_nonleap";
  output.metadata["renewable_scaling"] = "per_island";
  output.metadata["congestion_comparison"] = "fixed_base_relaxed_model_two";
  output.metadata["growth_years"] = std::to_string(spec.growth_years);
  {
    std::ostringstream slacks;
    for (size_t i = 0; i < study.slack_buses.size(); ++i)
      slacks << (i ? "," : "") << study.slack_buses[i];
    output.metadata["slack_buses"] = slacks.str();
  }
  for (const auto& flag : kModelDeviationFlags) output.metadata["flag_" + flag] = "true";

  PtdfSet ptdf = compute_case_ptdf(study);

  std::vector<std::optional<double>> levels;
  if (spec.renewable_levels.empty())
    levels.push_back(std::nullopt);
  else
    for (double level : spec.renewable_levels) levels.push_back(level);

  for (double penetration : spec.penetrations) {
    FleetAssumptions cell_fleet = fleet;
    cell_fleet.penetration = penetration;
    auto demands = county_ev_demands(study, cell_fleet);
    EvDemand ev_demand;
    double e_icv_annual = 0.0;
    for (const auto& d : demands) {
      if (d.e_c_daily_mwh > 0.0) ev_demand[d.fips] = d.e_c_daily_mwh;
      e_icv_annual +=
          icv_emissions_annual_t(d.icv_gallons_daily * 365.0, cell_fleet.kg_co2_per_gallon);
    }

    for (const auto& level : levels) {
      GridCase scaled;
      double measured_level;
      std::string scale_status = "optimal";
      try {
        scaled = level ? scale_to_renewable_level(study, *level) : study;
        measured_level = capacity_mix(scaled).level();
      } catch (const Error& e) {
        scale_status = to_string(e.code());
        measured_level = level.value_or(0.0);
      }

      CellOutcome constrained, relaxed;
      if (scale_status == "optimal") {
        auto days = build_days(scaled, curves, spec.days);
        if (spec.include_constrained)
          constrained =
              constrained_cell(scaled, days, ev_demand, ptdf, spec.voltage_threshold_kv);
        if (spec.include_relaxed)
          relaxed = relaxed_cell(relax_network(scaled), days, ev_demand, ptdf,
                                 spec.voltage_threshold_kv);
      } else {
        constrained.status = relaxed.status = scale_status;
      }

      auto make_row = [&](const std::string& mode, const CellOutcome& outcome,
                          double congestion) {
        SweepRow row;
        row.penetration = penetration;
        row.renewable_level = measured_level;
        row.mode = mode;
        row.status = outcome.status;
        if (outcome.status == "optimal") {
          row.result.e_ev_t = outcome.e_ev_annual_t;
          row.result.e_icv_t = e_icv_annual;
          row.result.e_v_t =
              vehicle_operational_emissions_t(outcome.e_ev_annual_t, e_icv_annual);
          row.result.congestion_induced_t = congestion;
        }
        return row;
      };

      if (spec.include_constrained)
        output.rows.push_back(
            make_row("constrained", constrained, constrained.congestion_annual_t));
      if (spec.include_relaxed)
        output.rows.push_back(make_row("relaxed", relaxed, 0.0));
    }
  }
  return output;
}

}  // namespace gridcarbon
