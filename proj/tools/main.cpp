#include <cstdio>
#include <optional>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridcarbon/io.hpp"

namespace fs = std::filesystem;
using namespace gridcarbon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInputError = 3;

LoadedBundle load_bundle(const std::string& dir, const std::optional<double>& tau,
                         const std::optional<double>& threshold) {
  LoadedBundle loaded = load_case(dir);
  if (tau) {  // CLI flags override config file and environment
    loaded.config.tau = *tau;
    loaded.grid.loss_rate = *tau;
    ValidationReport report = validate_case(loaded.grid);
    if (!report.ok())
      fail(ErrorCode::ValidationError, "case invalid after overrides:\n" + report.to_string());
  }
  if (threshold) loaded.config.voltage_threshold_kv = *threshold;
  return loaded;
}

EvDemand demand_for(const GridCase& grid, FleetAssumptions fleet, double penetration) {
  fleet.penetration = penetration;
  EvDemand demand;
  for (const auto& d : county_ev_demands(grid, fleet))
    if (d.e_c_daily_mwh > 0.0) demand[d.fips] = d.e_c_daily_mwh;
  return demand;
}

std::map<std::string, std::string> config_echo(const RunConfig& config) {
  std::map<std::string, std::string> echo;
  echo["tau"] = format_compact(config.tau);
  echo["penetration"] = format_compact(config.fleet.penetration);
  echo["voltage_threshold_kv"] = format_compact(config.voltage_threshold_kv);
  echo["icv_mpge"] = format_compact(config.fleet.icv_mpge);
  echo["ev_mpge"] = format_compact(config.fleet.ev_mpge);
  echo["kwh_per_gallon_ev"] = format_compact(config.fleet.kwh_per_gallon_ev);
  echo["kg_co2_per_gallon"] = format_compact(config.fleet.kg_co2_per_gallon);
  std::string slacks;
  for (size_t i = 0; i < config.slack_buses.size(); ++i)
    slacks += (i ? "," : "") + config.slack_buses[i];
  echo["slack_buses"] = slacks;
  return echo;
}

std::vector<std::pair<std::string, HourlyProfile>> series_of(
    const std::vector<std::string>& ids, const std::vector<HourlyProfile>& values) {
  std::vector<std::pair<std::string, HourlyProfile>> out;
  for (size_t i = 0; i < ids.size(); ++i) out.emplace_back(ids[i], values[i]);
  return out;
}

std::vector<std::string> generator_ids(const GridCase& grid) {
  std::vector<std::string> ids;
  for (const auto& g : grid.generators) ids.push_back(g.id);
  return ids;
}

std::vector<std::string> line_ids(const GridCase& grid) {
  std::vector<std::string> ids;
  for (const auto& l : grid.lines) ids.push_back(l.id);
  return ids;
}

DaySet parse_day_set(const std::string& text) {
  DaySet days;
  if (text == "seasons") {
    days.kind = DaySet::Kind::Seasons;
    return days;
  }
  if (text == "all" || text.empty()) return days;
  days.months.clear();
  std::string current;
  for (char c : text + ",") {
    if (c == ',') {
      if (!current.empty()) days.months.push_back(std::stoi(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  return days;
}

ScenarioSpec parse_sweep_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open sweep spec " + path.string());
  ScenarioSpec spec;
  std::string line;
  int line_no = 0;
  auto parse_list = [](const std::string& value) {
    std::vector<double> values;
    std::string current;
    for (char c : value + ",") {
      if (c == ',') {
        if (!current.empty()) values.push_back(std::stod(current));
        current.clear();
      } else if (!isspace(static_cast<unsigned char>(c))) {
        current.push_back(c);
      }
    }
    return values;
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string where = path.filename().string() + " line " + std::to_string(line_no);
    if (key.empty()) continue;
    if (key == "penetrations") spec.penetrations = parse_list(value);
    else if (key == "renewable_levels") spec.renewable_levels = parse_list(value);
    else if (key == "days") {
      DaySet days = parse_day_set(value);
      spec.days = days;
    } else if (key == "modes") {
      spec.include_constrained = value == "both" || value == "constrained";
      spec.include_relaxed = value == "both" || value == "relaxed";
      if (value != "both" && value != "constrained" && value != "relaxed")
        fail(ErrorCode::ParseError, where + ": modes must be constrained|relaxed|both");
    } else if (key == "growth_years") spec.growth_years = std::stoi(value);
    else if (key == "load_growth_rate") spec.load_growth_rate = std::stod(value);
    else if (key == "fuel_growth_rate") spec.fuel_growth_rate = std::stod(value);
    else fail(ErrorCode::ParseError, where + ": unknown sweep key '" + key + "'");
  }
  return spec;
}

int cmd_validate(const std::string& bundle, const std::optional<double>& tau,
                 const std::optional<double>& threshold) {
  try {
    LoadedBundle loaded = load_bundle(bundle, tau, threshold);
    ValidationReport fleet_report = loaded.config.fleet.validate();
    for (const auto& w : fleet_report.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "ok: " << loaded.grid.buses.size() << " buses, " << loaded.grid.lines.size()
              << " lines, " << loaded.grid.generators.size() << " generators, "
              << loaded.grid.loads.size() << " loads, " << loaded.grid.counties.size()
              << " counties, " << islands(loaded.grid).size() << " island(s)\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cout << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_ptdf(const std::string& bundle, bool dump, const fs::path& out_dir,
             const std::optional<double>& tau, const std::optional<double>& threshold) {
  LoadedBundle loaded = load_bundle(bundle, tau, threshold);
  PtdfSet ptdf = compute_case_ptdf(loaded.grid);
  ReportInputs inputs;
  inputs.grid = &loaded.grid;
  if (dump) inputs.ptdf = &ptdf;
  inputs.summary["islands"] = std::to_string(ptdf.per_island.size());
  for (size_t k = 0; k < ptdf.per_island.size(); ++k)
    inputs.summary["slack_island_" + std::to_string(k)] = ptdf.per_island[k].slack_bus;
  inputs.metadata = config_echo(loaded.config);
  auto files = emit_report(inputs, "csv", out_dir);
  std::cout << "ptdf: " << ptdf.per_island.size() << " island(s), wrote " << files.size()
            << " file(s) to " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_dispatch(const std::string& bundle, int month, const fs::path& out_dir,
                 const std::optional<double>& tau, const std::optional<double>& threshold) {
  LoadedBundle loaded = load_bundle(bundle, tau, threshold);
  HourlyLoads loads = scale_bus_loads(loaded.grid, loaded.curves, month);
  PtdfSet ptdf = compute_case_ptdf(loaded.grid);
  BaseDispatch base = solve_model_one(loaded.grid, loads, ptdf, loaded.config.solve_options());

  ReportInputs inputs;
  inputs.grid = &loaded.grid;
  inputs.generation_series = series_of(generator_ids(loaded.grid), base.p_star);
  inputs.flow_series = series_of(line_ids(loaded.grid), base.flows);
  inputs.summary["month"] = std::to_string(month);
  inputs.summary["cost_total"] = format_compact(base.cost_total);
  inputs.summary["emissions_total_t"] = format_compact(base.emissions_total_t);
  inputs.summary["max_residual"] = format_compact(base.max_residual);
  inputs.metadata = config_echo(loaded.config);
  emit_report(inputs, "csv", out_dir);
  std::cout << "dispatch month " << month << ": cost " << format_compact(base.cost_total)
            << ", emissions " << format_compact(base.emissions_total_t) << " t\n";
  return kExitOk;
}

int cmd_ev_dispatch(const std::string& bundle, double penetration, bool relaxed, int month,
                    const fs::path& out_dir, const std::optional<double>& tau,
                    const std::optional<double>& threshold) {
  LoadedBundle loaded = load_bundle(bundle, tau, threshold);
  GridCase grid = relaxed ? relax_network(loaded.grid) : loaded.grid;
  HourlyLoads loads = scale_bus_loads(grid, loaded.curves, month);
  PtdfSet ptdf = compute_case_ptdf(grid);
  EvDemand demand = demand_for(grid, loaded.config.fleet, penetration);

  BaseDispatch base = solve_model_one(grid, loads, ptdf, loaded.config.solve_options());
  EvDispatch ev = solve_model_two(grid, loads, base, demand, ptdf,
                                  loaded.config.voltage_threshold_kv,
                                  loaded.config.solve_options());

  std::vector<HourlyProfile> after(grid.generators.size());
  for (size_t j = 0; j < grid.generators.size(); ++j)
    for (int t = 0; t < kHoursPerDay; ++t)
      after[j][t] = base.p_star[j][t] + ev.delta_p[j][t];

  ReportInputs inputs;
  inputs.grid = &grid;
  inputs.generation_series = series_of(generator_ids(grid), after);
  inputs.flow_series = series_of(line_ids(grid), ev.flows);
  std::vector<std::string> station_ids;
  for (const auto& st : ev.stations) station_ids.push_back(st.id);
  inputs.charging_series = series_of(station_ids, ev.charging);
  inputs.summary["month"] = std::to_string(month);
  inputs.summary["penetration"] = format_compact(penetration);
  inputs.summary["relaxed"] = relaxed ? "true" : "false";
  inputs.summary["e_ev_t"] = format_compact(ev.e_ev_t);
  inputs.summary["emissions_total_t"] = format_compact(ev.emissions_total_t);
  inputs.summary["base_cost_total"] = format_compact(base.cost_total);
  inputs.summary["max_row_violation"] = format_compact(ev.feasible_slack.max_row_violation);
  inputs.metadata = config_echo(loaded.config);
  emit_report(inputs, "csv", out_dir);
  std::cout << "ev-dispatch month " << month << " penetration " << format_compact(penetration)
            << (relaxed ? " (relaxed)" : "") << ": e_EV " << format_compact(ev.e_ev_t) << " t\n";
  return kExitOk;
}

int cmd_upgrade(const std::string& bundle, double e_ev_max, bool per_day_envelope,
                const std::string& day_text, double penetration, const fs::path& out_dir,
                const std::optional<double>& tau, const std::optional<double>& threshold) {
  LoadedBundle loaded = load_bundle(bundle, tau, threshold);
  const GridCase& grid = loaded.grid;
  PtdfSet ptdf = compute_case_ptdf(grid);
  DaySet day_set = parse_day_set(day_text);
  auto days = build_days(grid, loaded.curves, day_set);
  EvDemand demand = demand_for(grid, loaded.config.fleet, penetration);

  std::vector<HourlyLoads> day_loads;
  std::vector<BaseDispatch> bases;
  for (const auto& day : days) {
    day_loads.push_back(day.loads);
    bases.push_back(solve_model_one(grid, day.loads, ptdf, loaded.config.solve_options()));
  }

  UpgradePlan plan;
  if (per_day_envelope) {
    std::vector<UpgradePlan> plans;
    for (size_t d = 0; d < days.size(); ++d)
      plans.push_back(solve_model_three(grid, {day_loads[d]}, {bases[d]}, demand, e_ev_max,
                                        ptdf, loaded.config.voltage_threshold_kv,
                                        loaded.config.solve_options()));
    plan = upgrade_envelope(grid, plans);
  } else {
    plan = solve_model_three(grid, day_loads, bases, demand, e_ev_max, ptdf,
                             loaded.config.voltage_threshold_kv, loaded.config.solve_options());
  }

  ReportInputs inputs;
  inputs.grid = &grid;
  inputs.upgrade = &plan;
  inputs.summary["e_ev_max_t"] = format_compact(e_ev_max);
  inputs.summary["objective_mw_mile"] = format_compact(plan.objective_mw_mile);
  inputs.summary["achieved_e_ev_t"] = format_compact(plan.achieved_e_ev_t);
  inputs.summary["upgraded_lines"] = std::to_string(plan.binding_lines.size());
  inputs.summary["mode"] = per_day_envelope ? "per_day_envelope" : "joint";
  inputs.metadata = config_echo(loaded.config);
  for (const auto& flag : plan.deviation_flags) inputs.metadata["flag_" + flag] = "true";
  emit_report(inputs, "csv", out_dir);
  std::cout << "upgrade: " << format_compact(plan.objective_mw_mile) << " MW*mile over "
            << plan.binding_lines.size() << " line(s)\n";
  return kExitOk;
}

int cmd_sweep(const std::string& bundle, const std::string& spec_path, const fs::path& out_dir,
              const std::optional<double>& tau, const std::optional<double>& threshold) {
  LoadedBundle loaded = load_bundle(bundle, tau, threshold);
  ScenarioSpec spec = parse_sweep_spec(spec_path);
  spec.voltage_threshold_kv = loaded.config.voltage_threshold_kv;
  SweepOutput output = run_sweep(spec, loaded.grid, loaded.curves, loaded.config.fleet);

  ReportInputs inputs;
  inputs.grid = &loaded.grid;
  inputs.sweep = &output;
  inputs.summary["rows"] = std::to_string(output.rows.size());
  inputs.metadata = config_echo(loaded.config);
  emit_report(inputs, "csv", out_dir);
  std::cout << "sweep: " << output.rows.size() << " rows -> "
            << (out_dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& template_name, int buses, std::uint64_t seed,
              const fs::path& out_dir) {
  LoadedBundle bundle = synth_case(synth_template_from_string(template_name), buses, seed);
  write_case_bundle(bundle, out_dir);
  std::cout << "synth " << template_name << ": " << bundle.grid.buses.size() << " buses, "
            << bundle.grid.lines.size() << " lines -> " << out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridcarbon: DC power flow emissions planning toolkit"};
  app.require_subcommand(1);
  std::string out_dir = "out";
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  std::optional<double> tau_override, threshold_override;
  app.add_option("--tau", tau_override, "Override the transmission loss rate");
  app.add_option("--voltage-threshold", threshold_override,
                 "Override the charging/upgrade voltage threshold, kV");

  auto* validate = app.add_subcommand("validate", "Parse and validate a case bundle");
  std::string validate_bundle;
  validate->add_option("bundle", validate_bundle, "Case bundle directory")->required();

  auto* ptdf = app.add_subcommand("ptdf", "Build PTDF matrices");
  std::string ptdf_bundle;
  bool ptdf_dump = false;
  ptdf->add_option("bundle", ptdf_bundle)->required();
  ptdf->add_flag("--dump", ptdf_dump, "Write the full PTDF table");

  auto* dispatch = app.add_subcommand("dispatch", "Economic dispatch for one month");
  std::string dispatch_bundle;
  int dispatch_month = 1;
  dispatch->add_option("bundle", dispatch_bundle)->required();
  dispatch->add_option("--month", dispatch_month, "Representative month 1..12")
      ->capture_default_str();

  auto* ev = app.add_subcommand("ev-dispatch", "Emissions-minimal EV re-dispatch/charge");
  std::string ev_bundle;
  double ev_penetration = 1.0;
  bool ev_relaxed = false;
  int ev_month = 1;
  ev->add_option("bundle", ev_bundle)->required();
  ev->add_option("--penetration", ev_penetration, "EV fraction in [0,1]")->required();
  ev->add_flag("--relaxed", ev_relaxed, "Drop line limits (adequate-capacity run)");
  ev->add_option("--month", ev_month)->capture_default_str();

  auto* upgrade = app.add_subcommand("upgrade", "Minimum MW*mile line upgrade plan");
  std::string upgrade_bundle, upgrade_days = "seasons";
  double upgrade_emax = 0.0, upgrade_penetration = 1.0;
  bool per_day_envelope = false;
  upgrade->add_option("bundle", upgrade_bundle)->required();
  upgrade->add_option("--emax", upgrade_emax, "EV emission cap per day, tonnes")->required();
  upgrade->add_flag("--per-day-envelope", per_day_envelope,
                    "Solve each day separately, then take the per-line max");
  upgrade->add_option("--days", upgrade_days, "seasons | all | comma list of months")
      ->capture_default_str();
  upgrade->add_option("--penetration", upgrade_penetration)->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Penetration x renewable-level scenario sweep");
  std::string sweep_bundle, sweep_spec;
  sweep->add_option("bundle", sweep_bundle)->required();
  sweep->add_option("--spec", sweep_spec, "Sweep spec file")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic case bundle");
  std::string synth_template = "ring";
  int synth_buses = 3;
  std::uint64_t synth_seed = 1;
  synth->add_option("--template", synth_template, "ring | star | two-area")
      ->capture_default_str();
  synth->add_option("--buses", synth_buses)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(validate_bundle, tau_override, threshold_override);
    if (ptdf->parsed())
      return cmd_ptdf(ptdf_bundle, ptdf_dump, out_dir, tau_override, threshold_override);
    if (dispatch->parsed())
      return cmd_dispatch(dispatch_bundle, dispatch_month, out_dir, tau_override,
                          threshold_override);
    if (ev->parsed())
      return cmd_ev_dispatch(ev_bundle, ev_penetration, ev_relaxed, ev_month, out_dir,
                             tau_override, threshold_override);
    if (upgrade->parsed())
      return cmd_upgrade(upgrade_bundle, upgrade_emax, per_day_envelope, upgrade_days,
                         upgrade_penetration, out_dir, tau_override, threshold_override);
    if (sweep->parsed())
      return cmd_sweep(sweep_bundle, sweep_spec, out_dir, tau_override, threshold_override);
    if (synth->parsed()) return cmd_synth(synth_template, synth_buses, synth_seed, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_infeasible_model(e.code()) ? kExitInfeasible : kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
