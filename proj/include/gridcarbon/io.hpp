#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridcarbon/dispatch.hpp"
#include "gridcarbon/scenario.hpp"

namespace gridcarbon {

inline constexpr const char* kVersion = "0.1.0";

/// Wind generation characteristic. The default is the literal cubic curve
/// reaching 1.0 only at cut-off; set `rated_mps` for the conventional plateau
/// variant (1.0 from rated speed up to cut-off).
struct WindCurve {
  double cut_in_mps = 3.0;
  double cut_off_mps = 15.0;
  std::optional<double> rated_mps;
};

double wind_to_per_unit(double speed_mps, const WindCurve& curve = {});

struct RunConfig {
  std::vector<std::string> slack_buses;
  double tau = 0.05911;
  FleetAssumptions fleet;
  std::vector<double> renewable_targets;
  bool relaxed = false;
  double voltage_threshold_kv = 200.0;
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-7;
  std::string out_dir = "out";
  std::uint64_t seed = 1;  // synthetic generation only
  int growth_years = 0;
  double load_growth_rate = 0.0055;
  double fuel_growth_rate = 0.0058;

  SolveOptions solve_options() const {
    SolveOptions opt;
    opt.feasibility_tol = feasibility_tol;
    opt.optimality_tol = optimality_tol;
    return opt;
  }
};

/// Flat key=value config text; '#' starts a comment. Unknown keys are parse
/// errors. Environment variables (GRIDCARBON_<KEY>) override file values;
/// CLI flags override both.
RunConfig parse_config_text(const std::string& text, const std::string& origin);
void apply_env_overrides(RunConfig& config);

/// File names that make up a case bundle directory.
struct CaseBundle {
  std::filesystem::path dir;
  std::filesystem::path buses() const { return dir / "buses.csv"; }
  std::filesystem::path lines() const { return dir / "lines.csv"; }
  std::filesystem::path generators() const { return dir / "generators.csv"; }
  std::filesystem::path gen_profiles() const { return dir / "gen_profiles.csv"; }
  std::filesystem::path loads() const { return dir / "loads.csv"; }
  std::filesystem::path regional_curves() const { return dir / "regional_curves.csv"; }
  std::filesystem::path counties() const { return dir / "counties.csv"; }
  std::filesystem::path state_fuel() const { return dir / "state_fuel.csv"; }
  std::filesystem::path config() const { return dir / "config.txt"; }
};

struct LoadedBundle {
  GridCase grid;
  RegionalCurves curves;
  RunConfig config;
};

/// Parses and cross-checks a bundle directory into a validated GridCase.
/// County fuel totals come from state_fuel.csv allocated by population.
LoadedBundle load_case(const std::filesystem::path& bundle_dir);

enum class SynthTemplate { Ring, Star, TwoArea };
SynthTemplate synth_template_from_string(const std::string& s);

/// Deterministic synthetic study systems. ring(3, seed=1) is the canonical
/// three-bus equal-reactance fixture; two-area is the congestion testbed with
/// a single tie line.
LoadedBundle synth_case(SynthTemplate templ, int buses, std::uint64_t seed);

void write_case_bundle(const LoadedBundle& bundle, const std::filesystem::path& dir);

/// Everything a run may want persisted. Only present pieces are written.
struct ReportInputs {
  const SweepOutput* sweep = nullptr;
  const UpgradePlan* upgrade = nullptr;
  const GridCase* grid = nullptr;  // required with `upgrade` and for PTDF dumps
  const PtdfSet* ptdf = nullptr;
  std::vector<std::pair<std::string, HourlyProfile>> generation_series;
  std::vector<std::pair<std::string, HourlyProfile>> charging_series;
  std::vector<std::pair<std::string, HourlyProfile>> flow_series;
  std::map<std::string, std::string> summary;
  std::map<std::string, std::string> metadata;
};

/// Writes the report files (CSV tables plus a JSON summary) atomically into
/// out_dir and returns the paths. Byte-deterministic for identical inputs.
std::vector<std::filesystem::path> emit_report(const ReportInputs& inputs,
                                               const std::string& format,
                                               const std::filesystem::path& out_dir);

std::string format_full(double value);     // round-trip exact (%.17g)
std::string format_compact(double value);  // report precision (%.10g)

}  // namespace gridcarbon
