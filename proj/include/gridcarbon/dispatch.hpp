#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridcarbon/fleet.hpp"
#include "gridcarbon/grid.hpp"
#include "gridcarbon/lp.hpp"
#include "gridcarbon/ptdf.hpp"

namespace gridcarbon {

/// Per-load 24-hour demand in MW, aligned with GridCase::loads.
using HourlyLoads = std::vector<HourlyProfile>;

/// County fips -> E_c, the EV energy requirement per operational cycle (MWh).
using EvDemand = std::map<std::string, double>;

/// Conversion from (t/GWh) * (MWh) to tonnes.
inline constexpr double kTonnesPerUnit = 1e-3;

/// Flags recording where the implementation intentionally departs from the
/// printed upgrade-model constraints to keep the three models dimensionally
/// consistent with each other. Surfaced in report metadata.
extern const std::vector<std::string> kModelDeviationFlags;

/// Charging station: one eligible bus of one county.
struct Station {
  int county = -1;  // index into GridCase::counties
  int bus = -1;     // case bus index
  std::string id;   // "<fips>:<bus_id>"
};

std::vector<Station> build_stations(const GridCase& grid, const EvDemand& demand,
                                    double voltage_threshold_kv = 200.0);

struct BaseDispatch {
  std::vector<HourlyProfile> p_star;  // per generator, MW
  std::vector<HourlyProfile> flows;   // per line, MW (PTDF reconstruction)
  double cost_total = 0.0;
  double emissions_total_t = 0.0;
  double max_residual = 0.0;
  int lp_iterations = 0;
};

struct EvDispatch {
  std::vector<Station> stations;
  std::vector<HourlyProfile> delta_p;   // per generator, MW, >= 0
  std::vector<HourlyProfile> charging;  // per station, MW, >= 0
  std::vector<HourlyProfile> flows;     // per line, MW, after re-dispatch
  double e_ev_t = 0.0;                  // emissions attributable to EV charging
  double emissions_total_t = 0.0;       // base + EV
  ResidualReport feasible_slack;
  int lp_iterations = 0;
};

struct UpgradePlan {
  std::vector<double> delta_f_mw;     // per line, 0 for non-upgradable lines
  double objective_mw_mile = 0.0;     // sum of delta_F * length
  double achieved_e_ev_t = 0.0;       // worst day after the upgrade
  std::vector<int> binding_lines;     // lines with delta_F > 0
  std::vector<std::string> deviation_flags;
};

/// Model builders return the LP plus the index maps needed to read solutions
/// back out. Variable and row layouts are deterministic.
struct ModelOne {
  LinearProgram lp;
  int num_generators = 0;
  int var(int gen, int hour) const { return gen * kHoursPerDay + hour; }
};

struct ModelTwo {
  LinearProgram lp;
  std::vector<Station> stations;
  int num_generators = 0;
  double base_emissions_t = 0.0;
  int delta_var(int gen, int hour) const { return gen * kHoursPerDay + hour; }
  int charge_var(int station, int hour) const {
    return (num_generators + station) * kHoursPerDay + hour;
  }
};

struct ModelThree {
  LinearProgram lp;
  std::vector<Station> stations;
  std::vector<int> upgradable_lines;  // case line indices with a delta_F variable
  int num_generators = 0;
  int num_days = 0;
  int delta_f_var(int upgradable_index) const { return upgradable_index; }
  int ops_offset(int day) const;
  int delta_var(int day, int gen, int hour) const;
  int charge_var(int day, int station, int hour) const;
};

/// Model I, Eqs.-style economic dispatch: cost-minimal generation meeting the
/// hourly balance per island with (1-tau) on generation, PTDF flow limits,
/// capability bounds and cyclic ramp constraints.
ModelOne build_model_one(const GridCase& grid, const HourlyLoads& loads, const PtdfSet& ptdf);

BaseDispatch solve_model_one(const GridCase& grid, const HourlyLoads& loads, const PtdfSet& ptdf,
                             const SolveOptions& options = {});

/// Model II: emissions-minimal nonnegative re-dispatch plus EV charging that
/// delivers each county's E_c within the same network limits.
ModelTwo build_model_two(const GridCase& grid, const HourlyLoads& loads,
                         const BaseDispatch& base, const EvDemand& demand, const PtdfSet& ptdf,
                         double voltage_threshold_kv = 200.0);

EvDispatch solve_model_two(const GridCase& grid, const HourlyLoads& loads,
                           const BaseDispatch& base, const EvDemand& demand, const PtdfSet& ptdf,
                           double voltage_threshold_kv = 200.0, const SolveOptions& options = {});

/// Emissions attributable to EV integration: total after re-dispatch minus the
/// base total. With linear rates this equals sum rho_j * delta_p_j(t) * dt.
double ev_emissions(const GridCase& grid, const BaseDispatch& base, const EvDispatch& ev);

/// Copy of the case with every line capacity set to the +inf sentinel, making
/// flow rows non-binding (they are omitted from the LPs).
GridCase relax_network(const GridCase& grid);

/// Model III: minimum MW*mile capacity additions on upgradable lines (voltage
/// strictly above the threshold) so that per-day EV emissions stay within
/// e_ev_max. Days share the delta_F variables.
ModelThree build_model_three(const GridCase& grid, const std::vector<HourlyLoads>& days,
                             const std::vector<BaseDispatch>& bases, const EvDemand& demand,
                             double e_ev_max_t, const PtdfSet& ptdf,
                             double voltage_threshold_kv = 200.0);

UpgradePlan solve_model_three(const GridCase& grid, const std::vector<HourlyLoads>& days,
                              const std::vector<BaseDispatch>& bases, const EvDemand& demand,
                              double e_ev_max_t, const PtdfSet& ptdf,
                              double voltage_threshold_kv = 200.0,
                              const SolveOptions& options = {});

/// Elementwise max of per-day plans; objective recomputed, achieved emissions
/// reported as the worst input day.
UpgradePlan upgrade_envelope(const GridCase& grid, const std::vector<UpgradePlan>& plans);

/// Applies a plan to a case: capacity_mw += delta_F per line.
GridCase apply_upgrade(const GridCase& grid, const UpgradePlan& plan);

}  // namespace gridcarbon
