#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "gridcarbon/errors.hpp"

namespace gridcarbon {

inline constexpr int kHoursPerDay = 24;

/// Source category of a generation unit. Used only for reporting and for
/// selecting which units participate in renewable-capacity scaling; cost and
/// emission coefficients always come from the per-unit fields.
enum class Fuel { Coal, Gas, Nuclear, Hydro, Solar, Wind, Other };

Fuel fuel_from_string(const std::string& s);
const char* to_string(Fuel fuel);

/// True for the variable renewables (solar, wind) that scenario scaling acts on.
bool is_variable_renewable(Fuel fuel);
/// True for the sources counted toward the renewable integration level
/// (solar, wind, hydro).
bool counts_as_renewable(Fuel fuel);

struct Bus {
  std::string id;
  double voltage_kv = 0.0;
  std::string county;  // county FIPS, may be empty for buses without one
  std::string region;  // load-region identifier
};

struct Line {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  double reactance_pu = 0.0;
  double capacity_mw = 0.0;  // +inf marks a relaxed (non-binding) line
  double length_mi = 0.0;
  double voltage_kv = 0.0;
};

using HourlyProfile = std::array<double, kHoursPerDay>;

HourlyProfile flat_profile(double value = 1.0);

struct GenerationUnit {
  std::string id;
  std::string bus;
  Fuel fuel = Fuel::Other;
  double capacity_mw = 0.0;
  double cost_per_mwh = 0.0;
  double emission_t_per_gwh = 0.0;
  double ramp_up_mw_per_h = 0.0;
  double ramp_down_mw_per_h = 0.0;
  /// Per-unit availability per hour, in [0,1]. All-ones for dispatchable units.
  HourlyProfile capability_profile = flat_profile();

  double max_power_mw(int hour) const { return capacity_mw * capability_profile[hour]; }
};

struct LoadPoint {
  std::string id;
  std::string bus;
  double peak_mw = 0.0;
  std::string region;
};

struct County {
  std::string fips;
  std::string state;
  double population = 0.0;
  double annual_gallons = 0.0;  // motor fuel per year allocated to this county
};

struct TimeGrid {
  int steps = kHoursPerDay;  // hour indices 1..24
  double dt_h = 1.0;
};

/// One study system: topology, fleet, loads, counties and time structure.
/// Immutable after construction; all operations on it are pure functions.
struct GridCase {
  std::string name;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<GenerationUnit> generators;
  std::vector<LoadPoint> loads;
  std::vector<County> counties;
  TimeGrid time_grid;
  double loss_rate = 0.05911;  // tau
  /// Configured slack buses, one per island. Explicit configuration, never
  /// inferred: PTDF values depend on the choice and outputs record it.
  std::vector<std::string> slack_buses;

  int bus_index(const std::string& id) const;     // -1 if unknown
  int county_index(const std::string& fips) const;
};

struct Violation {
  std::string entity;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks every structural invariant of the case and lists each violation
/// with the offending entity id. Empty report iff the case is well-formed.
ValidationReport validate_case(const GridCase& grid);

/// Partition of bus indices into connected components. Components are ordered
/// by their smallest bus index and each component is sorted.
std::vector<std::vector<int>> islands(const GridCase& grid);

/// Buses of `county` eligible to host EV charging stations: strictly below
/// the voltage threshold. Throws CountyHasNoEligibleBus when the county has
/// fuel demand but no eligible bus.
std::vector<int> charging_sites(const GridCase& grid, const County& county,
                                double voltage_threshold_kv = 200.0);

/// Resolves the configured slack bus of each island; island k of `islands()`
/// maps to result[k] (a bus index). Fails if any island does not have exactly
/// one configured slack bus.
std::vector<int> slack_by_island(const GridCase& grid,
                                 const std::vector<std::vector<int>>& comps);

}  // namespace gridcarbon
