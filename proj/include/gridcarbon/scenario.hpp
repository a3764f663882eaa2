#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridcarbon/dispatch.hpp"
#include "gridcarbon/fleet.hpp"

namespace gridcarbon {

inline constexpr std::array<int, 12> kDaysInMonth = {31, 28, 31, 30, 31, 30,
                                                     31, 31, 30, 31, 30, 31};
inline constexpr int kHoursPerYear = 8760;

/// Seasons: winter {Dec,Jan,Feb}, spring {Mar,Apr,May}, summer {Jun,Jul,Aug},
/// fall {Sep,Oct,Nov}; weights are calendar days of a non-leap year.
inline constexpr std::array<double, 4> kDaysInSeason = {90.0, 92.0, 92.0, 91.0};
extern const std::array<std::array<int, 3>, 4> kSeasonMonths;

struct RepresentativeDay {
  std::string region;
  int month = 1;  // 1..12
  HourlyProfile curve{};
};

/// Region -> 12 monthly 24-hour curves, normalized by the annual regional peak.
using RegionalCurves = std::map<std::string, std::array<HourlyProfile, 12>>;

/// Month-average hourly curves from one full year (8760 values) of history per
/// region, each normalized by that region's annual peak.
RegionalCurves representative_days(
    const std::map<std::string, std::vector<double>>& hourly_history);

/// Per-load 24-hour MW for one month: peak_mw * curve(region, hour).
HourlyLoads scale_bus_loads(const GridCase& grid, const RegionalCurves& curves, int month);

/// Season curves composed as the mean of the member months' curves.
std::map<std::string, std::array<HourlyProfile, 4>> season_curves(const RegionalCurves& curves);

struct DaySet {
  enum class Kind { Months, Seasons };
  Kind kind = Kind::Months;
  std::vector<int> months = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};  // when Months
};

struct WeightedDay {
  std::string label;
  double weight_days = 0.0;  // annualization weight in days/year
  HourlyLoads loads;
};

std::vector<WeightedDay> build_days(const GridCase& grid, const RegionalCurves& curves,
                                    const DaySet& days);

/// Installed capacity split used by the renewable integration level.
struct CapacityMix {
  double variable_renewable_mw = 0.0;  // solar + wind
  double hydro_mw = 0.0;
  double nonrenewable_mw = 0.0;
  double total() const { return variable_renewable_mw + hydro_mw + nonrenewable_mw; }
  double level() const {
    double t = total();
    return t > 0.0 ? (variable_renewable_mw + hydro_mw) / t : 0.0;
  }
};

CapacityMix capacity_mix(const GridCase& grid);
CapacityMix capacity_mix(const GridCase& grid, const std::vector<int>& island_buses);

/// Scale factor s for solar+wind capacity such that the renewable level hits
/// `target`: s = (target*(H+NR) - H) / ((1-target)*(S+W)).
double renewable_scale_factor(const CapacityMix& mix, double target_level);
double renewable_scale_factor(const GridCase& grid, double target_level);

/// Multiplies solar and wind capacity by s everywhere; profiles unchanged.
GridCase apply_renewable_scaling(const GridCase& grid, double s);

/// Per-island variant: each island gets its own s to hit the same target.
GridCase scale_to_renewable_level(const GridCase& grid, double target_level);

/// Sum over months of days_in_month * daily_value (non-leap calendar).
double annualize_monthly(const std::array<double, 12>& daily);

/// Daily congestion-induced emissions for one load set: constrained Model II
/// optimum minus the relaxed-network optimum, clamped at zero within -1e-6.
double congestion_induced(const GridCase& grid, const HourlyLoads& loads,
                          const EvDemand& demand, double voltage_threshold_kv = 200.0);

struct AnnualResult {
  double e_ev_t = 0.0;
  double e_icv_t = 0.0;
  double e_v_t = 0.0;
  double congestion_induced_t = 0.0;
};

struct SweepRow {
  double penetration = 0.0;
  double renewable_level = 0.0;  // measured level actually applied
  std::string mode;              // "constrained" | "relaxed"
  AnnualResult result;
  std::string status;  // "optimal" or an error code
};

struct ScenarioSpec {
  std::vector<double> penetrations = {0.0};
  /// Empty means "keep the current mix" (single point at the measured level).
  std::vector<double> renewable_levels;
  bool include_constrained = true;
  bool include_relaxed = true;
  DaySet days;
  int growth_years = 0;
  double load_growth_rate = 0.0055;
  double fuel_growth_rate = 0.0058;
  double voltage_threshold_kv = 200.0;

  void validate() const;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  std::map<std::string, std::string> metadata;
};

/// Cartesian product of penetration x renewable level x mode, each cell run
/// through Models I/II over the day set and annualized. Per-cell errors are
/// recorded in the row status; the sweep continues.
SweepOutput run_sweep(const ScenarioSpec& spec, const GridCase& grid,
                      const RegionalCurves& curves, const FleetAssumptions& fleet);

}  // namespace gridcarbon
