#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridcarbon/grid.hpp"

namespace gridcarbon {

/// Vehicle-fleet efficiency and emissions assumptions.
struct FleetAssumptions {
  double icv_mpge = 26.0;
  double ev_mpge = 98.2;
  double kwh_per_gallon_ev = 8.9;   // electricity demand replacing one gallon
  double kg_co2_per_gallon = 8.9;   // ICV tailpipe emissions per gallon
  double penetration = 0.0;         // fraction of fuel demand electrified

  /// Violations are hard errors; the MPGe-consistency check is advisory only
  /// and lands in warnings.
  ValidationReport validate() const;
};

/// County-level EV electricity demand and residual ICV fuel use for one
/// operational cycle (day).
struct CountyDemand {
  std::string fips;
  double e_c_daily_mwh = 0.0;
  double icv_gallons_daily = 0.0;
};

/// Splits a state fuel total across its counties in proportion to population.
/// The final county absorbs the remainder so shares sum to the state total
/// exactly.
std::vector<double> allocate_state_fuel(double state_gallons,
                                        std::span<const County> counties);

CountyDemand county_ev_demand(const std::string& fips, double county_gallons_annual,
                              const FleetAssumptions& assumptions);

std::vector<CountyDemand> county_ev_demands(const GridCase& grid,
                                            const FleetAssumptions& assumptions);

/// Tailpipe CO2 of the given annual gallons, in tonnes.
double icv_emissions_annual_t(double gallons_annual, double kg_co2_per_gallon = 8.9);

/// Tailpipe CO2 of all counties' annual fuel use, in tonnes.
double icv_emissions_annual_t(std::span<const County> counties,
                              double kg_co2_per_gallon = 8.9);

/// e_V = e_EV + e_ICV.
double vehicle_operational_emissions_t(double e_ev_t, double e_icv_t);

/// Compound growth: value * (1 + rate)^years.
double project_growth(double value, double annual_rate, int years);

}  // namespace gridcarbon
