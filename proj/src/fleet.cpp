#include "gridcarbon/fleet.hpp"

#include <cmath>

namespace gridcarbon {

namespace {
// EPA gasoline energy equivalence used by the MPGe definition.
constexpr double kKwhPerGallonGasoline = 33.7;
constexpr double kDaysPerYear = 365.0;
}  // namespace

ValidationReport FleetAssumptions::validate() const {
  ValidationReport report;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      report.violations.push_back({std::string("fleet.") + name, "must be > 0"});
  };
  positive(icv_mpge, "icv_mpge");
  positive(ev_mpge, "ev_mpge");
  positive(kwh_per_gallon_ev, "kwh_per_gallon_ev");
  positive(kg_co2_per_gallon, "kg_co2_per_gallon");
  if (!(penetration >= 0.0 && penetration <= 1.0))
    report.violations.push_back({"fleet.penetration", "must be in [0,1]"});
  if (report.ok()) {
    double implied = kKwhPerGallonGasoline * icv_mpge / ev_mpge;
    if (std::abs(kwh_per_gallon_ev - implied) > 0.02 * implied)
      report.warnings.push_back("kwh_per_gallon_ev " + std::to_string(kwh_per_gallon_ev) +
                                " deviates more than 2% from the MPGe-implied value " +
                                std::to_string(implied));
  }
  return report;
}

std::vector<double> allocate_state_fuel(double state_gallons,
                                        std::span<const County> counties) {
  if (counties.empty()) fail(ErrorCode::EmptyState, "state has no counties");
  double total_population = 0.0;
  for (const auto& c : counties) total_population += c.population;
  if (!(total_population > 0.0))
    fail(ErrorCode::EmptyState, "state population must be > 0");

  std::vector<double> shares(counties.size(), 0.0);
  double assigned = 0.0;
  for (size_t i = 0; i + 1 < counties.size(); ++i) {
    shares[i] = state_gallons * counties[i].population / total_population;
    assigned += shares[i];
  }
  shares.back() = state_gallons - assigned;  // conservation, exactly
  return shares;
}

CountyDemand county_ev_demand(const std::string& fips, double county_gallons_annual,
                              const FleetAssumptions& assumptions) {
  double daily_gallons = county_gallons_annual / kDaysPerYear;
  CountyDemand demand;
  demand.fips = fips;
  demand.e_c_daily_mwh =
      daily_gallons * assumptions.penetration * assumptions.kwh_per_gallon_ev / 1000.0;
  demand.icv_gallons_daily = daily_gallons * (1.0 - assumptions.penetration);
  return demand;
}

std::vector<CountyDemand> county_ev_demands(const GridCase& grid,
                                            const FleetAssumptions& assumptions) {
  std::vector<CountyDemand> demands;
  demands.reserve(grid.counties.size());
  for (const auto& county : grid.counties)
    demands.push_back(county_ev_demand(county.fips, county.annual_gallons, assumptions));
  return demands;
}

double icv_emissions_annual_t(double gallons_annual, double kg_co2_per_gallon) {
  return gallons_annual * kg_co2_per_gallon / 1000.0;
}

double icv_emissions_annual_t(std::span<const County> counties, double kg_co2_per_gallon) {
  double total = 0.0;
  for (const auto& c : counties) total += c.annual_gallons;
  return icv_emissions_annual_t(total, kg_co2_per_gallon);
}

double vehicle_operational_emissions_t(double e_ev_t, double e_icv_t) {
  return e_ev_t + e_icv_t;
}

double project_growth(double value, double annual_rate, int years) {
  if (annual_rate < -1.0)
    fail(ErrorCode::MalformedProblem, "growth rate below -100%");
  return value * std::pow(1.0 + annual_rate, years);
}

}  // namespace gridcarbon
