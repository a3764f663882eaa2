#include <cmath>

#include "doctest.h"
#include "gridcarbon/fleet.hpp"
#include "support/rng.hpp"

using namespace gridcarbon;

namespace {
County county(const std::string& fips, double pop, double gallons = 0.0) {
  return {fips, "ST", pop, gallons};
}
}  // namespace

TEST_CASE("state fuel allocation is proportional and conservative") {
  SUBCASE("equal populations split evenly") {
    std::vector<County> cs = {county("a", 1.0), county("b", 1.0)};
    auto shares = allocate_state_fuel(100.0, cs);
    CHECK(shares[0] == doctest::Approx(50.0));
    CHECK(shares[1] == doctest::Approx(50.0));
  }
  SUBCASE("2:1 populations split 60/30") {
    std::vector<County> cs = {county("a", 2.0), county("b", 1.0)};
    auto shares = allocate_state_fuel(90.0, cs);
    CHECK(shares[0] == doctest::Approx(60.0));
    CHECK(shares[1] == doctest::Approx(30.0));
  }
  SUBCASE("remainder correction makes the sum exact") {
    std::vector<County> cs = {county("a", 1.0), county("b", 1.0), county("c", 1.0)};
    auto shares = allocate_state_fuel(100.0, cs);
    CHECK(shares[0] + shares[1] + shares[2] == 100.0);  // exact, not approximate
  }
  SUBCASE("conservation holds for random inputs") {
    testsupport::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<County> cs;
      int n = rng.range(1, 12);
      for (int i = 0; i < n; ++i)
        cs.push_back(county("c" + std::to_string(i), rng.uniform(1.0, 1e6)));
      double total = rng.uniform(0.0, 1e9);
      auto shares = allocate_state_fuel(total, cs);
      double sum = 0.0;
      for (size_t i = 0; i + 1 < shares.size(); ++i) sum += shares[i];
      CHECK(shares.back() == total - sum);  // last county absorbs the remainder
    }
  }
  SUBCASE("empty state is an error") {
    std::vector<County> none;
    CHECK_THROWS_AS(allocate_state_fuel(1.0, none), Error);
  }
}

TEST_CASE("county EV demand arithmetic") {
  FleetAssumptions fleet;
  SUBCASE("one thousand gallons per day at full electrification") {
    fleet.penetration = 1.0;
    CountyDemand d = county_ev_demand("c", 365000.0, fleet);
    CHECK(d.e_c_daily_mwh == doctest::Approx(8.9));  // 1000 gal/day * 8.9 kWh
    CHECK(d.icv_gallons_daily == doctest::Approx(0.0));
  }
  SUBCASE("zero penetration leaves everything on fuel") {
    fleet.penetration = 0.0;
    CountyDemand d = county_ev_demand("c", 365000.0, fleet);
    CHECK(d.e_c_daily_mwh == doctest::Approx(0.0));
    CHECK(d.icv_gallons_daily == doctest::Approx(1000.0));
  }
  SUBCASE("half penetration of twice the fuel") {
    fleet.penetration = 0.5;
    CountyDemand d = county_ev_demand("c", 730000.0, fleet);
    CHECK(d.e_c_daily_mwh == doctest::Approx(8.9));
    CHECK(d.icv_gallons_daily == doctest::Approx(1000.0));
  }
}

TEST_CASE("penetration trade-off is monotone") {
  FleetAssumptions fleet;
  double prev_ev = -1.0, prev_icv = 1e30;
  for (double pen : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    fleet.penetration = pen;
    CountyDemand d = county_ev_demand("c", 500000.0, fleet);
    CHECK(d.e_c_daily_mwh > prev_ev);
    CHECK(d.icv_gallons_daily < prev_icv);
    prev_ev = d.e_c_daily_mwh;
    prev_icv = d.icv_gallons_daily;
  }
}

TEST_CASE("ICV emissions unit conversion") {
  CHECK(icv_emissions_annual_t(1000.0) == doctest::Approx(8.9));  // 8900 kg = 8.9 t
  CHECK(icv_emissions_annual_t(0.0) == doctest::Approx(0.0));
  // national-scale figure: 194e9 gallons is about 1.727e9 t
  CHECK(icv_emissions_annual_t(194e9) == doctest::Approx(1.7266e9).epsilon(1e-3));
}

TEST_CASE("operational emissions add EV and ICV parts") {
  CHECK(vehicle_operational_emissions_t(0.0, 100.0) == doctest::Approx(100.0));
  CHECK(vehicle_operational_emissions_t(5.0, 0.0) == doctest::Approx(5.0));
  CHECK(vehicle_operational_emissions_t(5.0, 100.0) == doctest::Approx(105.0));
}

TEST_CASE("growth projection") {
  CHECK(project_growth(100.0, 0.0055, 0) == doctest::Approx(100.0));
  CHECK(project_growth(100.0, 0.0, 7) == doctest::Approx(100.0));
  CHECK(project_growth(100.0, 0.0058, 7) == doctest::Approx(100.0 * std::pow(1.0058, 7)));
}

TEST_CASE("fleet assumptions validation") {
  FleetAssumptions fleet;
  CHECK(fleet.validate().ok());
  CHECK(fleet.validate().warnings.empty());  // 8.9 kWh is within 2% of 33.7 * 26.0/98.2

  SUBCASE("penetration outside [0,1]") {
    fleet.penetration = 1.5;
    CHECK_FALSE(fleet.validate().ok());
  }
  SUBCASE("inconsistent kwh per gallon warns but does not fail") {
    fleet.kwh_per_gallon_ev = 12.0;
    ValidationReport report = fleet.validate();
    CHECK(report.ok());
    CHECK_FALSE(report.warnings.empty());
  }
}
