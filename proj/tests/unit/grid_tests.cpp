#include "doctest.h"
#include "gridcarbon/grid.hpp"
#include "support/fixtures.hpp"

using namespace gridcarbon;
using testsupport::two_bus_case;

TEST_CASE("well-formed two-bus case validates cleanly") {
  GridCase grid = two_bus_case(30.0);
  ValidationReport report = validate_case(grid);
  CHECK(report.ok());
  CHECK(report.violations.empty());
  // idempotent and side-effect free
  ValidationReport again = validate_case(grid);
  CHECK(again.ok());
}

TEST_CASE("line referencing a missing bus is reported with both ids") {
  GridCase grid = two_bus_case(30.0);
  grid.lines.push_back({"l99", "b1", "99", 0.5, 10.0, 1.0, 138.0});
  ValidationReport report = validate_case(grid);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations)
    if (v.entity.find("l99") != std::string::npos && v.message.find("99") != std::string::npos)
      found = true;
  CHECK(found);
}

TEST_CASE("loss rate outside [0,1) is a violation") {
  GridCase grid = two_bus_case(30.0);
  grid.loss_rate = 1.2;
  ValidationReport report = validate_case(grid);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations)
    if (v.message.find("loss_rate") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("islands partition the buses") {
  SUBCASE("single connected ring") {
    GridCase grid = testsupport::ring3_case();
    auto comps = islands(grid);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0] == std::vector<int>{0, 1, 2});
  }
  SUBCASE("two disjoint pairs") {
    GridCase grid;
    for (int i = 1; i <= 4; ++i)
      grid.buses.push_back({"b" + std::to_string(i), 138.0, "c1", "R1"});
    grid.lines = {{"l1", "b1", "b2", 1.0, 10.0, 1.0, 138.0},
                  {"l2", "b3", "b4", 1.0, 10.0, 1.0, 138.0}};
    grid.counties = {{"c1", "ST", 1.0, 0.0}};
    grid.slack_buses = {"b1", "b3"};
    CHECK(validate_case(grid).ok());
    auto comps = islands(grid);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::vector<int>{0, 1});
    CHECK(comps[1] == std::vector<int>{2, 3});
  }
  SUBCASE("three interconnection-like components") {
    GridCase grid;
    for (int i = 1; i <= 6; ++i)
      grid.buses.push_back({"b" + std::to_string(i), 138.0, "c1", "R1"});
    grid.lines = {{"l1", "b1", "b2", 1.0, 10.0, 1.0, 138.0},
                  {"l2", "b3", "b4", 1.0, 10.0, 1.0, 138.0},
                  {"l3", "b5", "b6", 1.0, 10.0, 1.0, 138.0}};
    auto comps = islands(grid);
    REQUIRE(comps.size() == 3);
    size_t covered = 0;
    for (const auto& comp : comps) covered += comp.size();
    CHECK(covered == grid.buses.size());
  }
}

TEST_CASE("one slack bus required per island") {
  GridCase grid;
  for (int i = 1; i <= 4; ++i)
    grid.buses.push_back({"b" + std::to_string(i), 138.0, "c1", "R1"});
  grid.lines = {{"l1", "b1", "b2", 1.0, 10.0, 1.0, 138.0},
                {"l2", "b3", "b4", 1.0, 10.0, 1.0, 138.0}};
  grid.counties = {{"c1", "ST", 1.0, 0.0}};
  grid.slack_buses = {"b1"};  // second island has none
  ValidationReport report = validate_case(grid);
  CHECK_FALSE(report.ok());
}

TEST_CASE("charging sites use a strict voltage threshold") {
  GridCase grid;
  grid.buses = {{"b1", 115.0, "c1", "R1"},
                {"b2", 345.0, "c1", "R1"},
                {"b3", 200.0, "c1", "R1"}};
  County county{"c1", "ST", 10.0, 100.0};
  grid.counties = {county};

  auto sites = charging_sites(grid, county);
  CHECK(sites == std::vector<int>{0});  // 345 kV and exactly-200 kV both excluded

  SUBCASE("county with only high-voltage buses and fuel demand") {
    GridCase high;
    high.buses = {{"b1", 500.0, "c9", "R1"}};
    County c9{"c9", "ST", 10.0, 100.0};
    high.counties = {c9};
    CHECK_THROWS_AS(charging_sites(high, c9), Error);
    try {
      charging_sites(high, c9);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CountyHasNoEligibleBus);
    }
  }
  SUBCASE("zero-fuel county with no eligible bus returns empty") {
    GridCase high;
    high.buses = {{"b1", 500.0, "c9", "R1"}};
    County c9{"c9", "ST", 10.0, 0.0};
    high.counties = {c9};
    CHECK(charging_sites(high, c9).empty());
  }
  SUBCASE("two eligible buses both returned") {
    GridCase two;
    two.buses = {{"b1", 138.0, "c1", "R1"}, {"b2", 138.0, "c1", "R1"}};
    two.counties = {county};
    CHECK(charging_sites(two, county) == std::vector<int>{0, 1});
  }
}

TEST_CASE("charging sites are a subset of the county at sub-threshold voltage") {
  testsupport::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    GridCase grid;
    int n = rng.range(2, 10);
    for (int i = 0; i < n; ++i) {
      std::string county = rng.below(2) ? "c1" : "c2";
      double voltage = rng.below(2) ? 138.0 : 345.0;
      grid.buses.push_back({"b" + std::to_string(i), voltage, county, "R1"});
    }
    County c1{"c1", "ST", 10.0, 0.0};
    grid.counties = {c1};
    for (int b : charging_sites(grid, c1)) {
      CHECK(grid.buses[b].county == "c1");
      CHECK(grid.buses[b].voltage_kv < 200.0);
    }
  }
}
