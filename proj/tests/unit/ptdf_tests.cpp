#include <cmath>

#include "doctest.h"
#include "gridcarbon/ptdf.hpp"
#include "support/fixtures.hpp"

using namespace gridcarbon;
using testsupport::Rng;

namespace {

GridCase two_bus_line(double reactance) {
  GridCase grid;
  grid.buses = {{"b1", 138.0, "c1", "R1"}, {"b2", 138.0, "c1", "R1"}};
  grid.lines = {{"l1", "b1", "b2", reactance, 100.0, 1.0, 345.0}};
  grid.counties = {{"c1", "ST", 1.0, 0.0}};
  grid.slack_buses = {"b2"};
  return grid;
}

std::vector<double> ptdf_times(const PtdfSet& ptdf, const GridCase& grid,
                               const std::vector<double>& injections) {
  std::vector<double> flows(grid.lines.size(), 0.0);
  for (size_t l = 0; l < grid.lines.size(); ++l)
    for (size_t b = 0; b < grid.buses.size(); ++b)
      flows[l] += ptdf.value(static_cast<int>(l), static_cast<int>(b)) * injections[b];
  return flows;
}

}  // namespace

TEST_CASE("susceptance of a single line with x = 0.5") {
  GridCase grid = two_bus_line(0.5);
  auto comps = islands(grid);
  SusceptanceModel model = build_susceptance(grid, comps[0], "b2");
  Eigen::MatrixXd dense = Eigen::MatrixXd(model.node_admittance);
  CHECK(dense(0, 0) == doctest::Approx(2.0));
  CHECK(dense(0, 1) == doctest::Approx(-2.0));
  CHECK(dense(1, 0) == doctest::Approx(-2.0));
  CHECK(dense(1, 1) == doctest::Approx(2.0));
  // row sums are zero and the matrix is symmetric
  CHECK(dense.rowwise().sum().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("susceptance of the equal-reactance ring") {
  GridCase grid = testsupport::ring3_case();
  auto comps = islands(grid);
  SusceptanceModel model = build_susceptance(grid, comps[0], "b3");
  Eigen::MatrixXd dense = Eigen::MatrixXd(model.node_admittance);
  for (int i = 0; i < 3; ++i) CHECK(dense(i, i) == doctest::Approx(2.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(dense(i, j) == doctest::Approx(-1.0));
}

TEST_CASE("isolated bus inside the requested island is singular") {
  GridCase grid = two_bus_line(0.5);
  grid.buses.push_back({"b3", 138.0, "c1", "R1"});
  std::vector<int> pretend_island = {0, 1, 2};
  CHECK_THROWS_AS(build_susceptance(grid, pretend_island, "b2"), Error);
  try {
    build_susceptance(grid, pretend_island, "b2");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularIsland);
  }
}

TEST_CASE("single-path PTDF is 1") {
  GridCase grid = two_bus_line(0.5);
  PtdfSet ptdf = compute_case_ptdf(grid);
  CHECK(ptdf.value(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ptdf.value(0, 1) == doctest::Approx(0.0));  // slack column
}

TEST_CASE("ring PTDF splits 1/3 2/3 and the slack column is zero") {
  GridCase grid = testsupport::ring3_case();
  PtdfSet ptdf = compute_case_ptdf(grid);
  // hand oracle: reduced Laplacian [[2,-1],[-1,2]], injection e1 ->
  // theta = (2/3, 1/3), flows l12 = 1/3, l23 = 1/3, l13 = 2/3
  CHECK(ptdf.value(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(ptdf.value(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(ptdf.value(2, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  for (int l = 0; l < 3; ++l) CHECK(ptdf.value(l, 2) == doctest::Approx(0.0));
  // every entry finite
  for (const auto& island : ptdf.per_island) CHECK(island.values.allFinite());
}

TEST_CASE("relabeling symmetry of the equal-reactance ring") {
  GridCase grid = testsupport::ring3_case();
  PtdfSet ptdf = compute_case_ptdf(grid);
  // swapping b1 and b2 (slack fixed at b3) maps l12 -> l12, l13 <-> l23
  CHECK(std::abs(ptdf.value(0, 0)) == doctest::Approx(std::abs(ptdf.value(0, 1))));
  CHECK(std::abs(ptdf.value(2, 0)) == doctest::Approx(std::abs(ptdf.value(1, 1))));
  CHECK(std::abs(ptdf.value(1, 0)) == doctest::Approx(std::abs(ptdf.value(2, 1))));
}

TEST_CASE("entity columns equal the hosting bus column") {
  GridCase grid = testsupport::ring3_case();
  GenerationUnit g1;
  g1.id = "g1";
  g1.bus = "b3";  // slack
  g1.fuel = Fuel::Gas;
  g1.capacity_mw = 10.0;
  GenerationUnit g2 = g1;
  g2.id = "g2";
  g2.bus = "b1";
  GenerationUnit g3 = g2;
  g3.id = "g3";
  grid.generators = {g1, g2, g3};
  grid.counties[0].annual_gallons = 5.0;

  PtdfSet ptdf = compute_case_ptdf(grid);
  EntityColumns cols = entity_columns(ptdf, grid);
  REQUIRE(cols.generator_bus.size() == 3);

  // generator at the slack bus has an identically zero column
  Eigen::VectorXd slack_col = ptdf_column(ptdf, cols.generator_bus[0]);
  CHECK(slack_col.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // two generators at the same bus share a column
  Eigen::VectorXd c2 = ptdf_column(ptdf, cols.generator_bus[1]);
  Eigen::VectorXd c3 = ptdf_column(ptdf, cols.generator_bus[2]);
  CHECK((c2 - c3).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // station at b1 of the ring sees (1/3, 1/3, 2/3)
  REQUIRE(cols.station_county_bus.size() == 3);  // all three ring buses are in c1
  Eigen::VectorXd station = ptdf_column(ptdf, cols.station_county_bus[0].second);
  CHECK(station(0) == doctest::Approx(1.0 / 3.0));
  CHECK(station(1) == doctest::Approx(1.0 / 3.0));
  CHECK(station(2) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("direct DC flows match the hand values") {
  SUBCASE("two-bus transfer") {
    GridCase grid = two_bus_line(0.5);
    auto flows = dc_flows_direct(grid, {10.0, -10.0});
    CHECK(flows[0] == doctest::Approx(10.0));
  }
  SUBCASE("ring split 3/3/6") {
    GridCase grid = testsupport::ring3_case();
    auto flows = dc_flows_direct(grid, {9.0, 0.0, -9.0});
    CHECK(flows[0] == doctest::Approx(3.0));
    CHECK(flows[1] == doctest::Approx(3.0));
    CHECK(flows[2] == doctest::Approx(6.0));
  }
  SUBCASE("zero injections") {
    GridCase grid = testsupport::ring3_case();
    auto flows = dc_flows_direct(grid, {0.0, 0.0, 0.0});
    for (double f : flows) CHECK(f == doctest::Approx(0.0));
  }
  SUBCASE("imbalanced injections are rejected") {
    GridCase grid = two_bus_line(0.5);
    CHECK_THROWS_AS(dc_flows_direct(grid, {10.0, -8.0}), Error);
  }
}

TEST_CASE("PTDF reconstructs direct flows on random cases") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    GridCase grid = testsupport::random_connected_case(rng);
    PtdfSet ptdf = compute_case_ptdf(grid);
    auto injections = testsupport::random_balanced_injections(grid, rng);
    auto direct = dc_flows_direct(grid, injections);
    auto reconstructed = ptdf_times(ptdf, grid, injections);
    double scale = 1.0;
    for (double f : direct) scale = std::max(scale, std::abs(f));
    for (size_t l = 0; l < direct.size(); ++l)
      CHECK(std::abs(direct[l] - reconstructed[l]) <= 1e-8 * scale);
  }
}

TEST_CASE("PTDF application is linear") {
  Rng rng(43);
  GridCase grid = testsupport::random_connected_case(rng);
  PtdfSet ptdf = compute_case_ptdf(grid);
  auto p = testsupport::random_balanced_injections(grid, rng);
  auto q = testsupport::random_balanced_injections(grid, rng);
  double alpha = 2.5, beta = -1.25;
  std::vector<double> combo(p.size());
  for (size_t i = 0; i < p.size(); ++i) combo[i] = alpha * p[i] + beta * q[i];
  auto f_combo = ptdf_times(ptdf, grid, combo);
  auto f_p = ptdf_times(ptdf, grid, p);
  auto f_q = ptdf_times(ptdf, grid, q);
  for (size_t l = 0; l < f_combo.size(); ++l)
    CHECK(f_combo[l] == doctest::Approx(alpha * f_p[l] + beta * f_q[l]).epsilon(1e-9));
}

TEST_CASE("physical flows are slack-invariant for balanced injections") {
  Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    GridCase grid = testsupport::random_connected_case(rng);
    if (grid.buses.size() < 2) continue;
    GridCase other = grid;
    other.slack_buses = {grid.buses[0].id == grid.slack_buses[0] ? grid.buses[1].id
                                                                 : grid.buses[0].id};
    auto injections = testsupport::random_balanced_injections(grid, rng);
    auto f1 = ptdf_times(compute_case_ptdf(grid), grid, injections);
    auto f2 = ptdf_times(compute_case_ptdf(other), other, injections);
    double scale = 1.0;
    for (double f : f1) scale = std::max(scale, std::abs(f));
    for (size_t l = 0; l < f1.size(); ++l) CHECK(std::abs(f1[l] - f2[l]) <= 1e-8 * scale);
  }
}
