#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gridcarbon/io.hpp"

using namespace gridcarbon;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("gridcarbon_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool grids_equal(const GridCase& a, const GridCase& b) {
  if (a.buses.size() != b.buses.size() || a.lines.size() != b.lines.size() ||
      a.generators.size() != b.generators.size() || a.loads.size() != b.loads.size() ||
      a.counties.size() != b.counties.size())
    return false;
  for (size_t i = 0; i < a.buses.size(); ++i) {
    if (a.buses[i].id != b.buses[i].id || a.buses[i].voltage_kv != b.buses[i].voltage_kv ||
        a.buses[i].county != b.buses[i].county || a.buses[i].region != b.buses[i].region)
      return false;
  }
  for (size_t i = 0; i < a.lines.size(); ++i) {
    const Line& x = a.lines[i];
    const Line& y = b.lines[i];
    if (x.id != y.id || x.from_bus != y.from_bus || x.to_bus != y.to_bus ||
        x.reactance_pu != y.reactance_pu || x.capacity_mw != y.capacity_mw ||
        x.length_mi != y.length_mi || x.voltage_kv != y.voltage_kv)
      return false;
  }
  for (size_t i = 0; i < a.generators.size(); ++i) {
    const GenerationUnit& x = a.generators[i];
    const GenerationUnit& y = b.generators[i];
    if (x.id != y.id || x.bus != y.bus || x.fuel != y.fuel || x.capacity_mw != y.capacity_mw ||
        x.cost_per_mwh != y.cost_per_mwh || x.emission_t_per_gwh != y.emission_t_per_gwh ||
        x.ramp_up_mw_per_h != y.ramp_up_mw_per_h ||
        x.ramp_down_mw_per_h != y.ramp_down_mw_per_h ||
        x.capability_profile != y.capability_profile)
      return false;
  }
  for (size_t i = 0; i < a.counties.size(); ++i) {
    if (a.counties[i].fips != b.counties[i].fips ||
        a.counties[i].population != b.counties[i].population ||
        a.counties[i].annual_gallons != b.counties[i].annual_gallons)
      return false;
  }
  return a.loss_rate == b.loss_rate && a.slack_buses == b.slack_buses;
}

}  // namespace

TEST_CASE("wind conversion follows the cubic curve") {
  CHECK(wind_to_per_unit(2.0) == doctest::Approx(0.0));
  CHECK(wind_to_per_unit(16.0) == doctest::Approx(0.0));
  CHECK(wind_to_per_unit(10.0) == doctest::Approx(973.0 / 3348.0).epsilon(1e-12));
  CHECK(wind_to_per_unit(3.0) == doctest::Approx(0.0));
  CHECK(wind_to_per_unit(15.0) == doctest::Approx(1.0));

  SUBCASE("rated-speed plateau variant") {
    WindCurve rated;
    rated.rated_mps = 12.0;
    CHECK(wind_to_per_unit(12.0, rated) == doctest::Approx(1.0));
    CHECK(wind_to_per_unit(14.0, rated) == doctest::Approx(1.0));
    CHECK(wind_to_per_unit(16.0, rated) == doctest::Approx(0.0));
    CHECK(wind_to_per_unit(6.0, rated) ==
          doctest::Approx((216.0 - 27.0) / (1728.0 - 27.0)).epsilon(1e-12));
  }
}

TEST_CASE("synthetic templates") {
  SUBCASE("ring(3, seed 1) is the canonical PTDF fixture") {
    LoadedBundle bundle = synth_case(SynthTemplate::Ring, 3, 1);
    CHECK(bundle.grid.buses.size() == 3);
    REQUIRE(bundle.grid.lines.size() == 3);
    for (const auto& line : bundle.grid.lines) CHECK(line.reactance_pu == 1.0);
    CHECK(bundle.grid.slack_buses == std::vector<std::string>{"b3"});
    CHECK(validate_case(bundle.grid).ok());
  }
  SUBCASE("two-area has four buses and one tie line") {
    LoadedBundle bundle = synth_case(SynthTemplate::TwoArea, 4, 5);
    CHECK(bundle.grid.buses.size() == 4);
    int ties = 0;
    for (const auto& line : bundle.grid.lines) {
      const Bus& from = bundle.grid.buses[bundle.grid.bus_index(line.from_bus)];
      const Bus& to = bundle.grid.buses[bundle.grid.bus_index(line.to_bus)];
      if (from.county != to.county) ++ties;
    }
    CHECK(ties == 1);
  }
  SUBCASE("same seed reproduces the same case") {
    LoadedBundle a = synth_case(SynthTemplate::Star, 6, 99);
    LoadedBundle b = synth_case(SynthTemplate::Star, 6, 99);
    CHECK(grids_equal(a.grid, b.grid));
  }
}

TEST_CASE("case bundle round-trips through the CSV formats") {
  LoadedBundle bundle = synth_case(SynthTemplate::Ring, 4, 7);
  fs::path dir = fresh_dir("roundtrip");
  write_case_bundle(bundle, dir);
  LoadedBundle loaded = load_case(dir);
  CHECK(grids_equal(bundle.grid, loaded.grid));
  CHECK(loaded.curves == bundle.curves);
  fs::remove_all(dir);
}

TEST_CASE("load_case reports precise errors") {
  LoadedBundle bundle = synth_case(SynthTemplate::Ring, 3, 2);
  SUBCASE("generator referencing a missing bus") {
    fs::path dir = fresh_dir("badgen");
    write_case_bundle(bundle, dir);
    std::ofstream app(dir / "generators.csv", std::ios::app);
    app << "gX,X,gas,10,5,400,10,10\n";
    app.close();
    CHECK_THROWS_AS(load_case(dir), Error);
    try {
      load_case(dir);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CrossReferenceError);
      CHECK(std::string(e.what()).find("gX") != std::string::npos);
      CHECK(std::string(e.what()).find("X") != std::string::npos);
    }
    fs::remove_all(dir);
  }
  SUBCASE("negative reactance carries the line number") {
    fs::path dir = fresh_dir("badline");
    write_case_bundle(bundle, dir);
    std::ofstream app(dir / "lines.csv", std::ios::app);
    app << "lX,b1,b2,-0.5,10,1,345\n";
    app.close();
    try {
      load_case(dir);
      FAIL("expected ValidationError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ValidationError);
      CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
    fs::remove_all(dir);
  }
  SUBCASE("missing bundle directory") {
    CHECK_THROWS_AS(load_case(fs::temp_directory_path() / "no_such_bundle"), Error);
  }
}

TEST_CASE("config parsing and overrides") {
  RunConfig config = parse_config_text(
      "# comment\n"
      "tau = 0.04\n"
      "slack_buses = b1,b2\n"
      "penetration = 0.6\n"
      "relaxed = true\n",
      "test");
  CHECK(config.tau == doctest::Approx(0.04));
  CHECK(config.slack_buses == std::vector<std::string>{"b1", "b2"});
  CHECK(config.fleet.penetration == doctest::Approx(0.6));
  CHECK(config.relaxed);

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config_text("typo_key = 1\n", "test"), Error);
  }
  SUBCASE("environment overrides file values") {
    ::setenv("GRIDCARBON_TAU", "0.01", 1);
    apply_env_overrides(config);
    ::unsetenv("GRIDCARBON_TAU");
    CHECK(config.tau == doctest::Approx(0.01));
  }
}

TEST_CASE("emit_report writes deterministic files") {
  LoadedBundle bundle = synth_case(SynthTemplate::TwoArea, 4, 3);
  UpgradePlan plan;
  plan.delta_f_mw.assign(bundle.grid.lines.size(), 0.0);
  plan.delta_f_mw[1] = 12.5;
  plan.objective_mw_mile = 12.5 * bundle.grid.lines[1].length_mi;
  plan.binding_lines = {1};

  ReportInputs inputs;
  inputs.upgrade = &plan;
  inputs.grid = &bundle.grid;
  inputs.summary["objective_mw_mile"] = format_compact(plan.objective_mw_mile);

  fs::path dir_a = fresh_dir("report_a");
  fs::path dir_b = fresh_dir("report_b");
  auto files_a = emit_report(inputs, "csv", dir_a);
  auto files_b = emit_report(inputs, "csv", dir_b);
  REQUIRE(files_a.size() == files_b.size());
  for (size_t i = 0; i < files_a.size(); ++i)
    CHECK(slurp(files_a[i]) == slurp(files_b[i]));

  std::string upgrade_csv = slurp(dir_a / "upgrade.csv");
  CHECK(upgrade_csv.find("12.5") != std::string::npos);
  CHECK(upgrade_csv.find(bundle.grid.lines[1].id) != std::string::npos);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  SUBCASE("empty sweep is an error") {
    SweepOutput empty;
    ReportInputs bad;
    bad.sweep = &empty;
    CHECK_THROWS_AS(emit_report(bad, "csv", fresh_dir("report_bad")), Error);
  }
  SUBCASE("nothing to report is an error") {
    ReportInputs nothing;
    CHECK_THROWS_AS(emit_report(nothing, "csv", fresh_dir("report_none")), Error);
  }
}
