#include "gridcarbon/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gridcarbon {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

double wind_to_per_unit(double speed_mps, const WindCurve& curve) {
  if (speed_mps < 0.0 || !std::isfinite(speed_mps))
    fail(ErrorCode::MalformedProblem, "wind speed must be finite and >= 0");
  if (speed_mps < curve.cut_in_mps || speed_mps > curve.cut_off_mps) return 0.0;
  double cube_in = curve.cut_in_mps * curve.cut_in_mps * curve.cut_in_mps;
  double top = curve.rated_mps.value_or(curve.cut_off_mps);
  if (speed_mps >= top) return 1.0;
  double cube_top = top * top * top;
  double cube = speed_mps * speed_mps * speed_mps;
  return (cube - cube_in) / (cube_top - cube_in);
}

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_compact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : line) {
    if (c == sep) {
      parts.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(trim(current));
  return parts;
}

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // per row, 1-based in the file

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    fail(ErrorCode::ParseError, file + ": missing column '" + name + "'");
  }

  const std::string& cell(size_t row, int col) const { return rows[row][col]; }

  std::string where(size_t row, const std::string& col) const {
    return file + " line " + std::to_string(line_numbers[row]) + " column '" + col + "'";
  }
};

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  CsvTable table;
  table.file = path.filename().string();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    auto parts = split(t, ',');
    if (table.header.empty()) {
      table.header = parts;
      continue;
    }
    if (parts.size() != table.header.size())
      fail(ErrorCode::ParseError, table.file + " line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(table.header.size()) + " fields, got " +
                                      std::to_string(parts.size()));
    table.rows.push_back(std::move(parts));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty())
    fail(ErrorCode::ParseError, table.file + ": empty file");
  return table;
}

double parse_double(const std::string& text, const std::string& where) {
  if (text == "inf" || text == "+inf") return kInf;
  if (text == "-inf") return -kInf;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(ErrorCode::ParseError, where + ": not a number: '" + text + "'");
  return value;
}

long parse_int(const std::string& text, const std::string& where) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(ErrorCode::ParseError, where + ": not an integer: '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorCode::ParseError, where + ": not a boolean: '" + text + "'");
}

std::vector<double> parse_double_list(const std::string& text, const std::string& where) {
  std::vector<double> values;
  if (trim(text).empty()) return values;
  for (const auto& part : split(text, ','))
    values.push_back(parse_double(part, where));
  return values;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> values;
  if (trim(text).empty()) return values;
  for (const auto& part : split(text, ','))
    if (!part.empty()) values.push_back(part);
  return values;
}

void apply_config_key(RunConfig& config, const std::string& key, const std::string& value,
                      const std::string& where) {
  if (key == "slack_buses") config.slack_buses = parse_string_list(value);
  else if (key == "tau") config.tau = parse_double(value, where);
  else if (key == "penetration") config.fleet.penetration = parse_double(value, where);
  else if (key == "icv_mpge") config.fleet.icv_mpge = parse_double(value, where);
  else if (key == "ev_mpge") config.fleet.ev_mpge = parse_double(value, where);
  else if (key == "kwh_per_gallon_ev") config.fleet.kwh_per_gallon_ev = parse_double(value, where);
  else if (key == "kg_co2_per_gallon") config.fleet.kg_co2_per_gallon = parse_double(value, where);
  else if (key == "renewable_targets") config.renewable_targets = parse_double_list(value, where);
  else if (key == "relaxed") config.relaxed = parse_bool(value, where);
  else if (key == "voltage_threshold_kv") config.voltage_threshold_kv = parse_double(value, where);
  else if (key == "feasibility_tol") config.feasibility_tol = parse_double(value, where);
  else if (key == "optimality_tol") config.optimality_tol = parse_double(value, where);
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(value, where));
  else if (key == "growth_years") config.growth_years = static_cast<int>(parse_int(value, where));
  else if (key == "load_growth_rate") config.load_growth_rate = parse_double(value, where);
  else if (key == "fuel_growth_rate") config.fuel_growth_rate = parse_double(value, where);
  else fail(ErrorCode::ParseError, where + ": unknown config key '" + key + "'");
}

const char* kConfigKeys[] = {
    "slack_buses", "tau", "penetration", "icv_mpge", "ev_mpge", "kwh_per_gallon_ev",
    "kg_co2_per_gallon", "renewable_targets", "relaxed", "voltage_threshold_kv",
    "feasibility_tol", "optimality_tol", "out_dir", "seed", "growth_years",
    "load_growth_rate", "fuel_growth_rate",
};

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    std::string where = origin + " line " + std::to_string(line_no);
    if (eq == std::string::npos)
      fail(ErrorCode::ParseError, where + ": expected key = value");
    apply_config_key(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), where);
  }
  return config;
}

void apply_env_overrides(RunConfig& config) {
  for (const char* key : kConfigKeys) {
    std::string env_name = "GRIDCARBON_";
    for (const char* p = key; *p; ++p) env_name.push_back(static_cast<char>(std::toupper(*p)));
    if (const char* value = std::getenv(env_name.c_str()))
      apply_config_key(config, key, value, "environment " + env_name);
  }
}

namespace {

HourlyProfile curve_row_to_profile(const CsvTable& table,
                                   const std::map<std::pair<std::string, int>,
                                                  std::array<std::pair<bool, double>, 24>>& seen,
                                   const std::string& region, int month) {
  HourlyProfile profile = flat_profile(0.0);
  auto it = seen.find({region, month});
  if (it == seen.end())
    fail(ErrorCode::ParseError,
         table.file + ": region " + region + " month " + std::to_string(month) + " missing");
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (!it->second[h].first)
      fail(ErrorCode::ParseError, table.file + ": region " + region + " month " +
                                      std::to_string(month) + " hour " + std::to_string(h + 1) +
                                      " missing");
    profile[h] = it->second[h].second;
  }
  return profile;
}

}  // namespace

LoadedBundle load_case(const fs::path& bundle_dir) {
  CaseBundle bundle{bundle_dir};
  if (!fs::is_directory(bundle_dir))
    fail(ErrorCode::IoError, "bundle directory " + bundle_dir.string() + " does not exist");

  LoadedBundle loaded;
  {
    std::ifstream in(bundle.config());
    if (!in) fail(ErrorCode::IoError, "cannot open " + bundle.config().string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    loaded.config = parse_config_text(buffer.str(), bundle.config().filename().string());
  }
  apply_env_overrides(loaded.config);

  GridCase& grid = loaded.grid;
  grid.name = bundle_dir.filename().string();
  grid.loss_rate = loaded.config.tau;
  grid.slack_buses = loaded.config.slack_buses;

  {
    CsvTable t = read_csv(bundle.buses());
    int c_id = t.column("bus_id"), c_v = t.column("voltage_kv");
    int c_county = t.column("county_fips"), c_region = t.column("region");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      Bus bus;
      bus.id = t.cell(r, c_id);
      bus.voltage_kv = parse_double(t.cell(r, c_v), t.where(r, "voltage_kv"));
      bus.county = t.cell(r, c_county);
      bus.region = t.cell(r, c_region);
      if (!(bus.voltage_kv > 0.0))
        fail(ErrorCode::ValidationError, t.where(r, "voltage_kv") + ": must be > 0");
      grid.buses.push_back(std::move(bus));
    }
  }

  {
    CsvTable t = read_csv(bundle.lines());
    int c_id = t.column("line_id"), c_from = t.column("from_bus"), c_to = t.column("to_bus");
    int c_x = t.column("reactance_pu"), c_f = t.column("capacity_mw");
    int c_len = t.column("length_mi"), c_v = t.column("voltage_kv");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      Line line;
      line.id = t.cell(r, c_id);
      line.from_bus = t.cell(r, c_from);
      line.to_bus = t.cell(r, c_to);
      line.reactance_pu = parse_double(t.cell(r, c_x), t.where(r, "reactance_pu"));
      line.capacity_mw = parse_double(t.cell(r, c_f), t.where(r, "capacity_mw"));
      line.length_mi = parse_double(t.cell(r, c_len), t.where(r, "length_mi"));
      line.voltage_kv = parse_double(t.cell(r, c_v), t.where(r, "voltage_kv"));
      if (grid.bus_index(line.from_bus) < 0)
        fail(ErrorCode::CrossReferenceError,
             "line " + line.id + " references missing bus " + line.from_bus);
      if (grid.bus_index(line.to_bus) < 0)
        fail(ErrorCode::CrossReferenceError,
             "line " + line.id + " references missing bus " + line.to_bus);
      if (!(line.reactance_pu > 0.0))
        fail(ErrorCode::ValidationError, t.where(r, "reactance_pu") + ": must be > 0");
      if (!(line.capacity_mw > 0.0))
        fail(ErrorCode::ValidationError, t.where(r, "capacity_mw") + ": must be > 0");
      grid.lines.push_back(std::move(line));
    }
  }

  {
    CsvTable t = read_csv(bundle.generators());
    int c_id = t.column("gen_id"), c_bus = t.column("bus_id"), c_fuel = t.column("fuel");
    int c_cap = t.column("capacity_mw"), c_cost = t.column("cost_per_mwh");
    int c_em = t.column("emission_t_per_gwh");
    int c_ru = t.column("ramp_up_mw_per_h"), c_rd = t.column("ramp_down_mw_per_h");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      GenerationUnit g;
      g.id = t.cell(r, c_id);
      g.bus = t.cell(r, c_bus);
      g.fuel = fuel_from_string(t.cell(r, c_fuel));
      g.capacity_mw = parse_double(t.cell(r, c_cap), t.where(r, "capacity_mw"));
      g.cost_per_mwh = parse_double(t.cell(r, c_cost), t.where(r, "cost_per_mwh"));
      g.emission_t_per_gwh = parse_double(t.cell(r, c_em), t.where(r, "emission_t_per_gwh"));
      g.ramp_up_mw_per_h = parse_double(t.cell(r, c_ru), t.where(r, "ramp_up_mw_per_h"));
      g.ramp_down_mw_per_h = parse_double(t.cell(r, c_rd), t.where(r, "ramp_down_mw_per_h"));
      if (grid.bus_index(g.bus) < 0)
        fail(ErrorCode::CrossReferenceError,
             "generator " + g.id + " references missing bus " + g.bus);
      grid.generators.push_back(std::move(g));
    }
  }

  if (fs::exists(bundle.gen_profiles())) {
    CsvTable t = read_csv(bundle.gen_profiles());
    int c_id = t.column("gen_id"), c_hour = t.column("hour"), c_v = t.column("per_unit");
    std::map<std::string, std::array<bool, 24>> covered;
    for (size_t r = 0; r < t.rows.size(); ++r) {
      const std::string& gid = t.cell(r, c_id);
      int gen = -1;
      for (size_t j = 0; j < grid.generators.size(); ++j)
        if (grid.generators[j].id == gid) gen = static_cast<int>(j);
      if (gen < 0)
        fail(ErrorCode::CrossReferenceError, "gen_profiles references missing generator " + gid);
      long hour = parse_int(t.cell(r, c_hour), t.where(r, "hour"));
      if (hour < 1 || hour > 24)
        fail(ErrorCode::ParseError, t.where(r, "hour") + ": hour must be 1..24");
      double v = parse_double(t.cell(r, c_v), t.where(r, "per_unit"));
      if (!(v >= 0.0 && v <= 1.0))
        fail(ErrorCode::ValidationError, t.where(r, "per_unit") + ": must be in [0,1]");
      grid.generators[gen].capability_profile[hour - 1] = v;
      covered[gid][hour - 1] = true;
    }
    for (const auto& [gid, hours] : covered)
      for (int h = 0; h < kHoursPerDay; ++h)
        if (!hours[h])
          fail(ErrorCode::ParseError,
               "gen_profiles.csv: generator " + gid + " missing hour " + std::to_string(h + 1));
  }

  {
    CsvTable t = read_csv(bundle.loads());
    int c_id = t.column("load_id"), c_bus = t.column("bus_id");
    int c_peak = t.column("peak_mw"), c_region = t.column("region");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      LoadPoint d;
      d.id = t.cell(r, c_id);
      d.bus = t.cell(r, c_bus);
      d.peak_mw = parse_double(t.cell(r, c_peak), t.where(r, "peak_mw"));
      d.region = t.cell(r, c_region);
      if (grid.bus_index(d.bus) < 0)
        fail(ErrorCode::CrossReferenceError, "load " + d.id + " references missing bus " + d.bus);
      grid.loads.push_back(std::move(d));
    }
  }

  {
    CsvTable t = read_csv(bundle.counties());
    int c_fips = t.column("fips"), c_state = t.column("state"), c_pop = t.column("population");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      County c;
      c.fips = t.cell(r, c_fips);
      c.state = t.cell(r, c_state);
      c.population = parse_double(t.cell(r, c_pop), t.where(r, "population"));
      grid.counties.push_back(std::move(c));
    }
  }

  {
    CsvTable t = read_csv(bundle.state_fuel());
    int c_state = t.column("state"), c_gal = t.column("annual_gallons");
    std::map<std::string, double> fuel_by_state;
    for (size_t r = 0; r < t.rows.size(); ++r)
      fuel_by_state[t.cell(r, c_state)] =
          parse_double(t.cell(r, c_gal), t.where(r, "annual_gallons"));
    // allocate per state by county population, preserving county file order
    std::map<std::string, std::vector<int>> counties_by_state;
    for (int c = 0; c < static_cast<int>(grid.counties.size()); ++c)
      counties_by_state[grid.counties[c].state].push_back(c);
    for (const auto& [state, members] : counties_by_state) {
      auto it = fuel_by_state.find(state);
      if (it == fuel_by_state.end())
        fail(ErrorCode::CrossReferenceError, "state " + state + " has no state_fuel row");
      std::vector<County> group;
      for (int c : members) group.push_back(grid.counties[c]);
      auto shares = allocate_state_fuel(it->second, group);
      for (size_t i = 0; i < members.size(); ++i)
        grid.counties[members[i]].annual_gallons = shares[i];
    }
  }

  {
    CsvTable t = read_csv(bundle.regional_curves());
    int c_region = t.column("region"), c_month = t.column("month");
    int c_hour = t.column("hour"), c_v = t.column("per_unit");
    std::map<std::pair<std::string, int>, std::array<std::pair<bool, double>, 24>> seen;
    for (size_t r = 0; r < t.rows.size(); ++r) {
      std::string region = t.cell(r, c_region);
      long month = parse_int(t.cell(r, c_month), t.where(r, "month"));
      long hour = parse_int(t.cell(r, c_hour), t.where(r, "hour"));
      double v = parse_double(t.cell(r, c_v), t.where(r, "per_unit"));
      if (month < 1 || month > 12)
        fail(ErrorCode::ParseError, t.where(r, "month") + ": month must be 1..12");
      if (hour < 1 || hour > 24)
        fail(ErrorCode::ParseError, t.where(r, "hour") + ": hour must be 1..24");
      if (!(v >= 0.0 && v <= 1.0))
        fail(ErrorCode::ValidationError, t.where(r, "per_unit") + ": must be in [0,1]");
      seen[{region, static_cast<int>(month)}][hour - 1] = {true, v};
    }
    std::map<std::string, bool> regions;
    for (const auto& [key, value] : seen) regions[key.first] = true;
    for (const auto& [region, ignored] : regions) {
      std::array<HourlyProfile, 12> months;
      for (int m = 1; m <= 12; ++m) months[m - 1] = curve_row_to_profile(t, seen, region, m);
      loaded.curves[region] = months;
    }
    for (const auto& d : grid.loads)
      if (loaded.curves.find(d.region) == loaded.curves.end())
        fail(ErrorCode::CrossReferenceError,
             "load " + d.id + " references region " + d.region + " with no curves");
  }

  ValidationReport report = validate_case(grid);
  if (!report.ok())
    fail(ErrorCode::ValidationError, "case invalid:\n" + report.to_string());
  return loaded;
}

// ---------------------------------------------------------------------------
// synthetic cases

namespace {

/// SplitMix64: deterministic across platforms, unlike <random> distributions.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct FuelDefaults {
  double cost_per_mwh;
  double emission_t_per_gwh;
};

FuelDefaults fuel_defaults(Fuel fuel) {
  switch (fuel) {
    case Fuel::Coal: return {22.0, 950.0};
    case Fuel::Gas: return {35.0, 450.0};
    case Fuel::Nuclear: return {10.0, 0.0};
    case Fuel::Hydro: return {7.0, 0.0};
    case Fuel::Solar: return {0.0, 0.0};
    case Fuel::Wind: return {0.0, 0.0};
    case Fuel::Other: return {40.0, 600.0};
  }
  return {40.0, 600.0};
}

HourlyProfile synth_wind_profile(Rng& rng) {
  HourlyProfile profile;
  double speed = rng.uniform(4.0, 12.0);
  for (int h = 0; h < kHoursPerDay; ++h) {
    speed = std::clamp(speed + rng.uniform(-2.5, 2.5), 0.0, 20.0);
    profile[h] = wind_to_per_unit(speed);
  }
  return profile;
}

HourlyProfile synth_solar_profile(Rng& rng) {
  HourlyProfile profile = flat_profile(0.0);
  double clearness = rng.uniform(0.7, 1.0);
  for (int h = 7; h <= 18; ++h)
    profile[h] = clearness * std::sin(M_PI * (h - 7) / 11.0);
  return profile;
}

GenerationUnit make_unit(const std::string& id, const std::string& bus, Fuel fuel,
                         double capacity, Rng& rng) {
  GenerationUnit g;
  g.id = id;
  g.bus = bus;
  g.fuel = fuel;
  g.capacity_mw = capacity;
  FuelDefaults d = fuel_defaults(fuel);
  g.cost_per_mwh = d.cost_per_mwh;
  g.emission_t_per_gwh = d.emission_t_per_gwh;
  g.ramp_up_mw_per_h = capacity;
  g.ramp_down_mw_per_h = capacity;
  if (fuel == Fuel::Wind) g.capability_profile = synth_wind_profile(rng);
  if (fuel == Fuel::Solar) g.capability_profile = synth_solar_profile(rng);
  return g;
}

RegionalCurves synth_curves(const std::vector<std::string>& regions, Rng& rng) {
  RegionalCurves curves;
  for (const auto& region : regions) {
    std::array<HourlyProfile, 12> months;
    double peak = 0.0;
    for (int m = 0; m < 12; ++m) {
      double seasonal = 0.75 + 0.2 * std::cos(2.0 * M_PI * (m - 6) / 12.0);
      for (int h = 0; h < kHoursPerDay; ++h) {
        double diurnal = 0.7 + 0.3 * std::sin(M_PI * (h + 1 - 5) / 14.0);
        double v = seasonal * std::clamp(diurnal + rng.uniform(-0.03, 0.03), 0.2, 1.5);
        months[m][h] = v;
        peak = std::max(peak, v);
      }
    }
    for (int m = 0; m < 12; ++m)
      for (int h = 0; h < kHoursPerDay; ++h) months[m][h] /= peak;
    curves[region] = months;
  }
  return curves;
}

const Fuel kRingFuelCycle[] = {Fuel::Coal, Fuel::Wind, Fuel::Gas, Fuel::Solar, Fuel::Hydro};

LoadedBundle synth_ring_or_star(SynthTemplate templ, int buses, std::uint64_t seed) {
  if (buses < 2) fail(ErrorCode::MalformedProblem, "synthetic case needs at least 2 buses");
  Rng rng(seed * 1000003ULL + (templ == SynthTemplate::Ring ? 1 : 2));
  LoadedBundle bundle;
  GridCase& grid = bundle.grid;
  grid.name = templ == SynthTemplate::Ring ? "ring" : "star";

  for (int i = 1; i <= buses; ++i)
    grid.buses.push_back({"b" + std::to_string(i), 138.0, "c1", "R1"});

  auto add_line = [&](int idx, const std::string& from, const std::string& to, double x) {
    Line line;
    line.id = "l" + std::to_string(idx);
    line.from_bus = from;
    line.to_bus = to;
    line.reactance_pu = x;
    line.capacity_mw = std::floor(rng.uniform(80.0, 160.0));
    line.length_mi = std::floor(rng.uniform(5.0, 50.0));
    line.voltage_kv = 345.0;
    grid.lines.push_back(std::move(line));
  };

  if (templ == SynthTemplate::Ring) {
    for (int i = 1; i < buses; ++i)
      add_line(i, "b" + std::to_string(i), "b" + std::to_string(i + 1), 1.0);
    if (buses > 2) add_line(buses, "b1", "b" + std::to_string(buses), 1.0);
    grid.slack_buses = {"b" + std::to_string(buses)};
  } else {
    for (int i = 2; i <= buses; ++i)
      add_line(i - 1, "b1", "b" + std::to_string(i), rng.uniform(0.5, 2.0));
    grid.slack_buses = {"b1"};
  }

  for (int i = 1; i <= buses; ++i) {
    Fuel fuel = kRingFuelCycle[(i - 1) % 5];
    double cap = is_variable_renewable(fuel) ? std::floor(rng.uniform(40.0, 100.0))
                                             : std::floor(rng.uniform(80.0, 150.0));
    grid.generators.push_back(
        make_unit("g" + std::to_string(i), "b" + std::to_string(i), fuel, cap, rng));
    LoadPoint d;
    d.id = "d" + std::to_string(i);
    d.bus = "b" + std::to_string(i);
    d.peak_mw = std::floor(rng.uniform(20.0, 60.0));
    d.region = "R1";
    grid.loads.push_back(std::move(d));
  }

  County county;
  county.fips = "c1";
  county.state = "ST";
  county.population = 1000.0;
  county.annual_gallons = std::floor(rng.uniform(2e5, 8e5));
  grid.counties.push_back(county);

  bundle.curves = synth_curves({"R1"}, rng);
  bundle.config.slack_buses = grid.slack_buses;
  bundle.config.seed = seed;
  grid.loss_rate = bundle.config.tau;
  return bundle;
}

LoadedBundle synth_two_area(std::uint64_t seed) {
  Rng rng(seed * 1000003ULL + 3);
  LoadedBundle bundle;
  GridCase& grid = bundle.grid;
  grid.name = "two-area";

  grid.buses = {
      {"b1", 138.0, "c1", "R1"},
      {"b2", 345.0, "c1", "R1"},
      {"b3", 345.0, "c2", "R2"},
      {"b4", 138.0, "c2", "R2"},
  };
  double tie_cap = std::floor(rng.uniform(14.0, 22.0));
  grid.lines = {
      {"l1", "b1", "b2", 0.5, 200.0, 12.0, 345.0},
      {"l2", "b2", "b3", 1.0, tie_cap, std::floor(rng.uniform(80.0, 120.0)), 345.0},
      {"l3", "b3", "b4", 0.5, 200.0, 10.0, 345.0},
  };
  grid.generators.push_back(make_unit("g1", "b1", Fuel::Wind, 60.0, rng));
  grid.generators.push_back(make_unit("g2", "b3", Fuel::Coal, 150.0, rng));
  grid.generators.push_back(make_unit("g3", "b4", Fuel::Gas, 150.0, rng));
  // local backup keeps area 1 feasible when the wind is out and the tie is full
  grid.generators.push_back(make_unit("g4", "b2", Fuel::Gas, 50.0, rng));

  grid.loads = {
      {"d1", "b2", 20.0, "R1"},
      {"d2", "b4", 80.0, "R2"},
  };
  grid.counties = {
      {"c1", "ST", 400.0, 200000.0},
      {"c2", "ST", 1000.0, 500000.0},
  };
  grid.slack_buses = {"b3"};

  bundle.curves = synth_curves({"R1", "R2"}, rng);
  bundle.config.slack_buses = grid.slack_buses;
  bundle.config.seed = seed;
  grid.loss_rate = bundle.config.tau;
  return bundle;
}

}  // namespace

SynthTemplate synth_template_from_string(const std::string& s) {
  if (s == "ring") return SynthTemplate::Ring;
  if (s == "star") return SynthTemplate::Star;
  if (s == "two-area") return SynthTemplate::TwoArea;
  fail(ErrorCode::ParseError, "unknown synth template '" + s + "'");
}

LoadedBundle synth_case(SynthTemplate templ, int buses, std::uint64_t seed) {
  LoadedBundle bundle = templ == SynthTemplate::TwoArea
                            ? synth_two_area(seed)
                            : synth_ring_or_star(templ, buses, seed);
  ValidationReport report = validate_case(bundle.grid);
  if (!report.ok())
    fail(ErrorCode::ValidationError, "synthetic case invalid:\n" + report.to_string());
  return bundle;
}

// ---------------------------------------------------------------------------
// writers

namespace {

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string state_fuel_total(const GridCase& grid, const std::string& state) {
  double total = 0.0;
  for (const auto& c : grid.counties)
    if (c.state == state) total += c.annual_gallons;
  return format_full(total);
}

}  // namespace

void write_case_bundle(const LoadedBundle& bundle, const fs::path& dir) {
  const GridCase& grid = bundle.grid;
  std::ostringstream buses;
  buses << "bus_id,name,voltage_kv,county_fips,region\n";
  for (const auto& b : grid.buses)
    buses << b.id << "," << b.id << "," << format_full(b.voltage_kv) << "," << b.county << ","
          << b.region << "\n";
  write_file_atomic(dir / "buses.csv", buses.str());

  std::ostringstream lines;
  lines << "line_id,from_bus,to_bus,reactance_pu,capacity_mw,length_mi,voltage_kv\n";
  for (const auto& l : grid.lines)
    lines << l.id << "," << l.from_bus << "," << l.to_bus << "," << format_full(l.reactance_pu)
          << "," << format_full(l.capacity_mw) << "," << format_full(l.length_mi) << ","
          << format_full(l.voltage_kv) << "\n";
  write_file_atomic(dir / "lines.csv", lines.str());

  std::ostringstream gens;
  gens << "gen_id,bus_id,fuel,capacity_mw,cost_per_mwh,emission_t_per_gwh,ramp_up_mw_per_h,"
          "ramp_down_mw_per_h\n";
  std::ostringstream profiles;
  profiles << "gen_id,hour,per_unit\n";
  for (const auto& g : grid.generators) {
    gens << g.id << "," << g.bus << "," << to_string(g.fuel) << "," << format_full(g.capacity_mw)
         << "," << format_full(g.cost_per_mwh) << "," << format_full(g.emission_t_per_gwh) << ","
         << format_full(g.ramp_up_mw_per_h) << "," << format_full(g.ramp_down_mw_per_h) << "\n";
    if (g.capability_profile != flat_profile())
      for (int h = 0; h < kHoursPerDay; ++h)
        profiles << g.id << "," << (h + 1) << "," << format_full(g.capability_profile[h]) << "\n";
  }
  write_file_atomic(dir / "generators.csv", gens.str());
  write_file_atomic(dir / "gen_profiles.csv", profiles.str());

  std::ostringstream loads;
  loads << "load_id,bus_id,peak_mw,region\n";
  for (const auto& d : grid.loads)
    loads << d.id << "," << d.bus << "," << format_full(d.peak_mw) << "," << d.region << "\n";
  write_file_atomic(dir / "loads.csv", loads.str());

  std::ostringstream counties;
  counties << "fips,state,population\n";
  for (const auto& c : grid.counties)
    counties << c.fips << "," << c.state << "," << format_full(c.population) << "\n";
  write_file_atomic(dir / "counties.csv", counties.str());

  std::ostringstream fuel;
  fuel << "state,annual_gallons\n";
  std::vector<std::string> states;
  for (const auto& c : grid.counties)
    if (std::find(states.begin(), states.end(), c.state) == states.end())
      states.push_back(c.state);
  for (const auto& state : states)
    fuel << state << "," << state_fuel_total(grid, state) << "\n";
  write_file_atomic(dir / "state_fuel.csv", fuel.str());

  std::ostringstream curves;
  curves << "region,month,hour,per_unit\n";
  for (const auto& [region, months] : bundle.curves)
    for (int m = 0; m < 12; ++m)
      for (int h = 0; h < kHoursPerDay; ++h)
        curves << region << "," << (m + 1) << "," << (h + 1) << ","
               << format_full(months[m][h]) << "\n";
  write_file_atomic(dir / "regional_curves.csv", curves.str());

  std::ostringstream config;
  config << "# generated case configuration\n";
  config << "slack_buses = ";
  for (size_t i = 0; i < grid.slack_buses.size(); ++i)
    config << (i ? "," : "") << grid.slack_buses[i];
  config << "\n";
  config << "tau = " << format_full(grid.loss_rate) << "\n";
  config << "seed = " << bundle.config.seed << "\n";
  write_file_atomic(dir / "config.txt", config.str());
}

std::vector<fs::path> emit_report(const ReportInputs& inputs, const std::string& format,
                                  const fs::path& out_dir) {
  if (format != "csv" && format != "json")
    fail(ErrorCode::MalformedProblem, "report format must be csv or json");
  bool has_anything = inputs.sweep || inputs.upgrade || inputs.ptdf ||
                      !inputs.generation_series.empty() || !inputs.charging_series.empty() ||
                      !inputs.flow_series.empty() || !inputs.summary.empty();
  if (!has_anything) fail(ErrorCode::IoError, "nothing to report");
  if (inputs.sweep && inputs.sweep->rows.empty()) fail(ErrorCode::IoError, "empty sweep");
  if ((inputs.upgrade || inputs.ptdf) && !inputs.grid)
    fail(ErrorCode::MalformedProblem, "upgrade/ptdf reports need the case");

  std::vector<fs::path> written;
  ordered_json all;

  if (inputs.sweep) {
    if (format == "csv") {
      std::ostringstream out;
      out << "penetration,renewable_level,mode,e_ev_t,e_icv_t,e_v_t,congestion_induced_t,"
             "status\n";
      for (const auto& row : inputs.sweep->rows)
        out << format_compact(row.penetration) << "," << format_compact(row.renewable_level)
            << "," << row.mode << "," << format_compact(row.result.e_ev_t) << ","
            << format_compact(row.result.e_icv_t) << "," << format_compact(row.result.e_v_t)
            << "," << format_compact(row.result.congestion_induced_t) << "," << row.status
            << "\n";
      write_file_atomic(out_dir / "sweep.csv", out.str());
      written.push_back(out_dir / "sweep.csv");
    } else {
      ordered_json rows = ordered_json::array();
      for (const auto& row : inputs.sweep->rows)
        rows.push_back({{"penetration", row.penetration},
                        {"renewable_level", row.renewable_level},
                        {"mode", row.mode},
                        {"e_ev_t", row.result.e_ev_t},
                        {"e_icv_t", row.result.e_icv_t},
                        {"e_v_t", row.result.e_v_t},
                        {"congestion_induced_t", row.result.congestion_induced_t},
                        {"status", row.status}});
      all["sweep"] = rows;
    }
  }

  if (inputs.upgrade) {
    const GridCase& grid = *inputs.grid;
    if (format == "csv") {
      std::ostringstream out;
      out << "line_id,voltage_kv,length_mi,capacity_mw,delta_f_mw,mw_mile\n";
      for (size_t l = 0; l < grid.lines.size(); ++l) {
        double df = inputs.upgrade->delta_f_mw[l];
        out << grid.lines[l].id << "," << format_compact(grid.lines[l].voltage_kv) << ","
            << format_compact(grid.lines[l].length_mi) << ","
            << format_compact(grid.lines[l].capacity_mw) << "," << format_compact(df) << ","
            << format_compact(df * grid.lines[l].length_mi) << "\n";
      }
      write_file_atomic(out_dir / "upgrade.csv", out.str());
      written.push_back(out_dir / "upgrade.csv");
    } else {
      ordered_json rows = ordered_json::array();
      for (size_t l = 0; l < grid.lines.size(); ++l)
        rows.push_back({{"line_id", grid.lines[l].id},
                        {"delta_f_mw", inputs.upgrade->delta_f_mw[l]},
                        {"length_mi", grid.lines[l].length_mi}});
      all["upgrade"] = rows;
    }
  }

  if (inputs.ptdf) {
    std::ostringstream out;
    out << "line_id";
    for (const auto& bus : inputs.grid->buses) out << "," << bus.id;
    out << "\n";
    for (size_t l = 0; l < inputs.grid->lines.size(); ++l) {
      out << inputs.grid->lines[l].id;
      for (size_t b = 0; b < inputs.grid->buses.size(); ++b)
        out << ","
            << format_compact(inputs.ptdf->value(static_cast<int>(l), static_cast<int>(b)));
      out << "\n";
    }
    write_file_atomic(out_dir / "ptdf.csv", out.str());
    written.push_back(out_dir / "ptdf.csv");
  }

  auto write_series = [&](const std::vector<std::pair<std::string, HourlyProfile>>& series,
                          const std::string& name) {
    if (series.empty()) return;
    std::ostringstream out;
    out << "entity,hour,value\n";
    for (const auto& [id, profile] : series)
      for (int h = 0; h < kHoursPerDay; ++h)
        out << id << "," << (h + 1) << "," << format_compact(profile[h]) << "\n";
    write_file_atomic(out_dir / (name + ".csv"), out.str());
    written.push_back(out_dir / (name + ".csv"));
  };
  write_series(inputs.generation_series, "generation");
  write_series(inputs.charging_series, "charging");
  write_series(inputs.flow_series, "flows");

  ordered_json summary;
  for (const auto& [k, v] : inputs.summary) summary[k] = v;
  ordered_json metadata;
  metadata["version"] = kVersion;
  for (const auto& [k, v] : inputs.metadata) metadata[k] = v;
  if (inputs.sweep)
    for (const auto& [k, v] : inputs.sweep->metadata) metadata[k] = v;
  all["summary"] = summary;
  all["metadata"] = metadata;
  fs::path summary_path = out_dir / (format == "json" ? "report.json" : "summary.json");
  write_file_atomic(summary_path, all.dump(2) + "\n");
  written.push_back(summary_path);
  return written;
}

}  // namespace gridcarbon
