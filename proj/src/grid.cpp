#include "gridcarbon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace gridcarbon {

Fuel fuel_from_string(const std::string& s) {
  if (s == "coal") return Fuel::Coal;
  if (s == "gas") return Fuel::Gas;
  if (s == "nuclear") return Fuel::Nuclear;
  if (s == "hydro") return Fuel::Hydro;
  if (s == "solar") return Fuel::Solar;
  if (s == "wind") return Fuel::Wind;
  if (s == "other") return Fuel::Other;
  fail(ErrorCode::ParseError, "unknown fuel category '" + s + "'");
}

const char* to_string(Fuel fuel) {
  switch (fuel) {
    case Fuel::Coal: return "coal";
    case Fuel::Gas: return "gas";
    case Fuel::Nuclear: return "nuclear";
    case Fuel::Hydro: return "hydro";
    case Fuel::Solar: return "solar";
    case Fuel::Wind: return "wind";
    case Fuel::Other: return "other";
  }
  return "other";
}

bool is_variable_renewable(Fuel fuel) { return fuel == Fuel::Solar || fuel == Fuel::Wind; }

bool counts_as_renewable(Fuel fuel) {
  return fuel == Fuel::Solar || fuel == Fuel::Wind || fuel == Fuel::Hydro;
}

HourlyProfile flat_profile(double value) {
  HourlyProfile p;
  p.fill(value);
  return p;
}

int GridCase::bus_index(const std::string& id) const {
  for (int i = 0; i < static_cast<int>(buses.size()); ++i)
    if (buses[i].id == id) return i;
  return -1;
}

int GridCase::county_index(const std::string& fips) const {
  for (int i = 0; i < static_cast<int>(counties.size()); ++i)
    if (counties[i].fips == fips) return i;
  return -1;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& v : violations) out << v.entity << ": " << v.message << "\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return out.str();
}

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_unique_ids(ValidationReport& report, const std::vector<std::string>& ids,
                      const std::string& kind) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second)
      report.violations.push_back({kind + " " + id, "duplicate id"});
  }
}

}  // namespace

ValidationReport validate_case(const GridCase& grid) {
  ValidationReport report;

  std::vector<std::string> bus_ids, line_ids, gen_ids, county_ids;
  for (const auto& b : grid.buses) bus_ids.push_back(b.id);
  for (const auto& l : grid.lines) line_ids.push_back(l.id);
  for (const auto& g : grid.generators) gen_ids.push_back(g.id);
  for (const auto& c : grid.counties) county_ids.push_back(c.fips);
  check_unique_ids(report, bus_ids, "bus");
  check_unique_ids(report, line_ids, "line");
  check_unique_ids(report, gen_ids, "generator");
  check_unique_ids(report, county_ids, "county");

  for (const auto& b : grid.buses) {
    if (!finite_positive(b.voltage_kv))
      report.violations.push_back({"bus " + b.id, "voltage_kv must be > 0"});
  }

  for (const auto& l : grid.lines) {
    if (grid.bus_index(l.from_bus) < 0)
      report.violations.push_back({"line " + l.id, "references missing bus " + l.from_bus});
    if (grid.bus_index(l.to_bus) < 0)
      report.violations.push_back({"line " + l.id, "references missing bus " + l.to_bus});
    if (l.from_bus == l.to_bus)
      report.violations.push_back({"line " + l.id, "from_bus equals to_bus"});
    if (!finite_positive(l.reactance_pu))
      report.violations.push_back({"line " + l.id, "reactance_pu must be > 0"});
    if (!(l.capacity_mw > 0.0))  // +inf allowed: relaxed line
      report.violations.push_back({"line " + l.id, "capacity_mw must be > 0"});
    if (!(l.length_mi >= 0.0) || !std::isfinite(l.length_mi))
      report.violations.push_back({"line " + l.id, "length_mi must be >= 0"});
  }

  for (const auto& g : grid.generators) {
    if (grid.bus_index(g.bus) < 0)
      report.violations.push_back({"generator " + g.id, "references missing bus " + g.bus});
    if (!(g.capacity_mw >= 0.0) || !std::isfinite(g.capacity_mw))
      report.violations.push_back({"generator " + g.id, "capacity_mw must be >= 0"});
    if (!(g.ramp_up_mw_per_h >= 0.0))
      report.violations.push_back({"generator " + g.id, "ramp_up_mw_per_h must be >= 0"});
    if (!(g.ramp_down_mw_per_h >= 0.0))
      report.violations.push_back({"generator " + g.id, "ramp_down_mw_per_h must be >= 0"});
    if (!(g.emission_t_per_gwh >= 0.0) || !std::isfinite(g.emission_t_per_gwh))
      report.violations.push_back({"generator " + g.id, "emission_t_per_gwh must be >= 0"});
    for (int t = 0; t < kHoursPerDay; ++t) {
      double v = g.capability_profile[t];
      if (!(v >= 0.0 && v <= 1.0)) {
        report.violations.push_back(
            {"generator " + g.id, "capability_profile[" + std::to_string(t + 1) + "] outside [0,1]"});
        break;
      }
    }
  }

  for (const auto& d : grid.loads) {
    if (grid.bus_index(d.bus) < 0)
      report.violations.push_back({"load " + d.id, "references missing bus " + d.bus});
    if (!(d.peak_mw >= 0.0) || !std::isfinite(d.peak_mw))
      report.violations.push_back({"load " + d.id, "peak_mw must be >= 0"});
  }

  for (const auto& c : grid.counties) {
    if (!(c.population > 0.0))
      report.violations.push_back({"county " + c.fips, "population must be > 0"});
    if (!(c.annual_gallons >= 0.0))
      report.violations.push_back({"county " + c.fips, "annual_gallons must be >= 0"});
  }

  if (!(grid.loss_rate >= 0.0 && grid.loss_rate < 1.0))
    report.violations.push_back(
        {"case", "loss_rate must satisfy 0 <= tau < 1, got " + std::to_string(grid.loss_rate)});

  if (grid.time_grid.steps != kHoursPerDay)
    report.violations.push_back({"case", "time grid must have exactly 24 steps"});
  if (grid.time_grid.dt_h != 1.0)
    report.violations.push_back({"case", "time step must be 1 hour"});

  // One slack bus per island, and every configured slack must exist.
  for (const auto& sid : grid.slack_buses) {
    if (grid.bus_index(sid) < 0)
      report.violations.push_back({"slack " + sid, "configured slack bus does not exist"});
  }
  if (!grid.buses.empty()) {
    auto comps = islands(grid);
    for (size_t k = 0; k < comps.size(); ++k) {
      int count = 0;
      for (const auto& sid : grid.slack_buses) {
        int b = grid.bus_index(sid);
        if (b >= 0 && std::find(comps[k].begin(), comps[k].end(), b) != comps[k].end()) ++count;
      }
      if (count != 1)
        report.violations.push_back(
            {"island " + std::to_string(k),
             "needs exactly one slack bus, found " + std::to_string(count)});
    }
  }

  return report;
}

std::vector<std::vector<int>> islands(const GridCase& grid) {
  int n = static_cast<int>(grid.buses.size());
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& l : grid.lines) {
    int a = grid.bus_index(l.from_bus);
    int b = grid.bus_index(l.to_bus);
    if (a < 0 || b < 0 || a == b) continue;  // malformed lines are validate_case's job
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  std::vector<int> component(n, -1);
  std::vector<std::vector<int>> comps;
  for (int start = 0; start < n; ++start) {
    if (component[start] >= 0) continue;
    int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<int> stack{start};
    component[start] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      comps[id].push_back(u);
      for (int v : adjacency[u]) {
        if (component[v] < 0) {
          component[v] = id;
          stack.push_back(v);
        }
      }
    }
    std::sort(comps[id].begin(), comps[id].end());
  }
  return comps;
}

std::vector<int> charging_sites(const GridCase& grid, const County& county,
                                double voltage_threshold_kv) {
  std::vector<int> sites;
  for (int i = 0; i < static_cast<int>(grid.buses.size()); ++i) {
    const Bus& b = grid.buses[i];
    if (b.county == county.fips && b.voltage_kv < voltage_threshold_kv) sites.push_back(i);
  }
  if (sites.empty() && county.annual_gallons > 0.0)
    fail(ErrorCode::CountyHasNoEligibleBus,
         "county " + county.fips + " has fuel demand but no bus below " +
             std::to_string(voltage_threshold_kv) + " kV");
  return sites;
}

std::vector<int> slack_by_island(const GridCase& grid,
                                 const std::vector<std::vector<int>>& comps) {
  std::vector<int> result(comps.size(), -1);
  for (size_t k = 0; k < comps.size(); ++k) {
    for (const auto& sid : grid.slack_buses) {
      int b = grid.bus_index(sid);
      if (b >= 0 && std::binary_search(comps[k].begin(), comps[k].end(), b)) {
        if (result[k] >= 0)
          fail(ErrorCode::ValidationError,
               "island " + std::to_string(k) + " has more than one configured slack bus");
        result[k] = b;
      }
    }
    if (result[k] < 0)
      fail(ErrorCode::ValidationError,
           "island " + std::to_string(k) + " has no configured slack bus");
  }
  return result;
}

}  // namespace gridcarbon
