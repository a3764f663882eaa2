#include "gridcarbon/ptdf.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

namespace gridcarbon {

namespace {

constexpr double kPivotRatioFloor = 1e-12;

/// Reduced Laplacian with the slack row/column removed, plus the local->reduced map.
Eigen::SparseMatrix<double> reduce_laplacian(const Eigen::SparseMatrix<double>& laplacian,
                                             int slack, std::vector<int>& reduced_of_local) {
  int n = static_cast<int>(laplacian.rows());
  reduced_of_local.assign(n, -1);
  int r = 0;
  for (int i = 0; i < n; ++i)
    if (i != slack) reduced_of_local[i] = r++;

  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < laplacian.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(laplacian, col); it; ++it) {
      int i = reduced_of_local[it.row()];
      int j = reduced_of_local[it.col()];
      if (i >= 0 && j >= 0) triplets.emplace_back(i, j, it.value());
    }
  }
  Eigen::SparseMatrix<double> reduced(n - 1, n - 1);
  reduced.setFromTriplets(triplets.begin(), triplets.end());
  return reduced;
}

struct ReducedFactor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  std::vector<int> reduced_of_local;

  ReducedFactor(const Eigen::SparseMatrix<double>& laplacian, int slack,
                const std::string& context) {
    Eigen::SparseMatrix<double> reduced = reduce_laplacian(laplacian, slack, reduced_of_local);
    if (reduced.rows() == 0) return;  // single-bus island, nothing to solve
    ldlt.compute(reduced);
    if (ldlt.info() != Eigen::Success)
      fail(ErrorCode::NumericallySingular, context + ": LDLT factorization failed");
    double max_diag = 0.0;
    for (int i = 0; i < reduced.rows(); ++i) max_diag = std::max(max_diag, reduced.coeff(i, i));
    const auto& d = ldlt.vectorD();
    for (int i = 0; i < d.size(); ++i) {
      if (!(d(i) > kPivotRatioFloor * max_diag))
        fail(ErrorCode::NumericallySingular,
             context + ": pivot " + std::to_string(d(i)) + " below " +
                 std::to_string(kPivotRatioFloor) + " of largest diagonal " +
                 std::to_string(max_diag));
    }
  }
};

}  // namespace

SusceptanceModel build_susceptance(const GridCase& grid, const std::vector<int>& island_buses,
                                   const std::string& slack_bus_id, int island) {
  SusceptanceModel model;
  model.island = island;
  model.bus_index = island_buses;
  std::sort(model.bus_index.begin(), model.bus_index.end());
  int nb = static_cast<int>(model.bus_index.size());

  std::vector<int> local_of_bus(grid.buses.size(), -1);
  for (int i = 0; i < nb; ++i) local_of_bus[model.bus_index[i]] = i;

  for (int l = 0; l < static_cast<int>(grid.lines.size()); ++l) {
    const Line& line = grid.lines[l];
    int a = grid.bus_index(line.from_bus);
    int b = grid.bus_index(line.to_bus);
    bool a_in = a >= 0 && local_of_bus[a] >= 0;
    bool b_in = b >= 0 && local_of_bus[b] >= 0;
    if (a_in != b_in)
      fail(ErrorCode::SingularIsland, "line " + line.id + " crosses the island boundary");
    if (!a_in) continue;
    model.line_index.push_back(l);
    model.reactance.push_back(line.reactance_pu);
  }
  int nl = static_cast<int>(model.line_index.size());

  std::vector<Eigen::Triplet<double>> lap, inc;
  for (int r = 0; r < nl; ++r) {
    const Line& line = grid.lines[model.line_index[r]];
    int i = local_of_bus[grid.bus_index(line.from_bus)];
    int j = local_of_bus[grid.bus_index(line.to_bus)];
    double w = 1.0 / line.reactance_pu;
    lap.emplace_back(i, i, w);
    lap.emplace_back(j, j, w);
    lap.emplace_back(i, j, -w);
    lap.emplace_back(j, i, -w);
    inc.emplace_back(r, i, 1.0);
    inc.emplace_back(r, j, -1.0);
  }
  model.node_admittance.resize(nb, nb);
  model.node_admittance.setFromTriplets(lap.begin(), lap.end());
  model.incidence.resize(nl, nb);
  model.incidence.setFromTriplets(inc.begin(), inc.end());

  // Connectivity of the induced subgraph; a bus with no line inside the
  // island makes the reduced Laplacian singular.
  if (nb > 1) {
    std::vector<std::vector<int>> adjacency(nb);
    for (int r = 0; r < nl; ++r) {
      const Line& line = grid.lines[model.line_index[r]];
      int i = local_of_bus[grid.bus_index(line.from_bus)];
      int j = local_of_bus[grid.bus_index(line.to_bus)];
      adjacency[i].push_back(j);
      adjacency[j].push_back(i);
    }
    std::vector<char> seen(nb, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      ++reached;
      for (int v : adjacency[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    if (reached != nb)
      fail(ErrorCode::SingularIsland, "island " + std::to_string(island) +
                                          " is not connected after line filtering (" +
                                          std::to_string(reached) + "/" + std::to_string(nb) +
                                          " buses reachable)");
  }

  int slack_case = grid.bus_index(slack_bus_id);
  if (slack_case < 0 || local_of_bus[slack_case] < 0)
    fail(ErrorCode::UnknownBus, "slack bus " + slack_bus_id + " not in island");
  model.slack_local = local_of_bus[slack_case];
  model.slack_bus = slack_bus_id;
  return model;
}

PtdfMatrix compute_ptdf(const SusceptanceModel& model) {
  int nb = static_cast<int>(model.bus_index.size());
  int nl = static_cast<int>(model.line_index.size());
  PtdfMatrix ptdf;
  ptdf.bus_index = model.bus_index;
  ptdf.line_index = model.line_index;
  ptdf.island = model.island;
  ptdf.slack_local = model.slack_local;
  ptdf.slack_bus = model.slack_bus;
  ptdf.values = Eigen::MatrixXd::Zero(nl, nb);
  if (nb <= 1) return ptdf;

  ReducedFactor factor(model.node_admittance, model.slack_local,
                       "island " + std::to_string(model.island));

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb - 1);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(nb);
  for (int b = 0; b < nb; ++b) {
    if (b == model.slack_local) continue;  // slack column stays zero
    int rb = factor.reduced_of_local[b];
    rhs(rb) = 1.0;
    Eigen::VectorXd theta_reduced = factor.ldlt.solve(rhs);
    rhs(rb) = 0.0;
    theta.setZero();
    for (int i = 0; i < nb; ++i)
      if (i != model.slack_local) theta(i) = theta_reduced(factor.reduced_of_local[i]);
    Eigen::VectorXd diff = model.incidence * theta;
    for (int r = 0; r < nl; ++r) ptdf.values(r, b) = diff(r) / model.reactance[r];
  }
  return ptdf;
}

PtdfSet compute_case_ptdf(const GridCase& grid) {
  auto comps = islands(grid);
  auto slacks = slack_by_island(grid, comps);
  PtdfSet set;
  set.bus_island.assign(grid.buses.size(), -1);
  set.bus_local.assign(grid.buses.size(), -1);
  set.line_island.assign(grid.lines.size(), -1);
  set.line_local.assign(grid.lines.size(), -1);
  for (size_t k = 0; k < comps.size(); ++k) {
    SusceptanceModel model =
        build_susceptance(grid, comps[k], grid.buses[slacks[k]].id, static_cast<int>(k));
    PtdfMatrix ptdf = compute_ptdf(model);
    for (int i = 0; i < static_cast<int>(ptdf.bus_index.size()); ++i) {
      set.bus_island[ptdf.bus_index[i]] = static_cast<int>(k);
      set.bus_local[ptdf.bus_index[i]] = i;
    }
    for (int r = 0; r < static_cast<int>(ptdf.line_index.size()); ++r) {
      set.line_island[ptdf.line_index[r]] = static_cast<int>(k);
      set.line_local[ptdf.line_index[r]] = r;
    }
    set.per_island.push_back(std::move(ptdf));
  }
  return set;
}

EntityColumns entity_columns(const PtdfSet& ptdf, const GridCase& grid,
                             double voltage_threshold_kv) {
  EntityColumns cols;
  for (const auto& g : grid.generators) {
    int b = grid.bus_index(g.bus);
    if (b < 0) fail(ErrorCode::UnknownBus, "generator " + g.id + " references bus " + g.bus);
    cols.generator_bus.push_back(b);
  }
  for (const auto& d : grid.loads) {
    int b = grid.bus_index(d.bus);
    if (b < 0) fail(ErrorCode::UnknownBus, "load " + d.id + " references bus " + d.bus);
    cols.load_bus.push_back(b);
  }
  for (int c = 0; c < static_cast<int>(grid.counties.size()); ++c) {
    for (int b : charging_sites(grid, grid.counties[c], voltage_threshold_kv))
      cols.station_county_bus.emplace_back(c, b);
  }
  (void)ptdf;
  return cols;
}

Eigen::VectorXd ptdf_column(const PtdfSet& ptdf, int case_bus) {
  const PtdfMatrix& island = ptdf.per_island[ptdf.bus_island[case_bus]];
  return island.values.col(ptdf.bus_local[case_bus]);
}

std::vector<double> dc_flows_direct(const GridCase& grid, const std::vector<double>& injections) {
  if (injections.size() != grid.buses.size())
    fail(ErrorCode::MalformedProblem, "injection vector size does not match bus count");
  auto comps = islands(grid);
  std::vector<double> flows(grid.lines.size(), 0.0);

  for (size_t k = 0; k < comps.size(); ++k) {
    double sum = 0.0, magnitude = 0.0;
    for (int b : comps[k]) {
      sum += injections[b];
      magnitude += std::abs(injections[b]);
    }
    if (std::abs(sum) > 1e-6 * std::max(1.0, magnitude))
      fail(ErrorCode::ImbalancedInjection,
           "island " + std::to_string(k) + " injections sum to " + std::to_string(sum));

    // Any island bus works as the angle reference for balanced injections.
    SusceptanceModel model = build_susceptance(grid, comps[k], grid.buses[comps[k][0]].id,
                                               static_cast<int>(k));
    int nb = static_cast<int>(model.bus_index.size());
    if (nb <= 1) continue;
    ReducedFactor factor(model.node_admittance, model.slack_local,
                         "island " + std::to_string(k));
    Eigen::VectorXd p_reduced(nb - 1);
    for (int i = 0; i < nb; ++i)
      if (i != model.slack_local)
        p_reduced(factor.reduced_of_local[i]) = injections[model.bus_index[i]];
    Eigen::VectorXd theta_reduced = factor.ldlt.solve(p_reduced);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(nb);
    for (int i = 0; i < nb; ++i)
      if (i != model.slack_local) theta(i) = theta_reduced(factor.reduced_of_local[i]);
    Eigen::VectorXd diff = model.incidence * theta;
    for (int r = 0; r < static_cast<int>(model.line_index.size()); ++r)
      flows[model.line_index[r]] = diff(r) / model.reactance[r];
  }
  return flows;
}

}  // namespace gridcarbon
