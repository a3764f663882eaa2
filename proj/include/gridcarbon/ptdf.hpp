#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "gridcarbon/grid.hpp"

namespace gridcarbon {

/// DC susceptance model of one island, in island-local indexing.
/// node_admittance is the weighted graph Laplacian (weight 1/x per line):
/// off-diagonal -1/x_l, diagonal the negative row sum.
struct SusceptanceModel {
  Eigen::SparseMatrix<double> node_admittance;  // nb x nb
  Eigen::SparseMatrix<double> incidence;        // nl x nb, +1 at from, -1 at to
  std::vector<int> bus_index;                   // local -> case bus index (sorted)
  std::vector<int> line_index;                  // local -> case line index
  std::vector<double> reactance;                // per local line
  int island = 0;
  int slack_local = -1;
  std::string slack_bus;
};

/// Sensitivity of every island line to 1 MW injected at every island bus and
/// withdrawn at the slack bus. The slack column is identically zero.
struct PtdfMatrix {
  Eigen::MatrixXd values;      // nl x nb, island-local indexing
  std::vector<int> bus_index;  // local -> case bus index
  std::vector<int> line_index;
  int island = 0;
  int slack_local = -1;
  std::string slack_bus;
};

SusceptanceModel build_susceptance(const GridCase& grid, const std::vector<int>& island_buses,
                                   const std::string& slack_bus_id, int island = 0);

/// Factorizes the reduced Laplacian (slack row/column removed) and solves one
/// system per non-slack bus. Refuses to proceed when a pivot falls below
/// 1e-12 of the largest diagonal entry.
PtdfMatrix compute_ptdf(const SusceptanceModel& model);

/// All-island PTDF bundle with case-level lookups, plus the per-entity column
/// maps (pi^g per generator, pi^d per load, pi^v per charging station equal
/// the PTDF column of the hosting bus).
struct PtdfSet {
  std::vector<PtdfMatrix> per_island;
  std::vector<int> bus_island, bus_local;    // per case bus
  std::vector<int> line_island, line_local;  // per case line

  /// PTDF value for (case line, case bus); zero when they live on different
  /// islands (an injection cannot reach a line across an island boundary).
  double value(int line, int bus) const {
    if (line_island[line] != bus_island[bus]) return 0.0;
    return per_island[line_island[line]].values(line_local[line], bus_local[bus]);
  }
};

PtdfSet compute_case_ptdf(const GridCase& grid);

/// Entity -> hosting bus (case index) maps for one case. Station entries are
/// (county index, bus index) pairs for every county with eligible sites.
struct EntityColumns {
  std::vector<int> generator_bus;  // per generator
  std::vector<int> load_bus;       // per load
  std::vector<std::pair<int, int>> station_county_bus;
};

EntityColumns entity_columns(const PtdfSet& ptdf, const GridCase& grid,
                             double voltage_threshold_kv = 200.0);

/// PTDF column of one case bus as a dense vector over that island's lines.
Eigen::VectorXd ptdf_column(const PtdfSet& ptdf, int case_bus);

/// Independent oracle for PTDF validation: solves B_r theta = P_r directly on
/// each island and returns per-line flows (theta_from - theta_to) / x_l.
/// `injections` is per case bus in MW and must balance per island.
std::vector<double> dc_flows_direct(const GridCase& grid, const std::vector<double>& injections);

}  // namespace gridcarbon
