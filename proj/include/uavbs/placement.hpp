#pragma once

// UAV placement: golden-section search over altitude wrapped around a
// horizontal grid search, two baselines (random positions, weighted centroid)
// and an exhaustive lattice oracle. Every candidate position is scored the
// same way: anchor to the GBS with the best backhaul, build the demand table,
// solve the tier knapsack.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavbs/knapsack.hpp"
#include "uavbs/scenario.hpp"

namespace uavbs {

/// (sqrt(5) - 1) / 2
inline constexpr double kGoldenRatio = 0.6180339887498948482;

enum class CentroidWeighting {
  kTopTierWillingness,  // weight user i by phi_is
  kUniform,
};

struct SearchConfig {
  std::optional<AltitudeBracket> altitude;  // defaults to the scenario's bracket
  double eps_g = 1.0;
  int grid_cols = 10;
  int grid_rows = 5;
  int random_replications = 50;
  std::uint64_t seed = 0;
  CentroidWeighting centroid = CentroidWeighting::kTopTierWillingness;
  DpOptions dp;
  double bw_tol_hz = kDefaultBandwidthTolHz;
  unsigned workers = 0;  // 0: UAVBS_WORKERS or hardware concurrency

  void validate() const;
  AltitudeBracket bracket(const Scenario& sc) const { return altitude.value_or(sc.altitude); }
  int grid_cells() const { return grid_cols * grid_rows; }
};

struct SearchStats {
  int iterations = 0;
  long long knapsack_solves = 0;
  std::vector<double> bracket_widths;  // GSS only: width before the first and after each iteration
};

struct PlacementSolution {
  Point3 uav = Point3::Zero();
  std::size_t gbs_index = 0;
  double backhaul_bps = 0.0;
  double gbs_bandwidth_hz = 0.0;
  Assignment assignment;
  double profit = 0.0;
  std::map<int, double> per_user_bw;  // user -> Hz, served users only
  SearchStats stats;
};

/// Scores one UAV position (one knapsack solve).
PlacementSolution evaluate_position(const Scenario& sc, const Point3& uav,
                                    const SearchConfig& cfg);

/// Centers of a cols x rows partition of the region, row-major from (0, 0).
std::vector<Point3> grid_cell_centers(const Region& region, int cols, int rows,
                                      double altitude);

/// Best grid-cell center at a fixed altitude; ties go to the lowest cell index.
PlacementSolution grid_search(const Scenario& sc, double altitude, const SearchConfig& cfg);

/// Golden-section search over altitude; returns the grid search at the
/// midpoint of the final bracket.
PlacementSolution gss_optimize(const Scenario& sc, const SearchConfig& cfg);

/// Best of cfg.random_replications uniform positions in region x bracket.
PlacementSolution heuristic_random(const Scenario& sc, const SearchConfig& cfg);

/// Horizontal position of the weighted user centroid (h = 0).
Point3 user_centroid(const Scenario& sc, CentroidWeighting weighting);

/// Best of the four altitudes low + k(high - low)/4, k = 1..4, over the centroid.
PlacementSolution heuristic_fixed(const Scenario& sc, const SearchConfig& cfg);

struct OracleLattice {
  int cols = 20;
  int rows = 20;
  std::vector<double> altitudes;
  std::size_t point_cap = 1'000'000;

  std::size_t size() const {
    return static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows) * altitudes.size();
  }
};

/// cols x rows cell centers at `levels` altitude cell centers of the bracket.
OracleLattice cell_center_lattice(const AltitudeBracket& bracket, int cols, int rows,
                                  int levels);

/// Lattice from step sizes (meters): horizontal cells of `horizontal_step`,
/// altitude cells of `vertical_step`.
OracleLattice lattice_from_steps(const Region& region, const AltitudeBracket& bracket,
                                 double horizontal_step, double vertical_step);

/// Exact maximum over every lattice point. Ties go to the lowest altitude
/// index, then the lowest cell index.
PlacementSolution exhaustive_oracle(const Scenario& sc, const OracleLattice& lattice,
                                    const SearchConfig& cfg);

struct AuditReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-derives backhaul capacity, GBS choice, per-user bandwidths and sums
/// from the channel model and checks the solution against them.
AuditReport audit_solution(const Scenario& sc, const PlacementSolution& sol,
                           const SearchConfig& cfg);

nlohmann::json solution_to_json(const Scenario& sc, const PlacementSolution& sol);

}  // namespace uavbs
