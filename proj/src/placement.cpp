#include "uavbs/placement.hpp"

#include <cmath>
#include <sstream>

#include "uavbs/errors.hpp"
#include "uavbs/parallel.hpp"

namespace uavbs {

namespace {

// Strictly-better replacement keeps the earliest candidate on ties.
std::size_t argmax_profit(const std::vector<PlacementSolution>& candidates) {
  std::size_t best = 0;
  for (std::size_t q = 1; q < candidates.size(); ++q) {
    if (candidates[q].profit > candidates[best].profit) best = q;
  }
  return best;
}

PlacementSolution best_of(std::vector<PlacementSolution> candidates) {
  if (candidates.empty()) throw DomainError("placement: no candidate positions");
  PlacementSolution best = std::move(candidates[argmax_profit(candidates)]);
  best.stats.knapsack_solves = static_cast<long long>(candidates.size());
  return best;
}

std::vector<PlacementSolution> evaluate_all(const Scenario& sc,
                                            const std::vector<Point3>& positions,
                                            const SearchConfig& cfg) {
  std::vector<PlacementSolution> out(positions.size());
  parallel_for(positions.size(), cfg.workers,
               [&](std::size_t q) { out[q] = evaluate_position(sc, positions[q], cfg); });
  return out;
}

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

void SearchConfig::validate() const {
  if (altitude && !(altitude->low > 0.0 && altitude->high > altitude->low)) {
    throw DomainError("search config: altitude bracket must satisfy 0 < low < high");
  }
  if (!(eps_g > 0.0)) throw DomainError("search config: eps_g must be > 0");
  if (grid_cols < 1 || grid_rows < 1) throw DomainError("search config: grid must be at least 1x1");
  if (random_replications < 1) throw DomainError("search config: replications must be >= 1");
  if (!(bw_tol_hz > 0.0)) throw DomainError("search config: bandwidth tolerance must be > 0");
}

PlacementSolution evaluate_position(const Scenario& sc, const Point3& uav,
                                    const SearchConfig& cfg) {
  const BestGbs anchor = best_gbs(sc.channel, uav, sc.gbss);
  const double bw_cap = sc.gbss[anchor.index].bandwidth_hz;

  const DemandTable demand =
      build_demand_table(sc.channel, uav, sc.users, sc.tiers, bw_cap, cfg.bw_tol_hz);
  const MckpInstance inst =
      build_instance(demand, sc.willingness, sc.tiers, anchor.capacity_bps, bw_cap);

  PlacementSolution sol;
  sol.uav = uav;
  sol.gbs_index = anchor.index;
  sol.backhaul_bps = anchor.capacity_bps;
  sol.gbs_bandwidth_hz = bw_cap;
  sol.assignment = solve_dp(inst, cfg.dp);
  sol.profit = sol.assignment.total_profit;
  for (const auto& [user, tier] : sol.assignment.chosen) {
    sol.per_user_bw[user] = *demand(static_cast<std::size_t>(user), static_cast<std::size_t>(tier));
  }
  sol.stats.knapsack_solves = 1;
  return sol;
}

std::vector<Point3> grid_cell_centers(const Region& region, int cols, int rows,
                                      double altitude) {
  std::vector<Point3> centers;
  centers.reserve(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
  const double dx = region.width / cols;
  const double dy = region.height / rows;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      centers.emplace_back((c + 0.5) * dx, (r + 0.5) * dy, altitude);
    }
  }
  return centers;
}

PlacementSolution grid_search(const Scenario& sc, double altitude, const SearchConfig& cfg) {
  cfg.validate();
  const AltitudeBracket bracket = cfg.bracket(sc);
  if (!(altitude >= bracket.low && altitude <= bracket.high)) {
    throw DomainError("grid_search: altitude outside the search bracket");
  }
  return best_of(evaluate_all(
      sc, grid_cell_centers(sc.region, cfg.grid_cols, cfg.grid_rows, altitude), cfg));
}

PlacementSolution gss_optimize(const Scenario& sc, const SearchConfig& cfg) {
  cfg.validate();
  const AltitudeBracket bracket = cfg.bracket(sc);
  double low = bracket.low;
  double high = bracket.high;

  SearchStats stats;
  stats.bracket_widths.push_back(high - low);
  while (high - low >= cfg.eps_g) {
    const double width = high - low;
    const double upper_probe = low + kGoldenRatio * width;
    const double lower_probe = high - kGoldenRatio * width;
    const PlacementSolution at_upper = grid_search(sc, upper_probe, cfg);
    const PlacementSolution at_lower = grid_search(sc, lower_probe, cfg);
    if (at_upper.profit >= at_lower.profit) {
      low = lower_probe;
    } else {
      high = upper_probe;
    }
    ++stats.iterations;
    stats.knapsack_solves += at_upper.stats.knapsack_solves + at_lower.stats.knapsack_solves;
    stats.bracket_widths.push_back(high - low);
  }

  PlacementSolution final_solution = grid_search(sc, 0.5 * (low + high), cfg);
  stats.knapsack_solves += final_solution.stats.knapsack_solves;
  final_solution.stats = std::move(stats);
  return final_solution;
}

PlacementSolution heuristic_random(const Scenario& sc, const SearchConfig& cfg) {
  cfg.validate();
  const AltitudeBracket bracket = cfg.bracket(sc);
  Rng rng = Rng::stream(cfg.seed, StreamId::kRandomPlacement);
  std::vector<Point3> positions;
  for (int rep = 0; rep < cfg.random_replications; ++rep) {
    const double x = rng.uniform(0.0, sc.region.width);
    const double y = rng.uniform(0.0, sc.region.height);
    const double h = rng.uniform(bracket.low, bracket.high);
    positions.emplace_back(x, y, h);
  }
  return best_of(evaluate_all(sc, positions, cfg));
}

Point3 user_centroid(const Scenario& sc, CentroidWeighting weighting) {
  if (sc.users.empty()) throw DomainError("user_centroid: no users");
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(sc.users.size()));
  if (weighting == CentroidWeighting::kTopTierWillingness) {
    weights = sc.willingness.col(sc.willingness.cols() - 1);
    if (!(weights.sum() > 0.0)) weights.setOnes();
  }
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < sc.users.size(); ++i) {
    acc += weights(static_cast<Eigen::Index>(i)) * sc.users[i].head<2>();
  }
  acc /= weights.sum();
  return {acc.x(), acc.y(), 0.0};
}

PlacementSolution heuristic_fixed(const Scenario& sc, const SearchConfig& cfg) {
  cfg.validate();
  const AltitudeBracket bracket = cfg.bracket(sc);
  const Point3 centroid = user_centroid(sc, cfg.centroid);
  std::vector<Point3> positions;
  for (int k = 1; k <= 4; ++k) {
    positions.emplace_back(centroid.x(), centroid.y(),
                           bracket.low + k * (bracket.high - bracket.low) / 4.0);
  }
  return best_of(evaluate_all(sc, positions, cfg));
}

OracleLattice cell_center_lattice(const AltitudeBracket& bracket, int cols, int rows,
                                  int levels) {
  if (cols < 1 || rows < 1 || levels < 1) throw DomainError("lattice: counts must be >= 1");
  OracleLattice lattice;
  lattice.cols = cols;
  lattice.rows = rows;
  const double dh = (bracket.high - bracket.low) / levels;
  for (int l = 0; l < levels; ++l) lattice.altitudes.push_back(bracket.low + (l + 0.5) * dh);
  return lattice;
}

OracleLattice lattice_from_steps(const Region& region, const AltitudeBracket& bracket,
                                 double horizontal_step, double vertical_step) {
  if (!(horizontal_step > 0.0) || !(vertical_step > 0.0)) {
    throw DomainError("lattice: steps must be > 0");
  }
  auto count = [](double extent, double step) {
    return std::max(1, static_cast<int>(std::lround(extent / step)));
  };
  return cell_center_lattice(bracket, count(region.width, horizontal_step),
                             count(region.height, horizontal_step),
                             count(bracket.high - bracket.low, vertical_step));
}

PlacementSolution exhaustive_oracle(const Scenario& sc, const OracleLattice& lattice,
                                    const SearchConfig& cfg) {
  cfg.validate();
  if (lattice.altitudes.empty() || lattice.cols < 1 || lattice.rows < 1) {
    throw DomainError("exhaustive_oracle: empty lattice");
  }
  if (lattice.size() > lattice.point_cap) {
    throw ResourceLimitError("exhaustive_oracle: lattice of " + std::to_string(lattice.size()) +
                             " points exceeds the cap of " + std::to_string(lattice.point_cap));
  }
  std::vector<Point3> positions;
  positions.reserve(lattice.size());
  for (double h : lattice.altitudes) {
    const auto layer = grid_cell_centers(sc.region, lattice.cols, lattice.rows, h);
    positions.insert(positions.end(), layer.begin(), layer.end());
  }
  return best_of(evaluate_all(sc, positions, cfg));
}

AuditReport audit_solution(const Scenario& sc, const PlacementSolution& sol,
                           const SearchConfig& cfg) {
  AuditReport report;
  auto fail = [&report](const std::string& msg) { report.violations.push_back(msg); };
  constexpr double kRel = 1e-9;

  if (!sol.uav.allFinite() || !sc.region.contains(sol.uav)) fail("UAV outside the region");
  const AltitudeBracket bracket = cfg.bracket(sc);
  if (!(sol.uav.z() >= bracket.low && sol.uav.z() <= bracket.high)) {
    fail("UAV altitude outside the bracket");
  }
  if (sol.gbs_index >= sc.gbss.size()) {
    fail("GBS index out of range");
    return report;
  }

  // Exactly one backhaul link, to the best GBS.
  double best_capacity = 0.0;
  for (const auto& g : sc.gbss) {
    best_capacity = std::max(best_capacity,
                             backhaul_capacity(sc.channel, sol.uav, g.position, g.bandwidth_hz));
  }
  const GroundStation& anchor = sc.gbss[sol.gbs_index];
  const double capacity =
      backhaul_capacity(sc.channel, sol.uav, anchor.position, anchor.bandwidth_hz);
  if (!close_rel(capacity, best_capacity, kRel)) fail("anchor GBS is not the best backhaul");
  if (!close_rel(capacity, sol.backhaul_bps, kRel)) fail("reported backhaul capacity mismatch");
  if (sol.gbs_bandwidth_hz != anchor.bandwidth_hz) fail("reported GBS bandwidth mismatch");

  double rate_sum = 0.0;
  double bw_sum = 0.0;
  double profit_sum = 0.0;
  for (const auto& [user, tier] : sol.assignment.chosen) {
    const std::string who = "user " + std::to_string(user);
    if (user < 0 || static_cast<std::size_t>(user) >= sc.n() || tier < 0 ||
        static_cast<std::size_t>(tier) >= sc.tiers.size()) {
      fail(who + ": tier index out of range");
      continue;
    }
    const double delta = sc.tiers[static_cast<std::size_t>(tier)];
    const auto bw_it = sol.per_user_bw.find(user);
    if (bw_it == sol.per_user_bw.end()) {
      fail(who + ": served without a bandwidth allocation");
      continue;
    }
    const double bw = bw_it->second;
    const Point3& pos = sc.users[static_cast<std::size_t>(user)];
    if (!(bw > 0.0) || data_rate(sc.channel, sol.uav, pos, bw) < delta) {
      fail(who + ": allocated bandwidth does not deliver the tier rate");
    }
    const auto needed = required_bandwidth(sc.channel, sol.uav, pos, delta,
                                           anchor.bandwidth_hz, cfg.bw_tol_hz);
    if (!needed) {
      fail(who + ": tier is infeasible at this position");
    } else if (bw > *needed + cfg.bw_tol_hz + kRel * *needed) {
      fail(who + ": allocated bandwidth exceeds the demand table entry");
    }
    rate_sum += delta;
    bw_sum += bw;
    profit_sum += sc.willingness(user, tier);
  }
  if (sol.per_user_bw.size() != sol.assignment.chosen.size()) {
    fail("bandwidth allocations for unserved users");
  }
  if (rate_sum > capacity * (1.0 + kRel)) fail("backhaul capacity exceeded");
  if (bw_sum > anchor.bandwidth_hz * (1.0 + kRel)) fail("access bandwidth exceeded");
  if (!close_rel(profit_sum, sol.profit, kRel)) fail("reported profit does not match willingness");
  if (sol.profit != sol.assignment.total_profit) fail("profit differs from assignment total");
  return report;
}

nlohmann::json solution_to_json(const Scenario& sc, const PlacementSolution& sol) {
  nlohmann::json users = nlohmann::json::array();
  double rate_used = 0.0;
  double bw_used = 0.0;
  for (const auto& [user, tier] : sol.assignment.chosen) {
    const double delta = sc.tiers[static_cast<std::size_t>(tier)];
    const double bw = sol.per_user_bw.at(user);
    rate_used += delta;
    bw_used += bw;
    users.push_back({{"user", user}, {"tier", tier}, {"rate_bps", delta}, {"bandwidth_hz", bw}});
  }
  return {
      {"uav", {{"x_m", sol.uav.x()}, {"y_m", sol.uav.y()}, {"h_m", sol.uav.z()}}},
      {"gbs_index", sol.gbs_index},
      {"backhaul_capacity_bps", sol.backhaul_bps},
      {"gbs_bandwidth_hz", sol.gbs_bandwidth_hz},
      {"profit", sol.profit},
      {"served", users},
      {"slack", {{"backhaul_bps", sol.backhaul_bps - rate_used},
                 {"bandwidth_hz", sol.gbs_bandwidth_hz - bw_used}}},
      {"evaluations", {{"iterations", sol.stats.iterations},
                       {"knapsack_solves", sol.stats.knapsack_solves}}},
  };
}

}  // namespace uavbs
