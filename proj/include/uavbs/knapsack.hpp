#pragma once

// Tier allocation at a fixed UAV position: pick at most one rate tier per user,
// maximizing total willingness under a backhaul (rate) capacity and an access
// (bandwidth) capacity. This is a multiple-choice knapsack with two weight
// dimensions; solve_dp runs the pseudo-polynomial DP over users, solve_bruteforce
// enumerates every joint choice and serves as its oracle.
//
// Tie-break (both solvers): among optimal assignments, the one whose choice
// vector (none < tier 0 < tier 1 < ...) is lexicographically smallest in
// ascending user order.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "uavbs/rate_inversion.hpp"

namespace uavbs {

struct MckpItem {
  int user = 0;
  int tier = 0;
  double profit = 0.0;
  double rate_weight = 0.0;  // bps
  double bw_weight = 0.0;    // Hz

  friend bool operator==(const MckpItem&, const MckpItem&) = default;
};

struct MckpInstance {
  std::vector<MckpItem> items;
  double rate_capacity = 0.0;  // bps
  double bw_capacity = 0.0;    // Hz

  /// Throws DomainError on negative profit, non-positive weight, negative
  /// capacity, duplicate (user, tier) or non-ascending tiers within a user.
  void validate() const;

  friend bool operator==(const MckpInstance&, const MckpInstance&) = default;
};

struct Assignment {
  std::map<int, int> chosen;  // user -> tier; absent means unserved
  double total_profit = 0.0;
  double used_rate = 0.0;
  double used_bw = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Items for every feasible (user, tier) entry of the demand table.
/// willingness is n x s.
MckpInstance build_instance(const DemandTable& demand, const Eigen::MatrixXd& willingness,
                            const RateTiers& tiers, double rate_capacity_bps,
                            double bw_capacity_hz);

struct DpOptions {
  double rate_unit_bps = 0.5e6;
  double bw_unit_hz = 10e3;
  // Upper bound on (users with items) x (rate cells) x (bandwidth cells).
  std::size_t cell_budget = 200'000'000;
};

/// Optimal over the discretized instance (weights rounded up, capacities down).
/// Throws ResourceLimitError when the choice table would exceed opts.cell_budget.
Assignment solve_dp(const MckpInstance& inst, const DpOptions& opts = {});

inline constexpr std::uint64_t kDefaultBruteforceStateCap = 3'000'000;

/// Exact continuous-weight optimum by enumeration of all (s+1)^n joint choices.
Assignment solve_bruteforce(const MckpInstance& inst,
                            std::uint64_t state_cap = kDefaultBruteforceStateCap);

/// Sum of willingness over served users; unserved users contribute 0.
double evaluate_profit(const Assignment& assignment, const Eigen::MatrixXd& willingness);

void to_json(nlohmann::json& j, const MckpItem& item);
void from_json(const nlohmann::json& j, MckpItem& item);
void to_json(nlohmann::json& j, const MckpInstance& inst);
void from_json(const nlohmann::json& j, MckpInstance& inst);
void to_json(nlohmann::json& j, const Assignment& a);

}  // namespace uavbs
