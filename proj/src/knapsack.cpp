#include "uavbs/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "uavbs/errors.hpp"

namespace uavbs {

namespace {

struct Group {
  int user = 0;
  std::vector<const MckpItem*> options;  // ascending tier
};

std::vector<Group> group_by_user(const MckpInstance& inst) {
  std::map<int, std::vector<const MckpItem*>> by_user;
  for (const auto& item : inst.items) by_user[item.user].push_back(&item);
  std::vector<Group> groups;
  groups.reserve(by_user.size());
  for (auto& [user, opts] : by_user) {
    std::sort(opts.begin(), opts.end(),
              [](const MckpItem* a, const MckpItem* b) { return a->tier < b->tier; });
    groups.push_back({user, std::move(opts)});
  }
  return groups;
}

// Number of units covering `w`, rounded up.
std::int64_t units_up(double w, double unit) {
  auto k = static_cast<std::int64_t>(std::ceil(w / unit));
  if (static_cast<double>(k) * unit < w) ++k;
  return k;
}

// Number of whole units fitting in `c`, rounded down.
std::int64_t units_down(double c, double unit) {
  auto k = static_cast<std::int64_t>(std::floor(c / unit));
  if (k > 0 && static_cast<double>(k) * unit > c) --k;
  return std::max<std::int64_t>(k, 0);
}

// Profits are summed from the last user to the first; this is the order in
// which the DP accumulates them, so equal assignments give bit-equal totals.
Assignment make_assignment(const std::vector<Group>& groups, const std::vector<int>& choice) {
  Assignment a;
  for (std::size_t g = groups.size(); g-- > 0;) {
    if (choice[g] == 0) continue;
    const MckpItem& item = *groups[g].options[static_cast<std::size_t>(choice[g] - 1)];
    a.chosen[item.user] = item.tier;
    a.total_profit += item.profit;
    a.used_rate += item.rate_weight;
    a.used_bw += item.bw_weight;
  }
  return a;
}

}  // namespace

void MckpInstance::validate() const {
  if (!(rate_capacity >= 0.0) || !(bw_capacity >= 0.0)) {
    throw DomainError("knapsack instance: capacities must be >= 0");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& item : items) {
    if (!(item.profit >= 0.0) || !std::isfinite(item.profit)) {
      throw DomainError("knapsack instance: profits must be finite and >= 0");
    }
    if (!(item.rate_weight > 0.0) || !(item.bw_weight > 0.0) ||
        !std::isfinite(item.rate_weight) || !std::isfinite(item.bw_weight)) {
      throw DomainError("knapsack instance: weights must be finite and > 0");
    }
    if (!seen.insert({item.user, item.tier}).second) {
      throw DomainError("knapsack instance: duplicate (user, tier) item");
    }
  }
  for (const auto& group : group_by_user(*this)) {
    for (std::size_t k = 1; k < group.options.size(); ++k) {
      if (!(group.options[k]->rate_weight > group.options[k - 1]->rate_weight)) {
        throw DomainError("knapsack instance: rate weights must ascend with tier for user " +
                          std::to_string(group.user));
      }
    }
  }
}

MckpInstance build_instance(const DemandTable& demand, const Eigen::MatrixXd& willingness,
                            const RateTiers& tiers, double rate_capacity_bps,
                            double bw_capacity_hz) {
  if (static_cast<std::size_t>(willingness.rows()) != demand.users() ||
      static_cast<std::size_t>(willingness.cols()) != demand.tiers() ||
      tiers.size() != demand.tiers()) {
    throw DomainError("build_instance: dimension mismatch between demand, willingness and tiers");
  }
  MckpInstance inst;
  inst.rate_capacity = rate_capacity_bps;
  inst.bw_capacity = bw_capacity_hz;
  for (std::size_t i = 0; i < demand.users(); ++i) {
    for (std::size_t k = 0; k < demand.tiers(); ++k) {
      const auto& bw = demand(i, k);
      if (!bw) continue;
      inst.items.push_back({static_cast<int>(i), static_cast<int>(k),
                            willingness(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)),
                            tiers[k], *bw});
    }
  }
  return inst;
}

Assignment solve_dp(const MckpInstance& inst, const DpOptions& opts) {
  if (!(opts.rate_unit_bps > 0.0) || !(opts.bw_unit_hz > 0.0)) {
    throw DomainError("solve_dp: units must be > 0");
  }

  const auto groups = group_by_user(inst);
  const std::size_t n_groups = groups.size();

  std::int64_t rate_cap = units_down(inst.rate_capacity, opts.rate_unit_bps);
  std::int64_t bw_cap = units_down(inst.bw_capacity, opts.bw_unit_hz);

  // Discretized weights; items that cannot fit on their own are dropped (-1).
  struct Weights {
    std::int64_t rate = -1;
    std::int64_t bw = -1;
  };
  std::vector<std::vector<Weights>> weights(n_groups);
  std::int64_t rate_gcd = 0;
  std::int64_t bw_gcd = 0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    for (const MckpItem* item : groups[g].options) {
      Weights w{units_up(item->rate_weight, opts.rate_unit_bps),
                units_up(item->bw_weight, opts.bw_unit_hz)};
      if (w.rate > rate_cap || w.bw > bw_cap) w = {};
      if (w.rate >= 0) {
        rate_gcd = std::gcd(rate_gcd, w.rate);
        bw_gcd = std::gcd(bw_gcd, w.bw);
      }
      weights[g].push_back(w);
    }
  }

  std::vector<int> choice(n_groups, 0);
  if (rate_gcd == 0) return make_assignment(groups, choice);

  // Common factors of the integer weights can be divided out exactly.
  rate_cap /= rate_gcd;
  bw_cap /= bw_gcd;
  std::int64_t rate_reach = 0;
  std::int64_t bw_reach = 0;
  for (auto& ws : weights) {
    std::int64_t max_rate = 0;
    std::int64_t max_bw = 0;
    for (auto& w : ws) {
      if (w.rate < 0) continue;
      w.rate /= rate_gcd;
      w.bw /= bw_gcd;
      max_rate = std::max(max_rate, w.rate);
      max_bw = std::max(max_bw, w.bw);
    }
    rate_reach += max_rate;
    bw_reach += max_bw;
  }
  rate_cap = std::min(rate_cap, rate_reach);
  bw_cap = std::min(bw_cap, bw_reach);

  const auto stride = static_cast<std::size_t>(bw_cap + 1);
  const std::size_t cells = static_cast<std::size_t>(rate_cap + 1) * stride;
  if (cells * n_groups > opts.cell_budget) {
    throw ResourceLimitError("solve_dp: " + std::to_string(n_groups) + " x " +
                             std::to_string(cells) +
                             " DP cells exceed the budget; use coarser rate/bandwidth units");
  }

  // best[r * stride + b]: max profit of the groups processed so far with at
  // most r rate units and b bandwidth units. Groups are processed last-to-first
  // so the backtrack below fixes the first user's choice first.
  std::vector<double> best(cells, 0.0);
  std::vector<double> next(cells);
  std::vector<std::uint8_t> picks(n_groups * cells, 0);

  for (std::size_t g = n_groups; g-- > 0;) {
    next = best;
    std::uint8_t* pick = picks.data() + g * cells;
    for (std::size_t k = 0; k < weights[g].size(); ++k) {
      const Weights w = weights[g][k];
      if (w.rate < 0) continue;
      const double profit = groups[g].options[k]->profit;
      const auto tag = static_cast<std::uint8_t>(k + 1);
      const auto wb = static_cast<std::size_t>(w.bw);
      for (auto r = static_cast<std::size_t>(w.rate); r <= static_cast<std::size_t>(rate_cap); ++r) {
        const double* src = best.data() + (r - static_cast<std::size_t>(w.rate)) * stride;
        double* dst = next.data() + r * stride;
        std::uint8_t* tags = pick + r * stride;
        for (std::size_t b = wb; b < stride; ++b) {
          const double cand = src[b - wb] + profit;
          if (cand > dst[b]) {
            dst[b] = cand;
            tags[b] = tag;
          }
        }
      }
    }
    best.swap(next);
  }

  auto r = static_cast<std::size_t>(rate_cap);
  auto b = static_cast<std::size_t>(bw_cap);
  for (std::size_t g = 0; g < n_groups; ++g) {
    const int tag = picks[g * cells + r * stride + b];
    choice[g] = tag;
    if (tag > 0) {
      const Weights w = weights[g][static_cast<std::size_t>(tag - 1)];
      r -= static_cast<std::size_t>(w.rate);
      b -= static_cast<std::size_t>(w.bw);
    }
  }
  return make_assignment(groups, choice);
}

Assignment solve_bruteforce(const MckpInstance& inst, std::uint64_t state_cap) {
  const auto groups = group_by_user(inst);
  const std::size_t n_groups = groups.size();

  std::uint64_t states = 1;
  for (const auto& g : groups) {
    states *= g.options.size() + 1;
    if (states > state_cap) {
      throw ResourceLimitError("solve_bruteforce: joint choice space exceeds " +
                               std::to_string(state_cap) + " states");
    }
  }

  std::vector<int> choice(n_groups, 0);
  std::vector<int> best_choice(n_groups, 0);
  double best_profit = 0.0;
  auto advance = [&groups](std::vector<int>& c) {
    for (std::size_t pos = c.size(); pos-- > 0;) {
      if (c[pos] < static_cast<int>(groups[pos].options.size())) {
        ++c[pos];
        return true;
      }
      c[pos] = 0;
    }
    return false;
  };
  // Odometer over choice vectors in lexicographic order (first user most
  // significant); only a strictly better profit replaces the incumbent.
  while (true) {
    double profit = 0.0;
    double rate = 0.0;
    double bw = 0.0;
    for (std::size_t g = n_groups; g-- > 0;) {
      if (choice[g] == 0) continue;
      const MckpItem& item = *groups[g].options[static_cast<std::size_t>(choice[g] - 1)];
      profit += item.profit;
      rate += item.rate_weight;
      bw += item.bw_weight;
    }
    if (rate <= inst.rate_capacity && bw <= inst.bw_capacity && profit > best_profit) {
      best_profit = profit;
      best_choice = choice;
    }

    if (!advance(choice)) break;
  }
  return make_assignment(groups, best_choice);
}

double evaluate_profit(const Assignment& assignment, const Eigen::MatrixXd& willingness) {
  double total = 0.0;
  for (const auto& [user, tier] : assignment.chosen) {
    total += willingness(user, tier);
  }
  return total;
}

void to_json(nlohmann::json& j, const MckpItem& item) {
  j = {{"user", item.user},
       {"tier", item.tier},
       {"profit", item.profit},
       {"rate_weight_bps", item.rate_weight},
       {"bw_weight_hz", item.bw_weight}};
}

void from_json(const nlohmann::json& j, MckpItem& item) {
  j.at("user").get_to(item.user);
  j.at("tier").get_to(item.tier);
  j.at("profit").get_to(item.profit);
  j.at("rate_weight_bps").get_to(item.rate_weight);
  j.at("bw_weight_hz").get_to(item.bw_weight);
}

void to_json(nlohmann::json& j, const MckpInstance& inst) {
  j = {{"rate_capacity_bps", inst.rate_capacity},
       {"bw_capacity_hz", inst.bw_capacity},
       {"items", inst.items}};
}

void from_json(const nlohmann::json& j, MckpInstance& inst) {
  j.at("rate_capacity_bps").get_to(inst.rate_capacity);
  j.at("bw_capacity_hz").get_to(inst.bw_capacity);
  j.at("items").get_to(inst.items);
}

void to_json(nlohmann::json& j, const Assignment& a) {
  nlohmann::json chosen = nlohmann::json::array();
  for (const auto& [user, tier] : a.chosen) chosen.push_back({{"user", user}, {"tier", tier}});
  j = {{"chosen", chosen},
       {"total_profit", a.total_profit},
       {"used_rate_bps", a.used_rate},
       {"used_bw_hz", a.used_bw}};
}

}  // namespace uavbs
