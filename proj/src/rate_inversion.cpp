#include "uavbs/rate_inversion.hpp"

#include <numbers>

#include "uavbs/errors.hpp"

namespace uavbs {

void RateTiers::validate() const {
  if (bps.empty()) throw DomainError("rate tiers: at least one tier required");
  for (std::size_t k = 0; k < bps.size(); ++k) {
    if (!(bps[k] > 0.0) || !std::isfinite(bps[k])) {
      throw DomainError("rate tiers: tiers must be positive and finite");
    }
    if (k > 0 && !(bps[k] > bps[k - 1])) {
      throw DomainError("rate tiers: tiers must be strictly ascending");
    }
  }
}

double rate_ceiling(const ChannelParams& params, const Point3& uav, const Point3& user) {
  return snr_bandwidth_product(params, params.uav_power_dbm,
                               pathloss_user(params, uav, user)) /
         std::numbers::ln2;
}

std::optional<double> required_bandwidth(const ChannelParams& params, const Point3& uav,
                                         const Point3& user, double delta_bps,
                                         double bw_cap_hz, double tol_hz) {
  if (!(delta_bps > 0.0)) throw DomainError("required_bandwidth: delta must be > 0");
  if (!(bw_cap_hz > 0.0)) throw DomainError("required_bandwidth: bw_cap must be > 0");
  if (!(tol_hz > 0.0)) throw DomainError("required_bandwidth: tol must be > 0");

  const double theta =
      snr_bandwidth_product(params, params.uav_power_dbm, pathloss_user(params, uav, user));
  if (delta_bps >= theta / std::numbers::ln2) return std::nullopt;
  if (shannon_rate(theta, bw_cap_hz) < delta_bps) return std::nullopt;
  if (tol_hz >= bw_cap_hz || shannon_rate(theta, tol_hz) >= delta_bps) {
    return std::min(tol_hz, bw_cap_hz);
  }
  auto rate = [theta](double b) { return shannon_rate(theta, b); };
  return bisect_threshold(rate, delta_bps, tol_hz, bw_cap_hz, tol_hz).value;
}

std::size_t DemandTable::feasible_count() const {
  std::size_t count = 0;
  for (const auto& c : cells_) count += c.has_value();
  return count;
}

DemandTable build_demand_table(const ChannelParams& params, const Point3& uav,
                               std::span<const Point3> users, const RateTiers& tiers,
                               double bw_cap_hz, double tol_hz) {
  if (users.empty()) throw DomainError("build_demand_table: no users");
  if (tiers.size() == 0) throw DomainError("build_demand_table: no tiers");

  DemandTable table(users.size(), tiers.size(), uav);
  for (std::size_t i = 0; i < users.size(); ++i) {
    double floor_bw = 0.0;
    for (std::size_t k = 0; k < tiers.size(); ++k) {
      auto bw = required_bandwidth(params, uav, users[i], tiers[k], bw_cap_hz, tol_hz);
      if (!bw) break;  // higher tiers are out of reach as well
      // Independent bisections can land within tol of each other; keep rows monotone.
      floor_bw = std::max(floor_bw, *bw);
      table(i, k) = floor_bw;
    }
  }
  return table;
}

}  // namespace uavbs
