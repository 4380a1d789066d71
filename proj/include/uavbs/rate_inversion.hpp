#pragma once

// Minimum bandwidth needed to deliver each rate tier to each user from a fixed
// UAV position. The rate is strictly increasing and concave in bandwidth, so a
// bisection on [0, bw_cap] finds the threshold.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uavbs/channel.hpp"

namespace uavbs {

/// Strictly ascending data-rate tiers in bps.
struct RateTiers {
  std::vector<double> bps;

  std::size_t size() const { return bps.size(); }
  double operator[](std::size_t k) const { return bps[k]; }
  double top() const { return bps.back(); }

  void validate() const;

  friend bool operator==(const RateTiers&, const RateTiers&) = default;
};

inline constexpr double kDefaultBandwidthTolHz = 100.0;

/// Supremum of the user rate over unlimited bandwidth: theta / ln 2.
double rate_ceiling(const ChannelParams& params, const Point3& uav, const Point3& user);

struct BisectionResult {
  double value = 0.0;  // upper end of the final bracket
  int iterations = 0;
};

/// Smallest x in (lo, hi] with f(x) >= target for nondecreasing f, to within tol.
/// Requires f(lo) < target <= f(hi). Returns the upper end of the final bracket.
template <typename F>
BisectionResult bisect_threshold(F&& f, double target, double lo, double hi, double tol) {
  BisectionResult out;
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++out.iterations;
  }
  out.value = hi;
  return out;
}

/// Bandwidth (Hz) delivering at least `delta_bps`, or nullopt when the tier is
/// out of reach (at or above the rate ceiling, or needs more than bw_cap).
std::optional<double> required_bandwidth(const ChannelParams& params, const Point3& uav,
                                         const Point3& user, double delta_bps,
                                         double bw_cap_hz,
                                         double tol_hz = kDefaultBandwidthTolHz);

/// n x s table of required bandwidths for a fixed UAV position.
class DemandTable {
 public:
  DemandTable() = default;
  DemandTable(std::size_t users, std::size_t tiers, Point3 uav)
      : users_(users), tiers_(tiers), uav_(std::move(uav)), cells_(users * tiers) {}

  std::size_t users() const { return users_; }
  std::size_t tiers() const { return tiers_; }
  const Point3& uav() const { return uav_; }

  const std::optional<double>& operator()(std::size_t user, std::size_t tier) const {
    return cells_[user * tiers_ + tier];
  }
  std::optional<double>& operator()(std::size_t user, std::size_t tier) {
    return cells_[user * tiers_ + tier];
  }

  std::size_t feasible_count() const;

 private:
  std::size_t users_ = 0;
  std::size_t tiers_ = 0;
  Point3 uav_ = Point3::Zero();
  std::vector<std::optional<double>> cells_;
};

DemandTable build_demand_table(const ChannelParams& params, const Point3& uav,
                               std::span<const Point3> users, const RateTiers& tiers,
                               double bw_cap_hz, double tol_hz = kDefaultBandwidthTolHz);

}  // namespace uavbs
