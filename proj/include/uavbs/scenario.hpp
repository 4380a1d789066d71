#pragma once

// Problem instances: users, ground stations, rate tiers and willingness, plus
// the channel constants they are evaluated under. Includes the clustered
// generator and the versioned JSON file format.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "uavbs/channel.hpp"
#include "uavbs/rate_inversion.hpp"
#include "uavbs/rng.hpp"

namespace uavbs {

inline constexpr const char* kScenarioSchema = "uavbs.scenario/1";

/// Axis-aligned service area [0, width] x [0, height], meters.
struct Region {
  double width = 1500.0;
  double height = 1500.0;

  bool contains(const Point3& p) const {
    return p.x() >= 0.0 && p.x() <= width && p.y() >= 0.0 && p.y() <= height;
  }
  Point3 center(double altitude) const { return {width / 2, height / 2, altitude}; }

  friend bool operator==(const Region&, const Region&) = default;
};

struct AltitudeBracket {
  double low = 50.0;
  double high = 500.0;

  friend bool operator==(const AltitudeBracket&, const AltitudeBracket&) = default;
};

struct ScenarioMeta {
  int tier_set_id = 0;  // 0 when the tiers are not one of the built-in sets
  int parent_count = 0;
  double clustering_rate = 0.0;
  double cluster_spread_m = 0.0;

  friend bool operator==(const ScenarioMeta&, const ScenarioMeta&) = default;
};

struct Scenario {
  Region region;
  std::vector<Point3> users;  // h = 0
  std::vector<GroundStation> gbss;
  RateTiers tiers;
  Eigen::MatrixXd willingness;  // users x tiers, rows nondecreasing
  ChannelParams channel;
  AltitudeBracket altitude;
  std::uint64_t seed = 0;
  ScenarioMeta meta;

  std::size_t n() const { return users.size(); }
  std::size_t m() const { return gbss.size(); }

  /// Throws DomainError describing the first violated invariant.
  void validate() const;

  /// Sum of top-tier willingness: the profit of serving everyone at the top tier.
  double profit_upper_bound() const;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

/// Built-in tier sets 1..3: {1,2}, {1,2,4}, {1,2,4,8} Mbps.
RateTiers tier_set(int id);

struct GenSpec {
  int n = 100;
  int m = 4;
  int tier_set_id = 2;
  int parent_count_min = 3;
  int parent_count_max = 7;
  double clustering_rate_min = 0.5;
  double clustering_rate_max = 0.9;
  double cluster_spread_m = 50.0;
  std::uint64_t seed = 1;
  Region region;
  AltitudeBracket altitude;
  double gbs_bandwidth_hz = 10e6;
  ChannelParams channel;

  void validate() const;
};

/// Clustered user layout: floor(rate * n) users scattered (isotropic normal,
/// clipped to the region) around uniformly placed parent points, the rest
/// uniform; GBSs uniform. Deterministic per spec.seed.
Scenario generate(const GenSpec& spec);

/// phi_i1 = delta_1 * U, phi_ik = phi_i(k-1) + (delta_k - delta_(k-1)) * U, with
/// tier rates expressed in Mbps.
Eigen::MatrixXd gen_willingness(Rng& rng, const RateTiers& tiers, std::size_t n_users);

nlohmann::json scenario_to_json(const Scenario& scenario);
/// Throws SchemaError naming the JSON path of the first bad field.
Scenario scenario_from_json(const nlohmann::json& j);

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace uavbs
