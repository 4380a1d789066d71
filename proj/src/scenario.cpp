#include "uavbs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json_schema.hpp"
#include "uavbs/errors.hpp"

namespace uavbs {

namespace {

using nlohmann::json;

Point3 uniform_point(Rng& rng, const Region& region) {
  const double x = rng.uniform(0.0, region.width);
  const double y = rng.uniform(0.0, region.height);
  return {x, y, 0.0};
}

json channel_to_json(const ChannelParams& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"eta", c.eta},
          {"mu_los_db", c.mu_los_db},
          {"mu_nlos_db", c.mu_nlos_db},
          {"f_c_hz", c.carrier_hz},
          {"p_d_dbm", c.uav_power_dbm},
          {"p_g_dbm", c.gbs_power_dbm},
          {"omega_n_db", c.noise_figure_db},
          {"noise_density_dbm_hz", c.noise_density_dbm_hz}};
}

ChannelParams channel_from_json(const json& j, const std::string& path) {
  using detail::number_field;
  ChannelParams c;
  c.alpha = number_field(j, "alpha", path);
  c.beta = number_field(j, "beta", path);
  c.eta = number_field(j, "eta", path);
  c.mu_los_db = number_field(j, "mu_los_db", path);
  c.mu_nlos_db = number_field(j, "mu_nlos_db", path);
  c.carrier_hz = number_field(j, "f_c_hz", path);
  c.uav_power_dbm = number_field(j, "p_d_dbm", path);
  c.gbs_power_dbm = number_field(j, "p_g_dbm", path);
  c.noise_figure_db = number_field(j, "omega_n_db", path);
  c.noise_density_dbm_hz =
      detail::number_field_or(j, "noise_density_dbm_hz", path, c.noise_density_dbm_hz);
  return c;
}

}  // namespace

void Scenario::validate() const {
  if (!(region.width > 0.0) || !(region.height > 0.0)) {
    throw DomainError("scenario: region must have positive extent");
  }
  if (users.empty()) throw DomainError("scenario: at least one user required");
  if (gbss.empty()) throw DomainError("scenario: at least one GBS required");
  channel.validate();
  tiers.validate();
  if (!(altitude.low > 0.0) || !(altitude.high > altitude.low)) {
    throw DomainError("scenario: altitude bracket must satisfy 0 < low < high");
  }
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (!users[i].allFinite() || !region.contains(users[i]) || users[i].z() != 0.0) {
      throw DomainError("scenario: user " + std::to_string(i) + " outside region");
    }
  }
  for (std::size_t j = 0; j < gbss.size(); ++j) {
    if (!gbss[j].position.allFinite() || !region.contains(gbss[j].position) ||
        gbss[j].position.z() != 0.0) {
      throw DomainError("scenario: GBS " + std::to_string(j) + " outside region");
    }
    if (!(gbss[j].bandwidth_hz > 0.0)) {
      throw DomainError("scenario: GBS " + std::to_string(j) + " bandwidth must be > 0");
    }
  }
  if (static_cast<std::size_t>(willingness.rows()) != users.size() ||
      static_cast<std::size_t>(willingness.cols()) != tiers.size()) {
    throw DomainError("scenario: willingness must be users x tiers");
  }
  for (Eigen::Index i = 0; i < willingness.rows(); ++i) {
    for (Eigen::Index k = 0; k < willingness.cols(); ++k) {
      const double phi = willingness(i, k);
      if (!std::isfinite(phi) || phi < 0.0 || (k > 0 && phi < willingness(i, k - 1))) {
        throw DomainError("scenario: willingness row " + std::to_string(i) +
                          " must be finite, >= 0 and nondecreasing");
      }
    }
  }
}

double Scenario::profit_upper_bound() const {
  // Summed last user first, the order the knapsack DP accumulates profits in,
  // so serving everyone at the top tier gives exactly this value.
  double total = 0.0;
  const Eigen::Index top = willingness.cols() - 1;
  for (Eigen::Index i = willingness.rows(); i-- > 0;) total += willingness(i, top);
  return total;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.region == b.region && a.users == b.users && a.gbss == b.gbss &&
         a.tiers == b.tiers && a.willingness.rows() == b.willingness.rows() &&
         a.willingness.cols() == b.willingness.cols() && a.willingness == b.willingness &&
         a.channel == b.channel && a.altitude == b.altitude && a.seed == b.seed &&
         a.meta == b.meta;
}

RateTiers tier_set(int id) {
  switch (id) {
    case 1:
      return {{1e6, 2e6}};
    case 2:
      return {{1e6, 2e6, 4e6}};
    case 3:
      return {{1e6, 2e6, 4e6, 8e6}};
    default:
      throw DomainError("unknown tier set " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
}

void GenSpec::validate() const {
  if (n < 1) throw DomainError("gen spec: n must be >= 1");
  if (m < 1) throw DomainError("gen spec: m must be >= 1");
  if (parent_count_min < 1 || parent_count_max < parent_count_min) {
    throw DomainError("gen spec: parent count range must satisfy 1 <= min <= max");
  }
  if (!(clustering_rate_min >= 0.0) || !(clustering_rate_max <= 1.0) ||
      clustering_rate_max < clustering_rate_min) {
    throw DomainError("gen spec: clustering rate range must lie in [0, 1]");
  }
  if (!(cluster_spread_m >= 0.0)) throw DomainError("gen spec: cluster spread must be >= 0");
  if (!(region.width > 0.0) || !(region.height > 0.0)) {
    throw DomainError("gen spec: region must have positive extent");
  }
  if (!(gbs_bandwidth_hz > 0.0)) throw DomainError("gen spec: GBS bandwidth must be > 0");
  tier_set(tier_set_id);
  channel.validate();
}

Eigen::MatrixXd gen_willingness(Rng& rng, const RateTiers& tiers, std::size_t n_users) {
  tiers.validate();
  const auto s = static_cast<Eigen::Index>(tiers.size());
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(n_users), s);
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    phi(i, 0) = tiers[0] / 1e6 * rng.uniform();
    for (Eigen::Index k = 1; k < s; ++k) {
      const double step = (tiers[static_cast<std::size_t>(k)] -
                           tiers[static_cast<std::size_t>(k - 1)]) / 1e6;
      phi(i, k) = phi(i, k - 1) + step * rng.uniform();
    }
  }
  return phi;
}

Scenario generate(const GenSpec& spec) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, StreamId::kScenario);

  Scenario sc;
  sc.region = spec.region;
  sc.tiers = tier_set(spec.tier_set_id);
  sc.channel = spec.channel;
  sc.altitude = spec.altitude;
  sc.seed = spec.seed;

  const int parents = rng.uniform_int(spec.parent_count_min, spec.parent_count_max);
  const double rate = rng.uniform(spec.clustering_rate_min, spec.clustering_rate_max);
  sc.meta = {spec.tier_set_id, parents, rate, spec.cluster_spread_m};

  std::vector<Point3> parent_points;
  for (int p = 0; p < parents; ++p) parent_points.push_back(uniform_point(rng, spec.region));

  const auto clustered = static_cast<int>(std::floor(rate * spec.n));
  sc.users.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < clustered; ++i) {
    const Point3& parent = parent_points[static_cast<std::size_t>(rng.uniform_int(0, parents - 1))];
    const double dx = spec.cluster_spread_m * rng.normal();
    const double dy = spec.cluster_spread_m * rng.normal();
    sc.users.emplace_back(std::clamp(parent.x() + dx, 0.0, spec.region.width),
                          std::clamp(parent.y() + dy, 0.0, spec.region.height), 0.0);
  }
  for (int i = clustered; i < spec.n; ++i) sc.users.push_back(uniform_point(rng, spec.region));

  for (int j = 0; j < spec.m; ++j) {
    sc.gbss.push_back({uniform_point(rng, spec.region), spec.gbs_bandwidth_hz});
  }

  sc.willingness = gen_willingness(rng, sc.tiers, sc.users.size());
  return sc;
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  json users = json::array();
  for (const auto& u : sc.users) users.push_back({u.x(), u.y()});
  json gbss = json::array();
  for (const auto& g : sc.gbss) gbss.push_back({g.position.x(), g.position.y(), g.bandwidth_hz});
  json willingness = json::array();
  for (Eigen::Index i = 0; i < sc.willingness.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < sc.willingness.cols(); ++k) row.push_back(sc.willingness(i, k));
    willingness.push_back(std::move(row));
  }
  return {{"schema", kScenarioSchema},
          {"region", {{"width_m", sc.region.width}, {"height_m", sc.region.height}}},
          {"channel", channel_to_json(sc.channel)},
          {"users", std::move(users)},
          {"gbss", std::move(gbss)},
          {"tiers_bps", sc.tiers.bps},
          {"willingness", std::move(willingness)},
          {"altitude_bracket_m", {sc.altitude.low, sc.altitude.high}},
          {"seed", sc.seed},
          {"metadata",
           {{"tier_set_id", sc.meta.tier_set_id},
            {"parent_count", sc.meta.parent_count},
            {"clustering_rate", sc.meta.clustering_rate},
            {"cluster_spread_m", sc.meta.cluster_spread_m}}}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  using namespace detail;
  const std::string root;
  if (!j.is_object()) throw SchemaError("/", "expected an object");

  const auto& schema = require(j, "schema", root);
  if (!schema.is_string() || schema.get<std::string>() != kScenarioSchema) {
    throw SchemaError("/schema", std::string("expected \"") + kScenarioSchema + "\"");
  }

  Scenario sc;
  const auto& region = require(j, "region", root);
  sc.region.width = number_field(region, "width_m", "/region");
  sc.region.height = number_field(region, "height_m", "/region");
  sc.channel = channel_from_json(require(j, "channel", root), "/channel");

  const auto& users = as_array(require(j, "users", root), "/users");
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto xy = as_number_array(users[i], child_path("/users", i), 2);
    sc.users.emplace_back(xy[0], xy[1], 0.0);
  }
  const auto& gbss = as_array(require(j, "gbss", root), "/gbss");
  for (std::size_t i = 0; i < gbss.size(); ++i) {
    const auto v = as_number_array(gbss[i], child_path("/gbss", i), 3);
    sc.gbss.push_back({Point3(v[0], v[1], 0.0), v[2]});
  }

  sc.tiers.bps = as_number_array(require(j, "tiers_bps", root), "/tiers_bps");

  const auto& rows = as_array(require(j, "willingness", root), "/willingness");
  sc.willingness.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(sc.tiers.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = as_number_array(rows[i], child_path("/willingness", i), sc.tiers.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      sc.willingness(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
  }

  const auto bracket =
      as_number_array(require(j, "altitude_bracket_m", root), "/altitude_bracket_m", 2);
  sc.altitude = {bracket[0], bracket[1]};

  const auto& seed = require(j, "seed", root);
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw SchemaError("/seed", "expected a non-negative integer");
  }
  sc.seed = seed.get<std::uint64_t>();

  if (j.contains("metadata")) {
    const auto& meta = j.at("metadata");
    if (!meta.is_object()) throw SchemaError("/metadata", "expected an object");
    if (meta.contains("tier_set_id")) {
      sc.meta.tier_set_id = static_cast<int>(as_integer(meta.at("tier_set_id"), "/metadata/tier_set_id"));
    }
    if (meta.contains("parent_count")) {
      sc.meta.parent_count = static_cast<int>(as_integer(meta.at("parent_count"), "/metadata/parent_count"));
    }
    sc.meta.clustering_rate = number_field_or(meta, "clustering_rate", "/metadata", 0.0);
    sc.meta.cluster_spread_m = number_field_or(meta, "cluster_spread_m", "/metadata", 0.0);
  }

  try {
    sc.validate();
  } catch (const DomainError& e) {
    throw SchemaError("/", e.what());
  }
  return sc;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << scenario_to_json(scenario).dump(2) << '\n';
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace uavbs
