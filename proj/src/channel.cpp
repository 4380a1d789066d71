#include "uavbs/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "uavbs/errors.hpp"

namespace uavbs {

namespace {

void require_positive_distance(double d, const char* what) {
  if (!(d > 0.0)) {
    throw GeometryError(std::string(what) + ": zero distance between endpoints");
  }
}

}  // namespace

void ChannelParams::validate() const {
  auto fail = [](const char* field) {
    throw DomainError(std::string("invalid channel parameter: ") + field);
  };
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha");
  if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta");
  if (!(eta > 0.0) || !std::isfinite(eta)) fail("eta");
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) fail("f_c");
  if (!std::isfinite(mu_los_db) || !std::isfinite(mu_nlos_db) || mu_nlos_db < mu_los_db) {
    fail("mu_nlos must be >= mu_los");
  }
  if (!std::isfinite(uav_power_dbm)) fail("p_d");
  if (!std::isfinite(gbs_power_dbm)) fail("p_g");
  if (!std::isfinite(noise_figure_db)) fail("omega_n");
  if (!std::isfinite(noise_density_dbm_hz)) fail("noise_density");
}

double ChannelParams::free_space_constant_db() const {
  return 10.0 * eta * std::log10(4.0 * std::numbers::pi * carrier_hz / kSpeedOfLight) +
         mu_nlos_db;
}

double horizontal_distance(const Point3& a, const Point3& b) {
  return (a.head<2>() - b.head<2>()).norm();
}

double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

double elevation_angle(const Point3& uav, const Point3& ground) {
  const double r = horizontal_distance(uav, ground);
  const double dh = std::abs(uav.z() - ground.z());
  if (r == 0.0) {
    if (dh == 0.0) throw GeometryError("elevation_angle: coincident points");
    return 90.0;
  }
  return std::atan2(dh, r) * 180.0 / std::numbers::pi;
}

double los_probability(const ChannelParams& params, double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) {
    throw DomainError("los_probability: elevation angle outside [0, 90]");
  }
  return 1.0 / (1.0 + params.alpha * std::exp(-params.beta * (theta_deg - params.alpha)));
}

double pathloss_user(const ChannelParams& params, const Point3& uav, const Point3& user) {
  const double d = distance(uav, user);
  require_positive_distance(d, "pathloss_user");
  const double p_los = los_probability(params, elevation_angle(uav, user));
  return params.free_space_constant_db() + 10.0 * params.eta * std::log10(d) +
         params.excess_delta_db() * p_los;
}

double pathloss_gbs(const ChannelParams& params, const Point3& uav, const Point3& gbs) {
  const double d = distance(uav, gbs);
  require_positive_distance(d, "pathloss_gbs");
  return params.free_space_constant_db() + 10.0 * params.eta * std::log10(d) +
         params.excess_delta_db();
}

double snr_bandwidth_product(const ChannelParams& params, double tx_power_dbm,
                             double pathloss_db) {
  return std::pow(10.0, (tx_power_dbm - pathloss_db - params.noise_figure_db -
                         params.noise_density_dbm_hz) /
                            10.0);
}

double shannon_rate(double snr_bandwidth_hz, double bandwidth_hz) {
  return bandwidth_hz * std::log1p(snr_bandwidth_hz / bandwidth_hz) / std::numbers::ln2;
}

double data_rate(const ChannelParams& params, const Point3& uav, const Point3& user,
                 double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("data_rate: bandwidth must be > 0");
  const double theta =
      snr_bandwidth_product(params, params.uav_power_dbm, pathloss_user(params, uav, user));
  return shannon_rate(theta, bandwidth_hz);
}

double backhaul_capacity(const ChannelParams& params, const Point3& uav,
                         const Point3& gbs, double gbs_bandwidth_hz) {
  if (!(gbs_bandwidth_hz > 0.0)) {
    throw DomainError("backhaul_capacity: GBS bandwidth must be > 0");
  }
  const double theta =
      snr_bandwidth_product(params, params.gbs_power_dbm, pathloss_gbs(params, uav, gbs));
  return shannon_rate(theta, gbs_bandwidth_hz);
}

BestGbs best_gbs(const ChannelParams& params, const Point3& uav,
                 std::span<const GroundStation> gbss) {
  if (gbss.empty()) throw DomainError("best_gbs: no ground stations");
  BestGbs best;
  best.capacity_bps = -1.0;
  for (std::size_t j = 0; j < gbss.size(); ++j) {
    const double c = backhaul_capacity(params, uav, gbss[j].position, gbss[j].bandwidth_hz);
    if (c > best.capacity_bps) {
      best = {j, c};
    }
  }
  return best;
}

}  // namespace uavbs
