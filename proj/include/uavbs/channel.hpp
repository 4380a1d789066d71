#pragma once

// Air-to-ground channel: LoS probability, mixed LoS/NLoS pathloss, Shannon
// rates for user links and the GBS backhaul link.
//
// Units: powers in dBm, losses in dB, bandwidth in Hz, rates in bps.

#include <cstddef>
#include <span>

#include <Eigen/Core>

namespace uavbs {

/// (x, y, h) in meters; h is the altitude.
using Point3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;

struct ChannelParams {
  double alpha = 4.88;
  double beta = 0.43;  // per degree
  double eta = 2.5;
  double mu_los_db = 0.1;
  double mu_nlos_db = 21.0;
  double carrier_hz = 2e9;
  double uav_power_dbm = 36.0;
  double gbs_power_dbm = 46.0;
  double noise_figure_db = 6.0;
  // Thermal noise power spectral density. Set to 0 to evaluate the SNR bracket
  // without a thermal floor (the bare dB expression).
  double noise_density_dbm_hz = -174.0;

  /// Throws DomainError when an invariant is violated.
  void validate() const;

  /// Free-space constant plus NLoS excess: 10*eta*log10(4*pi*fc/c) + mu_nlos.
  double free_space_constant_db() const;
  /// mu_los - mu_nlos (<= 0).
  double excess_delta_db() const { return mu_los_db - mu_nlos_db; }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct GroundStation {
  Point3 position = Point3::Zero();
  double bandwidth_hz = 10e6;

  friend bool operator==(const GroundStation& a, const GroundStation& b) {
    return a.position == b.position && a.bandwidth_hz == b.bandwidth_hz;
  }
};

double horizontal_distance(const Point3& a, const Point3& b);
double distance(const Point3& a, const Point3& b);

/// Elevation angle in degrees, in [0, 90]. 90 directly overhead.
double elevation_angle(const Point3& uav, const Point3& ground);

double los_probability(const ChannelParams& params, double theta_deg);

double pathloss_user(const ChannelParams& params, const Point3& uav, const Point3& user);

/// Backhaul pathloss; the GBS link is always LoS.
double pathloss_gbs(const ChannelParams& params, const Point3& uav, const Point3& gbs);

/// Linear SNR times bandwidth, in Hz: 10^((p - L - noise_figure - N0)/10).
/// The rate of a link with bandwidth B is B*log2(1 + theta/B).
double snr_bandwidth_product(const ChannelParams& params, double tx_power_dbm,
                             double pathloss_db);

/// B*log2(1 + theta/B), stable for small and large B.
double shannon_rate(double snr_bandwidth_hz, double bandwidth_hz);

double data_rate(const ChannelParams& params, const Point3& uav, const Point3& user,
                 double bandwidth_hz);

double backhaul_capacity(const ChannelParams& params, const Point3& uav,
                         const Point3& gbs, double gbs_bandwidth_hz);

struct BestGbs {
  std::size_t index = 0;
  double capacity_bps = 0.0;
};

/// Argmax of backhaul capacity; ties go to the lowest index.
BestGbs best_gbs(const ChannelParams& params, const Point3& uav,
                 std::span<const GroundStation> gbss);

}  // namespace uavbs
