#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "uavbs/channel.hpp"
#include "uavbs/errors.hpp"

namespace uavbs {
namespace {

const ChannelParams kTable1{};

TEST(ElevationAngle, EqualLegsGiveFortyFiveDegrees) {
  EXPECT_NEAR(elevation_angle({100, 0, 100}, {0, 0, 0}), 45.0, 1e-12);
}

TEST(ElevationAngle, DirectlyOverheadIsNinety) {
  EXPECT_EQ(elevation_angle({3, 4, 100}, {3, 4, 0}), 90.0);
}

TEST(ElevationAngle, MatchesScalarArctan) {
  // 180/pi * atan(50/150), evaluated at 40 digits.
  EXPECT_NEAR(elevation_angle({150, 0, 50}, {0, 0, 0}), 18.434948822922011, 1e-12);
}

TEST(ElevationAngle, CoincidentPointsAreRejected) {
  EXPECT_THROW(elevation_angle({1, 2, 0}, {1, 2, 0}), GeometryError);
}

TEST(LosProbability, ExponentVanishesAtThetaEqualAlpha) {
  EXPECT_NEAR(los_probability(kTable1, kTable1.alpha), 1.0 / (1.0 + 4.88), 1e-15);
  EXPECT_NEAR(los_probability(kTable1, 4.88), 0.170068, 1e-6);
}

TEST(LosProbability, ReferenceValues) {
  EXPECT_NEAR(los_probability(kTable1, 45.0), 0.99999984291125511, 1e-15);
  EXPECT_NEAR(los_probability(kTable1, 0.0), 1.0 / (1.0 + 4.88 * std::exp(4.88 * 0.43)), 1e-15);
}

TEST(LosProbability, StrictlyIncreasingInsideUnitInterval) {
  double prev = 0.0;
  for (int deg = 0; deg <= 90; ++deg) {
    const double p = los_probability(kTable1, deg);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    if (deg > 0) EXPECT_GT(p, prev) << deg;
    prev = p;
  }
  EXPECT_THROW(los_probability(kTable1, 91.0), DomainError);
}

TEST(PathlossUser, FreeSpaceTermVanishesAtReferenceDistance) {
  const double d0 = kSpeedOfLight / (4.0 * std::numbers::pi * kTable1.carrier_hz);
  // 45 degree geometry at distance d0
  const double leg = d0 / std::sqrt(2.0);
  const Point3 uav(leg, 0, leg);
  const Point3 user(0, 0, 0);
  // eta * 10log10(4 pi fc d0 / c) = 0, so L = mu_nlos + B * P_LoS
  const double expected =
      kTable1.mu_nlos_db + kTable1.excess_delta_db() * los_probability(kTable1, 45.0);
  EXPECT_NEAR(pathloss_user(kTable1, uav, user), expected, 1e-9);
}

TEST(PathlossUser, TermByTermReference) {
  EXPECT_NEAR(pathloss_user(kTable1, {0, 0, 100}, {100, 0, 0}), 101.94835714790828, 1e-9);
  const testing::ChannelOracle oracle{kTable1};
  EXPECT_NEAR(pathloss_user(kTable1, {0, 0, 100}, {100, 0, 0}),
              static_cast<double>(oracle.user_loss({0, 0, 100}, {100, 0, 0})), 1e-9);
}

TEST(PathlossUser, EqualExcessLossesRemoveAngleDependence) {
  ChannelParams p = kTable1;
  p.mu_los_db = p.mu_nlos_db;
  // same distance, different elevation angles
  const double low = pathloss_user(p, {300, 400, 0.001}, {0, 0, 0});
  const double high = pathloss_user(p, {0, 0, 500}, {0, 0, 0});
  EXPECT_NEAR(low, high, 1e-9);
}

TEST(PathlossUser, IncreasesAlongFixedElevationRay) {
  for (double angle_deg : {5.0, 30.0, 60.0, 89.0}) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    double prev = -1e300;
    for (int step = 1; step <= 200; ++step) {
      const double d = 10.0 * step;
      const double loss = pathloss_user(kTable1, {d * std::cos(a), 0, d * std::sin(a)}, {0, 0, 0});
      EXPECT_GT(loss, prev);
      prev = loss;
    }
  }
  EXPECT_THROW(pathloss_user(kTable1, {1, 1, 0}, {1, 1, 0}), GeometryError);
}

TEST(PathlossGbs, IsUserPathlossWithCertainLos) {
  const Point3 uav(120, -40, 90);
  const Point3 gbs(600, 800, 0);
  const double d = (uav - gbs).norm();
  EXPECT_NEAR(pathloss_gbs(kTable1, uav, gbs),
              kTable1.free_space_constant_db() + 25.0 * std::log10(d) + kTable1.excess_delta_db(),
              1e-12);
  EXPECT_NEAR(pathloss_gbs(kTable1, {0, 0, 1}, {0, 0, 0}),
              kTable1.free_space_constant_db() + kTable1.excess_delta_db(), 1e-12);
  EXPECT_NEAR(pathloss_gbs(kTable1, {0, 0, 100}, {500, 500, 0}), 119.53010612017795, 1e-9);
  EXPECT_THROW(pathloss_gbs(kTable1, gbs, gbs), GeometryError);
}

TEST(DataRate, ReferenceValue) {
  // two-step hand calculation: S^u in dB, then Shannon
  EXPECT_NEAR(data_rate(kTable1, {0, 0, 100}, {50, 0, 0}, 1e6), 14816894.340755757, 1e-3);
}

TEST(DataRate, VanishesAtZeroBandwidthAndIsConcave) {
  const Point3 uav(0, 0, 120);
  const Point3 user(250, 80, 0);
  EXPECT_LT(data_rate(kTable1, uav, user, 1e-3), 1.0);
  for (double b : {1e3, 1e5, 1e6, 5e6}) {
    EXPECT_LT(data_rate(kTable1, uav, user, 2 * b), 2 * data_rate(kTable1, uav, user, b));
  }
  EXPECT_THROW(data_rate(kTable1, uav, user, 0.0), DomainError);
  EXPECT_THROW(data_rate(kTable1, uav, user, -5.0), DomainError);
}

TEST(DataRate, BoundedByCeilingAndApproachesIt) {
  const Point3 uav(0, 0, 300);
  const Point3 user(900, 700, 0);
  const double theta =
      snr_bandwidth_product(kTable1, kTable1.uav_power_dbm, pathloss_user(kTable1, uav, user));
  const double ceiling = theta / std::numbers::ln2;
  for (double b = 1e3; b <= 1e10; b *= 10) {
    EXPECT_LT(data_rate(kTable1, uav, user, b), ceiling);
  }
  EXPECT_GT(data_rate(kTable1, uav, user, 1e4 * theta), 0.99 * ceiling);
}

TEST(DataRate, SecondDifferencesNegativeOnBandwidthLattice) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coord(-1500, 1500);
  std::uniform_real_distribution<double> alt(20, 500);
  for (int trial = 0; trial < 20; ++trial) {
    const Point3 uav(coord(gen), coord(gen), alt(gen));
    const Point3 user(coord(gen), coord(gen), 0);
    const double step = (10e6 - 10e3) / 199.0;
    for (int i = 1; i < 199; ++i) {
      const double b = 10e3 + i * step;
      const double d2 = data_rate(kTable1, uav, user, b + step) -
                        2 * data_rate(kTable1, uav, user, b) +
                        data_rate(kTable1, uav, user, b - step);
      ASSERT_LT(d2, 0.0);
    }
  }
}

TEST(BackhaulCapacity, ReferenceAndMonotonicity) {
  const Point3 gbs(0, 0, 0);
  EXPECT_NEAR(backhaul_capacity(kTable1, {0, 0, 100}, gbs, 10e6), 152192922.928769, 1e-2);

  ChannelParams louder = kTable1;
  louder.gbs_power_dbm += 3.0;
  EXPECT_GT(backhaul_capacity(louder, {40, 0, 100}, gbs, 10e6),
            backhaul_capacity(kTable1, {40, 0, 100}, gbs, 10e6));
  EXPECT_GT(backhaul_capacity(kTable1, {40, 0, 100}, gbs, 10e6),
            backhaul_capacity(kTable1, {80, 0, 200}, gbs, 10e6));
  EXPECT_THROW(backhaul_capacity(kTable1, {0, 0, 100}, gbs, 0.0), DomainError);
}

TEST(BestGbs, SingleStationAndCloserWins) {
  const std::vector<GroundStation> one{{Point3(100, 100, 0), 10e6}};
  EXPECT_EQ(best_gbs(kTable1, {0, 0, 100}, one).index, 0u);

  const std::vector<GroundStation> two{{Point3(800, 0, 0), 10e6}, {Point3(200, 0, 0), 10e6}};
  EXPECT_EQ(best_gbs(kTable1, {0, 0, 100}, two).index, 1u);

  const std::vector<GroundStation> tied{{Point3(100, 0, 0), 10e6}, {Point3(-100, 0, 0), 10e6}};
  EXPECT_EQ(best_gbs(kTable1, {0, 0, 100}, tied).index, 0u);

  EXPECT_THROW(best_gbs(kTable1, {0, 0, 100}, std::vector<GroundStation>{}), DomainError);
}

TEST(BestGbs, MatchesExhaustiveScan) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> coord(0, 1500);
  std::uniform_real_distribution<double> alt(50, 500);
  const testing::ChannelOracle oracle{kTable1};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GroundStation> gbss;
    for (int j = 0; j < 4; ++j) gbss.push_back({Point3(coord(gen), coord(gen), 0), 10e6});
    const Point3 uav(coord(gen), coord(gen), alt(gen));
    std::size_t arg = 0;
    long double best = -1;
    for (std::size_t j = 0; j < gbss.size(); ++j) {
      const long double c = oracle.rate(kTable1.gbs_power_dbm,
                                        oracle.gbs_loss(uav, gbss[j].position), 10e6L);
      if (c > best) {
        best = c;
        arg = j;
      }
    }
    const BestGbs got = best_gbs(kTable1, uav, gbss);
    EXPECT_EQ(got.index, arg);
    EXPECT_NEAR(got.capacity_bps, static_cast<double>(best), 1e-6 * static_cast<double>(best));
  }
}

TEST(ChannelParams, ValidateRejectsBadConstants) {
  ChannelParams p;
  EXPECT_NO_THROW(p.validate());
  p.mu_los_db = 30.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = {};
  p.alpha = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = {};
  p.carrier_hz = -1.0;
  EXPECT_THROW(p.validate(), DomainError);
}

}  // namespace
}  // namespace uavbs
