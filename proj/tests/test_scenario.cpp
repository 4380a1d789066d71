#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "uavbs/errors.hpp"
#include "uavbs/scenario.hpp"

namespace uavbs {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "uavbs_tests";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Rng, EngineMatchesStandardSequence) {
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next_u64();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, StreamsAreDistinctAndReproducible) {
  auto a = Rng::stream(42, StreamId::kScenario);
  auto b = Rng::stream(42, StreamId::kRandomPlacement);
  auto c = Rng::stream(42, StreamId::kScenario);
  const auto xa = a.next_u64();
  EXPECT_NE(xa, b.next_u64());
  EXPECT_EQ(xa, c.next_u64());
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
}

TEST(Rng, DistributionRanges) {
  Rng rng(1);
  double sum = 0.0;
  std::set<int> seen;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const int k = rng.uniform_int(3, 7);
    ASSERT_GE(k, 3);
    ASSERT_LE(k, 7);
    seen.insert(k);
    sum += rng.normal();
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_LT(std::abs(sum / 20000), 0.05);
}

TEST(TierSet, BuiltInSets) {
  EXPECT_EQ(tier_set(1).bps, (std::vector<double>{1e6, 2e6}));
  EXPECT_EQ(tier_set(2).bps, (std::vector<double>{1e6, 2e6, 4e6}));
  EXPECT_EQ(tier_set(3).bps, (std::vector<double>{1e6, 2e6, 4e6, 8e6}));
  EXPECT_THROW(tier_set(0), DomainError);
  EXPECT_THROW(tier_set(4), DomainError);
}

TEST(Generate, DeterministicPerSeed) {
  GenSpec spec;
  spec.seed = 17;
  const auto a = generate(spec);
  const auto b = generate(spec);
  EXPECT_EQ(a, b);
  EXPECT_EQ(scenario_to_json(a).dump(), scenario_to_json(b).dump());
  spec.seed = 18;
  EXPECT_FALSE(generate(spec) == a);
}

TEST(Generate, DefaultsProduceValidScenario) {
  GenSpec spec;
  spec.seed = 3;
  const auto sc = generate(spec);
  EXPECT_NO_THROW(sc.validate());
  EXPECT_EQ(sc.n(), 100u);
  EXPECT_EQ(sc.m(), 4u);
  EXPECT_EQ(sc.tiers, tier_set(2));
  EXPECT_GE(sc.meta.parent_count, 3);
  EXPECT_LE(sc.meta.parent_count, 7);
  EXPECT_GE(sc.meta.clustering_rate, 0.5);
  EXPECT_LT(sc.meta.clustering_rate, 0.9);
  for (const auto& g : sc.gbss) EXPECT_EQ(g.bandwidth_hz, 10e6);
}

TEST(Generate, ClusteredCountFollowsRate) {
  GenSpec spec;
  spec.n = 100;
  spec.parent_count_min = spec.parent_count_max = 5;
  spec.clustering_rate_min = spec.clustering_rate_max = 0.7;
  spec.cluster_spread_m = 0.0;
  spec.seed = 11;
  const auto sc = generate(spec);
  // with zero spread the clustered users sit exactly on the parent points
  std::set<std::pair<double, double>> clustered;
  for (std::size_t i = 0; i < 70; ++i) clustered.insert({sc.users[i].x(), sc.users[i].y()});
  EXPECT_LE(clustered.size(), 5u);
  std::set<std::pair<double, double>> rest;
  for (std::size_t i = 70; i < 100; ++i) {
    EXPECT_EQ(clustered.count({sc.users[i].x(), sc.users[i].y()}), 0u);
    rest.insert({sc.users[i].x(), sc.users[i].y()});
  }
  EXPECT_EQ(rest.size(), 30u);
}

TEST(Generate, DegenerateClusterAndUniformExtremes) {
  GenSpec spec;
  spec.n = 25;
  spec.parent_count_min = spec.parent_count_max = 1;
  spec.clustering_rate_min = spec.clustering_rate_max = 1.0;
  spec.cluster_spread_m = 0.0;
  const auto point = generate(spec);
  for (const auto& u : point.users) EXPECT_EQ(u, point.users.front());

  spec.clustering_rate_min = spec.clustering_rate_max = 0.0;
  spec.cluster_spread_m = 50.0;
  const auto uniform = generate(spec);
  std::set<std::pair<double, double>> distinct;
  for (const auto& u : uniform.users) distinct.insert({u.x(), u.y()});
  EXPECT_EQ(distinct.size(), 25u);
}

TEST(Generate, ClusteredUsersClippedToRegion) {
  GenSpec spec;
  spec.n = 200;
  spec.cluster_spread_m = 2000.0;
  spec.region = {300.0, 200.0};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    spec.seed = seed;
    const auto sc = generate(spec);
    for (const auto& u : sc.users) EXPECT_TRUE(sc.region.contains(u));
  }
}

TEST(Generate, RejectsInvalidSpec) {
  GenSpec spec;
  spec.n = 0;
  EXPECT_THROW(generate(spec), DomainError);
  spec = {};
  spec.clustering_rate_max = 1.5;
  EXPECT_THROW(generate(spec), DomainError);
  spec = {};
  spec.parent_count_min = 0;
  EXPECT_THROW(generate(spec), DomainError);
  spec = {};
  spec.tier_set_id = 9;
  EXPECT_THROW(generate(spec), DomainError);
}

TEST(Willingness, SingleTierBoundAndMonotoneRows) {
  Rng rng(5);
  const auto one = gen_willingness(rng, RateTiers{{1e6}}, 1000);
  EXPECT_GE(one.minCoeff(), 0.0);
  EXPECT_LT(one.maxCoeff(), 1.0);

  const RateTiers tiers = tier_set(3);
  const auto phi = gen_willingness(rng, tiers, 1000);
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index k = 1; k < phi.cols(); ++k) EXPECT_GE(phi(i, k), phi(i, k - 1));
    EXPECT_LE(phi(i, phi.cols() - 1), 8.0);
  }
}

TEST(Willingness, FirstTierMeanIsHalfTheRate) {
  Rng rng(12345);
  const auto phi = gen_willingness(rng, tier_set(2), 100000);
  EXPECT_NEAR(phi.col(0).mean(), 0.5, 0.005);
}

TEST(ScenarioJson, RoundTripIsExact) {
  for (int t = 1; t <= 3; ++t) {
    GenSpec spec;
    spec.n = 37;
    spec.tier_set_id = t;
    spec.seed = 100 + static_cast<std::uint64_t>(t);
    const auto sc = generate(spec);
    const auto path = temp_file("roundtrip_" + std::to_string(t) + ".json");
    save_scenario(sc, path);
    EXPECT_EQ(load_scenario(path), sc);
  }
}

TEST(ScenarioJson, MissingTiersNamesTheField) {
  auto j = scenario_to_json(generate(GenSpec{}));
  j.erase("tiers_bps");
  try {
    scenario_from_json(j);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "/tiers_bps");
    EXPECT_NE(std::string(e.what()).find("tiers_bps"), std::string::npos);
  }
}

TEST(ScenarioJson, BadFieldsReportPaths) {
  const auto good = scenario_to_json(generate(GenSpec{}));
  auto expect_path = [](const nlohmann::json& j, const std::string& path) {
    try {
      scenario_from_json(j);
      ADD_FAILURE() << "expected SchemaError at " << path;
    } catch (const SchemaError& e) {
      EXPECT_EQ(e.path(), path);
    }
  };
  auto j = good;
  j["users"][3] = {1.0};
  expect_path(j, "/users/3");
  j = good;
  j["channel"].erase("eta");
  expect_path(j, "/channel/eta");
  j = good;
  j["schema"] = "uavbs.scenario/0";
  expect_path(j, "/schema");
  j = good;
  j["willingness"][0][1] = "high";
  expect_path(j, "/willingness/0/1");
  j = good;
  j["seed"] = -4;
  expect_path(j, "/seed");
  j = good;
  j["users"][0] = {99999.0, 0.0};  // outside the region
  expect_path(j, "/");
}

TEST(ScenarioJson, MalformedFileIsSchemaError) {
  const auto path = temp_file("broken.json");
  std::ofstream(path) << "{\"schema\": ";
  EXPECT_THROW(load_scenario(path), SchemaError);
}

TEST(ScenarioJson, HandWrittenFixtureLoads) {
  const auto sc = load_scenario(fs::path(UAVBS_FIXTURE_DIR) / "two_users.json");
  EXPECT_NO_THROW(sc.validate());
  EXPECT_EQ(sc.n(), 2u);
  EXPECT_EQ(sc.m(), 1u);
  EXPECT_EQ(sc.region.width, 400.0);
  EXPECT_EQ(sc.tiers.bps, (std::vector<double>{1e6, 2e6}));
  EXPECT_EQ(sc.willingness(1, 1), 1.6);
  EXPECT_EQ(sc.channel, ChannelParams{});
  EXPECT_EQ(sc.seed, 7u);
  EXPECT_DOUBLE_EQ(sc.profit_upper_bound(), 2.7);
}

TEST(Scenario, ValidateCatchesBrokenInvariants) {
  auto sc = generate(GenSpec{});
  EXPECT_NO_THROW(sc.validate());
  auto bad = sc;
  bad.willingness(0, 2) = bad.willingness(0, 1) - 0.1;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = sc;
  bad.gbss.clear();
  EXPECT_THROW(bad.validate(), DomainError);
  bad = sc;
  bad.altitude = {500.0, 50.0};
  EXPECT_THROW(bad.validate(), DomainError);
  bad = sc;
  bad.users[0].z() = 3.0;
  EXPECT_THROW(bad.validate(), DomainError);
}

}  // namespace
}  // namespace uavbs
