#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavbs/errors.hpp"
#include "uavbs/experiment.hpp"
#include "uavbs/plots.hpp"

namespace uavbs {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "uavbs_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario five_users() {
  GenSpec spec;
  spec.n = 5;
  spec.m = 1;
  spec.region = {300.0, 300.0};
  spec.seed = 4;
  return generate(spec);
}

ExperimentPlan quick_plan() {
  ExperimentPlan plan;
  plan.n_values = {12};
  plan.tier_sets = {1};
  plan.replications = 2;
  plan.solvers = {Solver::kGss};
  plan.generator.region = {600.0, 600.0};
  plan.generator.m = 2;
  plan.search.grid_cols = 2;
  plan.search.grid_rows = 2;
  plan.search.eps_g = 20.0;
  plan.search.random_replications = 5;
  plan.workers = 1;
  return plan;
}

TEST(Solvers, NamesRoundTrip) {
  for (Solver s : {Solver::kGss, Solver::kRandom, Solver::kFixed, Solver::kOracle}) {
    EXPECT_EQ(parse_solver(solver_name(s)), s);
  }
  EXPECT_THROW(parse_solver("baron"), DomainError);
}

TEST(Coverage, HandArithmetic) {
  Scenario sc = five_users();
  PlacementSolution sol;
  EXPECT_EQ(coverage_metric(sc, sol), 0.0);
  sol.assignment.chosen = {{0, 0}, {2, 1}, {4, 2}};
  EXPECT_DOUBLE_EQ(coverage_metric(sc, sol), 7.0 / 20.0);
  for (int i = 0; i < 5; ++i) sol.assignment.chosen[i] = 2;
  EXPECT_EQ(coverage_metric(sc, sol), 1.0);
}

TEST(NormalizedProfit, UpperBoundIsTopTierSum) {
  const Scenario sc = five_users();
  const double bound = sc.profit_upper_bound();
  EXPECT_DOUBLE_EQ(bound, sc.willingness.col(2).sum());
  EXPECT_EQ(normalized_profit(sc, bound), 1.0);
  EXPECT_EQ(normalized_profit(sc, 0.0), 0.0);
  Scenario zero = sc;
  zero.willingness.setZero();
  EXPECT_EQ(normalized_profit(zero, 0.0), 0.0);
}

TEST(SingleTier, MeanRateAndRowMeanWillingness) {
  const Scenario sc = five_users();
  const Scenario single = single_tier_scenario(sc);
  ASSERT_EQ(single.tiers.size(), 1u);
  EXPECT_NEAR(single.tiers[0], 7e6 / 3.0, 1e-6);
  EXPECT_NEAR(single.tiers[0] / 1e6, 2.33, 0.005);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(single.willingness(i, 0), sc.willingness.row(i).mean());
  }
  EXPECT_NO_THROW(single.validate());
}

TEST(SingleTier, FlatWillingnessGivesNoImprovement) {
  Scenario sc = five_users();
  for (Eigen::Index i = 0; i < sc.willingness.rows(); ++i) {
    sc.willingness.row(i).setConstant(0.5 + 0.1 * static_cast<double>(i));
  }
  SearchConfig cfg;
  cfg.grid_cols = 3;
  cfg.grid_rows = 3;
  const auto cmp = single_tier_comparison(sc, cfg);
  EXPECT_DOUBLE_EQ(cmp.profit_single, sc.willingness.col(0).sum());
  ASSERT_TRUE(cmp.improvement.has_value());
  EXPECT_NEAR(*cmp.improvement, 0.0, 1e-12);
}

TEST(SingleTier, ZeroSingleProfitIsUndefined) {
  Scenario sc = five_users();
  sc.willingness.setZero();
  SearchConfig cfg;
  cfg.grid_cols = 1;
  cfg.grid_rows = 1;
  cfg.eps_g = 200.0;
  const auto cmp = single_tier_comparison(sc, cfg);
  EXPECT_FALSE(cmp.improvement.has_value());

  sc.tiers = RateTiers{{1e6}};
  sc.willingness = Eigen::MatrixXd::Ones(5, 1);
  EXPECT_THROW(single_tier_comparison(sc, cfg), DomainError);
}

TEST(Csv, GoldenHeaders) {
  EXPECT_EQ(kResultsHeader,
            "instance_id,seed,n,tier_set,solver,profit,normalized_profit,coverage,iterations,"
            "knapsack_solves");
  EXPECT_EQ(kImprovementsHeader,
            "instance_id,seed,n,tier_set,profit_multi,profit_single,improvement");
  EXPECT_EQ(results_csv({}), std::string(kResultsHeader) + "\n");
}

TEST(Csv, RoundTrip) {
  ReportRow row{"n50_t2_r03", 123456789012345ULL, 50, 2, Solver::kFixed, 31.25, 0.5, 0.375, 0, 4, 9.9};
  const auto rows = parse_results_csv(results_csv({row}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].instance_id, row.instance_id);
  EXPECT_EQ(rows[0].seed, row.seed);
  EXPECT_EQ(rows[0].solver, Solver::kFixed);
  EXPECT_EQ(rows[0].profit, 31.25);
  EXPECT_EQ(rows[0].knapsack_solves, 4);

  ImprovementRow a{"n50_t2_r00", 1, 50, 2, 3.0, 2.0, 0.5};
  ImprovementRow b{"n50_t2_r01", 2, 50, 2, 0.0, 0.0, std::nullopt};
  const auto text = improvements_csv({a, b});
  EXPECT_NE(text.find(",undefined\n"), std::string::npos);
  const auto imp = parse_improvements_csv(text);
  ASSERT_EQ(imp.size(), 2u);
  EXPECT_EQ(imp[0].improvement, 0.5);
  EXPECT_FALSE(imp[1].improvement.has_value());

  EXPECT_THROW(parse_results_csv("instance,seed\n"), SchemaError);
  EXPECT_THROW(parse_results_csv(std::string(kResultsHeader) + "\na,b\n"), SchemaError);
}

TEST(Plan, JsonDefaultsAndErrors) {
  const auto plan = plan_from_json(nlohmann::json::parse(R"({
    "n_values": [50, 75], "tier_sets": [1, 3], "replications": 4,
    "solvers": ["gss", "oracle"], "seed": 9, "single_tier": true,
    "generator": {"m": 3, "parent_count": [2, 4], "region_m": [900, 600]},
    "search": {"eps_g": 2.5, "grid": [5, 2], "centroid": "uniform"},
    "oracle": {"horizontal_step_m": 150}
  })"));
  EXPECT_EQ(plan.n_values, (std::vector<int>{50, 75}));
  EXPECT_EQ(plan.solvers, (std::vector<Solver>{Solver::kGss, Solver::kOracle}));
  EXPECT_EQ(plan.generator.m, 3);
  EXPECT_EQ(plan.generator.parent_count_max, 4);
  EXPECT_EQ(plan.generator.region.width, 900.0);
  EXPECT_EQ(plan.search.grid_cols, 5);
  EXPECT_EQ(plan.search.centroid, CentroidWeighting::kUniform);
  EXPECT_EQ(plan.oracle_horizontal_step_m, 150.0);
  EXPECT_EQ(plan.oracle_vertical_step_m, 10.0);
  EXPECT_TRUE(plan.single_tier);

  auto expect_path = [](const char* text, const std::string& path) {
    try {
      plan_from_json(nlohmann::json::parse(text));
      ADD_FAILURE() << "expected SchemaError at " << path;
    } catch (const SchemaError& e) {
      EXPECT_EQ(e.path(), path);
    }
  };
  expect_path(R"({"solvers": ["gss", "baron"]})", "/solvers/1");
  expect_path(R"({"n_values": [50, "x"]})", "/n_values/1");
  expect_path(R"({"search": {"grid": [5]}})", "/search/grid");
  expect_path(R"({"tier_sets": [7]})", "/");
}

TEST(RunExperiment, RowCountMatchesPlan) {
  ExperimentPlan plan = quick_plan();
  plan.n_values = {50};
  const auto report = run_experiment(plan);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(report.rows[0].instance_id, "n50_t1_r00");
  EXPECT_EQ(report.rows[1].instance_id, "n50_t1_r01");
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.solver, Solver::kGss);
    EXPECT_GE(r.normalized_profit, 0.0);
    EXPECT_LE(r.normalized_profit, 1.0);
    EXPECT_GE(r.coverage, 0.0);
    EXPECT_LE(r.coverage, 1.0);
    EXPECT_EQ(r.knapsack_solves, (2 * r.iterations + 1) * 4);
  }
}

TEST(RunExperiment, FullPlanEnumeratesTwoHundredTenProblems) {
  std::set<std::uint64_t> seeds;
  int count = 0;
  for (int n : {50, 75, 100, 125, 150, 175, 200}) {
    for (int t : {1, 2, 3}) {
      for (int rep = 0; rep < 10; ++rep) {
        seeds.insert(replication_seed(1, n, t, rep));
        ++count;
      }
    }
  }
  EXPECT_EQ(count, 210);
  EXPECT_EQ(seeds.size(), 210u);
}

TEST(RunExperiment, CsvBytesIdenticalAcrossRunsAndWorkerCounts) {
  ExperimentPlan plan = quick_plan();
  plan.solvers = {Solver::kGss, Solver::kRandom, Solver::kFixed, Solver::kOracle};
  plan.single_tier = true;
  plan.oracle_horizontal_step_m = 150.0;
  plan.oracle_vertical_step_m = 90.0;
  const auto a = temp_dir("det_a");
  const auto b = temp_dir("det_b");
  run_experiment(plan, a);
  plan.workers = 3;
  run_experiment(plan, b);
  EXPECT_EQ(slurp(a / "results.csv"), slurp(b / "results.csv"));
  EXPECT_EQ(slurp(a / "improvements.csv"), slurp(b / "improvements.csv"));
  EXPECT_TRUE(fs::exists(a / "timings.csv"));
  EXPECT_EQ(slurp(a / "failures.txt"), "");
  EXPECT_EQ(parse_results_csv(slurp(a / "results.csv")).size(), 8u);
  EXPECT_EQ(parse_improvements_csv(slurp(a / "improvements.csv")).size(), 2u);
}

TEST(RunExperiment, FailuresAreRecordedAndRunContinues) {
  ExperimentPlan plan = quick_plan();
  plan.solvers = {Solver::kGss, Solver::kOracle};
  plan.oracle_horizontal_step_m = 0.3;  // lattice far above the point cap
  const auto dir = temp_dir("failures");
  const auto report = run_experiment(plan, dir);
  EXPECT_TRUE(report.rows.empty());
  EXPECT_EQ(report.failures.size(), 2u);
  EXPECT_NE(slurp(dir / "failures.txt").find("n12_t1_r00"), std::string::npos);
}

TEST(Plots, OneRowReportAndFullInventory) {
  const auto dir = temp_dir("plots_one");
  ReportRow row{"n50_t1_r00", 1, 50, 1, Solver::kGss, 3.0, 0.6, 0.5, 13, 1350, 0.0};
  const auto files = render_plots({row}, {}, dir);
  ASSERT_EQ(files.size(), 2u);
  const auto svg = slurp(files[0]);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  std::vector<ReportRow> rows;
  std::vector<ImprovementRow> imps;
  for (int n : {50, 100}) {
    for (int t : {1, 2, 3}) {
      for (Solver s : {Solver::kGss, Solver::kRandom, Solver::kFixed}) {
        rows.push_back({instance_id(n, t, 0), 1, n, t, s, 1.0, 0.5, 0.4, 0, 1, 0.0});
      }
      imps.push_back({instance_id(n, t, 0), 1, n, t, 2.0, 1.0, 1.0});
    }
  }
  const auto full = render_plots(rows, imps, temp_dir("plots_full"));
  EXPECT_EQ(full.size(), 5u);
  EXPECT_THROW(render_plots({}, {}, dir), DomainError);
}

TEST(Plots, EscapesMarkup) {
  LineChart chart;
  chart.title = "a < b & \"c\"";
  chart.series.push_back({"<s>", {1.0}, {2.0}, false});
  const auto svg = render_svg(chart);
  EXPECT_EQ(svg.find("a < b"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; &quot;c&quot;"), std::string::npos);
}

}  // namespace
}  // namespace uavbs
