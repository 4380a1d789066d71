#pragma once

// Experiment pipeline: scenario batches, solver runs, the reported metrics
// (normalized profit, coverage, single-tier improvement), CSV tables and plots.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uavbs/placement.hpp"
#include "uavbs/scenario.hpp"

namespace uavbs {

enum class Solver { kGss, kRandom, kFixed, kOracle };

std::string_view solver_name(Solver solver);
/// Throws DomainError for unknown names.
Solver parse_solver(std::string_view name);

/// Runs one solver. The oracle uses `oracle_lattice`.
PlacementSolution run_solver(Solver solver, const Scenario& sc, const SearchConfig& cfg,
                             const OracleLattice& oracle_lattice);

/// Sum of delivered tier rates over n * delta_s.
double coverage_metric(const Scenario& sc, const PlacementSolution& sol);

/// profit / sum_i phi_is; 0 when the bound is 0.
double normalized_profit(const Scenario& sc, double profit);

/// Same users and GBSs with a single tier at the mean rate and each user's
/// willingness equal to the mean of their row.
Scenario single_tier_scenario(const Scenario& sc);

struct SingleTierComparison {
  double profit_multi = 0.0;
  double profit_single = 0.0;
  std::optional<double> improvement;  // unset when profit_single == 0
  PlacementSolution multi;
  PlacementSolution single;
};

/// Solves the scenario and its single-tier counterpart with gss_optimize.
SingleTierComparison single_tier_comparison(const Scenario& sc, const SearchConfig& cfg);

struct ExperimentPlan {
  std::vector<int> n_values{50};
  std::vector<int> tier_sets{1};
  int replications = 10;
  std::vector<Solver> solvers{Solver::kGss, Solver::kRandom, Solver::kFixed};
  std::uint64_t seed = 1;
  bool single_tier = false;
  GenSpec generator;  // n, tier_set_id and seed are set per replication
  SearchConfig search;
  double oracle_horizontal_step_m = 75.0;
  double oracle_vertical_step_m = 10.0;
  unsigned workers = 0;  // replications in flight; 0: UAVBS_WORKERS or hardware

  void validate() const;
};

/// Throws SchemaError naming the bad field.
ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan(const std::filesystem::path& path);

struct ReportRow {
  std::string instance_id;
  std::uint64_t seed = 0;
  int n = 0;
  int tier_set = 0;
  Solver solver = Solver::kGss;
  double profit = 0.0;
  double normalized_profit = 0.0;
  double coverage = 0.0;
  int iterations = 0;
  long long knapsack_solves = 0;
  double wall_time_s = 0.0;
};

struct ImprovementRow {
  std::string instance_id;
  std::uint64_t seed = 0;
  int n = 0;
  int tier_set = 0;
  double profit_multi = 0.0;
  double profit_single = 0.0;
  std::optional<double> improvement;
};

struct ExperimentFailure {
  std::string instance_id;
  std::string message;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<ImprovementRow> improvements;
  std::vector<ExperimentFailure> failures;
};

/// Seed of replication `rep` of the (n, tier_set) instance.
std::uint64_t replication_seed(std::uint64_t plan_seed, int n, int tier_set, int rep);
std::string instance_id(int n, int tier_set, int rep);

/// Runs the plan. When out_dir is non-empty writes results.csv,
/// improvements.csv (single-tier plans), timings.csv and failures.txt there.
/// results.csv and improvements.csv are byte-identical across runs of the
/// same plan; timings.csv is not.
ExperimentReport run_experiment(const ExperimentPlan& plan,
                                const std::filesystem::path& out_dir = {});

inline constexpr std::string_view kResultsHeader =
    "instance_id,seed,n,tier_set,solver,profit,normalized_profit,coverage,iterations,"
    "knapsack_solves";
inline constexpr std::string_view kImprovementsHeader =
    "instance_id,seed,n,tier_set,profit_multi,profit_single,improvement";

std::string results_csv(const std::vector<ReportRow>& rows);
std::string improvements_csv(const std::vector<ImprovementRow>& rows);
std::vector<ReportRow> parse_results_csv(const std::string& text);
std::vector<ImprovementRow> parse_improvements_csv(const std::string& text);

/// Writes normalized_profit_tiers<t>.svg per tier set, coverage_profit.svg and,
/// when improvements are given, improvement.svg. Returns the files written.
std::vector<std::filesystem::path> render_plots(const std::vector<ReportRow>& rows,
                                                const std::vector<ImprovementRow>& improvements,
                                                const std::filesystem::path& out_dir);

}  // namespace uavbs
