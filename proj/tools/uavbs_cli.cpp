// uavbs: command-line front end.
//
//   uavbs generate   --out PATH [--count K] [--n N] [--m M] [--tier-set T] [--seed S] ...
//   uavbs solve      --scenario PATH --solver gss|random|fixed|oracle --out PATH [...]
//   uavbs experiment --plan PATH [--out DIR]
//   uavbs report     --csv PATH --plots DIR
//
// Worker threads default to $UAVBS_WORKERS, else the hardware concurrency.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavbs/errors.hpp"
#include "uavbs/experiment.hpp"
#include "uavbs/parallel.hpp"
#include "uavbs/placement.hpp"
#include "uavbs/scenario.hpp"

namespace fs = std::filesystem;
using namespace uavbs;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

// "10x5" -> {10, 5}
std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw CLI::ValidationError("--grid", "expected COLSxROWS, e.g. 10x5");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--grid", "expected COLSxROWS, e.g. 10x5");
  }
}

struct GenerateArgs {
  GenSpec spec;
  int count = 1;
  fs::path out;
  std::vector<int> parents;
  std::vector<double> rates;
  std::vector<double> region;
  std::vector<double> altitude;
};

int run_generate(GenerateArgs& a) {
  if (!a.parents.empty()) {
    a.spec.parent_count_min = a.parents[0];
    a.spec.parent_count_max = a.parents[1];
  }
  if (!a.rates.empty()) {
    a.spec.clustering_rate_min = a.rates[0];
    a.spec.clustering_rate_max = a.rates[1];
  }
  if (!a.region.empty()) a.spec.region = {a.region[0], a.region[1]};
  if (!a.altitude.empty()) a.spec.altitude = {a.altitude[0], a.altitude[1]};

  if (a.count == 1 && a.out.extension() == ".json") {
    const Scenario sc = generate(a.spec);
    save_scenario(sc, a.out);
    std::cout << a.out.string() << '\n';
    return 0;
  }
  fs::create_directories(a.out);
  const std::uint64_t base = a.spec.seed;
  for (int i = 0; i < a.count; ++i) {
    a.spec.seed = base + static_cast<std::uint64_t>(i);
    char name[64];
    std::snprintf(name, sizeof name, "scenario_n%d_t%d_s%llu.json", a.spec.n, a.spec.tier_set_id,
                  static_cast<unsigned long long>(a.spec.seed));
    save_scenario(generate(a.spec), a.out / name);
    std::cout << (a.out / name).string() << '\n';
  }
  return 0;
}

struct SolveArgs {
  fs::path scenario;
  std::string solver = "gss";
  fs::path out;
  std::string grid = "10x5";
  double eps_g = 1.0;
  double rate_unit = 0.5e6;
  double bw_unit = 10e3;
  double bw_tol = kDefaultBandwidthTolHz;
  std::uint64_t seed = 0;
  int replications = 50;
  std::string centroid = "willingness";
  std::vector<double> altitude;
  std::vector<double> oracle_steps{75.0, 10.0};
  unsigned workers = 0;
};

int run_solve(const SolveArgs& a) {
  const Scenario sc = load_scenario(a.scenario);
  SearchConfig cfg;
  std::tie(cfg.grid_cols, cfg.grid_rows) = parse_grid(a.grid);
  cfg.eps_g = a.eps_g;
  cfg.dp.rate_unit_bps = a.rate_unit;
  cfg.dp.bw_unit_hz = a.bw_unit;
  cfg.bw_tol_hz = a.bw_tol;
  cfg.seed = a.seed;
  cfg.random_replications = a.replications;
  cfg.centroid = a.centroid == "uniform" ? CentroidWeighting::kUniform
                                         : CentroidWeighting::kTopTierWillingness;
  if (!a.altitude.empty()) cfg.altitude = AltitudeBracket{a.altitude[0], a.altitude[1]};
  cfg.workers = a.workers;
  cfg.validate();

  const Solver solver = parse_solver(a.solver);
  const OracleLattice lattice =
      lattice_from_steps(sc.region, cfg.bracket(sc), a.oracle_steps[0], a.oracle_steps[1]);
  const PlacementSolution sol = run_solver(solver, sc, cfg, lattice);
  const AuditReport audit = audit_solution(sc, sol, cfg);

  nlohmann::json j = solution_to_json(sc, sol);
  j["solver"] = solver_name(solver);
  j["scenario"] = a.scenario.string();
  j["normalized_profit"] = normalized_profit(sc, sol.profit);
  j["coverage"] = coverage_metric(sc, sol);
  j["audit"] = {{"ok", audit.ok()}, {"violations", audit.violations}};
  write_json(a.out, j);

  std::cout << solver_name(solver) << ": profit " << sol.profit << " (normalized "
            << normalized_profit(sc, sol.profit) << "), " << sol.assignment.chosen.size() << "/"
            << sc.n() << " users served, UAV at (" << sol.uav.x() << ", " << sol.uav.y() << ", "
            << sol.uav.z() << ")\n";
  for (const auto& v : audit.violations) std::cerr << "audit: " << v << '\n';
  return audit.ok() ? 0 : 3;
}

int run_experiment_cmd(const fs::path& plan_path, const fs::path& out) {
  const ExperimentPlan plan = load_plan(plan_path);
  const ExperimentReport report = run_experiment(plan, out);
  std::cout << report.rows.size() << " result rows, " << report.improvements.size()
            << " improvement rows written to " << out.string() << '\n';
  if (!report.failures.empty()) {
    std::cerr << report.failures.size() << " instance(s) failed:\n";
    for (const auto& f : report.failures) std::cerr << "  " << f.instance_id << ": " << f.message << '\n';
    return 4;
  }
  return 0;
}

int run_report(const fs::path& csv, fs::path improvements, const fs::path& plots) {
  const auto rows = parse_results_csv(slurp(csv));
  if (improvements.empty() && fs::exists(csv.parent_path() / "improvements.csv")) {
    improvements = csv.parent_path() / "improvements.csv";
  }
  std::vector<ImprovementRow> imps;
  if (!improvements.empty()) imps = parse_improvements_csv(slurp(improvements));

  // mean normalized profit and coverage per (tier set, n, solver)
  std::map<std::tuple<int, int, std::string>, std::array<double, 3>> means;
  for (const auto& r : rows) {
    auto& m = means[{r.tier_set, r.n, std::string(solver_name(r.solver))}];
    m[0] += r.normalized_profit;
    m[1] += r.coverage;
    m[2] += 1;
  }
  std::printf("%-8s %-6s %-8s %-6s %-12s %-8s\n", "tier_set", "n", "solver", "reps", "norm_profit",
              "coverage");
  for (const auto& [key, m] : means) {
    std::printf("%-8d %-6d %-8s %-6.0f %-12.4f %-8.4f\n", std::get<0>(key), std::get<1>(key),
                std::get<2>(key).c_str(), m[2], m[0] / m[2], m[1] / m[2]);
  }
  for (const auto& path : render_plots(rows, imps, plots)) std::cout << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV base-station placement with tiered pricing"};
  app.require_subcommand(1);
  app.footer(std::string("Worker threads: $") + kWorkersEnv + " (default: hardware concurrency).");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate clustered scenario files");
  g->add_option("--out", gen.out, "Output .json file (count 1) or directory")->required();
  g->add_option("--count", gen.count, "Number of scenarios; seeds are seed, seed+1, ...")
      ->check(CLI::PositiveNumber);
  g->add_option("--n", gen.spec.n, "Users")->capture_default_str();
  g->add_option("--m", gen.spec.m, "Ground base stations")->capture_default_str();
  g->add_option("--tier-set", gen.spec.tier_set_id, "1: {1,2}, 2: {1,2,4}, 3: {1,2,4,8} Mbps")
      ->capture_default_str();
  g->add_option("--seed", gen.spec.seed)->capture_default_str();
  g->add_option("--parent-count", gen.parents, "MIN MAX")->expected(2);
  g->add_option("--clustering-rate", gen.rates, "MIN MAX")->expected(2);
  g->add_option("--spread", gen.spec.cluster_spread_m, "Cluster std deviation, m")->capture_default_str();
  g->add_option("--region", gen.region, "WIDTH HEIGHT, m")->expected(2);
  g->add_option("--altitude", gen.altitude, "LOW HIGH, m")->expected(2);
  g->add_option("--gbs-bandwidth", gen.spec.gbs_bandwidth_hz, "Hz")->capture_default_str();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Place the UAV for one scenario");
  s->add_option("--scenario", solve.scenario)->required()->check(CLI::ExistingFile);
  s->add_option("--solver", solve.solver)
      ->check(CLI::IsMember({"gss", "random", "fixed", "oracle"}))
      ->capture_default_str();
  s->add_option("--out", solve.out, "Solution JSON")->required();
  s->add_option("--grid", solve.grid, "Horizontal grid COLSxROWS")->capture_default_str();
  s->add_option("--eps-g", solve.eps_g, "Golden-section stop width, m")->capture_default_str();
  s->add_option("--rate-unit", solve.rate_unit, "Knapsack rate unit, bps")->capture_default_str();
  s->add_option("--bw-unit", solve.bw_unit, "Knapsack bandwidth unit, Hz")->capture_default_str();
  s->add_option("--bw-tol", solve.bw_tol, "Bandwidth inversion tolerance, Hz")->capture_default_str();
  s->add_option("--seed", solve.seed, "Seed for the random heuristic")->capture_default_str();
  s->add_option("--replications", solve.replications, "Random heuristic samples")
      ->capture_default_str();
  s->add_option("--centroid", solve.centroid, "Fixed heuristic centroid weights")
      ->check(CLI::IsMember({"willingness", "uniform"}))
      ->capture_default_str();
  s->add_option("--altitude", solve.altitude, "LOW HIGH, m (default: scenario bracket)")->expected(2);
  s->add_option("--oracle-step", solve.oracle_steps, "HORIZONTAL VERTICAL lattice steps, m")
      ->expected(2);
  s->add_option("--workers", solve.workers, "Override $UAVBS_WORKERS");

  fs::path plan_path;
  fs::path exp_out = "experiment_out";
  auto* e = app.add_subcommand("experiment", "Run an experiment plan and write CSV tables");
  e->add_option("--plan", plan_path)->required()->check(CLI::ExistingFile);
  e->add_option("--out", exp_out, "Output directory")->capture_default_str();

  fs::path csv;
  fs::path imp_csv;
  fs::path plots;
  auto* r = app.add_subcommand("report", "Summarize results.csv and render SVG plots");
  r->add_option("--csv", csv, "results.csv")->required()->check(CLI::ExistingFile);
  r->add_option("--improvements", imp_csv, "improvements.csv (default: next to --csv)");
  r->add_option("--plots", plots, "Output directory for SVG files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_generate(gen);
    if (*s) return run_solve(solve);
    if (*e) return run_experiment_cmd(plan_path, exp_out);
    if (*r) return run_report(csv, imp_csv, plots);
  } catch (const SchemaError& ex) {
    std::cerr << "schema error at " << ex.what() << '\n';
    return 2;
  } catch (const CLI::Error& ex) {
    return app.exit(ex);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
