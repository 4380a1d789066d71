#include "uavbs/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json_schema.hpp"
#include "uavbs/errors.hpp"
#include "uavbs/parallel.hpp"
#include "uavbs/plots.hpp"

namespace uavbs {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> csv_records(const std::string& text,
                                                  std::string_view header,
                                                  std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw SchemaError("/header", "unexpected CSV header");
  }
  std::vector<std::vector<std::string>> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != columns) {
      throw SchemaError("/line/" + std::to_string(line_no),
                        "expected " + std::to_string(columns) + " fields");
    }
    records.push_back(std::move(fields));
  }
  return records;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

// Largest unit not above `unit` that divides `rate` a whole number of times.
double exact_rate_unit(double rate, double unit) {
  return rate / std::ceil(rate / unit);
}

SingleTierComparison compare_with_single_tier(const Scenario& sc, PlacementSolution multi,
                                              const SearchConfig& cfg) {
  const Scenario single_sc = single_tier_scenario(sc);
  SearchConfig single_cfg = cfg;
  single_cfg.dp.rate_unit_bps = exact_rate_unit(single_sc.tiers[0], cfg.dp.rate_unit_bps);

  SingleTierComparison out;
  out.single = gss_optimize(single_sc, single_cfg);
  out.multi = std::move(multi);
  out.profit_multi = out.multi.profit;
  out.profit_single = out.single.profit;
  if (out.profit_single > 0.0) {
    out.improvement = (out.profit_multi - out.profit_single) / out.profit_single;
  }
  return out;
}

std::vector<int> int_array(const json& j, const std::string& path) {
  std::vector<int> out;
  const auto& arr = detail::as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(static_cast<int>(detail::as_integer(arr[i], detail::child_path(path, i))));
  }
  return out;
}

}  // namespace

std::string_view solver_name(Solver solver) {
  switch (solver) {
    case Solver::kGss: return "gss";
    case Solver::kRandom: return "random";
    case Solver::kFixed: return "fixed";
    case Solver::kOracle: return "oracle";
  }
  return "unknown";
}

Solver parse_solver(std::string_view name) {
  for (Solver s : {Solver::kGss, Solver::kRandom, Solver::kFixed, Solver::kOracle}) {
    if (solver_name(s) == name) return s;
  }
  throw DomainError("unknown solver '" + std::string(name) + "' (gss|random|fixed|oracle)");
}

PlacementSolution run_solver(Solver solver, const Scenario& sc, const SearchConfig& cfg,
                             const OracleLattice& oracle_lattice) {
  switch (solver) {
    case Solver::kGss: return gss_optimize(sc, cfg);
    case Solver::kRandom: return heuristic_random(sc, cfg);
    case Solver::kFixed: return heuristic_fixed(sc, cfg);
    case Solver::kOracle: return exhaustive_oracle(sc, oracle_lattice, cfg);
  }
  throw DomainError("run_solver: unknown solver");
}

double coverage_metric(const Scenario& sc, const PlacementSolution& sol) {
  double delivered = 0.0;
  for (const auto& [user, tier] : sol.assignment.chosen) {
    delivered += sc.tiers[static_cast<std::size_t>(tier)];
  }
  return delivered / (static_cast<double>(sc.n()) * sc.tiers.top());
}

double normalized_profit(const Scenario& sc, double profit) {
  const double bound = sc.profit_upper_bound();
  return bound > 0.0 ? profit / bound : 0.0;
}

Scenario single_tier_scenario(const Scenario& sc) {
  Scenario single = sc;
  const double mean_rate =
      std::accumulate(sc.tiers.bps.begin(), sc.tiers.bps.end(), 0.0) /
      static_cast<double>(sc.tiers.size());
  single.tiers = RateTiers{{mean_rate}};
  single.willingness = sc.willingness.rowwise().mean();
  single.meta.tier_set_id = 0;
  return single;
}

SingleTierComparison single_tier_comparison(const Scenario& sc, const SearchConfig& cfg) {
  if (sc.tiers.size() < 2) throw DomainError("single_tier_comparison: needs at least two tiers");
  return compare_with_single_tier(sc, gss_optimize(sc, cfg), cfg);
}

void ExperimentPlan::validate() const {
  if (n_values.empty()) throw DomainError("plan: n_values must be nonempty");
  if (tier_sets.empty()) throw DomainError("plan: tier_sets must be nonempty");
  if (replications < 1) throw DomainError("plan: replications must be >= 1");
  if (solvers.empty() && !single_tier) throw DomainError("plan: nothing to run");
  for (int n : n_values) {
    if (n < 1) throw DomainError("plan: n values must be >= 1");
  }
  for (int t : tier_sets) tier_set(t);
  search.validate();
  if (!(oracle_horizontal_step_m > 0.0) || !(oracle_vertical_step_m > 0.0)) {
    throw DomainError("plan: oracle steps must be > 0");
  }
}

ExperimentPlan plan_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw SchemaError("/", "expected an object");
  ExperimentPlan plan;
  if (j.contains("n_values")) plan.n_values = int_array(j.at("n_values"), "/n_values");
  if (j.contains("tier_sets")) plan.tier_sets = int_array(j.at("tier_sets"), "/tier_sets");
  if (j.contains("replications")) {
    plan.replications = static_cast<int>(as_integer(j.at("replications"), "/replications"));
  }
  if (j.contains("solvers")) {
    plan.solvers.clear();
    const auto& arr = as_array(j.at("solvers"), "/solvers");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) throw SchemaError(child_path("/solvers", i), "expected a string");
      try {
        plan.solvers.push_back(parse_solver(arr[i].get<std::string>()));
      } catch (const DomainError& e) {
        throw SchemaError(child_path("/solvers", i), e.what());
      }
    }
  }
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      throw SchemaError("/seed", "expected a non-negative integer");
    }
    plan.seed = seed.get<std::uint64_t>();
  }
  if (j.contains("single_tier")) {
    if (!j.at("single_tier").is_boolean()) throw SchemaError("/single_tier", "expected a boolean");
    plan.single_tier = j.at("single_tier").get<bool>();
  }
  if (j.contains("workers")) {
    plan.workers = static_cast<unsigned>(as_integer(j.at("workers"), "/workers"));
  }

  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    const std::string p = "/generator";
    if (!g.is_object()) throw SchemaError(p, "expected an object");
    GenSpec& gen = plan.generator;
    if (g.contains("m")) gen.m = static_cast<int>(as_integer(g.at("m"), p + "/m"));
    if (g.contains("parent_count")) {
      const auto v = int_array(g.at("parent_count"), p + "/parent_count");
      if (v.size() != 2) throw SchemaError(p + "/parent_count", "expected [min, max]");
      gen.parent_count_min = v[0];
      gen.parent_count_max = v[1];
    }
    if (g.contains("clustering_rate")) {
      const auto v = as_number_array(g.at("clustering_rate"), p + "/clustering_rate", 2);
      gen.clustering_rate_min = v[0];
      gen.clustering_rate_max = v[1];
    }
    gen.cluster_spread_m = number_field_or(g, "cluster_spread_m", p, gen.cluster_spread_m);
    if (g.contains("region_m")) {
      const auto v = as_number_array(g.at("region_m"), p + "/region_m", 2);
      gen.region = {v[0], v[1]};
    }
    if (g.contains("altitude_bracket_m")) {
      const auto v = as_number_array(g.at("altitude_bracket_m"), p + "/altitude_bracket_m", 2);
      gen.altitude = {v[0], v[1]};
    }
    gen.gbs_bandwidth_hz = number_field_or(g, "gbs_bandwidth_hz", p, gen.gbs_bandwidth_hz);
  }

  if (j.contains("search")) {
    const auto& s = j.at("search");
    const std::string p = "/search";
    if (!s.is_object()) throw SchemaError(p, "expected an object");
    SearchConfig& cfg = plan.search;
    cfg.eps_g = number_field_or(s, "eps_g", p, cfg.eps_g);
    if (s.contains("grid")) {
      const auto v = int_array(s.at("grid"), p + "/grid");
      if (v.size() != 2) throw SchemaError(p + "/grid", "expected [cols, rows]");
      cfg.grid_cols = v[0];
      cfg.grid_rows = v[1];
    }
    if (s.contains("random_replications")) {
      cfg.random_replications =
          static_cast<int>(as_integer(s.at("random_replications"), p + "/random_replications"));
    }
    cfg.dp.rate_unit_bps = number_field_or(s, "rate_unit_bps", p, cfg.dp.rate_unit_bps);
    cfg.dp.bw_unit_hz = number_field_or(s, "bw_unit_hz", p, cfg.dp.bw_unit_hz);
    cfg.bw_tol_hz = number_field_or(s, "bw_tol_hz", p, cfg.bw_tol_hz);
    if (s.contains("centroid")) {
      const auto& c = s.at("centroid");
      if (c == "willingness") {
        cfg.centroid = CentroidWeighting::kTopTierWillingness;
      } else if (c == "uniform") {
        cfg.centroid = CentroidWeighting::kUniform;
      } else {
        throw SchemaError(p + "/centroid", "expected \"willingness\" or \"uniform\"");
      }
    }
  }

  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    plan.oracle_horizontal_step_m =
        number_field_or(o, "horizontal_step_m", "/oracle", plan.oracle_horizontal_step_m);
    plan.oracle_vertical_step_m =
        number_field_or(o, "vertical_step_m", "/oracle", plan.oracle_vertical_step_m);
  }

  try {
    plan.validate();
  } catch (const DomainError& e) {
    throw SchemaError("/", e.what());
  }
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
  return plan_from_json(j);
}

std::uint64_t replication_seed(std::uint64_t plan_seed, int n, int tier_set, int rep) {
  return derive_seed(plan_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(tier_set),
                     static_cast<std::uint64_t>(rep));
}

std::string instance_id(int n, int tier_set, int rep) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "n%d_t%d_r%02d", n, tier_set, rep);
  return buf;
}

ExperimentReport run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir) {
  plan.validate();

  struct Task {
    int n;
    int tier_set;
    int rep;
  };
  std::vector<Task> tasks;
  for (int n : plan.n_values) {
    for (int t : plan.tier_sets) {
      for (int rep = 0; rep < plan.replications; ++rep) tasks.push_back({n, t, rep});
    }
  }

  struct TaskResult {
    std::vector<ReportRow> rows;
    std::optional<ImprovementRow> improvement;
    std::optional<ExperimentFailure> failure;
  };
  std::vector<TaskResult> results(tasks.size());

  unsigned workers = plan.workers == 0 ? default_workers() : plan.workers;
  SearchConfig search = plan.search;
  if (workers > 1) search.workers = 1;  // parallelism lives at the replication level

  parallel_for(tasks.size(), workers, [&](std::size_t idx) {
    const Task& task = tasks[idx];
    TaskResult& result = results[idx];
    const std::string id = instance_id(task.n, task.tier_set, task.rep);
    const std::uint64_t seed = replication_seed(plan.seed, task.n, task.tier_set, task.rep);
    try {
      GenSpec gen = plan.generator;
      gen.n = task.n;
      gen.tier_set_id = task.tier_set;
      gen.seed = seed;
      const Scenario sc = generate(gen);
      SearchConfig cfg = search;
      cfg.seed = seed;
      const OracleLattice lattice = lattice_from_steps(
          sc.region, cfg.bracket(sc), plan.oracle_horizontal_step_m, plan.oracle_vertical_step_m);

      std::optional<PlacementSolution> gss_solution;
      for (Solver solver : plan.solvers) {
        const auto start = std::chrono::steady_clock::now();
        PlacementSolution sol = run_solver(solver, sc, cfg, lattice);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        const AuditReport audit = audit_solution(sc, sol, cfg);
        if (!audit.ok()) {
          throw std::runtime_error(std::string(solver_name(solver)) +
                                   " solution failed audit: " + audit.violations.front());
        }
        ReportRow row;
        row.instance_id = id;
        row.seed = seed;
        row.n = task.n;
        row.tier_set = task.tier_set;
        row.solver = solver;
        row.profit = sol.profit;
        row.normalized_profit = normalized_profit(sc, sol.profit);
        row.coverage = coverage_metric(sc, sol);
        row.iterations = sol.stats.iterations;
        row.knapsack_solves = sol.stats.knapsack_solves;
        row.wall_time_s = elapsed.count();
        result.rows.push_back(row);
        if (solver == Solver::kGss) gss_solution = std::move(sol);
      }

      if (plan.single_tier && sc.tiers.size() >= 2) {
        PlacementSolution multi = gss_solution ? *gss_solution : gss_optimize(sc, cfg);
        const SingleTierComparison cmp = compare_with_single_tier(sc, std::move(multi), cfg);
        result.improvement =
            ImprovementRow{id, seed, task.n, task.tier_set, cmp.profit_multi, cmp.profit_single,
                           cmp.improvement};
      }
    } catch (const std::exception& e) {
      result.rows.clear();
      result.improvement.reset();
      result.failure = ExperimentFailure{id, e.what()};
    }
  });

  ExperimentReport report;
  for (auto& r : results) {
    report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    if (r.improvement) report.improvements.push_back(*r.improvement);
    if (r.failure) report.failures.push_back(*r.failure);
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "results.csv", results_csv(report.rows));
    if (plan.single_tier) write_file(out_dir / "improvements.csv", improvements_csv(report.improvements));
    std::ostringstream timings;
    timings << "instance_id,solver,wall_time_s\n";
    for (const auto& row : report.rows) {
      timings << row.instance_id << ',' << solver_name(row.solver) << ','
              << fmt_double(row.wall_time_s) << '\n';
    }
    write_file(out_dir / "timings.csv", timings.str());
    std::ostringstream failures;
    for (const auto& f : report.failures) failures << f.instance_id << ": " << f.message << '\n';
    write_file(out_dir / "failures.txt", failures.str());
  }
  return report;
}

std::string results_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.instance_id << ',' << r.seed << ',' << r.n << ',' << r.tier_set << ','
        << solver_name(r.solver) << ',' << fmt_double(r.profit) << ','
        << fmt_double(r.normalized_profit) << ',' << fmt_double(r.coverage) << ','
        << r.iterations << ',' << r.knapsack_solves << '\n';
  }
  return out.str();
}

std::string improvements_csv(const std::vector<ImprovementRow>& rows) {
  std::ostringstream out;
  out << kImprovementsHeader << '\n';
  for (const auto& r : rows) {
    out << r.instance_id << ',' << r.seed << ',' << r.n << ',' << r.tier_set << ','
        << fmt_double(r.profit_multi) << ',' << fmt_double(r.profit_single) << ','
        << (r.improvement ? fmt_double(*r.improvement) : std::string("undefined")) << '\n';
  }
  return out.str();
}

std::vector<ReportRow> parse_results_csv(const std::string& text) {
  std::vector<ReportRow> rows;
  for (const auto& f : csv_records(text, kResultsHeader, 10)) {
    ReportRow r;
    r.instance_id = f[0];
    r.seed = std::stoull(f[1]);
    r.n = std::stoi(f[2]);
    r.tier_set = std::stoi(f[3]);
    r.solver = parse_solver(f[4]);
    r.profit = std::stod(f[5]);
    r.normalized_profit = std::stod(f[6]);
    r.coverage = std::stod(f[7]);
    r.iterations = std::stoi(f[8]);
    r.knapsack_solves = std::stoll(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ImprovementRow> parse_improvements_csv(const std::string& text) {
  std::vector<ImprovementRow> rows;
  for (const auto& f : csv_records(text, kImprovementsHeader, 7)) {
    ImprovementRow r;
    r.instance_id = f[0];
    r.seed = std::stoull(f[1]);
    r.n = std::stoi(f[2]);
    r.tier_set = std::stoi(f[3]);
    r.profit_multi = std::stod(f[4]);
    r.profit_single = std::stod(f[5]);
    if (f[6] != "undefined") r.improvement = std::stod(f[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::filesystem::path> render_plots(const std::vector<ReportRow>& rows,
                                                const std::vector<ImprovementRow>& improvements,
                                                const std::filesystem::path& out_dir) {
  if (rows.empty()) throw DomainError("render_plots: empty report");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  // mean over replications, keyed by (tier_set, solver, n)
  struct Acc {
    double profit = 0.0;
    double coverage = 0.0;
    int count = 0;
  };
  std::map<std::tuple<int, Solver, int>, Acc> means;
  std::set<int> tier_sets;
  for (const auto& r : rows) {
    auto& a = means[{r.tier_set, r.solver, r.n}];
    a.profit += r.normalized_profit;
    a.coverage += r.coverage;
    ++a.count;
    tier_sets.insert(r.tier_set);
  }
  auto tiers_label = [](int t) {
    try {
      std::string label = "{";
      const RateTiers tiers = tier_set(t);
      for (std::size_t k = 0; k < tiers.size(); ++k) {
        label += (k ? ", " : "") + fmt_double(tiers[k] / 1e6);
      }
      return label + "} Mbps";
    } catch (const DomainError&) {
      return "tier set " + std::to_string(t);
    }
  };

  for (int t : tier_sets) {
    LineChart chart;
    chart.title = "Normalized profit, tiers " + tiers_label(t);
    chart.x_label = "number of users";
    chart.y_label = "normalized profit";
    chart.y_min = 0.0;
    for (Solver s : {Solver::kGss, Solver::kOracle, Solver::kFixed, Solver::kRandom}) {
      Series series;
      series.label = std::string(solver_name(s));
      for (const auto& [key, acc] : means) {
        if (std::get<0>(key) != t || std::get<1>(key) != s) continue;
        series.x.push_back(std::get<2>(key));
        series.y.push_back(acc.profit / acc.count);
      }
      if (!series.x.empty()) chart.series.push_back(std::move(series));
    }
    const auto path = out_dir / ("normalized_profit_tiers" + std::to_string(t) + ".svg");
    write_file(path, render_svg(chart));
    written.push_back(path);
  }

  {
    LineChart chart;
    chart.title = "Coverage (solid) and normalized profit (dashed)";
    chart.x_label = "number of users";
    chart.y_label = "ratio";
    chart.y_min = 0.0;
    Solver shown = rows.front().solver;
    for (const auto& r : rows) {
      if (r.solver == Solver::kGss) shown = Solver::kGss;
    }
    for (int t : tier_sets) {
      Series coverage{"coverage " + tiers_label(t), {}, {}, false};
      Series profit{"profit " + tiers_label(t), {}, {}, true};
      for (const auto& [key, acc] : means) {
        if (std::get<0>(key) != t || std::get<1>(key) != shown) continue;
        coverage.x.push_back(std::get<2>(key));
        coverage.y.push_back(acc.coverage / acc.count);
        profit.x.push_back(std::get<2>(key));
        profit.y.push_back(acc.profit / acc.count);
      }
      chart.series.push_back(std::move(coverage));
      chart.series.push_back(std::move(profit));
    }
    const auto path = out_dir / "coverage_profit.svg";
    write_file(path, render_svg(chart));
    written.push_back(path);
  }

  if (!improvements.empty()) {
    std::map<std::pair<int, int>, std::pair<double, int>> imp;
    std::set<int> imp_sets;
    for (const auto& r : improvements) {
      imp_sets.insert(r.tier_set);
      if (!r.improvement) continue;
      auto& [sum, count] = imp[{r.tier_set, r.n}];
      sum += 100.0 * *r.improvement;
      ++count;
    }
    LineChart chart;
    chart.title = "Profit improvement over a single tier";
    chart.x_label = "number of users";
    chart.y_label = "improvement (%)";
    for (int t : imp_sets) {
      Series series{tiers_label(t), {}, {}, false};
      for (const auto& [key, acc] : imp) {
        if (key.first != t) continue;
        series.x.push_back(key.second);
        series.y.push_back(acc.first / acc.second);
      }
      chart.series.push_back(std::move(series));
    }
    const auto path = out_dir / "improvement.svg";
    write_file(path, render_svg(chart));
    written.push_back(path);
  }
  return written;
}

}  // namespace uavbs
