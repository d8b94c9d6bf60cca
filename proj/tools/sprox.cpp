// Command-line front end: generate benchmark data, solve single instances,
// sweep method x instance benchmarks, and run the oracle check suite.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sprox/baselines.hpp"
#include "sprox/checks.hpp"
#include "sprox/datagen.hpp"
#include "sprox/io.hpp"
#include "sprox/model.hpp"
#include "sprox/multitask.hpp"
#include "sprox/penalty.hpp"
#include "sprox/solver.hpp"

namespace {

using namespace sprox;

// ---------------------------------------------------------------------- gen

struct GenArgs {
  std::string kind;
  std::string out = ".";
  std::uint64_t seed = 0;
  long n = -1;
  int num_groups = -1;
  int group_size = 100;
  int overlap = 10;
  double noise_sd = 1.0;
  long j = 30;
  int k = 10;
  double b = 0.8;
  int relevant_per_block = 3;
  int cross_block = 2;
  int target_edges = -1;
  double rho = std::numeric_limits<double>::quiet_NaN();
};

int run_gen(const GenArgs& args) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out);
  const auto path = [&](const char* name) {
    return (fs::path(args.out) / name).string();
  };

  if (args.kind == "overlap-chain") {
    if (args.n < 0) throw std::invalid_argument("gen: overlap-chain requires --n");
    if (args.num_groups < 0) {
      throw std::invalid_argument("gen: overlap-chain requires --num-groups");
    }
    OverlapChainSpec spec;
    spec.seed = args.seed;
    spec.n = static_cast<Index>(args.n);
    spec.num_groups = args.num_groups;
    spec.group_size = args.group_size;
    spec.overlap = args.overlap;
    spec.noise_sd = args.noise_sd;
    const OverlapChainData data = gen_overlap_chain(spec);
    write_csv(path("X.csv"), data.problem.X);
    write_csv(path("y.csv"), data.problem.y);
    write_groups_json(path("groups.json"), data.groups);
    write_csv(path("beta_true.csv"), data.beta_true);
    write_spec_json(path("spec.json"), GenSpec(spec));
    std::cout << "wrote " << data.problem.n() << "x" << data.problem.j()
              << " instance with " << data.groups.groups.size()
              << " groups to " << args.out << "\n";
    return 0;
  }

  MultiTaskBlocksSpec spec;
  spec.seed = args.seed;
  if (args.n >= 0) spec.n = static_cast<Index>(args.n);
  spec.j = static_cast<Index>(args.j);
  spec.k = args.k;
  spec.b = args.b;
  spec.noise_sd = args.noise_sd;
  spec.relevant_per_block = args.relevant_per_block;
  spec.cross_block = args.cross_block;
  const MultiTaskBlocksData data = gen_multitask_blocks(spec);

  FusionGraph graph;
  if (!std::isnan(args.rho)) {
    graph = correlation_graph_threshold(data.problem.Y, args.rho);
  } else {
    const int pairs = spec.k * (spec.k - 1) / 2;
    const int target =
        args.target_edges >= 0 ? args.target_edges : std::min(5 * spec.k, pairs);
    graph = correlation_graph_target_edges(data.problem.Y, target);
  }
  write_csv(path("X.csv"), data.problem.X);
  write_csv(path("Y.csv"), data.problem.Y);
  write_graph_json(path("graph.json"), graph);
  write_csv(path("beta_true.csv"), data.b_true);
  write_spec_json(path("spec.json"), GenSpec(spec));
  std::cout << "wrote " << data.problem.n() << "x" << data.problem.j() << "x"
            << data.problem.k() << " multi-task instance with "
            << graph.edges.size() << " edges to " << args.out << "\n";
  return 0;
}

// -------------------------------------------------------------------- solve

struct SolveArgs {
  std::string x;
  std::string y;
  std::string groups;
  std::string graph;
  std::string out = "result.json";
  bool multitask = false;
  double lambda = 0.0;
  double gamma = 0.0;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double tol = 1e-6;
  int max_iter = 20000;
  bool gram = false;
  bool trace = false;
};

int run_solve(const SolveArgs& args) {
  if (args.groups.empty() == args.graph.empty()) {
    throw std::invalid_argument(
        "solve: exactly one of --groups and --graph is required");
  }

  SolverConfig config;
  config.lambda = args.lambda;
  config.gamma = args.gamma;
  if (!std::isnan(args.mu)) config.mu = args.mu;
  if (!std::isnan(args.epsilon)) {
    config.mu.reset();
    config.epsilon = args.epsilon;
  }
  config.tol = args.tol;
  config.max_iter = args.max_iter;
  config.precompute_gram = args.gram;
  config.record_trace = args.trace;

  const Matrix X = read_csv_matrix(args.x);

  const auto build_map = [&](Index expected_dim) {
    PenaltyLinearMap map;
    if (!args.groups.empty()) {
      map = build_group_map(read_groups_json(args.groups), args.gamma);
    } else {
      map = build_fusion_map(read_graph_json(args.graph), args.gamma);
    }
    if (map.dim() != expected_dim) {
      throw std::invalid_argument(
          "solve: penalty structure dimension " + std::to_string(map.dim()) +
          " does not match expected " + std::to_string(expected_dim));
    }
    return map;
  };

  SolveResult result;
  nlohmann::json payload;
  if (args.multitask) {
    const Matrix Y = read_csv_matrix(args.y);
    const MultiTaskProblem problem = validate_problem_mt(X, Y);
    const PenaltyLinearMap base = build_map(problem.k());
    const MultiTaskMapInfo info = make_multitask_info(base, problem.j());
    result = spg_solve_mt(problem, info, config);
    payload = result_to_json(result, config, problem.j(), problem.k());
  } else {
    const Vector y = read_csv_vector(args.y);
    RegressionProblem problem = validate_problem(X, y, false);
    const PenaltyLinearMap map = build_map(problem.j());
    double gram_seconds = 0.0;
    if (args.gram) {
      const auto start = std::chrono::steady_clock::now();
      problem.gram = problem.X.transpose() * problem.X;
      problem.xty = problem.X.transpose() * problem.y;
      gram_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    }
    result = spg_solve(problem, map, config);
    payload = result_to_json(result, config, problem.j(), 1, gram_seconds);
  }

  write_result_json(args.out, payload);
  std::cout << "objective " << format_double(result.objective) << ", "
            << result.iterations << " iterations, "
            << (result.converged ? "converged" : "max iterations reached")
            << ", wrote " << args.out << "\n";
  return result.converged ? 0 : 2;
}

// -------------------------------------------------------------------- bench

struct BenchTask {
  nlohmann::json instance;
  std::string method;
  std::size_t instance_index = 0;
};

struct BenchRowOut {
  std::string line;
  double objective = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

BenchRowOut bench_run_one(const BenchTask& task) {
  const nlohmann::json& inst = task.instance;
  const std::string kind = inst.at("kind").get<std::string>();
  const double gamma = inst.at("gamma").get<double>();
  const double lambda = inst.at("lambda").get<double>();
  const double tol = inst.value("tol", 1e-6);
  const int max_iter = inst.value("max_iter", 20000);

  const bool fusion = kind == "multitask-blocks";
  std::string prefix;
  BenchRowOut out;
  try {
    const GenSpec spec = genspec_from_json(inst);
    long n = 0, j = 0, k = 1;
    SolveResult result;
    if (!fusion) {
      const OverlapChainData data =
          gen_overlap_chain(std::get<OverlapChainSpec>(spec));
      n = data.problem.n();
      j = data.problem.j();
      const PenaltyLinearMap map = build_group_map(data.groups, gamma);
      if (task.method == "spg") {
        SolverConfig config;
        config.lambda = lambda;
        config.gamma = gamma;
        config.tol = tol;
        config.max_iter = max_iter;
        config.precompute_gram = true;
        result = spg_solve(data.problem, map, config);
      } else {
        BaselineConfig config;
        config.step_c = inst.value("step_c", 0.0);
        config.lambda = lambda;
        config.gamma = gamma;
        config.tol = tol;
        config.max_iter = max_iter;
        config.precompute_gram = true;
        result = task.method == "fobos"
                     ? fobos_solve(data.problem, map, config)
                     : subgradient_solve(data.problem, map, config);
      }
    } else {
      const auto& mt_spec = std::get<MultiTaskBlocksSpec>(spec);
      const MultiTaskBlocksData data = gen_multitask_blocks(mt_spec);
      n = data.problem.n();
      j = data.problem.j();
      k = data.problem.k();
      if (task.method != "spg") {
        throw std::invalid_argument("method '" + task.method +
                                    "' is single-task only; multi-task "
                                    "instances support spg");
      }
      const int pairs = mt_spec.k * (mt_spec.k - 1) / 2;
      const int target =
          inst.value("target_edges", std::min(5 * mt_spec.k, pairs));
      const FusionGraph graph =
          correlation_graph_target_edges(data.problem.Y, target);
      const PenaltyLinearMap base = build_fusion_map(graph, gamma);
      const MultiTaskMapInfo info = make_multitask_info(base, j);
      SolverConfig config;
      config.lambda = lambda;
      config.gamma = gamma;
      config.tol = tol;
      config.max_iter = max_iter;
      config.precompute_gram = true;
      result = spg_solve_mt(data.problem, info, config);
    }
    std::ostringstream row;
    row << task.method << ',' << (fusion ? "fusion" : "group") << ',' << n
        << ',' << j << ',' << k << ',' << format_double(gamma) << ','
        << format_double(lambda) << ',' << result.iterations << ','
        << format_double(result.wall_seconds) << ','
        << format_double(result.objective) << ",ok";
    out.line = row.str();
    out.objective = result.objective;
    out.ok = true;
  } catch (const std::exception& e) {
    std::ostringstream row;
    row << task.method << ',' << (fusion ? "fusion" : "group") << ','
        << inst.value("n", 0) << ',' << inst.value("j", 0) << ','
        << inst.value("k", 1) << ',' << format_double(gamma) << ','
        << format_double(lambda) << ",0,0,nan," << sanitize(e.what());
    out.line = row.str();
  }
  return out;
}

int bench_threads() {
  const char* env = std::getenv("SPROX_THREADS");
  if (env == nullptr) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

int run_bench(const std::string& config_path, const std::string& out_path) {
  const nlohmann::json config = read_json_file(config_path);
  if (!config.is_object() || !config.contains("methods") ||
      !config.contains("instances")) {
    throw std::invalid_argument(config_path +
                                ": bench config needs \"methods\" and "
                                "\"instances\" arrays");
  }
  const auto& methods = config.at("methods");
  const auto& instances = config.at("instances");
  if (!methods.is_array() || methods.empty() || !instances.is_array() ||
      instances.empty()) {
    throw std::invalid_argument(
        config_path + ": \"methods\" and \"instances\" must be non-empty");
  }
  for (const auto& m : methods) {
    const std::string name = m.get<std::string>();
    if (name != "spg" && name != "fobos" && name != "subgrad") {
      throw std::invalid_argument(config_path + ": unknown method '" + name +
                                  "'");
    }
  }

  std::vector<BenchTask> tasks;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (const auto& m : methods) {
      tasks.push_back({instances[i], m.get<std::string>(), i});
    }
  }

  std::vector<BenchRowOut> rows(tasks.size());
  const int threads = std::min<int>(bench_threads(),
                                    static_cast<int>(tasks.size()));
  if (threads <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      rows[t] = bench_run_one(tasks[t]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < tasks.size();
             t = next.fetch_add(1)) {
          rows[t] = bench_run_one(tasks[t]);
        }
      });
    }
    for (auto& worker : pool) worker.join();
  }

  std::ostringstream table;
  table << "method,penalty,N,J,K,gamma,lambda,iterations,cpu_seconds,"
           "objective,status\n";
  for (const auto& row : rows) table << row.line << '\n';
  for (std::size_t i = 0; i < instances.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::string best_method;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].instance_index == i && rows[t].ok &&
          rows[t].objective < best) {
        best = rows[t].objective;
        best_method = tasks[t].method;
      }
    }
    if (best_method.empty()) {
      table << "# instance " << i + 1 << ": no successful runs\n";
    } else {
      table << "# instance " << i + 1 << ": best objective "
            << format_double(best) << " (" << best_method << ")\n";
    }
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(out_path + ": cannot open for writing");
  }
  out << table.str();
  out.close();

  bool any_error = false;
  for (const auto& row : rows) any_error = any_error || !row.ok;
  std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return any_error ? 1 : 0;
}

// -------------------------------------------------------------------- check

int run_check(const std::string& filter, double fuzz) {
  const std::vector<std::string> names = checks::check_names();
  bool matched = false;
  bool all_ok = true;
  for (const auto& name : names) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    matched = true;
    checks::CheckOptions options;
    options.filter = name;
    options.lipschitz_scale = fuzz;
    options.log = &std::cout;
    const auto outcomes = checks::run_checks(options);
    for (const auto& outcome : outcomes) {
      std::printf("%s: %s (%.2fs)\n", outcome.passed ? "PASS" : "FAIL",
                  outcome.name.c_str(), outcome.seconds);
      if (!outcome.passed) {
        std::printf("  %s\n", outcome.detail.c_str());
        all_ok = false;
      }
      std::fflush(stdout);
    }
  }
  if (!matched) {
    std::cerr << "no checks match filter '" << filter << "'\n";
    return 1;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-sparsity regression via smoothing proximal "
               "gradient: data generation, solving, benchmarks, checks"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  gen->add_option("--kind", gen_args.kind, "overlap-chain or multitask-blocks")
      ->required()
      ->check(CLI::IsMember({"overlap-chain", "multitask-blocks"}));
  gen->add_option("--seed", gen_args.seed, "RNG seed (mandatory for provenance)")
      ->required();
  gen->add_option("--out", gen_args.out, "Output directory");
  gen->add_option("--n", gen_args.n, "Number of samples");
  gen->add_option("--num-groups", gen_args.num_groups,
                  "Number of overlapping groups (overlap-chain)");
  gen->add_option("--group-size", gen_args.group_size,
                  "Inputs per group (overlap-chain)");
  gen->add_option("--overlap", gen_args.overlap,
                  "Shared inputs between adjacent groups (overlap-chain)");
  gen->add_option("--noise-sd", gen_args.noise_sd, "Noise standard deviation");
  gen->add_option("--j", gen_args.j, "Number of inputs (multitask-blocks)");
  gen->add_option("--k", gen_args.k, "Number of tasks (multitask-blocks)");
  gen->add_option("--b", gen_args.b,
                  "Association strength (multitask-blocks)");
  gen->add_option("--relevant-per-block", gen_args.relevant_per_block,
                  "Relevant inputs per task block (multitask-blocks)");
  gen->add_option("--cross-block", gen_args.cross_block,
                  "Inputs shared by two blocks (multitask-blocks)");
  CLI::Option* edges_opt =
      gen->add_option("--target-edges", gen_args.target_edges,
                      "Edge count for the output-correlation graph");
  gen->add_option("--rho", gen_args.rho,
                  "Absolute-correlation threshold for graph edges")
      ->excludes(edges_opt);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Solve one instance");
  solve->add_option("--x", solve_args.x, "Design matrix CSV")->required();
  solve->add_option("--y", solve_args.y, "Response CSV (vector, or matrix with --multitask)")
      ->required();
  CLI::Option* groups_opt =
      solve->add_option("--groups", solve_args.groups, "Group structure JSON");
  solve->add_option("--graph", solve_args.graph, "Fusion graph JSON")
      ->excludes(groups_opt);
  solve->add_flag("--multitask", solve_args.multitask,
                  "Treat --y as an N x K response matrix");
  solve->add_option("--lambda", solve_args.lambda, "l1 penalty weight")
      ->required();
  solve->add_option("--gamma", solve_args.gamma, "Structured penalty weight")
      ->required();
  CLI::Option* mu_opt =
      solve->add_option("--mu", solve_args.mu, "Smoothing parameter");
  solve->add_option("--epsilon", solve_args.epsilon,
                    "Target accuracy (sets mu = epsilon / 2D)")
      ->excludes(mu_opt);
  solve->add_option("--tol", solve_args.tol, "Relative objective tolerance");
  solve->add_option("--max-iter", solve_args.max_iter, "Iteration cap");
  solve->add_flag("--gram", solve_args.gram, "Precompute X'X and X'y");
  solve->add_flag("--trace", solve_args.trace, "Record per-iteration objectives");
  solve->add_option("--out", solve_args.out, "Result JSON path");

  std::string bench_config;
  std::string bench_out = "table.csv";
  CLI::App* bench = app.add_subcommand(
      "bench", "Run a method x instance sweep from a JSON config");
  bench->add_option("--config", bench_config, "Bench config JSON")->required();
  bench->add_option("--out", bench_out, "Output CSV path");

  std::string check_filter;
  double check_fuzz = 1.0;
  CLI::App* check = app.add_subcommand("check", "Run the oracle check suite");
  check->add_option("--filter", check_filter,
                    "Only run checks whose name contains this substring");
  check->add_option("--fuzz-lipschitz", check_fuzz,
                    "Scale solver step-size constants (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (solve->parsed()) return run_solve(solve_args);
    if (bench->parsed()) return run_bench(bench_config, bench_out);
    if (check->parsed()) return run_check(check_filter, check_fuzz);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
