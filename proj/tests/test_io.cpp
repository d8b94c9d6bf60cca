#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "sprox/io.hpp"
#include "sprox/multitask.hpp"
#include "sprox/solver.hpp"

using namespace sprox;
using namespace testhelp;
using doctest::Contains;

namespace {

std::filesystem::path scratch(const std::string& name) {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "sprox_io_tests";
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir / name;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("csv output is plain comma/LF text with minimal numbers") {
  Matrix m(2, 3);
  m << 1.5, -2.0, 0.25, 0.001, 3.0, 4.75;
  const auto path = scratch("texture.csv");
  write_csv(path.string(), m);
  CHECK(slurp(path) == "1.5,-2,0.25\n0.001,3,4.75\n");
}

TEST_CASE("csv round-trips matrices and vectors bitwise") {
  StdRng rng(501);
  Matrix m = random_matrix(rng, 7, 4);
  m(0, 0) = 5e-324;                   // smallest denormal
  m(0, 1) = 1.7976931348623157e308;   // largest finite
  m(0, 2) = -1e-300;
  m(0, 3) = 0.1;
  m(1, 0) = 1.0 / 3.0;
  const auto mpath = scratch("matrix.csv");
  write_csv(mpath.string(), m);
  const Matrix back = read_csv_matrix(mpath.string());
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) CHECK(back(i, j) == m(i, j));
  }

  const Vector v = random_vector(rng, 6);
  const auto vpath = scratch("vector.csv");
  write_csv(vpath.string(), v);
  const Vector vback = read_csv_vector(vpath.string());
  REQUIRE(vback.size() == v.size());
  for (Index i = 0; i < v.size(); ++i) CHECK(vback[i] == v[i]);

  CHECK_THROWS_WITH_AS(read_csv_vector(mpath.string()),
                       Contains("single-column"), std::runtime_error);
}

TEST_CASE("doubles format to the shortest round-trippable string") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 5e-324, 1.7976931348623157e308,
                   123456789.123456789, -2.5, 0.0, 3.0}) {
    const std::string s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_double(3.0) == "3");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("csv reader reports malformed files by line") {
  const auto missing = scratch("does_not_exist.csv");
  std::filesystem::remove(missing);
  CHECK_THROWS_WITH_AS(read_csv_matrix(missing.string()),
                       Contains("cannot open"), std::runtime_error);

  const auto ragged = scratch("ragged.csv");
  std::ofstream(ragged) << "1,2\n3\n";
  CHECK_THROWS_WITH_AS(read_csv_matrix(ragged.string()),
                       Contains("expected 2 columns"), std::runtime_error);

  const auto junk = scratch("junk.csv");
  std::ofstream(junk) << "1,abc\n";
  CHECK_THROWS_WITH_AS(read_csv_matrix(junk.string()),
                       Contains("cannot parse 'abc'"), std::runtime_error);

  const auto empty = scratch("empty.csv");
  std::ofstream(empty) << "";
  CHECK_THROWS_WITH_AS(read_csv_matrix(empty.string()),
                       Contains("file is empty"), std::runtime_error);
}

TEST_CASE("group structures round-trip with 1-based indices on disk") {
  const GroupStructure groups = six_input_groups();
  const auto path = scratch("groups.json");
  write_groups_json(path.string(), groups);

  const nlohmann::json raw = read_json_file(path.string());
  CHECK(raw.at("dim") == 6);
  CHECK(raw.at("groups").at(0).at("members") ==
        nlohmann::json::array({1, 2, 3}));

  const GroupStructure back = read_groups_json(path.string());
  CHECK(back.dim == groups.dim);
  REQUIRE(back.groups.size() == groups.groups.size());
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    CHECK(back.groups[g].members == groups.groups[g].members);
    CHECK(back.groups[g].weight == groups.groups[g].weight);
  }
}

TEST_CASE("fusion graphs round-trip with 1-based indices on disk") {
  const FusionGraph graph = five_input_graph();
  const auto path = scratch("graph.json");
  write_graph_json(path.string(), graph);

  const nlohmann::json raw = read_json_file(path.string());
  CHECK(raw.at("dim") == 5);
  CHECK(raw.at("edges").at(0).at("m") == 1);
  CHECK(raw.at("edges").at(0).at("l") == 2);

  const FusionGraph back = read_graph_json(path.string());
  CHECK(back.dim == graph.dim);
  REQUIRE(back.edges.size() == graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    CHECK(back.edges[e].m == graph.edges[e].m);
    CHECK(back.edges[e].l == graph.edges[e].l);
    CHECK(back.edges[e].r == graph.edges[e].r);
  }
}

TEST_CASE("schema violations name the offending field") {
  const auto path = scratch("bad.json");

  std::ofstream(path) << R"({"dim": 3, "groups": [{"weight": 1.0}]})";
  CHECK_THROWS_WITH_AS(read_groups_json(path.string()),
                       Contains("groups[1].members"), std::runtime_error);

  std::ofstream(path)
      << R"({"dim": 3, "groups": [{"members": [1], "weight": 1.0},)"
      << R"({"members": [2], "weight": "x"}]})";
  CHECK_THROWS_WITH_AS(read_groups_json(path.string()),
                       Contains("groups[2].weight"), std::runtime_error);

  std::ofstream(path) << R"({"dim": 3, "groups": [{"members": [4], "weight": 1}]})";
  CHECK_THROWS_WITH_AS(read_groups_json(path.string()),
                       Contains("groups[1].members[1] out of range"),
                       std::runtime_error);

  std::ofstream(path) << R"({"dim": 4, "edges": [{"m": 1, "l": 2}]})";
  CHECK_THROWS_WITH_AS(read_graph_json(path.string()),
                       Contains("edges[1].r"), std::runtime_error);

  std::ofstream(path) << R"({"dim": 4, "edges": [{"m": 1.5, "l": 2, "r": 1}]})";
  CHECK_THROWS_WITH_AS(read_graph_json(path.string()),
                       Contains("edges[1].m must be an integer"),
                       std::runtime_error);

  std::ofstream(path) << R"({"dim": 4, "edges": [{"m": 2, "l": 2, "r": 1}]})";
  CHECK_THROWS_WITH_AS(read_graph_json(path.string()), Contains("m < l"),
                       std::runtime_error);

  std::ofstream(path) << R"({"dim": 3)";
  CHECK_THROWS_WITH_AS(read_json_file(path.string()), Contains(":1:"),
                       std::runtime_error);
}

TEST_CASE("generator specs round-trip through json") {
  OverlapChainSpec chain;
  chain.seed = 17;
  chain.n = 50;
  chain.num_groups = 4;
  chain.group_size = 20;
  chain.overlap = 5;
  chain.noise_sd = 0.25;
  const auto path = scratch("spec.json");
  write_spec_json(path.string(), chain);
  const GenSpec round = read_spec_json(path.string());
  REQUIRE(std::holds_alternative<OverlapChainSpec>(round));
  const auto& c = std::get<OverlapChainSpec>(round);
  CHECK(c.seed == chain.seed);
  CHECK(c.n == chain.n);
  CHECK(c.num_groups == chain.num_groups);
  CHECK(c.group_size == chain.group_size);
  CHECK(c.overlap == chain.overlap);
  CHECK(c.noise_sd == chain.noise_sd);

  MultiTaskBlocksSpec blocks;
  blocks.seed = 23;
  blocks.k = 6;
  blocks.blocks = {2, 2, 2};
  blocks.cross_block = 1;
  write_spec_json(path.string(), blocks);
  const GenSpec round2 = read_spec_json(path.string());
  REQUIRE(std::holds_alternative<MultiTaskBlocksSpec>(round2));
  const auto& m = std::get<MultiTaskBlocksSpec>(round2);
  CHECK(m.seed == blocks.seed);
  CHECK(m.k == blocks.k);
  CHECK(m.blocks == blocks.blocks);
  CHECK(m.cross_block == blocks.cross_block);
  CHECK(m.n == 100);  // omitted fields fall back to defaults

  CHECK_THROWS_WITH_AS(genspec_from_json(nlohmann::json{{"kind", "bogus"}}),
                       Contains("kind must be"), std::runtime_error);
  CHECK_THROWS_WITH_AS(genspec_from_json(nlohmann::json{{"seed", 1}}),
                       Contains("missing field kind"), std::runtime_error);
}

TEST_CASE("solve results survive a save/load cycle") {
  const RegressionProblem problem = small_problem(511, 20, 6);
  const double gamma = 0.6;
  const double lambda = 0.3;
  const PenaltyLinearMap map = build_group_map(six_input_groups(), gamma);
  SolverConfig config;
  config.lambda = lambda;
  config.gamma = gamma;
  config.mu = 1e-3;
  config.record_trace = true;
  const SolveResult result = spg_solve(problem, map, config);

  const nlohmann::json payload = result_to_json(result, config, 6, 1);
  const auto path = scratch("result.json");
  write_result_json(path.string(), payload);
  const nlohmann::json loaded = read_json_file(path.string());

  const Matrix coef = coef_from_result_json(loaded);
  REQUIRE(coef.rows() == 6);
  REQUIRE(coef.cols() == 1);
  CHECK((coef - result.coef).norm() == 0.0);
  CHECK(loaded.at("objective").get<double>() == result.objective);
  CHECK(loaded.at("config").at("lambda").get<double>() == lambda);
  CHECK(loaded.at("config").at("epsilon").is_null());
  REQUIRE(loaded.contains("trace"));
  CHECK(static_cast<int>(loaded.at("trace").size()) == result.iterations);

  // The stored objective must re-evaluate from the stored coefficients.
  const double reeval = eval_objective(problem, map, coef.col(0), lambda);
  CHECK(std::abs(reeval - loaded.at("objective").get<double>()) <=
        1e-9 * std::max(1.0, std::abs(reeval)));
}

TEST_CASE("multi-task coefficients store as row-major nested arrays") {
  StdRng rng(521);
  const Matrix X = random_matrix(rng, 12, 4);
  const Matrix Y = random_matrix(rng, 12, 2);
  const MultiTaskProblem problem = validate_problem_mt(X, Y);
  FusionGraph tasks;
  tasks.dim = 2;
  tasks.edges.push_back({0, 1, 0.9});
  const MultiTaskMapInfo info =
      make_multitask_info(build_fusion_map(tasks, 0.4), 4);
  SolverConfig config;
  config.lambda = 0.2;
  config.gamma = 0.4;
  config.mu = 1e-3;
  const SolveResult result = spg_solve_mt(problem, info, config);

  const nlohmann::json payload = result_to_json(result, config, 4, 2);
  REQUIRE(payload.contains("B"));
  CHECK(payload.at("B").size() == 4);
  CHECK(payload.at("B").at(0).size() == 2);
  CHECK(payload.at("B").at(1).at(1).get<double>() == result.coef(1, 1));

  const auto path = scratch("result_mt.json");
  write_result_json(path.string(), payload);
  const Matrix coef = coef_from_result_json(read_json_file(path.string()));
  CHECK((coef - result.coef).norm() == 0.0);
}

}  // TEST_SUITE
