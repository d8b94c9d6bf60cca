#include "sprox/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace sprox {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error(msg);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) fail(path + ": read error");
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path + ": cannot open for writing");
  out << content;
  out.flush();
  if (!out.good()) fail(path + ": write error");
}

double parse_double(const std::string& path, std::size_t line,
                    std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream os;
    os << path << ":" << line << ": cannot parse '" << token
       << "' as a number";
    fail(os.str());
  }
  return value;
}

// Splits into lines on LF; a trailing '\r' per line is tolerated on read.
std::vector<std::string_view> split_lines(const std::string& text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) fail("format_double: conversion failed");
  return std::string(buf, ptr);
}

Matrix read_csv_matrix(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) fail(path + ": file is empty");

  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      std::size_t end = line.find(',', start);
      const bool last = end == std::string_view::npos;
      if (last) end = line.size();
      row.push_back(parse_double(path, i + 1, line.substr(start, end - start)));
      if (last) break;
      start = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << path << ":" << i + 1 << ": expected " << rows.front().size()
         << " columns, found " << row.size();
      fail(os.str());
    }
    rows.push_back(std::move(row));
  }

  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Vector read_csv_vector(const std::string& path) {
  const Matrix m = read_csv_matrix(path);
  if (m.cols() != 1) {
    std::ostringstream os;
    os << path << ": expected a single-column vector file, found " << m.cols()
       << " columns";
    fail(os.str());
  }
  return m.col(0);
}

void write_csv(const std::string& path, const Matrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 12);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      out += format_double(m(i, j));
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

void write_csv(const std::string& path, const Vector& v) {
  write_csv(path, Matrix(v));
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Map the byte offset to a 1-based line for the error message.
    std::size_t line = 1;
    const std::size_t limit = std::min(e.byte, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') ++line;
    }
    std::ostringstream os;
    os << path << ":" << line << ": " << e.what();
    fail(os.str());
  }
}

namespace {

const nlohmann::json& expect_field(const std::string& path,
                                   const nlohmann::json& j,
                                   const std::string& where,
                                   const std::string& key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(path + ": missing field " + (where.empty() ? key : where + "." + key));
  }
  return j.at(key);
}

int expect_int(const std::string& path, const nlohmann::json& j,
               const std::string& where) {
  if (!j.is_number_integer()) fail(path + ": " + where + " must be an integer");
  return j.get<int>();
}

double expect_number(const std::string& path, const nlohmann::json& j,
                     const std::string& where) {
  if (!j.is_number()) fail(path + ": " + where + " must be a number");
  return j.get<double>();
}

}  // namespace

GroupStructure read_groups_json(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  GroupStructure out;
  out.dim = expect_int(path, expect_field(path, j, "", "dim"), "dim");
  const auto& groups = expect_field(path, j, "", "groups");
  if (!groups.is_array()) fail(path + ": groups must be an array");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::ostringstream where;
    where << "groups[" << g + 1 << "]";
    const auto& entry = groups.at(g);
    const auto& members =
        expect_field(path, entry, where.str(), "members");
    if (!members.is_array()) fail(path + ": " + where.str() + ".members must be an array");
    GroupStructure::Group group;
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::ostringstream mwhere;
      mwhere << where.str() << ".members[" << i + 1 << "]";
      const int idx = expect_int(path, members.at(i), mwhere.str());
      if (idx < 1 || idx > out.dim) {
        fail(path + ": " + mwhere.str() + " out of range (1-based)");
      }
      group.members.push_back(idx - 1);
    }
    group.weight = expect_number(
        path, expect_field(path, entry, where.str(), "weight"),
        where.str() + ".weight");
    out.groups.push_back(std::move(group));
  }
  try {
    validate_structure(out);
  } catch (const std::invalid_argument& e) {
    fail(path + ": " + e.what());
  }
  return out;
}

FusionGraph read_graph_json(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  FusionGraph out;
  out.dim = expect_int(path, expect_field(path, j, "", "dim"), "dim");
  const auto& edges = expect_field(path, j, "", "edges");
  if (!edges.is_array()) fail(path + ": edges must be an array");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::ostringstream where;
    where << "edges[" << e + 1 << "]";
    const auto& entry = edges.at(e);
    FusionGraph::Edge edge;
    edge.m = expect_int(path, expect_field(path, entry, where.str(), "m"),
                        where.str() + ".m") -
             1;
    edge.l = expect_int(path, expect_field(path, entry, where.str(), "l"),
                        where.str() + ".l") -
             1;
    edge.r = expect_number(path, expect_field(path, entry, where.str(), "r"),
                           where.str() + ".r");
    out.edges.push_back(edge);
  }
  try {
    validate_structure(out);
  } catch (const std::invalid_argument& e) {
    fail(path + ": " + e.what());
  }
  return out;
}

void write_groups_json(const std::string& path, const GroupStructure& groups) {
  nlohmann::json j;
  j["dim"] = groups.dim;
  j["groups"] = nlohmann::json::array();
  for (const auto& g : groups.groups) {
    nlohmann::json entry;
    entry["members"] = nlohmann::json::array();
    for (int m : g.members) entry["members"].push_back(m + 1);
    entry["weight"] = g.weight;
    j["groups"].push_back(std::move(entry));
  }
  write_file(path, j.dump(2) + "\n");
}

void write_graph_json(const std::string& path, const FusionGraph& graph) {
  nlohmann::json j;
  j["dim"] = graph.dim;
  j["edges"] = nlohmann::json::array();
  for (const auto& e : graph.edges) {
    j["edges"].push_back({{"m", e.m + 1}, {"l", e.l + 1}, {"r", e.r}});
  }
  write_file(path, j.dump(2) + "\n");
}

nlohmann::json genspec_to_json(const GenSpec& spec) {
  nlohmann::json j;
  if (const auto* chain = std::get_if<OverlapChainSpec>(&spec)) {
    j["kind"] = "overlap-chain";
    j["seed"] = chain->seed;
    j["n"] = chain->n;
    j["num_groups"] = chain->num_groups;
    j["group_size"] = chain->group_size;
    j["overlap"] = chain->overlap;
    j["noise_sd"] = chain->noise_sd;
  } else {
    const auto& blocks = std::get<MultiTaskBlocksSpec>(spec);
    j["kind"] = "multitask-blocks";
    j["seed"] = blocks.seed;
    j["n"] = blocks.n;
    j["j"] = blocks.j;
    j["k"] = blocks.k;
    j["blocks"] = blocks.blocks;
    j["b"] = blocks.b;
    j["noise_sd"] = blocks.noise_sd;
    j["relevant_per_block"] = blocks.relevant_per_block;
    j["cross_block"] = blocks.cross_block;
  }
  return j;
}

GenSpec genspec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    fail("spec json: missing field kind");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "overlap-chain") {
      OverlapChainSpec spec;
      spec.seed = j.at("seed").get<std::uint64_t>();
      spec.n = j.at("n").get<Index>();
      spec.num_groups = j.at("num_groups").get<int>();
      spec.group_size = j.value("group_size", 100);
      spec.overlap = j.value("overlap", 10);
      spec.noise_sd = j.value("noise_sd", 1.0);
      return spec;
    }
    if (kind == "multitask-blocks") {
      MultiTaskBlocksSpec spec;
      spec.seed = j.at("seed").get<std::uint64_t>();
      spec.n = j.value("n", Index{100});
      spec.j = j.value("j", 30);
      spec.k = j.value("k", 10);
      spec.blocks = j.value("blocks", std::vector<int>{3, 3, 4});
      spec.b = j.value("b", 0.8);
      spec.noise_sd = j.value("noise_sd", 1.0);
      spec.relevant_per_block = j.value("relevant_per_block", 3);
      spec.cross_block = j.value("cross_block", 2);
      return spec;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("spec json: ") + e.what());
  }
  fail("spec json: kind must be overlap-chain or multitask-blocks");
}

void write_spec_json(const std::string& path, const GenSpec& spec) {
  write_file(path, genspec_to_json(spec).dump(2) + "\n");
}

GenSpec read_spec_json(const std::string& path) {
  try {
    return genspec_from_json(read_json_file(path));
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    fail(path + ": " + what);
  }
}

nlohmann::json result_to_json(const SolveResult& result,
                              const SolverConfig& config, Index j, Index k,
                              double gram_seconds) {
  nlohmann::json out;
  out["j"] = j;
  out["k"] = k;
  if (k == 1) {
    std::vector<double> beta(result.coef.data(),
                             result.coef.data() + result.coef.rows());
    out["beta"] = beta;
  } else {
    auto rows = nlohmann::json::array();
    for (Index r = 0; r < result.coef.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(result.coef.cols()));
      for (Index c = 0; c < result.coef.cols(); ++c) {
        row[static_cast<std::size_t>(c)] = result.coef(r, c);
      }
      rows.push_back(std::move(row));
    }
    out["B"] = std::move(rows);
  }
  out["objective"] = result.objective;
  out["smoothed_objective"] = result.smoothed_objective;
  out["iterations"] = result.iterations;
  out["converged"] = result.converged;
  out["wall_seconds"] = result.wall_seconds;
  out["gram_seconds"] = gram_seconds;

  nlohmann::json cfg;
  cfg["lambda"] = config.lambda;
  cfg["gamma"] = config.gamma;
  cfg["mu"] = config.mu ? nlohmann::json(*config.mu) : nlohmann::json();
  cfg["epsilon"] =
      config.epsilon ? nlohmann::json(*config.epsilon) : nlohmann::json();
  cfg["tol"] = config.tol;
  cfg["max_iter"] = config.max_iter;
  cfg["precompute_gram"] = config.precompute_gram;
  cfg["record_trace"] = config.record_trace;
  out["config"] = std::move(cfg);

  if (result.trace) {
    auto trace = nlohmann::json::array();
    for (const auto& point : *result.trace) {
      trace.push_back({point.objective, point.smoothed_objective});
    }
    out["trace"] = std::move(trace);
  }
  return out;
}

void write_result_json(const std::string& path, const nlohmann::json& result) {
  write_file(path, result.dump(2) + "\n");
}

Matrix coef_from_result_json(const nlohmann::json& j) {
  const Index J = j.at("j").get<Index>();
  const Index K = j.at("k").get<Index>();
  Matrix coef(J, K);
  if (K == 1) {
    const auto beta = j.at("beta").get<std::vector<double>>();
    if (static_cast<Index>(beta.size()) != J)
      fail("result json: beta length does not match j");
    for (Index r = 0; r < J; ++r) coef(r, 0) = beta[static_cast<std::size_t>(r)];
  } else {
    const auto& rows = j.at("B");
    if (!rows.is_array() || static_cast<Index>(rows.size()) != J)
      fail("result json: B must have j rows");
    for (Index r = 0; r < J; ++r) {
      const auto row = rows.at(static_cast<std::size_t>(r))
                           .get<std::vector<double>>();
      if (static_cast<Index>(row.size()) != K)
        fail("result json: B rows must have k entries");
      for (Index c = 0; c < K; ++c) coef(r, c) = row[static_cast<std::size_t>(c)];
    }
  }
  return coef;
}

}  // namespace sprox
