#pragma once

#include <string>

#include <json.hpp>

#include "sprox/datagen.hpp"
#include "sprox/model.hpp"

namespace sprox {

/// CSV numeric files: comma-separated, LF line endings, no header, '.'
/// decimal point, shortest round-trippable representation. Vectors are
/// single-column files.
Matrix read_csv_matrix(const std::string& path);
Vector read_csv_vector(const std::string& path);
void write_csv(const std::string& path, const Matrix& m);
void write_csv(const std::string& path, const Vector& v);

std::string format_double(double x);

/// groups.json: {"dim": J, "groups": [{"members": [..], "weight": w}, ..]}
/// graph.json:  {"dim": J, "edges": [{"m": m, "l": l, "r": r}, ..]}
/// Indices are 1-based on disk. Schema violations are reported with a path
/// to the offending field.
GroupStructure read_groups_json(const std::string& path);
FusionGraph read_graph_json(const std::string& path);
void write_groups_json(const std::string& path, const GroupStructure& groups);
void write_graph_json(const std::string& path, const FusionGraph& graph);

nlohmann::json genspec_to_json(const GenSpec& spec);
GenSpec genspec_from_json(const nlohmann::json& j);
void write_spec_json(const std::string& path, const GenSpec& spec);
GenSpec read_spec_json(const std::string& path);

/// result.json for a solve: coefficients (row-major for matrices), both
/// objectives, iteration/time accounting and a full echo of the config.
nlohmann::json result_to_json(const SolveResult& result,
                              const SolverConfig& config, Index j, Index k,
                              double gram_seconds = 0.0);
void write_result_json(const std::string& path, const nlohmann::json& result);
nlohmann::json read_json_file(const std::string& path);

/// Coefficients back out of a result.json payload.
Matrix coef_from_result_json(const nlohmann::json& j);

}  // namespace sprox
