#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcdm/domain.hpp"
#include "mcdm/tco.hpp"

namespace mcdm::io {

using Json = nlohmann::ordered_json;

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Reads a whole file; throws FileNotFound.
std::string read_file(const std::filesystem::path& path);

/// Parses JSON text, converting syntax errors to ParseError with line/column.
Json parse_json(std::string_view text, const std::string& source);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Criteria file: [{"id", "name", "sense"}...]
Json to_json(const CriterionSet& criteria);
CriterionSet criteria_from_json(const Json& j, const std::string& source);

// Survey file: {"respondent", "best", "worst", "bo", "ow"}; best/worst are
// criterion ids. Only the schema is checked here, not the survey invariants.
Json to_json(const ComparisonSurvey& survey, const CriterionSet& criteria);
ComparisonSurvey survey_from_json(const Json& j, const CriterionSet& criteria, const std::string& source);

// Weight vector: {"criteria_ref"?, "weights", "xi_star"?, "consistency_ratio"?, "inconsistent"?}
Json to_json(const WeightVector& weights, const CriterionSet& criteria);
WeightVector weights_from_json(const Json& j, const CriterionSet& criteria, const std::string& source);

// Matrix: {"alternatives", "criteria_ref", "stage", "values": [[...]...]}
Json to_json(const DecisionMatrix& matrix);
DecisionMatrix matrix_from_json(const Json& j, const CriterionSet& criteria, const std::string& source);

/// CSV: header "<label>,<criterion ids...>", then one row per alternative.
DecisionMatrix matrix_from_csv(std::string_view text, const CriterionSet& criteria, Stage stage,
                               const std::string& source);
std::string matrix_to_csv(const DecisionMatrix& matrix);

Json to_json(const RankingResult& ranking);
RankingResult ranking_from_json(const Json& j, const std::string& source);

Json to_json(const VehicleSpec& spec);
VehicleSpec vehicle_from_json(const Json& j, const std::string& source);
std::vector<VehicleSpec> fleet_from_json(const Json& j, const std::string& source);

// File-level loaders: read, parse and validate.
CriterionSet load_criteria(const std::filesystem::path& path);
/// A survey file holds one survey object or an array of them. Surveys are
/// validated against `criteria`.
std::vector<ComparisonSurvey> load_surveys(const std::filesystem::path& path, const CriterionSet& criteria);
/// Every *.json file in `dir`, in filename order.
std::vector<std::filesystem::path> survey_files(const std::filesystem::path& dir);
WeightVector load_weights(const std::filesystem::path& path, const CriterionSet& criteria);
/// JSON or CSV by extension; `stage` is required for CSV and must agree with
/// a JSON file's own stage when given.
DecisionMatrix load_matrix(const std::filesystem::path& path, const CriterionSet& criteria,
                           std::optional<Stage> stage);
std::vector<VehicleSpec> load_fleet(const std::filesystem::path& path);

}  // namespace mcdm::io
