#include "mcdm/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace mcdm::io {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Internal, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string() + ": no such file or not readable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void schema_error(const std::string& source, const std::string& where, const std::string& what) {
  throw Error(ErrorCode::SchemaError, source + ": " + (where.empty() ? "/" : where) + ": " + what);
}

void expect_fields(const Json& j, const std::string& source, const std::string& where,
                   std::initializer_list<const char*> required, std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) schema_error(source, where, "expected an object");
  for (const char* key : required)
    if (!j.contains(key)) schema_error(source, where, std::string("missing field '") + key + "'");
  for (const auto& [key, value] : j.items()) {
    bool known = std::any_of(required.begin(), required.end(), [&](const char* k) { return key == k; }) ||
                 std::any_of(optional.begin(), optional.end(), [&](const char* k) { return key == k; });
    if (!known) schema_error(source, where, "unknown field '" + key + "'");
  }
}

std::string get_string(const Json& j, const char* key, const std::string& source, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_string()) schema_error(source, where + "/" + key, "expected a string");
  return v.get<std::string>();
}

double get_number(const Json& v, const std::string& source, const std::string& where) {
  if (!v.is_number()) schema_error(source, where, "expected a number");
  return v.get<double>();
}

std::vector<double> get_numbers(const Json& j, const char* key, const std::string& source,
                                const std::string& where) {
  const auto& v = j.at(key);
  const std::string here = where + "/" + key;
  if (!v.is_array()) schema_error(source, here, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], source, here + "/" + std::to_string(i)));
  return out;
}

std::vector<std::string> get_strings(const Json& j, const char* key, const std::string& source,
                                     const std::string& where) {
  const auto& v = j.at(key);
  const std::string here = where + "/" + key;
  if (!v.is_array()) schema_error(source, here, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) schema_error(source, here + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

std::size_t criterion_index(const Json& j, const char* key, const CriterionSet& criteria, const std::string& source) {
  const auto id = get_string(j, key, source, "");
  auto idx = criteria.index_of(id);
  if (!idx)
    throw Error(ErrorCode::CrossReferenceError, source + ": /" + key + ": unknown criterion '" + id + "'");
  return *idx;
}

void check_criteria_ref(const std::vector<std::string>& ref, const CriterionSet& criteria,
                        const std::string& source) {
  if (ref != criteria.ids()) {
    std::string got, want;
    for (const auto& s : ref) got += (got.empty() ? "" : ",") + s;
    for (const auto& s : criteria.ids()) want += (want.empty() ? "" : ",") + s;
    throw Error(ErrorCode::CrossReferenceError,
                source + ": criteria [" + got + "] do not match the criteria file [" + want + "]");
  }
}

Json number_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json scale_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) {
    if (std::floor(x) == x && std::abs(x) < 1e15)
      a.push_back(static_cast<long long>(x));
    else
      a.push_back(x);
  }
  return a;
}

}  // namespace

Json to_json(const CriterionSet& criteria) {
  Json a = Json::array();
  for (const auto& c : criteria) a.push_back({{"id", c.id}, {"name", c.name}, {"sense", to_string(c.sense)}});
  return a;
}

CriterionSet criteria_from_json(const Json& j, const std::string& source) {
  if (!j.is_array()) schema_error(source, "", "expected an array of criteria");
  std::vector<Criterion> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "/" + std::to_string(i);
    expect_fields(j[i], source, where, {"id", "name", "sense"});
    Criterion c;
    c.id = get_string(j[i], "id", source, where);
    c.name = get_string(j[i], "name", source, where);
    auto sense = parse_sense(get_string(j[i], "sense", source, where));
    if (!sense) schema_error(source, where + "/sense", "expected \"benefit\" or \"cost\"");
    c.sense = *sense;
    out.push_back(std::move(c));
  }
  try {
    return CriterionSet(std::move(out));
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.what(), e.details());
  }
}

Json to_json(const ComparisonSurvey& s, const CriterionSet& criteria) {
  return {{"respondent", s.respondent},
          {"best", criteria[s.best].id},
          {"worst", criteria[s.worst].id},
          {"bo", scale_array(s.bo)},
          {"ow", scale_array(s.ow)}};
}

ComparisonSurvey survey_from_json(const Json& j, const CriterionSet& criteria, const std::string& source) {
  expect_fields(j, source, "", {"respondent", "best", "worst", "bo", "ow"});
  ComparisonSurvey s;
  s.respondent = get_string(j, "respondent", source, "");
  s.best = criterion_index(j, "best", criteria, source);
  s.worst = criterion_index(j, "worst", criteria, source);
  s.bo = get_numbers(j, "bo", source, "");
  s.ow = get_numbers(j, "ow", source, "");
  return s;
}

Json to_json(const WeightVector& w, const CriterionSet& criteria) {
  Json j;
  j["criteria_ref"] = criteria.ids();
  j["weights"] = number_array(w.weights);
  j["xi_star"] = w.xi_star;
  if (w.inconsistent())
    j["consistency_ratio"] = nullptr;
  else
    j["consistency_ratio"] = w.consistency_ratio;
  j["inconsistent"] = w.inconsistent();
  return j;
}

WeightVector weights_from_json(const Json& j, const CriterionSet& criteria, const std::string& source) {
  expect_fields(j, source, "", {"weights"}, {"criteria_ref", "xi_star", "consistency_ratio", "inconsistent"});
  if (j.contains("criteria_ref")) check_criteria_ref(get_strings(j, "criteria_ref", source, ""), criteria, source);
  WeightVector w;
  w.weights = get_numbers(j, "weights", source, "");
  if (w.weights.size() != criteria.size())
    throw Error(ErrorCode::CrossReferenceError, source + ": " + std::to_string(w.weights.size()) +
                                                    " weights for " + std::to_string(criteria.size()) + " criteria");
  double total = 0.0;
  for (std::size_t i = 0; i < w.weights.size(); ++i) {
    if (!std::isfinite(w.weights[i]) || w.weights[i] < 0.0)
      schema_error(source, "/weights/" + std::to_string(i), "weights must be finite and non-negative");
    total += w.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    schema_error(source, "/weights", "weights sum to " + format_double(total) + ", expected 1");
  if (j.contains("xi_star")) w.xi_star = get_number(j["xi_star"], source, "/xi_star");
  const bool inconsistent = j.contains("inconsistent") && j["inconsistent"].is_boolean() && j["inconsistent"].get<bool>();
  if (j.contains("inconsistent") && !j["inconsistent"].is_boolean())
    schema_error(source, "/inconsistent", "expected a boolean");
  if (inconsistent) {
    w.consistency_ratio = std::numeric_limits<double>::infinity();
  } else if (j.contains("consistency_ratio")) {
    w.consistency_ratio = get_number(j["consistency_ratio"], source, "/consistency_ratio");
  }
  return w;
}

Json to_json(const DecisionMatrix& m) {
  Json values = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double v : m.row(i)) row.push_back(v);
    values.push_back(std::move(row));
  }
  return {{"alternatives", m.alternatives()},
          {"criteria_ref", m.criteria().ids()},
          {"stage", to_string(m.stage())},
          {"values", std::move(values)}};
}

DecisionMatrix matrix_from_json(const Json& j, const CriterionSet& criteria, const std::string& source) {
  expect_fields(j, source, "", {"alternatives", "criteria_ref", "stage", "values"});
  auto alternatives = get_strings(j, "alternatives", source, "");
  check_criteria_ref(get_strings(j, "criteria_ref", source, ""), criteria, source);
  auto stage = parse_stage(get_string(j, "stage", source, ""));
  if (!stage) schema_error(source, "/stage", "expected raw, normalized or weighted");
  const auto& rows = j.at("values");
  if (!rows.is_array()) schema_error(source, "/values", "expected an array of rows");
  if (rows.size() != alternatives.size())
    schema_error(source, "/values", std::to_string(rows.size()) + " rows for " +
                                        std::to_string(alternatives.size()) + " alternatives");
  std::vector<double> values;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "/values/" + std::to_string(i);
    if (!rows[i].is_array()) schema_error(source, where, "expected an array of numbers");
    if (rows[i].size() != criteria.size())
      throw Error(ErrorCode::CrossReferenceError, source + ": " + where + ": " + std::to_string(rows[i].size()) +
                                                      " values for " + std::to_string(criteria.size()) + " criteria");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      values.push_back(get_number(rows[i][k], source, where + "/" + std::to_string(k)));
  }
  try {
    return DecisionMatrix(std::move(alternatives), criteria, std::move(values), *stage);
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.what(), e.details());
  }
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line, const std::string& source, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted)
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

DecisionMatrix matrix_from_csv(std::string_view text, const CriterionSet& criteria, Stage stage,
                               const std::string& source) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!trim(line).empty()) lines.emplace_back(line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw Error(ErrorCode::ParseError, source + ": empty CSV file");

  auto header = split_csv_line(lines[0].second, source, lines[0].first);
  std::vector<std::string> ids;
  for (std::size_t k = 1; k < header.size(); ++k) ids.emplace_back(trim(header[k]));
  if (ids.size() != criteria.size())
    throw Error(ErrorCode::CrossReferenceError, source + ":" + std::to_string(lines[0].first) + ": header has " +
                                                    std::to_string(ids.size()) + " criterion columns, expected " +
                                                    std::to_string(criteria.size()));
  check_criteria_ref(ids, criteria, source);

  std::vector<std::string> alternatives;
  std::vector<double> values;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto [no, line] = lines[r];
    auto fields = split_csv_line(line, source, no);
    if (fields.size() != criteria.size() + 1)
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(no) + ": expected " +
                                             std::to_string(criteria.size() + 1) + " fields, got " +
                                             std::to_string(fields.size()));
    alternatives.emplace_back(trim(fields[0]));
    for (std::size_t k = 1; k < fields.size(); ++k) {
      auto f = trim(fields[k]);
      double v = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw Error(ErrorCode::ParseError, source + ":" + std::to_string(no) + ": field " + std::to_string(k + 1) +
                                               " ('" + std::string(f) + "') is not a number");
      values.push_back(v);
    }
  }
  try {
    return DecisionMatrix(std::move(alternatives), criteria, std::move(values), stage);
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.what(), e.details());
  }
}

std::string matrix_to_csv(const DecisionMatrix& m) {
  std::string out = "alternative";
  for (const auto& c : m.criteria()) out += "," + csv_field(c.id);
  out += "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += csv_field(m.alternatives()[i]);
    for (double v : m.row(i)) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

Json to_json(const RankingResult& ranking) {
  Json rows = Json::array();
  for (const auto& e : ranking.by_rank())
    rows.push_back({{"alternative", e.alternative},
                    {"s_plus", e.s_plus},
                    {"s_minus", e.s_minus},
                    {"score", e.score},
                    {"rank", e.rank},
                    {"tied", e.tied}});
  return {{"ranking", std::move(rows)}};
}

RankingResult ranking_from_json(const Json& j, const std::string& source) {
  expect_fields(j, source, "", {"ranking"});
  const auto& rows = j.at("ranking");
  if (!rows.is_array()) schema_error(source, "/ranking", "expected an array");
  std::vector<RankedAlternative> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "/ranking/" + std::to_string(i);
    expect_fields(rows[i], source, where, {"alternative", "s_plus", "s_minus", "score", "rank", "tied"});
    RankedAlternative e;
    e.alternative = get_string(rows[i], "alternative", source, where);
    e.s_plus = get_number(rows[i]["s_plus"], source, where + "/s_plus");
    e.s_minus = get_number(rows[i]["s_minus"], source, where + "/s_minus");
    e.score = get_number(rows[i]["score"], source, where + "/score");
    if (!rows[i]["rank"].is_number_integer()) schema_error(source, where + "/rank", "expected an integer");
    e.rank = rows[i]["rank"].get<int>();
    if (!rows[i]["tied"].is_boolean()) schema_error(source, where + "/tied", "expected a boolean");
    e.tied = rows[i]["tied"].get<bool>();
    entries.push_back(std::move(e));
  }
  return RankingResult{std::move(entries)};
}

Json to_json(const VehicleSpec& s) {
  return {{"label", s.label},
          {"segment", s.segment},
          {"powertrain", to_string(s.powertrain)},
          {"purchase_price", s.purchase_price},
          {"incentives", s.incentives},
          {"annual_distance", s.annual_distance},
          {"energy_consumption", s.energy_consumption},
          {"energy_price", s.energy_price},
          {"annual_maintenance", s.annual_maintenance},
          {"annual_insurance_and_taxes", s.annual_insurance_and_taxes},
          {"holding_period", s.holding_period},
          {"discount_rate", s.discount_rate},
          {"resale_fraction", s.resale_fraction}};
}

VehicleSpec vehicle_from_json(const Json& j, const std::string& source) {
  expect_fields(j, source, "",
                {"label", "segment", "powertrain", "purchase_price", "annual_distance", "energy_consumption",
                 "energy_price", "holding_period"},
                {"incentives", "annual_maintenance", "annual_insurance_and_taxes", "discount_rate",
                 "resale_fraction"});
  VehicleSpec s;
  s.label = get_string(j, "label", source, "");
  s.segment = get_string(j, "segment", source, "");
  auto pt = parse_powertrain(get_string(j, "powertrain", source, ""));
  if (!pt) schema_error(source, "/powertrain", "expected EV, ICEV or HEV");
  s.powertrain = *pt;
  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = get_number(j[key], source, std::string("/") + key);
  };
  num("purchase_price", s.purchase_price);
  num("incentives", s.incentives);
  num("annual_distance", s.annual_distance);
  num("energy_consumption", s.energy_consumption);
  num("energy_price", s.energy_price);
  num("annual_maintenance", s.annual_maintenance);
  num("annual_insurance_and_taxes", s.annual_insurance_and_taxes);
  num("discount_rate", s.discount_rate);
  num("resale_fraction", s.resale_fraction);
  if (!j["holding_period"].is_number_integer()) schema_error(source, "/holding_period", "expected an integer");
  s.holding_period = j["holding_period"].get<int>();
  if (auto problems = spec_problems(s); !problems.empty())
    throw Error(ErrorCode::InvalidSpec, source + ": invalid vehicle '" + s.label + "'", std::move(problems));
  return s;
}

std::vector<VehicleSpec> fleet_from_json(const Json& j, const std::string& source) {
  if (!j.is_array()) schema_error(source, "", "expected an array of vehicles");
  std::vector<VehicleSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vehicle_from_json(j[i], source + "[" + std::to_string(i) + "]"));
  return out;
}

CriterionSet load_criteria(const fs::path& path) {
  const auto source = path.string();
  return criteria_from_json(parse_json(read_file(path), source), source);
}

std::vector<ComparisonSurvey> load_surveys(const fs::path& path, const CriterionSet& criteria) {
  const auto source = path.string();
  auto j = parse_json(read_file(path), source);
  std::vector<ComparisonSurvey> out;
  auto one = [&](const Json& item, const std::string& where) {
    auto s = survey_from_json(item, criteria, where);
    auto violations = survey_violations(s, criteria.size());
    if (!violations.empty()) {
      SurveyError err(std::move(violations));
      throw Error(err.code(), where + ": " + err.what(), err.details());
    }
    out.push_back(std::move(s));
  };
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) one(j[i], source + "[" + std::to_string(i) + "]");
  } else {
    one(j, source);
  }
  return out;
}

std::vector<fs::path> survey_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::FileNotFound, dir.string() + ": not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

WeightVector load_weights(const fs::path& path, const CriterionSet& criteria) {
  const auto source = path.string();
  return weights_from_json(parse_json(read_file(path), source), criteria, source);
}

DecisionMatrix load_matrix(const fs::path& path, const CriterionSet& criteria, std::optional<Stage> stage) {
  const auto source = path.string();
  auto text = read_file(path);
  if (path.extension() == ".csv") {
    if (!stage) throw Error(ErrorCode::SchemaError, source + ": a CSV matrix needs an explicit stage");
    return matrix_from_csv(text, criteria, *stage, source);
  }
  auto m = matrix_from_json(parse_json(text, source), criteria, source);
  if (stage && *stage != m.stage())
    throw Error(ErrorCode::SchemaError, source + ": file declares stage '" + std::string(to_string(m.stage())) +
                                            "' but '" + std::string(to_string(*stage)) + "' was requested");
  return m;
}

std::vector<VehicleSpec> load_fleet(const fs::path& path) {
  const auto source = path.string();
  return fleet_from_json(parse_json(read_file(path), source), source);
}

}  // namespace mcdm::io
