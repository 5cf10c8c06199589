#include "mcdm/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace mcdm {

std::string_view to_string(Sense sense) { return sense == Sense::Benefit ? "benefit" : "cost"; }

std::optional<Sense> parse_sense(std::string_view text) {
  if (text == "benefit") return Sense::Benefit;
  if (text == "cost") return Sense::Cost;
  return std::nullopt;
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Raw: return "raw";
    case Stage::Normalized: return "normalized";
    case Stage::Weighted: return "weighted";
  }
  return "raw";
}

std::optional<Stage> parse_stage(std::string_view text) {
  if (text == "raw") return Stage::Raw;
  if (text == "normalized") return Stage::Normalized;
  if (text == "weighted") return Stage::Weighted;
  return std::nullopt;
}

CriterionSet::CriterionSet(std::vector<Criterion> criteria) : criteria_(std::move(criteria)) {
  if (criteria_.size() < 2)
    throw Error(ErrorCode::TooFewCriteria, "a criterion set needs at least two criteria, got " +
                                               std::to_string(criteria_.size()));
  std::set<std::string_view> seen;
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < criteria_.size(); ++i) {
    const auto& c = criteria_[i];
    if (c.id.empty()) problems.push_back("criterion " + std::to_string(i) + ": empty id");
    if (c.name.empty()) problems.push_back("criterion " + std::to_string(i) + ": empty name");
    if (!seen.insert(c.id).second)
      problems.push_back("criterion " + std::to_string(i) + ": duplicate id '" + c.id + "'");
  }
  if (!problems.empty())
    throw Error(ErrorCode::InvalidCriteria, "invalid criterion set", std::move(problems));
}

std::optional<std::size_t> CriterionSet::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < criteria_.size(); ++i)
    if (criteria_[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::string> CriterionSet::ids() const {
  std::vector<std::string> out;
  out.reserve(criteria_.size());
  for (const auto& c : criteria_) out.push_back(c.id);
  return out;
}

const CriterionSet& canonical_criteria() {
  static const CriterionSet set({
      {"cost_of_ownership", "Cost of Ownership", Sense::Cost},
      {"safety_comfort", "Safety & Comfort", Sense::Benefit},
      {"range", "Range", Sense::Benefit},
      {"network_effect", "Network Effect", Sense::Benefit},
      {"refuelling_infrastructure", "Re-fuelling Infrastructure & Convenience", Sense::Benefit},
      {"environmental_impact", "Environmental Impact", Sense::Benefit},
      {"policy_push", "Policy Push & Regulations", Sense::Benefit},
  });
  return set;
}

std::size_t elicitation_slots(std::size_t n) {
  if (n < 2)
    throw Error(ErrorCode::TooFewCriteria,
                "elicitation needs at least two criteria, got " + std::to_string(n));
  return 2 * n - 3;
}

namespace {

bool on_scale(double v) { return v >= 1.0 && v <= 9.0 && std::floor(v) == v; }

std::string fmt_value(double v) {
  if (std::floor(v) == v && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  return std::to_string(v);
}

}  // namespace

std::vector<SurveyViolation> survey_violations(const ComparisonSurvey& s, std::size_t n) {
  std::vector<SurveyViolation> out;
  if (s.bo.size() != n)
    out.push_back({ErrorCode::LengthMismatch,
                   "bo has " + std::to_string(s.bo.size()) + " entries, expected " + std::to_string(n)});
  if (s.ow.size() != n)
    out.push_back({ErrorCode::LengthMismatch,
                   "ow has " + std::to_string(s.ow.size()) + " entries, expected " + std::to_string(n)});
  bool indices_ok = true;
  if (s.best >= n) {
    out.push_back({ErrorCode::LengthMismatch, "best index " + std::to_string(s.best) + " out of range"});
    indices_ok = false;
  }
  if (s.worst >= n) {
    out.push_back({ErrorCode::LengthMismatch, "worst index " + std::to_string(s.worst) + " out of range"});
    indices_ok = false;
  }
  if (indices_ok && s.best == s.worst)
    out.push_back({ErrorCode::BestEqualsWorst, "best and worst are the same criterion"});
  if (!out.empty() && out.front().code == ErrorCode::LengthMismatch) return out;

  for (std::size_t j = 0; j < n; ++j) {
    if (!on_scale(s.bo[j]))
      out.push_back({ErrorCode::OutOfScale, "bo[" + std::to_string(j) + "] = " + fmt_value(s.bo[j]) +
                                                " is not an integer in 1..9"});
    if (!on_scale(s.ow[j]))
      out.push_back({ErrorCode::OutOfScale, "ow[" + std::to_string(j) + "] = " + fmt_value(s.ow[j]) +
                                                " is not an integer in 1..9"});
  }
  if (s.bo[s.best] != 1.0)
    out.push_back({ErrorCode::SelfComparisonNotUnit,
                   "bo[best] = " + fmt_value(s.bo[s.best]) + ", must be 1"});
  if (s.ow[s.worst] != 1.0)
    out.push_back({ErrorCode::SelfComparisonNotUnit,
                   "ow[worst] = " + fmt_value(s.ow[s.worst]) + ", must be 1"});
  if (s.best != s.worst && s.bo[s.worst] != s.ow[s.best])
    out.push_back({ErrorCode::BestWorstMismatch, "bo[worst] = " + fmt_value(s.bo[s.worst]) +
                                                     " differs from ow[best] = " + fmt_value(s.ow[s.best])});
  return out;
}

namespace {

std::string survey_message(const std::vector<SurveyViolation>& v) {
  std::string msg = "invalid survey: ";
  msg += to_string(v.front().code);
  if (v.size() > 1) msg += " (+" + std::to_string(v.size() - 1) + " more)";
  return msg;
}

std::vector<std::string> survey_details(const std::vector<SurveyViolation>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(std::string(to_string(x.code)) + ": " + x.message);
  return out;
}

}  // namespace

SurveyError::SurveyError(std::vector<SurveyViolation> violations)
    : Error(violations.front().code, survey_message(violations), survey_details(violations)),
      violations_(std::move(violations)) {}

const ComparisonSurvey& validate_survey(const ComparisonSurvey& survey, std::size_t n) {
  auto v = survey_violations(survey, n);
  if (!v.empty()) throw SurveyError(std::move(v));
  return survey;
}

bool WeightVector::inconsistent() const { return std::isinf(consistency_ratio); }

DecisionMatrix::DecisionMatrix(std::vector<std::string> alternatives, CriterionSet criteria,
                               std::vector<double> values, Stage stage)
    : alternatives_(std::move(alternatives)),
      criteria_(std::move(criteria)),
      values_(std::move(values)),
      stage_(stage) {
  if (values_.size() != alternatives_.size() * criteria_.size())
    throw Error(ErrorCode::DimensionMismatch,
                "matrix has " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(alternatives_.size()) + " x " + std::to_string(criteria_.size()));
  std::vector<std::string> problems;
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < alternatives_.size(); ++i) {
    if (alternatives_[i].empty()) problems.push_back("alternative " + std::to_string(i) + ": empty label");
    if (!seen.insert(alternatives_[i]).second)
      problems.push_back("alternative " + std::to_string(i) + ": duplicate label '" + alternatives_[i] + "'");
  }
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) {
      double v = at(i, j);
      if (!std::isfinite(v) || v < 0.0)
        problems.push_back("value [" + std::to_string(i) + "][" + std::to_string(j) +
                           "] must be finite and non-negative");
    }
  if (problems.empty() && stage_ == Stage::Normalized) {
    for (std::size_t j = 0; j < cols(); ++j) {
      double ss = 0.0;
      for (std::size_t i = 0; i < rows(); ++i) ss += at(i, j) * at(i, j);
      if (std::abs(ss - 1.0) > 1e-6)
        problems.push_back("normalized column '" + criteria_[j].id + "' has sum of squares " +
                           std::to_string(ss));
    }
  }
  if (!problems.empty()) throw Error(ErrorCode::InvalidMatrix, "invalid decision matrix", std::move(problems));
}

std::vector<double> DecisionMatrix::column(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, j);
  return out;
}

std::vector<RankedAlternative> RankingResult::by_rank() const {
  auto out = entries;
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedAlternative& a, const RankedAlternative& b) { return a.rank < b.rank; });
  return out;
}

const RankedAlternative& RankingResult::top() const {
  if (entries.empty()) throw Error(ErrorCode::EmptyMatrix, "ranking is empty");
  return *std::min_element(entries.begin(), entries.end(),
                           [](const auto& a, const auto& b) { return a.rank < b.rank; });
}

}  // namespace mcdm
