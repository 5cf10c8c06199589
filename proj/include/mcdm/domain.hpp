#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcdm/error.hpp"

namespace mcdm {

enum class Sense { Benefit, Cost };

std::string_view to_string(Sense sense);
std::optional<Sense> parse_sense(std::string_view text);

struct Criterion {
  std::string id;
  std::string name;
  Sense sense = Sense::Benefit;

  friend bool operator==(const Criterion&, const Criterion&) = default;
};

/// Ordered, immutable list of criteria. Order is significant: every vector
/// and matrix column in the pipeline is indexed by position in this set.
class CriterionSet {
 public:
  /// Throws Error(TooFewCriteria) for fewer than two criteria and
  /// Error(InvalidCriteria) for duplicate ids or empty names.
  explicit CriterionSet(std::vector<Criterion> criteria);

  std::size_t size() const noexcept { return criteria_.size(); }
  const Criterion& operator[](std::size_t i) const { return criteria_[i]; }
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::vector<std::string> ids() const;

  auto begin() const noexcept { return criteria_.begin(); }
  auto end() const noexcept { return criteria_.end(); }

  friend bool operator==(const CriterionSet&, const CriterionSet&) = default;

 private:
  std::vector<Criterion> criteria_;
};

/// The seven vehicle-purchase criteria, in the order the published weight
/// table lists them. Senses are not stated by the source; cost of ownership
/// is Cost because its positive ideal is the column minimum, all others are
/// Benefit.
const CriterionSet& canonical_criteria();

/// Number of free comparisons a respondent supplies: 2n - 3.
std::size_t elicitation_slots(std::size_t n);

/// One respondent's best/worst elicitation. Indices are 0-based positions in
/// the CriterionSet. Comparisons are integers 1..9 at the boundary but held
/// as doubles.
struct ComparisonSurvey {
  std::string respondent;
  std::size_t best = 0;
  std::size_t worst = 0;
  std::vector<double> bo;  // best-to-others a_Bj
  std::vector<double> ow;  // others-to-worst a_jW

  double best_to_worst() const { return bo.at(worst); }

  friend bool operator==(const ComparisonSurvey&, const ComparisonSurvey&) = default;
};

struct SurveyViolation {
  ErrorCode code;
  std::string message;
};

/// Every invariant the survey breaks; empty when the survey is valid for a
/// set of `n` criteria.
std::vector<SurveyViolation> survey_violations(const ComparisonSurvey& survey, std::size_t n);

class SurveyError : public Error {
 public:
  explicit SurveyError(std::vector<SurveyViolation> violations);
  const std::vector<SurveyViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<SurveyViolation> violations_;
};

/// Returns `survey` unchanged if valid, otherwise throws SurveyError whose
/// code() is the first violation's code.
const ComparisonSurvey& validate_survey(const ComparisonSurvey& survey, std::size_t n);

struct WeightVector {
  std::vector<double> weights;
  double xi_star = 0.0;
  /// +infinity when the survey has a_BW = 1 and xi* > 0.
  double consistency_ratio = 0.0;

  bool inconsistent() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

enum class Stage { Raw, Normalized, Weighted };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);

/// m alternatives x n criteria, row-major.
class DecisionMatrix {
 public:
  /// Validates dimensions, finiteness and non-negativity; a Normalized matrix
  /// must also have unit-norm columns within 1e-6.
  DecisionMatrix(std::vector<std::string> alternatives, CriterionSet criteria,
                 std::vector<double> values, Stage stage);

  std::size_t rows() const noexcept { return alternatives_.size(); }
  std::size_t cols() const noexcept { return criteria_.size(); }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * cols(), cols());
  }
  std::vector<double> column(std::size_t j) const;

  const std::vector<std::string>& alternatives() const noexcept { return alternatives_; }
  const CriterionSet& criteria() const noexcept { return criteria_; }
  const std::vector<double>& values() const noexcept { return values_; }
  Stage stage() const noexcept { return stage_; }

  friend bool operator==(const DecisionMatrix&, const DecisionMatrix&) = default;

 private:
  std::vector<std::string> alternatives_;
  CriterionSet criteria_;
  std::vector<double> values_;
  Stage stage_;
};

struct RankedAlternative {
  std::string alternative;
  double s_plus = 0.0;
  double s_minus = 0.0;
  double score = 0.0;
  int rank = 0;
  /// Set when another alternative has exactly the same score.
  bool tied = false;

  friend bool operator==(const RankedAlternative&, const RankedAlternative&) = default;
};

/// Entries are kept in input (alternative) order; by_rank() sorts them.
struct RankingResult {
  std::vector<RankedAlternative> entries;

  std::vector<RankedAlternative> by_rank() const;
  const RankedAlternative& top() const;

  friend bool operator==(const RankingResult&, const RankingResult&) = default;
};

}  // namespace mcdm
