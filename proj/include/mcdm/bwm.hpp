#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mcdm/domain.hpp"

namespace mcdm {

struct BwmOptions {
  /// Bisection stops once the xi bracket is narrower than this.
  double xi_tolerance = 1e-6;
  /// Initial upper bracket; any valid survey is feasible at xi = 8.
  double xi_upper = 9.0;
  /// Lower bound imposed on every weight so ratio constraints stay defined.
  double weight_floor = 1e-9;
  bool compute_intervals = false;
};

struct WeightInterval {
  double min = 0.0;
  double max = 0.0;
};

struct Bracket {
  double infeasible_below = 0.0;
  double feasible_at = 0.0;
};

struct BwmSolution {
  WeightVector weights;
  double xi_star = 0.0;
  std::optional<std::vector<WeightInterval>> weight_intervals;
  int iterations = 0;
  /// Bracket after each bisection step.
  std::vector<Bracket> trace;
};

/// Minimises the largest deviation |W_B/W_j - a_Bj|, |W_j/W_W - a_jW| over
/// the weight simplex. For a fixed xi the constraints are linear in W, so xi
/// is bisected over [0, xi_upper] with an exact simplex feasibility check at
/// each step. When the optimal face is not a single point the reported
/// weights are its minimum-norm point, which keeps the answer independent of
/// criterion order.
BwmSolution solve_bwm(const ComparisonSurvey& survey, const BwmOptions& options = {});

/// Consistency index for a_BW = 1..9; index 0 unused.
inline constexpr double kConsistencyIndex[10] = {0.0,  0.00, 0.44, 1.00, 1.63,
                                                 2.30, 3.00, 3.73, 4.47, 5.23};

/// xi* / CI(a_BW). Returns 0 for xi* = 0 and +infinity when a_BW = 1 but
/// xi* > 0.
double consistency_ratio(const BwmSolution& solution, const ComparisonSurvey& survey);

/// Range of each weight over the set of weight vectors achieving `xi_star`
/// (two LPs per criterion).
std::vector<WeightInterval> weight_intervals(const ComparisonSurvey& survey, double xi_star,
                                             const BwmOptions& options = {});

/// Arithmetic mean of respondent weights, renormalised to sum to one. The
/// result carries the largest xi* and consistency ratio among the inputs.
WeightVector aggregate_weights(std::span<const WeightVector> solutions);

}  // namespace mcdm
