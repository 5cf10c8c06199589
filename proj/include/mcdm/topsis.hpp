#pragma once

#include <span>
#include <string>
#include <vector>

#include "mcdm/domain.hpp"

namespace mcdm {

struct IdealSolutions {
  std::vector<double> pis;  // V+
  std::vector<double> nis;  // V-

  friend bool operator==(const IdealSolutions&, const IdealSolutions&) = default;
};

struct Separation {
  double s_plus = 0.0;
  double s_minus = 0.0;
};

/// Vector normalisation: y_ij = x_ij / sqrt(sum_i x_ij^2).
DecisionMatrix normalize(const DecisionMatrix& raw);

/// v_ij = w_j * y_ij.
DecisionMatrix apply_weights(const DecisionMatrix& normalized, std::span<const double> weights);

/// Benefit columns take PIS = max, NIS = min; Cost columns the reverse.
/// Selection is by exact comparison.
IdealSolutions ideal_solutions(const DecisionMatrix& weighted);

std::vector<Separation> separations(const DecisionMatrix& weighted, const IdealSolutions& ideals);

/// C_i = S_i- / (S_i+ + S_i-). Throws DegenerateAlternative if both are 0.
std::vector<double> performance_scores(std::span<const Separation> seps);

/// Descending by score; equal scores keep input order and are flagged tied.
RankingResult rank(const std::vector<std::string>& alternatives, std::span<const Separation> seps,
                   std::span<const double> scores);

/// Ideal solutions through ranking on an already weighted matrix.
RankingResult rank_weighted(const DecisionMatrix& weighted);

}  // namespace mcdm
