#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mcdm/bwm.hpp"
#include "support.hpp"

using namespace mcdm;
using testing_support::random_consistent_survey;
using testing_support::random_survey;
using testing_support::to_oracle;

namespace {

const ComparisonSurvey kN4{"n4", 0, 3, {1, 3, 5, 8}, {8, 4, 2, 1}};

// Ratio constraints at (weights, xi) within tol.
void expect_constraints_hold(const ComparisonSurvey& s, const BwmSolution& sol, double tol = 1e-8) {
  const auto& w = sol.weights.weights;
  for (std::size_t j = 0; j < w.size(); ++j) {
    EXPECT_LE(std::abs(w[s.best] / w[j] - s.bo[j]), sol.xi_star + tol) << "bo j=" << j;
    EXPECT_LE(std::abs(w[j] / w[s.worst] - s.ow[j]), sol.xi_star + tol) << "ow j=" << j;
  }
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(SolveBwm, ConsistentThreeCriteriaClosedForm) {
  const ComparisonSurvey s{"c", 0, 2, {1, 2, 4}, {4, 2, 1}};
  BwmOptions opt;
  opt.compute_intervals = true;
  const auto sol = solve_bwm(s, opt);
  EXPECT_EQ(sol.xi_star, 0.0);
  EXPECT_NEAR(sol.weights.weights[0], 4.0 / 7, 1e-9);
  EXPECT_NEAR(sol.weights.weights[1], 2.0 / 7, 1e-9);
  EXPECT_NEAR(sol.weights.weights[2], 1.0 / 7, 1e-9);
  EXPECT_EQ(consistency_ratio(sol, s), 0.0);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR((*sol.weight_intervals)[j].min, sol.weights.weights[j], 1e-9);
    EXPECT_NEAR((*sol.weight_intervals)[j].max, sol.weights.weights[j], 1e-9);
  }
}

TEST(SolveBwm, TwoCriteriaAlwaysConsistent) {
  for (int k = 1; k <= 9; ++k) {
    const ComparisonSurvey s{"two", 0, 1, {1, double(k)}, {double(k), 1}};
    BwmOptions opt;
    opt.compute_intervals = true;
    const auto sol = solve_bwm(s, opt);
    EXPECT_EQ(sol.xi_star, 0.0) << k;
    EXPECT_NEAR(sol.weights.weights[0], k / (k + 1.0), 1e-9);
    EXPECT_NEAR(sol.weights.weights[1], 1.0 / (k + 1.0), 1e-9);
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_NEAR((*sol.weight_intervals)[j].max - (*sol.weight_intervals)[j].min, 0.0, 1e-9);
  }
}

TEST(SolveBwm, FourCriteriaMatchesSimplexOracle) {
  const auto sol = solve_bwm(kN4);
  const auto grid = oracle::rho_grid_xi(to_oracle(kN4), 5e-4);
  EXPECT_NEAR(sol.xi_star, grid.xi, 2e-3);
  // The reported point attains xi* exactly (up to the bisection width).
  EXPECT_NEAR(oracle::minimax_objective(to_oracle(kN4), sol.weights.weights), sol.xi_star, 1e-6);
  expect_constraints_hold(kN4, sol);
  EXPECT_NEAR(sum(sol.weights.weights), 1.0, 1e-12);
}

TEST(SolveBwm, RandomSurveysAgreeWithOracle) {
  std::mt19937 rng(20240601);
  for (int t = 0; t < 120; ++t) {
    const std::size_t n = 2 + rng() % 5;
    const auto s = random_survey(rng, n);
    const auto sol = solve_bwm(s);
    const auto grid = oracle::rho_grid_xi(to_oracle(s), 5e-4);
    EXPECT_NEAR(sol.xi_star, grid.xi, 2e-3) << "t=" << t << " n=" << n;
    EXPECT_LE(oracle::minimax_objective(to_oracle(s), sol.weights.weights), sol.xi_star + 1e-8);
    expect_constraints_hold(s, sol);
    EXPECT_NEAR(sum(sol.weights.weights), 1.0, 1e-12);
    for (double w : sol.weights.weights) EXPECT_GT(w, 0.0);
  }
}

// The rho-grid oracle reduces the search to one dimension; on n = 3 it is
// cross-checked against the literal simplex grid.
// Both grids only overestimate xi*. The literal grid is much coarser in
// ratio space near small weights, so it is checked from one side plus a
// loose bound on its discretisation error.
TEST(Oracle, RhoGridAgreesWithLiteralSimplexGrid) {
  std::mt19937 rng(5);
  for (int t = 0; t < 6; ++t) {
    const auto s = random_survey(rng, 3);
    const double rho = oracle::rho_grid_xi(to_oracle(s), 5e-4).xi;
    const double literal = oracle::simplex_grid_xi(to_oracle(s), 2e-3);
    EXPECT_GE(literal, rho - 1e-3);
    EXPECT_LE(literal - rho, 0.1);
  }
}

// Tied comparisons on six criteria leave a degenerate vertex at xi = 0.
TEST(SolveBwm, DegenerateConsistentVertex) {
  const ComparisonSurvey s{"d", 0, 2, {1, 1, 8, 8, 2, 8}, {8, 8, 1, 1, 4, 1}};
  const auto sol = solve_bwm(s);
  EXPECT_EQ(sol.xi_star, 0.0);
  const auto closed = oracle::consistent_weights(to_oracle(s));
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(sol.weights.weights[j], closed[j], 1e-9);
}

TEST(SolveBwm, ConsistentSurveyLaw) {
  std::mt19937 rng(99);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 6;
    const auto s = random_consistent_survey(rng, n);
    ASSERT_TRUE(survey_violations(s, n).empty());
    const auto sol = solve_bwm(s);
    EXPECT_LE(sol.xi_star, 1e-6);
    const auto closed = oracle::consistent_weights(to_oracle(s));
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(sol.weights.weights[j], closed[j], 1e-4);
  }
}

TEST(SolveBwm, BracketIsMonotone) {
  std::mt19937 rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto s = random_survey(rng, 4);
    const auto sol = solve_bwm(s);
    double lo = 0.0, hi = 9.0;
    for (const auto& b : sol.trace) {
      EXPECT_GE(b.infeasible_below, lo);
      EXPECT_LE(b.feasible_at, hi);
      lo = b.infeasible_below;
      hi = b.feasible_at;
    }
    if (!sol.trace.empty()) EXPECT_LE(sol.trace.back().feasible_at - sol.trace.back().infeasible_below, 1e-6);
    EXPECT_EQ(sol.iterations, static_cast<int>(sol.trace.size()));
  }
}

TEST(SolveBwm, PermutationEquivariance) {
  std::mt19937 rng(17);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 3 + rng() % 4;
    const auto s = random_survey(rng, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    // perm[k] = original index placed at position k.
    ComparisonSurvey p = s;
    for (std::size_t k = 0; k < n; ++k) {
      p.bo[k] = s.bo[perm[k]];
      p.ow[k] = s.ow[perm[k]];
      if (perm[k] == s.best) p.best = k;
      if (perm[k] == s.worst) p.worst = k;
    }
    const auto a = solve_bwm(s), b = solve_bwm(p);
    EXPECT_EQ(a.xi_star, b.xi_star);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(b.weights.weights[k], a.weights.weights[perm[k]], 1e-7);
  }
}

TEST(SolveBwm, Deterministic) {
  std::mt19937 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_survey(rng, 5);
    const auto a = solve_bwm(s), b = solve_bwm(s);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.iterations, b.iterations);
  }
}

TEST(SolveBwm, RejectsInvalidSurvey) {
  ComparisonSurvey s = kN4;
  s.ow[0] = 3;
  try {
    solve_bwm(s);
    FAIL();
  } catch (const SurveyError& e) {
    EXPECT_EQ(e.code(), ErrorCode::BestWorstMismatch);
  }
}

TEST(ConsistencyRatio, UsesIndexOfBestToWorst) {
  const auto sol = solve_bwm(kN4);
  EXPECT_GT(sol.xi_star, 0.0);
  // a_BW = 8 for this survey.
  EXPECT_DOUBLE_EQ(consistency_ratio(sol, kN4), sol.xi_star / 4.47);
  EXPECT_DOUBLE_EQ(sol.weights.consistency_ratio, sol.xi_star / 4.47);

  const ComparisonSurvey a4{"a4", 0, 2, {1, 3, 4}, {4, 3, 1}};
  const auto s4 = solve_bwm(a4);
  EXPECT_GT(s4.xi_star, 0.0);
  EXPECT_DOUBLE_EQ(consistency_ratio(s4, a4), s4.xi_star / 1.63);
}

TEST(ConsistencyRatio, UnitBestToWorstIsInconsistentWhenXiPositive) {
  // a_BW = 1 but the middle criterion is rated far from both ends.
  const ComparisonSurvey s{"flat", 0, 2, {1, 5, 1}, {1, 5, 1}};
  const auto sol = solve_bwm(s);
  EXPECT_GT(sol.xi_star, 0.0);
  EXPECT_TRUE(std::isinf(consistency_ratio(sol, s)));
  EXPECT_TRUE(sol.weights.inconsistent());

  const ComparisonSurvey even{"even", 0, 1, {1, 1}, {1, 1}};
  EXPECT_EQ(consistency_ratio(solve_bwm(even), even), 0.0);
}

TEST(ConsistencyRatio, MismatchedInputs) {
  const auto sol = solve_bwm(kN4);
  const ComparisonSurvey three{"c", 0, 2, {1, 2, 4}, {4, 2, 1}};
  try {
    consistency_ratio(sol, three);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedInputs);
  }
}

TEST(WeightIntervals, ContainPointAndNearOptimalGridSet) {
  BwmOptions opt;
  opt.compute_intervals = true;
  const auto sol = solve_bwm(kN4, opt);
  const auto& iv = *sol.weight_intervals;
  // The rho grid has to land inside the optimal band, so the level sits a
  // little above xi* and the grid is fine enough to hit it.
  const auto box = oracle::near_optimal_box(to_oracle(kN4), sol.xi_star + 1e-5, 1e-6);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_LE(iv[j].min, sol.weights.weights[j] + 1e-12);
    EXPECT_GE(iv[j].max, sol.weights.weights[j] - 1e-12);
    // Oracle box built from the same optimal face should coincide closely.
    EXPECT_NEAR(iv[j].min, box[j].first, 2e-3) << j;
    EXPECT_NEAR(iv[j].max, box[j].second, 2e-3) << j;
  }
}

TEST(WeightIntervals, RandomSurveysContainSolverPoint) {
  std::mt19937 rng(71);
  BwmOptions opt;
  opt.compute_intervals = true;
  for (int t = 0; t < 40; ++t) {
    const auto s = random_survey(rng, 2 + rng() % 5);
    const auto sol = solve_bwm(s, opt);
    for (std::size_t j = 0; j < s.bo.size(); ++j) {
      EXPECT_LE((*sol.weight_intervals)[j].min, sol.weights.weights[j] + 1e-9);
      EXPECT_GE((*sol.weight_intervals)[j].max, sol.weights.weights[j] - 1e-9);
    }
  }
}

TEST(Aggregate, Examples) {
  const std::vector<WeightVector> one{{{0.5, 0.3, 0.2}, 0.1, 0.05}};
  EXPECT_EQ(aggregate_weights(one).weights, (std::vector<double>{0.5, 0.3, 0.2}));
  const std::vector<WeightVector> two{{{0.6, 0.4}, 0.2, 0.1}, {{0.4, 0.6}, 0.5, 0.3}};
  const auto agg = aggregate_weights(two);
  EXPECT_NEAR(agg.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(agg.weights[1], 0.5, 1e-15);
  EXPECT_EQ(agg.xi_star, 0.5);
  EXPECT_EQ(agg.consistency_ratio, 0.3);
}

TEST(Aggregate, Errors) {
  try {
    aggregate_weights(std::vector<WeightVector>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
  try {
    aggregate_weights(std::vector<WeightVector>{{{0.5, 0.5}, 0, 0}, {{1.0}, 0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(Aggregate, InconsistentRespondentPropagates) {
  const std::vector<WeightVector> v{{{0.5, 0.5}, 0.1, 0.2},
                                    {{0.5, 0.5}, 0.3, std::numeric_limits<double>::infinity()}};
  EXPECT_TRUE(aggregate_weights(v).inconsistent());
}
