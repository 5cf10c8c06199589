#include "mcdm/bwm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mcdm/lp.hpp"

namespace mcdm {

namespace {

// Ratio constraints g . W <= 0 for a fixed xi.
std::vector<std::vector<double>> ratio_rows(const ComparisonSurvey& s, double xi) {
  const std::size_t n = s.bo.size();
  std::vector<std::vector<double>> rows;
  auto add = [&](std::size_t num, std::size_t den, double a) {
    // a - xi <= W_num / W_den <= a + xi
    std::vector<double> upper(n, 0.0), lower(n, 0.0);
    upper[num] += 1.0;
    upper[den] -= a + xi;
    lower[num] -= 1.0;
    lower[den] += a - xi;
    rows.push_back(std::move(upper));
    rows.push_back(std::move(lower));
  };
  for (std::size_t j = 0; j < n; ++j)
    if (j != s.best) add(s.best, j, s.bo[j]);
  // j == best on the OW side repeats the best/worst pair already added above.
  for (std::size_t j = 0; j < n; ++j)
    if (j != s.worst && j != s.best) add(j, s.worst, s.ow[j]);
  return rows;
}

// Variables are x_j = W_j - floor >= 0.
lp::Problem feasibility_problem(const ComparisonSurvey& s, double xi, double floor) {
  const std::size_t n = s.bo.size();
  lp::Problem p;
  p.num_vars = n;
  for (auto& g : ratio_rows(s, xi)) {
    const double shift = floor * std::accumulate(g.begin(), g.end(), 0.0);
    p.constraints.push_back({std::move(g), lp::Relation::LessEqual, -shift});
  }
  p.constraints.push_back(
      {std::vector<double>(n, 1.0), lp::Relation::Equal, 1.0 - static_cast<double>(n) * floor});
  return p;
}

std::optional<std::vector<double>> feasible_point(const ComparisonSurvey& s, double xi, double floor) {
  auto sol = lp::solve(feasibility_problem(s, xi, floor));
  if (sol.status == lp::Status::IterationLimit)
    throw Error(ErrorCode::NumericalFailure, "feasibility solve hit its pivot limit at xi = " + std::to_string(xi));
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  for (auto& v : sol.x) v += floor;
  return sol.x;
}

std::vector<double> min_norm_point(const ComparisonSurvey& s, double xi, double floor,
                                   std::vector<double> start) {
  const std::size_t n = s.bo.size();
  lp::Polytope poly;
  poly.eq_lhs.push_back(std::vector<double>(n, 1.0));
  poly.eq_rhs.push_back(1.0);
  for (auto& g : ratio_rows(s, xi)) {
    poly.ineq_lhs.push_back(std::move(g));
    poly.ineq_rhs.push_back(0.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> g(n, 0.0);
    g[j] = -1.0;
    poly.ineq_lhs.push_back(std::move(g));
    poly.ineq_rhs.push_back(-floor);
  }
  auto proj = lp::project(poly, std::vector<double>(n, 1.0 / static_cast<double>(n)), std::move(start));
  if (!proj.converged)
    throw Error(ErrorCode::NumericalFailure, "weight selection on the optimal face did not converge");
  return proj.x;
}

}  // namespace

BwmSolution solve_bwm(const ComparisonSurvey& survey, const BwmOptions& opt) {
  const std::size_t n = survey.bo.size();
  validate_survey(survey, n);
  if (n < 2) throw Error(ErrorCode::TooFewCriteria, "BWM needs at least two criteria");

  BwmSolution out;
  std::vector<double> point;
  double lo = 0.0, hi = opt.xi_upper;
  if (auto p0 = feasible_point(survey, 0.0, opt.weight_floor)) {
    hi = 0.0;
    point = std::move(*p0);
  } else {
    auto top = feasible_point(survey, hi, opt.weight_floor);
    if (!top)
      throw Error(ErrorCode::Infeasible, "survey infeasible at xi = " + std::to_string(hi) +
                                             "; a valid survey is always feasible there");
    point = std::move(*top);
    while (hi - lo > opt.xi_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (auto p = feasible_point(survey, mid, opt.weight_floor)) {
        hi = mid;
        point = std::move(*p);
      } else {
        lo = mid;
      }
      ++out.iterations;
      out.trace.push_back({lo, hi});
    }
  }

  point = min_norm_point(survey, hi, opt.weight_floor, std::move(point));
  // The projection keeps sum(W) = 1 to rounding; clamp and renormalise once.
  for (auto& w : point) w = std::max(w, opt.weight_floor);
  const double total = std::accumulate(point.begin(), point.end(), 0.0);
  for (auto& w : point) w /= total;

  out.xi_star = hi;
  out.weights.weights = std::move(point);
  out.weights.xi_star = hi;
  out.weights.consistency_ratio = consistency_ratio(out, survey);
  if (opt.compute_intervals) out.weight_intervals = weight_intervals(survey, hi, opt);
  return out;
}

double consistency_ratio(const BwmSolution& solution, const ComparisonSurvey& survey) {
  const std::size_t n = survey.bo.size();
  if (solution.weights.weights.size() != n || survey.ow.size() != n || survey.worst >= n)
    throw Error(ErrorCode::MismatchedInputs,
                "solution has " + std::to_string(solution.weights.weights.size()) +
                    " weights but the survey has " + std::to_string(n) + " criteria");
  if (solution.xi_star == 0.0) return 0.0;
  const double a_bw = survey.best_to_worst();
  const auto idx = static_cast<int>(a_bw);
  if (idx < 1 || idx > 9 || static_cast<double>(idx) != a_bw)
    throw Error(ErrorCode::MismatchedInputs, "a_BW must be an integer in 1..9");
  if (idx == 1) return std::numeric_limits<double>::infinity();
  return solution.xi_star / kConsistencyIndex[idx];
}

std::vector<WeightInterval> weight_intervals(const ComparisonSurvey& survey, double xi_star,
                                             const BwmOptions& opt) {
  const std::size_t n = survey.bo.size();
  validate_survey(survey, n);
  auto base = feasibility_problem(survey, xi_star, opt.weight_floor);
  std::vector<WeightInterval> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      auto p = base;
      p.objective.assign(n, 0.0);
      p.objective[j] = sign;
      auto sol = lp::solve(p);
      if (sol.status != lp::Status::Optimal)
        throw Error(ErrorCode::NumericalFailure,
                    "interval LP for criterion " + std::to_string(j) + " did not reach an optimum");
      const double w = sol.x[j] + opt.weight_floor;
      (sign > 0 ? out[j].min : out[j].max) = w;
    }
  }
  return out;
}

WeightVector aggregate_weights(std::span<const WeightVector> solutions) {
  if (solutions.empty()) throw Error(ErrorCode::EmptyInput, "no weight vectors to aggregate");
  const std::size_t n = solutions.front().weights.size();
  WeightVector out;
  out.weights.assign(n, 0.0);
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    const auto& s = solutions[k];
    if (s.weights.size() != n)
      throw Error(ErrorCode::LengthMismatch, "weight vector " + std::to_string(k) + " has " +
                                                 std::to_string(s.weights.size()) + " entries, expected " +
                                                 std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) out.weights[j] += s.weights[j];
    out.xi_star = std::max(out.xi_star, s.xi_star);
    out.consistency_ratio = std::max(out.consistency_ratio, s.consistency_ratio);
  }
  const double count = static_cast<double>(solutions.size());
  for (auto& w : out.weights) w /= count;
  const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  for (auto& w : out.weights) w /= total;
  return out;
}

}  // namespace mcdm
