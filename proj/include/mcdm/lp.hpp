#pragma once

#include <cstddef>
#include <vector>

namespace mcdm::lp {

enum class Relation { LessEqual, GreaterEqual, Equal };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

/// minimize objective . x  subject to constraints, x >= 0.
/// An empty objective means "any feasible point" (phase 1 only).
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Constraint> constraints;
  std::vector<double> objective;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Options {
  /// Phase-1 residual (sum of artificials) above which the problem is declared
  /// infeasible.
  double feasibility_tol = 1e-11;
  /// Smallest magnitude accepted as a pivot or a negative reduced cost.
  double pivot_tol = 1e-12;
  std::size_t max_pivots = 10000;
};

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Dense two-phase tableau simplex. Entering and leaving variables follow
/// Bland's smallest-index rule, so the result is a deterministic function of
/// the input and cycling cannot occur.
Solution solve(const Problem& problem, const Options& options = {});

/// Euclidean projection of `target` onto the polytope
///   equalities: E x = e,  inequalities: G x <= h
/// starting from a feasible `start`, by a primal active-set method. The
/// projection is unique, so unlike an LP vertex it does not depend on the
/// order of variables or constraints.
struct Polytope {
  std::vector<std::vector<double>> eq_lhs;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ineq_lhs;
  std::vector<double> ineq_rhs;
};

struct Projection {
  bool converged = false;
  std::vector<double> x;
  std::size_t iterations = 0;
};

Projection project(const Polytope& polytope, const std::vector<double>& target,
                   std::vector<double> start, std::size_t max_iterations = 1000);

}  // namespace mcdm::lp
