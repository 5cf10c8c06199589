#include "mcdm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace mcdm::lp {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Tableau {
  std::size_t cols = 0;  // structural + slack + artificial, rhs stored separately
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t c) {
    auto& pr = rows[r];
    const double p = pr[c];
    for (auto& v : pr) v /= p;
    rhs[r] /= p;
    pr[c] = 1.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == r) continue;
      const double f = rows[k][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) rows[k][j] -= f * pr[j];
      rows[k][c] = 0.0;
      rhs[k] -= f * rhs[r];
      if (rhs[k] < 0.0 && rhs[k] > -1e-13) rhs[k] = 0.0;
    }
    basis[r] = c;
  }

  double value(const std::vector<double>& cost) const {
    double v = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) v += cost[basis[r]] * rhs[r];
    return v;
  }
};

enum class Outcome { Optimal, Unbounded, IterationLimit };

// Bland's rule over the columns in [0, allowed_cols).
Outcome iterate(Tableau& t, const std::vector<double>& cost, std::size_t allowed_cols,
                const Options& opt, std::size_t& pivots) {
  std::vector<char> in_basis(t.cols, 0);
  while (true) {
    std::fill(in_basis.begin(), in_basis.end(), 0);
    for (auto b : t.basis) in_basis[b] = 1;

    std::size_t entering = kNone;
    for (std::size_t j = 0; j < allowed_cols; ++j) {
      if (in_basis[j]) continue;
      double d = cost[j];
      for (std::size_t r = 0; r < t.rows.size(); ++r) d -= cost[t.basis[r]] * t.rows[r][j];
      if (d < -opt.pivot_tol) {
        entering = j;
        break;
      }
    }
    if (entering == kNone) return Outcome::Optimal;

    std::size_t leave = kNone;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double a = t.rows[r][entering];
      if (a <= opt.pivot_tol) continue;
      const double ratio = t.rhs[r] / a;
      const double eps = 1e-13 * (1.0 + std::abs(best));
      if (leave == kNone || ratio < best - eps ||
          (std::abs(ratio - best) <= eps && t.basis[r] < t.basis[leave])) {
        if (leave == kNone || ratio < best - eps) best = ratio;
        leave = r;
      }
    }
    if (leave == kNone) return Outcome::Unbounded;
    if (++pivots > opt.max_pivots) return Outcome::IterationLimit;
    t.pivot(leave, entering);
  }
}

}  // namespace

Solution solve(const Problem& problem, const Options& opt) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.constraints.size();

  std::vector<Constraint> cons = problem.constraints;
  std::size_t n_slack = 0, n_art = 0;
  for (auto& c : cons) {
    c.coeffs.resize(n, 0.0);
    if (c.rhs < 0.0) {
      for (auto& v : c.coeffs) v = -v;
      c.rhs = -c.rhs;
      if (c.relation == Relation::LessEqual)
        c.relation = Relation::GreaterEqual;
      else if (c.relation == Relation::GreaterEqual)
        c.relation = Relation::LessEqual;
    }
    if (c.relation != Relation::Equal) ++n_slack;
    if (c.relation != Relation::LessEqual) ++n_art;
  }

  Tableau t;
  t.cols = n + n_slack + n_art;
  t.rows.assign(m, std::vector<double>(t.cols, 0.0));
  t.rhs.assign(m, 0.0);
  t.basis.assign(m, kNone);
  const std::size_t art_begin = n + n_slack;
  std::size_t slack_col = n, art_col = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = cons[i];
    std::copy(c.coeffs.begin(), c.coeffs.end(), t.rows[i].begin());
    t.rhs[i] = c.rhs;
    switch (c.relation) {
      case Relation::LessEqual:
        t.rows[i][slack_col] = 1.0;
        t.basis[i] = slack_col++;
        break;
      case Relation::GreaterEqual:
        t.rows[i][slack_col++] = -1.0;
        t.rows[i][art_col] = 1.0;
        t.basis[i] = art_col++;
        break;
      case Relation::Equal:
        t.rows[i][art_col] = 1.0;
        t.basis[i] = art_col++;
        break;
    }
  }

  Solution sol;
  std::vector<double> phase1_cost(t.cols, 0.0);
  for (std::size_t j = art_begin; j < t.cols; ++j) phase1_cost[j] = 1.0;

  if (n_art > 0) {
    auto out = iterate(t, phase1_cost, t.cols, opt, sol.pivots);
    if (out == Outcome::IterationLimit) {
      sol.status = Status::IterationLimit;
      return sol;
    }
    if (t.value(phase1_cost) > opt.feasibility_tol) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are linearly dependent and dropped.
    for (std::size_t r = 0; r < t.rows.size();) {
      if (t.basis[r] < art_begin) {
        ++r;
        continue;
      }
      std::size_t col = kNone;
      for (std::size_t j = 0; j < art_begin; ++j)
        if (std::abs(t.rows[r][j]) > opt.pivot_tol) {
          col = j;
          break;
        }
      if (col != kNone) {
        t.pivot(r, col);
        ++r;
      } else {
        t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(r));
        t.rhs.erase(t.rhs.begin() + static_cast<std::ptrdiff_t>(r));
        t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
  }

  if (!problem.objective.empty()) {
    std::vector<double> cost(t.cols, 0.0);
    for (std::size_t j = 0; j < n && j < problem.objective.size(); ++j) cost[j] = problem.objective[j];
    auto out = iterate(t, cost, art_begin, opt, sol.pivots);
    if (out == Outcome::Unbounded) {
      sol.status = Status::Unbounded;
      return sol;
    }
    if (out == Outcome::IterationLimit) {
      sol.status = Status::IterationLimit;
      return sol;
    }
  }

  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    if (t.basis[r] < n) sol.x[t.basis[r]] = std::max(0.0, t.rhs[r]);
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n && j < problem.objective.size(); ++j)
    sol.objective += problem.objective[j] * sol.x[j];
  sol.status = Status::Optimal;
  return sol;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Solves the k x k system M y = b by Gaussian elimination with partial pivoting.
std::optional<std::vector<double>> solve_dense(std::vector<std::vector<double>> M, std::vector<double> b) {
  const std::size_t k = b.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
    if (std::abs(M[p][c]) < 1e-300) return std::nullopt;
    std::swap(M[p], M[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < k; ++r) {
      const double f = M[r][c] / M[c][c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < k; ++j) M[r][j] -= f * M[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> y(k);
  for (std::size_t c = k; c-- > 0;) {
    double s = b[c];
    for (std::size_t j = c + 1; j < k; ++j) s -= M[c][j] * y[j];
    y[c] = s / M[c][c];
  }
  return y;
}

// Gram-Schmidt independence test against an orthonormal basis.
bool extend_basis(std::vector<std::vector<double>>& q, const std::vector<double>& row) {
  auto r = row;
  for (const auto& b : q) {
    const double c = dot(r, b);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * b[i];
  }
  const double norm = std::sqrt(dot(r, r));
  if (norm <= 1e-9 * std::sqrt(dot(row, row))) return false;
  for (auto& v : r) v /= norm;
  q.push_back(std::move(r));
  return true;
}

}  // namespace

Projection project(const Polytope& poly, const std::vector<double>& target, std::vector<double> x,
                   std::size_t max_iterations) {
  const std::size_t dim = target.size();
  const std::size_t n_eq = poly.eq_lhs.size();
  const std::size_t n_in = poly.ineq_lhs.size();
  constexpr double kActiveTol = 1e-10;

  // Working set: indices < n_eq are equalities, n_eq + i is inequality i.
  std::vector<std::size_t> work;
  std::vector<char> in_work(n_in, 0);
  {
    std::vector<std::vector<double>> q;
    for (std::size_t i = 0; i < n_eq; ++i)
      if (extend_basis(q, poly.eq_lhs[i])) work.push_back(i);
    for (std::size_t i = 0; i < n_in; ++i) {
      if (poly.ineq_rhs[i] - dot(poly.ineq_lhs[i], x) > kActiveTol) continue;
      if (extend_basis(q, poly.ineq_lhs[i])) {
        work.push_back(n_eq + i);
        in_work[i] = 1;
      }
    }
  }
  auto row_of = [&](std::size_t w) -> const std::vector<double>& {
    return w < n_eq ? poly.eq_lhs[w] : poly.ineq_lhs[w - n_eq];
  };

  Projection out;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    std::vector<double> resid(dim);
    for (std::size_t i = 0; i < dim; ++i) resid[i] = target[i] - x[i];

    std::vector<double> mu;
    std::vector<double> p = resid;
    if (!work.empty()) {
      const std::size_t k = work.size();
      std::vector<std::vector<double>> gram(k, std::vector<double>(k));
      std::vector<double> rhs(k);
      for (std::size_t a = 0; a < k; ++a) {
        rhs[a] = dot(row_of(work[a]), resid);
        for (std::size_t b = 0; b < k; ++b) gram[a][b] = dot(row_of(work[a]), row_of(work[b]));
      }
      auto sol = solve_dense(std::move(gram), std::move(rhs));
      if (!sol) return out;
      mu = std::move(*sol);
      for (std::size_t a = 0; a < k; ++a) {
        const auto& r = row_of(work[a]);
        for (std::size_t i = 0; i < dim; ++i) p[i] -= mu[a] * r[i];
      }
    }

    const double scale = 1.0 + std::sqrt(dot(resid, resid));
    if (std::sqrt(dot(p, p)) <= 1e-14 * scale) {
      std::size_t drop = kNone;
      double most_negative = -1e-14 * scale;
      for (std::size_t a = 0; a < work.size(); ++a) {
        if (work[a] < n_eq) continue;
        if (mu[a] < most_negative) {
          most_negative = mu[a];
          drop = a;
        }
      }
      if (drop == kNone) {
        out.converged = true;
        out.x = std::move(x);
        return out;
      }
      in_work[work[drop] - n_eq] = 0;
      work.erase(work.begin() + static_cast<std::ptrdiff_t>(drop));
      continue;
    }

    // Rows in the span of the working set are constant along p in exact
    // arithmetic; letting rounding make them blocking would make the Gram
    // matrix singular at degenerate vertices.
    std::vector<std::vector<double>> basis;
    for (auto w : work) extend_basis(basis, row_of(w));
    const double p_norm = std::sqrt(dot(p, p));
    double alpha = 1.0;
    std::size_t block = kNone;
    for (std::size_t i = 0; i < n_in; ++i) {
      if (in_work[i]) continue;
      const auto& g = poly.ineq_lhs[i];
      const double gp = dot(g, p);
      if (gp <= 1e-12 * p_norm * std::sqrt(dot(g, g))) continue;
      if (auto trial = basis; !extend_basis(trial, g)) continue;
      const double step = std::max(0.0, (poly.ineq_rhs[i] - dot(poly.ineq_lhs[i], x)) / gp);
      if (step < alpha) {
        alpha = step;
        block = i;
      }
    }
    for (std::size_t i = 0; i < dim; ++i) x[i] += alpha * p[i];
    if (block != kNone) {
      work.push_back(n_eq + block);
      in_work[block] = 1;
    }
  }
  return out;
}

}  // namespace mcdm::lp
