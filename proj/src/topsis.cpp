#include "mcdm/topsis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcdm {

namespace {

void require_stage(const DecisionMatrix& m, Stage expected) {
  if (m.stage() != expected)
    throw Error(ErrorCode::WrongStage, "expected a " + std::string(to_string(expected)) + " matrix, got " +
                                           std::string(to_string(m.stage())));
}

}  // namespace

DecisionMatrix normalize(const DecisionMatrix& raw) {
  require_stage(raw, Stage::Raw);
  const std::size_t m = raw.rows(), n = raw.cols();
  std::vector<double> y(m * n);
  for (std::size_t j = 0; j < n; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += raw.at(i, j) * raw.at(i, j);
    if (ss == 0.0)
      throw Error(ErrorCode::DegenerateColumn, "column '" + raw.criteria()[j].id + "' is all zero");
    const double norm = std::sqrt(ss);
    for (std::size_t i = 0; i < m; ++i) y[i * n + j] = raw.at(i, j) / norm;
  }
  return DecisionMatrix(raw.alternatives(), raw.criteria(), std::move(y), Stage::Normalized);
}

DecisionMatrix apply_weights(const DecisionMatrix& normalized, std::span<const double> weights) {
  require_stage(normalized, Stage::Normalized);
  const std::size_t m = normalized.rows(), n = normalized.cols();
  if (weights.size() != n)
    throw Error(ErrorCode::LengthMismatch,
                "got " + std::to_string(weights.size()) + " weights for " + std::to_string(n) + " criteria");
  for (double w : weights)
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::InvalidWeights, "weights must be finite and >= 0");
  std::vector<double> v(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = weights[j] * normalized.at(i, j);
  return DecisionMatrix(normalized.alternatives(), normalized.criteria(), std::move(v), Stage::Weighted);
}

IdealSolutions ideal_solutions(const DecisionMatrix& weighted) {
  require_stage(weighted, Stage::Weighted);
  if (weighted.rows() == 0) throw Error(ErrorCode::EmptyMatrix, "matrix has no alternatives");
  const std::size_t n = weighted.cols();
  IdealSolutions out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    double hi = weighted.at(0, j), lo = hi;
    for (std::size_t i = 1; i < weighted.rows(); ++i) {
      hi = std::max(hi, weighted.at(i, j));
      lo = std::min(lo, weighted.at(i, j));
    }
    const bool benefit = weighted.criteria()[j].sense == Sense::Benefit;
    out.pis[j] = benefit ? hi : lo;
    out.nis[j] = benefit ? lo : hi;
  }
  return out;
}

std::vector<Separation> separations(const DecisionMatrix& weighted, const IdealSolutions& ideals) {
  const std::size_t n = weighted.cols();
  if (ideals.pis.size() != n || ideals.nis.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "ideal solutions do not match the matrix width");
  std::vector<Separation> out(weighted.rows());
  for (std::size_t i = 0; i < weighted.rows(); ++i) {
    double sp = 0.0, sm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = weighted.at(i, j);
      sp += (ideals.pis[j] - v) * (ideals.pis[j] - v);
      sm += (ideals.nis[j] - v) * (ideals.nis[j] - v);
    }
    out[i] = {std::sqrt(sp), std::sqrt(sm)};
  }
  return out;
}

std::vector<double> performance_scores(std::span<const Separation> seps) {
  std::vector<double> out(seps.size());
  for (std::size_t i = 0; i < seps.size(); ++i) {
    const double total = seps[i].s_plus + seps[i].s_minus;
    if (total == 0.0)
      throw Error(ErrorCode::DegenerateAlternative,
                  "alternative " + std::to_string(i) + " coincides with both ideal solutions");
    out[i] = seps[i].s_minus / total;
  }
  return out;
}

RankingResult rank(const std::vector<std::string>& alternatives, std::span<const Separation> seps,
                   std::span<const double> scores) {
  const std::size_t m = scores.size();
  if (alternatives.size() != m || seps.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "alternatives, separations and scores differ in length");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RankingResult out;
  out.entries.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    out.entries[i] = {alternatives[i], seps[i].s_plus, seps[i].s_minus, scores[i], 0, false};
  for (std::size_t pos = 0; pos < m; ++pos) {
    auto& e = out.entries[order[pos]];
    e.rank = static_cast<int>(pos + 1);
    if (pos > 0 && scores[order[pos - 1]] == scores[order[pos]]) e.tied = true;
    if (pos + 1 < m && scores[order[pos + 1]] == scores[order[pos]]) e.tied = true;
  }
  return out;
}

RankingResult rank_weighted(const DecisionMatrix& weighted) {
  const auto ideals = ideal_solutions(weighted);
  const auto seps = separations(weighted, ideals);
  const auto scores = performance_scores(seps);
  return rank(weighted.alternatives(), seps, scores);
}

}  // namespace mcdm
