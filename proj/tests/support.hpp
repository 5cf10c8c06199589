#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "mcdm/domain.hpp"
#include "oracles.hpp"

namespace testing_support {

inline std::filesystem::path fixtures() { return MCDM_FIXTURES_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mcdm-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

 private:
  std::filesystem::path path_;
};

/// Random valid survey on n criteria: bo/ow entries uniform on 1..9 with the
/// structural entries fixed.
inline mcdm::ComparisonSurvey random_survey(std::mt19937& rng, std::size_t n) {
  mcdm::ComparisonSurvey s;
  s.respondent = "gen";
  s.best = rng() % n;
  do s.worst = rng() % n;
  while (s.worst == s.best);
  s.bo.resize(n);
  s.ow.resize(n);
  for (auto& v : s.bo) v = 1.0 + static_cast<double>(rng() % 9);
  for (auto& v : s.ow) v = 1.0 + static_cast<double>(rng() % 9);
  s.bo[s.best] = 1.0;
  s.ow[s.worst] = 1.0;
  s.ow[s.best] = s.bo[s.worst];
  return s;
}

/// Random fully consistent survey: a_Bj * a_jW = a_BW for every j. Built from
/// integer ratios r_j = W_j / W_W with r_best dividing evenly by each r_j.
inline mcdm::ComparisonSurvey random_consistent_survey(std::mt19937& rng, std::size_t n) {
  static const std::vector<std::vector<double>> ladders = {
      {1, 2, 4, 8}, {1, 3, 9}, {1, 2, 6}, {1, 3, 6}, {1, 2}, {1, 4, 8}, {1, 5}, {1, 7}};
  mcdm::ComparisonSurvey s;
  s.respondent = "consistent";
  for (;;) {
    const auto& ladder = ladders[rng() % ladders.size()];
    const double top = ladder.back();
    std::vector<double> r(n);
    for (auto& v : r) v = ladder[rng() % ladder.size()];
    s.best = rng() % n;
    do s.worst = rng() % n;
    while (s.worst == s.best);
    r[s.best] = top;
    r[s.worst] = 1.0;
    bool ok = true;
    for (double v : r) ok = ok && std::fmod(top, v) == 0.0;
    if (!ok) continue;
    s.bo.resize(n);
    s.ow = r;
    for (std::size_t j = 0; j < n; ++j) s.bo[j] = top / r[j];
    return s;
  }
}

inline oracle::Survey to_oracle(const mcdm::ComparisonSurvey& s) { return {s.best, s.worst, s.bo, s.ow}; }

/// Table 2 exactly as printed, row-major, canonical criterion order.
inline const std::vector<std::string>& table2_alternatives() {
  static const std::vector<std::string> a = {
      "EV (8-11 Lakhs)",    "EV (11-15 Lakhs)",   "EV (15-19 Lakhs)",   "EV (19-25 Lakhs)",  "ICEV (8-11 Lakhs)",
      "ICEV (11-15 Lakhs)", "ICEV (15-19 Lakhs)", "ICEV (19-25 Lakhs)", "HEV (19-25 Lakhs)"};
  return a;
}

inline const std::vector<std::vector<double>>& table2_rows() {
  static const std::vector<std::vector<double>> v = {
      {0.048, 0.007, 0.022, 0.016, 0.034, 0.019, 0.130}, {0.063, 0.014, 0.027, 0.032, 0.034, 0.019, 0.130},
      {0.083, 0.021, 0.029, 0.032, 0.034, 0.019, 0.130}, {0.105, 0.021, 0.033, 0.047, 0.034, 0.019, 0.130},
      {0.098, 0.014, 0.033, 0.032, 0.034, 0.003, 0.019}, {0.119, 0.014, 0.033, 0.032, 0.034, 0.003, 0.019},
      {0.140, 0.021, 0.041, 0.047, 0.034, 0.003, 0.019}, {0.140, 0.024, 0.041, 0.047, 0.034, 0.003, 0.019},
      {0.114, 0.021, 0.049, 0.016, 0.034, 0.005, 0.093}};
  return v;
}

inline const std::vector<double>& table1_weights() {
  static const std::vector<double> w = {0.3165, 0.0545, 0.1046, 0.1060, 0.1015, 0.0387, 0.2782};
  return w;
}

inline mcdm::DecisionMatrix table2_matrix() {
  std::vector<double> flat;
  for (const auto& r : table2_rows()) flat.insert(flat.end(), r.begin(), r.end());
  return mcdm::DecisionMatrix(table2_alternatives(), mcdm::canonical_criteria(), flat, mcdm::Stage::Weighted);
}

}  // namespace testing_support
