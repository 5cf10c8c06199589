#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcdm/bwm.hpp"
#include "mcdm/domain.hpp"
#include "mcdm/io.hpp"
#include "mcdm/tco.hpp"

namespace mcdm {

struct InputRef {
  std::string role;  // config, criteria, survey, weights, matrix, fleet
  std::string path;
  std::string sha256;

  friend bool operator==(const InputRef&, const InputRef&) = default;
};

struct RespondentWeights {
  std::string respondent;
  WeightVector weights;

  friend bool operator==(const RespondentWeights&, const RespondentWeights&) = default;
};

/// Everything a run consumes, already parsed and validated.
struct PipelineInputs {
  CriterionSet criteria;
  std::vector<ComparisonSurvey> surveys;
  /// Where each survey came from, for error messages; may be empty.
  std::vector<std::string> survey_sources;
  /// Used instead of surveys when set.
  std::optional<WeightVector> weights;
  DecisionMatrix matrix;
  std::vector<InputRef> refs;
};

struct PipelineOptions {
  std::string created_at;
  BwmOptions bwm;
};

struct PipelineRun {
  std::string run_id;
  std::string created_at;
  std::vector<InputRef> inputs;
  CriterionSet criteria;
  /// The matrix as ingested, at its declared entry stage.
  DecisionMatrix matrix;
  std::vector<RespondentWeights> respondents;
  WeightVector weights;
  RankingResult ranking;

  friend bool operator==(const PipelineRun&, const PipelineRun&) = default;
};

/// surveys -> solve_bwm each -> aggregate -> (normalize, weight as the stage
/// requires) -> ideal solutions -> separations -> scores -> rank.
PipelineRun run_pipeline(const PipelineInputs& inputs, const PipelineOptions& options = {});

/// The weighted matrix a run ranked.
DecisionMatrix weighted_matrix(const PipelineRun& run);

struct SensitivityEntry {
  double delta = 0.0;
  std::vector<double> weights;
  RankingResult reranking;
  bool flipped = false;

  friend bool operator==(const SensitivityEntry&, const SensitivityEntry&) = default;
};

struct SensitivityReport {
  std::string criterion;
  RankingResult base_ranking;
  std::vector<SensitivityEntry> entries;

  friend bool operator==(const SensitivityReport&, const SensitivityReport&) = default;
};

/// Weights after adding `delta` to criterion `index` and renormalising.
std::vector<double> perturbed_weights(const std::vector<double>& weights, std::size_t index, double delta);

/// Re-ranks with criterion `criterion`'s weight shifted by each delta.
/// `flipped` reports whether the top-ranked alternative changed.
SensitivityReport sensitivity_scan(const PipelineRun& run, const std::string& criterion,
                                   const std::vector<double>& deltas);

/// Smallest |delta| in the direction of `limit` at which the top alternative
/// changes, located by bisection to `tolerance`. nullopt when even `limit`
/// leaves the top unchanged.
std::optional<double> flip_threshold(const PipelineRun& run, const std::string& criterion, double limit,
                                     double tolerance = 1e-7);

/// Fills criterion `criterion_id` of a Raw matrix with each alternative's
/// segment-average TCO. Alternative labels must look like "EV (8-11 Lakhs)".
DecisionMatrix fill_tco_column(const DecisionMatrix& raw, const std::vector<VehicleSpec>& fleet,
                               const std::string& criterion_id);

/// Pipeline configuration file; relative paths resolve against the file.
struct PipelineConfig {
  std::filesystem::path path;
  std::optional<std::filesystem::path> criteria;  // nullopt = canonical set
  std::vector<std::filesystem::path> surveys;
  std::optional<std::filesystem::path> weights;
  std::filesystem::path matrix;
  std::optional<Stage> stage;
  std::optional<std::filesystem::path> fleet;
  std::string tco_criterion = "cost_of_ownership";
  std::optional<std::filesystem::path> store;
  std::optional<std::string> created_at;
};

PipelineConfig load_config(const std::filesystem::path& path);
PipelineInputs load_inputs(const PipelineConfig& config);

io::Json to_json(const PipelineRun& run);
PipelineRun run_from_json(const io::Json& j, const std::string& source);
io::Json to_json(const SensitivityReport& report);

enum class ExportFormat { Json, Csv };
std::string export_run(const PipelineRun& run, ExportFormat format);

/// Content-addressed directory of run documents. Writes go to a temporary
/// file and are renamed into place.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path dir);

  /// Stores `run` unless a run with the same id already exists; returns the
  /// stored run either way.
  PipelineRun put(const PipelineRun& run) const;
  PipelineRun get(const std::string& run_id) const;
  bool contains(const std::string& run_id) const;
  std::string export_run(const std::string& run_id, ExportFormat format) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path file_for(const std::string& run_id) const;
  std::filesystem::path dir_;
};

/// Re-executes a stored run from its recorded input files after checking
/// their hashes, keeping the original timestamp.
PipelineRun reproduce(const RunStore& store, const std::string& run_id);

/// UTC timestamp, or SOURCE_DATE_EPOCH when that is set.
std::string current_timestamp();

}  // namespace mcdm
