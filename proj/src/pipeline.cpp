#include "mcdm/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include "mcdm/topsis.hpp"

namespace mcdm {

namespace fs = std::filesystem;
using io::Json;

namespace {

Error annotate(const Error& e, const std::string& where) {
  return Error(e.code(), where + ": " + e.what(), e.details());
}

std::string run_id_for(const PipelineInputs& in, const PipelineOptions& opt) {
  Json canon;
  canon["criteria"] = io::to_json(in.criteria);
  Json surveys = Json::array();
  for (const auto& s : in.surveys) surveys.push_back(io::to_json(s, in.criteria));
  canon["surveys"] = std::move(surveys);
  canon["weights"] = in.weights ? io::to_json(*in.weights, in.criteria) : Json(nullptr);
  canon["matrix"] = io::to_json(in.matrix);
  canon["bwm"] = {{"xi_tolerance", opt.bwm.xi_tolerance},
                  {"xi_upper", opt.bwm.xi_upper},
                  {"weight_floor", opt.bwm.weight_floor}};
  return io::sha256_hex(canon.dump()).substr(0, 16);
}

}  // namespace

PipelineRun run_pipeline(const PipelineInputs& in, const PipelineOptions& opt) {
  if (in.matrix.criteria() != in.criteria)
    throw Error(ErrorCode::CrossReferenceError, "matrix criteria differ from the criteria set");

  std::vector<RespondentWeights> respondents;
  WeightVector weights;
  if (in.weights) {
    weights = *in.weights;
  } else {
    if (in.surveys.empty()) throw Error(ErrorCode::EmptyInput, "no surveys and no explicit weights");
    std::vector<WeightVector> solved;
    for (std::size_t i = 0; i < in.surveys.size(); ++i) {
      const auto& s = in.surveys[i];
      std::string where = "survey " + std::to_string(i);
      if (i < in.survey_sources.size()) where += " (" + in.survey_sources[i] + ")";
      try {
        if (s.bo.size() != in.criteria.size())
          throw Error(ErrorCode::LengthMismatch, "survey has " + std::to_string(s.bo.size()) +
                                                     " comparisons for " + std::to_string(in.criteria.size()) +
                                                     " criteria");
        auto sol = solve_bwm(s, opt.bwm);
        respondents.push_back({s.respondent, sol.weights});
        solved.push_back(sol.weights);
      } catch (const Error& e) {
        throw annotate(e, where);
      }
    }
    weights = aggregate_weights(solved);
  }
  if (weights.weights.size() != in.criteria.size())
    throw Error(ErrorCode::LengthMismatch, "weight vector does not match the criteria set");

  DecisionMatrix weighted = in.matrix;
  try {
    switch (in.matrix.stage()) {
      case Stage::Raw: weighted = apply_weights(normalize(in.matrix), weights.weights); break;
      case Stage::Normalized: weighted = apply_weights(in.matrix, weights.weights); break;
      case Stage::Weighted: break;
    }
  } catch (const Error& e) {
    throw annotate(e, "matrix");
  }

  PipelineRun run{run_id_for(in, opt), opt.created_at, in.refs, in.criteria, in.matrix,
                  std::move(respondents), std::move(weights), {}};
  try {
    run.ranking = rank_weighted(weighted);
  } catch (const Error& e) {
    throw annotate(e, "matrix");
  }
  return run;
}

DecisionMatrix weighted_matrix(const PipelineRun& run) {
  switch (run.matrix.stage()) {
    case Stage::Raw: return apply_weights(normalize(run.matrix), run.weights.weights);
    case Stage::Normalized: return apply_weights(run.matrix, run.weights.weights);
    case Stage::Weighted: break;
  }
  return run.matrix;
}

std::vector<double> perturbed_weights(const std::vector<double>& weights, std::size_t index, double delta) {
  auto out = weights;
  out.at(index) += delta;
  // The inputs sum to one, so the perturbed total is exactly 1 + delta.
  const double total = 1.0 + delta;
  for (auto& w : out) w /= total;
  return out;
}

namespace {

std::size_t criterion_or_throw(const PipelineRun& run, const std::string& criterion) {
  auto idx = run.criteria.index_of(criterion);
  if (!idx) throw Error(ErrorCode::UnknownCriterion, "unknown criterion '" + criterion + "'");
  return *idx;
}

void check_delta(const PipelineRun& run, std::size_t j, double delta) {
  if (!std::isfinite(delta))
    throw Error(ErrorCode::DeltaOutOfRange, "delta must be finite");
  if (delta < 0.0 && -delta >= run.weights.weights[j])
    throw Error(ErrorCode::DeltaOutOfRange, "delta " + io::format_double(delta) + " would remove all of weight " +
                                                io::format_double(run.weights.weights[j]));
}

RankingResult rerank(const PipelineRun& run, const std::vector<double>& new_weights) {
  if (run.matrix.stage() != Stage::Weighted) {
    const auto normalized = run.matrix.stage() == Stage::Raw ? normalize(run.matrix) : run.matrix;
    return rank_weighted(apply_weights(normalized, new_weights));
  }
  // Scaling each column by w'/w is the same as recovering y = v / w and
  // re-weighting, and is exact when the weights are unchanged.
  const auto& m = run.matrix;
  std::vector<double> factor(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (run.weights.weights[j] == 0.0)
      throw Error(ErrorCode::WeightedEntryStage, "criterion '" + m.criteria()[j].id +
                                                     "' has weight 0, so its normalized column cannot be recovered");
    factor[j] = new_weights[j] / run.weights.weights[j];
  }
  std::vector<double> v(m.values().size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m.at(i, j) * factor[j];
  return rank_weighted(DecisionMatrix(m.alternatives(), m.criteria(), std::move(v), Stage::Weighted));
}

SensitivityEntry evaluate_delta(const PipelineRun& run, std::size_t j, double delta) {
  check_delta(run, j, delta);
  SensitivityEntry e;
  e.delta = delta;
  e.weights = perturbed_weights(run.weights.weights, j, delta);
  e.reranking = rerank(run, e.weights);
  e.flipped = e.reranking.top().alternative != run.ranking.top().alternative;
  return e;
}

}  // namespace

SensitivityReport sensitivity_scan(const PipelineRun& run, const std::string& criterion,
                                   const std::vector<double>& deltas) {
  const auto j = criterion_or_throw(run, criterion);
  SensitivityReport report{criterion, run.ranking, {}};
  for (double d : deltas) report.entries.push_back(evaluate_delta(run, j, d));
  return report;
}

std::optional<double> flip_threshold(const PipelineRun& run, const std::string& criterion, double limit,
                                     double tolerance) {
  const auto j = criterion_or_throw(run, criterion);
  if (!evaluate_delta(run, j, limit).flipped) return std::nullopt;
  double still = 0.0, flips = limit;
  while (std::abs(flips - still) > tolerance) {
    const double mid = 0.5 * (still + flips);
    (evaluate_delta(run, j, mid).flipped ? flips : still) = mid;
  }
  return flips;
}

DecisionMatrix fill_tco_column(const DecisionMatrix& raw, const std::vector<VehicleSpec>& fleet,
                               const std::string& criterion_id) {
  if (raw.stage() != Stage::Raw) throw Error(ErrorCode::WrongStage, "TCO values only fill a raw matrix");
  auto col = raw.criteria().index_of(criterion_id);
  if (!col) throw Error(ErrorCode::UnknownCriterion, "unknown TCO criterion '" + criterion_id + "'");
  auto values = raw.values();
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    const auto& label = raw.alternatives()[i];
    auto key = parse_alternative_label(label);
    if (!key)
      throw Error(ErrorCode::SchemaError,
                  "alternative '" + label + "' is not of the form \"<EV|ICEV|HEV> (<segment>)\"");
    values[i * raw.cols() + *col] = segment_average_tco(fleet, key->segment, key->powertrain);
  }
  return DecisionMatrix(raw.alternatives(), raw.criteria(), std::move(values), Stage::Raw);
}

PipelineConfig load_config(const fs::path& path) {
  const auto source = path.string();
  auto j = io::parse_json(io::read_file(path), source);
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, source + ": expected an object");
  static const std::vector<std::string> known = {"criteria", "surveys",       "weights", "matrix",    "stage",
                                                 "fleet",    "tco_criterion", "store",   "created_at"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorCode::SchemaError, source + ": /: unknown field '" + key + "'");
  if (!j.contains("matrix")) throw Error(ErrorCode::SchemaError, source + ": /: missing field 'matrix'");

  const fs::path base = path.parent_path();
  auto str = [&](const char* key) {
    if (!j[key].is_string()) throw Error(ErrorCode::SchemaError, source + ": /" + key + ": expected a string");
    return j[key].get<std::string>();
  };
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  PipelineConfig cfg;
  cfg.path = path;
  if (j.contains("criteria")) {
    auto c = str("criteria");
    if (c != "canonical") cfg.criteria = resolve(c);
  }
  if (j.contains("surveys")) {
    const auto& s = j["surveys"];
    if (s.is_string()) {
      cfg.surveys.push_back(resolve(s.get<std::string>()));
    } else if (s.is_array()) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_string())
          throw Error(ErrorCode::SchemaError, source + ": /surveys/" + std::to_string(i) + ": expected a string");
        cfg.surveys.push_back(resolve(s[i].get<std::string>()));
      }
    } else {
      throw Error(ErrorCode::SchemaError, source + ": /surveys: expected a path or an array of paths");
    }
  }
  if (j.contains("weights")) cfg.weights = resolve(str("weights"));
  cfg.matrix = resolve(str("matrix"));
  if (j.contains("stage")) {
    cfg.stage = parse_stage(str("stage"));
    if (!cfg.stage) throw Error(ErrorCode::SchemaError, source + ": /stage: expected raw, normalized or weighted");
  }
  if (j.contains("fleet")) cfg.fleet = resolve(str("fleet"));
  if (j.contains("tco_criterion")) cfg.tco_criterion = str("tco_criterion");
  if (j.contains("store")) cfg.store = resolve(str("store"));
  if (j.contains("created_at")) cfg.created_at = str("created_at");
  if (cfg.surveys.empty() && !cfg.weights)
    throw Error(ErrorCode::SchemaError, source + ": needs 'surveys' or 'weights'");
  return cfg;
}

namespace {

InputRef ref_for(const std::string& role, const fs::path& path) {
  return {role, fs::weakly_canonical(fs::absolute(path)).string(), io::sha256_hex(io::read_file(path))};
}

}  // namespace

PipelineInputs load_inputs(const PipelineConfig& cfg) {
  std::vector<InputRef> refs;
  refs.push_back(ref_for("config", cfg.path));

  CriterionSet criteria = canonical_criteria();
  if (cfg.criteria) {
    criteria = io::load_criteria(*cfg.criteria);
    refs.push_back(ref_for("criteria", *cfg.criteria));
  }

  std::vector<ComparisonSurvey> surveys;
  std::vector<std::string> sources;
  for (const auto& entry : cfg.surveys) {
    std::error_code ec;
    const auto files = fs::is_directory(entry, ec) ? io::survey_files(entry) : std::vector<fs::path>{entry};
    for (const auto& f : files) {
      auto batch = io::load_surveys(f, criteria);
      for (std::size_t k = 0; k < batch.size(); ++k) {
        sources.push_back(batch.size() == 1 ? f.string() : f.string() + "[" + std::to_string(k) + "]");
        surveys.push_back(std::move(batch[k]));
      }
      refs.push_back(ref_for("survey", f));
    }
  }

  std::optional<WeightVector> weights;
  if (cfg.weights && cfg.surveys.empty()) {
    weights = io::load_weights(*cfg.weights, criteria);
    refs.push_back(ref_for("weights", *cfg.weights));
  }

  auto matrix = io::load_matrix(cfg.matrix, criteria, cfg.stage);
  refs.push_back(ref_for("matrix", cfg.matrix));
  if (cfg.fleet) {
    if (matrix.stage() != Stage::Raw)
      throw Error(ErrorCode::SchemaError, cfg.path.string() + ": 'fleet' only applies to a raw matrix");
    const auto fleet = io::load_fleet(*cfg.fleet);
    refs.push_back(ref_for("fleet", *cfg.fleet));
    try {
      matrix = fill_tco_column(matrix, fleet, cfg.tco_criterion);
    } catch (const Error& e) {
      throw annotate(e, cfg.fleet->string());
    }
  }
  return PipelineInputs{std::move(criteria), std::move(surveys), std::move(sources), std::move(weights),
                        std::move(matrix), std::move(refs)};
}

Json to_json(const PipelineRun& run) {
  Json inputs = Json::array();
  for (const auto& r : run.inputs) inputs.push_back({{"role", r.role}, {"path", r.path}, {"sha256", r.sha256}});
  Json respondents = Json::array();
  for (const auto& r : run.respondents)
    respondents.push_back({{"respondent", r.respondent}, {"weights", io::to_json(r.weights, run.criteria)}});
  Json j;
  j["run_id"] = run.run_id;
  j["created_at"] = run.created_at;
  j["inputs"] = std::move(inputs);
  j["criteria"] = io::to_json(run.criteria);
  j["matrix"] = io::to_json(run.matrix);
  j["respondents"] = std::move(respondents);
  j["weights"] = io::to_json(run.weights, run.criteria);
  j["ranking"] = io::to_json(run.ranking)["ranking"];
  return j;
}

PipelineRun run_from_json(const Json& j, const std::string& source) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, source + ": expected a run object");
  for (const char* key : {"run_id", "created_at", "inputs", "criteria", "matrix", "respondents", "weights", "ranking"})
    if (!j.contains(key)) throw Error(ErrorCode::SchemaError, source + ": /: missing field '" + std::string(key) + "'");
  if (j.size() != 8) throw Error(ErrorCode::SchemaError, source + ": /: unexpected fields in run document");

  auto criteria = io::criteria_from_json(j["criteria"], source + "#/criteria");
  auto matrix = io::matrix_from_json(j["matrix"], criteria, source + "#/matrix");
  std::vector<InputRef> inputs;
  for (const auto& r : j["inputs"]) {
    if (!r.is_object() || r.size() != 3 || !r.contains("role") || !r.contains("path") || !r.contains("sha256"))
      throw Error(ErrorCode::SchemaError, source + ": /inputs: malformed input reference");
    inputs.push_back({r["role"].get<std::string>(), r["path"].get<std::string>(), r["sha256"].get<std::string>()});
  }
  std::vector<RespondentWeights> respondents;
  for (const auto& r : j["respondents"]) {
    if (!r.is_object() || !r.contains("respondent") || !r.contains("weights"))
      throw Error(ErrorCode::SchemaError, source + ": /respondents: malformed entry");
    respondents.push_back(
        {r["respondent"].get<std::string>(), io::weights_from_json(r["weights"], criteria, source + "#/respondents")});
  }
  auto weights = io::weights_from_json(j["weights"], criteria, source + "#/weights");
  auto ranked = io::ranking_from_json(Json{{"ranking", j["ranking"]}}, source);
  // Stored in rank order; restore alternative order.
  RankingResult ranking;
  for (const auto& label : matrix.alternatives()) {
    auto it = std::find_if(ranked.entries.begin(), ranked.entries.end(),
                           [&](const RankedAlternative& e) { return e.alternative == label; });
    if (it == ranked.entries.end())
      throw Error(ErrorCode::CrossReferenceError, source + ": ranking has no entry for '" + label + "'");
    ranking.entries.push_back(*it);
  }
  if (ranked.entries.size() != ranking.entries.size())
    throw Error(ErrorCode::CrossReferenceError, source + ": ranking and matrix alternatives differ");
  return PipelineRun{j["run_id"].get<std::string>(), j["created_at"].get<std::string>(), std::move(inputs),
                     std::move(criteria), std::move(matrix), std::move(respondents), std::move(weights),
                     std::move(ranking)};
}

Json to_json(const SensitivityReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json w = Json::array();
    for (double x : e.weights) w.push_back(x);
    entries.push_back({{"delta", e.delta},
                       {"weights", std::move(w)},
                       {"flipped", e.flipped},
                       {"top", e.reranking.top().alternative},
                       {"ranking", io::to_json(e.reranking)["ranking"]}});
  }
  return {{"criterion", report.criterion},
          {"base_ranking", io::to_json(report.base_ranking)["ranking"]},
          {"entries", std::move(entries)}};
}

std::string export_run(const PipelineRun& run, ExportFormat format) {
  if (format == ExportFormat::Json) return to_json(run).dump(2) + "\n";
  std::string out = "alternative,s_plus,s_minus,score,rank\n";
  for (const auto& e : run.ranking.by_rank()) {
    std::string label = e.alternative;
    if (label.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char c : label) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      label = q + "\"";
    }
    out += label + "," + io::format_double(e.s_plus) + "," + io::format_double(e.s_minus) + "," +
           io::format_double(e.score) + "," + std::to_string(e.rank) + "\n";
  }
  return out;
}

RunStore::RunStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path RunStore::file_for(const std::string& run_id) const {
  const bool ok = !run_id.empty() && std::all_of(run_id.begin(), run_id.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
  if (!ok) throw Error(ErrorCode::UnknownRun, "malformed run id '" + run_id + "'");
  return dir_ / (run_id + ".json");
}

bool RunStore::contains(const std::string& run_id) const {
  std::error_code ec;
  return fs::exists(file_for(run_id), ec);
}

PipelineRun RunStore::put(const PipelineRun& run) const {
  const auto target = file_for(run.run_id);
  if (contains(run.run_id)) return get(run.run_id);
  fs::create_directories(dir_);
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto tmp = dir_ / (run.run_id + ".json.tmp-" + std::to_string(::getpid()) + "-" + std::to_string(tid));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Internal, "cannot write " + tmp.string());
    out << mcdm::export_run(run, ExportFormat::Json);
    if (!out.flush()) throw Error(ErrorCode::Internal, "short write to " + tmp.string());
  }
  fs::rename(tmp, target);
  return get(run.run_id);
}

PipelineRun RunStore::get(const std::string& run_id) const {
  const auto path = file_for(run_id);
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::UnknownRun, "no run '" + run_id + "' in " + dir_.string());
  return run_from_json(io::parse_json(io::read_file(path), path.string()), path.string());
}

std::string RunStore::export_run(const std::string& run_id, ExportFormat format) const {
  return mcdm::export_run(get(run_id), format);
}

PipelineRun reproduce(const RunStore& store, const std::string& run_id) {
  const auto stored = store.get(run_id);
  auto config = std::find_if(stored.inputs.begin(), stored.inputs.end(),
                             [](const InputRef& r) { return r.role == "config"; });
  if (config == stored.inputs.end())
    throw Error(ErrorCode::InputChanged, "run '" + run_id + "' was not created from a config file");
  const auto cfg = load_config(config->path);
  const auto inputs = load_inputs(cfg);
  if (inputs.refs != stored.inputs)
    throw Error(ErrorCode::InputChanged, "inputs of run '" + run_id + "' changed since it was recorded");
  return run_pipeline(inputs, {stored.created_at, {}});
}

std::string current_timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mcdm
