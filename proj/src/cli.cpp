#include "mcdm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "mcdm/pipeline.hpp"
#include "mcdm/service.hpp"

namespace mcdm {

namespace fs = std::filesystem;
using io::Json;

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// Left-aligned first column, right-aligned rest.
void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) line += "  ";
      const std::string pad(width[c] - r[c].size(), ' ');
      line += c == 0 ? r[c] + pad : pad + r[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  }
}

void print_ranking_table(std::ostream& out, const RankingResult& ranking) {
  std::vector<std::vector<std::string>> rows{{"alternative", "rank", "score", "s_plus", "s_minus"}};
  for (const auto& e : ranking.by_rank())
    rows.push_back({e.alternative, std::to_string(e.rank) + (e.tied ? "=" : ""), fixed6(e.score), fixed6(e.s_plus),
                    fixed6(e.s_minus)});
  print_table(out, rows);
}

std::string ratio_text(const WeightVector& w) { return w.inconsistent() ? "inf" : fixed6(w.consistency_ratio); }

CriterionSet criteria_or_canonical(const std::string& path) {
  return path.empty() ? canonical_criteria() : io::load_criteria(path);
}

struct LoadedSurveys {
  std::vector<ComparisonSurvey> surveys;
  std::vector<std::string> sources;
};

LoadedSurveys load_survey_path(const fs::path& path, const CriterionSet& criteria) {
  LoadedSurveys out;
  std::vector<fs::path> files;
  if (fs::is_directory(path))
    files = io::survey_files(path);
  else
    files.push_back(path);
  if (files.empty()) throw Error(ErrorCode::EmptyInput, "no survey files in " + path.string());
  for (const auto& f : files)
    for (auto& s : io::load_surveys(f, criteria)) {
      out.surveys.push_back(std::move(s));
      out.sources.push_back(f.string());
    }
  return out;
}

fs::path store_dir(const std::string& flag, const std::optional<fs::path>& from_config = std::nullopt) {
  if (!flag.empty()) return flag;
  if (from_config) return *from_config;
  return "runs";
}

// --- subcommands -----------------------------------------------------------

int cmd_weights(std::ostream& out, const std::string& format, const std::string& path,
                const std::string& criteria_path) {
  const auto criteria = criteria_or_canonical(criteria_path);
  const auto loaded = load_survey_path(path, criteria);
  if (format == "json") {
    out << weights_report(criteria, loaded.surveys).dump(2) << "\n";
    return 0;
  }
  std::vector<std::pair<std::string, WeightVector>> rows;
  std::vector<WeightVector> all;
  for (std::size_t i = 0; i < loaded.surveys.size(); ++i) {
    const auto& s = loaded.surveys[i];
    try {
      auto w = solve_bwm(s).weights;
      rows.emplace_back(s.respondent, w);
      all.push_back(w);
    } catch (const Error& e) {
      throw Error(e.code(), loaded.sources[i] + ": " + e.what(), e.details());
    }
  }
  rows.emplace_back("aggregate", aggregate_weights(all));

  if (format == "csv") {
    out << "respondent";
    for (const auto& id : criteria.ids()) out << "," << id;
    out << ",xi_star,consistency_ratio\n";
    for (const auto& [name, w] : rows) {
      out << csv_field(name);
      for (double x : w.weights) out << "," << io::format_double(x);
      out << "," << io::format_double(w.xi_star) << ","
          << (w.inconsistent() ? std::string() : io::format_double(w.consistency_ratio)) << "\n";
    }
    return 0;
  }
  std::vector<std::vector<std::string>> table{{"respondent"}};
  for (const auto& id : criteria.ids()) table[0].push_back(id);
  table[0].push_back("xi_star");
  table[0].push_back("cr");
  for (const auto& [name, w] : rows) {
    std::vector<std::string> r{name};
    for (double x : w.weights) r.push_back(fixed6(x));
    r.push_back(fixed6(w.xi_star));
    r.push_back(ratio_text(w));
    table.push_back(std::move(r));
  }
  print_table(out, table);
  return 0;
}

int cmd_rank(std::ostream& out, const std::string& format, const std::string& matrix_path,
             const std::string& weights_arg, const std::string& surveys_path, const std::string& stage_text,
             const std::string& criteria_path) {
  const auto criteria = criteria_or_canonical(criteria_path);
  std::optional<Stage> stage;
  if (!stage_text.empty()) stage = parse_stage(stage_text);
  PipelineInputs in{criteria, {}, {}, std::nullopt, io::load_matrix(matrix_path, criteria, stage), {}};
  if (weights_arg == "from-surveys") {
    if (surveys_path.empty())
      throw Error(ErrorCode::EmptyInput, "--weights from-surveys needs --surveys <dir|file>");
    auto loaded = load_survey_path(surveys_path, criteria);
    in.surveys = std::move(loaded.surveys);
    in.survey_sources = std::move(loaded.sources);
  } else {
    in.weights = io::load_weights(weights_arg, criteria);
  }
  const auto run = run_pipeline(in);
  if (format == "json")
    out << io::to_json(run.ranking).dump(2) << "\n";
  else if (format == "csv")
    out << export_run(run, ExportFormat::Csv);
  else
    print_ranking_table(out, run.ranking);
  return 0;
}

void print_run(std::ostream& out, const std::string& format, const PipelineRun& run) {
  if (format == "json") {
    out << export_run(run, ExportFormat::Json);
  } else if (format == "csv") {
    out << export_run(run, ExportFormat::Csv);
  } else {
    out << "run " << run.run_id << "\n";
    print_ranking_table(out, run.ranking);
  }
}

int cmd_pipeline(std::ostream& out, const std::string& format, const std::string& config_path,
                 const std::string& store_flag) {
  const auto cfg = load_config(config_path);
  const auto inputs = load_inputs(cfg);
  const auto run = run_pipeline(inputs, {cfg.created_at.value_or(current_timestamp()), {}});
  const RunStore store(store_dir(store_flag, cfg.store));
  print_run(out, format, store.put(run));
  return 0;
}

int cmd_export(std::ostream& out, const std::string& format, const std::string& run_id,
               const std::string& store_flag) {
  print_run(out, format, RunStore(store_dir(store_flag)).get(run_id));
  return 0;
}

int cmd_reproduce(std::ostream& out, std::ostream& err, const std::string& format, const std::string& run_id,
                  const std::string& store_flag) {
  const RunStore store(store_dir(store_flag));
  const auto rerun = reproduce(store, run_id);
  const bool identical = export_run(rerun, ExportFormat::Json) == store.export_run(run_id, ExportFormat::Json);
  if (format == "json")
    out << Json{{"run_id", run_id}, {"identical", identical}}.dump(2) << "\n";
  else if (format == "csv")
    out << "run_id,identical\n" << run_id << "," << (identical ? "true" : "false") << "\n";
  else
    out << "run " << run_id << (identical ? " reproduced byte-identically" : " differs from its stored result")
        << "\n";
  if (!identical) {
    err << "error: re-execution of run " << run_id << " did not reproduce the stored result\n";
    return 2;
  }
  return 0;
}

int cmd_tco(std::ostream& out, const std::string& format, const std::string& fleet_path) {
  const auto fleet = io::load_fleet(fleet_path);
  if (fleet.empty()) throw Error(ErrorCode::EmptyInput, "fleet is empty");
  std::map<std::pair<std::string, std::string>, std::size_t> groups;  // (segment, powertrain) -> count
  for (const auto& v : fleet) ++groups[{v.segment, std::string(to_string(v.powertrain))}];

  struct Row {
    std::string segment, powertrain;
    std::size_t vehicles;
    double average;
  };
  std::vector<Row> rows;
  for (const auto& [key, count] : groups)
    rows.push_back({key.first, key.second, count,
                    segment_average_tco(fleet, key.first, *parse_powertrain(key.second))});

  if (format == "json") {
    Json vehicles = Json::array(), segments = Json::array();
    for (const auto& v : fleet) vehicles.push_back({{"label", v.label}, {"tco", tco(v)}});
    for (const auto& r : rows)
      segments.push_back({{"segment", r.segment},
                          {"powertrain", r.powertrain},
                          {"vehicles", r.vehicles},
                          {"average_tco", r.average}});
    out << Json{{"vehicles", vehicles}, {"segments", segments}}.dump(2) << "\n";
  } else if (format == "csv") {
    out << "segment,powertrain,vehicles,average_tco\n";
    for (const auto& r : rows)
      out << csv_field(r.segment) << "," << r.powertrain << "," << r.vehicles << "," << io::format_double(r.average)
          << "\n";
  } else {
    std::vector<std::vector<std::string>> table{{"segment", "powertrain", "vehicles", "average_tco"}};
    for (const auto& r : rows) table.push_back({r.segment, r.powertrain, std::to_string(r.vehicles), fixed6(r.average)});
    print_table(out, table);
  }
  return 0;
}

// "down" and "up" pick a limit that nearly removes or nearly saturates the
// criterion's weight; anything else is read as a number.
double threshold_limit(const PipelineRun& run, const std::string& criterion, const std::string& text) {
  const auto j = run.criteria.index_of(criterion);
  if (!j) throw Error(ErrorCode::UnknownCriterion, "unknown criterion '" + criterion + "'");
  if (text == "down") return -run.weights.weights[*j] * (1.0 - 1e-9);
  if (text == "up") return 9.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::DeltaOutOfRange, "--threshold must be down, up or a number, got '" + text + "'");
}

int cmd_sensitivity(std::ostream& out, const std::string& format, const std::string& run_id,
                    const std::string& criterion, const std::vector<double>& deltas, const std::string& threshold,
                    const std::string& store_flag) {
  const auto run = RunStore(store_dir(store_flag)).get(run_id);
  const auto report = sensitivity_scan(run, criterion, deltas);
  std::optional<std::optional<double>> flip;
  if (!threshold.empty()) flip = flip_threshold(run, criterion, threshold_limit(run, criterion, threshold));

  if (format == "json") {
    auto j = to_json(report);
    if (flip) j["threshold"] = *flip ? Json(**flip) : Json(nullptr);
    out << j.dump(2) << "\n";
  } else if (format == "csv") {
    out << "delta,top,flipped";
    for (const auto& id : run.criteria.ids()) out << "," << id;
    out << "\n";
    for (const auto& e : report.entries) {
      out << io::format_double(e.delta) << "," << csv_field(e.reranking.top().alternative) << ","
          << (e.flipped ? "true" : "false");
      for (double w : e.weights) out << "," << io::format_double(w);
      out << "\n";
    }
  } else {
    out << "criterion " << criterion << ", base top " << report.base_ranking.top().alternative << "\n";
    std::vector<std::vector<std::string>> table{{"delta", "weight", "top", "flipped"}};
    const auto j = *run.criteria.index_of(criterion);
    for (const auto& e : report.entries)
      table.push_back({fixed6(e.delta), fixed6(e.weights[j]), e.reranking.top().alternative, e.flipped ? "yes" : "no"});
    if (!report.entries.empty()) print_table(out, table);
    if (flip) out << "flip threshold: " << (*flip ? fixed6(**flip) : std::string("none within limit")) << "\n";
  }
  return 0;
}

int default_port() {
  if (const char* p = std::getenv("MCDM_PORT"); p && *p) return std::atoi(p);
  return 8080;
}

int cmd_serve(std::ostream& out, std::ostream& err, int port, const std::string& host, const std::string& store,
              const std::string& ui) {
  DecisionService service(store.empty() ? std::nullopt : std::optional<fs::path>(store));
  HttpServer server(service, ui.empty() ? std::nullopt : std::optional<fs::path>(ui));
  const int bound = server.bind(host, port);
  if (bound < 0) {
    err << "error: cannot bind " << host << ":" << port << "\n";
    return 2;
  }
  out << "listening on http://" << host << ":" << bound << std::endl;
  return server.listen() ? 0 : 2;
}

void report_error(std::ostream& err, const Error& e) {
  err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
  if (const auto* se = dynamic_cast<const SurveyError*>(&e))
    for (const auto& v : se->violations()) err << "  - " << to_string(v.code) << ": " << v.message << "\n";
  for (const auto& d : e.details()) err << "  - " << d << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid BWM-TOPSIS decision engine", "mcdm"};
  app.require_subcommand(1);
  const auto formats = CLI::IsMember({"json", "csv", "table"});
  std::string format = "table";
  std::string criteria_path, store;

  auto* weights = app.add_subcommand("weights", "Solve surveys and print per-respondent and aggregated weights");
  std::string surveys_arg;
  weights->add_option("surveys", surveys_arg, "Survey directory or file")->required();
  weights->add_option("--criteria", criteria_path, "Criteria file (default: canonical set)");

  auto* rank = app.add_subcommand("rank", "Rank the alternatives of a decision matrix");
  std::string matrix_path, weights_arg, stage_text, rank_surveys;
  rank->add_option("--matrix", matrix_path, "Decision matrix (.json or .csv)")->required();
  rank->add_option("--weights", weights_arg, "Weights file, or from-surveys")->required();
  rank->add_option("--surveys", rank_surveys, "Survey directory or file for --weights from-surveys");
  rank->add_option("--stage", stage_text, "Matrix stage")->check(CLI::IsMember({"raw", "normalized", "weighted"}));
  rank->add_option("--criteria", criteria_path, "Criteria file (default: canonical set)");

  auto* pipeline = app.add_subcommand("pipeline", "Run the full pipeline from a config file and persist the run");
  std::string config_path;
  pipeline->add_option("--config", config_path, "Pipeline config file")->required();
  pipeline->add_option("--store", store, "Run store directory (default: config's store, else ./runs)");

  auto* exporter = app.add_subcommand("export", "Print a stored run");
  std::string run_id;
  exporter->add_option("--run", run_id, "Run id")->required();
  exporter->add_option("--store", store, "Run store directory (default: ./runs)");

  auto* repro = app.add_subcommand("reproduce", "Re-execute a stored run and compare with the stored result");
  repro->add_option("--run", run_id, "Run id")->required();
  repro->add_option("--store", store, "Run store directory (default: ./runs)");

  auto* tco_cmd = app.add_subcommand("tco", "Print per-segment average total cost of ownership");
  std::string fleet_path;
  tco_cmd->add_option("--fleet", fleet_path, "Fleet file")->required();

  auto* sens = app.add_subcommand("sensitivity", "Re-rank a stored run under weight perturbations");
  std::string criterion, threshold;
  std::vector<double> deltas;
  sens->add_option("--run", run_id, "Run id")->required();
  sens->add_option("--criterion", criterion, "Criterion id")->required();
  sens->add_option("--deltas", deltas, "Comma-separated deltas, e.g. --deltas=-0.1,0,0.1")->delimiter(',');
  sens->add_option("--threshold", threshold, "Also bisect the rank-1 flip threshold: down, up or a delta limit");
  sens->add_option("--store", store, "Run store directory (default: ./runs)");

  auto* serve = app.add_subcommand("serve", "Start the HTTP API");
  int port = default_port();
  std::string host = "127.0.0.1", ui;
  serve->add_option("--port", port, "Port; 0 picks a free one (default: $MCDM_PORT or 8080)");
  serve->add_option("--bind", host, "Bind address");
  serve->add_option("--store", store, "Run store directory for snapshots");
  serve->add_option("--ui", ui, "Directory of static UI assets served at /");

  for (auto* sub : {weights, rank, pipeline, exporter, repro, tco_cmd, sens, serve})
    sub->add_option("--format", format, "Output format")->check(formats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*weights) return cmd_weights(out, format, surveys_arg, criteria_path);
    if (*rank) return cmd_rank(out, format, matrix_path, weights_arg, rank_surveys, stage_text, criteria_path);
    if (*pipeline) return cmd_pipeline(out, format, config_path, store);
    if (*exporter) return cmd_export(out, format, run_id, store);
    if (*repro) return cmd_reproduce(out, err, format, run_id, store);
    if (*tco_cmd) return cmd_tco(out, format, fleet_path);
    if (*sens) return cmd_sensitivity(out, format, run_id, criterion, deltas, threshold, store);
    if (*serve) return cmd_serve(out, err, port, host, store, ui);
  } catch (const Error& e) {
    report_error(err, e);
    return is_client_error(e.code()) ? 1 : 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace mcdm
