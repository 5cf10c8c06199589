#include "mcdm/service.hpp"

#include <httplib.h>

#include <cstdio>

#include "mcdm/bwm.hpp"
#include "mcdm/pipeline.hpp"
#include "mcdm/topsis.hpp"

namespace mcdm {

using io::Json;

namespace {

HttpResponse json_response(int status, const Json& body) { return {status, body.dump(2) + "\n", "application/json"}; }

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return 400;
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownRun: return 404;
    default: return is_client_error(code) ? 422 : 500;
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string::npos) slash = path.size();
    if (slash > start) out.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

Json parse_body(const HttpRequest& req) { return io::parse_json(req.body, "request body"); }

// Weight vector from a request's optional "weights" member, else nullopt.
std::optional<WeightVector> explicit_weights(const Json& body, const CriterionSet& criteria) {
  if (!body.is_object() || !body.contains("weights")) return std::nullopt;
  return io::weights_from_json(body["weights"], criteria, "request body#/weights");
}

PipelineInputs session_inputs(const Session& s, std::optional<WeightVector> weights) {
  if (!s.matrix) throw Error(ErrorCode::EmptyInput, "no decision matrix loaded; PUT /sessions/{id}/matrix first");
  std::vector<std::string> sources;
  for (const auto& survey : s.surveys) sources.push_back("respondent '" + survey.respondent + "'");
  return PipelineInputs{s.criteria, s.surveys, std::move(sources), std::move(weights), *s.matrix, {}};
}

}  // namespace

Json weights_report(const CriterionSet& criteria, const std::vector<ComparisonSurvey>& surveys,
                    WeightVector* aggregate) {
  Json respondents = Json::array();
  std::vector<WeightVector> all;
  for (const auto& survey : surveys) {
    auto sol = solve_bwm(survey);
    Json entry = {{"respondent", survey.respondent}};
    const Json weights = io::to_json(sol.weights, criteria);
    for (const auto& [k, v] : weights.items()) entry[k] = v;
    respondents.push_back(std::move(entry));
    all.push_back(sol.weights);
  }
  auto agg = aggregate_weights(all);
  if (aggregate) *aggregate = agg;
  return {{"respondents", respondents}, {"aggregate", io::to_json(agg, criteria)}};
}

HttpResponse error_response(const Error& e) {
  Json detail = Json::array();
  std::string code(to_string(e.code()));
  if (const auto* se = dynamic_cast<const SurveyError*>(&e)) {
    code = "ValidationFailed";
    for (const auto& v : se->violations()) detail.push_back({{"code", to_string(v.code)}, {"message", v.message}});
  } else {
    for (const auto& d : e.details()) detail.push_back(d);
  }
  return json_response(status_for(e.code()), {{"code", code}, {"message", e.what()}, {"detail", detail}});
}

DecisionService::DecisionService(std::optional<std::filesystem::path> run_store) : run_store_(std::move(run_store)) {}

std::shared_ptr<Session> DecisionService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return it->second;
}

HttpResponse DecisionService::handle(const HttpRequest& req) {
  try {
    const auto parts = split_path(req.path);
    if (parts.size() == 1 && parts[0] == "healthz" && req.method == "GET")
      return json_response(200, {{"status", "ok"}});
    if (parts.empty() || parts[0] != "sessions")
      return json_response(404, {{"code", "NotFound"}, {"message", "no route for " + req.path}, {"detail", Json::array()}});
    if (parts.size() == 1) {
      if (req.method == "POST") return create_session(req);
    } else {
      auto session = find(parts[1]);
      std::lock_guard lock(session->mutex);
      const std::string tail = parts.size() > 2 ? parts[2] : "";
      if (parts.size() == 4 && tail == "surveys" && req.method == "PUT") return put_survey(*session, parts[3], req);
      if (parts.size() == 3) {
        if (tail == "weights" && req.method == "GET") return get_weights(*session);
        if (tail == "matrix" && req.method == "PUT") return put_matrix(*session, req);
        if (tail == "rank" && req.method == "POST") return post_rank(*session, req);
        if (tail == "sensitivity" && req.method == "POST") return post_sensitivity(*session, req);
        if (tail == "snapshot" && req.method == "POST") return post_snapshot(*session);
      }
    }
    return json_response(405, {{"code", "MethodNotAllowed"},
                               {"message", req.method + " " + req.path + " is not supported"},
                               {"detail", Json::array()}});
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response(Error(ErrorCode::Internal, e.what()));
  }
}

HttpResponse DecisionService::create_session(const HttpRequest& req) {
  CriterionSet criteria = canonical_criteria();
  bool blank = req.body.find_first_not_of(" \t\r\n") == std::string::npos;
  if (!blank) criteria = io::criteria_from_json(parse_body(req), "request body");
  auto session = std::make_shared<Session>(std::string{}, std::move(criteria));
  {
    std::unique_lock lock(sessions_mutex_);
    char id[32];
    std::snprintf(id, sizeof id, "s%06llu", static_cast<unsigned long long>(next_session_++));
    session->id = id;
    sessions_.emplace(session->id, session);
  }
  return json_response(201, {{"session_id", session->id},
                             {"criteria", io::to_json(session->criteria)},
                             {"elicitation_slots", elicitation_slots(session->criteria.size())}});
}

HttpResponse DecisionService::put_survey(Session& s, const std::string& respondent, const HttpRequest& req) {
  auto body = parse_body(req);
  if (!body.is_object()) throw Error(ErrorCode::SchemaError, "request body: expected a survey object");
  if (!body.contains("respondent")) {
    body["respondent"] = respondent;
  } else if (body["respondent"] != respondent) {
    throw Error(ErrorCode::SchemaError, "request body: respondent does not match the URL");
  }
  auto survey = io::survey_from_json(body, s.criteria, "request body");
  validate_survey(survey, s.criteria.size());
  const auto sol = solve_bwm(survey);

  auto it = std::find_if(s.surveys.begin(), s.surveys.end(),
                         [&](const ComparisonSurvey& x) { return x.respondent == respondent; });
  if (it != s.surveys.end())
    *it = std::move(survey);
  else
    s.surveys.push_back(std::move(survey));

  Json out = io::to_json(sol.weights, s.criteria);
  Json with_respondent = {{"respondent", respondent}};
  for (auto& [k, v] : out.items()) with_respondent[k] = v;
  return json_response(200, with_respondent);
}

HttpResponse DecisionService::get_weights(Session& s) {
  if (s.surveys.empty()) throw Error(ErrorCode::EmptyInput, "session has no surveys yet");
  WeightVector agg;
  auto report = weights_report(s.criteria, s.surveys, &agg);
  s.last_weights = agg;
  return json_response(200, report);
}

HttpResponse DecisionService::put_matrix(Session& s, const HttpRequest& req) {
  const bool csv = req.content_type.rfind("text/csv", 0) == 0;
  std::optional<DecisionMatrix> m;
  if (csv) {
    auto it = req.query.find("stage");
    if (it == req.query.end()) throw Error(ErrorCode::SchemaError, "CSV matrix upload needs ?stage=");
    auto stage = parse_stage(it->second);
    if (!stage) throw Error(ErrorCode::SchemaError, "stage must be raw, normalized or weighted");
    m = io::matrix_from_csv(req.body, s.criteria, *stage, "request body");
  } else {
    m = io::matrix_from_json(parse_body(req), s.criteria, "request body");
  }
  s.matrix = std::move(m);
  s.last_ranking.reset();
  return json_response(200, {{"valid", true},
                             {"alternatives", s.matrix->rows()},
                             {"criteria", s.matrix->cols()},
                             {"stage", to_string(s.matrix->stage())}});
}

HttpResponse DecisionService::post_rank(Session& s, const HttpRequest& req) {
  const bool blank = req.body.find_first_not_of(" \t\r\n") == std::string::npos;
  const Json body = blank ? Json::object() : parse_body(req);
  auto run = run_pipeline(session_inputs(s, explicit_weights(body, s.criteria)));
  s.last_weights = run.weights;
  s.last_ranking = run.ranking;
  return json_response(200, io::to_json(run.ranking));
}

HttpResponse DecisionService::post_sensitivity(Session& s, const HttpRequest& req) {
  const auto body = parse_body(req);
  if (!body.is_object() || !body.contains("criterion") || !body["criterion"].is_string())
    throw Error(ErrorCode::SchemaError, "request body: needs a string 'criterion'");
  for (const auto& [key, value] : body.items())
    if (key != "criterion" && key != "deltas" && key != "weights" && key != "threshold_limit")
      throw Error(ErrorCode::SchemaError, "request body: unknown field '" + key + "'");
  std::vector<double> deltas;
  if (body.contains("deltas")) {
    if (!body["deltas"].is_array()) throw Error(ErrorCode::SchemaError, "request body: 'deltas' must be an array");
    for (const auto& d : body["deltas"]) {
      if (!d.is_number()) throw Error(ErrorCode::SchemaError, "request body: deltas must be numbers");
      deltas.push_back(d.get<double>());
    }
  }
  const auto criterion = body["criterion"].get<std::string>();
  auto run = run_pipeline(session_inputs(s, explicit_weights(body, s.criteria)));
  auto out = to_json(sensitivity_scan(run, criterion, deltas));
  if (body.contains("threshold_limit")) {
    if (!body["threshold_limit"].is_number())
      throw Error(ErrorCode::SchemaError, "request body: 'threshold_limit' must be a number");
    auto t = flip_threshold(run, criterion, body["threshold_limit"].get<double>());
    out["threshold"] = t ? Json(*t) : Json(nullptr);
  }
  return json_response(200, out);
}

HttpResponse DecisionService::post_snapshot(Session& s) {
  if (!run_store_) throw Error(ErrorCode::SchemaError, "the service was started without a run store");
  auto inputs = session_inputs(s, std::nullopt);
  if (s.surveys.empty() && s.last_weights) inputs.weights = s.last_weights;
  inputs.refs.push_back({"session", s.id, ""});
  auto run = run_pipeline(inputs, {current_timestamp(), {}});
  RunStore store(*run_store_);
  auto stored = store.put(run);
  return json_response(201, {{"run_id", stored.run_id}});
}

HttpServer::HttpServer(DecisionService& service, std::optional<std::filesystem::path> ui_dir)
    : server_(std::make_unique<httplib::Server>()) {
  if (ui_dir) server_->set_mount_point("/", ui_dir->string());
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, {}, req.body, req.get_header_value("Content-Type")};
    for (const auto& [k, v] : req.params) r.query[k] = v;
    auto out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->Get(".*", dispatch);
  server_->Post(".*", dispatch);
  server_->Put(".*", dispatch);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

}  // namespace mcdm
