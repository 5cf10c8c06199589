#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mcdm/domain.hpp"
#include "mcdm/io.hpp"

namespace httplib {
class Server;
}

namespace mcdm {

struct HttpRequest {
  std::string method;
  std::string path;  // already percent-decoded, no query string
  std::map<std::string, std::string> query;
  std::string body;
  std::string content_type;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Per-respondent solved weights plus their aggregate. Shared by the CLI
/// `weights` command and GET /sessions/{id}/weights.
io::Json weights_report(const CriterionSet& criteria, const std::vector<ComparisonSurvey>& surveys,
                        WeightVector* aggregate = nullptr);

/// Error payload shared by every endpoint: {code, message, detail}.
HttpResponse error_response(const Error& e);

struct Session {
  Session(std::string id_, CriterionSet criteria_) : id(std::move(id_)), criteria(std::move(criteria_)) {}

  std::string id;
  CriterionSet criteria;
  /// Insertion order; a PUT for an existing respondent replaces in place.
  std::vector<ComparisonSurvey> surveys;
  std::optional<DecisionMatrix> matrix;
  std::optional<WeightVector> last_weights;
  std::optional<RankingResult> last_ranking;
  std::mutex mutex;
};

/// Transport-independent request handler behind the HTTP API. Sessions live
/// in memory; ids are sequential so replaying the same requests against a
/// fresh service yields the same responses.
class DecisionService {
 public:
  explicit DecisionService(std::optional<std::filesystem::path> run_store = std::nullopt);

  HttpResponse handle(const HttpRequest& request);

 private:
  std::shared_ptr<Session> find(const std::string& id) const;

  HttpResponse create_session(const HttpRequest& req);
  HttpResponse put_survey(Session& s, const std::string& respondent, const HttpRequest& req);
  HttpResponse get_weights(Session& s);
  HttpResponse put_matrix(Session& s, const HttpRequest& req);
  HttpResponse post_rank(Session& s, const HttpRequest& req);
  HttpResponse post_sensitivity(Session& s, const HttpRequest& req);
  HttpResponse post_snapshot(Session& s);

  std::optional<std::filesystem::path> run_store_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// cpp-httplib front end. Routes every /sessions and /healthz request to the
/// service and optionally serves static UI assets from `ui_dir` at "/".
class HttpServer {
 public:
  HttpServer(DecisionService& service, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port` (0 picks a free port) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace mcdm
