#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "newsbarrier/analysis.hpp"
#include "newsbarrier/cache.hpp"
#include "newsbarrier/config.hpp"
#include "newsbarrier/error.hpp"

namespace newsbarrier {

/// Settings for `serve`, read from the same config file as the snapshot
/// sources. Keys: bind ("host:port"), cache_dir, cache_capacity, static_dir.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path cache_dir = ".newsbarrier-cache";
  std::size_t cache_capacity = 512;
  std::filesystem::path static_dir;
  std::string config_path;
  SnapshotSources sources;

  static ServiceConfig from_file(const std::string &path) {
    const auto cfg = KeyValueConfig::load(path);
    const auto base = std::filesystem::path(path).parent_path();
    ServiceConfig s;
    s.config_path = path;
    s.sources = SnapshotSources::from(cfg, base);
    const std::string bind = cfg.get_or("bind", "127.0.0.1:8080");
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::ConfigError, "bind must be host:port, got '" + bind + "'");
    s.host = bind.substr(0, colon);
    try {
      s.port = std::stoi(bind.substr(colon + 1));
    } catch (const std::exception &) {
      throw Error(ErrorCode::ConfigError, "bind port is not a number: '" + bind + "'");
    }
    auto resolve = [&](const std::string &p) {
      const std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : (base / fp).lexically_normal();
    };
    s.cache_dir = resolve(cfg.get_or("cache_dir", ".newsbarrier-cache"));
    if (auto v = cfg.get("cache_capacity"))
      s.cache_capacity = static_cast<std::size_t>(detail::param_int("cache_capacity", *v));
    if (auto v = cfg.get("static_dir"); v && !v->empty())
      s.static_dir = resolve(*v);
    return s;
  }
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

inline int http_status(ErrorCode code) {
  switch (code) {
  case ErrorCode::NotFound: return 404;
  case ErrorCode::ValidationError:
  case ErrorCode::InvalidArgument:
  case ErrorCode::MalformedTimestamp:
  case ErrorCode::KOutOfRange: return 400;
  case ErrorCode::TooManyNodes:
  case ErrorCode::TooFewDocs:
  case ErrorCode::EmptyVocabulary:
  case ErrorCode::EmptyGraph:
  case ErrorCode::DegenerateTerm:
  case ErrorCode::EmptyInput:
  case ErrorCode::DimensionMismatch: return 422;
  default: return 500;
  }
}

/// Envelope shared by every error response: { error, message, details }.
/// Module failures during an analysis surface as AnalysisError with the
/// module code in details.cause.
inline ApiResponse error_response(const Error &e) {
  const int status = http_status(e.code());
  std::string code(to_string(e.code()));
  nlohmann::json details = nlohmann::json::object();
  if (e.code() == ErrorCode::KOutOfRange) {
    details["cause"] = code;
    code = "ValidationError";
  } else if (status == 422) {
    details["cause"] = code;
    code = "AnalysisError";
  }
  nlohmann::json body = {{"error", code}, {"message", e.detail()}, {"details", details}};
  return {status, body.dump() + "\n", {}};
}

/// Request routing and caching, independent of the HTTP transport so it can
/// be driven directly in tests. Snapshots are immutable and swapped whole.
class AnalysisService {
public:
  using Loader = std::function<Snapshot()>;

  AnalysisService(Loader loader, std::filesystem::path cache_dir, std::size_t cache_capacity = 512)
      : loader_(std::move(loader)), cache_(std::move(cache_dir), cache_capacity) {
    snapshot_ = std::make_shared<const Snapshot>(loader_());
  }

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard lock(mu_);
    return snapshot_;
  }

  /// Builds a new snapshot and swaps it in. On failure the old one stays.
  std::shared_ptr<const Snapshot> reload() {
    auto next = std::make_shared<const Snapshot>(loader_());
    std::lock_guard lock(mu_);
    snapshot_ = next;
    return next;
  }

  ResultCache &cache() { return cache_; }

  ApiResponse events() const {
    nlohmann::json tags = nlohmann::json::array();
    for (const auto &[tag, _] : snapshot()->corpora)
      tags.push_back(tag);
    return {200, tags.dump() + "\n", {}};
  }

  ApiResponse labels(const std::string &kind, const ParamMap &params) const {
    try {
      const auto snap = snapshot();
      const BarrierKind k = parse_barrier_kind(kind);
      auto it = params.find("event");
      if (it == params.end() || it->second.empty())
        throw Error(ErrorCode::ValidationError, "event is required");
      nlohmann::json body = {{"event", it->second},
                             {"barrier", std::string(to_string(k))},
                             {"labels", label_counts(snap->corpus(it->second), snap->db, k)}};
      return {200, body.dump() + "\n", {}};
    } catch (const Error &e) {
      return error_response(e);
    }
  }

  /// Validate, then serve from cache or compute. Timing and cache status go
  /// in headers so the body stays byte-stable.
  ApiResponse analysis(const std::string &name, const ParamMap &params) {
    const auto started = std::chrono::steady_clock::now();
    try {
      const auto snap = snapshot();
      const AnalysisKind kind = parse_analysis_kind(name);
      const AnalysisRequest req = parse_request(kind, params, snap->defaults);
      snap->corpus(req.event);  // 404 before any work
      const auto result = cache_.get_or_compute(
          cache_key(*snap, req), [&] { return render_document(run_analysis(*snap, req)); });
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
      return {200,
              result.body,
              {{"X-Cache", result.hit ? "hit" : "miss"},
               {"X-Compute-Time-Ms", std::to_string(ms)},
               {"X-Snapshot", snap->id}}};
    } catch (const Error &e) {
      return error_response(e);
    }
  }

  ApiResponse reload_endpoint() {
    try {
      const auto snap = reload();
      nlohmann::json events = nlohmann::json::array();
      for (const auto &[tag, _] : snap->corpora)
        events.push_back(tag);
      nlohmann::json body = {{"snapshot", snap->id}, {"events", events}};
      return {200, body.dump() + "\n", {}};
    } catch (const Error &e) {
      return error_response(e);
    }
  }

  /// Registers the API routes, plus a static mount when `static_dir` is set.
  void mount(httplib::Server &server, const std::filesystem::path &static_dir = {}) {
    auto reply = [](httplib::Response &res, const ApiResponse &r) {
      res.status = r.status;
      for (const auto &[k, v] : r.headers)
        res.set_header(k, v);
      res.set_content(r.body, "application/json");
    };
    auto query = [](const httplib::Request &req) {
      ParamMap p;
      for (const auto &[k, v] : req.params)
        p.emplace(k, v);  // first value wins
      return p;
    };
    server.Get("/api/events", [=, this](const httplib::Request &, httplib::Response &res) {
      reply(res, events());
    });
    server.Get(R"(/api/barriers/([^/]+)/labels)",
               [=, this](const httplib::Request &req, httplib::Response &res) {
                 reply(res, labels(req.matches[1], query(req)));
               });
    server.Get(R"(/api/analyses/([^/]+))",
               [=, this](const httplib::Request &req, httplib::Response &res) {
                 reply(res, analysis(req.matches[1], query(req)));
               });
    server.Post(R"(/api/analyses/([^/]+))",
                [=, this](const httplib::Request &req, httplib::Response &res) {
                  ParamMap params = query(req);
                  if (!req.body.empty()) {
                    try {
                      for (auto &[k, v] : params_from_json(nlohmann::json::parse(req.body)))
                        params[k] = v;
                    } catch (const nlohmann::json::exception &e) {
                      return reply(res, error_response(Error(ErrorCode::ValidationError,
                                                             std::string("bad JSON body: ") +
                                                                 e.what())));
                    } catch (const Error &e) {
                      return reply(res, error_response(e));
                    }
                  }
                  reply(res, analysis(req.matches[1], params));
                });
    server.Post("/api/reload", [=, this](const httplib::Request &, httplib::Response &res) {
      reply(res, reload_endpoint());
    });
    if (!static_dir.empty() && !server.set_mount_point("/", static_dir.string()))
      throw Error(ErrorCode::ConfigError, "static_dir not found: " + static_dir.string());
  }

private:
  Loader loader_;
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> snapshot_;
  ResultCache cache_;
};

/// Binds and serves until `server.stop()` is called from another thread.
/// Returns the bound port through `on_bound` before blocking.
inline void serve(AnalysisService &service, httplib::Server &server, const std::string &host,
                  int port, const std::filesystem::path &static_dir = {},
                  const std::function<void(int)> &on_bound = {}) {
  service.mount(server, static_dir);
  int bound = port;
  if (port == 0)
    bound = server.bind_to_any_port(host);
  else if (!server.bind_to_port(host, port))
    bound = -1;
  if (bound < 0)
    throw Error(ErrorCode::BindError, "cannot bind " + host + ":" + std::to_string(port));
  if (on_bound)
    on_bound(bound);
  server.listen_after_bind();
}

} // namespace newsbarrier
