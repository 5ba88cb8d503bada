#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "newsbarrier/config.hpp"
#include "newsbarrier/corpus.hpp"
#include "newsbarrier/error.hpp"

namespace newsbarrier {

struct ClientConfig {
  std::string endpoint;   // scheme://host[:port][/base-path]
  std::string api_key;
  int page_size = 100;
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{500};

  static ClientConfig from(const KeyValueConfig &cfg) {
    ClientConfig c;
    c.endpoint = cfg.require("endpoint");
    c.api_key = cfg.get_or("api_key", "");
    try {
      c.page_size = std::stoi(cfg.get_or("page_size", "100"));
      c.max_attempts = std::stoi(cfg.get_or("max_attempts", "3"));
      c.base_backoff = std::chrono::milliseconds(std::stol(cfg.get_or("backoff_ms", "500")));
    } catch (const std::exception &) {
      throw Error(ErrorCode::ConfigError, "page_size/max_attempts/backoff_ms must be integers");
    }
    if (c.page_size < 1 || c.max_attempts < 1)
      throw Error(ErrorCode::ConfigError, "page_size and max_attempts must be >= 1");
    return c;
  }
};

struct RemoteQuery {
  std::vector<std::string> categories;
  std::vector<std::string> concepts;
  TimeWindow window;
};

/// status == 0 means the request never produced an HTTP response.
struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string &path_and_query) = 0;
};

/// Real transport over cpp-httplib.
class HttplibTransport final : public HttpTransport {
public:
  explicit HttplibTransport(const std::string &endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
      throw Error(ErrorCode::ConfigError, "endpoint needs a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    const std::string origin = endpoint.substr(0, path_start);
    base_path_ = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/')
      base_path_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (endpoint.rfind("https://", 0) == 0)
      throw Error(ErrorCode::ConfigError, "built without TLS support: " + endpoint);
#endif
    client_ = std::make_unique<httplib::Client>(origin);
    client_->set_connection_timeout(10);
    client_->set_read_timeout(30);
    client_->set_follow_location(true);
  }

  HttpResponse get(const std::string &path_and_query) override {
    auto res = client_->Get(base_path_ + path_and_query);
    if (!res)
      return {0, httplib::to_string(res.error())};
    return {res->status, res->body};
  }

private:
  std::unique_ptr<httplib::Client> client_;
  std::string base_path_;
};

inline std::string url_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
        c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

struct FetchStats {
  int pages = 0;
  std::size_t received = 0;
  std::size_t yielded = 0;
  std::size_t malformed = 0;
};

using PageSink = std::function<void(std::vector<Article> &&page)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline bool matches_query(const Article &a, const RemoteQuery &q) {
  if (!q.window.contains(a.published_at))
    return false;
  if (!q.categories.empty()) {
    bool hit = false;
    for (const auto &c : a.categories)
      for (const auto &want : q.categories)
        hit = hit || c == want;
    if (!hit)
      return false;
  }
  if (!q.concepts.empty()) {
    bool hit = false;
    for (const auto &c : a.concepts)
      for (const auto &want : q.concepts)
        hit = hit || c.label == want;
    if (!hit)
      return false;
  }
  return true;
}

inline std::string page_request_path(const RemoteQuery &q, const ClientConfig &cfg,
                                     int page) {
  auto join = [](const std::vector<std::string> &items) {
    std::string out;
    for (const auto &i : items)
      out += (out.empty() ? "" : ",") + i;
    return out;
  };
  std::string path = "/article/getArticles?";
  path += "categories=" + url_encode(join(q.categories));
  path += "&concepts=" + url_encode(join(q.concepts));
  path += "&dateStart=" + url_encode(format_timestamp(q.window.start));
  path += "&dateEnd=" + url_encode(format_timestamp(q.window.end));
  path += "&page=" + std::to_string(page);
  path += "&count=" + std::to_string(cfg.page_size);
  path += "&apiKey=" + url_encode(cfg.api_key);
  return path;
}

/// Pulls every page of a query, retrying transient failures (429, 5xx,
/// transport errors) with exponential backoff. Each page is filtered against
/// the query before it reaches `sink`.
inline FetchStats fetch_remote(const RemoteQuery &query, const ClientConfig &cfg,
                               HttpTransport &transport, const PageSink &sink,
                               const Sleeper &sleep = [](std::chrono::milliseconds d) {
                                 std::this_thread::sleep_for(d);
                               }) {
  FetchStats stats;
  int page = 1;
  while (true) {
    HttpResponse res;
    for (int attempt = 1;; ++attempt) {
      res = transport.get(page_request_path(query, cfg, page));
      if (res.status == 401 || res.status == 403)
        throw Error(ErrorCode::AuthError, "HTTP " + std::to_string(res.status));
      const bool transient = res.status == 0 || res.status == 429 || res.status >= 500;
      if (!transient)
        break;
      if (attempt >= cfg.max_attempts) {
        if (res.status == 429)
          throw Error(ErrorCode::RateLimited,
                      "after " + std::to_string(attempt) + " attempts");
        throw Error(ErrorCode::NetworkError,
                    res.status == 0 ? res.body : "HTTP " + std::to_string(res.status));
      }
      sleep(cfg.base_backoff * (1 << (attempt - 1)));
    }
    if (res.status < 200 || res.status >= 300)
      throw Error(ErrorCode::NetworkError, "HTTP " + std::to_string(res.status));

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res.body);
    } catch (const nlohmann::json::parse_error &e) {
      throw Error(ErrorCode::MalformedRecord, std::string("page body: ") + e.what());
    }
    const nlohmann::json &envelope =
        doc.contains("articles") && doc["articles"].is_object() ? doc["articles"] : doc;
    if (!envelope.contains("results") || !envelope["results"].is_array())
      throw Error(ErrorCode::MalformedRecord, "page body lacks results[]");
    const auto &results = envelope["results"];
    ++stats.pages;

    std::vector<Article> batch;
    for (const auto &rec : results) {
      ++stats.received;
      try {
        Article a = article_from_json(rec);
        if (matches_query(a, query))
          batch.push_back(std::move(a));
      } catch (const Error &) {
        ++stats.malformed;
      }
    }
    stats.yielded += batch.size();
    if (!batch.empty())
      sink(std::move(batch));

    const int pages = envelope.value("pages", -1);
    if (pages >= 0 ? page >= pages
                   : results.empty() || results.size() < static_cast<std::size_t>(cfg.page_size))
      break;
    ++page;
  }
  return stats;
}

/// Source of articles for the ingest path.
class ArticleClient {
public:
  virtual ~ArticleClient() = default;
  virtual FetchStats fetch(const RemoteQuery &query, const PageSink &sink) = 0;
};

class HttpArticleClient final : public ArticleClient {
public:
  explicit HttpArticleClient(ClientConfig cfg,
                             std::unique_ptr<HttpTransport> transport = nullptr)
      : cfg_(std::move(cfg)),
        transport_(transport ? std::move(transport)
                             : std::make_unique<HttplibTransport>(cfg_.endpoint)) {}

  FetchStats fetch(const RemoteQuery &query, const PageSink &sink) override {
    return fetch_remote(query, cfg_, *transport_, sink);
  }

private:
  ClientConfig cfg_;
  std::unique_ptr<HttpTransport> transport_;
};

/// Serves a fixed article list in pages; offline runs and tests.
class FixtureArticleClient final : public ArticleClient {
public:
  FixtureArticleClient(std::vector<Article> articles, int page_size)
      : articles_(std::move(articles)), page_size_(page_size < 1 ? 1 : page_size) {}

  FetchStats fetch(const RemoteQuery &query, const PageSink &sink) override {
    FetchStats stats;
    const auto step = static_cast<std::size_t>(page_size_);
    for (std::size_t start = 0; start < articles_.size(); start += step) {
      ++stats.pages;
      std::vector<Article> batch;
      for (std::size_t i = start; i < std::min(articles_.size(), start + step); ++i) {
        ++stats.received;
        if (matches_query(articles_[i], query))
          batch.push_back(articles_[i]);
      }
      stats.yielded += batch.size();
      if (!batch.empty())
        sink(std::move(batch));
    }
    return stats;
  }

private:
  std::vector<Article> articles_;
  int page_size_;
};

inline std::vector<Article> fetch_all(ArticleClient &client, const RemoteQuery &query) {
  std::vector<Article> out;
  client.fetch(query, [&](std::vector<Article> &&page) {
    for (auto &a : page)
      out.push_back(std::move(a));
  });
  return out;
}

} // namespace newsbarrier
