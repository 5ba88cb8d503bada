#include <gtest/gtest.h>

#include <atomic>
#include <condition_variable>
#include <thread>

#include <httplib.h>

#include "newsbarrier/service.hpp"
#include "support.hpp"

namespace nb = newsbarrier;
using testing_support::cli_path;
using testing_support::data_path;
using testing_support::read_text;
using testing_support::run_command;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

std::string jsonl_article(const std::string &id, const std::string &when, const std::string &source,
                          const std::string &title, const std::string &body) {
  nlohmann::json j = {{"id", id},       {"published_at", when}, {"source_name", source},
                      {"title", title}, {"body", body},         {"concepts", nlohmann::json::array({nlohmann::json::array({"Ceasefire", 0.9})})}};
  return j.dump() + "\n";
}

/// Two small corpora plus a config pointing at the bundled barrier data.
struct Workspace {
  TempDir dir;
  std::string config;

  Workspace() {
    std::string alpha;
    const char *sources[] = {"The Jerusalem Herald", "Tel Aviv Daily", "Moscow Courier",
                             "New York Sentinel"};
    for (int i = 0; i < 8; ++i)
      alpha += jsonl_article("a" + std::to_string(i),
                             "2023-11-0" + std::to_string(1 + i % 3) + "T1" + std::to_string(i) + ":00:00Z",
                             sources[i % 4], i % 2 ? "Ceasefire hopes" : "Market slump",
                             i % 2 ? "Good talks bring hope of peace and relief."
                                   : "Oil prices fell as the crisis deepened and markets feared war.");
    write_file(dir.file("alpha.jsonl"), alpha);
    write_file(dir.file("beta.jsonl"),
               jsonl_article("b0", "2023-11-05T10:00:00Z", "Moscow Courier", "Summit", "Leaders met.") +
                   jsonl_article("b1", "2023-11-06T10:00:00Z", "Tel Aviv Daily", "Summit", "Leaders met again."));
    config = dir.file("newsbarrier.toml");
    write_file(config, "bind = \"127.0.0.1:0\"\ncache_dir = \"cache\"\n\n[corpora]\n"
                       "alpha = \"alpha.jsonl\"\nbeta = \"beta.jsonl\"\n\n[barriers]\n"
                       "publishers = \"" + data_path("publishers.csv").string() + "\"\n"
                       "clusters = \"" + data_path("clusters.csv").string() + "\"\n\n[lexicon]\n"
                       "valence = \"" + data_path("lexicon/micro/valence.tsv").string() + "\"\n"
                       "intensifiers = \"" + data_path("lexicon/micro/intensifiers.tsv").string() + "\"\n"
                       "negations = \"" + data_path("lexicon/micro/negations.txt").string() + "\"\n");
  }

  nb::AnalysisService service(std::size_t capacity = 64) const {
    const std::string path = config;
    return nb::AnalysisService([path] { return nb::load_snapshot(nb::SnapshotSources::from_file(path)); },
                               dir.path() / "cache", capacity);
  }
};

nlohmann::json body_of(const nb::ApiResponse &r) { return nlohmann::json::parse(r.body); }

} // namespace

// ---------------------------------------------------------------------------
// Request validation

TEST(Request, ValidatesParameters) {
  const nb::AnalysisDefaults d;
  auto code_of = [&](nb::AnalysisKind k, const nb::ParamMap &p) -> std::optional<nb::ErrorCode> {
    try {
      nb::parse_request(k, p, d);
    } catch (const nb::Error &e) {
      return e.code();
    }
    return std::nullopt;
  };
  using K = nb::AnalysisKind;
  EXPECT_EQ(code_of(K::Propagation, {{"event", "x"}, {"tau", "1.01"}}), nb::ErrorCode::ValidationError);
  EXPECT_EQ(code_of(K::Propagation, {{"event", "x"}, {"tau", "1"}}), std::nullopt);
  EXPECT_EQ(code_of(K::Trends, {{"tau", "0.5"}, {"event", "x"}}), nb::ErrorCode::ValidationError);
  EXPECT_EQ(code_of(K::Trends, {}), nb::ErrorCode::ValidationError);
  EXPECT_EQ(code_of(K::Trends, {{"event", "x"}, {"from", "2023-11-02"}, {"to", "2023-11-01"}}),
            nb::ErrorCode::ValidationError);
  EXPECT_EQ(code_of(K::Topics, {{"event", "x"}, {"k", "0"}}), nb::ErrorCode::ValidationError);
  EXPECT_EQ(code_of(K::Topics, {{"event", "x"}, {"min-df", "3"}}), std::nullopt);
  EXPECT_EQ(code_of(K::Trends, {{"event", "x"}, {"bin", "fortnight"}}), nb::ErrorCode::ValidationError);
}

TEST(Request, NormalizedFormIgnoresSpellingAndOrder) {
  const nb::AnalysisDefaults d;
  const auto a = nb::parse_request(nb::AnalysisKind::Propagation,
                                   {{"event", "x"}, {"max-lag", "2d"}, {"tau", "0.50"}}, d);
  const auto b = nb::parse_request(nb::AnalysisKind::Propagation,
                                   {{"tau", "0.5"}, {"max_lag", "48h"}, {"event", "x"}}, d);
  EXPECT_EQ(a.normalized().dump(), b.normalized().dump());
}

// ---------------------------------------------------------------------------
// Cache

TEST(Cache, EvictsLeastRecentlyUsed) {
  TempDir dir;
  nb::ResultCache cache(dir.path(), 2);
  auto make = [](const char *v) { return [v] { return std::string(v); }; };
  EXPECT_FALSE(cache.get_or_compute("a", make("A")).hit);
  EXPECT_FALSE(cache.get_or_compute("b", make("B")).hit);
  EXPECT_TRUE(cache.get_or_compute("a", make("x")).hit);  // a is now newest
  EXPECT_FALSE(cache.get_or_compute("c", make("C")).hit);
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_FALSE(cache.get("b").has_value());
  EXPECT_EQ(cache.get("a"), "A");
}

TEST(Cache, SurvivesRestart) {
  TempDir dir;
  {
    nb::ResultCache cache(dir.path(), 4);
    cache.get_or_compute("k", [] { return std::string("body"); });
  }
  write_file(dir.file("junk.tmp.123"), "partial");
  nb::ResultCache again(dir.path(), 4);
  const auto r = again.get_or_compute("k", [] { return std::string("other"); });
  EXPECT_TRUE(r.hit);
  EXPECT_EQ(r.body, "body");
  EXPECT_FALSE(std::filesystem::exists(dir.file("junk.tmp.123")));
}

TEST(Cache, ConcurrentMissesComputeOnce) {
  TempDir dir;
  nb::ResultCache cache(dir.path());
  std::atomic<int> calls{0};
  std::vector<std::thread> threads;
  std::vector<std::string> bodies(8);
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&, i] {
      bodies[static_cast<std::size_t>(i)] = cache.get_or_compute("same", [&] {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        return std::string("result");
      }).body;
    });
  for (auto &t : threads)
    t.join();
  EXPECT_EQ(calls.load(), 1);
  for (const auto &b : bodies)
    EXPECT_EQ(b, "result");
}

TEST(Cache, FailuresAreNotStored) {
  TempDir dir;
  nb::ResultCache cache(dir.path());
  EXPECT_THROW(cache.get_or_compute("k", []() -> std::string { throw nb::Error(nb::ErrorCode::EmptyGraph, "x"); }),
               nb::Error);
  EXPECT_EQ(cache.size(), 0u);
  EXPECT_FALSE(cache.get_or_compute("k", [] { return std::string("ok"); }).hit);
}

// ---------------------------------------------------------------------------
// Service routing, driven directly

TEST(Service, ListsEventsSorted) {
  Workspace ws;
  auto svc = ws.service();
  EXPECT_EQ(body_of(svc.events()), nlohmann::json({"alpha", "beta"}));
}

TEST(Service, UnknownEventIs404WithEnvelope) {
  Workspace ws;
  auto svc = ws.service();
  const auto r = svc.analysis("trends", {{"event", "gamma"}});
  EXPECT_EQ(r.status, 404);
  const auto b = body_of(r);
  EXPECT_EQ(b["error"], "NotFound");
  EXPECT_TRUE(b["message"].is_string());
  EXPECT_TRUE(b["details"].is_object());
  EXPECT_EQ(svc.analysis("nonsense", {{"event", "alpha"}}).status, 404);
}

TEST(Service, ValidationAndAnalysisErrors) {
  Workspace ws;
  auto svc = ws.service();
  auto r = svc.analysis("propagation", {{"event", "alpha"}, {"tau", "1.01"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["error"], "ValidationError");

  r = svc.analysis("topics", {{"event", "beta"}, {"k", "5"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["details"]["cause"], "KOutOfRange");

  r = svc.analysis("propagation", {{"event", "alpha"}, {"max_nodes", "3"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(body_of(r)["error"], "AnalysisError");
  EXPECT_EQ(body_of(r)["details"]["cause"], "TooManyNodes");
}

TEST(Service, RepeatedRequestIsByteIdenticalAndCached) {
  Workspace ws;
  auto svc = ws.service();
  for (const char *name : {"propagation", "trends", "sentiment", "topics"}) {
    nb::ParamMap p{{"event", "alpha"}};
    if (std::string(name) == "topics")
      p["k"] = "2";
    const auto first = svc.analysis(name, p);
    ASSERT_EQ(first.status, 200) << name << ": " << first.body;
    EXPECT_EQ(first.headers.at("X-Cache"), "miss");
    const auto second = svc.analysis(name, p);
    EXPECT_EQ(second.headers.at("X-Cache"), "hit");
    EXPECT_EQ(first.body, second.body) << name;
    EXPECT_EQ(first.headers.at("X-Snapshot"), svc.snapshot()->id);
    EXPECT_EQ(body_of(first)["analysis"], name);
  }
}

TEST(Service, LabelsCountArticles) {
  Workspace ws;
  auto svc = ws.service();
  const auto b = body_of(svc.labels("geographic", {{"event", "alpha"}}));
  int total = 0;
  for (const auto &l : b["labels"])
    total += l["count"].get<int>();
  EXPECT_EQ(total, 8);
  EXPECT_EQ(svc.labels("geographic", {}).status, 400);
  EXPECT_EQ(svc.labels("religious", {{"event", "alpha"}}).status, 400);
}

TEST(Service, ReloadPicksUpNewData) {
  Workspace ws;
  auto svc = ws.service();
  const std::string before = svc.snapshot()->id;
  const auto first = svc.analysis("trends", {{"event", "beta"}});
  write_file(ws.dir.file("beta.jsonl"),
             read_text(ws.dir.file("beta.jsonl")) +
                 jsonl_article("b2", "2023-11-06T12:00:00Z", "Moscow Courier", "Summit", "More."));
  // Until reload, the old snapshot serves.
  EXPECT_EQ(svc.analysis("trends", {{"event", "beta"}}).body, first.body);
  const auto r = body_of(svc.reload_endpoint());
  EXPECT_NE(r["snapshot"], before);
  const auto after = svc.analysis("trends", {{"event", "beta"}});
  EXPECT_EQ(after.headers.at("X-Cache"), "miss");
  EXPECT_NE(after.body, first.body);
}

TEST(Service, FailedReloadKeepsOldSnapshot) {
  Workspace ws;
  auto svc = ws.service();
  const std::string before = svc.snapshot()->id;
  std::filesystem::remove(ws.dir.file("beta.jsonl"));
  EXPECT_EQ(svc.reload_endpoint().status, 500);
  EXPECT_EQ(svc.snapshot()->id, before);
}

// ---------------------------------------------------------------------------
// Over HTTP

TEST(Http, ServesApiOnEphemeralPort) {
  Workspace ws;
  auto svc = ws.service();
  httplib::Server server;
  std::mutex mu;
  std::condition_variable cv;
  int port = 0;
  std::thread t([&] {
    nb::serve(svc, server, "127.0.0.1", 0, {}, [&](int p) {
      std::lock_guard lock(mu);
      port = p;
      cv.notify_all();
    });
  });
  {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return port != 0; });
  }
  httplib::Client client("127.0.0.1", port);

  auto events = client.Get("/api/events");
  ASSERT_TRUE(events);
  EXPECT_EQ(events->status, 200);
  EXPECT_EQ(nlohmann::json::parse(events->body), nlohmann::json({"alpha", "beta"}));

  auto get = client.Get("/api/analyses/trends?event=alpha&bin=day");
  ASSERT_TRUE(get);
  EXPECT_EQ(get->status, 200);
  EXPECT_EQ(get->get_header_value("X-Cache"), "miss");
  EXPECT_FALSE(get->get_header_value("X-Compute-Time-Ms").empty());

  auto post = client.Post("/api/analyses/trends", R"({"event": "alpha", "bin": "day"})", "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->get_header_value("X-Cache"), "hit");
  EXPECT_EQ(post->body, get->body);

  auto missing = client.Get("/api/analyses/trends?event=nope");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  auto bad = client.Post("/api/analyses/trends", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  auto labels = client.Get("/api/barriers/political/labels?event=alpha");
  ASSERT_TRUE(labels);
  EXPECT_EQ(labels->status, 200);

  auto reload = client.Post("/api/reload");
  ASSERT_TRUE(reload);
  EXPECT_EQ(reload->status, 200);

  server.stop();
  t.join();
}

// ---------------------------------------------------------------------------
// Command line

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_command(cli_path() + " frobnicate").exit_code, 2);
  EXPECT_EQ(run_command(cli_path()).exit_code, 2);
}

TEST(Cli, ModuleErrorsExitOne) {
  Workspace ws;
  EXPECT_EQ(run_command(cli_path() + " trends --config " + ws.config + " --event gamma").exit_code, 1);
  EXPECT_EQ(run_command(cli_path() + " propagate --config " + ws.config + " --event alpha --tau 2").exit_code, 1);
}

TEST(Cli, TrendsWritesDocument) {
  Workspace ws;
  const std::string out = ws.dir.file("trends.json");
  const auto r = run_command(cli_path() + " trends --config " + ws.config +
                             " --event alpha --bin day --cumulative --out " + out);
  ASSERT_EQ(r.exit_code, 0);
  const auto doc = nlohmann::json::parse(read_text(out));
  EXPECT_EQ(doc["analysis"], "trends");
  EXPECT_EQ(doc["cumulative"], true);
  EXPECT_EQ(doc["event"], "alpha");
}

TEST(Cli, EnrichReportsCoverage) {
  Workspace ws;
  const auto r = run_command(cli_path() + " enrich --config " + ws.config + " --event alpha");
  ASSERT_EQ(r.exit_code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["articles"], 8);
  EXPECT_EQ(doc["coverage"]["geographic"]["known"], 8);
}
