#include <gtest/gtest.h>

#include <deque>

#include "newsbarrier/corpus.hpp"
#include "newsbarrier/remote.hpp"
#include "newsbarrier/time.hpp"
#include "support.hpp"

namespace nb = newsbarrier;
using testing_support::article;
using testing_support::TempDir;
using testing_support::write_file;

// ---------------------------------------------------------------------------
// Timestamps and windows

TEST(Time, ParsesCommonIsoForms) {
  const auto ref = nb::from_civil(2023, 11, 7, 14, 30, 0);
  EXPECT_EQ(nb::parse_timestamp("2023-11-07T14:30:00Z"), ref);
  EXPECT_EQ(nb::parse_timestamp("2023-11-07 14:30:00"), ref);
  EXPECT_EQ(nb::parse_timestamp("2023-11-07T14:30Z"), ref);
  EXPECT_EQ(nb::parse_timestamp("2023-11-07T14:30:00.250Z"), ref);
  EXPECT_EQ(nb::parse_timestamp("2023-11-07T16:30:00+02:00"), ref);
  EXPECT_EQ(nb::parse_timestamp("2023-11-07T09:30:00-0500"), ref);
  EXPECT_EQ(nb::parse_timestamp("2023-11-07"), nb::from_civil(2023, 11, 7));
}

TEST(Time, RejectsMalformedTimestamps) {
  for (const char *bad : {"", "2023-13-01", "2023-11-31", "yesterday", "2023-11-07T25:00:00Z",
                          "2023-11-07T10:00:00+2"}) {
    try {
      nb::parse_timestamp(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const nb::Error &e) {
      EXPECT_EQ(e.code(), nb::ErrorCode::MalformedTimestamp) << bad;
    }
  }
}

TEST(Time, FormatsRoundTrip) {
  const auto t = nb::from_civil(2024, 2, 29, 23, 59, 59);
  EXPECT_EQ(nb::format_timestamp(t), "2024-02-29T23:59:59Z");
  EXPECT_EQ(nb::format_date(t), "2024-02-29");
  EXPECT_EQ(nb::parse_timestamp(nb::format_timestamp(t)), t);
  EXPECT_EQ(nb::format_date(nb::Timestamp{-1}), "1969-12-31");
}

TEST(Time, DurationsParseAndFormat) {
  EXPECT_EQ(nb::parse_duration("7d"), 7 * nb::kSecondsPerDay);
  EXPECT_EQ(nb::parse_duration("36h"), 36 * nb::kSecondsPerHour);
  EXPECT_EQ(nb::parse_duration("90m"), 90 * 60);
  EXPECT_EQ(nb::parse_duration("3600"), 3600);
  EXPECT_FALSE(nb::parse_duration("none").has_value());
  EXPECT_EQ(nb::format_duration(7 * nb::kSecondsPerDay), "7d");
  EXPECT_EQ(nb::format_duration(std::nullopt), "none");
}

TEST(Time, WindowIsHalfOpen) {
  const auto w = nb::make_window(nb::parse_timestamp("2023-11-01"), nb::parse_timestamp("2023-11-02"));
  EXPECT_TRUE(w.contains(nb::parse_timestamp("2023-11-01T00:00:00Z")));
  EXPECT_TRUE(w.contains(nb::parse_timestamp("2023-11-01T23:59:59Z")));
  EXPECT_FALSE(w.contains(nb::parse_timestamp("2023-11-02T00:00:00Z")));
}

// ---------------------------------------------------------------------------
// Article records

TEST(ParseArticle, MinimalRecordHasNoConcepts) {
  const auto a = nb::parse_article(
      R"({"id":"x1","title":"T","body":"B","source_name":"S","published_at":"2023-11-01T00:00:00Z","concepts":[]})");
  EXPECT_EQ(a.id, "x1");
  EXPECT_TRUE(a.concepts.empty());
  EXPECT_TRUE(a.categories.empty());
}

TEST(ParseArticle, MissingPublishedAtNamesTheField) {
  try {
    nb::parse_article(R"({"id":"x1","title":"T","body":"B","source_name":"S"})");
    FAIL() << "expected MissingField";
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::MissingField);
    EXPECT_EQ(e.detail(), "published_at");
  }
}

TEST(ParseArticle, ReadsThreeConceptPairs) {
  const auto a = nb::parse_article(
      R"({"id":"x","title":"","body":"","source_name":"S","published_at":"2023-11-01",)"
      R"("concepts":[["Gaza",0.9],["Israel",0.5],{"label":"Hamas","score":0.25}]})");
  ASSERT_EQ(a.concepts.size(), 3u);
  EXPECT_EQ(a.concepts[2].label, "Hamas");
  EXPECT_DOUBLE_EQ(a.concepts[2].weight, 0.25);
}

TEST(ParseArticle, RejectsNegativeWeightsAndBadTimestamps) {
  EXPECT_THROW(nb::parse_article(R"({"id":"x","title":"","body":"","source_name":"S",)"
                                 R"("published_at":"2023-11-01","concepts":[["a",-1]]})"),
               nb::Error);
  try {
    nb::parse_article(R"({"id":"x","title":"","body":"","source_name":"S","published_at":"soon"})");
    FAIL();
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::MalformedTimestamp);
  }
  try {
    nb::parse_article("not json");
    FAIL();
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::MalformedRecord);
  }
}

// ---------------------------------------------------------------------------
// Corpus loading

TEST(LoadCorpus, EmptyFileGivesEmptyCorpus) {
  TempDir dir;
  write_file(dir.file("c.jsonl"), "");
  EXPECT_TRUE(nb::load_corpus(dir.file("c.jsonl"), "e").empty());
}

TEST(LoadCorpus, SortsAndDedupesKeepingFirst) {
  TempDir dir;
  write_file(dir.file("c.jsonl"),
             R"({"id":"b","title":"late","body":"","source_name":"S","published_at":"2023-11-02"})"
             "\n"
             R"({"id":"a","title":"early","body":"","source_name":"S","published_at":"2023-11-01"})"
             "\n"
             R"({"id":"b","title":"dup","body":"","source_name":"S","published_at":"2023-10-01"})"
             "\n");
  const auto r = nb::ingest_file(dir.file("c.jsonl"), "e");
  ASSERT_EQ(r.corpus.size(), 2u);
  EXPECT_EQ(r.corpus.articles[0].id, "a");
  EXPECT_EQ(r.corpus.articles[1].title, "late");
  EXPECT_EQ(r.report.raw_records, 3u);
  EXPECT_EQ(r.report.duplicates, 1u);
  EXPECT_EQ(r.report.retained, 2u);
}

TEST(LoadCorpus, CountsMalformedLinesButKeepsGoing) {
  const auto r = nb::load_corpus_text(
      "{broken\n"
      R"({"id":"a","title":"","body":"","source_name":"S","published_at":"2023-11-01"})"
      "\n\n",
      "e");
  EXPECT_EQ(r.report.malformed, 1u);
  EXPECT_EQ(r.corpus.size(), 1u);
}

TEST(LoadCorpus, AllMalformedIsAnError) {
  try {
    nb::load_corpus_text("{broken\nnope\n", "e");
    FAIL();
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::AllRecordsMalformed);
  }
}

TEST(LoadCorpus, MissingFileIsIoError) {
  try {
    nb::load_corpus("/nonexistent/corpus.jsonl", "e");
    FAIL();
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::IoError);
  }
}

TEST(LoadCorpus, SerializationRoundTrips) {
  TempDir dir;
  auto c = testing_support::corpus_of({
      article("z", "2023-11-01T10:00:00Z", "S", {{"Gaza", 0.5}}, "Title", "Body \"quoted\""),
      article("y", "2023-11-01T10:00:00Z", "S2", {}, "T2", "ünïcode"),
  });
  c.articles[0].categories = {"Israel-Hamas War"};
  nb::write_corpus(c, dir.file("out.jsonl"));
  const auto back = nb::load_corpus(dir.file("out.jsonl"), c.event_tag);
  EXPECT_EQ(back.articles, c.articles);
  EXPECT_EQ(back.articles[0].id, "y");  // tie on time broken by id
}

TEST(SliceWindow, HalfOpenAndOrderPreserving) {
  const auto c = testing_support::corpus_of({
      article("a", "2023-11-01T00:00:00Z"),
      article("b", "2023-11-02T00:00:00Z"),
      article("c", "2023-11-03T00:00:00Z"),
  });
  const auto all = nb::slice_window(c, nb::covering_window(c));
  EXPECT_EQ(all.articles, c.articles);
  const auto none = nb::slice_window(
      c, nb::make_window(nb::parse_timestamp("2024-01-01"), nb::parse_timestamp("2024-01-02")));
  EXPECT_TRUE(none.empty());
  const auto mid = nb::slice_window(
      c, nb::make_window(nb::parse_timestamp("2023-11-01T00:00:01Z"), nb::parse_timestamp("2023-11-03")));
  ASSERT_EQ(mid.size(), 1u);
  EXPECT_EQ(mid.articles[0].id, "b");
  EXPECT_EQ(mid.size() + 2, c.size());
}

// ---------------------------------------------------------------------------
// Remote client

namespace {

/// Replays canned responses and records each request path.
class ScriptedTransport : public nb::HttpTransport {
public:
  std::deque<nb::HttpResponse> script;
  std::vector<std::string> requests;

  nb::HttpResponse get(const std::string &path) override {
    requests.push_back(path);
    if (script.empty())
      return {500, "exhausted"};
    auto r = script.front();
    script.pop_front();
    return r;
  }
};

std::string page_body(int first_id, int count, int page, int pages,
                      const std::string &category = "Israel-Hamas War") {
  nlohmann::json results = nlohmann::json::array();
  for (int i = 0; i < count; ++i)
    results.push_back({{"id", "r" + std::to_string(first_id + i)},
                       {"title", "t"},
                       {"body", "b"},
                       {"source_name", "S"},
                       {"published_at", "2023-11-05T00:00:00Z"},
                       {"categories", {category}}});
  return nlohmann::json{{"articles", {{"results", results}, {"page", page}, {"pages", pages}}}}
      .dump();
}

nb::RemoteQuery november(std::vector<std::string> categories = {}) {
  return {std::move(categories), {},
          nb::make_window(nb::parse_timestamp("2023-11-01"), nb::parse_timestamp("2023-12-01"))};
}

nb::ClientConfig fast_config() {
  nb::ClientConfig cfg;
  cfg.endpoint = "http://mock";
  cfg.page_size = 5;
  return cfg;
}

} // namespace

TEST(Remote, WalksEveryPage) {
  ScriptedTransport t;
  t.script = {{200, page_body(0, 5, 1, 2)}, {200, page_body(5, 5, 2, 2)}};
  std::vector<nb::Article> got;
  const auto stats = nb::fetch_remote(november(), fast_config(), t,
                                      [&](std::vector<nb::Article> &&page) {
                                        for (auto &a : page)
                                          got.push_back(std::move(a));
                                      },
                                      [](auto) {});
  EXPECT_EQ(got.size(), 10u);
  EXPECT_EQ(stats.pages, 2);
  ASSERT_EQ(t.requests.size(), 2u);
  EXPECT_NE(t.requests[1].find("page=2"), std::string::npos);
}

TEST(Remote, ThreeRateLimitsExhaustTheBudget) {
  ScriptedTransport t;
  t.script = {{429, ""}, {429, ""}, {429, ""}};
  std::vector<std::chrono::milliseconds> sleeps;
  try {
    nb::fetch_remote(november(), fast_config(), t, [](auto &&) {},
                     [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    FAIL();
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::RateLimited);
  }
  EXPECT_EQ(t.requests.size(), 3u);
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_EQ(sleeps[1], 2 * sleeps[0]);
}

TEST(Remote, RecoversFromTransientFailures) {
  ScriptedTransport t;
  t.script = {{503, ""}, {0, "reset"}, {200, page_body(0, 3, 1, 1)}};
  const auto stats = nb::fetch_remote(november(), fast_config(), t, [](auto &&) {}, [](auto) {});
  EXPECT_EQ(stats.yielded, 3u);
}

TEST(Remote, AuthFailureIsImmediate) {
  ScriptedTransport t;
  t.script = {{401, ""}};
  try {
    nb::fetch_remote(november(), fast_config(), t, [](auto &&) {}, [](auto) {});
    FAIL();
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::AuthError);
  }
  EXPECT_EQ(t.requests.size(), 1u);
}

TEST(Remote, PersistentServerErrorIsNetworkError) {
  ScriptedTransport t;
  t.script = {{502, ""}, {502, ""}, {502, ""}};
  try {
    nb::fetch_remote(november(), fast_config(), t, [](auto &&) {}, [](auto) {});
    FAIL();
  } catch (const nb::Error &e) {
    EXPECT_EQ(e.code(), nb::ErrorCode::NetworkError);
  }
}

TEST(Remote, CategoryFilterKeepsOnlyMatchingRecords) {
  ScriptedTransport t;
  nlohmann::json doc = nlohmann::json::parse(page_body(0, 2, 1, 1));
  doc["articles"]["results"][1]["categories"] = {"Ukraine"};
  t.script = {{200, doc.dump()}};
  std::vector<nb::Article> got;
  nb::fetch_remote(november({"Israel-Hamas War"}), fast_config(), t,
                   [&](std::vector<nb::Article> &&page) {
                     for (auto &a : page)
                       got.push_back(std::move(a));
                   },
                   [](auto) {});
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].categories, std::vector<std::string>{"Israel-Hamas War"});
  EXPECT_NE(t.requests[0].find("categories=Israel-Hamas%20War"), std::string::npos);
}

TEST(Remote, FixtureClientPagesAndFilters) {
  std::vector<nb::Article> items;
  for (int i = 0; i < 7; ++i) {
    auto a = article("f" + std::to_string(i), "2023-11-0" + std::to_string(i + 1));
    a.categories = {i % 2 ? "Other" : "Israel-Hamas War"};
    items.push_back(a);
  }
  nb::FixtureArticleClient client(items, 3);
  const auto got = nb::fetch_all(client, november({"Israel-Hamas War"}));
  EXPECT_EQ(got.size(), 4u);
}
