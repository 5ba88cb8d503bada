#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "newsbarrier/error.hpp"
#include "newsbarrier/text_util.hpp"
#include "newsbarrier/time.hpp"

namespace newsbarrier {

struct Concept {
  std::string label;
  double weight = 0.0;

  bool operator==(const Concept &) const = default;
};

struct Article {
  std::string id;
  std::string title;
  std::string body;
  std::string source_name;
  Timestamp published_at;
  std::vector<Concept> concepts;
  std::vector<std::string> categories;

  bool operator==(const Article &) const = default;
};

/// Total order used everywhere a corpus is sorted: time first, id breaks ties.
inline bool article_before(const Article &a, const Article &b) {
  if (a.published_at != b.published_at)
    return a.published_at < b.published_at;
  return a.id < b.id;
}

struct Corpus {
  std::string event_tag;
  std::vector<Article> articles;

  std::size_t size() const { return articles.size(); }
  bool empty() const { return articles.empty(); }
};

struct LoadReport {
  std::size_t raw_records = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t retained = 0;
  /// First few parse failures as "line N: message".
  std::vector<std::string> problems;
};

struct LoadResult {
  Corpus corpus;
  LoadReport report;
};

namespace detail {

inline const nlohmann::json &require_field(const nlohmann::json &obj,
                                           const char *name) {
  auto it = obj.find(name);
  if (it == obj.end())
    throw Error(ErrorCode::MissingField, name);
  return *it;
}

inline std::string string_field(const nlohmann::json &obj, const char *name) {
  const auto &v = require_field(obj, name);
  if (v.is_null())
    return {};
  if (!v.is_string())
    throw Error(ErrorCode::MalformedRecord, std::string(name) + " is not a string");
  return v.get<std::string>();
}

inline Concept parse_concept(const nlohmann::json &c) {
  Concept out;
  const nlohmann::json *label = nullptr;
  const nlohmann::json *weight = nullptr;
  if (c.is_array() && c.size() == 2) {
    label = &c[0];
    weight = &c[1];
  } else if (c.is_object()) {
    if (auto it = c.find("label"); it != c.end())
      label = &*it;
    if (auto it = c.find("weight"); it != c.end())
      weight = &*it;
    else if (auto it2 = c.find("score"); it2 != c.end())
      weight = &*it2;
  }
  if (!label || !weight || !label->is_string() || !weight->is_number())
    throw Error(ErrorCode::MalformedRecord, "concept must be [label, weight]");
  out.label = label->get<std::string>();
  out.weight = weight->get<double>();
  if (!(out.weight >= 0.0) || !std::isfinite(out.weight))
    throw Error(ErrorCode::MalformedRecord, "concept weight must be >= 0");
  return out;
}

} // namespace detail

/// Builds an article from an already-decoded JSON object.
inline Article article_from_json(const nlohmann::json &obj) {
  if (!obj.is_object())
    throw Error(ErrorCode::MalformedRecord, "record is not an object");
  Article a;
  const auto &id = detail::require_field(obj, "id");
  if (id.is_string())
    a.id = id.get<std::string>();
  else if (id.is_number_integer())
    a.id = std::to_string(id.get<long long>());
  else
    throw Error(ErrorCode::MalformedRecord, "id must be a string");
  if (a.id.empty())
    throw Error(ErrorCode::MalformedRecord, "id is empty");
  a.title = detail::string_field(obj, "title");
  a.body = detail::string_field(obj, "body");
  a.source_name = detail::string_field(obj, "source_name");
  const auto &ts = detail::require_field(obj, "published_at");
  if (!ts.is_string())
    throw Error(ErrorCode::MalformedTimestamp, "published_at is not a string");
  a.published_at = parse_timestamp(ts.get<std::string>());

  if (auto it = obj.find("concepts"); it != obj.end() && !it->is_null()) {
    if (!it->is_array())
      throw Error(ErrorCode::MalformedRecord, "concepts must be an array");
    for (const auto &c : *it)
      a.concepts.push_back(detail::parse_concept(c));
  }
  if (auto it = obj.find("categories"); it != obj.end() && !it->is_null()) {
    if (!it->is_array())
      throw Error(ErrorCode::MalformedRecord, "categories must be an array");
    for (const auto &c : *it) {
      if (!c.is_string())
        throw Error(ErrorCode::MalformedRecord, "category must be a string");
      a.categories.push_back(c.get<std::string>());
    }
  }
  return a;
}

/// Parses one line of the corpus file.
inline Article parse_article(std::string_view record) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(record);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  return article_from_json(obj);
}

inline nlohmann::json article_to_json(const Article &a) {
  nlohmann::json concepts = nlohmann::json::array();
  for (const auto &c : a.concepts)
    concepts.push_back(nlohmann::json::array({c.label, c.weight}));
  nlohmann::json obj;
  obj["id"] = a.id;
  obj["title"] = a.title;
  obj["body"] = a.body;
  obj["source_name"] = a.source_name;
  obj["published_at"] = format_timestamp(a.published_at);
  obj["concepts"] = std::move(concepts);
  obj["categories"] = a.categories;
  return obj;
}

inline std::string serialize_article(const Article &a) {
  return article_to_json(a).dump();
}

/// Sorts by (published_at, id) and drops later duplicates of an id.
/// Returns the number of dropped duplicates.
inline std::size_t normalize_articles(std::vector<Article> &articles) {
  std::unordered_set<std::string> seen;
  std::vector<Article> kept;
  kept.reserve(articles.size());
  std::size_t dropped = 0;
  for (auto &a : articles) {
    if (seen.insert(a.id).second)
      kept.push_back(std::move(a));
    else
      ++dropped;
  }
  std::sort(kept.begin(), kept.end(), article_before);
  articles = std::move(kept);
  return dropped;
}

inline LoadResult load_corpus_text(std::string_view text, std::string event_tag,
                                   const std::string &origin = "<memory>") {
  LoadResult result;
  result.corpus.event_tag = std::move(event_tag);
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    ++result.report.raw_records;
    try {
      result.corpus.articles.push_back(parse_article(line));
    } catch (const Error &e) {
      ++result.report.malformed;
      if (result.report.problems.size() < 20)
        result.report.problems.push_back(origin + ":" + std::to_string(line_no) +
                                         ": " + e.what());
    }
  }
  if (result.report.raw_records > 0 &&
      result.report.malformed == result.report.raw_records)
    throw Error(ErrorCode::AllRecordsMalformed, origin);
  result.report.duplicates = normalize_articles(result.corpus.articles);
  result.report.retained = result.corpus.articles.size();
  return result;
}

/// Loads a line-delimited JSON corpus, reporting raw and retained counts.
inline LoadResult ingest_file(const std::string &path, std::string event_tag) {
  return load_corpus_text(read_file(path), std::move(event_tag), path);
}

inline Corpus load_corpus(const std::string &path, std::string event_tag) {
  return ingest_file(path, std::move(event_tag)).corpus;
}

inline std::string serialize_corpus(const Corpus &corpus) {
  std::string out;
  for (const auto &a : corpus.articles) {
    out += serialize_article(a);
    out += '\n';
  }
  return out;
}

inline void write_corpus(const Corpus &corpus, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write " + path);
  out << serialize_corpus(corpus);
  if (!out)
    throw Error(ErrorCode::IoError, "write failed for " + path);
}

/// Articles with start <= published_at < end, order preserved.
inline Corpus slice_window(const Corpus &corpus, const TimeWindow &window) {
  Corpus out;
  out.event_tag = corpus.event_tag;
  for (const auto &a : corpus.articles)
    if (window.contains(a.published_at))
      out.articles.push_back(a);
  return out;
}

/// Smallest day-aligned window covering every article; one day when empty.
inline TimeWindow covering_window(const Corpus &corpus) {
  if (corpus.empty())
    return {Timestamp{0}, Timestamp{kSecondsPerDay}};
  const auto first = corpus.articles.front().published_at.seconds;
  const auto last = corpus.articles.back().published_at.seconds;
  return {Timestamp{floor_to(first, kSecondsPerDay)},
          Timestamp{floor_to(last, kSecondsPerDay) + kSecondsPerDay}};
}

} // namespace newsbarrier
