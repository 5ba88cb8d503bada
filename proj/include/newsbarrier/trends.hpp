#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newsbarrier/barriers.hpp"
#include "newsbarrier/corpus.hpp"
#include "newsbarrier/time.hpp"

namespace newsbarrier {

enum class BinSize { Hour, Day, Week };

constexpr std::string_view to_string(BinSize b) {
  switch (b) {
  case BinSize::Hour: return "hour";
  case BinSize::Day: return "day";
  case BinSize::Week: return "week";
  }
  return "day";
}

inline BinSize parse_bin_size(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t.empty() || t == "day")
    return BinSize::Day;
  if (t == "hour")
    return BinSize::Hour;
  if (t == "week")
    return BinSize::Week;
  throw Error(ErrorCode::ValidationError, "unknown bin '" + std::string(text) + "'");
}

constexpr std::int64_t bin_seconds(BinSize b) {
  switch (b) {
  case BinSize::Hour: return kSecondsPerHour;
  case BinSize::Day: return kSecondsPerDay;
  case BinSize::Week: return 7 * kSecondsPerDay;
  }
  return kSecondsPerDay;
}

/// Bucket axis covering a window. Buckets start on the UTC boundary at or
/// before window.start (weeks start on that day) and run until the bucket
/// that contains the last second of the window.
struct BinAxis {
  BinSize size = BinSize::Day;
  std::vector<Timestamp> starts;

  static BinAxis cover(const TimeWindow &window, BinSize size) {
    BinAxis axis{size, {}};
    const std::int64_t align = size == BinSize::Hour ? kSecondsPerHour : kSecondsPerDay;
    const std::int64_t step = bin_seconds(size);
    for (std::int64_t t = floor_to(window.start.seconds, align); t < window.end.seconds; t += step)
      axis.starts.push_back(Timestamp{t});
    return axis;
  }

  std::size_t index_of(Timestamp t) const {
    return static_cast<std::size_t>((t.seconds - starts.front().seconds) / bin_seconds(size));
  }

  nlohmann::json labels_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (auto t : starts)
      out.push_back(size == BinSize::Hour ? format_timestamp(t) : format_date(t));
    return out;
  }
};

struct TrendSeries {
  BarrierKind kind = BarrierKind::Geographic;
  BinAxis axis;
  std::vector<std::string> labels;
  std::map<std::string, std::vector<std::int64_t>> counts;
  bool cumulative = false;
};

/// Article counts per (barrier label, bucket). The label axis spans the whole
/// corpus so an empty window still reports every label at zero.
inline TrendSeries compute_trends(const Corpus &corpus, const BarriersDb &db, BarrierKind kind,
                                  const TimeWindow &window, BinSize bin = BinSize::Day,
                                  bool cumulative = false) {
  if (!window.valid())
    throw Error(ErrorCode::ValidationError, "window start must precede end");
  TrendSeries s;
  s.kind = kind;
  s.axis = BinAxis::cover(window, bin);
  s.cumulative = cumulative;
  const std::vector<std::string> labels = label_articles(corpus.articles, kind, db);
  s.labels = distinct_labels(labels);
  for (const auto &l : s.labels)
    s.counts[l].assign(s.axis.starts.size(), 0);
  for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
    const auto &a = corpus.articles[i];
    if (window.contains(a.published_at))
      ++s.counts[labels[i]][s.axis.index_of(a.published_at)];
  }
  if (cumulative)
    for (auto &[_, v] : s.counts)
      for (std::size_t b = 1; b < v.size(); ++b)
        v[b] += v[b - 1];
  return s;
}

inline nlohmann::json export_trends(const TrendSeries &s) {
  nlohmann::json series = nlohmann::json::object();
  for (const auto &l : s.labels)
    series[l] = s.counts.at(l);
  return {{"analysis", "trends"},
          {"barrier", std::string(to_string(s.kind))},
          {"bin", std::string(to_string(s.axis.size))},
          {"bins", s.axis.labels_json()},
          {"labels", s.labels},
          {"series", std::move(series)},
          {"cumulative", s.cumulative}};
}

} // namespace newsbarrier
