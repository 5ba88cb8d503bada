#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newsbarrier/barriers.hpp"
#include "newsbarrier/config.hpp"
#include "newsbarrier/corpus.hpp"
#include "newsbarrier/error.hpp"
#include "newsbarrier/propagation.hpp"
#include "newsbarrier/sentiment.hpp"
#include "newsbarrier/tfidf.hpp"
#include "newsbarrier/time.hpp"
#include "newsbarrier/topics.hpp"
#include "newsbarrier/trends.hpp"

namespace newsbarrier {

enum class AnalysisKind { Propagation, Trends, Sentiment, Topics };

constexpr std::string_view to_string(AnalysisKind k) {
  switch (k) {
  case AnalysisKind::Propagation: return "propagation";
  case AnalysisKind::Trends: return "trends";
  case AnalysisKind::Sentiment: return "sentiment";
  case AnalysisKind::Topics: return "topics";
  }
  return "trends";
}

inline AnalysisKind parse_analysis_kind(std::string_view text) {
  for (auto k : {AnalysisKind::Propagation, AnalysisKind::Trends, AnalysisKind::Sentiment,
                 AnalysisKind::Topics})
    if (text == to_string(k))
      return k;
  throw Error(ErrorCode::NotFound, "unknown analysis '" + std::string(text) + "'");
}

/// Parameters shared by the CLI and the HTTP API, as raw strings.
using ParamMap = std::map<std::string, std::string>;

/// Fallbacks for parameters a request leaves out. Loaded from the
/// `[defaults]` config section.
struct AnalysisDefaults {
  BarrierKind barrier = BarrierKind::Geographic;
  std::optional<double> tau;  // unset: per-mode default
  std::optional<std::int64_t> max_lag = 7 * kSecondsPerDay;
  std::size_t max_nodes = 5000;
  BinSize bin = BinSize::Day;
  int k = 10;
  int m = 10;
  int min_df = 2;

  static AnalysisDefaults from(const KeyValueConfig &cfg) {
    AnalysisDefaults d;
    const auto s = cfg.section("defaults");
    auto get = [&](const char *key) -> std::optional<std::string> {
      auto it = s.find(key);
      if (it == s.end())
        return std::nullopt;
      return it->second;
    };
    auto integer = [](const std::string &key, const std::string &v) {
      try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used == v.size())
          return x;
      } catch (const std::exception &) {
      }
      throw Error(ErrorCode::ConfigError, "defaults." + key + ": expected an integer");
    };
    if (auto v = get("barrier"))
      d.barrier = parse_barrier_kind(*v);
    if (auto v = get("tau")) {
      try {
        d.tau = std::stod(*v);
      } catch (const std::exception &) {
        throw Error(ErrorCode::ConfigError, "defaults.tau: expected a number");
      }
    }
    if (auto v = get("max_lag"))
      d.max_lag = parse_duration(*v);
    if (auto v = get("max_nodes"))
      d.max_nodes = static_cast<std::size_t>(integer("max_nodes", *v));
    if (auto v = get("bin"))
      d.bin = parse_bin_size(*v);
    if (auto v = get("k"))
      d.k = static_cast<int>(integer("k", *v));
    if (auto v = get("m"))
      d.m = static_cast<int>(integer("m", *v));
    if (auto v = get("min_df"))
      d.min_df = static_cast<int>(integer("min_df", *v));
    return d;
  }
};

/// A validated analysis request with defaults applied. `mode` stays unset
/// for "auto" because the choice depends on the corpus.
struct AnalysisRequest {
  AnalysisKind analysis = AnalysisKind::Trends;
  std::string event;
  BarrierKind barrier = BarrierKind::Geographic;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
  // propagation
  std::optional<double> tau;
  std::optional<std::int64_t> max_lag;
  std::optional<VectorMode> mode;
  std::optional<int> communities;
  std::size_t max_nodes = 5000;
  // trends
  BinSize bin = BinSize::Day;
  bool cumulative = false;
  // topics
  std::optional<std::string> label;
  int k = 10;
  int m = 10;
  int min_df = 2;

  /// Canonical form: every effective parameter, fixed key order. Used as
  /// the request echo and, with the snapshot id, as the cache key.
  nlohmann::json normalized() const {
    nlohmann::json j = {{"analysis", std::string(to_string(analysis))},
                        {"event", event},
                        {"barrier", std::string(to_string(barrier))},
                        {"from", from ? nlohmann::json(format_timestamp(*from)) : nullptr},
                        {"to", to ? nlohmann::json(format_timestamp(*to)) : nullptr}};
    switch (analysis) {
    case AnalysisKind::Propagation:
      j["tau"] = tau ? nlohmann::json(*tau) : nullptr;
      j["max_lag"] = format_duration(max_lag);
      j["mode"] = mode ? std::string(to_string(*mode)) : "auto";
      j["communities"] = communities ? nlohmann::json(*communities) : nullptr;
      j["max_nodes"] = max_nodes;
      break;
    case AnalysisKind::Trends:
      j["bin"] = std::string(to_string(bin));
      j["cumulative"] = cumulative;
      break;
    case AnalysisKind::Sentiment:
      break;
    case AnalysisKind::Topics:
      j["label"] = label ? nlohmann::json(*label) : nullptr;
      j["k"] = k;
      j["m"] = m;
      j["min_df"] = min_df;
      break;
    }
    return j;
  }
};

namespace detail {

inline const std::set<std::string> &allowed_params(AnalysisKind k) {
  static const std::map<AnalysisKind, std::set<std::string>> table = {
      {AnalysisKind::Propagation,
       {"event", "barrier", "from", "to", "tau", "max_lag", "mode", "communities", "max_nodes"}},
      {AnalysisKind::Trends, {"event", "barrier", "from", "to", "bin", "cumulative"}},
      {AnalysisKind::Sentiment, {"event", "barrier", "from", "to"}},
      {AnalysisKind::Topics, {"event", "barrier", "label", "from", "to", "k", "m", "min_df"}},
  };
  return table.at(k);
}

inline long long param_int(const std::string &name, const std::string &v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == v.size())
      return x;
  } catch (const std::exception &) {
  }
  throw Error(ErrorCode::ValidationError, name + ": expected an integer, got '" + v + "'");
}

inline double param_real(const std::string &name, const std::string &v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x))
      return x;
  } catch (const std::exception &) {
  }
  throw Error(ErrorCode::ValidationError, name + ": expected a number, got '" + v + "'");
}

inline bool param_bool(const std::string &name, const std::string &v) {
  const std::string t = to_lower(trim(v));
  if (t == "true" || t == "1" || t == "yes")
    return true;
  if (t == "false" || t == "0" || t == "no" || t.empty())
    return false;
  throw Error(ErrorCode::ValidationError, name + ": expected true or false, got '" + v + "'");
}

inline Timestamp param_time(const std::string &name, const std::string &v) {
  try {
    return parse_timestamp(v);
  } catch (const Error &) {
    throw Error(ErrorCode::ValidationError, name + ": bad timestamp '" + v + "'");
  }
}

} // namespace detail

/// Validates raw parameters against the schema of `kind`. Keys may use `-`
/// or `_`. Unknown keys are rejected.
inline AnalysisRequest parse_request(AnalysisKind kind, const ParamMap &raw,
                                     const AnalysisDefaults &defaults = {}) {
  ParamMap params;
  for (const auto &[key, value] : raw) {
    std::string k = key;
    std::replace(k.begin(), k.end(), '-', '_');
    if (!detail::allowed_params(kind).count(k))
      throw Error(ErrorCode::ValidationError,
                  "unknown parameter '" + key + "' for " + std::string(to_string(kind)));
    params[k] = value;
  }
  auto get = [&](const char *key) -> const std::string * {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
  };

  AnalysisRequest r;
  r.analysis = kind;
  const std::string *event = get("event");
  if (!event || trim(*event).empty())
    throw Error(ErrorCode::ValidationError, "event is required");
  r.event = std::string(trim(*event));
  r.barrier = defaults.barrier;
  if (auto v = get("barrier"))
    r.barrier = parse_barrier_kind(*v);
  if (auto v = get("from"); v && !v->empty())
    r.from = detail::param_time("from", *v);
  if (auto v = get("to"); v && !v->empty())
    r.to = detail::param_time("to", *v);
  if (r.from && r.to && !(*r.from < *r.to))
    throw Error(ErrorCode::ValidationError, "from must precede to");

  r.tau = defaults.tau;
  r.max_lag = defaults.max_lag;
  r.max_nodes = defaults.max_nodes;
  r.bin = defaults.bin;
  r.k = defaults.k;
  r.m = defaults.m;
  r.min_df = defaults.min_df;

  if (auto v = get("tau"))
    r.tau = detail::param_real("tau", *v);
  if (r.tau && !(*r.tau >= 0.0 && *r.tau <= 1.0))
    throw Error(ErrorCode::ValidationError, "tau must lie in [0, 1]");
  if (auto v = get("max_lag")) {
    try {
      r.max_lag = parse_duration(*v);
    } catch (const Error &) {
      throw Error(ErrorCode::ValidationError, "max_lag: bad duration '" + *v + "'");
    }
  }
  if (auto v = get("mode")) {
    try {
      r.mode = parse_vector_mode(*v);
    } catch (const Error &) {
      throw Error(ErrorCode::ValidationError, "mode: expected concepts, tfidf or auto");
    }
  }
  if (auto v = get("communities")) {
    r.communities = static_cast<int>(detail::param_int("communities", *v));
    if (*r.communities < 1)
      throw Error(ErrorCode::ValidationError, "communities must be >= 1");
  }
  if (auto v = get("max_nodes")) {
    const long long x = detail::param_int("max_nodes", *v);
    if (x < 1)
      throw Error(ErrorCode::ValidationError, "max_nodes must be >= 1");
    r.max_nodes = static_cast<std::size_t>(x);
  }
  if (auto v = get("bin")) {
    try {
      r.bin = parse_bin_size(*v);
    } catch (const Error &e) {
      throw Error(ErrorCode::ValidationError, e.detail());
    }
  }
  if (auto v = get("cumulative"))
    r.cumulative = detail::param_bool("cumulative", *v);
  if (auto v = get("label"); v && !v->empty())
    r.label = *v;
  if (auto v = get("k"))
    r.k = static_cast<int>(detail::param_int("k", *v));
  if (auto v = get("m"))
    r.m = static_cast<int>(detail::param_int("m", *v));
  if (auto v = get("min_df"))
    r.min_df = static_cast<int>(detail::param_int("min_df", *v));
  if (r.k < 1)
    throw Error(ErrorCode::ValidationError, "k must be >= 1");
  if (r.m < 1)
    throw Error(ErrorCode::ValidationError, "m must be >= 1");
  if (r.min_df < 1)
    throw Error(ErrorCode::ValidationError, "min_df must be >= 1");
  return r;
}

/// Converts a JSON object body into a ParamMap (numbers and booleans are
/// stringified the same way they would appear in a query string).
inline ParamMap params_from_json(const nlohmann::json &body) {
  if (!body.is_object())
    throw Error(ErrorCode::ValidationError, "request body must be a JSON object");
  ParamMap out;
  for (const auto &[key, value] : body.items()) {
    if (value.is_string())
      out[key] = value.get<std::string>();
    else if (value.is_boolean())
      out[key] = value.get<bool>() ? "true" : "false";
    else if (value.is_number() || value.is_null())
      out[key] = value.is_null() ? "" : value.dump();
    else
      throw Error(ErrorCode::ValidationError, "parameter '" + key + "' must be a scalar");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

/// Everything an analysis reads. Immutable once built; the service swaps
/// whole snapshots on reload.
struct Snapshot {
  std::map<std::string, Corpus> corpora;
  BarriersDb db;
  Lexicon lexicon;
  SentimentRules rules;
  StopwordSet stopwords = default_stopwords();
  AnalysisDefaults defaults;
  /// Content hash of every input. Two snapshots built from identical bytes
  /// share an id, so CLI runs and the service agree on cache keys.
  std::string id;

  const Corpus &corpus(const std::string &event) const {
    auto it = corpora.find(event);
    if (it == corpora.end())
      throw Error(ErrorCode::NotFound, "unknown event '" + event + "'");
    return it->second;
  }
};

/// Paths a snapshot is built from. Empty optional paths fall back to built-in
/// data (default stopwords, no lexicon).
struct SnapshotSources {
  std::map<std::string, std::string> corpora;  // event tag -> corpus file
  std::string publishers;
  std::string clusters;
  std::string valence;
  std::string intensifiers;
  std::string negations;
  std::string stopwords;
  AnalysisDefaults defaults;
  SentimentRules rules;

  /// Reads `[corpora]`, `[barriers]`, `[lexicon]`, `[topics]`, `[sentiment]`
  /// and `[defaults]`. Relative paths resolve against `base_dir`.
  static SnapshotSources from(const KeyValueConfig &cfg, const std::filesystem::path &base_dir) {
    auto resolve = [&](const std::string &p) -> std::string {
      if (p.empty())
        return p;
      const std::filesystem::path path(p);
      return (path.is_absolute() ? path : base_dir / path).lexically_normal().string();
    };
    SnapshotSources s;
    for (const auto &[tag, path] : cfg.section("corpora"))
      s.corpora[tag] = resolve(path);
    s.publishers = resolve(cfg.get_or("barriers.publishers", ""));
    s.clusters = resolve(cfg.get_or("barriers.clusters", ""));
    s.valence = resolve(cfg.get_or("lexicon.valence", ""));
    s.intensifiers = resolve(cfg.get_or("lexicon.intensifiers", ""));
    s.negations = resolve(cfg.get_or("lexicon.negations", ""));
    s.stopwords = resolve(cfg.get_or("topics.stopwords", ""));
    s.defaults = AnalysisDefaults::from(cfg);
    auto real = [&](const std::string &key, double fallback) {
      const auto v = cfg.get("sentiment." + key);
      if (!v)
        return fallback;
      try {
        return std::stod(*v);
      } catch (const std::exception &) {
        throw Error(ErrorCode::ConfigError, "sentiment." + key + ": expected a number");
      }
    };
    s.rules.negation_window =
        static_cast<int>(real("negation_window", s.rules.negation_window));
    s.rules.negation_factor = real("negation_factor", s.rules.negation_factor);
    s.rules.intensifier_increment = real("intensifier_increment", s.rules.intensifier_increment);
    s.rules.normalization_alpha = real("normalization_alpha", s.rules.normalization_alpha);
    return s;
  }

  static SnapshotSources from_file(const std::string &config_path) {
    const auto cfg = KeyValueConfig::load(config_path);
    return from(cfg, std::filesystem::path(config_path).parent_path());
  }
};

inline Snapshot load_snapshot(const SnapshotSources &src) {
  if (src.corpora.empty())
    throw Error(ErrorCode::ConfigError, "no corpora configured");
  src.rules.validate();
  Snapshot s;
  std::uint64_t h = fnv1a64("newsbarrier-snapshot-v1");
  auto mix = [&](std::string_view tag, std::string_view bytes) {
    h = fnv1a64(tag, h);
    h = fnv1a64(std::to_string(bytes.size()), h);
    h = fnv1a64(bytes, h);
  };
  for (const auto &[tag, path] : src.corpora) {
    const std::string text = read_file(path);
    mix("corpus:" + tag, text);
    s.corpora.emplace(tag, load_corpus_text(text, tag).corpus);
  }
  if (!src.publishers.empty()) {
    mix("publishers", read_file(src.publishers));
    for (auto &p : load_publishers(src.publishers))
      s.db.add_publisher(std::move(p));
  }
  if (!src.clusters.empty()) {
    mix("clusters", read_file(src.clusters));
    s.db.economic = load_clusters(src.clusters, &s.db.warnings);
  }
  if (!src.valence.empty()) {
    mix("valence", read_file(src.valence));
    if (!src.intensifiers.empty())
      mix("intensifiers", read_file(src.intensifiers));
    if (!src.negations.empty())
      mix("negations", read_file(src.negations));
    s.lexicon = Lexicon::load(src.valence, src.intensifiers, src.negations,
                              src.rules.intensifier_increment);
  }
  if (!src.stopwords.empty()) {
    mix("stopwords", read_file(src.stopwords));
    s.stopwords = load_stopwords(src.stopwords);
  }
  s.rules = src.rules;
  s.defaults = src.defaults;
  mix("rules", sentiment_rules_json(s.rules).dump());
  s.id = hex64(h);
  return s;
}

// ---------------------------------------------------------------------------
// Dispatch

/// Runs one analysis. The result holds the module document plus the event,
/// the effective window and the normalised request, and contains nothing
/// time- or host-dependent, so equal inputs give equal bytes.
inline nlohmann::json run_analysis(const Snapshot &snap, const AnalysisRequest &req) {
  const Corpus &full = snap.corpus(req.event);
  const TimeWindow cover = covering_window(full);
  const TimeWindow window{req.from.value_or(cover.start), req.to.value_or(cover.end)};
  if (!window.valid())
    throw Error(ErrorCode::ValidationError, "from must precede to");

  nlohmann::json doc;
  switch (req.analysis) {
  case AnalysisKind::Propagation: {
    const Corpus sliced = slice_window(full, window);
    PropagationConfig cfg;
    cfg.mode = req.mode.value_or(auto_mode(sliced.articles));
    cfg.tau = req.tau.value_or(PropagationConfig::default_tau(cfg.mode));
    cfg.max_lag = req.max_lag;
    cfg.max_nodes = req.max_nodes;
    const PropagationGraph graph = build_graph(sliced, snap.db, req.barrier, cfg, snap.stopwords);
    const auto stop = req.communities ? GirvanNewmanStop::target_count(*req.communities)
                                      : GirvanNewmanStop::max_modularity();
    doc = export_propagation(graph, detect_communities(graph, stop));
    break;
  }
  case AnalysisKind::Trends:
    doc = export_trends(compute_trends(full, snap.db, req.barrier, window, req.bin, req.cumulative));
    break;
  case AnalysisKind::Sentiment:
    doc = export_heatmap(sentiment_heatmap(full, snap.db, req.barrier, window, snap.lexicon,
                                           snap.rules),
                         snap.rules);
    break;
  case AnalysisKind::Topics: {
    Corpus sliced = slice_window(full, window);
    if (req.label) {
      const auto labels = label_articles(sliced.articles, req.barrier, snap.db);
      std::vector<Article> kept;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == *req.label)
          kept.push_back(sliced.articles[i]);
      sliced.articles = std::move(kept);
    }
    if (static_cast<std::size_t>(req.k) > sliced.articles.size())
      throw Error(ErrorCode::KOutOfRange, "k=" + std::to_string(req.k) + " exceeds the " +
                                              std::to_string(sliced.articles.size()) +
                                              " documents selected");
    doc = export_topics(build_topic_model(sliced.articles, window, {req.k, req.m, req.min_df},
                                          snap.stopwords));
    doc["barrier"] = std::string(to_string(req.barrier));
    doc["label"] = req.label ? nlohmann::json(*req.label) : nullptr;
    break;
  }
  }
  doc["event"] = req.event;
  doc["window"] = {{"from", format_timestamp(window.start)}, {"to", format_timestamp(window.end)}};
  doc["request"] = req.normalized();
  return doc;
}

/// Canonical bytes of a document: 2-space indent, sorted keys, trailing
/// newline.
inline std::string render_document(const nlohmann::json &doc) { return doc.dump(2) + "\n"; }

/// Cache key: hash of the snapshot id and the normalised request.
inline std::string cache_key(const Snapshot &snap, const AnalysisRequest &req) {
  return hex64(fnv1a64(snap.id + "\n" + req.normalized().dump()));
}

/// Per-label article counts for one barrier kind, in label order.
inline nlohmann::json label_counts(const Corpus &corpus, const BarriersDb &db, BarrierKind kind) {
  const auto labels = label_articles(corpus.articles, kind, db);
  std::map<std::string, std::int64_t> counts;
  for (const auto &l : labels)
    ++counts[l];
  nlohmann::json out = nlohmann::json::array();
  for (const auto &l : distinct_labels(labels))
    out.push_back({{"label", l}, {"count", counts[l]}});
  return out;
}

/// Known vs Unknown article counts for every barrier kind.
inline nlohmann::json coverage_report(const Corpus &corpus, const BarriersDb &db) {
  nlohmann::json kinds = nlohmann::json::object();
  for (auto kind : kAllBarrierKinds) {
    std::int64_t known = 0, unknown = 0;
    for (const auto &l : label_articles(corpus.articles, kind, db))
      (l == kUnknownLabel ? unknown : known) += 1;
    kinds[std::string(to_string(kind))] = {{"known", known}, {"unknown", unknown}};
  }
  return {{"event", corpus.event_tag},
          {"articles", corpus.articles.size()},
          {"coverage", std::move(kinds)}};
}

} // namespace newsbarrier
