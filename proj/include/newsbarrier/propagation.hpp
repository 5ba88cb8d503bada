#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "newsbarrier/barriers.hpp"
#include "newsbarrier/corpus.hpp"
#include "newsbarrier/error.hpp"
#include "newsbarrier/graph.hpp"
#include "newsbarrier/tfidf.hpp"
#include "newsbarrier/time.hpp"

namespace newsbarrier {

enum class VectorMode { ConceptWeights, TfIdf };

constexpr std::string_view to_string(VectorMode mode) {
  return mode == VectorMode::ConceptWeights ? "concepts" : "tfidf";
}

/// "concepts" or "tfidf"; "auto" (or empty) yields nullopt.
inline std::optional<VectorMode> parse_vector_mode(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t.empty() || t == "auto")
    return std::nullopt;
  if (t == "concepts" || t == "concept" || t == "conceptweights")
    return VectorMode::ConceptWeights;
  if (t == "tfidf" || t == "tf-idf")
    return VectorMode::TfIdf;
  throw Error(ErrorCode::ValidationError, "unknown mode '" + std::string(text) + "'");
}

/// Non-negative sparse feature vector; one entry per feature id.
struct DocVector {
  VectorMode mode = VectorMode::ConceptWeights;
  SparseRow entries;
};

/// Interns feature names (concept labels or terms) to dense ids.
class FeatureIndex {
public:
  std::uint32_t intern(const std::string &name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<std::uint32_t>(ids_.size()));
    return it->second;
  }

  DocVector vector(const std::map<std::string, double> &weights,
                   VectorMode mode = VectorMode::ConceptWeights) {
    DocVector v{mode, {}};
    for (const auto &[name, w] : weights) {
      if (w < 0.0)
        throw Error(ErrorCode::InvalidArgument, "negative feature weight for " + name);
      if (w > 0.0)
        v.entries.emplace_back(intern(name), w);
    }
    std::sort(v.entries.begin(), v.entries.end());
    return v;
  }

private:
  std::map<std::string, std::uint32_t> ids_;
};

/// dot(u, v) / (|u| |v|), clamped to [0, 1]; 0 when either norm is 0.
inline double cosine(const DocVector &u, const DocVector &v) {
  const double nu = squared_norm(u.entries);
  const double nv = squared_norm(v.entries);
  if (nu <= 0.0 || nv <= 0.0)
    return 0.0;
  const double c = dot(u.entries, v.entries) / std::sqrt(nu * nv);
  return std::clamp(c, 0.0, 1.0);
}

inline std::vector<DocVector> concept_vectors(const std::vector<Article> &articles) {
  FeatureIndex index;
  std::vector<DocVector> out;
  out.reserve(articles.size());
  for (const auto &a : articles) {
    std::map<std::string, double> weights;
    for (const auto &c : a.concepts)
      weights[c.label] += c.weight;
    out.push_back(index.vector(weights, VectorMode::ConceptWeights));
  }
  return out;
}

inline std::string article_text(const Article &a) { return a.title + "\n" + a.body; }

/// TF-IDF rows over title and body, keeping every term (min_df = 1).
inline std::vector<DocVector> tfidf_vectors(const std::vector<Article> &articles,
                                            const StopwordSet &stopwords) {
  std::vector<DocVector> out(articles.size(), DocVector{VectorMode::TfIdf, {}});
  if (articles.empty())
    return out;
  std::vector<TokenizedDoc> docs;
  docs.reserve(articles.size());
  for (const auto &a : articles)
    docs.push_back(preprocess(a.id, article_text(a), stopwords));
  try {
    TfIdfMatrix m = tfidf(docs, TfIdfOptions{1});
    for (std::size_t i = 0; i < articles.size(); ++i)
      out[i].entries = std::move(m.rows[i]);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::EmptyVocabulary)
      throw;
  }
  return out;
}

struct PropagationConfig {
  double tau = 0.6;
  std::optional<std::int64_t> max_lag = 7 * kSecondsPerDay;
  VectorMode mode = VectorMode::ConceptWeights;
  std::size_t max_nodes = 5000;

  static double default_tau(VectorMode mode) {
    return mode == VectorMode::TfIdf ? 0.5 : 0.6;
  }

  void validate() const {
    if (!(tau >= 0.0 && tau <= 1.0))
      throw Error(ErrorCode::ValidationError, "tau must lie in [0, 1]");
    if (max_lag && *max_lag < 0)
      throw Error(ErrorCode::ValidationError, "max_lag must be >= 0");
    if (max_nodes == 0)
      throw Error(ErrorCode::ValidationError, "max_nodes must be >= 1");
  }
};

/// Concept mode when any article carries concepts, TF-IDF otherwise.
inline VectorMode auto_mode(const std::vector<Article> &articles) {
  for (const auto &a : articles)
    if (!a.concepts.empty())
      return VectorMode::ConceptWeights;
  return VectorMode::TfIdf;
}

struct PropagationNode {
  std::string id;
  Timestamp time;
  std::string label;
  std::string source;
  std::string title;

  bool operator==(const PropagationNode &) const = default;
};

struct PropagationEdge {
  int src = 0; // earlier article
  int dst = 0; // later article
  double weight = 0.0;

  bool operator==(const PropagationEdge &) const = default;
};

/// Feed-forward similarity graph. Nodes are in (time, id) order, so every
/// edge has src < dst and the graph is a DAG by construction.
struct PropagationGraph {
  BarrierKind kind = BarrierKind::Geographic;
  PropagationConfig config;
  std::vector<PropagationNode> nodes;
  std::vector<PropagationEdge> edges; // sorted by (src, dst)

  UndirectedGraph undirected() const {
    std::vector<NodePair> pairs;
    pairs.reserve(edges.size());
    for (const auto &e : edges)
      pairs.emplace_back(e.src, e.dst);
    return UndirectedGraph(static_cast<int>(nodes.size()), std::move(pairs));
  }
};

/// Links each article to every later article within max_lag whose cosine
/// similarity reaches tau. Candidate pairs come from an inverted index over
/// features, since pairs sharing no feature have similarity 0.
inline PropagationGraph build_graph(const Corpus &corpus, const BarriersDb &db, BarrierKind kind,
                                    const PropagationConfig &config,
                                    const StopwordSet &stopwords = default_stopwords()) {
  config.validate();
  const auto &articles = corpus.articles;
  if (articles.size() > config.max_nodes)
    throw Error(ErrorCode::TooManyNodes, std::to_string(articles.size()) + " > max_nodes=" +
                                             std::to_string(config.max_nodes));
  if (!std::is_sorted(articles.begin(), articles.end(), article_before))
    throw Error(ErrorCode::InvalidArgument, "corpus must be sorted by (published_at, id)");

  PropagationGraph g;
  g.kind = kind;
  g.config = config;
  g.nodes.reserve(articles.size());
  for (const auto &a : articles)
    g.nodes.push_back({a.id, a.published_at, assign_barrier(a, kind, db).label, a.source_name,
                       a.title});

  const std::vector<DocVector> vecs = config.mode == VectorMode::ConceptWeights
                                          ? concept_vectors(articles)
                                          : tfidf_vectors(articles, stopwords);
  const std::size_t n = articles.size();
  auto within_lag = [&](std::size_t i, std::size_t j) {
    return !config.max_lag ||
           articles[j].published_at.seconds - articles[i].published_at.seconds <= *config.max_lag;
  };

  // At tau = 0 every pair qualifies, so the index cannot prune anything.
  if (config.tau <= 0.0) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (within_lag(i, j))
          g.edges.push_back({static_cast<int>(i), static_cast<int>(j), cosine(vecs[i], vecs[j])});
  }

  std::map<std::uint32_t, std::vector<std::size_t>> postings;
  std::vector<std::size_t> stamp(n, n);
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < n && config.tau > 0.0; ++j) {
    candidates.clear();
    for (const auto &[feature, w] : vecs[j].entries) {
      auto it = postings.find(feature);
      if (it == postings.end())
        continue;
      for (std::size_t i : it->second)
        if (stamp[i] != j && within_lag(i, j)) {
          stamp[i] = j;
          candidates.push_back(i);
        }
    }
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t i : candidates) {
      const double c = cosine(vecs[i], vecs[j]);
      if (c >= config.tau)
        g.edges.push_back({static_cast<int>(i), static_cast<int>(j), c});
    }
    for (const auto &[feature, w] : vecs[j].entries)
      postings[feature].push_back(j);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const PropagationEdge &a, const PropagationEdge &b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  return g;
}

inline CommunityPartition detect_communities(const PropagationGraph &graph,
                                             GirvanNewmanStop stop = GirvanNewmanStop::max_modularity()) {
  if (graph.nodes.empty())
    return {};
  return girvan_newman(graph.undirected(), stop).partition;
}

inline nlohmann::json propagation_config_json(const PropagationConfig &c) {
  return {{"tau", c.tau},
          {"max_lag", format_duration(c.max_lag)},
          {"mode", std::string(to_string(c.mode))},
          {"max_nodes", c.max_nodes}};
}

/// Serializable view: nodes with community ids, edges by article id.
inline nlohmann::json export_propagation(const PropagationGraph &graph,
                                         const CommunityPartition &partition) {
  const std::vector<int> membership = partition.membership(static_cast<int>(graph.nodes.size()));
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto &n = graph.nodes[i];
    nodes.push_back({{"id", n.id},
                     {"time", format_timestamp(n.time)},
                     {"label", n.label},
                     {"community", membership[i]},
                     {"source", n.source},
                     {"title", n.title}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto &e : graph.edges)
    edges.push_back({{"src", graph.nodes[static_cast<std::size_t>(e.src)].id},
                     {"dst", graph.nodes[static_cast<std::size_t>(e.dst)].id},
                     {"weight", e.weight}});
  nlohmann::json communities = nlohmann::json::array();
  for (const auto &c : partition.communities) {
    nlohmann::json ids = nlohmann::json::array();
    for (int v : c)
      ids.push_back(graph.nodes[static_cast<std::size_t>(v)].id);
    communities.push_back(std::move(ids));
  }
  return {{"analysis", "propagation"},
          {"barrier", std::string(to_string(graph.kind))},
          {"config", propagation_config_json(graph.config)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"communities", std::move(communities)},
          {"modularity", partition.modularity}};
}

struct ParsedPropagation {
  PropagationGraph graph;
  CommunityPartition partition;
};

/// Inverse of export_propagation.
inline ParsedPropagation parse_propagation(const nlohmann::json &doc) {
  try {
    ParsedPropagation out;
    out.graph.kind = parse_barrier_kind(doc.at("barrier").get<std::string>());
    const auto &cfg = doc.at("config");
    out.graph.config.tau = cfg.at("tau").get<double>();
    out.graph.config.max_lag = parse_duration(cfg.at("max_lag").get<std::string>());
    out.graph.config.mode =
        parse_vector_mode(cfg.at("mode").get<std::string>()).value_or(VectorMode::ConceptWeights);
    out.graph.config.max_nodes = cfg.at("max_nodes").get<std::size_t>();

    std::map<std::string, int> index;
    std::map<int, std::vector<int>> by_community;
    for (const auto &n : doc.at("nodes")) {
      const int i = static_cast<int>(out.graph.nodes.size());
      PropagationNode node{n.at("id").get<std::string>(),
                           parse_timestamp(n.at("time").get<std::string>()),
                           n.at("label").get<std::string>(), n.value("source", ""),
                           n.value("title", "")};
      index[node.id] = i;
      by_community[n.at("community").get<int>()].push_back(i);
      out.graph.nodes.push_back(std::move(node));
    }
    for (const auto &e : doc.at("edges"))
      out.graph.edges.push_back({index.at(e.at("src").get<std::string>()),
                                 index.at(e.at("dst").get<std::string>()),
                                 e.at("weight").get<double>()});
    for (auto &[c, members] : by_community)
      if (c >= 0)
        out.partition.communities.push_back(std::move(members));
    out.partition.modularity = doc.at("modularity").get<double>();
    return out;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::MalformedRecord, std::string("propagation document: ") + e.what());
  } catch (const std::out_of_range &) {
    throw Error(ErrorCode::MalformedRecord, "propagation document: edge references unknown node");
  }
}

} // namespace newsbarrier
