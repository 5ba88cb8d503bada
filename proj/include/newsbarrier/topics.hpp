#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "newsbarrier/corpus.hpp"
#include "newsbarrier/error.hpp"
#include "newsbarrier/propagation.hpp"
#include "newsbarrier/tfidf.hpp"
#include "newsbarrier/trends.hpp"

namespace newsbarrier {

// ---------------------------------------------------------------------------
// Ward agglomeration

/// One agglomeration step. Leaves are clusters 0..n-1; merge i creates
/// cluster n+i. `left` < `right`.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  int n = 0;
  std::vector<Merge> merges;
};

/// Ward linkage over an n x n matrix of squared Euclidean distances
/// (row-major, symmetric). Lance-Williams update:
///   d(k, i+j) = ((n_i + n_k) d(k,i) + (n_j + n_k) d(k,j) - n_k d(i,j)) / (n_i + n_j + n_k)
/// Heights are sqrt of the updated value, i.e. sqrt(2 * SSE increase), so a
/// pair of singletons merges at their Euclidean distance. Ties go to the
/// smallest (lower id, higher id) cluster pair.
inline Dendrogram ward_from_squared(std::vector<double> dist, int n) {
  if (n < 2)
    throw Error(ErrorCode::TooFewDocs, "ward clustering needs at least 2 items");
  const auto un = static_cast<std::size_t>(n);
  if (dist.size() != un * un)
    throw Error(ErrorCode::DimensionMismatch, "distance matrix must be n x n");
  auto at = [&](std::size_t a, std::size_t b) -> double & { return dist[a * un + b]; };

  std::vector<int> id(un), size(un, 1);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::size_t> active(un);
  std::iota(active.begin(), active.end(), std::size_t{0});

  Dendrogram d;
  d.n = n;
  d.merges.reserve(un - 1);
  for (int step = 0; step < n - 1; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    std::pair<int, int> best_ids{std::numeric_limits<int>::max(), 0};
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const std::size_t a = active[x], b = active[y];
        const double v = at(a, b);
        const std::pair<int, int> ids = std::minmax(id[a], id[b]);
        if (v < best || (v == best && ids < best_ids)) {
          best = v;
          bi = a;
          bj = b;
          best_ids = ids;
        }
      }
    }
    // Slot bi keeps the merged cluster; bj retires.
    const double ni = size[bi], nj = size[bj];
    for (std::size_t k : active) {
      if (k == bi || k == bj)
        continue;
      const double nk = size[k];
      const double v =
          ((ni + nk) * at(k, bi) + (nj + nk) * at(k, bj) - nk * best) / (ni + nj + nk);
      at(k, bi) = at(bi, k) = std::max(0.0, v);
    }
    d.merges.push_back({best_ids.first, best_ids.second, std::sqrt(std::max(0.0, best)),
                        size[bi] + size[bj]});
    size[bi] += size[bj];
    id[bi] = n + step;
    active.erase(std::find(active.begin(), active.end(), bj));
  }
  return d;
}

/// Ward over dense points.
inline Dendrogram ward_cluster(const std::vector<std::vector<double>> &points) {
  const std::size_t n = points.size();
  if (n < 2)
    throw Error(ErrorCode::TooFewDocs, "ward clustering needs at least 2 items");
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      dist[a * n + b] = dist[b * n + a] = squared_distance(points[a], points[b]);
  return ward_from_squared(std::move(dist), static_cast<int>(n));
}

/// Ward over sparse rows. For L2-normalised rows this is 2 - 2 cos.
inline Dendrogram ward_cluster(const std::vector<SparseRow> &rows) {
  const std::size_t n = rows.size();
  if (n < 2)
    throw Error(ErrorCode::TooFewDocs, "ward clustering needs at least 2 documents");
  std::vector<double> norms(n);
  for (std::size_t a = 0; a < n; ++a)
    norms[a] = squared_norm(rows[a]);
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      dist[a * n + b] = dist[b * n + a] =
          std::max(0.0, norms[a] + norms[b] - 2.0 * dot(rows[a], rows[b]));
  return ward_from_squared(std::move(dist), static_cast<int>(n));
}

/// Apply the first n-k merges. Topic ids follow the smallest member index,
/// which is the earliest article when items are in corpus order.
inline std::vector<int> cut(const Dendrogram &d, int k) {
  if (k < 1 || k > d.n)
    throw Error(ErrorCode::KOutOfRange,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(d.n) + "]");
  std::vector<int> parent(static_cast<std::size_t>(2 * d.n - 1));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x)
      x = parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (int i = 0; i < d.n - k; ++i) {
    const Merge &m = d.merges[static_cast<std::size_t>(i)];
    parent[static_cast<std::size_t>(find(m.left))] = d.n + i;
    parent[static_cast<std::size_t>(find(m.right))] = d.n + i;
  }
  std::map<int, int> topic_of_root;
  std::vector<int> out(static_cast<std::size_t>(d.n));
  for (int leaf = 0; leaf < d.n; ++leaf) {
    auto [it, _] = topic_of_root.emplace(find(leaf), static_cast<int>(topic_of_root.size()));
    out[static_cast<std::size_t>(leaf)] = it->second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Document embeddings

/// Maps tokenized documents to vectors for clustering. The TF-IDF provider
/// is the default; a learned embedder can implement the same interface.
class EmbeddingProvider {
public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<SparseRow> embed(const std::vector<TokenizedDoc> &docs) const = 0;
};

class TfIdfEmbedding : public EmbeddingProvider {
public:
  explicit TfIdfEmbedding(TfIdfOptions opts = {}) : opts_(opts) {}

  std::vector<SparseRow> embed(const std::vector<TokenizedDoc> &docs) const override {
    return tfidf(docs, opts_).rows;
  }

private:
  TfIdfOptions opts_;
};

// ---------------------------------------------------------------------------
// Topic terms and quality scores

using RankedTerms = std::vector<std::pair<std::string, double>>;

/// Class-based term scores: tf(t,c) * ln(1 + A / f(t)), A = mean tokens per
/// class, f(t) = count of t over all classes. Top m per class, ties broken
/// alphabetically.
inline std::vector<RankedTerms> topic_terms(const std::vector<int> &assignment,
                                            const std::vector<TokenizedDoc> &docs,
                                            std::size_t m) {
  if (assignment.size() != docs.size())
    throw Error(ErrorCode::DimensionMismatch, "assignment must cover every document");
  int k = 0;
  for (int t : assignment)
    k = std::max(k, t + 1);
  std::vector<std::map<std::string, double>> tf(static_cast<std::size_t>(k));
  std::map<std::string, double> total;
  double tokens = 0.0;
  for (std::size_t i = 0; i < docs.size(); ++i)
    for (const auto &t : docs[i].tokens) {
      tf[static_cast<std::size_t>(assignment[i])][t] += 1.0;
      total[t] += 1.0;
      tokens += 1.0;
    }
  const double avg = k > 0 ? tokens / k : 0.0;
  std::vector<RankedTerms> out(static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < tf.size(); ++c) {
    RankedTerms &r = out[c];
    for (const auto &[term, count] : tf[c])
      r.emplace_back(term, count * std::log(1.0 + avg / total[term]));
    std::sort(r.begin(), r.end(), [](const auto &a, const auto &b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (r.size() > m)
      r.resize(m);
  }
  return out;
}

struct Coherence {
  std::optional<double> value;     // nullopt when fewer than 2 usable terms
  std::vector<std::string> excluded;  // terms found in no document
};

/// Mean NPMI over term pairs i < j with boolean document co-occurrence:
///   NPMI = ln((P(i,j) + eps) / (P(i) P(j))) / -ln(P(i,j) + eps)
/// Pairs whose terms always occur together score exactly 1, the analytic
/// limit, which the epsilon form cannot reach when P(i,j) = 1.
inline Coherence npmi_coherence(const std::vector<std::string> &terms,
                                const std::vector<TokenizedDoc> &docs, double epsilon = 1e-12) {
  Coherence out;
  const double n = static_cast<double>(docs.size());
  std::vector<std::unordered_set<std::string>> sets;
  sets.reserve(docs.size());
  for (const auto &d : docs)
    sets.emplace_back(d.tokens.begin(), d.tokens.end());
  std::vector<std::string> usable;
  std::vector<std::vector<bool>> occurs;
  for (const auto &t : terms) {
    std::vector<bool> o(docs.size());
    bool any = false;
    for (std::size_t i = 0; i < sets.size(); ++i)
      any |= (o[i] = sets[i].count(t) > 0);
    if (!any) {
      out.excluded.push_back(t);
      continue;
    }
    usable.push_back(t);
    occurs.push_back(std::move(o));
  }
  if (usable.size() < 2)
    return out;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < usable.size(); ++i)
    for (std::size_t j = i + 1; j < usable.size(); ++j) {
      double ci = 0, cj = 0, cij = 0;
      for (std::size_t d = 0; d < docs.size(); ++d) {
        ci += occurs[i][d];
        cj += occurs[j][d];
        cij += occurs[i][d] && occurs[j][d];
      }
      double v;
      if (cij == ci && cij == cj) {
        v = 1.0;
      } else {
        const double pij = cij / n + epsilon;
        v = std::log(pij / ((ci / n) * (cj / n))) / -std::log(pij);
      }
      sum += std::clamp(v, -1.0, 1.0);
      ++pairs;
    }
  out.value = sum / static_cast<double>(pairs);
  return out;
}

/// Unique terms across the top-m lists over the total list length
/// (k * m when every topic has at least m terms).
inline double topic_diversity(const std::vector<RankedTerms> &topics, std::size_t m) {
  std::set<std::string> unique;
  std::size_t slots = 0;
  for (const auto &t : topics) {
    const std::size_t take = std::min(m, t.size());
    slots += take;
    for (std::size_t i = 0; i < take; ++i)
      unique.insert(t[i].first);
  }
  return slots == 0 ? 0.0 : static_cast<double>(unique.size()) / static_cast<double>(slots);
}

struct TemporalTopicSeries {
  BinAxis days;
  std::vector<std::vector<std::int64_t>> counts;  // counts[topic][day]
};

inline TemporalTopicSeries temporal_topics(const std::vector<int> &assignment,
                                           const std::vector<Article> &articles,
                                           const TimeWindow &window, int topic_count) {
  if (assignment.size() != articles.size())
    throw Error(ErrorCode::DimensionMismatch, "assignment must cover every article");
  TemporalTopicSeries s;
  s.days = BinAxis::cover(window, BinSize::Day);
  s.counts.assign(static_cast<std::size_t>(topic_count),
                  std::vector<std::int64_t>(s.days.starts.size(), 0));
  for (std::size_t i = 0; i < articles.size(); ++i)
    if (window.contains(articles[i].published_at))
      ++s.counts[static_cast<std::size_t>(assignment[i])][s.days.index_of(articles[i].published_at)];
  return s;
}

// ---------------------------------------------------------------------------
// Full pipeline

struct TopicOptions {
  int k = 10;
  int m = 10;
  int min_df = 2;
};

struct Topic {
  int id = 0;
  std::vector<std::string> members;
  RankedTerms terms;
  Coherence coherence;
};

struct TopicModel {
  TopicOptions options;
  std::vector<Topic> topics;
  std::vector<int> assignment;
  std::optional<double> mean_coherence;
  double diversity = 0.0;
  Dendrogram dendrogram;
  TemporalTopicSeries temporal;
};

/// preprocess -> TF-IDF -> Ward -> cut(k) -> c-TF-IDF terms, scored for
/// coherence and diversity. Term ranking and coherence use the TF-IDF
/// vocabulary (terms meeting min_df).
inline TopicModel build_topic_model(const std::vector<Article> &articles, const TimeWindow &window,
                                    const TopicOptions &opts, const StopwordSet &stopwords,
                                    const EmbeddingProvider *embedder = nullptr) {
  if (opts.m < 1)
    throw Error(ErrorCode::ValidationError, "m must be >= 1");
  if (articles.size() < 2)
    throw Error(ErrorCode::TooFewDocs, "topic modelling needs at least 2 documents");
  if (opts.k < 1 || static_cast<std::size_t>(opts.k) > articles.size())
    throw Error(ErrorCode::KOutOfRange, "k=" + std::to_string(opts.k) + " outside [1, " +
                                            std::to_string(articles.size()) + "]");
  std::vector<TokenizedDoc> docs;
  docs.reserve(articles.size());
  for (const auto &a : articles)
    docs.push_back(preprocess(a.id, article_text(a), stopwords));

  const TfIdfMatrix matrix = tfidf(docs, {opts.min_df});
  TopicModel model;
  model.options = opts;
  model.dendrogram = ward_cluster(embedder ? embedder->embed(docs) : matrix.rows);
  model.assignment = cut(model.dendrogram, opts.k);

  for (auto &d : docs)
    std::erase_if(d.tokens, [&](const std::string &t) { return !matrix.column.count(t); });
  const auto ranked = topic_terms(model.assignment, docs, static_cast<std::size_t>(opts.m));

  model.topics.resize(ranked.size());
  for (std::size_t i = 0; i < articles.size(); ++i)
    model.topics[static_cast<std::size_t>(model.assignment[i])].members.push_back(articles[i].id);
  double sum = 0.0;
  int scored = 0;
  for (std::size_t t = 0; t < ranked.size(); ++t) {
    Topic &topic = model.topics[t];
    topic.id = static_cast<int>(t);
    topic.terms = ranked[t];
    std::vector<std::string> words;
    for (const auto &[w, _] : topic.terms)
      words.push_back(w);
    topic.coherence = npmi_coherence(words, docs);
    if (topic.coherence.value) {
      sum += *topic.coherence.value;
      ++scored;
    }
  }
  if (scored > 0)
    model.mean_coherence = sum / scored;
  model.diversity = topic_diversity(ranked, static_cast<std::size_t>(opts.m));
  model.temporal =
      temporal_topics(model.assignment, articles, window, static_cast<int>(ranked.size()));
  return model;
}

inline nlohmann::json export_dendrogram(const Dendrogram &d) {
  nlohmann::json merges = nlohmann::json::array();
  for (const auto &m : d.merges)
    merges.push_back({m.left, m.right, m.height, m.size});
  return {{"n", d.n}, {"merges", std::move(merges)}};
}

inline nlohmann::json export_topics(const TopicModel &model) {
  nlohmann::json topics = nlohmann::json::array();
  for (const auto &t : model.topics) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto &[w, s] : t.terms)
      terms.push_back({w, s});
    topics.push_back({{"id", t.id},
                      {"size", t.members.size()},
                      {"members", t.members},
                      {"terms", std::move(terms)},
                      {"coherence", t.coherence.value ? nlohmann::json(*t.coherence.value)
                                                      : nlohmann::json(nullptr)},
                      {"excluded_terms", t.coherence.excluded}});
  }
  return {{"analysis", "topics"},
          {"k", model.options.k},
          {"m", model.options.m},
          {"min_df", model.options.min_df},
          {"topics", std::move(topics)},
          {"mean_coherence",
           model.mean_coherence ? nlohmann::json(*model.mean_coherence) : nlohmann::json(nullptr)},
          {"diversity", model.diversity},
          {"dendrogram", export_dendrogram(model.dendrogram)},
          {"temporal", {{"days", model.temporal.days.labels_json()},
                        {"counts", model.temporal.counts}}}};
}

} // namespace newsbarrier
