#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "newsbarrier/error.hpp"

namespace newsbarrier {

using NodePair = std::pair<int, int>;

/// Simple undirected graph on nodes 0..n-1. Edges are stored once as (u, v)
/// with u < v, sorted; self loops and duplicates are dropped.
class UndirectedGraph {
public:
  struct Incident {
    int neighbor;
    int edge;
  };

  UndirectedGraph() = default;

  UndirectedGraph(int node_count, std::vector<NodePair> edges) : n_(node_count) {
    for (auto &[u, v] : edges) {
      if (u < 0 || v < 0 || u >= n_ || v >= n_)
        throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
      if (u > v)
        std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [](const NodePair &e) { return e.first == e.second; }),
                edges.end());
    edges_ = std::move(edges);
    adj_.assign(static_cast<std::size_t>(n_), {});
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      const auto [u, v] = edges_[static_cast<std::size_t>(e)];
      adj_[static_cast<std::size_t>(u)].push_back({v, e});
      adj_[static_cast<std::size_t>(v)].push_back({u, e});
    }
    for (auto &list : adj_)
      std::sort(list.begin(), list.end(),
                [](const Incident &a, const Incident &b) { return a.neighbor < b.neighbor; });
  }

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<NodePair> &edges() const { return edges_; }
  const std::vector<Incident> &neighbors(int u) const {
    return adj_[static_cast<std::size_t>(u)];
  }
  int degree(int u) const { return static_cast<int>(neighbors(u).size()); }

private:
  int n_ = 0;
  std::vector<NodePair> edges_;
  std::vector<std::vector<Incident>> adj_;
};

namespace detail {

/// Brandes accumulation from each source in `sources`, over edges with
/// alive[e]. Adds each source's dependency into `out` (not halved).
inline void accumulate_edge_betweenness(const UndirectedGraph &g, const std::vector<bool> &alive,
                                        const std::vector<int> &sources,
                                        std::vector<double> &out) {
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<double> sigma(n), delta(n);
  std::vector<int> dist(n, -1);
  std::vector<std::vector<UndirectedGraph::Incident>> pred(n);
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> touched;
  for (int s : sources) {
    for (int t : touched) {
      const auto ti = static_cast<std::size_t>(t);
      sigma[ti] = 0.0;
      delta[ti] = 0.0;
      dist[ti] = -1;
      pred[ti].clear();
    }
    touched.clear();
    order.clear();
    std::queue<int> q;
    sigma[static_cast<std::size_t>(s)] = 1.0;
    dist[static_cast<std::size_t>(s)] = 0;
    touched.push_back(s);
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      order.push_back(v);
      const auto vi = static_cast<std::size_t>(v);
      for (const auto &inc : g.neighbors(v)) {
        if (!alive[static_cast<std::size_t>(inc.edge)])
          continue;
        const auto wi = static_cast<std::size_t>(inc.neighbor);
        if (dist[wi] < 0) {
          dist[wi] = dist[vi] + 1;
          touched.push_back(inc.neighbor);
          q.push(inc.neighbor);
        }
        if (dist[wi] == dist[vi] + 1) {
          sigma[wi] += sigma[vi];
          pred[wi].push_back({v, inc.edge});
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto wi = static_cast<std::size_t>(*it);
      for (const auto &p : pred[wi]) {
        const auto vi = static_cast<std::size_t>(p.neighbor);
        const double c = sigma[vi] / sigma[wi] * (1.0 + delta[wi]);
        out[static_cast<std::size_t>(p.edge)] += c;
        delta[vi] += c;
      }
    }
  }
}

/// Connected components over alive edges; component ids follow the smallest
/// member node.
inline std::vector<int> components(const UndirectedGraph &g, const std::vector<bool> &alive,
                                   int *count = nullptr) {
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<int> comp(n, -1);
  int next = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0)
      continue;
    std::vector<int> stack{static_cast<int>(start)};
    comp[start] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto &inc : g.neighbors(v)) {
        const auto wi = static_cast<std::size_t>(inc.neighbor);
        if (alive[static_cast<std::size_t>(inc.edge)] && comp[wi] < 0) {
          comp[wi] = next;
          stack.push_back(inc.neighbor);
        }
      }
    }
    ++next;
  }
  if (count)
    *count = next;
  return comp;
}

} // namespace detail

/// Edge betweenness over unweighted shortest paths, each unordered node pair
/// counted once. Keys are (u, v) with u < v.
inline std::map<NodePair, double> edge_betweenness(const UndirectedGraph &g) {
  std::vector<bool> alive(static_cast<std::size_t>(g.edge_count()), true);
  std::vector<int> sources(static_cast<std::size_t>(g.node_count()));
  for (int i = 0; i < g.node_count(); ++i)
    sources[static_cast<std::size_t>(i)] = i;
  std::vector<double> eb(alive.size(), 0.0);
  detail::accumulate_edge_betweenness(g, alive, sources, eb);
  std::map<NodePair, double> out;
  for (std::size_t e = 0; e < eb.size(); ++e)
    out[g.edges()[e]] = eb[e] / 2.0;
  return out;
}

/// Newman-Girvan modularity of a node -> community assignment with unit edge
/// weights. Zero for an edgeless graph.
inline double modularity(const UndirectedGraph &g, const std::vector<int> &membership) {
  const double m = g.edge_count();
  if (m == 0)
    return 0.0;
  std::map<int, double> inner, degree;
  for (const auto &[u, v] : g.edges())
    if (membership[static_cast<std::size_t>(u)] == membership[static_cast<std::size_t>(v)])
      inner[membership[static_cast<std::size_t>(u)]] += 1.0;
  for (int u = 0; u < g.node_count(); ++u)
    degree[membership[static_cast<std::size_t>(u)]] += g.degree(u);
  double q = 0.0;
  for (const auto &[c, d] : degree) {
    const double frac = d / (2.0 * m);
    q += inner[c] / m - frac * frac;
  }
  return q;
}

struct CommunityPartition {
  /// Each community sorted ascending; communities ordered by smallest member.
  std::vector<std::vector<int>> communities;
  double modularity = 0.0;

  std::vector<int> membership(int node_count) const {
    std::vector<int> out(static_cast<std::size_t>(node_count), -1);
    for (std::size_t c = 0; c < communities.size(); ++c)
      for (int v : communities[c])
        out[static_cast<std::size_t>(v)] = static_cast<int>(c);
    return out;
  }
};

struct GirvanNewmanStop {
  enum class Mode { MaxModularity, TargetCount } mode = Mode::MaxModularity;
  int target = 0;

  static GirvanNewmanStop max_modularity() { return {}; }
  static GirvanNewmanStop target_count(int c) { return {Mode::TargetCount, c}; }
};

struct GirvanNewmanResult {
  CommunityPartition partition;
  std::vector<NodePair> removed;       // in removal order
  std::vector<double> removed_scores;  // betweenness at removal time
  /// (component count, modularity) each time the component count grew,
  /// starting with the unmodified graph.
  std::vector<std::pair<int, double>> levels;
};

namespace detail {

inline CommunityPartition partition_from(const std::vector<int> &comp, int count) {
  CommunityPartition p;
  p.communities.assign(static_cast<std::size_t>(count), {});
  for (std::size_t v = 0; v < comp.size(); ++v)
    p.communities[static_cast<std::size_t>(comp[v])].push_back(static_cast<int>(v));
  return p;
}

} // namespace detail

/// Divisive community detection: repeatedly drop the highest-betweenness
/// edge (ties go to the lexicographically smallest (u, v)), recomputing
/// betweenness inside the component that lost the edge. Modularity is always
/// scored against the original graph.
inline GirvanNewmanResult girvan_newman(const UndirectedGraph &g,
                                        GirvanNewmanStop stop = GirvanNewmanStop::max_modularity()) {
  if (g.node_count() == 0)
    throw Error(ErrorCode::EmptyGraph);
  if (stop.mode == GirvanNewmanStop::Mode::TargetCount && stop.target < 1)
    throw Error(ErrorCode::InvalidArgument, "target community count must be >= 1");

  const auto m = static_cast<std::size_t>(g.edge_count());
  std::vector<bool> alive(m, true);
  GirvanNewmanResult result;

  int count = 0;
  std::vector<int> comp = detail::components(g, alive, &count);
  CommunityPartition best = detail::partition_from(comp, count);
  best.modularity = modularity(g, comp);
  result.levels.emplace_back(count, best.modularity);
  auto done = [&] {
    return stop.mode == GirvanNewmanStop::Mode::TargetCount && count >= stop.target;
  };
  if (done()) {
    result.partition = std::move(best);
    return result;
  }

  std::vector<double> eb(m, 0.0);
  {
    std::vector<int> all(static_cast<std::size_t>(g.node_count()));
    for (int i = 0; i < g.node_count(); ++i)
      all[static_cast<std::size_t>(i)] = i;
    detail::accumulate_edge_betweenness(g, alive, all, eb);
  }

  std::size_t remaining = m;
  while (remaining > 0) {
    double top = -1.0;
    for (std::size_t e = 0; e < m; ++e)
      if (alive[e])
        top = std::max(top, eb[e]);
    const double tol = 1e-9 * std::max(1.0, top);
    std::size_t pick = m;
    for (std::size_t e = 0; e < m && pick == m; ++e)
      if (alive[e] && eb[e] >= top - tol)
        pick = e;

    alive[pick] = false;
    --remaining;
    result.removed.push_back(g.edges()[pick]);
    result.removed_scores.push_back(eb[pick] / 2.0);

    const auto [u, v] = g.edges()[pick];
    int new_count = 0;
    comp = detail::components(g, alive, &new_count);

    // Only the component that lost the edge has stale scores.
    std::vector<int> sources;
    for (int x = 0; x < g.node_count(); ++x) {
      const int c = comp[static_cast<std::size_t>(x)];
      if (c == comp[static_cast<std::size_t>(u)] || c == comp[static_cast<std::size_t>(v)])
        sources.push_back(x);
    }
    for (std::size_t e = 0; e < m; ++e) {
      const auto a = static_cast<std::size_t>(g.edges()[e].first);
      if (alive[e] && (comp[a] == comp[static_cast<std::size_t>(u)] ||
                       comp[a] == comp[static_cast<std::size_t>(v)]))
        eb[e] = 0.0;
    }
    detail::accumulate_edge_betweenness(g, alive, sources, eb);

    if (new_count > count) {
      count = new_count;
      CommunityPartition p = detail::partition_from(comp, count);
      p.modularity = modularity(g, comp);
      result.levels.emplace_back(count, p.modularity);
      if (stop.mode == GirvanNewmanStop::Mode::TargetCount) {
        best = std::move(p);
        if (done())
          break;
      } else if (p.modularity > best.modularity + 1e-12) {
        best = std::move(p);
      }
    }
  }
  result.partition = std::move(best);
  return result;
}

} // namespace newsbarrier
