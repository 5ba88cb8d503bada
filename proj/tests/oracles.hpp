#pragma once

// Brute-force reference implementations used to check the library. They
// share no code with the library beyond plain data types, and favour
// obviousness over speed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double sse(const Points &pts, const std::vector<int> &members) {
  if (members.empty())
    return 0.0;
  const std::size_t dims = pts[static_cast<std::size_t>(members[0])].size();
  std::vector<double> mean(dims, 0.0);
  for (int i : members)
    for (std::size_t d = 0; d < dims; ++d)
      mean[d] += pts[static_cast<std::size_t>(i)][d];
  for (auto &m : mean)
    m /= static_cast<double>(members.size());
  double s = 0.0;
  for (int i : members)
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = pts[static_cast<std::size_t>(i)][d] - mean[d];
      s += diff * diff;
    }
  return s;
}

/// Minimal total SSE over every split into two non-empty groups. Returns
/// the membership (point 0 always in group 0) and its SSE.
inline std::pair<std::vector<int>, double> best_two_partition(const Points &pts) {
  const int n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_assign;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> a{0}, b;
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i) {
      if (mask & (1u << (i - 1))) {
        b.push_back(i);
        assign[static_cast<std::size_t>(i)] = 1;
      } else {
        a.push_back(i);
      }
    }
    if (b.empty())
      continue;
    const double total = sse(pts, a) + sse(pts, b);
    if (total < best) {
      best = total;
      best_assign = assign;
    }
  }
  return {best_assign, best};
}

/// Edge betweenness by enumerating, for every unordered node pair, all
/// simple paths and keeping the shortest ones. Each shortest path gives its
/// edges 1 / (number of shortest paths).
inline std::map<std::pair<int, int>, double>
betweenness_by_paths(int n, const std::vector<std::pair<int, int>> &edges) {
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].insert(v);
    adj[static_cast<std::size_t>(v)].insert(u);
  }
  std::map<std::pair<int, int>, double> out;
  for (auto [u, v] : edges)
    out[{std::min(u, v), std::max(u, v)}] = 0.0;

  for (int s = 0; s < n; ++s) {
    for (int t = s + 1; t < n; ++t) {
      std::vector<std::vector<int>> paths;
      std::vector<int> path{s};
      std::vector<bool> used(static_cast<std::size_t>(n), false);
      used[static_cast<std::size_t>(s)] = true;
      std::function<void(int)> walk = [&](int at) {
        if (at == t) {
          paths.push_back(path);
          return;
        }
        for (int next : adj[static_cast<std::size_t>(at)]) {
          if (used[static_cast<std::size_t>(next)])
            continue;
          used[static_cast<std::size_t>(next)] = true;
          path.push_back(next);
          walk(next);
          path.pop_back();
          used[static_cast<std::size_t>(next)] = false;
        }
      };
      walk(s);
      if (paths.empty())
        continue;
      std::size_t shortest = paths.front().size();
      for (const auto &p : paths)
        shortest = std::min(shortest, p.size());
      std::vector<const std::vector<int> *> keep;
      for (const auto &p : paths)
        if (p.size() == shortest)
          keep.push_back(&p);
      const double share = 1.0 / static_cast<double>(keep.size());
      for (const auto *p : keep)
        for (std::size_t i = 0; i + 1 < p->size(); ++i)
          out[{std::min((*p)[i], (*p)[i + 1]), std::max((*p)[i], (*p)[i + 1])}] += share;
    }
  }
  return out;
}

/// Newman modularity straight from the definition
/// Q = 1/(2m) * sum_ij [A_ij - k_i k_j / (2m)] delta(c_i, c_j).
inline double modularity(int n, const std::vector<std::pair<int, int>> &edges,
                         const std::vector<int> &community) {
  const double m = static_cast<double>(edges.size());
  if (m == 0)
    return 0.0;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> k(static_cast<std::size_t>(n), 0.0);
  for (auto [u, v] : edges) {
    a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1.0;
    a[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1.0;
    k[static_cast<std::size_t>(u)] += 1.0;
    k[static_cast<std::size_t>(v)] += 1.0;
  }
  double q = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (community[static_cast<std::size_t>(i)] == community[static_cast<std::size_t>(j)])
        q += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
             k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(j)] / (2.0 * m);
  return q / (2.0 * m);
}

/// True when the directed edge list admits a topological order (Kahn).
inline bool is_acyclic(int n, const std::vector<std::pair<int, int>> &directed) {
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (auto [u, v] : directed) {
    out[static_cast<std::size_t>(u)].push_back(v);
    ++indeg[static_cast<std::size_t>(v)];
  }
  std::queue<int> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[static_cast<std::size_t>(i)] == 0)
      ready.push(i);
  int seen = 0;
  while (!ready.empty()) {
    const int u = ready.front();
    ready.pop();
    ++seen;
    for (int v : out[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(v)] == 0)
        ready.push(v);
  }
  return seen == n;
}

struct NaiveMerge {
  int left;
  int right;
  double height;
  int size;
};

/// Ward agglomeration that recomputes the SSE increase of every candidate
/// pair from the raw points at every step. Height is sqrt(2 * increase).
/// Cluster ids: leaves 0..n-1, merge i creates n+i; ties go to the smallest
/// (low id, high id) pair.
inline std::vector<NaiveMerge> naive_ward(const Points &pts) {
  const int n = static_cast<int>(pts.size());
  std::map<int, std::vector<int>> clusters;
  for (int i = 0; i < n; ++i)
    clusters[i] = {i};
  std::vector<NaiveMerge> merges;
  int next = n;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> pick{-1, -1};
    for (auto a = clusters.begin(); a != clusters.end(); ++a)
      for (auto b = std::next(a); b != clusters.end(); ++b) {
        std::vector<int> both = a->second;
        both.insert(both.end(), b->second.begin(), b->second.end());
        const double inc = sse(pts, both) - sse(pts, a->second) - sse(pts, b->second);
        if (inc < best - 1e-12 || (std::abs(inc - best) <= 1e-12 && std::pair(a->first, b->first) < pick)) {
          best = inc;
          pick = {a->first, b->first};
        }
      }
    std::vector<int> merged = clusters[pick.first];
    merged.insert(merged.end(), clusters[pick.second].begin(), clusters[pick.second].end());
    clusters.erase(pick.first);
    clusters.erase(pick.second);
    merges.push_back({pick.first, pick.second, std::sqrt(2.0 * std::max(0.0, best)),
                      static_cast<int>(merged.size())});
    clusters[next++] = std::move(merged);
  }
  return merges;
}

/// Partition of 0..n-1 after applying the first `steps` merges, as a set of
/// sorted member lists.
template <class MergeT>
std::set<std::vector<int>> partition_after(int n, const std::vector<MergeT> &merges,
                                           int steps) {
  std::map<int, std::vector<int>> clusters;
  for (int i = 0; i < n; ++i)
    clusters[i] = {i};
  for (int s = 0; s < steps; ++s) {
    const auto &m = merges[static_cast<std::size_t>(s)];
    std::vector<int> merged = clusters[m.left];
    merged.insert(merged.end(), clusters[m.right].begin(), clusters[m.right].end());
    clusters.erase(m.left);
    clusters.erase(m.right);
    std::sort(merged.begin(), merged.end());
    clusters[n + s] = std::move(merged);
  }
  std::set<std::vector<int>> out;
  for (auto &[_, members] : clusters)
    out.insert(members);
  return out;
}

/// NPMI of two terms counted directly over boolean document sets.
inline double npmi_pair(const std::vector<std::set<std::string>> &docs, const std::string &a,
                        const std::string &b, double eps = 1e-12) {
  double na = 0, nb = 0, nab = 0;
  for (const auto &d : docs) {
    const bool ha = d.count(a) > 0, hb = d.count(b) > 0;
    na += ha;
    nb += hb;
    nab += ha && hb;
  }
  const double n = static_cast<double>(docs.size());
  const double pab = nab / n + eps;
  return std::log(pab / ((na / n) * (nb / n))) / -std::log(pab);
}

} // namespace oracle
