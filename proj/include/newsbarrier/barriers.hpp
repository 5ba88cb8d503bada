#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsbarrier/corpus.hpp"
#include "newsbarrier/countries.hpp"
#include "newsbarrier/error.hpp"
#include "newsbarrier/text_util.hpp"

namespace newsbarrier {

enum class BarrierKind { Geographic, Economic, Political };

inline constexpr std::array kAllBarrierKinds = {
    BarrierKind::Geographic, BarrierKind::Economic, BarrierKind::Political};

inline constexpr std::string_view kUnknownLabel = "Unknown";

constexpr std::string_view to_string(BarrierKind kind) {
  switch (kind) {
  case BarrierKind::Geographic: return "geographic";
  case BarrierKind::Economic: return "economic";
  case BarrierKind::Political: return "political";
  }
  return "geographic";
}

inline BarrierKind parse_barrier_kind(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "geographic" || t == "geographical")
    return BarrierKind::Geographic;
  if (t == "economic")
    return BarrierKind::Economic;
  if (t == "political")
    return BarrierKind::Political;
  throw Error(ErrorCode::ValidationError, "unknown barrier kind '" + std::string(text) + "'");
}

struct BarrierLabel {
  BarrierKind kind = BarrierKind::Geographic;
  std::string label{kUnknownLabel};

  bool known() const { return label != kUnknownLabel; }
  bool operator==(const BarrierLabel &) const = default;
};

// ---------------------------------------------------------------------------
// Prosperity vectors and distances

inline constexpr std::size_t kProsperityDims = 12;

struct ProsperityVector {
  std::string country;
  std::array<double, kProsperityDims> dims{};
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

inline double euclidean_distance(const ProsperityVector &a, const ProsperityVector &b) {
  return euclidean_distance(std::span<const double>(a.dims), std::span<const double>(b.dims));
}

// ---------------------------------------------------------------------------
// k-means

struct KMeansOptions {
  int k = 20;
  std::uint64_t seed = 0;
  int max_iter = 300;
  /// z-score each dimension before clustering. Off: raw Euclidean distance.
  bool standardize = false;
};

inline std::string class_label(int class_index) {
  return "C" + std::to_string(class_index + 1);
}

/// Country -> economic class map, either fitted by kmeans() or loaded from a
/// pre-computed clusters file (in which case centroids are empty).
struct EconomicClusterMap {
  int k = 0;
  std::vector<std::string> countries;      // display names, input order
  std::vector<int> classes;                // 0-based class per country
  std::vector<std::vector<double>> centroids;
  std::uint64_t seed = 0;
  double inertia = 0.0;
  std::vector<double> inertia_history;     // one entry per Lloyd iteration
  int iterations = 0;
  bool standardized = false;

  std::optional<int> class_of(std::string_view country) const {
    const std::string key = CountryNames::instance().key(country);
    auto it = index_.find(key);
    if (it == index_.end())
      return std::nullopt;
    return classes[it->second];
  }

  std::optional<std::string> label_of(std::string_view country) const {
    auto c = class_of(country);
    if (!c)
      return std::nullopt;
    return class_label(*c);
  }

  /// Appends a country; a repeated country overwrites the earlier class.
  /// Returns false when it was a repeat.
  bool add(std::string_view country, int cls) {
    const std::string display = CountryNames::instance().canonical(country);
    const std::string key = to_lower(display);
    if (auto it = index_.find(key); it != index_.end()) {
      classes[it->second] = cls;
      return false;
    }
    index_.emplace(key, countries.size());
    countries.push_back(display);
    classes.push_back(cls);
    return true;
  }

  std::set<int> present_classes() const { return {classes.begin(), classes.end()}; }

private:
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

/// Uniform double in [0, 1) built from raw engine bits so the sequence does
/// not depend on the standard library's distribution implementation.
inline double unit_uniform(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t nearest_centroid(std::span<const double> p,
                                    const std::vector<std::vector<double>> &centroids,
                                    double *dist2 = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist2)
    *dist2 = best_d;
  return best;
}

} // namespace detail

struct KMeansResult {
  std::vector<int> assignment;
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  std::vector<double> inertia_history;
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm from k-means++ seeding. Stops at an assignment fixpoint
/// or after max_iter update steps. A cluster that empties takes the point
/// farthest from its own centroid. Clusters are numbered by first member.
inline KMeansResult kmeans_points(const std::vector<std::vector<double>> &points, int k,
                                  std::uint64_t seed, int max_iter) {
  const std::size_t n = points.size();
  if (n == 0)
    throw Error(ErrorCode::EmptyInput, "no vectors to cluster");
  if (k < 1 || max_iter < 1)
    throw Error(ErrorCode::InvalidArgument, "k and max_iter must be >= 1");
  if (static_cast<std::size_t>(k) > n)
    throw Error(ErrorCode::KTooLarge,
                "k=" + std::to_string(k) + " > " + std::to_string(n) + " vectors");
  const std::size_t dim = points[0].size();
  for (const auto &p : points)
    if (p.size() != dim)
      throw Error(ErrorCode::DimensionMismatch, "ragged input vectors");
  const auto kk = static_cast<std::size_t>(k);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centroids;
  std::vector<bool> chosen(n, false);
  {
    const auto first = std::min(n - 1, static_cast<std::size_t>(detail::unit_uniform(rng) * n));
    centroids.push_back(points[first]);
    chosen[first] = true;
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = squared_distance(points[i], centroids[0]);
    while (centroids.size() < kk) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i])
          total += d2[i];
      std::size_t pick = n;
      if (total > 0.0) {
        const double r = detail::unit_uniform(rng) * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (chosen[i] || d2[i] <= 0.0)
            continue;
          acc += d2[i];
          pick = i;
          if (acc > r)
            break;
        }
      }
      if (pick == n) // all remaining points coincide with a centroid
        pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) -
                                        chosen.begin());
      chosen[pick] = true;
      centroids.push_back(points[pick]);
      for (std::size_t i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
    }
  }

  auto assign_all = [&] {
    std::vector<int> a(n);
    for (std::size_t i = 0; i < n; ++i)
      a[i] = static_cast<int>(detail::nearest_centroid(points[i], centroids));
    return a;
  };

  KMeansResult result;
  std::vector<int> assignment = assign_all();
  for (int iter = 1; iter <= max_iter; ++iter) {
    // Repair empty clusters.
    while (true) {
      std::vector<std::size_t> sizes(kk, 0);
      for (int c : assignment)
        ++sizes[static_cast<std::size_t>(c)];
      const auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
      if (empty == sizes.end())
        break;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(assignment[i]);
        if (sizes[c] < 2)
          continue;
        const double d = squared_distance(points[i], centroids[c]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      const auto target = static_cast<std::size_t>(empty - sizes.begin());
      assignment[far] = static_cast<int>(target);
      centroids[target] = points[far];
    }

    for (auto &c : centroids)
      std::fill(c.begin(), c.end(), 0.0);
    std::vector<std::size_t> sizes(kk, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(assignment[i]);
      ++sizes[c];
      for (std::size_t d = 0; d < dim; ++d)
        centroids[c][d] += points[i][d];
    }
    for (std::size_t c = 0; c < kk; ++c)
      for (auto &v : centroids[c])
        v /= static_cast<double>(sizes[c]);

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      inertia += squared_distance(points[i], centroids[static_cast<std::size_t>(assignment[i])]);
    result.inertia_history.push_back(inertia);
    result.iterations = iter;

    if (iter == max_iter)
      break;
    std::vector<int> next = assign_all();
    if (next == assignment) {
      result.converged = true;
      break;
    }
    assignment = std::move(next);
  }

  // Renumber clusters by first member so labels do not depend on seeding order.
  std::vector<int> remap(kk, -1);
  int next_id = 0;
  for (int c : assignment)
    if (remap[static_cast<std::size_t>(c)] < 0)
      remap[static_cast<std::size_t>(c)] = next_id++;
  result.centroids.resize(kk);
  for (std::size_t c = 0; c < kk; ++c)
    result.centroids[static_cast<std::size_t>(remap[c])] = std::move(centroids[c]);
  result.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    result.assignment[i] = remap[static_cast<std::size_t>(assignment[i])];
  result.inertia = result.inertia_history.back();
  return result;
}

inline EconomicClusterMap kmeans(const std::vector<ProsperityVector> &vectors,
                                 const KMeansOptions &opts = {}) {
  std::vector<std::vector<double>> points;
  points.reserve(vectors.size());
  for (const auto &v : vectors) {
    for (double x : v.dims)
      if (!std::isfinite(x))
        throw Error(ErrorCode::InvalidArgument, "non-finite dimension for " + v.country);
    points.emplace_back(v.dims.begin(), v.dims.end());
  }
  if (opts.standardize && !points.empty()) {
    for (std::size_t d = 0; d < kProsperityDims; ++d) {
      double mean = 0.0;
      for (const auto &p : points)
        mean += p[d];
      mean /= static_cast<double>(points.size());
      double var = 0.0;
      for (const auto &p : points)
        var += (p[d] - mean) * (p[d] - mean);
      const double sd = std::sqrt(var / static_cast<double>(points.size()));
      for (auto &p : points)
        p[d] = sd > 0.0 ? (p[d] - mean) / sd : 0.0;
    }
  }
  KMeansResult fit = kmeans_points(points, opts.k, opts.seed, opts.max_iter);
  EconomicClusterMap map;
  map.k = opts.k;
  map.seed = opts.seed;
  map.standardized = opts.standardize;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    map.add(vectors[i].country, fit.assignment[i]);
  map.centroids = std::move(fit.centroids);
  map.inertia = fit.inertia;
  map.inertia_history = std::move(fit.inertia_history);
  map.iterations = fit.iterations;
  return map;
}

// ---------------------------------------------------------------------------
// Barriers database

struct PublisherProfile {
  std::string source_name;
  std::string hq_country{kUnknownLabel};
  std::string political_alignment{kUnknownLabel};
};

struct BarriersDb {
  std::unordered_map<std::string, PublisherProfile> publishers; // keyed by folded name
  EconomicClusterMap economic;
  std::vector<std::string> warnings;

  static std::string publisher_key(std::string_view source_name) {
    return to_lower(trim(source_name));
  }

  const PublisherProfile *find_publisher(std::string_view source_name) const {
    auto it = publishers.find(publisher_key(source_name));
    return it == publishers.end() ? nullptr : &it->second;
  }

  void add_publisher(PublisherProfile p) {
    const std::string key = publisher_key(p.source_name);
    if (publishers.count(key))
      warnings.push_back("duplicate publisher '" + p.source_name + "': last row wins");
    publishers.insert_or_assign(key, std::move(p));
  }
};

inline std::vector<ProsperityVector> load_prosperity(const std::string &path) {
  std::vector<std::string> header{"country"};
  for (std::size_t d = 1; d <= kProsperityDims; ++d)
    header.push_back("d" + std::to_string(d));
  const CsvTable table = read_csv(path, header);
  std::vector<ProsperityVector> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = path + ":" + std::to_string(table.line_numbers[r]);
    if (row.size() != header.size())
      throw Error(ErrorCode::DimensionMismatch, where);
    ProsperityVector v;
    v.country = row[0];
    for (std::size_t d = 0; d < kProsperityDims; ++d) {
      try {
        std::size_t used = 0;
        v.dims[d] = std::stod(row[d + 1], &used);
        if (used != row[d + 1].size() || !std::isfinite(v.dims[d]))
          throw std::invalid_argument("trailing");
      } catch (const std::exception &) {
        throw Error(ErrorCode::MalformedRecord, where + ": bad number '" + row[d + 1] + "'");
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

/// Reads a `country,class` file (class written C1..Ck) as a pre-computed map.
inline EconomicClusterMap load_clusters(const std::string &path,
                                        std::vector<std::string> *warnings = nullptr) {
  const CsvTable table = read_csv(path, {"country", "class"});
  EconomicClusterMap map;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = path + ":" + std::to_string(table.line_numbers[r]);
    if (row.size() != 2 || row[0].empty())
      throw Error(ErrorCode::MalformedRecord, where);
    const std::string cls = to_lower(row[1]);
    int id = 0;
    try {
      std::size_t used = 0;
      if (cls.size() < 2 || cls[0] != 'c')
        throw std::invalid_argument("prefix");
      id = std::stoi(cls.substr(1), &used);
      if (used != cls.size() - 1 || id < 1)
        throw std::invalid_argument("range");
    } catch (const std::exception &) {
      throw Error(ErrorCode::MalformedRecord, where + ": bad class '" + row[1] + "'");
    }
    if (!map.add(row[0], id - 1) && warnings)
      warnings->push_back("duplicate country '" + row[0] + "' in " + path + ": last row wins");
    map.k = std::max(map.k, id);
  }
  return map;
}

inline void write_clusters(const EconomicClusterMap &map, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "country,class\n";
  for (std::size_t i = 0; i < map.countries.size(); ++i)
    out << csv_escape(map.countries[i]) << ',' << class_label(map.classes[i]) << '\n';
}

inline std::vector<PublisherProfile> load_publishers(const std::string &path) {
  const CsvTable table = read_csv(path, {"source_name", "hq_country", "political_alignment"});
  std::vector<PublisherProfile> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto row = table.rows[r];
    row.resize(3);
    if (row[0].empty())
      throw Error(ErrorCode::MalformedRecord,
                  path + ":" + std::to_string(table.line_numbers[r]) + ": empty source_name");
    PublisherProfile p;
    p.source_name = row[0];
    if (!row[1].empty() && to_lower(row[1]) != "unknown")
      p.hq_country = CountryNames::instance().canonical(row[1]);
    if (!row[2].empty() && to_lower(row[2]) != "unknown")
      p.political_alignment = row[2];
    out.push_back(std::move(p));
  }
  return out;
}

inline BarriersDb load_barriers_db(const std::string &publishers_path,
                                   const std::string &clusters_path) {
  BarriersDb db;
  for (auto &p : load_publishers(publishers_path))
    db.add_publisher(std::move(p));
  db.economic = load_clusters(clusters_path, &db.warnings);
  return db;
}

/// Label of an article on one barrier axis. Never throws; any missing link
/// in the publisher -> country -> class chain yields Unknown.
inline BarrierLabel assign_barrier(const Article &article, BarrierKind kind,
                                   const BarriersDb &db) {
  BarrierLabel out{kind, std::string(kUnknownLabel)};
  const PublisherProfile *p = db.find_publisher(article.source_name);
  if (!p)
    return out;
  switch (kind) {
  case BarrierKind::Geographic:
    out.label = p->hq_country;
    break;
  case BarrierKind::Political:
    out.label = p->political_alignment;
    break;
  case BarrierKind::Economic:
    if (p->hq_country != kUnknownLabel)
      if (auto l = db.economic.label_of(p->hq_country))
        out.label = *l;
    break;
  }
  if (out.label.empty())
    out.label = std::string(kUnknownLabel);
  return out;
}

inline std::vector<std::string> label_articles(const std::vector<Article> &articles,
                                               BarrierKind kind, const BarriersDb &db) {
  std::vector<std::string> labels;
  labels.reserve(articles.size());
  for (const auto &a : articles)
    labels.push_back(assign_barrier(a, kind, db).label);
  return labels;
}

/// Sorted distinct labels, with Unknown last when present.
inline std::vector<std::string> distinct_labels(const std::vector<std::string> &labels) {
  std::set<std::string> set(labels.begin(), labels.end());
  std::vector<std::string> out;
  bool unknown = false;
  for (const auto &l : set) {
    if (l == kUnknownLabel)
      unknown = true;
    else
      out.push_back(l);
  }
  // Class labels (C2 before C10) ahead of free-text labels.
  std::stable_sort(out.begin(), out.end(), [](const std::string &a, const std::string &b) {
    auto num = [](const std::string &s) -> long {
      if (s.size() < 2 || s[0] != 'C')
        return -1;
      for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9')
          return -1;
      return std::stol(s.substr(1));
    };
    const long na = num(a), nb = num(b);
    if (na >= 0 && nb >= 0)
      return na < nb;
    if ((na >= 0) != (nb >= 0))
      return na >= 0;
    return a < b;
  });
  if (unknown)
    out.emplace_back(kUnknownLabel);
  return out;
}

} // namespace newsbarrier
