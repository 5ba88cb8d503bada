#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "newsbarrier/error.hpp"
#include "newsbarrier/text_util.hpp"

namespace newsbarrier {

using StopwordSet = std::unordered_set<std::string>;

// clang-format off
inline constexpr std::string_view kDefaultStopwords[] = {
  "a", "about", "above", "after", "again", "against", "all", "also", "am", "an",
  "and", "any", "are", "aren't", "as", "at", "be", "because", "been", "before",
  "being", "below", "between", "both", "but", "by", "can", "cannot", "could",
  "couldn't", "did", "didn't", "do", "does", "doesn't", "doing", "don't", "down",
  "during", "each", "few", "for", "from", "further", "had", "hadn't", "has",
  "hasn't", "have", "haven't", "having", "he", "her", "here", "hers", "herself",
  "him", "himself", "his", "how", "however", "i", "if", "in", "into", "is",
  "isn't", "it", "its", "itself", "just", "me", "more", "most", "my", "myself",
  "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other",
  "ought", "our", "ours", "ourselves", "out", "over", "own", "said", "same",
  "says", "she", "should", "shouldn't", "so", "some", "such", "than", "that",
  "the", "their", "theirs", "them", "themselves", "then", "there", "these",
  "they", "this", "those", "through", "to", "too", "under", "until", "up",
  "upon", "us", "very", "was", "wasn't", "we", "were", "weren't", "what", "when",
  "where", "which", "while", "who", "whom", "why", "will", "with", "won't",
  "would", "wouldn't", "you", "your", "yours", "yourself", "yourselves",
};
// clang-format on

inline StopwordSet default_stopwords() {
  StopwordSet set;
  for (auto w : kDefaultStopwords)
    set.emplace(w);
  return set;
}

/// One term per line; blank lines and `#` comments ignored.
inline StopwordSet load_stopwords(const std::string &path) {
  StopwordSet set;
  const std::string text = read_file(path);
  for (std::string_view line : split_lines(text)) {
    line = trim(line);
    if (!line.empty() && line.front() != '#')
      set.insert(to_lower(line));
  }
  return set;
}

struct TokenizedDoc {
  std::string id;
  std::vector<std::string> tokens;
};

/// Lowercases, splits on anything that is not an ASCII letter, digit or a
/// UTF-8 continuation of a word, then drops tokens shorter than two bytes,
/// pure numbers and stopwords. Order is preserved.
inline std::vector<std::string> preprocess_tokens(std::string_view text,
                                                  const StopwordSet &stopwords) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2 &&
        !std::all_of(cur.begin(), cur.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
        !stopwords.count(cur))
      out.push_back(cur);
    cur.clear();
  };
  for (unsigned char c : text) {
    const bool word = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
    if (c >= 'A' && c <= 'Z')
      cur += static_cast<char>(c - 'A' + 'a');
    else if (word)
      cur += static_cast<char>(c);
    else
      flush();
  }
  flush();
  return out;
}

inline TokenizedDoc preprocess(std::string id, std::string_view text,
                               const StopwordSet &stopwords) {
  return {std::move(id), preprocess_tokens(text, stopwords)};
}

/// Sparse row: (column, weight) pairs sorted by column.
using SparseRow = std::vector<std::pair<std::uint32_t, double>>;

inline double dot(const SparseRow &a, const SparseRow &b) {
  double s = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first)
      ++i;
    else if (j->first < i->first)
      ++j;
    else
      s += (i++)->second * (j++)->second;
  }
  return s;
}

inline double squared_norm(const SparseRow &a) {
  double s = 0.0;
  for (const auto &[_, w] : a)
    s += w * w;
  return s;
}

struct TfIdfOptions {
  int min_df = 2;
};

struct TfIdfMatrix {
  std::vector<std::string> vocabulary;          // column -> term, sorted
  std::map<std::string, std::uint32_t> column;  // term -> column
  std::vector<double> idf;                      // per column
  std::vector<SparseRow> rows;                  // L2-normalised (or empty)

  double weight(std::size_t row, std::string_view term) const {
    auto it = column.find(std::string(term));
    if (it == column.end())
      return 0.0;
    for (const auto &[c, w] : rows[row])
      if (c == it->second)
        return w;
    return 0.0;
  }
};

/// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1, rows L2-normalised.
/// Terms found in fewer than min_df documents are dropped.
inline TfIdfMatrix tfidf(const std::vector<TokenizedDoc> &docs, const TfIdfOptions &opts = {}) {
  if (docs.empty())
    throw Error(ErrorCode::EmptyInput, "tfidf needs at least one document");
  std::map<std::string, int> df;
  for (const auto &d : docs) {
    std::unordered_set<std::string_view> seen(d.tokens.begin(), d.tokens.end());
    for (auto t : seen)
      ++df[std::string(t)];
  }
  TfIdfMatrix m;
  const double n = static_cast<double>(docs.size());
  for (const auto &[term, count] : df) {
    if (count < opts.min_df)
      continue;
    m.column.emplace(term, static_cast<std::uint32_t>(m.vocabulary.size()));
    m.vocabulary.push_back(term);
    m.idf.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  if (m.vocabulary.empty())
    throw Error(ErrorCode::EmptyVocabulary,
                "no term reaches min_df=" + std::to_string(opts.min_df));

  m.rows.reserve(docs.size());
  for (const auto &d : docs) {
    std::map<std::uint32_t, double> counts;
    for (const auto &t : d.tokens)
      if (auto it = m.column.find(t); it != m.column.end())
        counts[it->second] += 1.0;
    SparseRow row;
    row.reserve(counts.size());
    double norm2 = 0.0;
    for (const auto &[c, tf] : counts) {
      const double w = tf * m.idf[c];
      row.emplace_back(c, w);
      norm2 += w * w;
    }
    if (norm2 > 0.0) {
      const double norm = std::sqrt(norm2);
      for (auto &e : row)
        e.second /= norm;
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

} // namespace newsbarrier
