#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "newsbarrier/barriers.hpp"
#include "newsbarrier/corpus.hpp"
#include "newsbarrier/error.hpp"
#include "newsbarrier/text_util.hpp"
#include "newsbarrier/trends.hpp"

namespace newsbarrier {

struct SentimentRules {
  int negation_window = 3;
  double negation_factor = -0.74;
  double intensifier_increment = 0.293;
  double normalization_alpha = 15.0;

  void validate() const {
    if (negation_window < 1)
      throw Error(ErrorCode::ValidationError, "negation_window must be >= 1");
    if (!(normalization_alpha > 0.0))
      throw Error(ErrorCode::ValidationError, "normalization_alpha must be > 0");
  }
};

/// Token valences plus the two modifier roles. All lookups are lowercase.
class Lexicon {
public:
  void add_valence(std::string_view token, double valence) {
    const std::string t = to_lower(trim(token));
    if (intensifiers_.count(t))
      throw Error(ErrorCode::MalformedRecord, "'" + t + "' is already an intensifier");
    valence_[t] = valence;
  }

  void add_intensifier(std::string_view token, double boost) {
    const std::string t = to_lower(trim(token));
    if (valence_.count(t))
      throw Error(ErrorCode::MalformedRecord, "'" + t + "' already carries a valence");
    intensifiers_[t] = boost;
  }

  void add_negation(std::string_view token) { negations_.insert(to_lower(trim(token))); }

  std::optional<double> valence(std::string_view token) const {
    auto it = valence_.find(std::string(token));
    if (it == valence_.end())
      return std::nullopt;
    return it->second;
  }

  std::optional<double> intensifier(std::string_view token) const {
    auto it = intensifiers_.find(std::string(token));
    if (it == intensifiers_.end())
      return std::nullopt;
    return it->second;
  }

  /// Listed negations plus any contraction ending in n't.
  bool is_negation(std::string_view token) const {
    if (negations_.count(std::string(token)))
      return true;
    return token.size() > 3 && token.substr(token.size() - 3) == "n't";
  }

  std::size_t size() const { return valence_.size(); }

  /// `valence_path`: token<TAB>valence[<TAB>...]. `intensifier_path`:
  /// token[<TAB>boost], missing boost = +default_boost. `negation_path`: one
  /// token per line. Either modifier path may be empty.
  static Lexicon load(const std::string &valence_path, const std::string &intensifier_path,
                      const std::string &negation_path, double default_boost = 0.293) {
    Lexicon lex;
    auto rows = [](const std::string &path) {
      std::vector<std::vector<std::string>> out;
      std::size_t line_no = 0;
      const std::string text = read_file(path);
      for (std::string_view line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty() || trim(line).front() == '#')
          continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
          const auto tab = line.find('\t', pos);
          cols.emplace_back(trim(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos)));
          if (tab == std::string_view::npos)
            break;
          pos = tab + 1;
        }
        cols.push_back(path + ":" + std::to_string(line_no));
        out.push_back(std::move(cols));
      }
      return out;
    };
    auto number = [](const std::string &text, const std::string &where) {
      try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v))
          return v;
      } catch (const std::exception &) {
      }
      throw Error(ErrorCode::MalformedRecord, where + ": bad number '" + text + "'");
    };
    if (!intensifier_path.empty())
      for (const auto &r : rows(intensifier_path))
        lex.add_intensifier(r[0], r.size() > 2 ? number(r[1], r.back()) : default_boost);
    for (const auto &r : rows(valence_path)) {
      if (r.size() < 3)
        throw Error(ErrorCode::MalformedRecord, r.back() + ": expected token<TAB>valence");
      lex.add_valence(r[0], number(r[1], r.back()));
    }
    if (!negation_path.empty())
      for (const auto &r : rows(negation_path))
        lex.add_negation(r[0]);
    return lex;
  }

private:
  std::unordered_map<std::string, double> valence_;
  std::unordered_map<std::string, double> intensifiers_;
  std::unordered_set<std::string> negations_;
};

// ---------------------------------------------------------------------------
// Sentence splitting

inline const std::set<std::string, std::less<>> &abbreviations() {
  static const std::set<std::string, std::less<>> set = {
      "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e",
      "u.s", "u.k", "u.n", "inc", "ltd", "co", "corp", "gen", "gov", "sen", "rep",
      "lt", "col", "capt", "sgt", "no", "jan", "feb", "mar", "apr", "jun", "jul",
      "aug", "sep", "sept", "oct", "nov", "dec", "approx", "dept", "est", "fig"};
  return set;
}

/// Splits on . ! ? followed by whitespace (closing quotes and brackets stay
/// with their sentence). A period after a listed abbreviation or a single
/// letter initial does not end a sentence.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    const std::string_view s = trim(text.substr(start, end - start));
    if (!s.empty())
      out.emplace_back(s);
    start = end;
  };
  auto is_space = [](char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?')
      continue;
    std::size_t j = i;
    while (j + 1 < text.size() && (text[j + 1] == '.' || text[j + 1] == '!' || text[j + 1] == '?'))
      ++j;
    std::size_t k = j + 1;
    while (k < text.size() && (text[k] == '"' || text[k] == '\'' || text[k] == ')' || text[k] == ']'))
      ++k;
    if (k < text.size() && !is_space(text[k])) {
      i = j;
      continue;
    }
    if (c == '.' && j == i) {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1]))
        --w;
      std::string word = to_lower(text.substr(w, i - w));
      while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\''))
        word.erase(word.begin());
      const bool initial = word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]));
      if (initial || abbreviations().count(word)) {
        i = j;
        continue;
      }
    }
    emit(k);
    i = k > 0 ? k - 1 : 0;
  }
  emit(text.size());
  return out;
}

/// The first min(n, count) sentences, joined by single spaces.
inline std::string first_sentences(std::string_view text, std::size_t n = 5) {
  const auto sentences = split_sentences(text);
  std::string out;
  for (std::size_t i = 0; i < std::min(n, sentences.size()); ++i) {
    if (i)
      out += ' ';
    out += sentences[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

/// Whitespace tokens, lowercased, with surrounding punctuation stripped.
/// Inner apostrophes and hyphens survive ("don't", "well-known").
inline std::vector<std::string> sentiment_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  auto keep = [](unsigned char ch) { return std::isalnum(ch) || ch >= 0x80; };
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])))
      ++end;
    std::string_view tok = text.substr(pos, end - pos);
    while (!tok.empty() && !keep(static_cast<unsigned char>(tok.front())))
      tok.remove_prefix(1);
    while (!tok.empty() && !keep(static_cast<unsigned char>(tok.back())))
      tok.remove_suffix(1);
    if (!tok.empty()) {
      std::string t = to_lower(tok);
      // Curly apostrophe to ASCII so contractions match the negation list.
      for (std::size_t p; (p = t.find("\xE2\x80\x99")) != std::string::npos;)
        t.replace(p, 3, "'");
      out.push_back(std::move(t));
    }
    pos = end;
  }
  return out;
}

/// Sum of rule-adjusted valences, before normalisation.
inline double raw_valence_sum(const std::vector<std::string> &tokens, const Lexicon &lexicon,
                              const SentimentRules &rules) {
  double raw = 0.0;
  const auto window = static_cast<std::size_t>(rules.negation_window);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto base = lexicon.valence(tokens[i]);
    if (!base || *base == 0.0)
      continue;
    double v = *base;
    bool negated = false;
    for (std::size_t d = 1; d <= window && d <= i; ++d) {
      const std::string &prev = tokens[i - d];
      if (auto boost = lexicon.intensifier(prev))
        v += (*base > 0.0 ? 1.0 : -1.0) * *boost;
      if (lexicon.is_negation(prev))
        negated = true;
    }
    if (negated)
      v *= rules.negation_factor;
    raw += v;
  }
  return raw;
}

/// x / sqrt(x^2 + alpha), held strictly inside (-1, 1).
inline double normalize_score(double raw, double alpha) {
  const double limit = std::nextafter(1.0, 0.0);
  return std::clamp(raw / std::sqrt(raw * raw + alpha), -limit, limit);
}

inline double compound_score(std::string_view text, const Lexicon &lexicon,
                             const SentimentRules &rules = {}) {
  return normalize_score(raw_valence_sum(sentiment_tokens(text), lexicon, rules),
                         rules.normalization_alpha);
}

enum class SentimentClass { Negative, Neutral, Positive };

constexpr std::string_view to_string(SentimentClass c) {
  switch (c) {
  case SentimentClass::Negative: return "negative";
  case SentimentClass::Neutral: return "neutral";
  case SentimentClass::Positive: return "positive";
  }
  return "neutral";
}

/// Neutral band is closed: [-0.1, 0.1].
constexpr SentimentClass classify(double compound) {
  if (compound < -0.1)
    return SentimentClass::Negative;
  if (compound > 0.1)
    return SentimentClass::Positive;
  return SentimentClass::Neutral;
}

struct SentimentRecord {
  std::string article_id;
  double compound = 0.0;
  SentimentClass cls = SentimentClass::Neutral;
};

/// Text that gets scored: the opening five sentences of the body, or the
/// title when the body is blank.
inline std::string scoring_text(const Article &a) {
  if (trim(a.body).empty())
    return a.title;
  return first_sentences(a.body, 5);
}

inline SentimentRecord score_article(const Article &a, const Lexicon &lexicon,
                                     const SentimentRules &rules = {}) {
  const double c = compound_score(scoring_text(a), lexicon, rules);
  return {a.id, c, classify(c)};
}

struct SentimentHeatmap {
  BarrierKind kind = BarrierKind::Geographic;
  BinAxis days;
  std::vector<std::string> labels;
  /// cells[day][label]; nullopt where no article fell in the cell.
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<std::vector<int>> counts;
};

/// Mean compound score per (UTC day, barrier label).
inline SentimentHeatmap sentiment_heatmap(const Corpus &corpus, const BarriersDb &db,
                                          BarrierKind kind, const TimeWindow &window,
                                          const Lexicon &lexicon, const SentimentRules &rules = {}) {
  if (!window.valid())
    throw Error(ErrorCode::ValidationError, "window start must precede end");
  rules.validate();
  SentimentHeatmap h;
  h.kind = kind;
  h.days = BinAxis::cover(window, BinSize::Day);
  const std::vector<std::string> article_labels = label_articles(corpus.articles, kind, db);
  h.labels = distinct_labels(article_labels);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < h.labels.size(); ++i)
    col[h.labels[i]] = i;
  std::vector<std::vector<double>> sums(h.days.starts.size(), std::vector<double>(h.labels.size()));
  h.counts.assign(h.days.starts.size(), std::vector<int>(h.labels.size(), 0));
  for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
    const auto &a = corpus.articles[i];
    if (!window.contains(a.published_at))
      continue;
    const std::size_t d = h.days.index_of(a.published_at);
    const std::size_t l = col[article_labels[i]];
    sums[d][l] += score_article(a, lexicon, rules).compound;
    ++h.counts[d][l];
  }
  h.cells.assign(h.days.starts.size(), std::vector<std::optional<double>>(h.labels.size()));
  for (std::size_t d = 0; d < sums.size(); ++d)
    for (std::size_t l = 0; l < h.labels.size(); ++l)
      if (h.counts[d][l] > 0)
        h.cells[d][l] = sums[d][l] / h.counts[d][l];
  return h;
}

inline nlohmann::json sentiment_rules_json(const SentimentRules &r) {
  return {{"negation_window", r.negation_window},
          {"negation_factor", r.negation_factor},
          {"intensifier_increment", r.intensifier_increment},
          {"normalization_alpha", r.normalization_alpha}};
}

inline nlohmann::json export_heatmap(const SentimentHeatmap &h, const SentimentRules &rules = {}) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto &row : h.cells) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto &c : row)
      r.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
    cells.push_back(std::move(r));
  }
  return {{"analysis", "sentiment"},
          {"barrier", std::string(to_string(h.kind))},
          {"days", h.days.labels_json()},
          {"labels", h.labels},
          {"cells", std::move(cells)},
          {"counts", h.counts},
          {"rules", sentiment_rules_json(rules)}};
}

} // namespace newsbarrier
