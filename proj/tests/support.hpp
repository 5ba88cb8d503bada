#pragma once

#include <array>
#include <atomic>
#include <cstdio>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include "newsbarrier/corpus.hpp"
#include "newsbarrier/sentiment.hpp"
#include "newsbarrier/time.hpp"

#ifndef NEWSBARRIER_SOURCE_DIR
#define NEWSBARRIER_SOURCE_DIR "."
#endif

namespace testing_support {

namespace nb = newsbarrier;

inline std::filesystem::path source_dir() { return NEWSBARRIER_SOURCE_DIR; }
inline std::filesystem::path data_path(const std::string &rel) { return source_dir() / "data" / rel; }

/// Directory removed on scope exit.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("newsbarrier-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct CommandResult {
  int exit_code = -1;
  std::string out;  // stdout only
};

/// Runs a shell command, capturing stdout. Stderr is discarded.
inline CommandResult run_command(const std::string &command) {
  CommandResult r;
  FILE *pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe)
    return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string cli_path() {
#ifdef NEWSBARRIER_CLI
  return NEWSBARRIER_CLI;
#else
  return "newsbarrier";
#endif
}

inline nb::Article article(std::string id, const std::string &when, std::string source = "Wire",
                           std::vector<nb::Concept> concepts = {}, std::string title = "",
                           std::string body = "") {
  nb::Article a;
  a.id = std::move(id);
  a.published_at = nb::parse_timestamp(when);
  a.source_name = std::move(source);
  a.concepts = std::move(concepts);
  a.title = std::move(title);
  a.body = std::move(body);
  return a;
}

inline nb::Corpus corpus_of(std::vector<nb::Article> articles, std::string tag = "test") {
  nb::normalize_articles(articles);
  return {std::move(tag), std::move(articles)};
}

inline nb::Lexicon micro_lexicon() {
  return nb::Lexicon::load(data_path("lexicon/micro/valence.tsv").string(),
                           data_path("lexicon/micro/intensifiers.tsv").string(),
                           data_path("lexicon/micro/negations.txt").string());
}

/// Random corpus over a small concept and word pool, spread across a few
/// days with deliberate timestamp ties.
inline nb::Corpus random_corpus(std::mt19937_64 &rng, int max_articles) {
  static const std::vector<std::string> concepts = {"alpha", "beta", "gamma", "delta", "epsilon",
                                                    "zeta", "eta", "theta"};
  static const std::vector<std::string> words = {"river", "stone", "cloud", "market", "border",
                                                 "summit", "harbor", "signal", "winter"};
  std::uniform_int_distribution<int> count(1, max_articles);
  std::uniform_int_distribution<int> pick_concept(0, static_cast<int>(concepts.size()) - 1);
  std::uniform_int_distribution<int> pick_word(0, static_cast<int>(words.size()) - 1);
  std::uniform_int_distribution<int> n_features(1, 4);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::uniform_int_distribution<int> minute(0, 10 * 24 * 60);
  const int n = count(rng);
  std::vector<nb::Article> out;
  const nb::Timestamp base = nb::parse_timestamp("2023-11-01");
  for (int i = 0; i < n; ++i) {
    nb::Article a;
    a.id = "a" + std::to_string(i);
    // Coarse minutes so several articles share a timestamp.
    a.published_at = nb::Timestamp{base.seconds + 60LL * (minute(rng) / 120 * 120)};
    a.source_name = "Wire";
    const int f = n_features(rng);
    for (int c = 0; c < f; ++c)
      a.concepts.push_back({concepts[static_cast<std::size_t>(pick_concept(rng))], weight(rng)});
    for (int w = 0; w < f + 2; ++w)
      a.body += words[static_cast<std::size_t>(pick_word(rng))] + " ";
    out.push_back(std::move(a));
  }
  return corpus_of(std::move(out), "random");
}

} // namespace testing_support
